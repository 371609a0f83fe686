use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde_json::{json, Value};

use iets_core::generic::{find_integer_relation, tower_bad_relations, RelationDiagnostic};
use iets_core::io::{self as json_io, to_line};
use iets_core::pipeline::{solve_system, solve_tower, PipelineOptions};
use iets_core::solver::{default_schedule, Enumeration, RootRecord, SolveOptions};
use iets_core::system::MasserSystem;
use iets_core::tower::ExpTower;
use iets_core::verify::{count_zeros_with, CountOptions, Rect};
use iets_core::Error;

use crate::cli::{BadRelationArgs, Cli, Command, CountArgs, DiagnoseArgs, InputArgs, RunArgs, TowerArgs};

pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_SHORTFALL: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Debug)]
pub enum Failure {
    Io(PathBuf, io::Error),
    Stage(&'static str, Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(..) => 1,
            Failure::Stage(_, Error::Degenerate { .. }) => EXIT_DEGENERATE,
            Failure::Stage("parse", _) | Failure::Stage(_, Error::Parse(_)) => EXIT_PARSE,
            Failure::Stage(..) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Io(p, e) => write!(f, "io: {}: {e}", p.display()),
            Failure::Stage(stage, e) => write!(f, "{stage}: {e}"),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn stage<T>(name: &'static str, r: iets_core::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Stage(name, e))
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Io(path.into(), e))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Io(path.into(), e))?;
    }
    Ok(text)
}

fn load_system(path: &Path) -> Result<MasserSystem, Failure> {
    let text = read_input(path)?;
    stage("parse", json_io::parse(&text).and_then(|v| json_io::system_from_json(&v)))
}

fn load_tower(path: &Path) -> Result<ExpTower, Failure> {
    let text = read_input(path)?;
    stage("parse", json_io::parse(&text).and_then(|v| json_io::tower_from_json(&v)))
}

struct Lines {
    out: Box<dyn Write>,
    path: PathBuf,
}

impl Lines {
    fn open(path: Option<&PathBuf>) -> Result<Self, Failure> {
        match path {
            Some(p) => Ok(Lines {
                out: Box::new(BufWriter::new(File::create(p).map_err(|e| Failure::Io(p.clone(), e))?)),
                path: p.clone(),
            }),
            None => Ok(Lines {
                out: Box::new(BufWriter::new(io::stdout())),
                path: PathBuf::from("<stdout>"),
            }),
        }
    }

    fn emit(&mut self, v: &Value) -> Result<(), Failure> {
        writeln!(self.out, "{}", to_line(v)).map_err(|e| Failure::Io(self.path.clone(), e))
    }

    fn finish(mut self) -> Result<(), Failure> {
        match self.out.flush() {
            Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure::Io(self.path, e)),
            _ => Ok(()),
        }
    }
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Solve(a) => solve(a),
        Command::SolveTower(a) => solve_tower_cmd(a),
        Command::CheckDegenerate(a) => check_degenerate(a),
        Command::BadRelations(a) => bad_relations(a),
        Command::CountRoots(a) => count_roots(a),
        Command::Diagnose(a) => diagnose(a),
    }
}

fn options(tol: f64, t_max: u64, workers: Option<usize>, height: u64, digits: u32) -> Result<PipelineOptions, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::Stage("config", Error::InvalidInput(format!("tolerance must be positive, got {tol}"))));
    }
    Ok(PipelineOptions {
        solve: SolveOptions {
            tol,
            schedule: default_schedule(t_max),
            workers,
            ..SolveOptions::default()
        },
        height,
        digits,
        generic: true,
    })
}

fn run_options(a: &RunArgs) -> Result<PipelineOptions, Failure> {
    options(a.tol, a.t_max, a.workers, a.height, a.digits)
}

fn report_shortfall(e: &Enumeration) -> i32 {
    if !e.shortfall() {
        return 0;
    }
    eprintln!(
        "iets: solve: found {} of {} requested roots",
        e.roots.len(),
        e.requested
    );
    for f in e.failures.iter().take(8) {
        eprintln!("iets: solve: seed q = {:?}, t = {}: {}", f.q, f.t, f.reason);
    }
    EXIT_SHORTFALL
}

fn write_plot(path: &Path, roots: &[RootRecord]) -> Result<(), Failure> {
    let io_err = |e: csv::Error| Failure::Io(path.into(), io::Error::other(e));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(["re", "im", "residual"]).map_err(io_err)?;
    for r in roots {
        let z = r.x[0];
        w.write_record([
            format!("{:.16e}", z.re),
            format!("{:.16e}", z.im),
            format!("{:.16e}", r.max_residual()),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Failure::Io(path.into(), e))
}

fn solve(a: RunArgs) -> Outcome {
    let s = load_system(&a.io.input)?;
    let opts = run_options(&a)?;
    let sol = stage("solve", solve_system(&s, a.roots, &opts))?;
    let mut lines = Lines::open(a.io.out.as_ref())?;
    for (i, root) in sol.enumeration.roots.iter().enumerate() {
        let mut v = json_io::root_to_json(root, sol.rechecks.get(i));
        if sol.system.provenance.recovery.is_some() {
            v["recovered"] = Value::Array(sol.recovered[i].iter().map(|z| json_io::complex(*z)).collect());
        }
        lines.emit(&v)?;
    }
    lines.finish()?;
    if let Some(p) = &a.plot {
        write_plot(p, &sol.enumeration.roots)?;
    }
    Ok(report_shortfall(&sol.enumeration))
}

fn degeneracy_line(t: &ExpTower) -> (bool, Value) {
    match t.is_degenerate() {
        Some(d) => (
            true,
            json!({"degenerate": true, "g": json_io::poly_to_json(&d.g), "exps": d.exps}),
        ),
        None => (false, json!({"degenerate": false, "g": null, "exps": null})),
    }
}

fn solve_tower_cmd(a: TowerArgs) -> Outcome {
    let t = load_tower(&a.run.io.input)?;
    let mut lines = Lines::open(a.run.io.out.as_ref())?;
    let (degenerate, line) = degeneracy_line(&t);
    if degenerate {
        lines.emit(&line)?;
        lines.finish()?;
        eprintln!("iets: check: tower is degenerate and has no zeros beyond those of g");
        return Ok(EXIT_DEGENERATE);
    }
    let mut opts = run_options(&a.run)?;
    opts.generic = !a.no_exclusions;
    let sol = stage("solve", solve_tower(&t, a.run.roots, &opts))?;
    let forms: Vec<Value> = sol.forms().iter().map(|f| json!(f.to_string())).collect();
    for (i, root) in sol.solution.enumeration.roots.iter().enumerate() {
        let mut v = json_io::root_to_json(root, sol.solution.rechecks.get(i));
        v["excluded"] = Value::Array(forms.clone());
        v["margins"] = Value::Array(sol.margins[i].iter().map(|m| json_io::float(*m)).collect());
        lines.emit(&v)?;
    }
    lines.finish()?;
    if let Some(p) = &a.run.plot {
        write_plot(p, &sol.solution.enumeration.roots)?;
    }
    Ok(report_shortfall(&sol.solution.enumeration))
}

fn check_degenerate(a: InputArgs) -> Outcome {
    let t = load_tower(&a.input)?;
    let (degenerate, line) = degeneracy_line(&t);
    let mut lines = Lines::open(a.out.as_ref())?;
    lines.emit(&line)?;
    lines.finish()?;
    Ok(if degenerate { EXIT_DEGENERATE } else { 0 })
}

fn bad_relations(a: BadRelationArgs) -> Outcome {
    let t = load_tower(&a.io.input)?;
    let rels = stage("bad-relations", tower_bad_relations(&t, a.height))?;
    let mut lines = Lines::open(a.io.out.as_ref())?;
    lines.emit(&Value::Array(rels.iter().map(json_io::bad_relation_to_json).collect()))?;
    lines.finish()?;
    Ok(0)
}

fn count_roots(a: CountArgs) -> Outcome {
    let t = load_tower(&a.io.input)?;
    let r = &a.region;
    if r.len() != 4 {
        return Err(Failure::Stage(
            "parse",
            Error::Parse(format!("--region needs x0,y0,x1,y1, got {} values", r.len())),
        ));
    }
    let rect = stage("count", Rect::new((r[0], r[2]), (r[1], r[3])))?;
    let opts = CountOptions {
        max_depth: a.depth,
        initial_panels: a.samples.max(1),
        ..CountOptions::default()
    };
    let c = stage("count", count_zeros_with(&t, rect, &opts))?;
    let mut lines = Lines::open(a.io.out.as_ref())?;
    lines.emit(&json_io::count_to_json(&c))?;
    lines.finish()?;
    Ok(0)
}

fn parse_vector(text: &str) -> Result<Vec<Complex64>, Failure> {
    text.split(',')
        .map(|pair| {
            let (re, im) = pair.split_once(':').unwrap_or((pair, "0"));
            match (re.trim().parse::<f64>(), im.trim().parse::<f64>()) {
                (Ok(re), Ok(im)) => Ok(Complex64::new(re, im)),
                _ => Err(Failure::Stage("parse", Error::Parse(format!("bad vector entry \"{pair}\"")))),
            }
        })
        .collect()
}

fn diagnose(a: DiagnoseArgs) -> Outcome {
    let mut lines = Lines::open(a.out.as_ref())?;
    if let Some(text) = &a.vector {
        let v = parse_vector(text)?;
        let d = RelationDiagnostic {
            verdict: find_integer_relation(&v, a.height, a.digits),
            vector: v,
            height_bound: a.height,
            digits: a.digits,
            multiplicative: None,
            partial: false,
        };
        lines.emit(&json_io::diagnostic_to_json(&d))?;
        lines.finish()?;
        return Ok(0);
    }
    let Some(input) = &a.input else {
        return Err(Failure::Stage(
            "parse",
            Error::Parse("diagnose needs a tower file or --vector".into()),
        ));
    };
    let t = load_tower(input)?;
    let opts = options(a.tol, a.t_max, a.workers, a.height, a.digits)?;
    let sol = stage("solve", solve_tower(&t, a.roots, &opts))?;
    for root in &sol.solution.enumeration.roots {
        let v = match &root.relations {
            Some(d) => json_io::diagnostic_to_json(d),
            None => json!({"verdict": "unavailable"}),
        };
        lines.emit(&json!({"seed": {"q": root.seed.q, "t": root.seed.t}, "relations": v}))?;
    }
    lines.finish()?;
    Ok(report_shortfall(&sol.solution.enumeration))
}
