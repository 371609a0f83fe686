//! Lattice seeds, Kantorovich certification and Newton refinement for
//! Masser systems.

pub(crate) mod kernel;
mod pack;
mod seed;

pub use pack::{KantorovichCertificate, ShiftedSystem, Verdict, SAFETY_FACTOR};
pub use seed::{find_seed_vector, seed_candidates, seed_is_valid, SeedRay};

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generic::RelationDiagnostic;
use crate::system::MasserSystem;
use kernel::Compiled;

const FIXED_POINT_ITERS: usize = 200;
const DAMPED_NEWTON_ITERS: usize = 100;

/// A certified solution of a Masser system.
#[derive(Clone, Debug, PartialEq)]
pub struct RootRecord {
    /// Solution in original coordinates.
    pub x: Vec<Complex64>,
    /// `x − ω̄`: the part of the solution off the lattice point.
    pub local: Vec<Complex64>,
    /// Per-equation `|e^{x_i} − f_i(x̄)|`.
    pub residuals: Vec<f64>,
    pub certificate: KantorovichCertificate,
    pub seed: SeedRay,
    /// Branch values at the solution, one entry per equation.
    pub branch_values: Vec<Option<Complex64>>,
    /// The seed center needed the fixed-point fallback before certifying.
    pub refined: bool,
    /// Newton step sizes `‖Δx‖_∞`.
    pub newton_steps: Vec<f64>,
    pub warnings: Vec<String>,
    pub tower_residual: Option<f64>,
    pub relations: Option<RelationDiagnostic>,
}

impl RootRecord {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Values of `t` to try, in order; `0` requests the origin seed.
    pub schedule: Vec<u64>,
    pub search_radius: i64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Also try every sign pattern of the base seed vector.
    pub vary_signs: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-12,
            schedule: default_schedule(1 << 14),
            search_radius: 3,
            workers: None,
            vary_signs: true,
        }
    }
}

/// `2^4, 2^5, …` up to `t_max`.
pub fn default_schedule(t_max: u64) -> Vec<u64> {
    std::iter::successors(Some(16u64), |t| t.checked_mul(2))
        .take_while(|&t| t <= t_max)
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeedFailure {
    pub q: Vec<i64>,
    pub t: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub roots: Vec<RootRecord>,
    pub failures: Vec<SeedFailure>,
    pub requested: usize,
}

impl Enumeration {
    pub fn shortfall(&self) -> bool {
        self.roots.len() < self.requested
    }
}

/// Seed ray `t·q̄` with `A_i = f_i(ω̄)`; `t = 0` gives the origin seed with
/// initial shift `i·q̄`.
pub fn make_seed(s: &MasserSystem, q: &[i64], t: u64) -> Result<SeedRay> {
    let k = Compiled::new(s)?;
    build_seed(&k, q, t)
}

fn build_seed(k: &Compiled, q: &[i64], t: u64) -> Result<SeedRay> {
    if t == 0 {
        seed::origin_seed(k, q)
    } else {
        seed::standard_seed(k, q, t)
    }
}

pub fn shift_system(s: &MasserSystem, seed: &SeedRay) -> Result<ShiftedSystem> {
    ShiftedSystem::new(Arc::new(Compiled::new(s)?), seed.clone())
}

/// Shifted pack and certificate at the plain seed center (no fallback).
pub fn certify_seed(s: &MasserSystem, q: &[i64], t: u64) -> Result<(ShiftedSystem, KantorovichCertificate)> {
    let k = Arc::new(Compiled::new(s)?);
    let pack = ShiftedSystem::new(k.clone(), build_seed(&k, q, t)?)?;
    let cert = pack.certify()?;
    Ok((pack, cert))
}

/// Newton from the center of a certified pack; the limit must stay inside
/// the Kantorovich ball.
pub fn newton_solve(pack: &mut ShiftedSystem, cert: &KantorovichCertificate, tol: f64) -> Result<RootRecord> {
    if !cert.is_certified() {
        return Err(Error::CertificationFailed(format!(
            "condition {:.3e} at seed q = {:?}, t = {}",
            cert.condition,
            pack.seed().q,
            pack.seed().t
        )));
    }
    let run = pack.newton(tol, 2.0 * cert.ball_radius.max(1e-300) + 1e-12)?;
    let xn = run.x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if xn > cert.ball_radius * (1.0 + 1e-6) + 1e-14 {
        return Err(pack.fail("Newton limit outside the Kantorovich ball"));
    }
    let worst = run.residuals.iter().copied().fold(0.0, f64::max);
    if !(worst < tol) {
        return Err(pack.fail(&format!("residual {worst:.3e} did not reach tolerance {tol:.1e}")));
    }
    Ok(RootRecord {
        x: pack.absolute(&run.x),
        local: pack.local(&run.x),
        residuals: run.residuals,
        certificate: cert.clone(),
        seed: pack.seed().clone(),
        branch_values: pack.states().to_vec(),
        refined: false,
        newton_steps: run.steps,
        warnings: pack.warnings().to_vec(),
        tower_residual: None,
        relations: None,
    })
}

/// Certifies and solves at one seed, falling back to a refined center when
/// the plain center does not certify.
pub fn solve_seed(s: &MasserSystem, q: &[i64], t: u64, tol: f64) -> Result<RootRecord> {
    let k = Arc::new(Compiled::new(s)?);
    solve_with_kernel(&k, q, t, tol)
}

fn solve_with_kernel(k: &Arc<Compiled>, q: &[i64], t: u64, tol: f64) -> Result<RootRecord> {
    let seed = build_seed(k, q, t)?;
    if t > 0 {
        let mut pack = ShiftedSystem::new(k.clone(), seed.clone())?;
        if let Ok(cert) = pack.certify() {
            if cert.is_certified() {
                if let Ok(rec) = newton_solve(&mut pack, &cert, tol) {
                    return Ok(rec);
                }
            }
        }
    }
    let refined = refine_center(k, seed)?;
    let mut pack = ShiftedSystem::new(k.clone(), refined)?;
    let cert = pack.certify()?;
    let mut rec = newton_solve(&mut pack, &cert, tol)?;
    rec.refined = true;
    Ok(rec)
}

/// Moves the shift `ā` toward a root: fixed-point sweeps
/// `a_i ← Log f_i(ω̄ + ā)`, then damped Newton, then recentres at the limit.
fn refine_center(k: &Arc<Compiled>, mut seed: SeedRay) -> Result<SeedRay> {
    let n = k.n();
    for _ in 0..FIXED_POINT_ITERS {
        let c = seed.center();
        let mut next = Vec::with_capacity(n);
        for i in 0..n {
            let v = k.value(i, &c, seed.branch_states[i])?.value;
            if v.norm() == 0.0 || !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::SolverFailed {
                    q: seed.q.clone(),
                    t: seed.t,
                    reason: "right-hand side vanished during refinement".into(),
                });
            }
            if k.is_branch(i) {
                seed.branch_states[i] = Some(v);
            }
            next.push(v.ln());
        }
        let change = next
            .iter()
            .zip(&seed.shifts)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        seed.shifts = next;
        if change < 1e-13 {
            break;
        }
    }
    seed.normalizers = seed.shifts.iter().map(|a| a.exp()).collect();
    seed::refresh_branch_states(k, &mut seed)?;

    let mut pack = ShiftedSystem::new(k.clone(), seed.clone())?;
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let norm = |f: &[Complex64]| f.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut ev = pack.eval(&x)?;
    for _ in 0..DAMPED_NEWTON_ITERS {
        let r0 = norm(&ev.f);
        if r0 < 1e-14 {
            break;
        }
        let j = pack.jacobian_at(&x, &ev.rhs)?;
        let rhs = nalgebra::DVector::from_vec(ev.f.iter().map(|v| -v).collect());
        let dx = match j.lu().solve(&rhs) {
            Some(d) => d,
            None => break,
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: Vec<Complex64> = x.iter().zip(dx.iter()).map(|(a, d)| a + d * lambda).collect();
            let mut probe = pack.clone();
            if let Ok(tev) = probe.eval(&trial) {
                if norm(&tev.f) < r0 {
                    x = trial;
                    pack = probe;
                    ev = tev;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    for i in 0..n {
        seed.shifts[i] += x[i];
    }
    seed.normalizers = seed.shifts.iter().map(|a| a.exp()).collect();
    seed.branch_states = pack.states().to_vec();
    seed::refresh_branch_states(k, &mut seed)?;
    Ok(seed)
}

fn sign_patterns(s: &MasserSystem, base: &[i64], vary: bool) -> Result<Vec<Vec<i64>>> {
    if !vary {
        return Ok(vec![base.to_vec()]);
    }
    let n = base.len().min(12);
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let q: Vec<i64> = base
            .iter()
            .enumerate()
            .map(|(i, &v)| if i < n && mask & (1 << i) != 0 { -v } else { v })
            .collect();
        if mask == 0 || seed_is_valid(s, &q)? {
            out.push(q);
        }
    }
    Ok(out)
}

fn distinct(a: &[Complex64], b: &[Complex64]) -> bool {
    let d = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = 1.0 + a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    d >= 1e-6 * scale
}

/// Collects at least `count` distinct certified roots by walking the `t`
/// schedule and the sign patterns of the base seed vector. Seeds at one
/// `t` are solved concurrently; output order is by `(t, pattern)`.
pub fn enumerate_roots(s: &MasserSystem, count: usize, opts: &SolveOptions) -> Result<Enumeration> {
    let mut out = Enumeration {
        roots: Vec::new(),
        failures: Vec::new(),
        requested: count,
    };
    if count == 0 {
        return Ok(out);
    }
    let k = Arc::new(Compiled::new(s)?);
    let base = find_seed_vector(s, opts.search_radius)?;
    let patterns = sign_patterns(s, &base, opts.vary_signs)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
    for &t in &opts.schedule {
        let results: Vec<(Vec<i64>, Result<RootRecord>)> = pool.install(|| {
            patterns
                .par_iter()
                .map(|q| (q.clone(), solve_with_kernel(&k, q, t, opts.tol)))
                .collect()
        });
        for (q, r) in results {
            match r {
                Ok(rec) => {
                    if out.roots.iter().all(|o| distinct(&o.x, &rec.x)) {
                        out.roots.push(rec);
                    }
                }
                Err(e) => out.failures.push(SeedFailure {
                    q,
                    t,
                    reason: e.to_string(),
                }),
            }
        }
        if out.roots.len() >= count {
            out.roots.truncate(count);
            break;
        }
    }
    Ok(out)
}
