//! JSON encodings of polynomials, towers, systems and results.
//!
//! Floats are written with 17 significant digits in scientific notation so
//! output is byte-stable and re-parses to the same `f64`. Exact rationals
//! are strings `"num/den"`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Number, Value};

use crate::error::{Error, Result};
use crate::generic::{BadRelation, RelationDiagnostic, RelationKind, RelationVerdict};
use crate::poly::{format_rational, parse_rational, ExactPoly, FloatPoly, GaussRat, Poly};
use crate::solver::{KantorovichCertificate, RootRecord};
use crate::system::{BranchRhs, LinearForm, MasserSystem, Provenance, Recovery, Rhs};
use crate::tower::ExpTower;
use crate::verify::{Rect, ResidualCheck, ZeroCount};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// A float as a JSON number with 17 significant digits; non-finite values
/// become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Value::Number(text.parse::<Number>().expect("formatted float is valid JSON"))
}

pub fn complex(z: Complex64) -> Value {
    Value::Array(vec![float(z.re), float(z.im)])
}

fn complexes(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|z| complex(*z)).collect())
}

fn floats(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| float(*x)).collect())
}

fn rational(r: &BigRational) -> Value {
    Value::String(format_rational(r))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field \"{key}\"")))
}

fn as_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| perr(format!("{what} must be a nonnegative integer")))
}

fn as_f64(v: &Value, what: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| perr(format!("{what} must be a number")))
}

fn parse_rat_value(v: &Value, what: &str) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| perr(format!("{what}: bad rational \"{s}\""))),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().expect("checked").into())),
        _ => Err(perr(format!("{what} must be a \"num/den\" string"))),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    let (mode, terms): (&str, Vec<Value>) = match p {
        Poly::Exact(p) => (
            "exact",
            p.terms()
                .map(|(m, c)| json!({"exps": m.exps(), "re": rational(&c.re), "im": rational(&c.im)}))
                .collect(),
        ),
        Poly::Float(p) => (
            "float",
            p.terms()
                .map(|(m, c)| json!({"exps": m.exps(), "re": float(c.re), "im": float(c.im)}))
                .collect(),
        ),
    };
    json!({"nvars": p.nvars(), "mode": mode, "terms": terms})
}

pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let nvars = as_usize(get(v, "nvars")?, "nvars")?;
    let mode = get(v, "mode")?
        .as_str()
        .ok_or_else(|| perr("mode must be \"exact\" or \"float\""))?;
    let terms = get(v, "terms")?.as_array().ok_or_else(|| perr("terms must be an array"))?;
    let mut exps_list = Vec::with_capacity(terms.len());
    for t in terms {
        let exps = get(t, "exps")?
            .as_array()
            .ok_or_else(|| perr("exps must be an array"))?
            .iter()
            .map(|e| {
                e.as_u64()
                    .and_then(|x| u32::try_from(x).ok())
                    .ok_or_else(|| perr("exponents must be nonnegative integers"))
            })
            .collect::<Result<Vec<u32>>>()?;
        if exps.len() != nvars {
            return Err(perr(format!("term has {} exponents, expected {nvars}", exps.len())));
        }
        exps_list.push(exps);
    }
    let im_of = |t: &Value| t.get("im").cloned().unwrap_or(Value::Null);
    match mode {
        "exact" => {
            let mut out = Vec::with_capacity(terms.len());
            for (t, e) in terms.iter().zip(exps_list) {
                let re = parse_rat_value(get(t, "re")?, "re")?;
                let im = match im_of(t) {
                    Value::Null => BigRational::from_integer(0.into()),
                    other => parse_rat_value(&other, "im")?,
                };
                out.push((e, GaussRat::new(re, im)));
            }
            Ok(Poly::Exact(ExactPoly::from_terms(nvars, out)?))
        }
        "float" => {
            let mut out = Vec::with_capacity(terms.len());
            for (t, e) in terms.iter().zip(exps_list) {
                let re = as_f64(get(t, "re")?, "re")?;
                let im = match im_of(t) {
                    Value::Null => 0.0,
                    other => as_f64(&other, "im")?,
                };
                out.push((e, Complex64::new(re, im)));
            }
            let p = FloatPoly::from_terms(nvars, out)?;
            p.check_finite()?;
            Ok(Poly::Float(p))
        }
        other => Err(perr(format!("unknown mode \"{other}\""))),
    }
}

pub fn tower_to_json(t: &ExpTower) -> Value {
    json!({"k": t.k(), "p": poly_to_json(t.poly())})
}

pub fn tower_from_json(v: &Value) -> Result<ExpTower> {
    let k = as_usize(get(v, "k")?, "k")?;
    let p = poly_from_json(get(v, "p")?)?;
    ExpTower::new(k, p)
}

pub fn form_to_json(f: &LinearForm) -> Value {
    Value::Array(f.coeffs.iter().map(rational).collect())
}

fn form_from_json(v: &Value) -> Result<LinearForm> {
    let arr = v.as_array().ok_or_else(|| perr("linear form must be an array"))?;
    Ok(LinearForm::new(
        arr.iter().map(|c| parse_rat_value(c, "form coefficient")).collect::<Result<_>>()?,
    ))
}

pub fn system_to_json(s: &MasserSystem) -> Value {
    let rhs: Vec<Value> = s
        .rhs()
        .iter()
        .map(|r| match r {
            Rhs::Poly(p) => json!({"kind": "poly", "P": poly_to_json(p)}),
            Rhs::Rational { num, den } => {
                json!({"kind": "rational", "num": poly_to_json(num), "den": poly_to_json(den)})
            }
            Rhs::Branch(b) => json!({"kind": "branch", "defining": poly_to_json(b.defining())}),
        })
        .collect();
    let p = &s.provenance;
    let provenance = json!({
        "tower": p.tower.as_ref().map(tower_to_json),
        "notes": p.notes,
        "excluded": p.excluded.iter().map(form_to_json).collect::<Vec<_>>(),
        "recovery": p.recovery.as_ref().map(|Recovery::Difference { n }| json!({"difference": n})),
    });
    json!({"n": s.n(), "rhs": rhs, "provenance": provenance})
}

pub fn system_from_json(v: &Value) -> Result<MasserSystem> {
    let n = as_usize(get(v, "n")?, "n")?;
    let rhs_v = get(v, "rhs")?.as_array().ok_or_else(|| perr("rhs must be an array"))?;
    if rhs_v.len() != n {
        return Err(perr(format!("rhs has {} entries, expected {n}", rhs_v.len())));
    }
    let mut rhs = Vec::with_capacity(n);
    for r in rhs_v {
        let kind = get(r, "kind")?.as_str().ok_or_else(|| perr("kind must be a string"))?;
        rhs.push(match kind {
            "poly" => Rhs::Poly(poly_from_json(get(r, "P")?)?),
            "rational" => Rhs::Rational {
                num: poly_from_json(get(r, "num")?)?,
                den: poly_from_json(get(r, "den")?)?,
            },
            "branch" => Rhs::Branch(BranchRhs::new(poly_from_json(get(r, "defining")?)?)?),
            other => return Err(perr(format!("unknown rhs kind \"{other}\""))),
        });
    }
    let mut provenance = Provenance::default();
    if let Some(p) = v.get("provenance").filter(|p| !p.is_null()) {
        if let Some(t) = p.get("tower").filter(|t| !t.is_null()) {
            provenance.tower = Some(tower_from_json(t)?);
        }
        if let Some(notes) = p.get("notes").and_then(|x| x.as_array()) {
            provenance.notes = notes.iter().filter_map(|s| s.as_str().map(str::to_string)).collect();
        }
        if let Some(ex) = p.get("excluded").and_then(|x| x.as_array()) {
            provenance.excluded = ex.iter().map(form_from_json).collect::<Result<_>>()?;
        }
        if let Some(r) = p.get("recovery").filter(|r| !r.is_null()) {
            let n = as_usize(get(r, "difference")?, "recovery.difference")?;
            provenance.recovery = Some(Recovery::Difference { n });
        }
    }
    MasserSystem::with_provenance(rhs, provenance)
}

pub fn certificate_to_json(c: &KantorovichCertificate) -> Value {
    json!({
        "eta": float(c.eta),
        "M": float(c.hess_bound),
        "invJacNorm": float(c.inv_jac_norm),
        "condition": float(c.condition),
        "ballRadius": float(c.ball_radius),
        "jacobianDefect": float(c.jacobian_defect),
        "certified": c.is_certified(),
    })
}

pub fn diagnostic_to_json(d: &RelationDiagnostic) -> Value {
    let mut m = Map::new();
    m.insert("vector".into(), complexes(&d.vector));
    m.insert("heightBound".into(), json!(d.height_bound));
    m.insert("digits".into(), json!(d.digits));
    match &d.verdict {
        RelationVerdict::NoneFound => {
            m.insert("verdict".into(), json!("none-found"));
        }
        RelationVerdict::Candidate { m: rel, residual } => {
            m.insert("verdict".into(), json!("candidate"));
            m.insert("m".into(), json!(rel));
            m.insert("residual".into(), float(*residual));
        }
    }
    m.insert("multiplicative".into(), json!(d.multiplicative));
    m.insert("partial".into(), json!(d.partial));
    m.insert(
        "note".into(),
        json!("heuristic: no relation found at this height and precision is evidence, not proof"),
    );
    Value::Object(m)
}

pub fn recheck_to_json(r: &ResidualCheck) -> Value {
    json!({
        "digits": r.digits,
        "residual": float(r.residual),
        "storedResiduals": floats(&r.stored_residuals),
        "polishedResidual": float(r.polished_residual),
        "drift": float(r.drift),
        "polishAccepted": r.polish_accepted,
        "precisionLimited": r.precision_limited,
    })
}

/// One line of solver output.
pub fn root_to_json(root: &RootRecord, recheck: Option<&ResidualCheck>) -> Value {
    json!({
        "x": complexes(&root.x),
        "residual": float(root.max_residual()),
        "residuals": floats(&root.residuals),
        "certificate": certificate_to_json(&root.certificate),
        "seed": {"q": root.seed.q, "t": root.seed.t},
        "refined": root.refined,
        "newtonSteps": root.newton_steps.len(),
        "towerResidual": root.tower_residual.map(float),
        "recheck": recheck.map(recheck_to_json),
        "relations": root.relations.as_ref().map(diagnostic_to_json),
        "warnings": root.warnings,
    })
}

fn kind_name(k: RelationKind) -> &'static str {
    match k {
        RelationKind::TwoIter => "two-iter",
        RelationKind::TdOne => "td-one",
        RelationKind::ThreeIterTuple => "tower-tuple",
    }
}

pub fn bad_relation_to_json(b: &BadRelation) -> Value {
    json!({
        "kind": kind_name(b.kind),
        "coeffs": b.coeffs.iter().map(rational).collect::<Vec<_>>(),
        "exponents": b.exponents,
        "form": form_to_json(&b.form),
        "formText": b.form.to_string(),
        "identicallyZero": b.identically_zero,
        "heightBound": b.height_bound,
        "witnessDivisor": poly_to_json(&Poly::Exact(b.witness_divisor.clone())),
        "specialized": poly_to_json(&Poly::Exact(b.specialized.clone())),
    })
}

fn rect_to_json(r: &Rect) -> Value {
    Value::Array(vec![float(r.lo.re), float(r.lo.im), float(r.hi.re), float(r.hi.im)])
}

pub fn count_to_json(c: &ZeroCount) -> Value {
    json!({
        "count": c.count,
        "region": rect_to_json(&c.region),
        "nudged": c.nudged,
        "pieces": c
            .pieces
            .iter()
            .map(|(r, n)| json!({"rect": rect_to_json(r), "count": n}))
            .collect::<Vec<_>>(),
    })
}

/// Serializes without whitespace; keys come out sorted.
pub fn to_line(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

pub fn parse(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| perr(e.to_string()))
}
