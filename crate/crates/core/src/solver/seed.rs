use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Zero;

use super::kernel::Compiled;
use crate::error::{Error, Result};
use crate::poly::{Coefficient, GaussRat, MultiPoly, Poly};
use crate::system::{MasserSystem, Rhs};

/// Scale at which branch right-hand sides are probed for seed validity.
const BRANCH_PROBE_T: f64 = 256.0;

/// A lattice point `ω̄ = 2πi·t·q̄` with the shift `ā` and normalizers
/// `A_i = e^{a_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedRay {
    pub q: Vec<i64>,
    pub t: u64,
    pub omega: Vec<Complex64>,
    pub shifts: Vec<Complex64>,
    pub normalizers: Vec<Complex64>,
    /// `T = 1 + Σ |t·q_l|`.
    pub big_t: f64,
    /// Branch values at the center, used to continue each branch.
    pub branch_states: Vec<Option<Complex64>>,
}

impl SeedRay {
    /// `C` in `max |a_i| ≤ C·log T`.
    pub fn log_constant(&self) -> f64 {
        let m = self.shifts.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if self.big_t > 1.0 {
            m / self.big_t.ln()
        } else {
            f64::INFINITY
        }
    }

    pub fn center(&self) -> Vec<Complex64> {
        self.omega.iter().zip(&self.shifts).map(|(w, a)| w + a).collect()
    }
}

pub(crate) fn omega(q: &[i64], t: u64) -> Vec<Complex64> {
    q.iter()
        .map(|&qi| Complex64::new(0.0, 2.0 * PI * t as f64 * qi as f64))
        .collect()
}

/// Standard seed: `A_i = f_i(ω̄)` (dominant branch), `a_i = Log A_i`.
pub(crate) fn standard_seed(k: &Compiled, q: &[i64], t: u64) -> Result<SeedRay> {
    let n = k.n();
    if q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: q.len(),
        });
    }
    let om = omega(q, t);
    let mut normalizers = Vec::with_capacity(n);
    let mut shifts = Vec::with_capacity(n);
    let mut states = Vec::with_capacity(n);
    for i in 0..n {
        let v = k.value(i, &om, None)?.value;
        if v.is_zero() || !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::InvalidSeed {
                q: q.to_vec(),
                t,
                index: i,
            });
        }
        normalizers.push(v);
        shifts.push(v.ln());
        states.push(k.is_branch(i).then_some(v));
    }
    let big_t = 1.0 + q.iter().map(|&x| (x.unsigned_abs() * t) as f64).sum::<f64>();
    let mut seed = SeedRay {
        q: q.to_vec(),
        t,
        omega: om,
        shifts,
        normalizers,
        big_t,
        branch_states: states,
    };
    refresh_branch_states(k, &mut seed)?;
    Ok(seed)
}

/// Seed at the origin of the lattice with initial shift `i·q̄`; only used to
/// reach roots of small modulus.
pub(crate) fn origin_seed(k: &Compiled, q: &[i64]) -> Result<SeedRay> {
    let n = k.n();
    let shifts: Vec<Complex64> = q.iter().map(|&v| Complex64::new(0.0, v as f64)).collect();
    let mut seed = SeedRay {
        q: q.to_vec(),
        t: 0,
        omega: vec![Complex64::zero(); n],
        normalizers: shifts.iter().map(|a| a.exp()).collect(),
        shifts,
        big_t: 1.0,
        branch_states: vec![None; n],
    };
    refresh_branch_states(k, &mut seed)?;
    Ok(seed)
}

/// Re-selects branch values at the current center, continuing from the
/// stored states.
pub(crate) fn refresh_branch_states(k: &Compiled, seed: &mut SeedRay) -> Result<()> {
    let c = seed.center();
    for i in 0..k.n() {
        if k.is_branch(i) {
            let v = k.value(i, &c, seed.branch_states[i])?;
            seed.branch_states[i] = Some(v.value);
        }
    }
    Ok(())
}

/// Every vector in `{−R,…,R}^n` with no zero entry, in the search order:
/// by `Σ|q_i|`, then coordinate-wise by `(|q_i|, positive first)`.
pub fn seed_candidates(n: usize, radius: i64) -> Vec<Vec<i64>> {
    let values: Vec<i64> = (1..=radius).flat_map(|v| [v, -v]).collect();
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let key = |q: &Vec<i64>| {
        (
            q.iter().map(|v| v.abs()).sum::<i64>(),
            q.iter().map(|&v| (v.abs(), v < 0)).collect::<Vec<_>>(),
        )
    };
    out.sort_by_key(key);
    out
}

/// `Q_d(q̄) ≠ 0` for polynomial right-hand sides (exactly when possible;
/// by homogeneity this is `Q_d(2πi·q̄) ≠ 0`), nonvanishing leading parts of
/// numerator and denominator for rational ones, and a nonzero dominant
/// branch value at `t = 2^8` for algebraic ones.
pub fn seed_is_valid(s: &MasserSystem, q: &[i64]) -> Result<bool> {
    for r in s.rhs() {
        let ok = match r {
            Rhs::Poly(p) => leading_nonzero(p, q)?,
            Rhs::Rational { num, den } => leading_nonzero(num, q)? && leading_nonzero(den, q)?,
            Rhs::Branch(b) => {
                let z: Vec<Complex64> = omega(q, 1).iter().map(|w| w * BRANCH_PROBE_T).collect();
                match b.kernel().select(&z, None) {
                    Ok(v) => v.u.norm() > 1e-8 && v.u.re.is_finite() && v.u.im.is_finite(),
                    Err(Error::BranchUndefined) => false,
                    Err(e) => return Err(e),
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

fn leading_nonzero(p: &Poly, q: &[i64]) -> Result<bool> {
    fn float_check<C: Coefficient>(p: &MultiPoly<C>, q: &[i64]) -> Result<bool> {
        let lead = p.leading_part()?.to_float();
        let z: Vec<Complex64> = q.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect();
        let radii: Vec<f64> = q.iter().map(|&v| v.abs() as f64).collect();
        let v = lead.evaluate(&z)?;
        Ok(v.norm() > 1e-12 * lead.evaluate_abs(&radii))
    }
    match p {
        Poly::Exact(e) => {
            let lead = e.leading_part()?;
            let z: Vec<GaussRat> = q.iter().map(|&v| GaussRat::from_i64(v)).collect();
            Ok(!lead.evaluate_in_field(&z)?.is_zero())
        }
        Poly::Float(f) => float_check(f, q),
    }
}

/// First valid seed vector in the search order within radius `R`.
pub fn find_seed_vector(s: &MasserSystem, radius: i64) -> Result<Vec<i64>> {
    for q in seed_candidates(s.n(), radius) {
        if seed_is_valid(s, &q)? {
            return Ok(q);
        }
    }
    Err(Error::NoSeed { radius })
}
