//! Iterated exponential polynomials `f(z) = p(z, e_1(z), …, e_k(z))` with
//! `e_0(z) = z` and `e_{j+1}(z) = e^{e_j(z)}`.

mod logmag;

pub use logmag::{reduce_arg, LogMagComplex, ARG_REDUCTION_LIMIT, OVERFLOW_LOG};

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{Coefficient, FloatPoly, MultiPoly, Poly};

/// `p(x, y_1, …, y_k)` tagged with its iteration depth `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTower {
    k: usize,
    p: Poly,
    pf: FloatPoly,
    dpf: Vec<FloatPoly>,
}

/// Witness of the degenerate form `p = g(x)·y_1^{n_1}⋯y_k^{n_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Degeneracy {
    /// `g` as a polynomial in one variable.
    pub g: Poly,
    pub exps: Vec<u32>,
}

/// Result of evaluating a tower at one point.
#[derive(Clone, Debug)]
pub struct TowerEval {
    /// `f(z)`, absent when a needed tower value is too large for a float.
    pub value: Option<Complex64>,
    /// `e_0(z), …, e_k(z)` in log-magnitude form.
    pub trace: Vec<LogMagComplex>,
    /// Some `e^w` was taken with `|Im w|` too large to reduce modulo `2π`.
    pub low_precision: bool,
}

impl ExpTower {
    pub fn new(k: usize, p: Poly) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput("tower depth k must be at least 1".into()));
        }
        if p.nvars() != k + 1 {
            return Err(Error::DimensionMismatch {
                expected: k + 1,
                got: p.nvars(),
            });
        }
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !p.depends_on(k) {
            return Err(Error::InvalidInput(format!(
                "p must depend on the last tower variable y_{k}"
            )));
        }
        let pf = p.to_float();
        pf.check_finite()?;
        let dpf = (0..=k).map(|v| pf.partial_derivative(v)).collect::<Result<Vec<_>>>()?;
        Ok(ExpTower { k, p, pf, dpf })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn poly(&self) -> &Poly {
        &self.p
    }

    pub fn float_poly(&self) -> &FloatPoly {
        &self.pf
    }

    /// Degenerate exactly when every term carries the same exponent vector
    /// on `(y_1, …, y_k)`; the shared monomial then factors out.
    pub fn is_degenerate(&self) -> Option<Degeneracy> {
        match &self.p {
            Poly::Exact(p) => degeneracy(p, self.k).map(|(g, exps)| Degeneracy { g: Poly::Exact(g), exps }),
            Poly::Float(p) => degeneracy(p, self.k).map(|(g, exps)| Degeneracy { g: Poly::Float(g), exps }),
        }
    }

    /// Computes `e_1(z), …, e_k(z)` in log-magnitude form and, when all tower
    /// values used by `p` stay below the overflow threshold, `f(z)`.
    pub fn eval(&self, z: Complex64) -> TowerEval {
        let (trace, low_precision) = tower_trace(z, self.k);
        let needed: Vec<bool> = (0..=self.k).map(|v| self.pf.depends_on(v)).collect();
        let mut point = Vec::with_capacity(self.k + 1);
        let mut ok = true;
        for (v, lm) in trace.iter().enumerate() {
            match lm.to_complex() {
                Some(c) => point.push(c),
                None => {
                    if needed[v] {
                        ok = false;
                    }
                    point.push(Complex64::zero());
                }
            }
        }
        point[0] = z;
        let value = if ok {
            self.pf.evaluate(&point).ok().filter(|v| v.re.is_finite() && v.im.is_finite())
        } else {
            None
        };
        TowerEval {
            value,
            trace,
            low_precision,
        }
    }

    /// `f(z)` and `f'(z)`, when every tower value is float-representable.
    pub fn eval_with_derivative(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let mut vals = Vec::with_capacity(self.k + 1);
        let mut ders = Vec::with_capacity(self.k + 1);
        vals.push(z);
        ders.push(Complex64::new(1.0, 0.0));
        for j in 1..=self.k {
            let prev = vals[j - 1];
            if prev.re >= OVERFLOW_LOG {
                return None;
            }
            let e = prev.exp();
            vals.push(e);
            ders.push(e * ders[j - 1]);
        }
        let f = self.pf.evaluate(&vals).ok()?;
        let mut df = Complex64::zero();
        for (dp, d) in self.dpf.iter().zip(&ders) {
            if !dp.is_zero() {
                df += dp.evaluate(&vals).ok()? * d;
            }
        }
        if f.re.is_finite() && f.im.is_finite() && df.re.is_finite() && df.im.is_finite() {
            Some((f, df))
        } else {
            None
        }
    }

    /// Consistency of a solution vector with the tower.
    ///
    /// `xs` is either the reduced chain `(x_0, …, x_{k-1})` or the full chain
    /// `(x_0, …, x_k)`. Returns `max_j |x_{j+1} - e^{x_j}|` together with
    /// `|p(…)|` as a single maximum; saturates instead of overflowing.
    pub fn residual(&self, xs: &[Complex64]) -> Result<f64> {
        let k = self.k;
        if xs.len() != k && xs.len() != k + 1 {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: xs.len(),
            });
        }
        let mut worst = chain_residual(xs);
        let mut point = xs.to_vec();
        if xs.len() == k {
            let (last, _) = LogMagComplex::exp_of(xs[k - 1]);
            match last.to_complex() {
                Some(c) => point.push(c),
                None => return Ok(f64::MAX),
            }
        }
        let pv = self.pf.evaluate(&point)?;
        let pv = pv.norm();
        worst = worst.max(if pv.is_finite() { pv } else { f64::MAX });
        Ok(worst)
    }
}

/// `max_j |x_{j+1} - e^{x_j}|`, compared in log-magnitude form.
pub fn chain_residual(xs: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for pair in xs.windows(2) {
        let (e, _) = LogMagComplex::exp_of(pair[0]);
        let r = match e.to_complex() {
            Some(c) => (pair[1] - c).norm(),
            None => LogMagComplex::from_complex(pair[1]).sub(&e).modulus_saturating(),
        };
        worst = worst.max(r);
    }
    worst
}

fn tower_trace(z: Complex64, k: usize) -> (Vec<LogMagComplex>, bool) {
    let mut trace = Vec::with_capacity(k + 1);
    let mut flagged = false;
    let first = LogMagComplex::from_complex(z);
    trace.push(first);
    let mut prev_float = Some(z);
    let mut prev_lm = first;
    for _ in 0..k {
        let (next, f) = match prev_float {
            Some(c) => LogMagComplex::exp_of(c),
            None => prev_lm.exp(),
        };
        flagged |= f;
        trace.push(next);
        prev_float = next.to_complex();
        prev_lm = next;
    }
    (trace, flagged)
}

fn degeneracy<C: Coefficient>(p: &MultiPoly<C>, k: usize) -> Option<(MultiPoly<C>, Vec<u32>)> {
    let mut groups: BTreeMap<Vec<u32>, Vec<(u32, C)>> = BTreeMap::new();
    for (m, c) in p.terms() {
        groups
            .entry(m.exps()[1..=k].to_vec())
            .or_default()
            .push((m.exps()[0], c.clone()));
    }
    if groups.len() != 1 {
        return None;
    }
    let (exps, terms) = groups.into_iter().next()?;
    let g = MultiPoly::from_terms(1, terms.into_iter().map(|(e, c)| (vec![e], c))).ok()?;
    Some((g, exps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ExactPoly;
    use std::f64::consts::PI;

    fn tower(k: usize, terms: &[(&[u32], i64)]) -> ExpTower {
        ExpTower::new(k, Poly::Exact(ExactPoly::from_int_terms(k + 1, terms))).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ExpTower::new(0, Poly::Exact(ExactPoly::one(1))).is_err());
        // p = x + y_1 with k = 2 does not involve y_2
        let p = ExactPoly::from_int_terms(3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1)]);
        assert!(ExpTower::new(2, Poly::Exact(p)).is_err());
        assert!(ExpTower::new(1, Poly::Exact(ExactPoly::zero(2))).is_err());
        assert!(ExpTower::new(2, Poly::Exact(ExactPoly::var(2, 1))).is_err());
    }

    #[test]
    fn degenerate_form_detected() {
        // (x^2 - 1) y1^3 y2
        let t = tower(2, &[(&[2, 3, 1], 1), (&[0, 3, 1], -1)]);
        let d = t.is_degenerate().unwrap();
        assert_eq!(d.exps, vec![3, 1]);
        assert_eq!(d.g, Poly::Exact(ExactPoly::from_int_terms(1, &[(&[2], 1), (&[0], -1)])));
        assert!(tower(1, &[(&[1, 0], 1), (&[0, 1], 1)]).is_degenerate().is_none());
    }

    #[test]
    fn simple_evaluations() {
        let t = tower(1, &[(&[0, 1], 1), (&[1, 0], -1)]);
        let v = t.eval(Complex64::new(0.0, 0.0)).value.unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let t2 = tower(2, &[(&[0, 0, 1], 1)]);
        let v = t2.eval(Complex64::new(0.0, PI)).value.unwrap();
        assert!((v - Complex64::new((-1.0f64).exp(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn overflow_reported_not_raised() {
        let t2 = tower(2, &[(&[0, 0, 1], 1), (&[1, 0, 0], -1)]);
        let ev = t2.eval(Complex64::new(8.0, 0.0));
        assert!(ev.value.is_none());
        assert_eq!(ev.trace.len(), 3);
        assert!((ev.trace[2].log_abs - 8f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn chain_residuals() {
        let e = std::f64::consts::E;
        let xs = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(e, 0.0)];
        assert!(chain_residual(&xs) < 1e-15);
        let mut bumped = xs;
        bumped[1] += Complex64::new(1e-6, 0.0);
        // x_1 moved by 1e-6; e^{x_1} moves by ~e·1e-6 relative to x_2
        let r = chain_residual(&bumped);
        assert!((r - e * 1e-6).abs() < 1e-9 || (r - 1e-6).abs() < 1e-9, "r = {r}");

        let t = tower(2, &[(&[0, 0, 1], 1), (&[1, 0, 0], -1)]);
        // full chain: p(0, 1, e) = e
        assert!((t.residual(&xs).unwrap() - e).abs() < 1e-12);
        assert!(t.residual(&xs[..1]).is_err());
    }

    #[test]
    fn overflowing_chain_residual_is_finite() {
        let xs = [Complex64::new(800.0, 0.0), Complex64::new(1.0, 0.0)];
        let r = chain_residual(&xs);
        assert!(r.is_finite());
        assert!(r > 1e300);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let t = tower(2, &[(&[0, 0, 1], 1), (&[1, 1, 0], -2), (&[2, 0, 0], 1)]);
        let z = Complex64::new(0.3, 0.7);
        let (_, df) = t.eval_with_derivative(z).unwrap();
        let h = 1e-6;
        let fp = t.eval(z + h).value.unwrap();
        let fm = t.eval(z - h).value.unwrap();
        let fd = (fp - fm) / (2.0 * h);
        assert!((df - fd).norm() < 1e-6 * (1.0 + df.norm()));
    }
}
