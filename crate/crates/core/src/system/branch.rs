use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::poly::{univariate, FloatPoly, Poly};

/// Roots closer than this (relative) are reported as an ambiguous branch.
const AMBIGUITY_GAP: f64 = 1e-9;

/// Algebraic right-hand side: the root `u` of `defining(x̄, u) = 0` selected
/// by continuation from the last known value.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRhs {
    defining: Poly,
    kernel: BranchKernel,
    /// Last selected branch value; `None` before the first evaluation.
    pub state: Option<Complex64>,
}

/// A branch value together with the ambiguity warning.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchValue {
    pub u: Complex64,
    /// Another root lies within `1e-9·(1 + |u|)` of the chosen one.
    pub ambiguous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct BranchKernel {
    n: usize,
    d: FloatPoly,
    /// Coefficients of `u^j`, still in `n + 1` variables with `u` absent.
    u_coeffs: Vec<FloatPoly>,
    grad: Vec<FloatPoly>,
    hess: Vec<FloatPoly>,
}

impl BranchRhs {
    /// `defining` lives in `n + 1` variables, the last one being `u`.
    pub fn new(defining: Poly) -> Result<Self> {
        let nv = defining.nvars();
        if nv == 0 {
            return Err(Error::InvalidInput("branch polynomial needs a u variable".into()));
        }
        let u = nv - 1;
        if defining.is_zero() || defining.degree_in(u)? == 0 {
            return Err(Error::InvalidInput(
                "branch polynomial must have positive degree in u".into(),
            ));
        }
        let d = defining.to_float();
        d.check_finite()?;
        // c·u has only the root u = 0 and is rejected.
        let supports = defining.supports();
        let mut only_u = vec![0u32; nv];
        only_u[u] = 1;
        if supports.len() == 1 && supports[0] == only_u {
            return Err(Error::InvalidInput(
                "branch polynomial must not be a constant multiple of u".into(),
            ));
        }
        let kernel = BranchKernel::new(d)?;
        Ok(BranchRhs {
            defining,
            kernel,
            state: None,
        })
    }

    pub fn defining(&self) -> &Poly {
        &self.defining
    }

    /// Number of `x̄` variables.
    pub fn arity(&self) -> usize {
        self.kernel.n
    }

    pub fn u_degree(&self) -> u32 {
        (self.kernel.u_coeffs.len() - 1) as u32
    }

    pub(crate) fn kernel(&self) -> &BranchKernel {
        &self.kernel
    }

    /// Selects a root of `u ↦ defining(x̄, u)` and records it as the new
    /// state.
    pub fn eval(&mut self, x: &[Complex64]) -> Result<BranchValue> {
        let v = self.kernel.select(x, self.state)?;
        self.state = Some(v.u);
        Ok(v)
    }

    /// Log-log slope of `|u(t·v̄)|` over `t = 2^6, …, 2^10`, rounded to the
    /// nearest fraction with denominator at most `deg_u`.
    pub fn estimate_degree(&self, v: &[Complex64]) -> Result<BigRational> {
        let mut pts = Vec::new();
        for e in 6..=10 {
            let t = f64::from(1u32 << e);
            let x: Vec<Complex64> = v.iter().map(|c| c * t).collect();
            let u = self.kernel.select(&x, None)?.u;
            if u.norm() == 0.0 {
                return Err(Error::InvalidInput("branch vanishes along the ray".into()));
            }
            pts.push((t.ln(), u.norm().ln()));
        }
        let m = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        Ok(round_to_fraction(slope, self.u_degree().max(1)))
    }
}

pub(crate) fn round_to_fraction(x: f64, max_den: u32) -> BigRational {
    let mut best = (f64::INFINITY, 0i64, 1i64);
    for den in 1..=i64::from(max_den) {
        let num = (x * den as f64).round() as i64;
        let err = (x - num as f64 / den as f64).abs();
        if err < best.0 - 1e-12 {
            best = (err, num, den);
        }
    }
    BigRational::new(best.1.into(), best.2.into())
}

impl BranchKernel {
    fn new(d: FloatPoly) -> Result<Self> {
        let nv = d.nvars();
        let n = nv - 1;
        let by_deg = d.coefficients_in(n)?;
        let top = *by_deg.keys().next_back().expect("nonzero polynomial");
        let mut u_coeffs = vec![FloatPoly::zero(nv); top as usize + 1];
        for (e, c) in by_deg {
            u_coeffs[e as usize] = c;
        }
        let grad = (0..nv).map(|v| d.partial_derivative(v)).collect::<Result<Vec<_>>>()?;
        let mut hess = Vec::with_capacity(nv * nv);
        for g in &grad {
            for v in 0..nv {
                hess.push(g.partial_derivative(v)?);
            }
        }
        Ok(BranchKernel {
            n,
            d,
            u_coeffs,
            grad,
            hess,
        })
    }

    fn point(&self, x: &[Complex64], u: Complex64) -> Vec<Complex64> {
        let mut p = x.to_vec();
        p.push(u);
        p
    }

    pub(crate) fn select(&self, x: &[Complex64], state: Option<Complex64>) -> Result<BranchValue> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let at = self.point(x, Complex64::zero());
        let coeffs = self
            .u_coeffs
            .iter()
            .map(|c| c.evaluate(&at))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.iter().all(|c| c.is_zero()) {
            return Err(Error::BranchUndefined);
        }
        let roots = univariate::roots(&coeffs);
        if roots.is_empty() {
            return Err(Error::BranchUndefined);
        }
        let idx = match state {
            Some(s) => nearest(&roots, s),
            None => dominant(&roots),
        };
        let u = roots[idx];
        let gap = AMBIGUITY_GAP * (1.0 + u.norm());
        let ambiguous = roots
            .iter()
            .enumerate()
            .any(|(j, r)| j != idx && (r - u).norm() < gap);
        Ok(BranchValue { u, ambiguous })
    }

    /// `∂u/∂x_h` by implicit differentiation.
    pub(crate) fn gradient(&self, x: &[Complex64], u: Complex64) -> Result<Vec<Complex64>> {
        let p = self.point(x, u);
        let du = self.grad[self.n].evaluate(&p)?;
        if du.norm() == 0.0 {
            return Err(Error::BranchUndefined);
        }
        (0..self.n)
            .map(|h| Ok(-self.grad[h].evaluate(&p)? / du))
            .collect()
    }

    /// `∂²u/∂x_h∂x_l` (row-major `n × n`) by implicit differentiation.
    pub(crate) fn hessian(&self, x: &[Complex64], u: Complex64) -> Result<Vec<Complex64>> {
        let n = self.n;
        let nv = n + 1;
        let p = self.point(x, u);
        let du = self.grad[n].evaluate(&p)?;
        if du.norm() == 0.0 {
            return Err(Error::BranchUndefined);
        }
        let g = self.gradient(x, u)?;
        let h2 = |a: usize, b: usize| self.hess[a * nv + b].evaluate(&p);
        let duu = h2(n, n)?;
        let mut out = vec![Complex64::zero(); n * n];
        for h in 0..n {
            for l in h..n {
                let v = -(h2(h, l)? + h2(h, n)? * g[l] + h2(l, n)? * g[h] + duu * g[h] * g[l]) / du;
                out[h * n + l] = v;
                out[l * n + h] = v;
            }
        }
        Ok(out)
    }
}

fn nearest(roots: &[Complex64], s: Complex64) -> usize {
    let mut best = 0;
    for (j, r) in roots.iter().enumerate() {
        if (r - s).norm() < (roots[best] - s).norm() {
            best = j;
        }
    }
    best
}

/// Largest modulus; near-ties prefer `arg ∈ (−π/2, π/2]`, then larger real
/// part, then larger imaginary part.
fn dominant(roots: &[Complex64]) -> usize {
    let right = |z: &Complex64| {
        let a = z.arg();
        a > -FRAC_PI_2 && a <= FRAC_PI_2
    };
    let mut best = 0;
    for j in 1..roots.len() {
        let (a, b) = (roots[j], roots[best]);
        let (na, nb) = (a.norm(), b.norm());
        let tol = 1e-9 * na.max(nb).max(f64::MIN_POSITIVE);
        let better = if (na - nb).abs() > tol {
            na > nb
        } else if right(&a) != right(&b) {
            right(&a)
        } else if (a.re - b.re).abs() > tol {
            a.re > b.re
        } else {
            a.im > b.im
        };
        if better {
            best = j;
        }
    }
    best
}
