//! Float evaluation of right-hand sides with first and second derivatives.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::FloatPoly;
use crate::system::{BranchKernel, MasserSystem, Rhs};

#[derive(Clone, Debug)]
enum Kernel {
    Poly {
        f: FloatPoly,
        grad: Vec<FloatPoly>,
        hess: Vec<FloatPoly>,
    },
    Branch(BranchKernel),
}

/// Value of `f_i` at a point, plus the branch root chosen when `f_i` is
/// algebraic.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RhsValue {
    pub value: Complex64,
    pub ambiguous: bool,
}

/// Derivative tables for every equation of a polynomial/branch system.
#[derive(Clone, Debug)]
pub(crate) struct Compiled {
    n: usize,
    eqs: Vec<Kernel>,
}

impl Compiled {
    pub fn new(s: &MasserSystem) -> Result<Self> {
        let n = s.n();
        let mut eqs = Vec::with_capacity(n);
        for r in s.rhs() {
            eqs.push(match r {
                Rhs::Poly(p) => {
                    let f = p.to_float();
                    let grad = (0..n).map(|v| f.partial_derivative(v)).collect::<Result<Vec<_>>>()?;
                    let mut hess = Vec::with_capacity(n * n);
                    for g in &grad {
                        for v in 0..n {
                            hess.push(g.partial_derivative(v)?);
                        }
                    }
                    Kernel::Poly { f, grad, hess }
                }
                Rhs::Branch(b) => Kernel::Branch(b.kernel().clone()),
                Rhs::Rational { .. } => {
                    return Err(Error::Unsupported(
                        "rational right-hand sides must be doubled before solving".into(),
                    ))
                }
            });
        }
        Ok(Compiled { n, eqs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_branch(&self, i: usize) -> bool {
        matches!(self.eqs[i], Kernel::Branch(_))
    }

    /// `f_i(z)`; branch equations continue from `state` or, without one,
    /// take the dominant root.
    pub fn value(&self, i: usize, z: &[Complex64], state: Option<Complex64>) -> Result<RhsValue> {
        match &self.eqs[i] {
            Kernel::Poly { f, .. } => Ok(RhsValue {
                value: f.evaluate(z)?,
                ambiguous: false,
            }),
            Kernel::Branch(b) => {
                let v = b.select(z, state)?;
                Ok(RhsValue {
                    value: v.u,
                    ambiguous: v.ambiguous,
                })
            }
        }
    }

    /// `∇f_i(z)`, where `value` is `f_i(z)` (needed for branches).
    pub fn gradient(&self, i: usize, z: &[Complex64], value: Complex64) -> Result<Vec<Complex64>> {
        match &self.eqs[i] {
            Kernel::Poly { grad, .. } => grad.iter().map(|g| g.evaluate(z)).collect(),
            Kernel::Branch(b) => b.gradient(z, value),
        }
    }

    /// Upper bound for `Σ_{h,l} |∂²f_i/∂x_h∂x_l|` on the polydisc of radius
    /// `r` around `c`. Polynomials use coefficient moduli; branches sample
    /// the implicit Hessian on an axis stencil and inflate by 1.5.
    pub fn hessian_bound(&self, i: usize, c: &[Complex64], value: Complex64, r: f64) -> Result<f64> {
        let n = self.n;
        match &self.eqs[i] {
            Kernel::Poly { hess, .. } => {
                let radii: Vec<f64> = c.iter().map(|z| z.norm() + r).collect();
                Ok(hess.iter().map(|h| h.evaluate_abs(&radii)).sum())
            }
            Kernel::Branch(b) => {
                let row_sum = |z: &[Complex64], u: Complex64| -> Result<f64> {
                    Ok(b.hessian(z, u)?.iter().map(|v| v.norm()).sum())
                };
                let mut worst = row_sum(c, value)?;
                let dirs = [
                    Complex64::new(r, 0.0),
                    Complex64::new(-r, 0.0),
                    Complex64::new(0.0, r),
                    Complex64::new(0.0, -r),
                ];
                for h in 0..n {
                    for d in dirs {
                        let mut z = c.to_vec();
                        z[h] += d;
                        let u = b.select(&z, Some(value))?.u;
                        worst = worst.max(row_sum(&z, u)?);
                    }
                }
                Ok(1.5 * worst)
            }
        }
    }
}
