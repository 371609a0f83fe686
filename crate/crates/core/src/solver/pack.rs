//! The shifted system `F_i(x̄) = e^{x_i} − f_i(ω̄ + ā + x̄)/A_i`, its
//! Kantorovich certificate and the Newton iteration.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::kernel::Compiled;
use super::seed::SeedRay;
use crate::error::{Error, Result};

/// Default acceptance threshold for the Kantorovich condition.
pub const SAFETY_FACTOR: f64 = 0.5;

const MAX_NEWTON_ITERS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Failed,
}

/// Data of the Kantorovich test `2Mη‖J⁻¹‖ < 1` at the seed center.
#[derive(Clone, Debug, PartialEq)]
pub struct KantorovichCertificate {
    pub eta: f64,
    pub inv_jac_norm: f64,
    pub hess_bound: f64,
    pub condition: f64,
    pub ball_radius: f64,
    pub jacobian_defect: f64,
    pub verdict: Verdict,
}

impl KantorovichCertificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Callable pack for the shifted system around one seed.
#[derive(Clone, Debug)]
pub struct ShiftedSystem {
    kernel: Arc<Compiled>,
    seed: SeedRay,
    states: Vec<Option<Complex64>>,
    warnings: Vec<String>,
}

/// One evaluation of the pack.
pub(crate) struct PackEval {
    pub f: Vec<Complex64>,
    pub rhs: Vec<Complex64>,
}

impl ShiftedSystem {
    pub(crate) fn new(kernel: Arc<Compiled>, seed: SeedRay) -> Result<Self> {
        if let Some(i) = seed.normalizers.iter().position(|a| a.norm() == 0.0) {
            return Err(Error::InvalidSeed {
                q: seed.q.clone(),
                t: seed.t,
                index: i,
            });
        }
        let states = seed.branch_states.clone();
        Ok(ShiftedSystem {
            kernel,
            seed,
            states,
            warnings: Vec::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.kernel.n()
    }

    pub fn seed(&self) -> &SeedRay {
        &self.seed
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn point(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.n())
            .map(|i| self.seed.omega[i] + (self.seed.shifts[i] + x[i]))
            .collect()
    }

    /// Evaluates `F(x̄)` and advances branch states along the way.
    pub(crate) fn eval(&mut self, x: &[Complex64]) -> Result<PackEval> {
        let z = self.point(x);
        let n = self.n();
        let mut f = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let v = self.kernel.value(i, &z, self.states[i])?;
            if self.kernel.is_branch(i) {
                self.states[i] = Some(v.value);
                if v.ambiguous {
                    let msg = format!("branch {i} ambiguous near seed q = {:?}, t = {}", self.seed.q, self.seed.t);
                    if !self.warnings.contains(&msg) {
                        self.warnings.push(msg);
                    }
                }
            }
            f.push(x[i].exp() - v.value / self.seed.normalizers[i]);
            rhs.push(v.value);
        }
        Ok(PackEval { f, rhs })
    }

    /// `F(x̄)` without touching the stored branch states.
    pub fn residual_vector(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut probe = self.clone();
        Ok(probe.eval(x)?.f)
    }

    pub(crate) fn jacobian_at(&self, x: &[Complex64], rhs: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let n = self.n();
        let z = self.point(x);
        let mut j = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            let g = self.kernel.gradient(i, &z, rhs[i])?;
            for h in 0..n {
                j[(i, h)] = -g[h] / self.seed.normalizers[i];
            }
            j[(i, i)] += x[i].exp();
        }
        Ok(j)
    }

    /// `J(x̄)` without touching the stored branch states.
    pub fn jacobian(&self, x: &[Complex64]) -> Result<DMatrix<Complex64>> {
        let mut probe = self.clone();
        let ev = probe.eval(x)?;
        probe.jacobian_at(x, &ev.rhs)
    }

    /// Kantorovich test at `x̄ = 0`.
    pub fn certify(&self) -> Result<KantorovichCertificate> {
        let n = self.n();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        let mut probe = self.clone();
        let ev = probe.eval(&zero)?;
        let j = probe.jacobian_at(&zero, &ev.rhs)?;
        let identity = DMatrix::<Complex64>::identity(n, n);
        let jacobian_defect = inf_norm(&(&j - &identity));
        let inv = j.clone().lu().try_inverse().ok_or_else(|| {
            Error::CertificationFailed(format!(
                "singular Jacobian at seed q = {:?}, t = {}",
                self.seed.q, self.seed.t
            ))
        })?;
        let inv_jac_norm = inf_norm(&inv) * (1.0 + 10.0 * n as f64 * f64::EPSILON);
        let step = &inv * DVector::from_vec(ev.f);
        let eta = step.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let r = 2.0 * eta;
        let c = self.point(&zero);
        let mut m = 0.0f64;
        for i in 0..n {
            let a = self.seed.normalizers[i].norm();
            let h = self.kernel.hessian_bound(i, &c, ev.rhs[i], r)?;
            m = m.max(r.exp() + h / a);
        }
        let condition = 2.0 * m * eta * inv_jac_norm;
        let ok = condition.is_finite() && condition < SAFETY_FACTOR;
        Ok(KantorovichCertificate {
            eta,
            inv_jac_norm,
            hess_bound: m,
            condition,
            ball_radius: r,
            jacobian_defect,
            verdict: if ok { Verdict::Certified } else { Verdict::Failed },
        })
    }

    /// Unshifted residuals `|e^{x_i} − f_i(x̄)|` at the shifted point, using
    /// `e^{ω_i} = 1` so that `e^{x_i} = A_i e^{x̃_i}`.
    pub(crate) fn unshifted(&self, f: &[Complex64]) -> Vec<f64> {
        f.iter()
            .zip(&self.seed.normalizers)
            .map(|(fi, a)| (fi * a).norm())
            .collect()
    }

    /// Plain Newton from `x̄ = 0`, stopping once every unshifted residual is
    /// below `tol` or the steps stall at rounding level.
    pub(crate) fn newton(&mut self, tol: f64, radius_cap: f64) -> Result<NewtonRun> {
        let n = self.n();
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        let mut steps = Vec::new();
        let mut ev = self.eval(&x)?;
        let mut stalled = 0;
        for _ in 0..MAX_NEWTON_ITERS {
            let res = self.unshifted(&ev.f);
            let worst = res.iter().copied().fold(0.0, f64::max);
            let fmax = ev.f.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if worst < tol && fmax < tol.max(f64::EPSILON) {
                break;
            }
            let j = self.jacobian_at(&x, &ev.rhs)?;
            let rhs = DVector::from_vec(ev.f.iter().map(|v| -v).collect());
            let dx = j.lu().solve(&rhs).ok_or_else(|| self.fail("singular Jacobian during Newton"))?;
            let size = dx.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi += d;
            }
            steps.push(size);
            let xn = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if !xn.is_finite() || xn > radius_cap {
                return Err(self.fail("Newton left the certified region"));
            }
            ev = self.eval(&x)?;
            if size <= 4.0 * f64::EPSILON * (1.0 + xn) {
                stalled += 1;
                if stalled >= 2 {
                    break;
                }
            }
        }
        let residuals = self.unshifted(&ev.f);
        Ok(NewtonRun { x, residuals, steps })
    }

    pub(crate) fn fail(&self, reason: &str) -> Error {
        Error::SolverFailed {
            q: self.seed.q.clone(),
            t: self.seed.t,
            reason: reason.to_string(),
        }
    }

    /// Solution in original coordinates.
    pub(crate) fn absolute(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.point(x)
    }

    pub(crate) fn local(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter().zip(&self.seed.shifts).map(|(v, a)| v + a).collect()
    }

    pub(crate) fn states(&self) -> &[Option<Complex64>] {
        &self.states
    }
}

pub(crate) struct NewtonRun {
    pub x: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub steps: Vec<f64>,
}

pub(crate) fn inf_norm(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
