use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hp::{HpComplex, HpContext};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::solver::kernel::Compiled;
use crate::solver::RootRecord;
use crate::system::{MasserSystem, Rhs};

/// Beyond this imaginary part the stored double-precision offset no longer
/// pins down the root to full relative accuracy.
const IMAG_PRECISION_LIMIT: f64 = 1e12;
const POLISH_ITERS: usize = 12;
const BRANCH_ITERS: usize = 40;
/// Polishing may move the point by at most this much relative to the size
/// of the local offset; anything further is a different point.
const POLISH_DRIFT: f64 = 1e-9;

/// Outcome of a high-precision residual evaluation.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualCheck {
    pub digits: u32,
    /// The reported residual: the polished one when polishing stayed next
    /// to the stored point, otherwise the residual at the stored point.
    pub residual: f64,
    /// `|e^{x_i} − f_i(x̄)|` at the stored point itself. Rounding `x̄` to
    /// doubles alone contributes about `|f_i'|·ulp(x_i)` here.
    pub stored_residuals: Vec<f64>,
    /// Largest residual after high-precision Newton polishing.
    pub polished_residual: f64,
    /// `‖polished − stored‖_∞`.
    pub drift: f64,
    pub polish_accepted: bool,
    /// The polished point, rounded to doubles.
    pub polished: Vec<Complex64>,
    pub precision_limited: bool,
}

/// Evaluates the residual of a root at `digits` decimal digits.
///
/// The point is rebuilt as `2πi·t·q̄ + local`, with the lattice part computed
/// from the integers of the seed, so large imaginary parts carry no rounding
/// from the double-precision `x`.
pub fn recheck_residual(root: &RootRecord, s: &MasserSystem, digits: u32) -> Result<ResidualCheck> {
    let ctx = HpContext::with_digits(digits.max(16));
    let p = polish(&ctx, root, s, 10f64.powi(-(digits as i32)))?;
    let polished: Vec<Complex64> = p.x.iter().map(|v| ctx.to_c64(v)).collect();
    let precision_limited = polished.iter().any(|v| v.im.abs() > IMAG_PRECISION_LIMIT)
        || root.warnings.iter().any(|w| w.contains("precision"));
    let max_residual = p.stored_residuals.iter().copied().fold(0.0, f64::max);
    Ok(ResidualCheck {
        digits,
        residual: if p.accepted { p.residual } else { max_residual },
        stored_residuals: p.stored_residuals,
        polished_residual: p.residual,
        drift: p.drift,
        polish_accepted: p.accepted,
        polished,
        precision_limited,
    })
}

pub(crate) struct Polished {
    pub x: Vec<HpComplex>,
    pub stored_residuals: Vec<f64>,
    pub residual: f64,
    pub drift: f64,
    pub accepted: bool,
}

/// High-precision Newton from `2πi·t·q̄ + local` with a double-precision
/// Jacobian, stopping once the residual is below `target`.
pub(crate) fn polish(ctx: &HpContext, root: &RootRecord, s: &MasserSystem, target: f64) -> Result<Polished> {
    let n = s.n();
    if root.local.len() != n || root.seed.q.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: root.local.len(),
        });
    }
    let mut x: Vec<HpComplex> = (0..n)
        .map(|i| {
            let lattice = ctx.two_pi_i(root.seed.q[i]);
            let lattice = HpComplex {
                re: lattice.re,
                im: ctx.mul_int(&lattice.im, root.seed.t as i64),
            };
            ctx.cadd(&lattice, &ctx.complex(root.local[i]))
        })
        .collect();
    let start = x.clone();
    let mut guesses = root.branch_values.clone();
    guesses.resize(n, None);
    let ev = evaluate(ctx, s, &x, &mut guesses)?;
    let stored_residuals: Vec<f64> = ev.f.iter().map(|v| ctx.cnorm_f64(v)).collect();
    let kernel = Compiled::new(s)?;
    let mut residual = stored_residuals.iter().copied().fold(0.0, f64::max);
    let mut current = ev;
    for _ in 0..POLISH_ITERS {
        if residual < target {
            break;
        }
        let xf: Vec<Complex64> = x.iter().map(|v| ctx.to_c64(v)).collect();
        let mut j = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
        for i in 0..n {
            let g = kernel.gradient(i, &xf, ctx.to_c64(&current.rhs[i]))?;
            for h in 0..n {
                j[(i, h)] = -g[h];
            }
            j[(i, i)] += ctx.to_c64(&current.exps[i]);
        }
        let rhs = DVector::from_iterator(n, current.f.iter().map(|v| -ctx.to_c64(v)));
        let Some(dx) = j.lu().solve(&rhs) else { break };
        let next: Vec<HpComplex> = x.iter().zip(dx.iter()).map(|(a, d)| ctx.cadd(a, &ctx.complex(*d))).collect();
        let mut next_guesses = guesses.clone();
        let trial = evaluate(ctx, s, &next, &mut next_guesses)?;
        let r = trial.f.iter().map(|v| ctx.cnorm_f64(v)).fold(0.0, f64::max);
        if !(r < residual) {
            break;
        }
        x = next;
        guesses = next_guesses;
        current = trial;
        residual = r;
    }
    let drift = x
        .iter()
        .zip(&start)
        .map(|(a, b)| ctx.cnorm_f64(&ctx.csub(a, b)))
        .fold(0.0, f64::max);
    let local_size = root.local.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(Polished {
        x,
        stored_residuals,
        residual,
        drift,
        accepted: drift <= POLISH_DRIFT * (1.0 + local_size),
    })
}

struct HpEval {
    f: Vec<HpComplex>,
    rhs: Vec<HpComplex>,
    exps: Vec<HpComplex>,
}

fn evaluate(
    ctx: &HpContext,
    s: &MasserSystem,
    x: &[HpComplex],
    guesses: &mut [Option<Complex64>],
) -> Result<HpEval> {
    let n = s.n();
    let mut out = HpEval {
        f: Vec::with_capacity(n),
        rhs: Vec::with_capacity(n),
        exps: Vec::with_capacity(n),
    };
    for (i, r) in s.rhs().iter().enumerate() {
        let v = match r {
            Rhs::Poly(p) => ctx.eval_poly(p, x),
            Rhs::Rational { num, den } => ctx
                .cdiv(&ctx.eval_poly(num, x), &ctx.eval_poly(den, x))
                .ok_or_else(|| Error::InvalidInput("denominator vanishes".into()))?,
            Rhs::Branch(b) => {
                let xf: Vec<Complex64> = x.iter().map(|v| ctx.to_c64(v)).collect();
                let start = b.kernel().select(&xf, guesses[i])?.u;
                let u = polish_branch(ctx, b.defining(), x, start)?;
                guesses[i] = Some(ctx.to_c64(&u));
                u
            }
        };
        let e = ctx.cexp(&x[i]);
        out.f.push(ctx.csub(&e, &v));
        out.rhs.push(v);
        out.exps.push(e);
    }
    Ok(out)
}

/// Newton on `u ↦ D(x̄, u)` in working precision.
fn polish_branch(ctx: &HpContext, d: &Poly, x: &[HpComplex], start: Complex64) -> Result<HpComplex> {
    let nu = d.nvars() - 1;
    let du = d.partial_derivative(nu)?;
    let mut point = x.to_vec();
    point.push(ctx.complex(start));
    let tiny = 2f64.powi(-(ctx.bits() as i32) + 16);
    for _ in 0..BRANCH_ITERS {
        let num = ctx.eval_poly(d, &point);
        let den = ctx.eval_poly(&du, &point);
        let Some(step) = ctx.cdiv(&num, &den) else { break };
        point[nu] = ctx.csub(&point[nu], &step);
        let scale = 1.0 + ctx.cnorm_f64(&point[nu]);
        if ctx.cnorm_f64(&step) <= tiny * scale {
            break;
        }
    }
    Ok(point.pop().expect("u was pushed"))
}
