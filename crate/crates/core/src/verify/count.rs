//! Zero counting in rectangles by the argument principle.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::FloatPoly;
use crate::tower::ExpTower;

/// A holomorphic function with its derivative.
pub trait AnalyticFunction: Sync {
    /// `(f(z), f'(z))`, or `None` where the values are not representable.
    fn eval(&self, z: Complex64) -> Option<(Complex64, Complex64)>;
}

impl AnalyticFunction for ExpTower {
    fn eval(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        self.eval_with_derivative(z)
    }
}

/// A polynomial in one variable.
#[derive(Clone, Debug)]
pub struct UnivariatePoly {
    p: FloatPoly,
    dp: FloatPoly,
}

impl UnivariatePoly {
    pub fn new(p: FloatPoly) -> Result<Self> {
        if p.nvars() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: p.nvars(),
            });
        }
        let dp = p.partial_derivative(0)?;
        Ok(UnivariatePoly { p, dp })
    }
}

impl AnalyticFunction for UnivariatePoly {
    fn eval(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let f = self.p.evaluate(&[z]).ok()?;
        let d = self.dp.evaluate(&[z]).ok()?;
        finite(f, d)
    }
}

/// Wraps a closure returning `(f, f')`.
pub struct FnAnalytic<F>(pub F);

impl<F> AnalyticFunction for FnAnalytic<F>
where
    F: Fn(Complex64) -> Option<(Complex64, Complex64)> + Sync,
{
    fn eval(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        (self.0)(z).and_then(|(f, d)| finite(f, d))
    }
}

fn finite(f: Complex64, d: Complex64) -> Option<(Complex64, Complex64)> {
    (f.re.is_finite() && f.im.is_finite() && d.re.is_finite() && d.im.is_finite()).then_some((f, d))
}

/// Axis-parallel rectangle `[lo.re, hi.re] × [lo.im, hi.im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub lo: Complex64,
    pub hi: Complex64,
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self> {
        let r = Rect {
            lo: Complex64::new(re.0, im.0),
            hi: Complex64::new(re.1, im.1),
        };
        if !(r.lo.re < r.hi.re && r.lo.im < r.hi.im) || ![re.0, re.1, im.0, im.1].iter().all(|v| v.is_finite()) {
            return Err(Error::RegionUnsupported(format!("empty or non-finite rectangle {re:?} × {im:?}")));
        }
        Ok(r)
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.lo.re..=self.hi.re).contains(&z.re) && (self.lo.im..=self.hi.im).contains(&z.im)
    }

    fn grow(&self, d: f64) -> Rect {
        Rect {
            lo: self.lo - Complex64::new(d, d),
            hi: self.hi + Complex64::new(d, d),
        }
    }

    /// Quadrants around a point offset from the center by `shift` times the
    /// size.
    fn quarter(&self, shift: f64) -> [Rect; 4] {
        let mx = self.lo.re + self.width() * (0.5 + shift);
        let my = self.lo.im + self.height() * (0.5 - 0.7 * shift);
        let c = |x0: f64, x1: f64, y0: f64, y1: f64| Rect {
            lo: Complex64::new(x0, y0),
            hi: Complex64::new(x1, y1),
        };
        [
            c(self.lo.re, mx, self.lo.im, my),
            c(mx, self.hi.re, self.lo.im, my),
            c(self.lo.re, mx, my, self.hi.im),
            c(mx, self.hi.re, my, self.hi.im),
        ]
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            self.lo,
            Complex64::new(self.hi.re, self.lo.im),
            self.hi,
            Complex64::new(self.lo.re, self.hi.im),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountOptions {
    /// Deepest level of rectangle subdivision.
    pub max_depth: u32,
    /// Largest accepted distance of the contour integral from an integer.
    pub snap: f64,
    /// Panels per edge before adaptive refinement.
    pub initial_panels: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            max_depth: 6,
            snap: 0.25,
            initial_panels: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroCount {
    pub count: u64,
    /// The rectangle actually integrated over; differs from the request
    /// when a zero sat on the boundary.
    pub region: Rect,
    pub nudged: bool,
    /// Leaf rectangles with their counts; a single entry when the whole
    /// region snapped directly.
    pub pieces: Vec<(Rect, u64)>,
}

/// Counts zeros of `f` inside `region` with multiplicity.
pub fn count_zeros(f: &dyn AnalyticFunction, region: Rect) -> Result<ZeroCount> {
    count_zeros_with(f, region, &CountOptions::default())
}

pub fn count_zeros_with(f: &dyn AnalyticFunction, region: Rect, opts: &CountOptions) -> Result<ZeroCount> {
    let step = 1e-3 * region.width().min(region.height());
    for attempt in 0..6 {
        let rect = if attempt == 0 {
            region
        } else {
            region.grow(step * attempt as f64 * 0.731)
        };
        match count_rect(f, rect, 0, opts) {
            Ok(pieces) => {
                return Ok(ZeroCount {
                    count: pieces.iter().map(|p| p.1).sum(),
                    region: rect,
                    nudged: attempt > 0,
                    pieces,
                })
            }
            Err(Fail::NearZero) => continue,
            Err(Fail::Hard(e)) => return Err(e),
        }
    }
    Err(Error::Inconclusive(
        "zeros keep lying on the boundary after nudging".into(),
    ))
}

enum Fail {
    NearZero,
    Hard(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Hard(e)
    }
}

fn count_rect(f: &dyn AnalyticFunction, rect: Rect, depth: u32, opts: &CountOptions) -> std::result::Result<Vec<(Rect, u64)>, Fail> {
    let w = contour_integral(f, &rect, opts)?;
    if let Some(w) = w {
        let n = w.re.round();
        if n >= 0.0 && (w.re - n).abs() < opts.snap && w.im.abs() < opts.snap {
            return Ok(vec![(rect, n as u64)]);
        }
    }
    if depth >= opts.max_depth {
        return Err(Fail::Hard(Error::Inconclusive(format!(
            "winding number over [{}, {}] × [{}, {}] did not settle",
            rect.lo.re, rect.hi.re, rect.lo.im, rect.hi.im
        ))));
    }
    for shift in [0.0, 0.0731, -0.1187, 0.2213] {
        let kids = rect.quarter(shift);
        let results: Vec<_> = {
            use rayon::prelude::*;
            kids.par_iter().map(|k| count_rect(f, *k, depth + 1, opts)).collect()
        };
        let mut out = Vec::new();
        let mut retry = false;
        for r in results {
            match r {
                Ok(p) => out.extend(p),
                Err(Fail::NearZero) => retry = true,
                Err(e) => return Err(e),
            }
        }
        if !retry {
            return Ok(out);
        }
    }
    Err(Fail::NearZero)
}

/// `(1/2πi)∮ f'/f`, or `None` when the quadrature could not be resolved.
fn contour_integral(f: &dyn AnalyticFunction, rect: &Rect, opts: &CountOptions) -> std::result::Result<Option<Complex64>, Fail> {
    let cs = rect.corners();
    let near = 1e-6 * rect.diameter();
    let mut total = Complex64::new(0.0, 0.0);
    for e in 0..4 {
        let a = cs[e];
        let b = cs[(e + 1) % 4];
        match edge_integral(f, a, b, near, opts)? {
            Some(v) => total += v,
            None => return Ok(None),
        }
    }
    Ok(Some(total / Complex64::new(0.0, TAU)))
}

const MAX_PANELS: usize = 200_000;

fn edge_integral(
    f: &dyn AnalyticFunction,
    a: Complex64,
    b: Complex64,
    near: f64,
    opts: &CountOptions,
) -> std::result::Result<Option<Complex64>, Fail> {
    let dz = b - a;
    let g = |s: f64| -> std::result::Result<Complex64, Fail> {
        let z = a + dz * s;
        let (v, d) = f.eval(z).ok_or_else(|| {
            Fail::Hard(Error::RegionUnsupported(format!(
                "function not representable at {z}"
            )))
        })?;
        if v.norm() <= near * d.norm() || v.norm() == 0.0 {
            return Err(Fail::NearZero);
        }
        Ok(d / v * dz)
    };
    let n0 = opts.initial_panels.max(1);
    let mut stack = Vec::with_capacity(n0);
    for i in (0..n0).rev() {
        let s0 = i as f64 / n0 as f64;
        let s1 = (i + 1) as f64 / n0 as f64;
        let sm = 0.5 * (s0 + s1);
        stack.push((s0, s1, g(s0)?, g(sm)?, g(s1)?));
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut panels = 0usize;
    while let Some((s0, s1, g0, gm, g1)) = stack.pop() {
        panels += 1;
        if panels > MAX_PANELS {
            return Ok(None);
        }
        let h = s1 - s0;
        let l = 0.5 * (s0 + (s0 + s1) * 0.5);
        let r = 0.5 * ((s0 + s1) * 0.5 + s1);
        let gl = g(l)?;
        let gr = g(r)?;
        let whole = (g0 + gm * 4.0 + g1) * (h / 6.0);
        let halves = (g0 + gl * 4.0 + gm * 2.0 + gr * 4.0 + g1) * (h / 12.0);
        // Phase change of f across the panel must stay small for the
        // integral to track the argument faithfully.
        let phase = [g0, gl, gm, gr, g1].iter().map(|v| v.norm()).fold(0.0, f64::max) * h;
        let tol = 1e-10 * h.max(1e-3);
        if phase < 0.5 && (whole - halves).norm() < 15.0 * tol {
            total += halves + (halves - whole) / 15.0;
        } else if h < 1e-14 {
            return Ok(None);
        } else {
            let m = 0.5 * (s0 + s1);
            stack.push((m, s1, gm, gr, g1));
            stack.push((s0, m, g0, gl, gm));
        }
    }
    Ok(Some(total))
}
