//! Sparse multivariate polynomials over exact Gaussian rationals or complex
//! floats.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`] in graded
//! lexicographic order, so iteration order (and therefore printed output and
//! division steps) is deterministic. Zero coefficients are never stored.

mod coeff;
mod division;
pub mod univariate;

pub use coeff::{format_rational, parse_rational, Coefficient, GaussRat};
pub(crate) use coeff::rational_to_f64;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when every exponent of `other` is at most the one in `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `nvars` variables.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<C: Coefficient> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

/// Polynomial with exact Gaussian-rational coefficients.
pub type ExactPoly = MultiPoly<GaussRat>;
/// Polynomial with double-precision complex coefficients.
pub type FloatPoly = MultiPoly<Complex64>;

impl<C: Coefficient> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The polynomial `x_var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[var] = 1;
        Self::monomial(nvars, exps, C::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: C) -> Self {
        assert_eq!(exps.len(), nvars, "exponent vector length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial(exps), c);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut p = Self::zero(nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            p.add_term(Monomial(exps), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> C {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(C::zero)
    }

    /// Leading term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Total degree; undefined (error) for the zero polynomial.
    pub fn total_degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    /// Degree in one variable; undefined (error) for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> Result<u32> {
        self.check_var(var)?;
        self.terms
            .keys()
            .map(|m| m.0[var])
            .max()
            .ok_or(Error::ZeroPolynomial)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        var < self.nvars && self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn check_var(&self, var: usize) -> Result<()> {
        if var >= self.nvars {
            Err(Error::IndexOutOfRange {
                index: var,
                nvars: self.nvars,
            })
        } else {
            Ok(())
        }
    }

    fn check_same_arity(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: other.nvars,
            })
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "arity mismatch in add");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "arity mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "arity mismatch in mul");
        let mut out = Self::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    /// Multiplies by the monomial with exponents `exps`.
    pub fn mul_monomial(&self, exps: &[u32]) -> Self {
        let shift = Monomial(exps.to_vec());
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(&shift), c.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Evaluates at a complex point; exact coefficients are converted to
    /// floats at call time.
    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let powers = power_table(self, point);
        let mut acc = Complex64::zero();
        for (m, c) in &self.terms {
            let mut term = c.to_c64();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term *= powers[v][e as usize];
                }
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Evaluates in the coefficient field itself (exact for Gaussian rationals).
    pub fn evaluate_in_field(&self, point: &[C]) -> Result<C> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term = term * point[v].clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// `Σ |c|·∏ r_v^e`: an upper bound for `|p|` on the polydisc with radii `r`.
    pub fn evaluate_abs(&self, radii: &[f64]) -> f64 {
        debug_assert_eq!(radii.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(c.abs(), |acc, (v, &e)| acc * radii[v].powi(e as i32))
            })
            .sum()
    }

    /// Sum of coefficient moduli.
    pub fn coefficient_scale(&self) -> f64 {
        self.terms.values().map(Coefficient::abs).sum()
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Self> {
        self.check_var(var)?;
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c.clone() * C::from_i64(e as i64));
        }
        Ok(out)
    }

    /// Splits `p = Q_d + … + Q_0` into nonzero homogeneous components,
    /// returned in descending degree.
    pub fn homogeneous_parts(&self) -> Result<Vec<(u32, Self)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut parts: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.degree())
                .or_insert_with(|| Self::zero(self.nvars))
                .terms
                .insert(m.clone(), c.clone());
        }
        Ok(parts.into_iter().rev().collect())
    }

    /// Top-degree homogeneous component `Q_d`.
    pub fn leading_part(&self) -> Result<Self> {
        let d = self.total_degree()?;
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// Groups terms by the exponent of `var`; each coefficient polynomial keeps
    /// the ambient arity with `var` absent.
    pub fn coefficients_in(&self, var: usize) -> Result<BTreeMap<u32, Self>> {
        self.check_var(var)?;
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = m.0.clone();
            let e = std::mem::replace(&mut exps[var], 0);
            out.entry(e)
                .or_insert_with(|| Self::zero(self.nvars))
                .terms
                .insert(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Substitutes `x_v := subs[v]` for every variable. All substitutes must
    /// share one arity, which becomes the arity of the result.
    pub fn compose(&self, subs: &[Self]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        let target = match subs.first() {
            Some(s) => s.nvars,
            None => return Ok(self.clone()),
        };
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(Error::DimensionMismatch {
                expected: target,
                got: bad.nvars,
            });
        }
        let mut cache: Vec<Vec<Self>> = subs.iter().map(|s| vec![Self::one(target), s.clone()]).collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[v].len() <= e as usize {
                    let next = cache[v].last().unwrap().mul(&subs[v]);
                    cache[v].push(next);
                }
                term = term.mul(&cache[v][e as usize]);
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Inserts `count` fresh variables at position `at`, shifting later ones.
    pub fn insert_vars(&self, at: usize, count: usize) -> Self {
        assert!(at <= self.nvars);
        MultiPoly {
            nvars: self.nvars + count,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut exps = m.0.clone();
                    exps.splice(at..at, std::iter::repeat(0).take(count));
                    (Monomial(exps), c.clone())
                })
                .collect(),
        }
    }

    /// Drops a variable the polynomial does not depend on.
    pub fn remove_var(&self, var: usize) -> Result<Self> {
        self.check_var(var)?;
        if self.depends_on(var) {
            return Err(Error::InvalidInput(format!(
                "cannot drop variable {var}: polynomial depends on it"
            )));
        }
        Ok(MultiPoly {
            nvars: self.nvars - 1,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut exps = m.0.clone();
                    exps.remove(var);
                    (Monomial(exps), c.clone())
                })
                .collect(),
        })
    }

    /// Reorders variables: variable `v` of `self` becomes variable `perm[v]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: perm.len(),
            });
        }
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let mut exps = vec![0; self.nvars];
                    for (v, &e) in m.0.iter().enumerate() {
                        exps[perm[v]] = e;
                    }
                    (Monomial(exps), c.clone())
                })
                .collect(),
        })
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let mut out = MultiPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_float(&self) -> FloatPoly {
        self.map_coeffs(Coefficient::to_c64)
    }
}

fn power_table<C: Coefficient>(p: &MultiPoly<C>, point: &[Complex64]) -> Vec<Vec<Complex64>> {
    let mut maxe = vec![0u32; p.nvars];
    for m in p.terms.keys() {
        for (v, &e) in m.0.iter().enumerate() {
            maxe[v] = maxe[v].max(e);
        }
    }
    maxe.iter()
        .zip(point)
        .map(|(&e, &z)| {
            let mut row = Vec::with_capacity(e as usize + 1);
            let mut acc = Complex64::one();
            row.push(acc);
            for _ in 0..e {
                acc *= z;
                row.push(acc);
            }
            row
        })
        .collect()
}

impl<C: Coefficient> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c:?}")?;
            for (v, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{v}")?,
                    _ => write!(f, "*x{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl ExactPoly {
    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        Self::from_terms(
            nvars,
            terms.iter().map(|(e, c)| (e.to_vec(), GaussRat::from_i64(*c))),
        )
        .expect("exponent vectors match arity")
    }

    /// `true` when every coefficient has zero imaginary part.
    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }
}

impl FloatPoly {
    /// Rejects non-finite coefficients.
    pub fn check_finite(&self) -> Result<()> {
        if self.terms.values().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidInput("non-finite float coefficient".into()))
        }
    }
}

/// A polynomial in either coefficient mode, as read from input.
#[derive(Clone, Debug, PartialEq)]
pub enum Poly {
    Exact(ExactPoly),
    Float(FloatPoly),
}

impl Poly {
    pub fn nvars(&self) -> usize {
        match self {
            Poly::Exact(p) => p.nvars(),
            Poly::Float(p) => p.nvars(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Poly::Exact(_))
    }

    pub fn exact(&self) -> Option<&ExactPoly> {
        match self {
            Poly::Exact(p) => Some(p),
            Poly::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> FloatPoly {
        match self {
            Poly::Exact(p) => p.to_float(),
            Poly::Float(p) => p.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Poly::Exact(p) => p.is_zero(),
            Poly::Float(p) => p.is_zero(),
        }
    }

    pub fn total_degree(&self) -> Result<u32> {
        match self {
            Poly::Exact(p) => p.total_degree(),
            Poly::Float(p) => p.total_degree(),
        }
    }

    pub fn degree_in(&self, var: usize) -> Result<u32> {
        match self {
            Poly::Exact(p) => p.degree_in(var),
            Poly::Float(p) => p.degree_in(var),
        }
    }

    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Poly::Exact(p) => p.depends_on(var),
            Poly::Float(p) => p.depends_on(var),
        }
    }

    pub fn evaluate(&self, point: &[Complex64]) -> Result<Complex64> {
        match self {
            Poly::Exact(p) => p.evaluate(point),
            Poly::Float(p) => p.evaluate(point),
        }
    }

    pub fn insert_vars(&self, at: usize, count: usize) -> Poly {
        match self {
            Poly::Exact(p) => Poly::Exact(p.insert_vars(at, count)),
            Poly::Float(p) => Poly::Float(p.insert_vars(at, count)),
        }
    }

    pub fn partial_derivative(&self, var: usize) -> Result<Poly> {
        Ok(match self {
            Poly::Exact(p) => Poly::Exact(p.partial_derivative(var)?),
            Poly::Float(p) => Poly::Float(p.partial_derivative(var)?),
        })
    }

    /// Exponent vectors of all terms, ascending.
    pub fn supports(&self) -> Vec<Vec<u32>> {
        match self {
            Poly::Exact(p) => p.terms().map(|(m, _)| m.exps().to_vec()).collect(),
            Poly::Float(p) => p.terms().map(|(m, _)| m.exps().to_vec()).collect(),
        }
    }
}

impl From<ExactPoly> for Poly {
    fn from(p: ExactPoly) -> Self {
        Poly::Exact(p)
    }
}

impl From<FloatPoly> for Poly {
    fn from(p: FloatPoly) -> Self {
        Poly::Float(p)
    }
}
