//! Masser systems `e^{x_i} = f_i(x̄)` and the transformations between them.

mod branch;

pub use branch::{BranchRhs, BranchValue};
pub(crate) use branch::BranchKernel;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::{Coefficient, ExactPoly, GaussRat, MultiPoly, Poly};
use crate::tower::ExpTower;

/// Right-hand side `f_i` of one equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Rhs {
    Poly(Poly),
    Rational { num: Poly, den: Poly },
    Branch(BranchRhs),
}

impl Rhs {
    pub fn poly(p: impl Into<Poly>) -> Rhs {
        Rhs::Poly(p.into())
    }

    /// Number of `x̄` variables the right-hand side is written in.
    pub fn arity(&self) -> usize {
        match self {
            Rhs::Poly(p) => p.nvars(),
            Rhs::Rational { num, .. } => num.nvars(),
            Rhs::Branch(b) => b.arity(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let check = |got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: n, got })
            }
        };
        match self {
            Rhs::Poly(p) => {
                check(p.nvars())?;
                if p.is_zero() {
                    return Err(Error::ZeroPolynomial);
                }
            }
            Rhs::Rational { num, den } => {
                check(num.nvars())?;
                check(den.nvars())?;
                if num.is_zero() || den.is_zero() {
                    return Err(Error::ZeroPolynomial);
                }
            }
            Rhs::Branch(b) => check(b.arity())?,
        }
        Ok(())
    }

    /// `f_i(x̄)`; branches continue from `state` (largest root when absent).
    pub fn evaluate(&self, x: &[Complex64], state: Option<Complex64>) -> Result<Complex64> {
        match self {
            Rhs::Poly(p) => p.evaluate(x),
            Rhs::Rational { num, den } => {
                let d = den.evaluate(x)?;
                if d.is_zero() {
                    return Err(Error::InvalidInput("denominator vanishes".into()));
                }
                Ok(num.evaluate(x)? / d)
            }
            Rhs::Branch(b) => Ok(b.kernel().select(x, state)?.u),
        }
    }

    fn widen(&self, count: usize) -> Rhs {
        match self {
            Rhs::Poly(p) => Rhs::Poly(p.insert_vars(p.nvars(), count)),
            Rhs::Rational { num, den } => Rhs::Rational {
                num: num.insert_vars(num.nvars(), count),
                den: den.insert_vars(den.nvars(), count),
            },
            Rhs::Branch(b) => {
                let n = b.arity();
                let mut widened =
                    BranchRhs::new(b.defining().insert_vars(n, count)).expect("widening keeps validity");
                widened.state = b.state;
                Rhs::Branch(widened)
            }
        }
    }
}

/// Rational linear form `Σ c_j x_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub coeffs: Vec<BigRational>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        LinearForm { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        LinearForm {
            coeffs: coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn to_poly(&self) -> ExactPoly {
        let n = self.coeffs.len();
        let mut p = ExactPoly::zero(n);
        for (j, c) in self.coeffs.iter().enumerate() {
            p = p.add(&ExactPoly::var(n, j).scale(&GaussRat::real(c.clone())));
        }
        p
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.coeffs
            .iter()
            .zip(x)
            .map(|(c, v)| v * crate::poly::rational_to_f64(c))
            .sum()
    }

    /// Scales to coprime integers with the first nonzero coefficient positive.
    pub fn primitive(&self) -> LinearForm {
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let g = ints
            .iter()
            .fold(BigInt::zero(), |acc, v| num_integer::Integer::gcd(&acc, v));
        if g.is_zero() {
            return self.clone();
        }
        let sign = match ints.iter().find(|v| !v.is_zero()) {
            Some(v) if v.is_negative() => -BigInt::one(),
            _ => BigInt::one(),
        };
        LinearForm {
            coeffs: ints
                .into_iter()
                .map(|v| BigRational::from_integer(v / &g * &sign))
                .collect(),
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if mag.is_one() {
                write!(f, "x{j}")?;
            } else {
                write!(f, "{mag}*x{j}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// How a solution of a transformed system maps back to the original one.
#[derive(Clone, Debug, PartialEq)]
pub enum Recovery {
    /// `(x̄, ȳ) ↦ x̄ − ȳ` for the doubled system of a rational system in `n`
    /// variables.
    Difference { n: usize },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Provenance {
    pub tower: Option<ExpTower>,
    pub notes: Vec<String>,
    /// Excluded relations `ℓ_j(x̄) ≠ 0`, each realized by an extra variable.
    pub excluded: Vec<LinearForm>,
    pub recovery: Option<Recovery>,
}

/// The system `e^{x_i} = f_i(x̄)`, `i = 1, …, n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MasserSystem {
    n: usize,
    rhs: Vec<Rhs>,
    pub provenance: Provenance,
}

impl MasserSystem {
    pub fn new(rhs: Vec<Rhs>) -> Result<Self> {
        Self::with_provenance(rhs, Provenance::default())
    }

    pub fn with_provenance(rhs: Vec<Rhs>, provenance: Provenance) -> Result<Self> {
        let n = rhs.len();
        if n == 0 {
            return Err(Error::InvalidInput("a system needs at least one equation".into()));
        }
        for r in &rhs {
            r.validate(n)?;
        }
        Ok(MasserSystem { n, rhs, provenance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rhs(&self) -> &[Rhs] {
        &self.rhs
    }

    pub fn rhs_mut(&mut self) -> &mut [Rhs] {
        &mut self.rhs
    }

    pub fn has_rational(&self) -> bool {
        self.rhs.iter().any(|r| matches!(r, Rhs::Rational { .. }))
    }

    pub fn is_exact(&self) -> bool {
        self.rhs.iter().all(|r| match r {
            Rhs::Poly(p) => p.is_exact(),
            Rhs::Rational { num, den } => num.is_exact() && den.is_exact(),
            Rhs::Branch(b) => b.defining().is_exact(),
        })
    }

    /// Chain reduction of a tower: variables `(z, e_1, …, e_{k−1})` with
    /// `e^{x_j} = x_{j+1}` and a final branch `e^{x_{k−1}} = u`,
    /// `p(x_0, …, x_{k−1}, u) = 0`.
    pub fn from_tower(t: &ExpTower) -> Result<Self> {
        if let Some(d) = t.is_degenerate() {
            return Err(Error::Degenerate { exps: d.exps });
        }
        let k = t.k();
        let mut rhs = Vec::with_capacity(k);
        for j in 0..k - 1 {
            rhs.push(Rhs::Poly(Poly::Exact(ExactPoly::var(k, j + 1))));
        }
        rhs.push(Rhs::Branch(BranchRhs::new(t.poly().clone())?));
        Self::with_provenance(
            rhs,
            Provenance {
                tower: Some(t.clone()),
                ..Provenance::default()
            },
        )
    }

    /// Doubling `e^{x_i} = g_i(x̄ − ȳ)`, `e^{y_i} = h_i(x̄ − ȳ)` for
    /// `f_i = g_i/h_i`. Polynomial systems come back unchanged.
    pub fn rational_to_integral(&self) -> Result<Self> {
        if self.rhs.iter().any(|r| matches!(r, Rhs::Branch(_))) {
            return Err(Error::Unsupported(
                "branch right-hand sides cannot be doubled".into(),
            ));
        }
        if !self.has_rational() {
            return Ok(self.clone());
        }
        let n = self.n;
        let mut nums = Vec::with_capacity(n);
        let mut dens = Vec::with_capacity(n);
        for r in &self.rhs {
            match r {
                Rhs::Poly(p) => {
                    nums.push(p.clone());
                    dens.push(one_like(p));
                }
                Rhs::Rational { num, den } => {
                    nums.push(num.clone());
                    dens.push(den.clone());
                }
                Rhs::Branch(_) => unreachable!(),
            }
        }
        let mut rhs = Vec::with_capacity(2 * n);
        for p in nums.iter().chain(dens.iter()) {
            rhs.push(Rhs::Poly(difference_substitute(p, n)?));
        }
        let mut provenance = self.provenance.clone();
        provenance.recovery = Some(Recovery::Difference { n });
        provenance
            .notes
            .push(format!("doubled {n}-variable rational system; solution is x - y"));
        Self::with_provenance(rhs, provenance)
    }

    /// Maps a solution of this system to the system it was derived from.
    pub fn recover(&self, x: &[Complex64]) -> Vec<Complex64> {
        match self.provenance.recovery {
            Some(Recovery::Difference { n }) => (0..n).map(|i| x[i] - x[n + i]).collect(),
            None => x.to_vec(),
        }
    }

    /// Adds a variable `u_j` with `e^{u_j} = ℓ_j(x̄)` per relation, so every
    /// solution has `ℓ_j(x̄) ≠ 0`.
    pub fn augment_exclude_relations(&self, relations: &[LinearForm]) -> Result<Self> {
        if relations.is_empty() {
            return Ok(self.clone());
        }
        let n = self.n;
        for l in relations {
            if l.coeffs.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: l.coeffs.len(),
                });
            }
            if l.is_zero() {
                return Err(Error::InvalidInput("cannot exclude the zero form".into()));
            }
        }
        let extra = relations.len();
        let mut rhs: Vec<Rhs> = self.rhs.iter().map(|r| r.widen(extra)).collect();
        for l in relations {
            rhs.push(Rhs::Poly(Poly::Exact(l.to_poly().insert_vars(n, extra))));
        }
        let mut provenance = self.provenance.clone();
        provenance.excluded.extend(relations.iter().cloned());
        Self::with_provenance(rhs, provenance)
    }

    /// Per-equation `|e^{x_i} − f_i(x̄)|`, with branches continued from
    /// their stored state.
    pub fn residuals(&self, x: &[Complex64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        self.rhs
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let state = match r {
                    Rhs::Branch(b) => b.state,
                    _ => None,
                };
                Ok((x[i].exp() - r.evaluate(x, state)?).norm())
            })
            .collect()
    }
}

fn one_like(p: &Poly) -> Poly {
    match p {
        Poly::Exact(p) => Poly::Exact(ExactPoly::one(p.nvars())),
        Poly::Float(p) => Poly::Float(MultiPoly::one(p.nvars())),
    }
}

fn difference_substitute(p: &Poly, n: usize) -> Result<Poly> {
    fn go<C: Coefficient>(p: &MultiPoly<C>, n: usize) -> Result<MultiPoly<C>> {
        let subs: Vec<MultiPoly<C>> = (0..n)
            .map(|i| MultiPoly::var(2 * n, i).sub(&MultiPoly::var(2 * n, n + i)))
            .collect();
        p.compose(&subs)
    }
    Ok(match p {
        Poly::Exact(p) => Poly::Exact(go(p, n)?),
        Poly::Float(p) => Poly::Float(go(p, n)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(nvars: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::Exact(ExactPoly::from_int_terms(nvars, terms))
    }

    #[test]
    fn tower_reduction_shapes() {
        let t = ExpTower::new(2, ex(3, &[(&[0, 0, 1], 1), (&[1, 0, 0], -1)])).unwrap();
        let s = MasserSystem::from_tower(&t).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.rhs()[0], Rhs::Poly(ex(2, &[(&[0, 1], 1)])));
        match &s.rhs()[1] {
            Rhs::Branch(b) => {
                let u = b.kernel().select(&[Complex64::new(3.0, 1.0), Complex64::new(0.0, 0.0)], None).unwrap();
                assert!((u.u - Complex64::new(3.0, 1.0)).norm() < 1e-12);
            }
            other => panic!("expected branch, got {other:?}"),
        }
        assert!(s.provenance.tower.is_some());

        let t1 = ExpTower::new(1, ex(2, &[(&[0, 1], 1), (&[1, 0], -1)])).unwrap();
        assert_eq!(MasserSystem::from_tower(&t1).unwrap().n(), 1);

        let deg = ExpTower::new(1, ex(2, &[(&[2, 3], 1)])).unwrap();
        assert_eq!(
            MasserSystem::from_tower(&deg),
            Err(Error::Degenerate { exps: vec![3] })
        );
    }

    #[test]
    fn doubling_of_rational_rhs() {
        // f = x / (x - 1)
        let s = MasserSystem::new(vec![Rhs::Rational {
            num: ex(1, &[(&[1], 1)]),
            den: ex(1, &[(&[1], 1), (&[0], -1)]),
        }])
        .unwrap();
        let d = s.rational_to_integral().unwrap();
        assert_eq!(d.n(), 2);
        assert_eq!(d.rhs()[0], Rhs::Poly(ex(2, &[(&[1, 0], 1), (&[0, 1], -1)])));
        assert_eq!(
            d.rhs()[1],
            Rhs::Poly(ex(2, &[(&[1, 0], 1), (&[0, 1], -1), (&[0, 0], -1)]))
        );
        let x = [Complex64::new(3.0, 1.0), Complex64::new(1.0, 2.0)];
        assert_eq!(d.recover(&x), vec![Complex64::new(2.0, -1.0)]);

        let poly = MasserSystem::new(vec![Rhs::poly(ExactPoly::var(1, 0))]).unwrap();
        assert_eq!(poly.rational_to_integral().unwrap(), poly);
    }

    #[test]
    fn augmentation_adds_one_variable_per_relation() {
        let s = MasserSystem::new(vec![
            Rhs::poly(ExactPoly::var(2, 1)),
            Rhs::poly(ExactPoly::var(2, 0)),
        ])
        .unwrap();
        let l = LinearForm::from_ints(&[-2, 1]);
        let a = s.augment_exclude_relations(&[l.clone()]).unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(a.rhs()[2], Rhs::Poly(ex(3, &[(&[0, 1, 0], 1), (&[1, 0, 0], -2)])));
        assert_eq!(a.rhs()[0], Rhs::Poly(ex(3, &[(&[0, 1, 0], 1)])));
        assert_eq!(a.provenance.excluded, vec![l]);
        assert_eq!(s.augment_exclude_relations(&[]).unwrap(), s);
        assert!(s.augment_exclude_relations(&[LinearForm::from_ints(&[0, 0])]).is_err());
    }

    #[test]
    fn augmentation_widens_branch_before_u() {
        let t = ExpTower::new(2, ex(3, &[(&[0, 0, 1], 1), (&[1, 0, 0], -1)])).unwrap();
        let s = MasserSystem::from_tower(&t).unwrap();
        let a = s.augment_exclude_relations(&[LinearForm::from_ints(&[-3, 1])]).unwrap();
        match &a.rhs()[1] {
            Rhs::Branch(b) => {
                assert_eq!(b.arity(), 3);
                assert_eq!(b.defining(), &ex(4, &[(&[0, 0, 0, 1], 1), (&[1, 0, 0, 0], -1)]));
            }
            other => panic!("expected branch, got {other:?}"),
        }
    }

    #[test]
    fn linear_form_normalization() {
        let l = LinearForm::new(vec![
            BigRational::new((-2).into(), 3.into()),
            BigRational::new(4.into(), 3.into()),
        ]);
        assert_eq!(l.primitive(), LinearForm::from_ints(&[1, -2]));
        assert_eq!(LinearForm::from_ints(&[0, 3, -1]).to_string(), "3*x1 - x2");
    }

    #[test]
    fn validation() {
        assert!(MasserSystem::new(vec![]).is_err());
        assert!(MasserSystem::new(vec![Rhs::poly(ExactPoly::zero(1))]).is_err());
        assert!(MasserSystem::new(vec![Rhs::poly(ExactPoly::var(2, 0))]).is_err());
    }
}
