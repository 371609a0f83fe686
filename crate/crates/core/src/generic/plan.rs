use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::relations::{bad_rationals_two_var, bad_tuples_tower_with_height, BadRelation};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::solver::find_seed_vector;
use crate::system::{LinearForm, MasserSystem, Rhs};
use crate::tower::ExpTower;

/// A tower's chain system with every known obstruction to genericity
/// excluded through extra variables.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericPlan {
    pub system: MasserSystem,
    pub excluded: Vec<BadRelation>,
    /// `d_0 x_1 − d_1 x_0` on the chain, with `d_i` the degrees of the first
    /// two right-hand sides.
    pub degree_form: Option<LinearForm>,
    /// All excluded forms after deduplication, in augmentation order.
    pub forms: Vec<LinearForm>,
}

/// Builds the chain system of `t` and excludes the bad relations found by
/// the enumerators together with the degree form.
pub fn generic_solve_plan(t: &ExpTower) -> Result<GenericPlan> {
    if !t.poly().is_exact() {
        return Err(Error::ModeError);
    }
    let base = MasserSystem::from_tower(t)?;
    let k = t.k();
    if k == 1 {
        return Ok(GenericPlan {
            system: base,
            excluded: Vec::new(),
            degree_form: None,
            forms: Vec::new(),
        });
    }
    let excluded = tower_bad_relations(t, None)?;
    let mut forms: Vec<LinearForm> = Vec::new();
    for b in &excluded {
        push_unique(&mut forms, b.form.primitive());
    }
    let degree_form = degree_form(&base)?;
    if let Some(f) = &degree_form {
        push_unique(&mut forms, f.clone());
    }
    let system = base.augment_exclude_relations(&forms)?;
    Ok(GenericPlan {
        system,
        excluded,
        degree_form,
        forms,
    })
}

/// Every bad relation the enumerators report for `t`: tower tuples for
/// `k ≥ 2`, plus the binomial shapes of `p(x, y_2)` when `p` does not
/// involve `y_1`. Empty for `k = 1`.
pub fn tower_bad_relations(t: &ExpTower, height: Option<u32>) -> Result<Vec<BadRelation>> {
    let k = t.k();
    if k < 2 {
        return Ok(Vec::new());
    }
    let mut out = bad_tuples_tower_with_height(t, height)?;
    if k == 2 && !t.poly().depends_on(1) {
        let p = t.poly().exact().ok_or(Error::ModeError)?.remove_var(1)?;
        if p.depends_on(0) && p.depends_on(1) {
            out.extend(bad_rationals_two_var(&Poly::Exact(p))?);
        }
    }
    Ok(out)
}

fn push_unique(forms: &mut Vec<LinearForm>, f: LinearForm) {
    if !f.is_zero() && !forms.contains(&f) {
        forms.push(f);
    }
}

/// `d_0 x_1 − d_1 x_0` with `d_i` the degree of `f_i`, made primitive;
/// `None` for one equation or when the form vanishes.
pub fn degree_form(s: &MasserSystem) -> Result<Option<LinearForm>> {
    let n = s.n();
    if n < 2 {
        return Ok(None);
    }
    let d0 = rhs_degree(s, 0)?;
    let d1 = rhs_degree(s, 1)?;
    let mut coeffs = vec![BigRational::zero(); n];
    coeffs[0] = -d1;
    coeffs[1] = d0;
    let f = LinearForm::new(coeffs);
    Ok((!f.is_zero()).then(|| f.primitive()))
}

fn rhs_degree(s: &MasserSystem, i: usize) -> Result<BigRational> {
    match &s.rhs()[i] {
        Rhs::Poly(p) => Ok(BigRational::from_integer(BigInt::from(p.total_degree()?))),
        Rhs::Rational { num, den } => Ok(BigRational::from_integer(
            BigInt::from(num.total_degree()?) - BigInt::from(den.total_degree()?),
        )),
        Rhs::Branch(b) => {
            let q = find_seed_vector(s, 3).unwrap_or_else(|_| vec![1; s.n()]);
            let v: Vec<_> = q
                .iter()
                .map(|&x| num_complex::Complex64::new(0.0, x as f64))
                .collect();
            b.estimate_degree(&v).or_else(|_| Ok(BigRational::one()))
        }
    }
}
