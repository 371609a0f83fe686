//! Exact enumeration of bad rational relations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{Coefficient, ExactPoly, GaussRat, Poly};
use crate::system::LinearForm;
use crate::tower::ExpTower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// Binomial `p(x, y)` forcing `n e^w = m w` for `p(z, e^{e^z})`.
    TwoIter,
    /// Rational `r` with `e^a = r a` compatible with `p(z, e^z, e^{e^z})`.
    TdOne,
    /// Tuple `m̃` with `m_{k−1} e_{k−1}(a) = Σ m_i e_i(a)`.
    ThreeIterTuple,
}

/// A relation among tower values that the polynomial admits, together with
/// the exact divisibility witness.
#[derive(Clone, Debug, PartialEq)]
pub struct BadRelation {
    pub kind: RelationKind,
    /// `(n, m, s)` for [`RelationKind::TwoIter`], `(r)` for
    /// [`RelationKind::TdOne`], `r̃` for [`RelationKind::ThreeIterTuple`].
    pub coeffs: Vec<BigRational>,
    /// Integer data of the relation: `(n, m)` or `(m_0, …, m_{k−1})`.
    pub exponents: Vec<i64>,
    pub witness_divisor: ExactPoly,
    /// The polynomial the witness divides (`p`, `p_r` or `g_r̃`).
    pub specialized: ExactPoly,
    /// The specialized polynomial vanished identically.
    pub identically_zero: bool,
    pub height_bound: u32,
    /// The relation as a linear form on the chain variables
    /// `(z, e_1, …, e_{k−1})`; it vanishes at roots satisfying it.
    pub form: LinearForm,
}

fn exact(p: &Poly) -> Result<&ExactPoly> {
    p.exact().ok_or(Error::ModeError)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Binomial shapes `x^n − s·y^m` and `x^n y^m − r` with `gcd(n, m) = 1`.
pub fn bad_rationals_two_var(p: &Poly) -> Result<Vec<BadRelation>> {
    let p = exact(p)?;
    if p.nvars() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.nvars(),
        });
    }
    if !p.depends_on(0) || !p.depends_on(1) {
        return Err(Error::InvalidInput("p must depend on both x and y".into()));
    }
    let terms: Vec<(Vec<u32>, GaussRat)> = p.terms().map(|(m, c)| (m.exps().to_vec(), c.clone())).collect();
    if terms.len() != 2 {
        return Ok(Vec::new());
    }
    let find = |pred: &dyn Fn(&[u32]) -> bool| terms.iter().find(|(e, _)| pred(e)).cloned();
    let pure_x = find(&|e| e[0] > 0 && e[1] == 0);
    let pure_y = find(&|e| e[0] == 0 && e[1] > 0);
    let mixed = find(&|e| e[0] > 0 && e[1] > 0);
    let constant = find(&|e| e[0] == 0 && e[1] == 0);
    let (lead, other, n, m, negative) = match (pure_x, pure_y, mixed, constant) {
        (Some(x), Some(y), _, _) => {
            let (n, m) = (x.0[0], y.0[1]);
            (x, y, n, m, false)
        }
        (_, _, Some(xy), Some(c)) => {
            let (n, m) = (xy.0[0], xy.0[1]);
            (xy, c, n, m, true)
        }
        _ => return Ok(Vec::new()),
    };
    if u32::gcd(&n, &m) != 1 {
        return Ok(Vec::new());
    }
    let ratio = match (-other.1.clone()).checked_div(&lead.1) {
        Some(r) => r,
        None => return Ok(Vec::new()),
    };
    let s = match ratio.as_rational() {
        Some(s) => s.clone(),
        None => return Ok(Vec::new()),
    };
    let witness = p.scale(&GaussRat::one().checked_div(&lead.1).expect("nonzero lead"));
    let (n, m) = (i64::from(n), i64::from(m));
    // n·e^w = ±m·w read on (x_0, x_1) = (w, e^w), with (n, m) the exponents
    // of x and y in p.
    let form = if negative {
        LinearForm::from_ints(&[n, m])
    } else {
        LinearForm::from_ints(&[-n, m])
    };
    Ok(vec![BadRelation {
        kind: RelationKind::TwoIter,
        coeffs: vec![int(n), int(m), s],
        exponents: vec![n, m],
        witness_divisor: witness,
        specialized: p.clone(),
        identically_zero: false,
        height_bound: p.total_degree()?,
        form: form.primitive(),
    }])
}

/// `g_r̃(x_0, …, x_{k−2}, z) = p(x_0, …, x_{k−2}, r̃·x̃, z)` for the tuple
/// `m = (m_0, …, m_{k−1})`, `r_i = m_i/m_{k−1}`.
pub fn specialize(p: &ExactPoly, m: &[i64]) -> Result<ExactPoly> {
    let k = m.len();
    if p.nvars() != k + 1 {
        return Err(Error::DimensionMismatch {
            expected: k + 1,
            got: p.nvars(),
        });
    }
    let last = m[k - 1];
    let mut subs: Vec<ExactPoly> = (0..k - 1).map(|j| ExactPoly::var(k, j)).collect();
    let mut l = ExactPoly::zero(k);
    for (j, &mj) in m[..k - 1].iter().enumerate() {
        l = l.add(&ExactPoly::var(k, j).scale(&GaussRat::real(rat(mj, last))));
    }
    subs.push(l);
    subs.push(ExactPoly::var(k, k - 1));
    p.compose(&subs)
}

/// `s_m(x̃, z)`: the relation `e_k^{m_{k−1}} = ∏_{i<k−2} e_{i+1}^{m_i} ·
/// e_{k−1}^{m_{k−2}}` with `e_{k−1}` replaced by `r̃·x̃` and negative powers
/// moved to the `z` side. Requires `m_{k−1} > 0`.
pub fn relation_divisor(m: &[i64]) -> ExactPoly {
    let k = m.len();
    let last = m[k - 1];
    assert!(last > 0, "normalize m_(k-1) > 0 first");
    let mut l = ExactPoly::zero(k);
    for (j, &mj) in m[..k - 1].iter().enumerate() {
        l = l.add(&ExactPoly::var(k, j).scale(&GaussRat::real(rat(mj, last))));
    }
    let mut lhs = ExactPoly::var(k, k - 1).pow(last as u32);
    let mut rhs = ExactPoly::one(k);
    for (i, &mi) in m[..k - 1].iter().enumerate() {
        if mi == 0 {
            continue;
        }
        let factor = if i + 2 < k { ExactPoly::var(k, i + 1) } else { l.clone() };
        let power = factor.pow(mi.unsigned_abs() as u32);
        if mi > 0 {
            rhs = rhs.mul(&power);
        } else {
            lhs = lhs.mul(&power);
        }
    }
    lhs.sub(&rhs)
}

/// Normalized relation tuples of height at most `h`: `m_{k−1} ∈ 1..=h`,
/// other entries in `−h..=h` not all zero, `gcd = 1`; lexicographic order.
pub fn relation_tuples(k: usize, h: u32) -> Vec<Vec<i64>> {
    let h = i64::from(h);
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..k - 1 {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (-h..=h).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    let mut full = Vec::new();
    for prefix in out {
        if prefix.iter().all(|&v| v == 0) {
            continue;
        }
        for last in 1..=h {
            let mut t = prefix.clone();
            t.push(last);
            if gcd_all(&t) == 1 {
                full.push(t);
            }
        }
    }
    full.sort();
    full
}

fn tuple_form(m: &[i64]) -> LinearForm {
    let k = m.len();
    let mut c: Vec<i64> = m[..k - 1].iter().map(|v| -v).collect();
    c.push(m[k - 1]);
    LinearForm::from_ints(&c).primitive()
}

fn scan(p: &ExactPoly, k: usize, h: u32) -> Result<Vec<(Vec<i64>, ExactPoly, ExactPoly, bool)>> {
    let tuples = relation_tuples(k, h);
    let hits: Vec<Result<Option<(Vec<i64>, ExactPoly, ExactPoly, bool)>>> = tuples
        .par_iter()
        .map(|m| {
            let g = specialize(p, m)?;
            let s = relation_divisor(m);
            if g.is_zero() {
                return Ok(Some((m.clone(), s, g, true)));
            }
            Ok(g.divide_exact(&s)?.map(|_| (m.clone(), s, g, false)))
        })
        .collect();
    let mut out = Vec::new();
    for r in hits {
        if let Some(hit) = r? {
            out.push(hit);
        }
    }
    Ok(out)
}

/// Rationals `r = n/m` (`max(|n|, m) ≤ deg p`) for which `p(x, rx, z)`
/// vanishes or is divisible by `z^m − r^n x^n` (`n > 0`) or
/// `z^m x^{|n|} − r^n` (`n < 0`).
pub fn bad_rationals_three_var(p: &Poly) -> Result<Vec<BadRelation>> {
    bad_rationals_three_var_with_height(p, None)
}

pub fn bad_rationals_three_var_with_height(p: &Poly, height: Option<u32>) -> Result<Vec<BadRelation>> {
    let p = exact(p)?;
    if p.nvars() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.nvars(),
        });
    }
    let h = match height {
        Some(h) => h,
        None => p.total_degree()?,
    };
    Ok(scan(p, 2, h)?
        .into_iter()
        .map(|(m, s, g, zero)| BadRelation {
            kind: RelationKind::TdOne,
            coeffs: vec![rat(m[0], m[1])],
            form: tuple_form(&m),
            exponents: m,
            witness_divisor: s,
            specialized: g,
            identically_zero: zero,
            height_bound: h,
        })
        .collect())
}

/// Tuples `(m_0, …, m_{k−1})` of height at most `deg p` for which `g_r̃`
/// vanishes or is divisible by `s_m`.
pub fn bad_tuples_tower(t: &ExpTower) -> Result<Vec<BadRelation>> {
    bad_tuples_tower_with_height(t, None)
}

pub fn bad_tuples_tower_with_height(t: &ExpTower, height: Option<u32>) -> Result<Vec<BadRelation>> {
    let p = exact(t.poly())?;
    let k = t.k();
    if k < 2 {
        return Err(Error::NotApplicable("bad tuples need k >= 2".into()));
    }
    let h = match height {
        Some(h) => h,
        None => p.total_degree()?,
    };
    Ok(scan(p, k, h)?
        .into_iter()
        .map(|(m, s, g, zero)| {
            let last = m[k - 1];
            BadRelation {
                kind: RelationKind::ThreeIterTuple,
                coeffs: m[..k - 1].iter().map(|&v| rat(v, last)).collect(),
                form: tuple_form(&m),
                exponents: m,
                witness_divisor: s,
                specialized: g,
                identically_zero: zero,
                height_bound: h,
            }
        })
        .collect())
}

/// Verdict of the multiplicative-independence test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeVerdict {
    pub independent: bool,
    /// `m̄ ≠ 0` with `∏ c_i^{m_i} = 1`, present exactly when dependent.
    pub relation: Option<Vec<i64>>,
}

/// Splits the list into a pairwise coprime basis (factor refinement), so
/// every input is a product of powers of basis elements.
fn coprime_basis(values: &[BigInt]) -> Vec<BigInt> {
    let mut basis: Vec<BigInt> = values.iter().filter(|v| **v > BigInt::one()).cloned().collect();
    basis.sort();
    basis.dedup();
    loop {
        let mut split = None;
        'outer: for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let g = basis[i].gcd(&basis[j]);
                if g > BigInt::one() {
                    split = Some((i, j, g));
                    break 'outer;
                }
            }
        }
        let Some((i, j, g)) = split else { break };
        let a = &basis[i] / &g;
        let b = &basis[j] / &g;
        basis.remove(j);
        basis.remove(i);
        for v in [g, a, b] {
            if v > BigInt::one() {
                basis.push(v);
            }
        }
        basis.sort();
        basis.dedup();
    }
    basis
}

fn valuation(mut v: BigInt, b: &BigInt) -> i64 {
    let mut e = 0;
    while (&v % b).is_zero() {
        v /= b;
        e += 1;
    }
    e
}

/// Integer kernel vector of the rows (dependency `Σ m_i row_i = 0`), by
/// exact elimination; `None` when the rows are independent.
pub(crate) fn row_dependency(rows: &[Vec<BigRational>]) -> Option<Vec<BigInt>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    // Solve Σ m_i rows[i][c] = 0: columns of the system are the rows.
    let mut a: Vec<Vec<BigRational>> = (0..cols).map(|c| (0..n).map(|i| rows[i][c].clone()).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, pr);
        let inv = BigRational::one() / a[r][col].clone();
        for v in a[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for c in 0..n {
                    let d = &a[r][c] * &f;
                    a[i][c] = &a[i][c] - d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free = (0..n).find(|c| !pivots.contains(c))?;
    let mut m = vec![BigRational::zero(); n];
    m[free] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        m[pc] = -a[row][free].clone();
    }
    let lcm = m.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = m.iter().map(|v| (v * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let sign = if ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    Some(ints.into_iter().map(|v| v / &g * &sign).collect())
}

/// Decides whether nonzero rationals are multiplicatively independent
/// through the exponent matrix over a coprime basis; the sign is handled
/// separately since `−1` is torsion.
pub fn multiplicative_independence_check(constants: &[BigRational]) -> Result<MultiplicativeVerdict> {
    if constants.iter().any(Zero::is_zero) {
        return Err(Error::InvalidInput("constants must be nonzero".into()));
    }
    let mut pool = Vec::new();
    for c in constants {
        pool.push(c.numer().abs());
        pool.push(c.denom().clone());
    }
    let basis = coprime_basis(&pool);
    let rows: Vec<Vec<BigRational>> = constants
        .iter()
        .map(|c| {
            basis
                .iter()
                .map(|b| BigRational::from_integer((valuation(c.numer().abs(), b) - valuation(c.denom().clone(), b)).into()))
                .collect()
        })
        .collect();
    let rows = if basis.is_empty() {
        constants.iter().map(|_| Vec::new()).collect()
    } else {
        rows
    };
    let Some(m) = row_dependency(&rows) else {
        return Ok(MultiplicativeVerdict {
            independent: true,
            relation: None,
        });
    };
    let odd = constants
        .iter()
        .zip(&m)
        .filter(|(c, mi)| c.is_negative() && mi.is_odd())
        .count()
        % 2
        == 1;
    let factor = if odd { 2 } else { 1 };
    let m = m
        .iter()
        .map(|v| v.to_i64().map(|x| x * factor))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Unsupported("relation exponents exceed 64 bits".into()))?;
    Ok(MultiplicativeVerdict {
        independent: false,
        relation: Some(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(nvars: usize, terms: &[(&[u32], i64)]) -> Poly {
        Poly::Exact(ExactPoly::from_int_terms(nvars, terms))
    }

    fn rats(v: &[(i64, i64)]) -> Vec<BigRational> {
        v.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn binomial_two_var() {
        let r = bad_rationals_two_var(&ex(2, &[(&[2, 0], 1), (&[0, 3], -3)])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].kind, RelationKind::TwoIter);
        assert_eq!(r[0].coeffs, vec![int(2), int(3), int(3)]);
        assert_eq!(r[0].form, LinearForm::from_ints(&[2, -3]));
        assert!(bad_rationals_two_var(&ex(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 1)]))
            .unwrap()
            .is_empty());
        // gcd(2, 4) = 2
        assert!(bad_rationals_two_var(&ex(2, &[(&[2, 0], 1), (&[0, 4], -1)])).unwrap().is_empty());
        let mixed = bad_rationals_two_var(&ex(2, &[(&[1, 2], 2), (&[0, 0], -6)])).unwrap();
        assert_eq!(mixed[0].coeffs[2], int(3));
        assert_eq!(mixed[0].form, LinearForm::from_ints(&[1, 2]));
        let float = Poly::Float(ExactPoly::from_int_terms(2, &[(&[1, 0], 1)]).to_float());
        assert_eq!(bad_rationals_two_var(&float), Err(Error::ModeError));
    }

    #[test]
    fn three_var_examples() {
        // p = z - y: p_r = z - r x, only r = 1 gives a divisor
        let r = bad_rationals_three_var(&ex(3, &[(&[0, 0, 1], 1), (&[0, 1, 0], -1)])).unwrap();
        assert_eq!(r.iter().map(|b| b.coeffs[0].clone()).collect::<Vec<_>>(), vec![int(1)]);
        // p = z - x^2: never divisible
        assert!(bad_rationals_three_var(&ex(3, &[(&[0, 0, 1], 1), (&[2, 0, 0], -1)]))
            .unwrap()
            .is_empty());
        // p = (y - 2x) z vanishes at r = 2
        let p = ex(3, &[(&[0, 1, 1], 1), (&[1, 0, 1], -2)]);
        let r = bad_rationals_three_var(&p).unwrap();
        let two = r.iter().find(|b| b.coeffs[0] == int(2)).expect("r = 2 reported");
        assert!(two.identically_zero);
    }

    #[test]
    fn tower_tuples() {
        let t = |k: usize, terms: &[(&[u32], i64)]| ExpTower::new(k, ex(k + 1, terms)).unwrap();
        // e^{e^z} = z: fixed points of exp satisfy e_1 = e_0
        let r = bad_tuples_tower(&t(2, &[(&[0, 0, 1], 1), (&[1, 0, 0], -1)])).unwrap();
        assert_eq!(r.iter().map(|b| b.exponents.clone()).collect::<Vec<_>>(), vec![vec![1, 1]]);
        assert_eq!(r[0].form, LinearForm::from_ints(&[1, -1]));
        let r = bad_tuples_tower(&t(2, &[(&[0, 0, 1], 1), (&[0, 1, 0], -1)])).unwrap();
        assert_eq!(r.iter().map(|b| b.exponents.clone()).collect::<Vec<_>>(), vec![vec![1, 1]]);
        assert!(bad_tuples_tower(&t(3, &[(&[0, 0, 0, 1], 1), (&[1, 0, 0, 0], -1)]))
            .unwrap()
            .is_empty());
        assert!(matches!(
            bad_tuples_tower(&t(1, &[(&[0, 1], 1), (&[1, 0], -1)])),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn tuple_scan_is_bounded() {
        for k in 2..=3 {
            for h in 1..=3u32 {
                let n = relation_tuples(k, h).len();
                assert!(n <= (2 * h as usize + 1).pow(k as u32));
            }
        }
    }

    #[test]
    fn divisor_shapes() {
        // m = (2, 3): z^3 - (2/3 x)^2
        let s = relation_divisor(&[2, 3]);
        let expect = ExactPoly::var(2, 1)
            .pow(3)
            .sub(&ExactPoly::var(2, 0).pow(2).scale(&GaussRat::from_ratio(4, 9)));
        assert_eq!(s, expect);
        // m = (-1, 1): e_2·e_1 = 1 with e_1 = -x, so s = -x z - 1
        let s = relation_divisor(&[-1, 1]);
        assert_eq!(s, ex(2, &[(&[1, 1], -1), (&[0, 0], -1)]).exact().unwrap().clone());
    }

    #[test]
    fn multiplicative_examples() {
        let v = multiplicative_independence_check(&rats(&[(2, 1), (3, 1)])).unwrap();
        assert!(v.independent && v.relation.is_none());
        let v = multiplicative_independence_check(&rats(&[(2, 1), (4, 1)])).unwrap();
        assert_eq!(v.relation, Some(vec![2, -1]));
        assert!(multiplicative_independence_check(&rats(&[(6, 1), (10, 1), (15, 1)])).unwrap().independent);
        let v = multiplicative_independence_check(&rats(&[(-1, 1)])).unwrap();
        assert_eq!(v.relation, Some(vec![2]));
        let v = multiplicative_independence_check(&rats(&[(-2, 1), (1, 2)])).unwrap();
        assert_eq!(v.relation, Some(vec![2, 2]));
        assert!(multiplicative_independence_check(&rats(&[(0, 1)])).is_err());
    }
}
