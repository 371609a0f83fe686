//! Numerical integer-relation search by lattice reduction. A relation that
//! is not found is evidence of genericity, never a proof of it.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::solver::RootRecord;
use crate::system::MasserSystem;
use crate::tower::ExpTower;
use crate::verify::hp::{HpComplex, HpContext};
use crate::verify::recheck::polish;

/// Default height bound for relation searches.
pub const DEFAULT_HEIGHT: u64 = 10;
/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 30;

/// Tower values beyond `e^{2^20}` are not expanded at high precision.
const MAX_REAL_PART: f64 = 1_048_576.0;

/// Outcome of the integer-relation search.
#[derive(Clone, Debug, PartialEq)]
pub enum RelationVerdict {
    NoneFound,
    Candidate { m: Vec<i64>, residual: f64 },
}

impl RelationVerdict {
    pub fn is_none_found(&self) -> bool {
        matches!(self, RelationVerdict::NoneFound)
    }
}

/// Integer relations found (or not) among a root's tower values.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationDiagnostic {
    /// Values tested, rounded to double precision.
    pub vector: Vec<Complex64>,
    pub height_bound: u64,
    pub digits: u32,
    pub verdict: RelationVerdict,
    /// Multiplicative relation among the exponentials, when one was found.
    pub multiplicative: Option<Vec<i64>>,
    /// Some tower value could not be represented at the requested precision.
    pub partial: bool,
}

/// Looks for `m ∈ Z^n`, `0 < ‖m‖_∞ ≤ h`, with `Σ m_j v_j ≈ 0` at `digits`
/// decimal digits. The inputs are taken as exact.
pub fn find_integer_relation(values: &[Complex64], h: u64, digits: u32) -> RelationVerdict {
    let ctx = HpContext::with_digits(digits);
    let v: Vec<HpComplex> = values.iter().map(|z| ctx.complex(*z)).collect();
    find_integer_relation_hp(&ctx, &v, h, digits)
}

/// Relation search on high-precision values.
///
/// Rows of the lattice are `(e_j, ⌊C·Re v_j⌉, ⌊C·Im v_j⌉)` with the values
/// normalized to unit size and `C = 10^{3·digits/4}`. A reduced vector (or
/// a short combination of reduced vectors) is accepted when its integer
/// part has height at most `h` and `|m·v| < 10^{−digits/2}·‖m‖·‖v‖`.
pub fn find_integer_relation_hp(ctx: &HpContext, values: &[HpComplex], h: u64, digits: u32) -> RelationVerdict {
    let n = values.len();
    if n == 0 || h == 0 {
        return RelationVerdict::NoneFound;
    }
    let norms: Vec<f64> = values.iter().map(|v| ctx.cnorm_f64(v)).collect();
    let vnorm = norms.iter().map(|x| x * x).sum::<f64>().sqrt();
    if vnorm == 0.0 {
        let mut m = vec![0i64; n];
        m[0] = 1;
        return RelationVerdict::Candidate { m, residual: 0.0 };
    }
    let big = ctx.f64(norms.iter().copied().fold(0.0, f64::max));
    let scale = BigInt::from(10).pow(3 * digits / 4);
    let bits = ctx.bits() as usize;
    let to_int = |x: &crate::verify::hp::HpReal| -> BigInt {
        let y = ctx.div(x, &big).expect("nonzero scale");
        let prod = y.mantissa() * &scale;
        (prod + (BigInt::from(1) << (bits - 1))) >> bits
    };
    let mut basis: Vec<Vec<BigInt>> = values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let mut row = vec![BigInt::zero(); n + 2];
            row[j] = BigInt::from(1);
            row[n] = to_int(&v.re);
            row[n + 1] = to_int(&v.im);
            row
        })
        .collect();
    lll(&mut basis);

    let tol = 10f64.powf(-f64::from(digits) / 2.0) * vnorm;
    let accept = |m: &[i64]| -> Option<f64> {
        if m.iter().all(|&x| x == 0) || m.iter().any(|x| x.unsigned_abs() > h) {
            return None;
        }
        let mut acc = ctx.czero();
        for (mj, v) in m.iter().zip(values) {
            acc = ctx.cadd(&acc, &ctx.cscale(v, *mj));
        }
        let r = ctx.cnorm_f64(&acc);
        let mnorm = m.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
        (r < tol * mnorm).then_some(r)
    };
    let reduced: Vec<Vec<i64>> = basis
        .iter()
        .filter_map(|row| row[..n].iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect();
    let mut best: Option<(i64, f64, Vec<i64>)> = None;
    let mut consider = |m: Vec<i64>| {
        if let Some(r) = accept(&m) {
            let m = normalize_sign(m);
            let key = m.iter().map(|x| x * x).sum::<i64>();
            if best.as_ref().is_none_or(|b| (key, r) < (b.0, b.1)) {
                best = Some((key, r, m));
            }
        }
    };
    for m in &reduced {
        consider(m.clone());
    }
    // Short combinations of the three shortest reduced vectors. Rows with
    // huge entries cannot combine into a small relation and would overflow.
    let few: Vec<&Vec<i64>> = reduced
        .iter()
        .filter(|m| m.iter().all(|x| x.unsigned_abs() <= 1 << 32))
        .take(3)
        .collect();
    let range = [-2i64, -1, 0, 1, 2];
    for &a in &range {
        for &b in &range {
            for &c in &range {
                let coeffs = [a, b, c];
                let mut m = vec![0i64; n];
                for (cf, row) in coeffs.iter().zip(&few) {
                    for (mj, rj) in m.iter_mut().zip(row.iter()) {
                        *mj += cf * rj;
                    }
                }
                consider(m);
            }
        }
    }
    match best {
        Some((_, residual, m)) => RelationVerdict::Candidate { m, residual },
        None => RelationVerdict::NoneFound,
    }
}

fn normalize_sign(mut m: Vec<i64>) -> Vec<i64> {
    if m.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        m.iter_mut().for_each(|x| *x = -*x);
    }
    m
}

/// LLL reduction with `δ = 3/4` and exact rational Gram–Schmidt data.
pub(crate) fn lll(b: &mut [Vec<BigInt>]) {
    let n = b.len();
    if n < 2 {
        return;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let (mut mu, mut norms) = gram_schmidt(b);
    let mut k = 1;
    let mut guard = 0usize;
    while k < n && guard < 100_000 {
        guard += 1;
        for j in (0..k).rev() {
            let q = mu[k][j].round().to_integer();
            if !q.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = BigRational::from_integer(q);
                for l in 0..j {
                    let d = &qr * &mu[j][l];
                    mu[k][l] -= d;
                }
                mu[k][j] -= &qr;
            }
        }
        let lovasz = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if norms[k] >= lovasz {
            k += 1;
        } else {
            b.swap(k, k - 1);
            let (m2, n2) = gram_schmidt(b);
            mu = m2;
            norms = n2;
            k = (k - 1).max(1);
        }
    }
}

type GsData = (Vec<Vec<BigRational>>, Vec<BigRational>);

fn gram_schmidt(b: &[Vec<BigInt>]) -> GsData {
    let n = b.len();
    let rows: Vec<Vec<BigRational>> = b
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let dot = |x: &[BigRational], y: &[BigRational]| -> BigRational {
        x.iter().zip(y).fold(BigRational::zero(), |acc, (a, c)| acc + a * c)
    };
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            if norms[j] == BigRational::zero() {
                continue;
            }
            let m = dot(&rows[i], &star[j]) / &norms[j];
            for (vi, sj) in v.iter_mut().zip(&star[j]) {
                *vi -= &m * sj;
            }
            mu[i][j] = m;
        }
        norms.push(dot(&v, &v));
        star.push(v);
    }
    (mu, norms)
}

/// Relation search on `(a, e_1(a), …, e_{k−1}(a))` for a root of a tower,
/// plus a multiplicative test on `(e_1(a), …, e_k(a))` through the logs
/// `(a, …, e_{k−1}(a), 2πi)`.
///
/// `e_k(a)` itself is left out of the linear test: it is an algebraic
/// function of the others through `p = 0`, and for shapes like `y_k − x`
/// it equals `a` identically.
pub fn diagnose_relations(root: &RootRecord, tower: &ExpTower, h: u64, digits: u32) -> Result<RelationDiagnostic> {
    let k = tower.k();
    if root.local.len() < k || root.seed.q.len() < k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: root.local.len(),
        });
    }
    let ctx = HpContext::with_digits(digits + 20);
    let lattice = ctx.two_pi_i(root.seed.q[0]);
    let start = ctx.cadd(
        &HpComplex {
            re: lattice.re,
            im: ctx.mul_int(&lattice.im, root.seed.t as i64),
        },
        &ctx.complex(root.local[0]),
    );
    let (a, partial) = polish_tower_root(&ctx, tower, start);
    let mut chain = vec![a];
    let mut partial = partial;
    for _ in 1..=k {
        let prev = chain.last().expect("nonempty");
        if ctx.to_f64(&prev.re) > MAX_REAL_PART {
            partial = true;
            break;
        }
        chain.push(ctx.cexp(prev));
    }
    let lambda: Vec<HpComplex> = chain.iter().take(k).cloned().collect();
    let vector: Vec<Complex64> = lambda.iter().map(|v| ctx.to_c64(v)).collect();
    let verdict = find_integer_relation_hp(&ctx, &lambda, h, digits);
    let mut logs = lambda.clone();
    logs.push(ctx.two_pi_i(1));
    let multiplicative = match find_integer_relation_hp(&ctx, &logs, h, digits) {
        RelationVerdict::Candidate { m, .. } if m[..k].iter().any(|&x| x != 0) => Some(m[..k].to_vec()),
        _ => None,
    };
    Ok(RelationDiagnostic {
        vector,
        height_bound: h,
        digits,
        verdict,
        multiplicative,
        partial,
    })
}

/// Relation search on the coordinates of a root of a Masser system, after
/// polishing it at high precision, plus the multiplicative test on
/// `(e^{x_1}, …, e^{x_n})`.
pub fn diagnose_system_root(root: &RootRecord, s: &MasserSystem, h: u64, digits: u32) -> Result<RelationDiagnostic> {
    let ctx = HpContext::with_digits(digits + 20);
    let p = polish(&ctx, root, s, 10f64.powi(-(digits as i32) - 10))?;
    let n = p.x.len();
    let verdict = find_integer_relation_hp(&ctx, &p.x, h, digits);
    let mut logs = p.x.clone();
    logs.push(ctx.two_pi_i(1));
    let multiplicative = match find_integer_relation_hp(&ctx, &logs, h, digits) {
        RelationVerdict::Candidate { m, .. } if m[..n].iter().any(|&x| x != 0) => Some(m[..n].to_vec()),
        _ => None,
    };
    Ok(RelationDiagnostic {
        vector: p.x.iter().map(|v| ctx.to_c64(v)).collect(),
        height_bound: h,
        digits,
        verdict,
        multiplicative,
        partial: !p.accepted,
    })
}

/// Newton on `f(z) = p(z, e_1(z), …, e_k(z))` at working precision.
fn polish_tower_root(ctx: &HpContext, tower: &ExpTower, mut z: HpComplex) -> (HpComplex, bool) {
    let k = tower.k();
    let p = tower.poly();
    let partials: Vec<_> = match (0..=k).map(|v| p.partial_derivative(v)).collect::<Result<Vec<_>>>() {
        Ok(d) => d,
        Err(_) => return (z, true),
    };
    let tiny = 2f64.powi(-(ctx.bits() as i32) + 40);
    for _ in 0..60 {
        let mut vals = vec![z.clone()];
        let mut ders = vec![ctx.cone()];
        for j in 1..=k {
            if ctx.to_f64(&vals[j - 1].re) > MAX_REAL_PART {
                return (z, true);
            }
            let e = ctx.cexp(&vals[j - 1]);
            ders.push(ctx.cmul(&e, &ders[j - 1]));
            vals.push(e);
        }
        let f = ctx.eval_poly(p, &vals);
        let mut df = ctx.czero();
        for (dp, d) in partials.iter().zip(&ders) {
            if !dp.is_zero() {
                df = ctx.cadd(&df, &ctx.cmul(&ctx.eval_poly(dp, &vals), d));
            }
        }
        let Some(step) = ctx.cdiv(&f, &df) else { return (z, false) };
        z = ctx.csub(&z, &step);
        if ctx.cnorm_f64(&step) <= tiny * (1.0 + ctx.cnorm_f64(&z)) {
            break;
        }
    }
    (z, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn small_integer_relation() {
        let v = find_integer_relation(&[c(1.0), c(2.0), c(3.0)], 4, 30);
        assert_eq!(
            v,
            RelationVerdict::Candidate {
                m: vec![1, 1, -1],
                residual: 0.0
            }
        );
    }

    #[test]
    fn sqrt2_and_pi_have_no_small_relation() {
        let ctx = HpContext::with_digits(30);
        let v = vec![ctx.cone(), {
            let two = ctx.int(2);
            HpComplex {
                re: ctx.sqrt(&two),
                im: ctx.zero(),
            }
        }, HpComplex {
            re: ctx.pi(),
            im: ctx.zero(),
        }];
        assert!(find_integer_relation_hp(&ctx, &v, 10, 30).is_none_found());
        let f = find_integer_relation(&[c(1.0), c(2f64.sqrt()), c(std::f64::consts::PI)], 10, 30);
        assert!(f.is_none_found());
    }

    #[test]
    fn complex_relation_uses_both_parts() {
        // (1+i)·2 − (2+2i) = 0 but no relation holds on real parts alone
        // with the third entry.
        let v = [Complex64::new(1.0, 1.0), Complex64::new(2.0, 2.0), Complex64::new(0.5, -3.0)];
        match find_integer_relation(&v, 5, 30) {
            RelationVerdict::Candidate { m, .. } => assert_eq!(m, vec![2, -1, 0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lll_reduces_a_skewed_basis() {
        let mut b = vec![
            vec![BigInt::from(1), BigInt::from(0), BigInt::from(100_001)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(100_000)],
        ];
        lll(&mut b);
        assert_eq!(b[0][2].abs(), BigInt::from(1));
    }
}
