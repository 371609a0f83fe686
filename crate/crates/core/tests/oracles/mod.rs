//! Independent reference computations for the integration tests. Nothing
//! here calls into the enumerators, the division code or the root finders it
//! is compared against.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use iets_core::poly::ExactPoly;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Laurent polynomial in two variables over Q.
#[derive(Clone, Debug, Default, PartialEq)]
struct Laurent(BTreeMap<(i64, i64), BigRational>);

impl Laurent {
    fn constant(c: BigRational) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((0, 0), c);
        }
        Laurent(m)
    }

    fn monomial(c: BigRational, a: i64, b: i64) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((a, b), c);
        }
        Laurent(m)
    }

    fn add(&self, o: &Self) -> Self {
        let mut m = self.0.clone();
        for (k, v) in &o.0 {
            let e = m.entry(*k).or_insert_with(BigRational::zero);
            *e += v;
            if e.is_zero() {
                m.remove(k);
            }
        }
        Laurent(m)
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = Laurent::default();
        for (ka, va) in &self.0 {
            for (kb, vb) in &o.0 {
                out = out.add(&Laurent::monomial(va * vb, ka.0 + kb.0, ka.1 + kb.1));
            }
        }
        out
    }

    fn pow(&self, e: u32) -> Self {
        (0..e).fold(Laurent::constant(BigRational::one()), |acc, _| acc.mul(self))
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// Substitutes Laurent polynomials for the variables of `p`; returns the real
/// and imaginary coefficient parts separately.
fn substitute(p: &ExactPoly, subs: &[Laurent]) -> (Laurent, Laurent) {
    let mut re = Laurent::default();
    let mut im = Laurent::default();
    for (m, c) in p.terms() {
        let mut term = Laurent::constant(BigRational::one());
        for (v, &e) in m.exps().iter().enumerate() {
            term = term.mul(&subs[v].pow(e));
        }
        re = re.add(&term.mul(&Laurent::constant(c.re.clone())));
        im = im.add(&term.mul(&Laurent::constant(c.im.clone())));
    }
    (re, im)
}

/// Normalized tuples of height at most `h` whose relation is compatible with
/// `p(x, y_1, …, y_k)`, found by scanning the whole box `[−h, h]^k` and
/// testing whether `p` vanishes along a monomial parametrization of the
/// relation's binomial variety. Primitive exponent vectors make that variety
/// irreducible, so vanishing there is the same as divisibility. `k ∈ {2, 3}`.
pub fn bad_tuples_scan(p: &ExactPoly, k: usize, h: u32) -> BTreeSet<Vec<i64>> {
    assert!(k == 2 || k == 3, "scan oracle covers k = 2, 3");
    assert_eq!(p.nvars(), k + 1);
    let h = i64::from(h);
    let mut seen = BTreeSet::new();
    let mut hits = BTreeSet::new();
    let mut raw = vec![-h; k];
    loop {
        let last = raw[k - 1];
        if last != 0 && raw[..k - 1].iter().any(|&v| v != 0) {
            let g = raw.iter().fold(0i64, |g, &v| g.gcd(&v));
            let sign = last.signum();
            let m: Vec<i64> = raw.iter().map(|v| sign * v / g).collect();
            if seen.insert(m.clone()) && vanishes_on_relation(p, &m) {
                hits.insert(m);
            }
        }
        let mut i = 0;
        while i < k {
            raw[i] += 1;
            if raw[i] <= h {
                break;
            }
            raw[i] = -h;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    hits
}

fn var(a: i64, b: i64) -> Laurent {
    Laurent::monomial(BigRational::one(), a, b)
}

fn vanishes_on_relation(p: &ExactPoly, m: &[i64]) -> bool {
    let subs: Vec<Laurent> = if m.len() == 2 {
        // r x = τ^b, y_1 = r x, y_2 = τ^a
        let (a, b) = (m[0], m[1]);
        let r = q(a, b);
        vec![
            var(b, 0).mul(&Laurent::constant(r.recip())),
            var(b, 0),
            var(a, 0),
        ]
    } else {
        // y_2 = r_0 x + r_1 y_1 and y_3^c = y_1^a y_2^b
        let (a, b, c) = (m[0], m[1], m[2]);
        let (r0, r1) = (q(a, c), q(b, c));
        if a != 0 {
            let y1 = var(c, 0);
            let l = var(0, c);
            let x = l
                .add(&y1.mul(&Laurent::constant(-r1)))
                .mul(&Laurent::constant(r0.recip()));
            vec![x, y1, l, var(a, b)]
        } else {
            let l = var(c, 0);
            vec![var(0, 1), l.mul(&Laurent::constant(r1.recip())), l, var(b, 0)]
        }
    };
    let (re, im) = substitute(p, &subs);
    re.is_zero() && im.is_zero()
}

fn factor_small(mut n: BigInt, primes: &[u64], row: &mut [i64], sign: i64) -> bool {
    for (j, &p) in primes.iter().enumerate() {
        let p = BigInt::from(p);
        while (&n % &p).is_zero() {
            n /= &p;
            row[j] += sign;
        }
    }
    n.is_one()
}

/// Multiplicative independence of nonzero rationals through the rank of
/// their prime-exponent matrix. Signs are torsion and do not matter. Every
/// numerator and denominator must factor over `primes`.
pub fn independent_by_rank(consts: &[BigRational], primes: &[u64]) -> bool {
    let rows: Vec<Vec<i64>> = consts
        .iter()
        .map(|c| {
            assert!(!c.is_zero());
            let mut row = vec![0i64; primes.len()];
            assert!(factor_small(c.numer().abs(), primes, &mut row, 1), "numerator outside the prime set");
            assert!(factor_small(c.denom().abs(), primes, &mut row, -1), "denominator outside the prime set");
            row
        })
        .collect();
    rational_rank(&rows) == consts.len()
}

/// Rank by Gaussian elimination over Q.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in 0..a.len() {
            if i != rank && !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for j in c..cols {
                    let d = &f * &a[rank][j];
                    a[i][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `∏ c_i^{m_i}` evaluated exactly.
pub fn power_product(consts: &[BigRational], m: &[i64]) -> BigRational {
    consts.iter().zip(m).fold(BigRational::one(), |acc, (c, &e)| {
        let p = num_traits::pow(c.clone(), e.unsigned_abs() as usize);
        if e < 0 {
            acc / p
        } else {
            acc * p
        }
    })
}

/// Roots of `Σ c_j z^j` (ascending, nonzero leading coefficient) as
/// eigenvalues of the companion matrix.
pub fn companion_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    assert!(lead != 0.0 && n >= 1);
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Zeros of `z − e^z` on the branch `z = log z + 2πik`, by fixed-point
/// iteration (a contraction wherever `|z| > 1`).
pub fn exp_identity_root(k: i64) -> Complex64 {
    let shift = Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64);
    let mut z = Complex64::new(1.0, 1.0) + shift;
    for _ in 0..500 {
        let next = z.ln() + shift;
        if (next - z).norm() < 1e-15 * (1.0 + z.norm()) {
            return next;
        }
        z = next;
    }
    z
}

/// Gaussian-rational value of an exact polynomial at a Gaussian-rational
/// point, by direct expansion.
pub fn exact_value(p: &ExactPoly, point: &[(BigRational, BigRational)]) -> (BigRational, BigRational) {
    let mul = |a: &(BigRational, BigRational), b: &(BigRational, BigRational)| {
        (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0)
    };
    let mut acc = (BigRational::zero(), BigRational::zero());
    for (m, c) in p.terms() {
        let mut term = (c.re.clone(), c.im.clone());
        for (v, &e) in m.exps().iter().enumerate() {
            for _ in 0..e {
                term = mul(&term, &point[v]);
            }
        }
        acc = (acc.0 + term.0, acc.1 + term.1);
    }
    acc
}
