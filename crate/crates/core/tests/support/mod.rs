//! Seeded instance generators and fixtures shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use iets_core::poly::{ExactPoly, GaussRat};
use iets_core::system::{MasserSystem, Rhs};
use iets_core::tower::ExpTower;

pub fn int_poly(nvars: usize, terms: &[(&[u32], i64)]) -> ExactPoly {
    ExactPoly::from_int_terms(nvars, terms)
}

pub fn tower(k: usize, terms: &[(&[u32], i64)]) -> ExpTower {
    ExpTower::new(k, int_poly(k + 1, terms).into()).unwrap()
}

pub fn system(rhs: Vec<ExactPoly>) -> MasserSystem {
    MasserSystem::new(rhs.into_iter().map(Rhs::poly).collect()).unwrap()
}

/// The desk-scale polynomial systems used for existence checks, with a
/// short label each.
pub fn existence_systems() -> Vec<(&'static str, MasserSystem)> {
    vec![
        ("e^z = z", system(vec![int_poly(1, &[(&[1], 1)])])),
        ("e^z = z^2 + 1", system(vec![int_poly(1, &[(&[2], 1), (&[0], 1)])])),
        (
            "e^x1 = x2, e^x2 = x1",
            system(vec![int_poly(2, &[(&[0, 1], 1)]), int_poly(2, &[(&[1, 0], 1)])]),
        ),
        (
            "e^x1 = x1 x2 + 1, e^x2 = x1 - x2",
            system(vec![
                int_poly(2, &[(&[1, 1], 1), (&[0, 0], 1)]),
                int_poly(2, &[(&[1, 0], 1), (&[0, 1], -1)]),
            ]),
        ),
        (
            "e^x1 = x2, e^x2 = x3, e^x3 = x1 + x2",
            system(vec![
                int_poly(3, &[(&[0, 1, 0], 1)]),
                int_poly(3, &[(&[0, 0, 1], 1)]),
                int_poly(3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1)]),
            ]),
        ),
    ]
}

pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, terms: usize) -> ExactPoly {
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut e = vec![0u32; nvars];
        let deg = rng.gen_range(0..=max_deg);
        for _ in 0..deg {
            e[rng.gen_range(0..nvars)] += 1;
        }
        let c = rng.gen_range(-4i64..=4);
        out.push((e, GaussRat::from_ratio(c, rng.gen_range(1..=3))));
    }
    ExactPoly::from_terms(nvars, out).unwrap()
}

fn pow_var(nvars: usize, var: usize, e: u32) -> ExactPoly {
    ExactPoly::var(nvars, var).pow(e)
}

/// The relation ideal generators for the normalized tuple `m` on
/// `(x, y_1, …, y_k)`: the linear relation `m_{k−1} y_{k−1} = Σ m_i e_i`
/// and the binomial it induces one level up, negative powers cleared.
pub fn relation_generators(m: &[i64]) -> (ExactPoly, ExactPoly) {
    let k = m.len();
    let nv = k + 1;
    let c = m[k - 1];
    let mut linear = ExactPoly::var(nv, k - 1).scale(&GaussRat::from_ratio(c, 1));
    for (i, &mi) in m[..k - 1].iter().enumerate() {
        linear = linear.sub(&ExactPoly::var(nv, i).scale(&GaussRat::from_ratio(mi, 1)));
    }
    // e_k^c = ∏ e_{i+1}^{m_i}
    let mut lhs = pow_var(nv, k, c as u32);
    let mut rhs = ExactPoly::one(nv);
    for (i, &mi) in m[..k - 1].iter().enumerate() {
        let f = pow_var(nv, i + 1, mi.unsigned_abs() as u32);
        if mi >= 0 {
            rhs = rhs.mul(&f);
        } else {
            lhs = lhs.mul(&f);
        }
    }
    (linear, lhs.sub(&rhs))
}

/// A random exact polynomial in `(x, y_1, …, y_k)`, `k ≥ 2`, of total
/// degree at most 4. Roughly half the instances are planted in the ideal of a random small
/// relation so that both outcomes of the scan get exercised.
pub fn relation_instance<R: Rng>(rng: &mut R, k: usize) -> ExactPoly {
    let nv = k + 1;
    loop {
        let p = if rng.gen_bool(0.5) {
            let m = small_tuple(rng, k);
            let (lin, bin) = relation_generators(&m);
            let db = bin.total_degree().unwrap();
            if db > 4 {
                continue;
            }
            let w1 = random_poly(rng, nv, 2, 2);
            let w2 = random_poly(rng, nv, 4 - db, 2);
            let p = lin.mul(&w1).add(&bin.mul(&w2));
            if p.total_degree().map_or(true, |d| d > 4) {
                continue;
            }
            p
        } else {
            let terms = rng.gen_range(2..=4);
            random_poly(rng, nv, 4, terms)
        };
        if !p.is_zero() && p.depends_on(k) && ExpTower::new(k, p.clone().into()).is_ok_and(|t| t.is_degenerate().is_none()) {
            return p;
        }
    }
}

fn small_tuple<R: Rng>(rng: &mut R, k: usize) -> Vec<i64> {
    loop {
        let mut m: Vec<i64> = (0..k - 1).map(|_| rng.gen_range(-2i64..=2)).collect();
        m.push(rng.gen_range(1i64..=2));
        let g = m.iter().fold(0i64, |g, &v| num_integer::Integer::gcd(&g, &v));
        if g == 1 && m[..k - 1].iter().any(|&v| v != 0) {
            return m;
        }
    }
}

pub const SMALL_PRIMES: [u64; 5] = [2, 3, 5, 7, 11];

fn random_smooth<R: Rng>(rng: &mut R) -> BigRational {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for &p in &SMALL_PRIMES[..4] {
        let e: i32 = rng.gen_range(-2..=2);
        if e > 0 {
            num *= BigInt::from(p).pow(e as u32);
        } else if e < 0 {
            den *= BigInt::from(p).pow((-e) as u32);
        }
    }
    if rng.gen_bool(0.3) {
        num = -num;
    }
    BigRational::new(num, den)
}

/// Two to four nonzero rationals over the primes up to 7. About a third of
/// the tuples end with a planted product of the earlier entries.
pub fn rational_tuple<R: Rng>(rng: &mut R) -> Vec<BigRational> {
    let len = rng.gen_range(2..=4);
    let mut v: Vec<BigRational> = (0..len).map(|_| random_smooth(rng)).collect();
    if rng.gen_bool(0.35) {
        let mut prod = BigRational::from_integer(1.into());
        for c in &v[..len - 1] {
            let e = rng.gen_range(-2i32..=2);
            prod *= c.pow(e);
        }
        if rng.gen_bool(0.5) {
            prod = -prod;
        }
        v[len - 1] = prod;
    }
    if rng.gen_bool(0.05) {
        v[0] = BigRational::from_integer((-1).into());
    }
    v
}

/// Ascending real coefficients of a random polynomial of degree 1..=8 with
/// a nonzero leading coefficient.
pub fn real_poly_coeffs<R: Rng>(rng: &mut R) -> Vec<f64> {
    let deg = rng.gen_range(1..=8);
    let mut c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-3i32..=3) as f64).collect();
    if c[deg] == 0.0 {
        c[deg] = 1.0;
    }
    c
}

/// `±x_var^m + lower` with `lower` of degree below `m` in `var`.
pub fn monic_divisor<R: Rng>(rng: &mut R, nvars: usize) -> (ExactPoly, usize) {
    let var = rng.gen_range(0..nvars);
    let m = rng.gen_range(1u32..=3);
    let lower = random_poly(rng, nvars, 2, 3);
    let lower = ExactPoly::from_terms(
        nvars,
        lower.terms().map(|(mono, c)| {
            let mut e = mono.exps().to_vec();
            e[var] %= m;
            (e, c.clone())
        }),
    )
    .unwrap();
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    (pow_var(nvars, var, m).scale(&GaussRat::from_ratio(sign, 1)).add(&lower), var)
}
