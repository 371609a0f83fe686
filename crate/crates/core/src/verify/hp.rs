//! Binary fixed-point arithmetic on big integers: a value is `m·2^{−bits}`
//! with one shared `bits` per [`HpContext`].

use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::{Coefficient, GaussRat, MultiPoly, Poly};

const GUARD_BITS: u32 = 64;

/// Working precision with cached constants.
#[derive(Clone, Debug)]
pub struct HpContext {
    bits: u32,
    pi: BigInt,
    ln2: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpReal {
    m: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpComplex {
    pub re: HpReal,
    pub im: HpReal,
}

fn shift(v: &BigInt, by: i64) -> BigInt {
    match by.cmp(&0) {
        Ordering::Greater => v << (by as usize),
        Ordering::Less => v >> ((-by) as usize),
        Ordering::Equal => v.clone(),
    }
}

impl HpContext {
    /// Precision of about `digits` decimal digits plus guard bits.
    pub fn with_digits(digits: u32) -> Self {
        Self::with_bits((f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS)
    }

    pub fn with_bits(bits: u32) -> Self {
        let work = bits + 32;
        let one = BigInt::one() << work as usize;
        let atan_inv = |x: u64| {
            let x2 = BigInt::from(x * x);
            let mut term = &one / BigInt::from(x);
            let mut sum = term.clone();
            let mut k = 1u64;
            while !term.is_zero() {
                term = &term / &x2;
                let t = &term / BigInt::from(2 * k + 1);
                if k % 2 == 1 {
                    sum -= t;
                } else {
                    sum += t;
                }
                k += 1;
            }
            sum
        };
        let pi = (atan_inv(5) * 16 - atan_inv(239) * 4) >> 32usize;
        let mut ln2 = BigInt::zero();
        let mut k = 1u64;
        loop {
            let t = (&one >> k as usize) / BigInt::from(k);
            if t.is_zero() {
                break;
            }
            ln2 += t;
            k += 1;
        }
        HpContext {
            bits,
            pi,
            ln2: ln2 >> 32usize,
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn pi(&self) -> HpReal {
        HpReal { m: self.pi.clone() }
    }

    pub fn ln2(&self) -> HpReal {
        HpReal { m: self.ln2.clone() }
    }

    pub fn zero(&self) -> HpReal {
        HpReal { m: BigInt::zero() }
    }

    pub fn int(&self, v: i64) -> HpReal {
        HpReal {
            m: BigInt::from(v) << self.bits as usize,
        }
    }

    pub fn big_int(&self, v: &BigInt) -> HpReal {
        HpReal {
            m: v << self.bits as usize,
        }
    }

    pub fn rational(&self, r: &BigRational) -> HpReal {
        HpReal {
            m: (r.numer() << self.bits as usize).div_floor(r.denom()),
        }
    }

    /// Exact conversion of a finite double.
    pub fn f64(&self, x: f64) -> HpReal {
        if x == 0.0 || !x.is_finite() {
            return self.zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        HpReal {
            m: shift(&BigInt::from(sign * mant as i64), e + i64::from(self.bits)),
        }
    }

    pub fn complex(&self, z: Complex64) -> HpComplex {
        HpComplex {
            re: self.f64(z.re),
            im: self.f64(z.im),
        }
    }

    pub fn gauss(&self, c: &GaussRat) -> HpComplex {
        HpComplex {
            re: self.rational(&c.re),
            im: self.rational(&c.im),
        }
    }

    pub fn czero(&self) -> HpComplex {
        HpComplex {
            re: self.zero(),
            im: self.zero(),
        }
    }

    pub fn cone(&self) -> HpComplex {
        HpComplex {
            re: self.int(1),
            im: self.zero(),
        }
    }

    pub fn add(&self, a: &HpReal, b: &HpReal) -> HpReal {
        HpReal { m: &a.m + &b.m }
    }

    pub fn sub(&self, a: &HpReal, b: &HpReal) -> HpReal {
        HpReal { m: &a.m - &b.m }
    }

    pub fn mul(&self, a: &HpReal, b: &HpReal) -> HpReal {
        HpReal {
            m: (&a.m * &b.m) >> self.bits as usize,
        }
    }

    pub fn div(&self, a: &HpReal, b: &HpReal) -> Option<HpReal> {
        if b.m.is_zero() {
            return None;
        }
        Some(HpReal {
            m: (&a.m << self.bits as usize).div_floor(&b.m),
        })
    }

    pub fn mul_int(&self, a: &HpReal, k: i64) -> HpReal {
        HpReal { m: &a.m * k }
    }

    pub fn sqrt(&self, a: &HpReal) -> HpReal {
        if a.m.sign() != Sign::Plus {
            return self.zero();
        }
        HpReal {
            m: (&a.m << self.bits as usize).sqrt(),
        }
    }

    pub fn to_f64(&self, a: &HpReal) -> f64 {
        let nb = a.m.bits() as i64;
        let drop = (nb - 60).max(0);
        let top = shift(&a.m, -drop).to_f64().unwrap_or(0.0);
        let e = drop - i64::from(self.bits);
        top * 2f64.powi(e.clamp(-2000, 2000) as i32)
    }

    /// `e^x`, reducing by multiples of `ln 2` and squaring a short series.
    pub fn exp(&self, x: &HpReal) -> HpReal {
        let xf = self.to_f64(x);
        if xf < -(f64::from(self.bits) + 64.0) * std::f64::consts::LN_2 {
            return self.zero();
        }
        let k = (xf / std::f64::consts::LN_2).round() as i64;
        let r = self.sub(x, &self.mul_int(&self.ln2(), k));
        let halvings = 16u32;
        let r = HpReal {
            m: r.m >> halvings as usize,
        };
        let mut sum = self.int(1);
        let mut term = self.int(1);
        let mut j = 1i64;
        loop {
            term = HpReal {
                m: self.mul(&term, &r).m / j,
            };
            if term.m.is_zero() {
                break;
            }
            sum = self.add(&sum, &term);
            j += 1;
        }
        for _ in 0..halvings {
            sum = self.mul(&sum, &sum);
        }
        HpReal { m: shift(&sum.m, k) }
    }

    /// `(sin y, cos y)` with reduction modulo `2π`, halving and doubling.
    pub fn sin_cos(&self, y: &HpReal) -> (HpReal, HpReal) {
        let two_pi = self.mul_int(&self.pi(), 2);
        let turns = (self.to_f64(y) / std::f64::consts::TAU).round();
        let n = BigInt::from(turns as i128);
        let r = HpReal {
            m: &y.m - &two_pi.m * n,
        };
        let halvings = 12u32;
        let r = HpReal {
            m: r.m >> halvings as usize,
        };
        let r2 = self.mul(&r, &r);
        let mut s = r.clone();
        let mut c = self.int(1);
        let mut ts = r.clone();
        let mut tc = self.int(1);
        let mut j = 1i64;
        loop {
            ts = HpReal {
                m: -(self.mul(&ts, &r2).m) / ((2 * j) * (2 * j + 1)),
            };
            tc = HpReal {
                m: -(self.mul(&tc, &r2).m) / ((2 * j - 1) * (2 * j)),
            };
            if ts.m.is_zero() && tc.m.is_zero() {
                break;
            }
            s = self.add(&s, &ts);
            c = self.add(&c, &tc);
            j += 1;
        }
        let one = self.int(1);
        for _ in 0..halvings {
            let s2 = self.mul_int(&self.mul(&s, &c), 2);
            let c2 = self.sub(&self.mul_int(&self.mul(&c, &c), 2), &one);
            s = s2;
            c = c2;
        }
        (s, c)
    }

    pub fn cadd(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.add(&a.re, &b.re),
            im: self.add(&a.im, &b.im),
        }
    }

    pub fn csub(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.sub(&a.re, &b.re),
            im: self.sub(&a.im, &b.im),
        }
    }

    pub fn cmul(&self, a: &HpComplex, b: &HpComplex) -> HpComplex {
        HpComplex {
            re: self.sub(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im)),
            im: self.add(&self.mul(&a.re, &b.im), &self.mul(&a.im, &b.re)),
        }
    }

    pub fn cdiv(&self, a: &HpComplex, b: &HpComplex) -> Option<HpComplex> {
        let d = self.add(&self.mul(&b.re, &b.re), &self.mul(&b.im, &b.im));
        let re = self.add(&self.mul(&a.re, &b.re), &self.mul(&a.im, &b.im));
        let im = self.sub(&self.mul(&a.im, &b.re), &self.mul(&a.re, &b.im));
        Some(HpComplex {
            re: self.div(&re, &d)?,
            im: self.div(&im, &d)?,
        })
    }

    pub fn cscale(&self, a: &HpComplex, k: i64) -> HpComplex {
        HpComplex {
            re: self.mul_int(&a.re, k),
            im: self.mul_int(&a.im, k),
        }
    }

    pub fn cexp(&self, z: &HpComplex) -> HpComplex {
        let m = self.exp(&z.re);
        let (s, c) = self.sin_cos(&z.im);
        HpComplex {
            re: self.mul(&m, &c),
            im: self.mul(&m, &s),
        }
    }

    pub fn cnorm(&self, z: &HpComplex) -> HpReal {
        self.sqrt(&self.add(&self.mul(&z.re, &z.re), &self.mul(&z.im, &z.im)))
    }

    pub fn cnorm_f64(&self, z: &HpComplex) -> f64 {
        self.to_c64(z).norm()
    }

    pub fn to_c64(&self, z: &HpComplex) -> Complex64 {
        Complex64::new(self.to_f64(&z.re), self.to_f64(&z.im))
    }

    /// `2πi·k`.
    pub fn two_pi_i(&self, k: i64) -> HpComplex {
        HpComplex {
            re: self.zero(),
            im: self.mul_int(&self.pi(), 2 * k),
        }
    }

    /// Evaluates a polynomial at a high-precision point.
    pub fn eval_poly(&self, p: &Poly, point: &[HpComplex]) -> HpComplex {
        match p {
            Poly::Exact(p) => self.eval_generic(p, point, |c| self.gauss(c)),
            Poly::Float(p) => self.eval_generic(p, point, |c| self.complex(*c)),
        }
    }

    fn eval_generic<C: Coefficient>(
        &self,
        p: &MultiPoly<C>,
        point: &[HpComplex],
        conv: impl Fn(&C) -> HpComplex,
    ) -> HpComplex {
        let mut powers: Vec<Vec<HpComplex>> = point.iter().map(|z| vec![self.cone(), z.clone()]).collect();
        let mut acc = self.czero();
        for (m, c) in p.terms() {
            let mut term = conv(c);
            for (v, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = self.cmul(powers[v].last().expect("seeded"), &point[v]);
                    powers[v].push(next);
                }
                term = self.cmul(&term, &powers[v][e as usize]);
            }
            acc = self.cadd(&acc, &term);
        }
        acc
    }
}

impl HpReal {
    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Raw fixed-point mantissa.
    pub fn mantissa(&self) -> &BigInt {
        &self.m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        let c = HpContext::with_digits(40);
        // π to 40 digits: 3.141592653589793238462643383279502884197
        let pi = c.pi();
        let reference = c.rational(&BigRational::new(
            "3141592653589793238462643383279502884197".parse().unwrap(),
            BigInt::from(10).pow(39),
        ));
        assert!(c.to_f64(&c.sub(&pi, &reference)).abs() < 1e-38);
        assert!((c.to_f64(&c.ln2()) - std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn exp_and_trig_identities() {
        let c = HpContext::with_digits(50);
        let one = c.int(1);
        let e = c.exp(&one);
        assert!((c.to_f64(&e) - std::f64::consts::E).abs() < 1e-15);
        // e^x · e^{-x} = 1
        let x = c.f64(3.75);
        let prod = c.mul(&c.exp(&x), &c.exp(&c.mul_int(&x, -1)));
        assert!(c.to_f64(&c.sub(&prod, &one)).abs() < 1e-45);
        // sin² + cos² = 1 at a large argument
        let y = c.f64(12345.678);
        let (s, co) = c.sin_cos(&y);
        let id = c.add(&c.mul(&s, &s), &c.mul(&co, &co));
        assert!(c.to_f64(&c.sub(&id, &one)).abs() < 1e-45);
        assert!((c.to_f64(&s) - 12345.678f64.sin()).abs() < 1e-11);
    }

    #[test]
    fn exp_of_i_pi_is_minus_one() {
        let c = HpContext::with_digits(30);
        let z = HpComplex {
            re: c.zero(),
            im: c.pi(),
        };
        let w = c.cexp(&z);
        assert!(c.to_f64(&c.add(&w.re, &c.int(1))).abs() < 1e-29);
        assert!(c.to_f64(&w.im).abs() < 1e-29);
    }

    #[test]
    fn conversions_round_trip() {
        let c = HpContext::with_digits(30);
        for x in [0.1, -2.5e-8, 6.02e23, 1e-300, -7.0] {
            assert_eq!(c.to_f64(&c.f64(x)), if x.abs() < 1e-100 { 0.0 } else { x });
        }
        let q = c.cdiv(&c.complex(Complex64::new(1.0, 2.0)), &c.complex(Complex64::new(3.0, -1.0))).unwrap();
        let expect = Complex64::new(1.0, 2.0) / Complex64::new(3.0, -1.0);
        assert!((c.to_c64(&q) - expect).norm() < 1e-15);
    }
}
