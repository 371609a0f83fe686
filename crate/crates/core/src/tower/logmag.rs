use std::f64::consts::PI;

use num_complex::Complex64;

const TWO_PI: f64 = 2.0 * PI;

/// Modulus above which `e^w` is considered unreliable after reducing `Im w`
/// modulo `2π`.
pub const ARG_REDUCTION_LIMIT: f64 = 1e12;

/// Log-threshold under which a tower value is converted back to a float.
pub const OVERFLOW_LOG: f64 = 700.0;

/// Complex number stored as `exp(log_abs + i·arg)`.
///
/// `log_abs` can exceed the exponent range of `f64` for the represented
/// value; zero is `log_abs = -∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMagComplex {
    pub log_abs: f64,
    pub arg: f64,
}

/// Reduces an angle into `(-π, π]`.
pub fn reduce_arg(theta: f64) -> f64 {
    let mut r = theta.rem_euclid(TWO_PI);
    if r > PI {
        r -= TWO_PI;
    }
    r
}

impl LogMagComplex {
    pub const ZERO: LogMagComplex = LogMagComplex {
        log_abs: f64::NEG_INFINITY,
        arg: 0.0,
    };

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        let arg = z.arg();
        LogMagComplex {
            log_abs: z.norm().ln(),
            arg: if arg == -PI { PI } else { arg },
        }
    }

    /// `e^w` for a float `w`; the flag marks `|Im w|` beyond the reliable
    /// argument-reduction range.
    pub fn exp_of(w: Complex64) -> (Self, bool) {
        let flagged = w.im.abs() > ARG_REDUCTION_LIMIT || !w.im.is_finite();
        let arg = if w.im.is_finite() { reduce_arg(w.im) } else { f64::NAN };
        (LogMagComplex { log_abs: w.re, arg }, flagged)
    }

    /// `e^self` where `self` may be too large for a float.
    pub fn exp(&self) -> (Self, bool) {
        if self.is_zero() {
            return (LogMagComplex { log_abs: 0.0, arg: 0.0 }, false);
        }
        let modulus = self.log_abs.exp();
        let re = modulus * self.arg.cos();
        let im = modulus * self.arg.sin();
        if re.is_nan() {
            return (LogMagComplex { log_abs: f64::NAN, arg: f64::NAN }, true);
        }
        Self::exp_of(Complex64::new(re, im))
    }

    pub fn is_zero(&self) -> bool {
        self.log_abs == f64::NEG_INFINITY
    }

    pub fn is_finite_log(&self) -> bool {
        self.log_abs.is_finite() || self.is_zero()
    }

    /// Float value when `log_abs < 700`.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        if self.log_abs < OVERFLOW_LOG && self.arg.is_finite() {
            Some(Complex64::from_polar(self.log_abs.exp(), self.arg))
        } else {
            None
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        LogMagComplex {
            log_abs: self.log_abs + other.log_abs,
            arg: reduce_arg(self.arg + other.arg),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        // big·(1 + small/big) with |small/big| <= 1
        let ratio = Complex64::from_polar((small.log_abs - big.log_abs).exp(), small.arg - big.arg);
        let factor = Complex64::new(1.0, 0.0) + ratio;
        big.mul(&LogMagComplex::from_complex(factor))
    }

    pub fn neg(&self) -> Self {
        LogMagComplex {
            log_abs: self.log_abs,
            arg: reduce_arg(self.arg + PI),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `|self|` as a float, saturating at `f64::MAX`.
    pub fn modulus_saturating(&self) -> f64 {
        if self.log_abs.is_nan() {
            return f64::MAX;
        }
        self.log_abs.exp().min(f64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_floats() {
        let zs = [
            Complex64::new(1.5, -2.0),
            Complex64::new(-0.3, 0.7),
            Complex64::new(1e5, 3.0),
            Complex64::new(-2.0, -1e-3),
        ];
        for &a in &zs {
            for &b in &zs {
                let la = LogMagComplex::from_complex(a);
                let lb = LogMagComplex::from_complex(b);
                let prod = la.mul(&lb).to_complex().unwrap();
                assert!((prod - a * b).norm() <= 1e-12 * (a * b).norm());
                let sum = la.add(&lb).to_complex().unwrap();
                if (a + b).norm() > 1e-3 * (a.norm() + b.norm()) {
                    assert!((sum - (a + b)).norm() <= 1e-12 * (a.norm() + b.norm()));
                }
            }
        }
    }

    #[test]
    fn overflow_is_representable() {
        let (big, flagged) = LogMagComplex::exp_of(Complex64::new(5000.0, 1.0));
        assert!(!flagged);
        assert!(big.to_complex().is_none());
        assert_eq!(big.log_abs, 5000.0);
        let (_, flagged) = LogMagComplex::exp_of(Complex64::new(0.0, 1e13));
        assert!(flagged);
        assert_eq!(LogMagComplex::ZERO.to_complex(), Some(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn argument_reduction_range() {
        for theta in [-7.0, -PI, 0.0, PI, 3.0 * PI, 100.0] {
            let r = reduce_arg(theta);
            assert!(r > -PI - 1e-15 && r <= PI + 1e-15);
            assert!(((theta - r) / (2.0 * PI)).fract().abs() < 1e-12 || ((theta - r) / (2.0 * PI)).fract().abs() > 1.0 - 1e-12);
        }
    }
}
