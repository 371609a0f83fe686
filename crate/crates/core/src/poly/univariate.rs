//! Roots of univariate complex polynomials (Aberth–Ehrlich iteration).

use num_complex::Complex64;
use num_traits::Zero;

/// All roots (with multiplicity) of `Σ coeffs[j]·u^j`.
///
/// Leading zero coefficients are trimmed; returns an empty vector for
/// constants (including the zero polynomial).
pub fn roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut hi = coeffs.len();
    while hi > 0 && coeffs[hi - 1].is_zero() {
        hi -= 1;
    }
    if hi <= 1 {
        return Vec::new();
    }
    let mut lo = 0;
    while coeffs[lo].is_zero() {
        lo += 1;
    }
    let mut out = vec![Complex64::zero(); lo];
    let c = &coeffs[lo..hi];
    let deg = c.len() - 1;
    match deg {
        0 => {}
        1 => out.push(-c[0] / c[1]),
        _ => out.extend(aberth(c)),
    }
    out
}

fn eval_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    let lead = c[deg];
    // Fujiwara-type radius bound for the initial circle.
    let radius = (0..deg)
        .map(|j| (c[j] / lead).norm().powf(1.0 / (deg - j) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / (deg as f64) + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let scale: f64 = c.iter().map(|a| a.norm()).sum();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval_with_derivative(c, z[i]);
            if p.norm() <= f64::EPSILON * scale * (1.0 + z[i].norm()).powi(deg as i32) * 1e-3 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::zero();
            for j in 0..deg {
                if j != i {
                    let diff = z[i] - z[j];
                    if !diff.is_zero() {
                        sum += diff.inv();
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    // Newton polish.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval_with_derivative(c, *zi);
            if dp.is_zero() {
                break;
            }
            let step = p / dp;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *zi -= step;
        }
    }
    z
}
