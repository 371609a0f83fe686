use std::collections::BTreeMap;

use super::{Coefficient, Monomial, MultiPoly};
use crate::error::{Error, Result};

impl<C: Coefficient> MultiPoly<C> {
    /// Divides by `d`, which must have leading coefficient `±1` (a constant)
    /// as a polynomial in `var`. Returns `(quotient, remainder)` with
    /// `self = d·quotient + remainder` and `deg_var(remainder) < deg_var(d)`.
    ///
    /// Exact coefficients only.
    pub fn divide_monic_in_var(&self, d: &Self, var: usize) -> Result<(Self, Self)> {
        if !C::EXACT {
            return Err(Error::ModeError);
        }
        self.check_same_arity(d)?;
        self.check_var(var)?;
        let dm = d.degree_in(var)?;
        let lead = d
            .coefficients_in(var)?
            .remove(&dm)
            .expect("top coefficient present");
        let sign = if lead.is_constant() {
            lead.terms().next().and_then(|(_, c)| c.unit_sign())
        } else {
            None
        };
        let sign = sign.ok_or(Error::UnsupportedDivisor { var })?;
        let lead_c = C::from_i64(sign as i64);

        let mut quotient = Self::zero(self.nvars);
        let mut rem = self.clone();
        loop {
            let top = match rem.degree_in(var) {
                Ok(e) if e >= dm => e,
                _ => break,
            };
            // Collect the var^top slice of the remainder and cancel it at once.
            let mut step = Self::zero(self.nvars);
            for (m, c) in rem.terms.iter().filter(|(m, _)| m.0[var] == top) {
                let mut exps = m.0.clone();
                exps[var] -= dm;
                step.terms.insert(Monomial(exps), c.clone() * lead_c.clone());
            }
            rem = rem.sub(&d.mul(&step));
            quotient = quotient.add(&step);
        }
        Ok((quotient, rem))
    }

    /// Exact quotient `self / d` when `d` divides `self`, else `None`.
    ///
    /// Multivariate division by a single divisor in graded-lex order; a single
    /// polynomial is a Gröbner basis of the ideal it generates, so the
    /// remainder vanishes exactly when `d | self`.
    pub fn divide_exact(&self, d: &Self) -> Result<Option<Self>> {
        if !C::EXACT {
            return Err(Error::ModeError);
        }
        self.check_same_arity(d)?;
        let (lm, lc) = match d.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::ZeroPolynomial),
        };
        let mut rem: BTreeMap<Monomial, C> = self.terms.clone();
        let mut quotient = Self::zero(self.nvars);
        while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            let shift = match m.div(&lm) {
                Some(s) => s,
                None => return Ok(None),
            };
            let factor = c.checked_div(&lc).expect("nonzero leading coefficient");
            for (dm, dc) in &d.terms {
                let key = dm.mul(&shift);
                let delta = dc.clone() * factor.clone();
                let entry = rem.entry(key.clone()).or_insert_with(C::zero);
                *entry = entry.clone() - delta;
                if entry.is_zero() {
                    rem.remove(&key);
                }
            }
            quotient.add_term(shift, factor);
        }
        Ok(Some(quotient))
    }

    pub fn divides(&self, p: &Self) -> Result<bool> {
        Ok(p.divide_exact(self)?.is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{ExactPoly, GaussRat};
    use super::*;

    fn xz(terms: &[(&[u32], i64)]) -> ExactPoly {
        ExactPoly::from_int_terms(2, terms)
    }

    #[test]
    fn difference_of_squares() {
        // vars (x, z); divide z^2 - x^2 by z - x in z
        let p = xz(&[(&[0, 2], 1), (&[2, 0], -1)]);
        let d = xz(&[(&[0, 1], 1), (&[1, 0], -1)]);
        let (q, r) = p.divide_monic_in_var(&d, 1).unwrap();
        assert_eq!(q, xz(&[(&[0, 1], 1), (&[1, 0], 1)]));
        assert!(r.is_zero());
    }

    #[test]
    fn synthetic_division_remainder() {
        let p = xz(&[(&[0, 2], 1), (&[0, 0], 1)]);
        let d = xz(&[(&[0, 1], 1), (&[1, 0], -1)]);
        let (q, r) = p.divide_monic_in_var(&d, 1).unwrap();
        assert_eq!(q, xz(&[(&[0, 1], 1), (&[1, 0], 1)]));
        assert_eq!(r, xz(&[(&[2, 0], 1), (&[0, 0], 1)]));
    }

    #[test]
    fn constructed_product_leaves_planted_remainder() {
        // p = (z^3 - 4x^2)(xz + 3) + (z - 7)
        let d = xz(&[(&[0, 3], 1), (&[2, 0], -4)]);
        let f = xz(&[(&[1, 1], 1), (&[0, 0], 3)]);
        let planted = xz(&[(&[0, 1], 1), (&[0, 0], -7)]);
        let p = d.mul(&f).add(&planted);
        let (q, r) = p.divide_monic_in_var(&d, 1).unwrap();
        assert_eq!(q, f);
        assert_eq!(r, planted);
    }

    #[test]
    fn negative_unit_leading_coefficient() {
        let d = xz(&[(&[0, 1], -1), (&[1, 0], 1)]);
        let p = xz(&[(&[0, 2], 1), (&[2, 0], -1)]);
        let (q, r) = p.divide_monic_in_var(&d, 1).unwrap();
        assert!(r.is_zero());
        assert_eq!(d.mul(&q), p);
    }

    #[test]
    fn rejects_non_monic_and_float() {
        let d = xz(&[(&[1, 1], 1), (&[0, 0], 1)]);
        let p = xz(&[(&[0, 2], 1)]);
        assert_eq!(p.divide_monic_in_var(&d, 1), Err(Error::UnsupportedDivisor { var: 1 }));
        let two = xz(&[(&[0, 1], 2)]);
        assert_eq!(p.divide_monic_in_var(&two, 1), Err(Error::UnsupportedDivisor { var: 1 }));
        let pf = p.to_float();
        let df = xz(&[(&[0, 1], 1)]).to_float();
        assert_eq!(pf.divide_monic_in_var(&df, 1), Err(Error::ModeError));
    }

    #[test]
    fn exact_division_by_non_monic_binomial() {
        // (x z^2 + 3)(z + x) divided by x z^2 + 3
        let d = xz(&[(&[1, 2], 1), (&[0, 0], 3)]);
        let f = xz(&[(&[0, 1], 1), (&[1, 0], 1)]);
        let p = d.mul(&f);
        assert_eq!(p.divide_exact(&d).unwrap(), Some(f));
        let q = p.add(&ExactPoly::one(2));
        assert_eq!(q.divide_exact(&d).unwrap(), None);
        let half = GaussRat::from_ratio(1, 2);
        assert_eq!(d.scale(&half).divides(&p), Ok(true));
    }
}
