//! Fixtures shared by the benchmarks.

use iets_core::poly::ExactPoly;
use iets_core::system::{MasserSystem, Rhs};
use iets_core::tower::ExpTower;

/// `e^z = z` as a one-variable system.
pub fn exp_equals_identity() -> MasserSystem {
    let x = ExactPoly::from_int_terms(1, &[(&[1], 1)]);
    MasserSystem::new(vec![Rhs::Poly(x.into())]).expect("valid system")
}

/// `p(x, y_1) = y_1 − x`, whose zeros are those of `e^z − z`.
pub fn exp_minus_identity() -> ExpTower {
    ExpTower::new(1, ExactPoly::from_int_terms(2, &[(&[0, 1], 1), (&[1, 0], -1)]).into())
        .expect("valid tower")
}
