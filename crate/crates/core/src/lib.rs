//! Certified zeros of exponential systems `e^{x_i} = f_i(x̄)` and of iterated
//! exponential polynomials `p(z, e^z, e^{e^z}, …)`.

pub mod error;
pub mod generic;
pub mod io;
pub mod pipeline;
pub mod poly;
pub mod solver;
pub mod system;
pub mod tower;
pub mod verify;

pub use error::{Error, Result};
pub use generic::{generic_solve_plan, BadRelation, GenericPlan, RelationDiagnostic, RelationVerdict};
pub use pipeline::{solve_system, solve_tower, PipelineOptions};
pub use poly::{ExactPoly, FloatPoly, GaussRat, Monomial, MultiPoly, Poly};
pub use solver::{enumerate_roots, Enumeration, KantorovichCertificate, RootRecord, SolveOptions};
pub use system::{LinearForm, MasserSystem, Provenance, Recovery, Rhs};
pub use tower::ExpTower;
pub use verify::{count_zeros, recheck_residual, Rect, ResidualCheck, ZeroCount};
