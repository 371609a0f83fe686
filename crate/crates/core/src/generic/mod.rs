//! Bad rational relations, multiplicative independence and numerical
//! relation diagnostics for tower roots.

mod diagnose;

pub use diagnose::{
    diagnose_relations, diagnose_system_root, find_integer_relation, find_integer_relation_hp, RelationDiagnostic, RelationVerdict,
    DEFAULT_DIGITS, DEFAULT_HEIGHT,
};
mod plan;
pub use plan::{degree_form, generic_solve_plan, tower_bad_relations, GenericPlan};
mod relations;

pub use relations::{
    bad_rationals_three_var, bad_rationals_three_var_with_height, bad_rationals_two_var, bad_tuples_tower,
    bad_tuples_tower_with_height, multiplicative_independence_check, relation_divisor, relation_tuples, specialize,
    BadRelation, MultiplicativeVerdict, RelationKind,
};
