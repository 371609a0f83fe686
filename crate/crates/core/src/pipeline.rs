//! End-to-end runs: solve a system or a tower, then attach residual
//! rechecks, tower residuals and relation diagnostics to every root.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::generic::{diagnose_relations, generic_solve_plan, GenericPlan, DEFAULT_DIGITS, DEFAULT_HEIGHT};
use crate::solver::{enumerate_roots, Enumeration, SolveOptions};
use crate::system::{LinearForm, MasserSystem};
use crate::tower::ExpTower;
use crate::verify::{recheck_residual, ResidualCheck};

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOptions {
    pub solve: SolveOptions,
    /// Height bound for relation diagnostics.
    pub height: u64,
    /// Decimal digits for rechecks and diagnostics.
    pub digits: u32,
    /// Build the exclusion plan for exact towers.
    pub generic: bool,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            solve: SolveOptions::default(),
            height: DEFAULT_HEIGHT,
            digits: DEFAULT_DIGITS,
            generic: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SystemSolution {
    /// The system actually solved (rational right-hand sides doubled).
    pub system: MasserSystem,
    pub enumeration: Enumeration,
    pub rechecks: Vec<ResidualCheck>,
    /// Roots mapped back to the input variables.
    pub recovered: Vec<Vec<Complex64>>,
}

pub fn solve_system(s: &MasserSystem, count: usize, opts: &PipelineOptions) -> Result<SystemSolution> {
    let system = if s.has_rational() {
        s.rational_to_integral()?
    } else {
        s.clone()
    };
    let enumeration = enumerate_roots(&system, count, &opts.solve)?;
    let rechecks = enumeration
        .roots
        .iter()
        .map(|r| recheck_residual(r, &system, opts.digits))
        .collect::<Result<Vec<_>>>()?;
    let recovered = enumeration.roots.iter().map(|r| system.recover(&r.x)).collect();
    Ok(SystemSolution {
        system,
        enumeration,
        rechecks,
        recovered,
    })
}

#[derive(Clone, Debug)]
pub struct TowerSolution {
    pub plan: Option<GenericPlan>,
    pub solution: SystemSolution,
    /// `|ℓ_j(x̄)|` per root and excluded form.
    pub margins: Vec<Vec<f64>>,
}

impl TowerSolution {
    pub fn forms(&self) -> &[LinearForm] {
        self.plan.as_ref().map(|p| p.forms.as_slice()).unwrap_or(&[])
    }
}

/// Degeneracy check, exclusion plan (exact input), enumeration, rechecks,
/// tower residuals and relation diagnostics.
pub fn solve_tower(t: &ExpTower, count: usize, opts: &PipelineOptions) -> Result<TowerSolution> {
    if let Some(d) = t.is_degenerate() {
        return Err(Error::Degenerate { exps: d.exps });
    }
    let (plan, system) = if opts.generic && t.poly().is_exact() {
        let plan = generic_solve_plan(t)?;
        let system = plan.system.clone();
        (Some(plan), system)
    } else {
        (None, MasserSystem::from_tower(t)?)
    };
    let mut solution = solve_system(&system, count, opts)?;
    let k = t.k();
    let forms: Vec<LinearForm> = plan.as_ref().map(|p| p.forms.clone()).unwrap_or_default();
    let mut margins = Vec::with_capacity(solution.enumeration.roots.len());
    for root in &mut solution.enumeration.roots {
        root.tower_residual = Some(t.residual(&root.x[..k])?);
        root.relations = diagnose_relations(root, t, opts.height, opts.digits).ok();
        margins.push(forms.iter().map(|f| f.eval(&root.x[..k]).norm()).collect());
    }
    Ok(TowerSolution {
        plan,
        solution,
        margins,
    })
}
