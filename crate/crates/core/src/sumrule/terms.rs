use super::ladder::{run_ladder, CutoffLadder, LadderSettings, SumRuleReport};
use super::response::{G1Part, SolverG1};
use crate::error::Result;
use crate::geometry::Vec3;
use crate::integral_solver::{DomainGrid, SolverConfig};
use crate::permittivity::PermittivityModel;

/// Ladders for every `(pair, part)` combination from one solve per
/// frequency node. Reports are ordered pair-major.
pub fn sum_rule_ladders(
    model: &PermittivityModel,
    grid: &DomainGrid,
    pairs: &[(Vec3, Vec3)],
    parts: &[G1Part],
    ladder: &CutoffLadder,
    settings: &LadderSettings,
    config: SolverConfig,
) -> Result<Vec<SumRuleReport>> {
    let response = SolverG1::new(model, grid, config, pairs, parts)?;
    let names: Vec<String> = (0..pairs.len())
        .flat_map(|p| {
            parts.iter().map(move |part| match part {
                G1Part::Full => format!("commutator[{p}]"),
                G1Part::KernelTerm => format!("kernel_term[{p}]"),
            })
        })
        .collect();
    let mut reports = run_ladder(&response, &names, ladder, settings, &config.units)?;
    let shifted = response.shifted_nodes();
    for r in &mut reports {
        r.shifted_nodes = shifted;
    }
    Ok(reports)
}

/// Regulated `∫ dω (ω/c²) G1(r, r′, ω)` for `r ≠ r′`.
pub fn commutator_sum_rule(
    model: &PermittivityModel,
    grid: &DomainGrid,
    r: Vec3,
    r_prime: Vec3,
    ladder: &CutoffLadder,
    settings: &LadderSettings,
    config: SolverConfig,
) -> Result<SumRuleReport> {
    Ok(sum_rule_ladders(model, grid, &[(r, r_prime)], &[G1Part::Full], ladder, settings, config)?.remove(0))
}

/// Regulated `∫ dω (ω/c²) ∫ d³v K(r, v, ω) G1(v, r′, ω)`.
pub fn kernel_term(
    model: &PermittivityModel,
    grid: &DomainGrid,
    r: Vec3,
    r_prime: Vec3,
    ladder: &CutoffLadder,
    settings: &LadderSettings,
    config: SolverConfig,
) -> Result<SumRuleReport> {
    Ok(sum_rule_ladders(model, grid, &[(r, r_prime)], &[G1Part::KernelTerm], ladder, settings, config)?.remove(0))
}
