use super::ladder::{run_ladder, CutoffLadder, LadderSettings, SumRuleReport};
use super::response::HomogeneousG1;
use crate::constants::Units;
use crate::error::Result;
use crate::permittivity::PermittivityModel;

/// Regulated `∫ dω (ω/c²) g(d, ω)` of a homogeneous medium at separation
/// `distance`, analysed along `ladder`.
pub fn bulk_sum_rule(distance: f64, medium: &PermittivityModel, ladder: &CutoffLadder, settings: &LadderSettings, units: &Units) -> Result<SumRuleReport> {
    let response = HomogeneousG1::new(medium.clone(), distance, *units)?;
    let mut reports = run_ladder(&response, &["bulk".to_string()], ladder, settings, units)?;
    Ok(reports.remove(0))
}
