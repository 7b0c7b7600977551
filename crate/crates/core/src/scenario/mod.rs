//! Scenario files, check execution and report output behind the `kkgreen`
//! command-line tool.

mod report;
mod run;
mod schema;

pub use report::{emit_reports, summary_table, CheckEntry, OutputFormat, RunManifest, MANIFEST_SCHEMA};
pub use run::{run, run_with_units, CheckReport, RunOutcome};
pub use schema::{
    check_descriptions, load_scenario, parse_scenario, Axis, CurlSpec, DomainSpec, FrequencySweep, LoadedScenario, ModelDescription, ModelSpec,
    OscillatorSpec, PointPair, Preset, RectangleSpec, RegionSpec, Scenario, Settings, ShapeSpec, Tolerances, UnitSystem, CHECKS, SCENARIO_SCHEMA,
};
