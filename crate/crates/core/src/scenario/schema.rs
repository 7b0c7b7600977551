//! Scenario files: a versioned JSON document describing a model, a domain,
//! a frequency sweep, point pairs and the checks to run on them.

use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Vec3};
use crate::green_free::ReferenceMedium;
use crate::integral_solver::{DomainGrid, SolverMethod, BORN_CAP, DENSE_CAP};
use crate::permittivity::{DispersionModel, OscillatorSign, PermittivityModel, Region, Shape, SpatialProfile};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeSet, HashMap};
use std::path::Path;

pub const SCENARIO_SCHEMA: &str = "kkgreen/scenario@1";

/// Check names in dependency order.
pub const CHECKS: [&str; 7] = ["kk", "analyticity", "solve", "sumrule", "curl", "noise", "unequal_time"];

/// One-line description of every check, for `list-checks`.
pub fn check_descriptions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("kk", "Kramers-Kronig residual of the permittivity on a log frequency grid"),
        ("analyticity", "contour residuals of eps and omega*G1 on an upper half-plane rectangle"),
        ("solve", "vacuum identity, Born vs direct, reality and reciprocity of the solved G"),
        ("sumrule", "regulated commutator sum rule and kernel term along a cutoff ladder"),
        ("curl", "source-side curl of the G2 part relative to the curl of G1"),
        ("noise", "sign coherence of noise-current densities and the induced charge"),
        ("unequal_time", "spacelike suppression and evenness of the regulated unequal-time kernel"),
    ]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    #[default]
    Si,
    Natural,
}

impl UnitSystem {
    pub fn units(self) -> Units {
        match self {
            UnitSystem::Si => Units::SI,
            UnitSystem::Natural => Units::NATURAL,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default)]
    pub model: ModelSpec,
    pub domain: DomainSpec,
    pub frequencies: FrequencySweep,
    #[serde(default)]
    pub pairs: Vec<PointPair>,
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub settings: Settings,
}

/// `"vacuum"` or a full description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Preset(Preset),
    Described(ModelDescription),
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec::Preset(Preset::Vacuum)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Vacuum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescription {
    #[serde(default)]
    pub oscillators: Vec<OscillatorSpec>,
    /// Oscillator names filling all space.
    #[serde(default)]
    pub background: Vec<String>,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    pub mollify_m: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatorSpec {
    pub name: String,
    #[serde(rename = "omega_T")]
    pub omega_t: f64,
    pub omega_p: f64,
    pub gamma: f64,
    /// +1 absorbing, -1 amplifying.
    pub sign: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub shape: ShapeSpec,
    /// Oscillators active inside; ignored for voxel maps.
    #[serde(default)]
    pub oscillators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeSpec {
    Ball {
        center_m: Vec3,
        radius_m: f64,
    },
    /// `null` bounds extend to infinity.
    Slab {
        axis: Axis,
        lower_m: Option<f64>,
        upper_m: Option<f64>,
    },
    VoxelMap {
        origin_m: Vec3,
        cell_m: f64,
        dims: [usize; 3],
        cells: Vec<Option<String>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default)]
    pub center_m: Vec3,
    pub edge_m: f64,
    pub resolution: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySweep {
    pub omega_min: f64,
    pub omega_max: f64,
    pub nodes: usize,
}

impl FrequencySweep {
    pub fn values(&self) -> Vec<f64> {
        if self.nodes <= 1 {
            return vec![self.omega_min];
        }
        (0..self.nodes).map(|k| self.omega_min + (self.omega_max - self.omega_min) * k as f64 / (self.nodes - 1) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointPair {
    pub r_m: Vec3,
    pub r_prime_m: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub kk: f64,
    pub analyticity: f64,
    pub born_direct: f64,
    pub identity: f64,
    pub reality: f64,
    pub reciprocity: f64,
    /// Extrapolated limit relative to the first rung.
    pub sumrule: f64,
    pub sumrule_min_exponent: f64,
    /// Curl of the G2 part relative to the curl of G1.
    pub curl: f64,
    /// Minimum light-cone to spacelike ratio.
    pub causality_suppression: f64,
    pub evenness: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kk: 1e-2,
            analyticity: 1e-4,
            born_direct: 1e-8,
            identity: 1e-12,
            reality: 1e-12,
            reciprocity: 1e-6,
            sumrule: 1e-3,
            sumrule_min_exponent: 0.5,
            curl: 1e-2,
            causality_suppression: 20.0,
            evenness: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectangleSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurlSpec {
    pub omega: Option<f64>,
    pub r_m: Option<Vec3>,
    pub r_prime_m: Option<Vec3>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub solver_method: SolverMethod,
    pub reference: ReferenceMedium,
    pub kk_nodes: usize,
    pub contour_nodes: usize,
    /// Default: `re = [ω_min, ω_max]`, `im = [ω_min/20, ω_max]`.
    pub rectangle: Option<RectangleSpec>,
    /// Default: `{1, 2, 5, 10} × 10 ω_s` with `ω_s` the largest `ω_T`
    /// (or `ω_max` for vacuum).
    pub cutoffs: Option<Vec<f64>>,
    pub residue_nodes: usize,
    /// Default: `10 c / |r − r′|` of the first pair.
    pub sigma: Option<f64>,
    pub time_node_budget: usize,
    pub curl: Option<CurlSpec>,
    pub noise_direction: Vec3,
    /// Run linear algebra single-threaded so reports are bit-reproducible.
    pub deterministic: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            solver_method: SolverMethod::Auto,
            reference: ReferenceMedium::Background,
            kk_nodes: 2000,
            contour_nodes: 400,
            rectangle: None,
            cutoffs: None,
            residue_nodes: 12,
            sigma: None,
            time_node_budget: 8192,
            curl: None,
            noise_direction: [1.0, 0.0, 0.0],
            deterministic: true,
        }
    }
}

/// A validated scenario with its content digest and loader warnings.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
    pub warnings: Vec<String>,
}

pub fn load_scenario(path: &Path) -> Result<LoadedScenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<LoadedScenario> {
    let scenario: Scenario = serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let warnings = scenario.validate()?;
    let digest = Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
    Ok(LoadedScenario { scenario, digest, warnings })
}

impl Scenario {
    pub fn units(&self) -> Units {
        self.units.units()
    }

    pub fn grid(&self) -> Result<DomainGrid> {
        DomainGrid::new(self.domain.center_m, self.domain.edge_m, self.domain.resolution)
    }

    pub fn checks_in_order(&self) -> Vec<&'static str> {
        CHECKS.iter().copied().filter(|c| self.checks.iter().any(|x| x == c)).collect()
    }

    pub fn description(&self) -> Option<&ModelDescription> {
        match &self.model {
            ModelSpec::Described(d) => Some(d),
            ModelSpec::Preset(_) => None,
        }
    }

    /// Largest transverse frequency of the model, or `ω_max` for vacuum.
    pub fn frequency_scale(&self) -> f64 {
        self.description()
            .map(|d| d.oscillators.iter().map(|o| o.omega_t).fold(0.0, f64::max))
            .filter(|&w| w > 0.0)
            .unwrap_or(self.frequencies.omega_max)
    }

    pub fn build_model(&self) -> Result<PermittivityModel> {
        let Some(d) = self.description() else {
            return Ok(PermittivityModel::vacuum());
        };
        if d.oscillators.is_empty() {
            return Ok(PermittivityModel::vacuum());
        }
        let index: HashMap<&str, usize> = d.oscillators.iter().enumerate().map(|(k, o)| (o.name.as_str(), k)).collect();
        let lookup = |name: &str| index.get(name).copied().ok_or_else(|| Error::InvalidModel(format!("unknown oscillator `{name}`")));
        let mut models = Vec::new();
        for o in &d.oscillators {
            let sign = OscillatorSign::from_int(o.sign)?;
            models.push(if o.gamma < 0.0 {
                DispersionModel::new_unchecked(o.omega_t, o.omega_p, o.gamma, sign)
            } else {
                DispersionModel::new(o.omega_t, o.omega_p, o.gamma, sign)?
            });
        }
        let background = d.background.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?;
        let mut regions = Vec::new();
        for r in &d.regions {
            let medium = r.oscillators.iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?;
            let shape = match &r.shape {
                ShapeSpec::Ball { center_m, radius_m } => Shape::Ball { center: *center_m, radius: *radius_m },
                ShapeSpec::Slab { axis, lower_m, upper_m } => Shape::Slab {
                    axis: *axis as usize,
                    lower: lower_m.unwrap_or(f64::NEG_INFINITY),
                    upper: upper_m.unwrap_or(f64::INFINITY),
                },
                ShapeSpec::VoxelMap { origin_m, cell_m, dims, cells } => Shape::VoxelMap {
                    origin: *origin_m,
                    cell: *cell_m,
                    dims: *dims,
                    cells: cells.iter().map(|c| c.as_deref().map(lookup).transpose()).collect::<Result<_>>()?,
                },
            };
            regions.push(Region::new(shape, medium));
        }
        PermittivityModel::new(models, SpatialProfile::new(background, regions, d.mollify_m))
    }

    /// Every semantic problem at once; returns warnings when valid.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();
        if self.schema != SCENARIO_SCHEMA {
            errors.push(format!("schema must be `{SCENARIO_SCHEMA}`, got `{}`", self.schema));
        }
        if self.name.trim().is_empty() {
            errors.push("name must not be empty".into());
        }

        let n = self.domain.resolution;
        let h = self.domain.edge_m / n.max(1) as f64;
        if !(self.domain.edge_m > 0.0 && self.domain.edge_m.is_finite()) {
            errors.push(format!("domain.edge_m must be positive, got {}", self.domain.edge_m));
        }
        if n < 3 {
            errors.push(format!("domain.resolution must be at least 3, got {n}"));
        }
        if n > BORN_CAP {
            errors.push(format!("domain.resolution {n} exceeds the solver cap of {BORN_CAP} (matrix-free Born iteration)"));
        } else if n > DENSE_CAP && self.settings.solver_method == SolverMethod::Direct {
            errors.push(format!("domain.resolution {n} exceeds the dense direct-solve cap of {DENSE_CAP}"));
        }

        let f = &self.frequencies;
        if !(f.omega_min > 0.0 && f.omega_max >= f.omega_min && f.omega_max.is_finite()) {
            errors.push(format!("frequencies need 0 < omega_min <= omega_max, got [{}, {}]", f.omega_min, f.omega_max));
        }
        if f.nodes == 0 {
            errors.push("frequencies.nodes must be at least 1".into());
        }

        self.validate_model(h, &mut errors, &mut warnings);

        if self.checks.is_empty() {
            errors.push("checks must name at least one check".into());
        }
        let mut seen = BTreeSet::new();
        for c in &self.checks {
            if !CHECKS.contains(&c.as_str()) {
                errors.push(format!("unknown check `{c}`; valid checks are: {}", CHECKS.join(", ")));
            } else if !seen.insert(c.as_str()) {
                errors.push(format!("check `{c}` listed twice"));
            }
        }
        let needs_pair = ["solve", "sumrule", "unequal_time"].iter().any(|c| seen.contains(c))
            || (seen.contains("curl") && self.settings.curl.as_ref().map_or(true, |c| c.r_m.is_none() || c.r_prime_m.is_none()));
        if needs_pair && self.pairs.is_empty() {
            errors.push("checks solve, sumrule, curl and unequal_time need at least one point pair".into());
        }
        for (k, p) in self.pairs.iter().enumerate() {
            let d = norm(sub(p.r_m, p.r_prime_m));
            if !(d >= 3.0 * h * (1.0 - 1e-12)) {
                errors.push(format!("pairs[{k}]: |r - r'| = {d:.4} is below 3h = {:.4}", 3.0 * h));
            }
        }

        let t = &self.tolerances;
        for (name, v) in [
            ("kk", t.kk),
            ("analyticity", t.analyticity),
            ("born_direct", t.born_direct),
            ("identity", t.identity),
            ("reality", t.reality),
            ("reciprocity", t.reciprocity),
            ("sumrule", t.sumrule),
            ("sumrule_min_exponent", t.sumrule_min_exponent),
            ("curl", t.curl),
            ("causality_suppression", t.causality_suppression),
            ("evenness", t.evenness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(format!("tolerances.{name} must be positive, got {v}"));
            }
        }

        let s = &self.settings;
        if s.kk_nodes < 5 {
            errors.push("settings.kk_nodes must be at least 5".into());
        }
        if s.contour_nodes < 8 {
            errors.push("settings.contour_nodes must be at least 8".into());
        }
        if s.residue_nodes < 4 {
            errors.push("settings.residue_nodes must be at least 4".into());
        }
        if let Some(r) = &s.rectangle {
            if !(r.re[1] > r.re[0] && r.im[1] > r.im[0] && r.im[0] > 0.0) {
                errors.push("settings.rectangle needs re[0] < re[1] and 0 < im[0] < im[1]".into());
            }
        }
        if let Some(c) = &s.cutoffs {
            if let Err(e) = crate::sumrule::CutoffLadder::new(c.clone()) {
                errors.push(format!("settings.cutoffs: {e}"));
            }
        }
        if let Some(sig) = s.sigma {
            if !(sig > 0.0) {
                errors.push("settings.sigma must be positive".into());
            }
        }
        if norm(s.noise_direction) == 0.0 {
            errors.push("settings.noise_direction must be nonzero".into());
        }
        if let Some(c) = &s.curl {
            if let Some(w) = c.omega {
                if !(w > 0.0) {
                    errors.push("settings.curl.omega must be positive".into());
                }
            }
        }

        if errors.is_empty() {
            Ok(warnings)
        } else {
            Err(Error::Validation(errors))
        }
    }

    fn validate_model(&self, h: f64, errors: &mut Vec<String>, warnings: &mut Vec<String>) {
        let Some(d) = self.description() else { return };
        let mut names = BTreeSet::new();
        for o in &d.oscillators {
            if !names.insert(o.name.as_str()) {
                errors.push(format!("oscillator `{}` defined twice", o.name));
            }
            if !(o.omega_t > 0.0 && o.omega_t.is_finite()) {
                errors.push(format!("oscillator `{}`: omega_T must be positive", o.name));
            }
            if !(o.omega_p >= 0.0 && o.omega_p.is_finite()) {
                errors.push(format!("oscillator `{}`: omega_p must be non-negative", o.name));
            }
            if o.gamma == 0.0 || !o.gamma.is_finite() {
                errors.push(format!("oscillator `{}`: gamma must be nonzero and finite", o.name));
            } else if o.gamma < 0.0 {
                warnings.push(format!("oscillator `{}` has gamma < 0: poles in the upper half-plane, the model is not causal", o.name));
            }
            if o.sign != 1 && o.sign != -1 {
                errors.push(format!("oscillator `{}`: sign must be +1 or -1", o.name));
            } else if o.sign == -1 {
                warnings.push(format!("oscillator `{}` is amplifying", o.name));
            }
        }
        let mut unknown = |n: &str, at: &str| {
            if !names.contains(n) {
                errors.push(format!("{at}: unknown oscillator `{n}`"));
            }
        };
        for n in &d.background {
            unknown(n, "background");
        }
        for (k, r) in d.regions.iter().enumerate() {
            for n in &r.oscillators {
                unknown(n, &format!("regions[{k}]"));
            }
            if let ShapeSpec::VoxelMap { cells, .. } = &r.shape {
                for n in cells.iter().flatten() {
                    unknown(n, &format!("regions[{k}].cells"));
                }
            }
        }
        if !(d.mollify_m > 0.0 && d.mollify_m.is_finite()) {
            errors.push(format!("model.mollify_m must be positive, got {}", d.mollify_m));
        } else if !d.regions.is_empty() && d.mollify_m < 2.0 * h * (1.0 - 1e-12) {
            errors.push(format!("model.mollify_m = {} is below 2h = {:.4}: interfaces are under-resolved", d.mollify_m, 2.0 * h));
        }
        for (k, r) in d.regions.iter().enumerate() {
            match &r.shape {
                ShapeSpec::Ball { radius_m, .. } if !(*radius_m > 0.0) => errors.push(format!("regions[{k}]: radius_m must be positive")),
                ShapeSpec::Slab { lower_m, upper_m, .. } => {
                    let lo = lower_m.unwrap_or(f64::NEG_INFINITY);
                    let hi = upper_m.unwrap_or(f64::INFINITY);
                    if !(hi > lo) {
                        errors.push(format!("regions[{k}]: slab needs lower_m < upper_m"));
                    }
                }
                ShapeSpec::VoxelMap { cell_m, dims, cells, .. } => {
                    if !(*cell_m > 0.0) {
                        errors.push(format!("regions[{k}]: cell_m must be positive"));
                    }
                    if cells.len() != dims.iter().product::<usize>() {
                        errors.push(format!("regions[{k}]: cells has {} entries, dims need {}", cells.len(), dims.iter().product::<usize>()));
                    }
                }
                _ => {}
            }
        }
        // Structural rules (absorbing background, bounded gain) live in the model constructor.
        let structural_ok = errors.is_empty();
        if structural_ok {
            if let Err(e) = self.build_model() {
                errors.push(format!("model: {e}"));
            }
        }
    }
}
