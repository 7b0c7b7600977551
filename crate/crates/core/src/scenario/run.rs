//! Executes the checks of a scenario in dependency order.

use super::schema::{LoadedScenario, Scenario};
use crate::constants::Units;
use crate::error::{Error, Result};
use crate::geometry::{norm, sub, Tensor3, Vec3};
use crate::green_free::free_dyadic_g0;
use crate::integral_solver::{DomainGrid, GreenSolver, SolverConfig, SolverMethod, DENSE_CAP};
use crate::permittivity::{analyticity_check, kk_residual, log_grid, PermittivityModel, Rectangle};
use crate::sumrule::{
    analyticity_sweep, bulk_sum_rule, curl_elimination_check, far_edge_max, noise_charge_spectrum, noise_spectrum, regulated_causality,
    sum_rule_ladders, CutoffLadder, FrequencyResponse, G1Part, HomogeneousG1, LadderSettings, Regulator, Route, SolverG1, SumRuleReport,
};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

/// Outcome of one check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    /// Set when the check could not be evaluated.
    pub error: Option<String>,
    /// Headline numbers, also shown in the summary table.
    pub metrics: BTreeMap<String, f64>,
    pub details: Value,
    /// `(file suffix, CSV text)`.
    #[serde(skip)]
    pub csv: Vec<(String, String)>,
}

impl CheckReport {
    fn failed(check: &str, error: String) -> Self {
        Self { check: check.into(), passed: false, error: Some(error), metrics: BTreeMap::new(), details: Value::Null, csv: Vec::new() }
    }
}

/// All check reports of one run.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub scenario: Scenario,
    pub digest: String,
    pub warnings: Vec<String>,
    pub reports: Vec<CheckReport>,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }
}

/// Run every requested check. Errors inside a check are recorded on its
/// report; checks that depend on a failed `solve` are still attempted.
pub fn run(loaded: &LoadedScenario) -> RunOutcome {
    run_with_units(loaded, None)
}

/// As [`run`], overriding the scenario's unit system.
pub fn run_with_units(loaded: &LoadedScenario, units: Option<Units>) -> RunOutcome {
    let sc = &loaded.scenario;
    if sc.settings.deterministic {
        faer::set_global_parallelism(faer::Par::Seq);
    }
    let ctx = Context::new(sc, units);
    let reports = sc
        .checks_in_order()
        .into_iter()
        .map(|name| {
            log::info!("running check {name}");
            let res = ctx.as_ref().map_err(|e| e.to_string()).and_then(|c| c.run_check(name).map_err(|e| e.to_string()));
            match res {
                Ok(r) => r,
                Err(e) => CheckReport::failed(name, e),
            }
        })
        .collect();
    RunOutcome { scenario: sc.clone(), digest: loaded.digest.clone(), warnings: loaded.warnings.clone(), reports }
}

struct Context<'s> {
    sc: &'s Scenario,
    model: PermittivityModel,
    grid: DomainGrid,
    units: Units,
    omegas: Vec<f64>,
    config: SolverConfig,
}

fn pairs_of(sc: &Scenario) -> Vec<(Vec3, Vec3)> {
    sc.pairs.iter().map(|p| (p.r_m, p.r_prime_m)).collect()
}

impl<'s> Context<'s> {
    fn new(sc: &'s Scenario, units: Option<Units>) -> Result<Self> {
        let units = units.unwrap_or_else(|| sc.units());
        let config = SolverConfig { method: sc.settings.solver_method, reference: sc.settings.reference, units, ..SolverConfig::default() };
        Ok(Self { sc, model: sc.build_model()?, grid: sc.grid()?, units, omegas: sc.frequencies.values(), config })
    }

    fn run_check(&self, name: &str) -> Result<CheckReport> {
        match name {
            "kk" => self.kk(),
            "analyticity" => self.analyticity(),
            "solve" => self.solve(),
            "sumrule" => self.sumrule(),
            "curl" => self.curl(),
            "noise" => self.noise(),
            "unequal_time" => self.unequal_time(),
            other => Err(Error::InvalidArgument(format!("unknown check `{other}`"))),
        }
    }

    /// Points where local quantities are sampled: the domain centre and
    /// every pair point.
    fn sample_points(&self) -> Vec<Vec3> {
        let mut pts = vec![self.sc.domain.center_m];
        for (r, rp) in pairs_of(self.sc) {
            pts.push(r);
            pts.push(rp);
        }
        pts
    }

    fn oscillator_band(&self) -> (f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for m in &self.model.models {
            lo = lo.min(m.omega_t);
            hi = hi.max(m.omega_t);
        }
        if hi == 0.0 {
            (self.sc.frequencies.omega_min, self.sc.frequencies.omega_max)
        } else {
            (lo, hi)
        }
    }

    fn kk(&self) -> Result<CheckReport> {
        let (lo, hi) = self.oscillator_band();
        let grid = log_grid(1e-3 * lo, 1e3 * hi, self.sc.settings.kk_nodes);
        let mut worst = 0.0_f64;
        let mut per_point = Vec::new();
        for p in self.sample_points() {
            let r = kk_residual(&self.model, p, &grid)?;
            worst = worst.max(r);
            per_point.push(json!({ "r_m": p, "residual": r }));
        }
        let tol = self.sc.tolerances.kk;
        Ok(CheckReport {
            check: "kk".into(),
            passed: worst <= tol,
            error: None,
            metrics: BTreeMap::from([("max_residual".into(), worst), ("tolerance".into(), tol)]),
            details: json!({ "grid": { "omega_min": grid[0], "omega_max": grid[grid.len() - 1], "nodes": grid.len() }, "points": per_point }),
            csv: vec![("kk".into(), metric_csv(&[("max_residual", worst)]))],
        })
    }

    fn rectangle(&self) -> Result<Rectangle> {
        match &self.sc.settings.rectangle {
            Some(r) => Rectangle::new((r.re[0], r.re[1]), (r.im[0], r.im[1])),
            None => {
                let f = &self.sc.frequencies;
                let hi = if f.omega_max > f.omega_min { f.omega_max } else { 2.0 * f.omega_min };
                Rectangle::new((f.omega_min, hi), (0.05 * f.omega_min, hi))
            }
        }
    }

    /// `G1` response for the first pair: closed form when the medium is
    /// homogeneous, otherwise the solver.
    fn first_pair_response(&self) -> Result<Box<dyn FrequencyResponse + '_>> {
        let (r, rp) = *pairs_of(self.sc).first().ok_or_else(|| Error::InvalidArgument("no point pair".into()))?;
        if self.model.is_homogeneous() {
            Ok(Box::new(HomogeneousG1::new(self.model.clone(), norm(sub(r, rp)), self.units)?))
        } else {
            Ok(Box::new(SolverG1::new(&self.model, &self.grid, self.config, &[(r, rp)], &[G1Part::Full])?))
        }
    }

    fn analyticity(&self) -> Result<CheckReport> {
        let rect = self.rectangle()?;
        let nodes = self.sc.settings.contour_nodes;
        let mut eps_worst = 0.0_f64;
        for p in self.sample_points() {
            eps_worst = eps_worst.max(analyticity_check(&self.model, p, &rect, nodes)?);
        }
        let mut metrics = BTreeMap::from([("eps_residual".to_string(), eps_worst)]);
        let mut details = json!({ "rectangle": { "re": [rect.re.0, rect.re.1], "im": [rect.im.0, rect.im.1] }, "nodes": nodes, "eps_residual": eps_worst });
        let mut worst = eps_worst;
        if !self.sc.pairs.is_empty() {
            let resp = self.first_pair_response()?;
            let sweep = analyticity_sweep(resp.as_ref(), &rect, nodes)?;
            let near = far_edge_max(resp.as_ref(), &rect, 16)?;
            let taller = Rectangle::new(rect.re, (rect.im.0, 2.0 * rect.im.1))?;
            let far = far_edge_max(resp.as_ref(), &taller, 16)?;
            worst = worst.max(sweep);
            metrics.insert("omega_g1_residual".into(), sweep);
            metrics.insert("far_edge_ratio".into(), far / near);
            details["omega_g1_residual"] = json!(sweep);
            details["far_edge_max"] = json!({ "height": rect.im.1, "value": near, "doubled_height_value": far, "decreasing": far < near });
        }
        let tol = self.sc.tolerances.analyticity;
        metrics.insert("tolerance".into(), tol);
        Ok(CheckReport {
            check: "analyticity".into(),
            passed: worst <= tol,
            error: None,
            csv: vec![("analyticity".into(), metric_csv(&metrics.iter().map(|(k, v)| (k.as_str(), *v)).collect::<Vec<_>>()))],
            metrics,
            details,
        })
    }

    fn solve(&self) -> Result<CheckReport> {
        let tol = &self.sc.tolerances;
        let pairs: Vec<(Vec3, Vec3)> = pairs_of(self.sc).into_iter().map(|(r, rp)| (self.grid.place_source(r), self.grid.place_source(rp))).collect();
        let mut rows = Vec::new();
        let mut csv = String::from("omega,pair,method,iterations,spectral_radius,condition_estimate,vacuum_identity,born_direct,reality,reciprocity\n");
        let (mut w_id, mut w_bd, mut w_real, mut w_rec) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
        let mut born_skipped = 0usize;
        for &w in &self.omegas {
            let om = Complex64::new(w, 0.0);
            let anchor = pairs[0].1;
            let solver = GreenSolver::new(&self.model, &self.grid, om, self.config, anchor)?;
            let mirror = GreenSolver::new(&self.model, &self.grid, -om, self.config, anchor)?;
            let sources: Vec<Vec3> = pairs.iter().flat_map(|p| [p.1, p.0]).collect();
            let fields = solver.solve_g_many(&sources)?;
            let (_, report) = solver.solve_g(pairs[0].1)?;
            let conj_fields = mirror.solve_g_many(&sources)?;
            let born = if self.grid.n <= DENSE_CAP {
                let b = GreenSolver::new(&self.model, &self.grid, om, self.config.with_method(SolverMethod::Born), anchor)?;
                match b.solve_g_many(&sources) {
                    Ok(f) => Some(f),
                    Err(Error::BornDivergent { .. }) => {
                        born_skipped += 1;
                        None
                    }
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            for (k, &(r, rp)) in pairs.iter().enumerate() {
                let g_rp = &fields[2 * k];
                let g_r = &fields[2 * k + 1];
                let identity = if solver.operator.is_zero() {
                    let exact: Vec<Tensor3> = (0..self.grid.len())
                        .map(|a| Ok(free_dyadic_g0(&self.model, self.grid.point(a), rp, &solver.wavenumbers)?.value))
                        .collect::<Result<_>>()?;
                    let diff = g_rp.values.iter().zip(&exact).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max);
                    Some(diff / exact.iter().map(Tensor3::max_abs).fold(0.0, f64::max))
                } else {
                    None
                };
                let bd = born.as_ref().map(|b| b[2 * k].relative_difference(g_rp));
                let reality = {
                    let c = &conj_fields[2 * k];
                    let diff = c.values.iter().zip(&g_rp.values).map(|(a, b)| (*a - b.conj()).max_abs()).fold(0.0, f64::max);
                    diff / g_rp.max_abs()
                };
                let forward = solver.interpolate_g(g_rp, r)?;
                let backward = solver.interpolate_g(g_r, rp)?;
                let reciprocity = crate::integral_solver::reciprocity_check(&forward, &backward);
                w_id = w_id.max(identity.unwrap_or(0.0));
                w_bd = w_bd.max(bd.unwrap_or(0.0));
                w_real = w_real.max(reality);
                w_rec = w_rec.max(reciprocity);
                csv.push_str(&format!(
                    "{w:e},{k},{},{},{},{},{},{},{reality:e},{reciprocity:e}\n",
                    report.method,
                    report.iterations,
                    report.spectral_radius.map_or(String::new(), |x| format!("{x:e}")),
                    report.condition_estimate.map_or(String::new(), |x| format!("{x:e}")),
                    identity.map_or(String::new(), |x| format!("{x:e}")),
                    bd.map_or(String::new(), |x| format!("{x:e}")),
                ));
                rows.push(json!({
                    "omega": w, "pair": k, "r_m": r, "r_prime_m": rp, "report": report,
                    "vacuum_identity": identity, "born_direct": bd, "reality": reality, "reciprocity": reciprocity,
                }));
            }
        }
        let passed = w_id <= tol.identity && w_bd <= tol.born_direct && w_real <= tol.reality && w_rec <= tol.reciprocity;
        Ok(CheckReport {
            check: "solve".into(),
            passed,
            error: None,
            metrics: BTreeMap::from([
                ("vacuum_identity".into(), w_id),
                ("born_direct".into(), w_bd),
                ("reality".into(), w_real),
                ("reciprocity".into(), w_rec),
            ]),
            details: json!({
                "grid": self.grid, "reference": self.config.reference, "born_skipped_frequencies": born_skipped,
                "tolerances": { "identity": tol.identity, "born_direct": tol.born_direct, "reality": tol.reality, "reciprocity": tol.reciprocity },
                "samples": rows,
            }),
            csv: vec![("solve".into(), csv)],
        })
    }

    fn ladder(&self) -> Result<CutoffLadder> {
        match &self.sc.settings.cutoffs {
            Some(c) => CutoffLadder::new(c.clone()),
            None => Ok(CutoffLadder::decade(10.0 * self.sc.frequency_scale())),
        }
    }

    fn ladder_settings(&self) -> LadderSettings {
        LadderSettings {
            regulator: Regulator::AbelPoisson { order: 2 },
            route: Route::Residue { nodes: self.sc.settings.residue_nodes },
            tolerance: self.sc.tolerances.sumrule,
            min_exponent: self.sc.tolerances.sumrule_min_exponent,
            ..LadderSettings::default()
        }
    }

    fn sumrule(&self) -> Result<CheckReport> {
        let ladder = self.ladder()?;
        let settings = self.ladder_settings();
        let pairs = pairs_of(self.sc);
        let reports: Vec<SumRuleReport> = if self.model.is_homogeneous() {
            pairs
                .iter()
                .enumerate()
                .map(|(k, (r, rp))| {
                    let mut rep = bulk_sum_rule(norm(sub(*r, *rp)), &self.model, &ladder, &settings, &self.units)?;
                    rep.name = format!("bulk[{k}]");
                    Ok(rep)
                })
                .collect::<Result<_>>()?
        } else {
            sum_rule_ladders(&self.model, &self.grid, &pairs, &[G1Part::Full, G1Part::KernelTerm], &ladder, &settings, self.config)?
        };
        let passed = reports.iter().all(|r| r.passed && r.is_monotone());
        let min_exp = reports.iter().map(|r| r.fitted_exponent.unwrap_or(f64::INFINITY)).fold(f64::INFINITY, f64::min);
        let worst_limit = reports.iter().map(|r| if r.scale > 0.0 { r.extrapolated_limit / r.scale } else { 0.0 }).fold(0.0, f64::max);
        let csv = reports.iter().map(|r| (format!("sumrule.{}", file_safe(&r.name)), r.to_csv())).collect();
        Ok(CheckReport {
            check: "sumrule".into(),
            passed,
            error: None,
            metrics: BTreeMap::from([("min_exponent".into(), min_exp), ("max_relative_limit".into(), worst_limit)]),
            details: json!({ "homogeneous_medium": self.model.is_homogeneous(), "reports": reports }),
            csv,
        })
    }

    fn curl(&self) -> Result<CheckReport> {
        let spec = self.sc.settings.curl.clone();
        let first = pairs_of(self.sc).first().copied();
        let pick = |o: Option<Vec3>, f: fn((Vec3, Vec3)) -> Vec3| o.or(first.map(f)).ok_or_else(|| Error::InvalidArgument("curl needs points".into()));
        let r = pick(spec.as_ref().and_then(|c| c.r_m), |p| p.0)?;
        let rp = pick(spec.as_ref().and_then(|c| c.r_prime_m), |p| p.1)?;
        let w = spec.as_ref().and_then(|c| c.omega).unwrap_or(self.omegas[self.omegas.len() / 2]);
        let report = curl_elimination_check(&self.model, &self.grid, Complex64::new(w, 0.0), r, rp, self.config)?;
        let tol = self.sc.tolerances.curl;
        Ok(CheckReport {
            check: "curl".into(),
            passed: report.ratio <= tol,
            error: None,
            metrics: BTreeMap::from([("ratio".into(), report.ratio), ("g2_curl".into(), report.g2_curl), ("g1_curl".into(), report.g1_curl)]),
            csv: vec![(
                "curl".into(),
                metric_csv(&[("h", report.h), ("g2_curl", report.g2_curl), ("g1_curl", report.g1_curl), ("g_curl", report.g_curl), ("g_minus_g1_curl", report.g_minus_g1_curl), ("ratio", report.ratio)]),
            )],
            details: json!({ "omega": w, "r_m": r, "r_prime_m": rp, "tolerance": tol, "report": report }),
        })
    }

    fn noise(&self) -> Result<CheckReport> {
        let mut points = self.grid.points();
        points.extend(self.sample_points());
        let mut csv = String::from("x,y,z,omega,eps_imag,commutator_density,symmetrized_density,gain\n");
        let (mut samples, mut gain, mut incoherent) = (0usize, 0usize, 0usize);
        for &w in &self.omegas {
            for &p in &points {
                let s = noise_spectrum(&self.model, p, w, &self.units)?;
                samples += 1;
                gain += s.gain as usize;
                incoherent += (!s.is_sign_coherent()) as usize;
                csv.push_str(&format!(
                    "{:e},{:e},{:e},{w:e},{:e},{:e},{:e},{}\n",
                    p[0], p[1], p[2], s.eps_imag, s.commutator_density, s.symmetrized_density, s.gain
                ));
            }
        }
        let h = self.grid.spacing();
        let dir = self.sc.settings.noise_direction;
        let dn = norm(dir);
        let dir = [dir[0] / dn, dir[1] / dn, dir[2] / dn];
        let mut charges = Vec::new();
        for p in self.sample_points() {
            for &w in &self.omegas {
                let q = noise_charge_spectrum(&self.model, p, w, h, dir)?;
                charges.push(json!({ "r_m": p, "omega": w, "re": q.re, "im": q.im }));
            }
        }
        Ok(CheckReport {
            check: "noise".into(),
            passed: incoherent == 0,
            error: None,
            metrics: BTreeMap::from([("samples".into(), samples as f64), ("gain_samples".into(), gain as f64), ("incoherent".into(), incoherent as f64)]),
            details: json!({ "samples": samples, "gain_samples": gain, "incoherent_samples": incoherent, "direction": dir, "charge": charges }),
            csv: vec![("noise".into(), csv)],
        })
    }

    fn unequal_time(&self) -> Result<CheckReport> {
        let (r, rp) = pairs_of(self.sc)[0];
        let d = norm(sub(r, rp));
        let sigma = self.sc.settings.sigma.unwrap_or(10.0 * self.units.c / d);
        let resp = self.first_pair_response()?;
        let rep = regulated_causality(resp.as_ref(), d, sigma, self.sc.settings.time_node_budget, &self.units)?;
        let tol = &self.sc.tolerances;
        let mut csv = String::from("tau,abs_kernel\n");
        for (t, v) in &rep.curve {
            csv.push_str(&format!("{t:e},{v:e}\n"));
        }
        Ok(CheckReport {
            check: "unequal_time".into(),
            passed: rep.suppression >= tol.causality_suppression && rep.evenness_error <= tol.evenness,
            error: None,
            metrics: BTreeMap::from([("suppression".into(), rep.suppression), ("evenness_error".into(), rep.evenness_error)]),
            details: json!({ "report": rep, "tolerances": { "suppression": tol.causality_suppression, "evenness": tol.evenness } }),
            csv: vec![("unequal_time".into(), csv)],
        })
    }
}

fn metric_csv(items: &[(&str, f64)]) -> String {
    let mut s = String::from("metric,value\n");
    for (k, v) in items {
        s.push_str(&format!("{k},{v:e}\n"));
    }
    s
}

fn file_safe(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '-' { c } else { '-' }).collect::<String>().trim_matches('-').to_string()
}
