//! Frequency-domain verification: regulated sum rules along cutoff ladders,
//! contour holomorphy sweeps, curl elimination of the source-gradient part,
//! unequal-time kernels and noise-current densities.

mod bulk;
mod curl;
mod ladder;
mod noise;
mod response;
mod sweep;
mod terms;
mod unequal;

pub use bulk::bulk_sum_rule;
pub use curl::{curl_elimination_check, discrete_curl, discrete_curl_of_gradient, CurlReport};
pub use ladder::{
    fit_exponent, fold_real_axis, regulated_integral, run_ladder, CutoffLadder, FrequencyQuadrature, LadderSettings, Regulator, Route,
    SumRuleReport,
};
pub use noise::{charge_from_current, noise_charge_spectrum, noise_spectrum, NoiseSpectrum, OperatorRole};
pub use response::{FrequencyResponse, G1Part, HomogeneousG1, SolverG1};
pub use sweep::{analyticity_sweep, analyticity_sweep_with, far_edge_max};
pub use terms::{commutator_sum_rule, kernel_term, sum_rule_ladders};
pub use unequal::{regulated_causality, unequal_time_kernel, unequal_time_kernels, CausalityReport, UnequalTimeKernel};
