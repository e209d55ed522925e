//! Machine-readable report documents. Field order is fixed by the
//! struct declarations and numbers serialize at full round-trip
//! precision, so identical runs produce byte-identical reports.

use qsample::amplify::AmplificationPlan;
use qsample::sampler::SampleReport;
use qsample::synth::AmplitudeSpec;
use serde::Serialize;

use crate::spec_file::origin_name;

#[derive(Debug, Serialize)]
pub struct Report {
    pub spec: SpecEcho,
    pub plan: PlanBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run: Option<RunBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<AdaptiveBlock>,
    pub tool: ToolBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct SpecEcho {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub origin: &'static str,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub padded_from: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
}

impl SpecEcho {
    pub fn new(label: Option<String>, spec: &AmplitudeSpec) -> Self {
        Self {
            label,
            origin: origin_name(spec.origin()),
            n: spec.register_qubits(),
            size: spec.len(),
            padded_from: spec.padded_from(),
            targets: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PlanBlock {
    pub u: f64,
    pub theta: f64,
    pub eta: usize,
    pub predicted_success: f64,
}

impl From<AmplificationPlan> for PlanBlock {
    fn from(plan: AmplificationPlan) -> Self {
        Self {
            u: plan.u,
            theta: plan.theta,
            eta: plan.eta,
            predicted_success: plan.predicted_success,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunBlock {
    pub iterations: usize,
    pub success_probability: f64,
    pub conditioned_state_error: f64,
    pub conditioned_distribution: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SamplingBlock {
    pub shots: u64,
    pub seed: u64,
    pub accepted: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_distance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dof: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_hit_rate: Option<f64>,
}

impl SamplingBlock {
    pub fn from_report(report: &SampleReport) -> Self {
        Self {
            shots: report.shots,
            seed: report.seed,
            accepted: report.accepted,
            tv_distance: report.stats.map(|s| s.tv_distance),
            chi_square: report.stats.map(|s| s.chi_square),
            dof: report.stats.map(|s| s.degrees_of_freedom),
            target_hit_rate: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct AdaptiveBlock {
    pub seed: u64,
    pub rounds: usize,
    pub total_iterations: usize,
    pub max_rounds: usize,
    pub iteration_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct ToolBlock {
    pub version: &'static str,
    pub rng_name: &'static str,
}

impl ToolBlock {
    pub fn current() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            rng_name: qsample::sampler::RNG_NAME,
        }
    }
}

pub fn timestamp_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}
