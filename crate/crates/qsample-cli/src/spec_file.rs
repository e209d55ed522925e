//! The on-disk spec format: UTF-8 JSON with exactly one of `amplitudes`
//! (a list of `[re, im]` pairs) or `probabilities` (a list of
//! non-negative reals), plus an optional `label`. Unknown fields are
//! rejected.

use num_complex::Complex64;
use qsample::synth::{AmplitudeSpec, SpecOrigin};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub probabilities: Option<Vec<f64>>,
}

pub struct LoadedSpec {
    pub label: Option<String>,
    pub spec: AmplitudeSpec,
}

pub fn load(path: &std::path::Path) -> Result<LoadedSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file: SpecFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("invalid spec file {}: {e}", path.display())))?;

    let spec = match (&file.amplitudes, &file.probabilities) {
        (Some(_), Some(_)) => {
            return Err(CliError::Parse(
                "spec file must contain either amplitudes or probabilities, not both".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Parse(
                "spec file must contain amplitudes or probabilities".into(),
            ))
        }
        (Some(pairs), None) => {
            if pairs.is_empty() {
                return Err(CliError::Parse("amplitudes list is empty".into()));
            }
            for (i, pair) in pairs.iter().enumerate() {
                if !pair[0].is_finite() || !pair[1].is_finite() {
                    return Err(CliError::Parse(format!(
                        "amplitude {i} is not finite"
                    )));
                }
            }
            let values = pairs
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            AmplitudeSpec::from_amplitudes(values).map_err(CliError::Lib)?
        }
        (None, Some(probabilities)) => {
            if probabilities.is_empty() {
                return Err(CliError::Parse("probabilities list is empty".into()));
            }
            AmplitudeSpec::from_probabilities(probabilities.clone()).map_err(CliError::Lib)?
        }
    };

    Ok(LoadedSpec {
        label: file.label,
        spec,
    })
}

pub fn origin_name(origin: SpecOrigin) -> &'static str {
    match origin {
        SpecOrigin::RawAmplitudes => "amplitudes",
        SpecOrigin::Probabilities => "probabilities",
    }
}
