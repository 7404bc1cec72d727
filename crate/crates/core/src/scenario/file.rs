use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Provenance, Scenario};
use crate::astro::{CentralBody, Epoch, KeplerianElements};
use crate::conjunction::CovarianceSpec;
use crate::{Error, Result};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    start_mjd2000: Epoch,
    end_mjd2000: Epoch,
    tca_hint_mjd2000: Epoch,
    fuel_capacity_mps: f64,
    central_body: CentralBody,
    target: KeplerianElements,
    servicer: KeplerianElements,
    debris: KeplerianElements,
    covariance: CovarianceSpec,
    provenance: Provenance,
    /// Free-form run metadata (resolved configuration, build id).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<serde_json::Value>,
}

/// Pretty JSON for a scenario, optionally carrying run metadata.
pub fn scenario_to_json(s: &Scenario, metadata: Option<serde_json::Value>) -> String {
    let file = ScenarioFile {
        schema_version: SCENARIO_SCHEMA_VERSION,
        start_mjd2000: s.start,
        end_mjd2000: s.end,
        tca_hint_mjd2000: s.tca_hint,
        fuel_capacity_mps: s.fuel_capacity,
        central_body: s.body,
        target: s.target,
        servicer: s.servicer,
        debris: s.debris,
        covariance: s.cov,
        provenance: s.provenance.clone(),
        metadata,
    };
    let mut out = serde_json::to_string_pretty(&file).expect("scenario serializes");
    out.push('\n');
    out
}

pub fn scenario_from_json(text: &str, origin: &Path) -> Result<Scenario> {
    let schema = |message: String| Error::Schema {
        path: origin.to_path_buf(),
        message,
    };
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    if file.schema_version != SCENARIO_SCHEMA_VERSION {
        return Err(schema(format!(
            "unsupported schema_version {} (expected {SCENARIO_SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    let s = Scenario {
        target: file.target,
        servicer: file.servicer,
        debris: file.debris,
        start: file.start_mjd2000,
        end: file.end_mjd2000,
        fuel_capacity: file.fuel_capacity_mps,
        cov: file.covariance,
        tca_hint: file.tca_hint_mjd2000,
        body: file.central_body,
        provenance: file.provenance,
    };
    s.validate().map_err(|e| schema(e.to_string()))?;
    Ok(s)
}

pub fn read_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scenario_from_json(&text, path)
}

pub fn write_scenario(
    path: &Path,
    s: &Scenario,
    metadata: Option<serde_json::Value>,
) -> Result<()> {
    std::fs::write(path, scenario_to_json(s, metadata)).map_err(|e| Error::io(path, e))
}
