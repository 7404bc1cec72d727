//! Self-describing output files: every CSV starts with `#` lines carrying
//! the build identifier and the resolved configuration, and every JSON file
//! embeds both.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Error, Result};

/// `git describe`-style identifier of this build.
pub const BUILD_ID: &str = env!("OOSCAM_BUILD_ID");

/// Comment lines for a CSV header.
pub fn csv_comments<C: Serialize>(config: &C) -> Vec<String> {
    vec![
        format!("build: {BUILD_ID}"),
        format!(
            "config: {}",
            serde_json::to_string(config).expect("config serializes")
        ),
    ]
}

/// `build` and `config` entries for a JSON document.
pub fn json_provenance<C: Serialize>(config: &C) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("build".into(), Value::String(BUILD_ID.into()));
    m.insert(
        "config".into(),
        serde_json::to_value(config).expect("config serializes"),
    );
    m
}

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("value serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}
