use affdual::config::REPORT_VERSION;
use affdual::RunConfig;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "affdual";

/// One raw input of a run, hashed into the report.
pub struct Input {
    pub label: String,
    pub bytes: Vec<u8>,
}

pub fn input_hash(inputs: &[Input]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update(i.label.as_bytes());
        h.update([0]);
        h.update((i.bytes.len() as u64).to_le_bytes());
        h.update(&i.bytes);
    }
    hex::encode(h.finalize())
}

#[derive(Serialize)]
pub struct Report<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub command: &'a str,
    pub arguments: Value,
    pub inputs: Vec<String>,
    pub input_sha256: String,
    pub config: &'a RunConfig,
    pub result: Value,
}

impl<'a> Report<'a> {
    pub fn new(
        command: &'a str,
        arguments: Value,
        inputs: &[Input],
        config: &'a RunConfig,
        result: Value,
    ) -> Self {
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            schema_version: REPORT_VERSION,
            command,
            arguments,
            inputs: inputs.iter().map(|i| i.label.clone()).collect(),
            input_sha256: input_hash(inputs),
            config,
            result,
        }
    }

    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain JSON");
        s.push('\n');
        s
    }
}
