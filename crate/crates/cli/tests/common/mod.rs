#![allow(dead_code)]

use std::process::Command;

use jsonschema::JSONSchema;
use serde_json::Value;

pub const WORKED: [&str; 12] = [
    "--r", "4", "--k2", "1", "--m0", "1", "--mk2", "0.5833333333", "--mrm2", "0.5", "--mr", "1",
];

pub struct Run {
    pub stdout: String,
    pub code: i32,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", self.stdout))
    }
}

pub fn kolmo(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_kolmo"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
        code: out.status.code().expect("exit code"),
    }
}

/// `WORKED` with one flag value replaced.
pub fn worked_with(flag: &str, value: &str) -> Vec<String> {
    let mut args: Vec<String> = WORKED.iter().map(|s| s.to_string()).collect();
    let i = args.iter().position(|a| a == flag).expect("known flag");
    args[i + 1] = value.to_string();
    args
}

pub fn schema() -> JSONSchema {
    let text = include_str!("../../schema/envelope.schema.json");
    let value: Value = serde_json::from_str(text).expect("schema is JSON");
    JSONSchema::compile(&value).expect("schema compiles")
}

/// Error messages of the envelope against the shipped schema.
pub fn schema_errors(schema: &JSONSchema, envelope: &Value) -> Vec<String> {
    match schema.validate(envelope) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    }
}

/// `(t, value)` pairs of an `eval` CSV table.
pub fn parse_csv(text: &str) -> Vec<(f64, f64)> {
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value"));
    lines
        .map(|l| {
            let (t, v) = l.split_once(',').expect("two columns");
            (t.parse().unwrap(), v.parse().unwrap())
        })
        .collect()
}
