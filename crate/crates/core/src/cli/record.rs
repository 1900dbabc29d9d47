//! Run summaries printed by every command.

use serde::{Deserialize, Serialize};

use crate::measure::MeasureId;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One flat JSON object per command run. Absent values serialize as `null`
/// so every field is always present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    /// The arguments after the program name, for replay.
    pub args: Vec<String>,
    pub measure: Option<MeasureId>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub gamma: Option<Vec<f64>>,
    pub squared: Option<f64>,
    /// `sqrt(max(squared, 0))`.
    pub root: Option<f64>,
    pub stderr: Option<f64>,
    pub seeds: Vec<u64>,
    pub samples: Option<u64>,
    pub evaluations: Option<u64>,
    pub elapsed_ms: u64,
    pub version: String,
    pub outputs: Vec<String>,
}

impl RunRecord {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        RunRecord {
            command: command.into(),
            args,
            measure: None,
            n: None,
            d: None,
            gamma: None,
            squared: None,
            root: None,
            stderr: None,
            seeds: Vec::new(),
            samples: None,
            evaluations: None,
            elapsed_ms: 0,
            version: VERSION.into(),
            outputs: Vec::new(),
        }
    }

    pub fn set_squared(&mut self, squared: f64) {
        self.squared = Some(squared);
        self.root = Some(squared.max(0.0).sqrt());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_and_field_presence() {
        let mut r = RunRecord::new("disc", vec![]);
        r.set_squared(-1e-18);
        assert_eq!(r.root, Some(0.0));
        r.set_squared(0.25);
        assert_eq!(r.root, Some(0.5));
        let json: serde_json::Value = serde_json::to_value(&r).unwrap();
        let obj = json.as_object().unwrap();
        for key in [
            "command", "measure", "n", "d", "gamma", "squared", "root", "seeds", "samples", "evaluations", "elapsed_ms", "version",
        ] {
            assert!(obj.contains_key(key), "{key}");
        }
        assert!(obj["measure"].is_null());
        let back: RunRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }
}
