//! Machine-readable check reports.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// One verification outcome. `params` is a sorted map so serialization is deterministic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub check: String,
    pub params: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ratio: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Report {
    /// Passes when `residual <= tolerance` (NaN fails).
    pub fn residual(check: impl Into<String>, residual: f64, tolerance: f64) -> Report {
        Report {
            check: check.into(),
            params: Map::new(),
            residual: Some(residual),
            ratio: None,
            tolerance,
            pass: residual <= tolerance,
            note: None,
        }
    }

    /// Passes when `ratio >= 1 - tolerance`.
    pub fn ratio(check: impl Into<String>, ratio: f64, tolerance: f64) -> Report {
        Report {
            check: check.into(),
            params: Map::new(),
            residual: None,
            ratio: Some(ratio),
            tolerance,
            pass: ratio >= 1.0 - tolerance,
            note: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Report {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Report {
        self.note = Some(note.into());
        self
    }

    /// Overrides the verdict, e.g. for checks whose pass rule is not a plain threshold.
    pub fn with_pass(mut self, pass: bool) -> Report {
        self.pass = pass;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert!(Report::residual("a", 1e-9, 1e-8).pass);
        assert!(!Report::residual("a", f64::NAN, 1e-8).pass);
        assert!(Report::ratio("b", 1.0 - 1e-7, 1e-6).pass);
        assert!(!Report::ratio("b", 0.9, 1e-6).pass);
    }

    #[test]
    fn serialization_is_sorted_and_compact() {
        let r = Report::residual("plancherel", 0.5, 1.0)
            .with("theta2", 0.7)
            .with("chi1", 0.5);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            r#"{"check":"plancherel","params":{"chi1":0.5,"theta2":0.7},"residual":0.5,"tolerance":1.0,"pass":true}"#
        );
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
