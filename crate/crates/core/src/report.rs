//! Machine-readable check reports with stable field order.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_FORMAT: &str = "descent-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

/// One executed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    #[serde(rename = "ref")]
    pub reference: String,
    pub verdict: Verdict,
    pub expected: Vec<Verdict>,
    pub witness: Option<String>,
    pub detail: serde_json::Value,
    pub digest: String,
}

impl Record {
    pub fn is_expected(&self) -> bool {
        self.expected.contains(&self.verdict)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub unexpected: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DescentReport {
    pub format: String,
    pub scenario: String,
    pub generated_at: u64,
    /// The fully resolved scenario that produced the records.
    pub config: serde_json::Value,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl DescentReport {
    pub fn new(scenario: &str, config: serde_json::Value, records: Vec<Record>, generated_at: u64) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Skip => summary.skip += 1,
            }
            if !r.is_expected() {
                summary.unexpected += 1;
            }
        }
        DescentReport {
            format: REPORT_FORMAT.to_string(),
            scenario: scenario.to_string(),
            generated_at,
            config,
            records,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Report text with the timestamp blanked, for reproducibility checks.
    pub fn canonical(&self) -> String {
        let mut r = self.clone();
        r.generated_at = 0;
        r.to_json()
    }
}

/// First 16 hex digits of the SHA-256 of a JSON value.
pub fn digest(v: &serde_json::Value) -> String {
    let bytes = serde_json::to_vec(v).expect("value serializes");
    let h = Sha256::digest(&bytes);
    hex::encode(&h[..8])
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn digest_is_stable_and_short() {
        let a = digest(&json!({"seed": 1, "window": [0, 4]}));
        assert_eq!(a.len(), 16);
        assert_eq!(a, digest(&json!({"seed": 1, "window": [0, 4]})));
        assert_ne!(a, digest(&json!({"seed": 2, "window": [0, 4]})));
    }

    #[test]
    fn roundtrip_keeps_field_order() {
        let rec = Record {
            id: "x".into(),
            reference: "r".into(),
            verdict: Verdict::Pass,
            expected: vec![Verdict::Pass],
            witness: None,
            detail: json!({}),
            digest: "0".into(),
        };
        let rep = DescentReport::new("s", json!({}), vec![rec], 7);
        let text = rep.to_json();
        let id = text.find("\"id\"").unwrap();
        let rf = text.find("\"ref\"").unwrap();
        let vd = text.find("\"verdict\"").unwrap();
        assert!(id < rf && rf < vd);
        let back: DescentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rep);
        assert!(rep.canonical().contains("\"generated_at\": 0"));
    }
}
