//! Claim reports: the unit every check and sweep produces.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One counterexample, stored as the inputs needed to re-run it plus the
/// observed quantities. Keys serialize in sorted order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Violation(pub BTreeMap<String, Value>);

impl Violation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_owned(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.get(key)
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(Value::as_u64)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(Value::as_f64)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.0.get(key).and_then(Value::as_str)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Confirmed,
    ViolationsFound,
    UndefinedCases,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "CONFIRMED",
            Verdict::ViolationsFound => "VIOLATIONS FOUND",
            Verdict::UndefinedCases => "UNDEFINED CASES",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub range: String,
    pub tested: u64,
    pub undefined: u64,
    pub violations: Vec<Violation>,
    pub stats: BTreeMap<String, f64>,
    /// Wall-clock time; kept out of serialized reports so identical runs
    /// stay byte-identical.
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl ClaimReport {
    pub fn new(claim_id: &str, range: impl Into<String>) -> Self {
        ClaimReport {
            claim_id: claim_id.to_owned(),
            range: range.into(),
            tested: 0,
            undefined: 0,
            violations: Vec::new(),
            stats: BTreeMap::new(),
            runtime_ms: 0,
        }
    }

    pub fn stat(&mut self, key: &str, value: f64) {
        self.stats.insert(key.to_owned(), value);
    }

    pub fn bump(&mut self, key: &str, by: f64) {
        *self.stats.entry(key.to_owned()).or_insert(0.0) += by;
    }

    pub fn verdict(&self) -> Verdict {
        if !self.violations.is_empty() {
            Verdict::ViolationsFound
        } else if self.undefined > 0 {
            Verdict::UndefinedCases
        } else {
            Verdict::Confirmed
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    /// Appends another partial report for the same claim. Callers merge
    /// partials in input order.
    pub fn absorb(&mut self, other: ClaimReport) {
        self.tested += other.tested;
        self.undefined += other.undefined;
        self.violations.extend(other.violations);
        for (k, v) in other.stats {
            *self.stats.entry(k).or_insert(0.0) += v;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Violations flattened one per row; columns are the union of keys.
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut columns: Vec<&str> = self
            .violations
            .iter()
            .flat_map(|v| v.0.keys().map(String::as_str))
            .collect();
        columns.sort_unstable();
        columns.dedup();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["claim_id", "index"];
        header.extend(&columns);
        w.write_record(&header)?;
        for (i, v) in self.violations.iter().enumerate() {
            let mut row = vec![self.claim_id.clone(), i.to_string()];
            row.extend(columns.iter().map(|c| match v.get(c) {
                None => String::new(),
                Some(Value::String(s)) => s.clone(),
                Some(other) => other.to_string(),
            }));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
