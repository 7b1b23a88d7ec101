//! Certification kernel: covering conditions, colour-class checks, and the
//! per-kind profile checks behind [`verify_certificate`].

mod certificate;
mod class;
mod coverage;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use certificate::{
    check_fan, check_rsqs2star, complete_colorings, gcsts_profile, kf_profile, point_profile, verify_certificate,
    verify_certificate_with, ColoringProfile, Requirement,
};
pub use class::{check_point_coloring, check_resolution, verify_class};
pub use coverage::{naive_coverage_counts, verify_coverage, verify_coverage_with};

/// Maximum number of violations kept in a report.
pub const VIOLATION_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
    /// Total number of violations found, including those beyond the cap.
    pub violation_count: u64,
    pub statistics: BTreeMap<String, u64>,
}

impl Default for VerifyReport {
    fn default() -> Self {
        Self::new()
    }
}

impl VerifyReport {
    pub fn new() -> Self {
        Self { pass: true, violations: Vec::new(), violation_count: 0, statistics: BTreeMap::new() }
    }

    pub fn violate(&mut self, code: &str, witness: impl Into<String>) {
        self.pass = false;
        self.violation_count += 1;
        if self.violations.len() < VIOLATION_CAP {
            self.violations.push(Violation { code: code.to_string(), witness: witness.into() });
        }
    }

    pub fn stat(&mut self, key: &str, value: u64) {
        self.statistics.insert(key.to_string(), value);
    }

    pub fn add_stat(&mut self, key: &str, value: u64) {
        *self.statistics.entry(key.to_string()).or_insert(0) += value;
    }

    /// Appends the violations of `other`; statistics are summed.
    pub fn merge(&mut self, other: VerifyReport) {
        self.pass &= other.pass;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < VIOLATION_CAP {
                self.violations.push(v);
            }
        }
        for (k, v) in other.statistics {
            *self.statistics.entry(k).or_insert(0) += v;
        }
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn first_witness(&self) -> Option<&Violation> {
        self.violations.first()
    }

    /// One-line summary followed by the recorded violations.
    pub fn render(&self) -> String {
        let mut s = if self.pass {
            "PASS".to_string()
        } else {
            format!("FAIL ({} violation{})", self.violation_count, if self.violation_count == 1 { "" } else { "s" })
        };
        for (k, v) in &self.statistics {
            s.push_str(&format!("\n  {k}: {v}"));
        }
        for v in &self.violations {
            s.push_str(&format!("\n  [{}] {}", v.code, v.witness));
        }
        s
    }
}

/// Chromatic index of an STS(v).
pub fn chromatic_profile(v: u32) -> Result<u32> {
    match v % 6 {
        _ if v == 1 => Ok(0),
        3 => Ok((v - 1) / 2),
        1 if v == 7 => Ok(7),
        1 if v == 13 => Ok(8),
        1 => Ok(v.div_ceil(2)),
        _ => Err(Error::InadmissibleOrder(v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chromatic_values() {
        assert_eq!(chromatic_profile(7).unwrap(), 7);
        assert_eq!(chromatic_profile(13).unwrap(), 8);
        assert_eq!(chromatic_profile(9).unwrap(), 4);
        assert_eq!(chromatic_profile(19).unwrap(), 10);
        assert_eq!(chromatic_profile(163).unwrap(), 82);
        assert_eq!(chromatic_profile(3).unwrap(), 1);
        assert!(matches!(chromatic_profile(11), Err(Error::InadmissibleOrder(11))));
    }

    #[test]
    fn report_cap() {
        let mut r = VerifyReport::new();
        for i in 0..40 {
            r.violate("x", i.to_string());
        }
        assert!(!r.pass);
        assert_eq!(r.violations.len(), VIOLATION_CAP);
        assert_eq!(r.violation_count, 40);
    }
}
