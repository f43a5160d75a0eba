use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// The claim does not apply (e.g. the bounded branch of a dichotomy).
    Exempt,
    Pass,
    /// The sampled data cannot decide the claim.
    Inconclusive,
    Fail,
}

impl Status {
    pub fn is_ok(self) -> bool {
        matches!(self, Status::Pass | Status::Exempt)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Exempt => "exempt",
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        };
        f.write_str(s)
    }
}

/// Outcome of one numerical check.
///
/// `margin` is the smallest signed slack of the checked inequality (positive
/// means satisfied); `metrics` holds named auxiliary numbers in sorted order
/// so serialized reports are reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub margin: f64,
    pub detail: String,
    pub metrics: BTreeMap<String, f64>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, status: Status, margin: f64) -> Self {
        CheckReport {
            name: name.into(),
            status,
            margin,
            detail: String::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn metric(mut self, key: &str, value: f64) -> Self {
        self.metrics.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.metrics.get(key).copied()
    }

    pub fn passed(&self) -> bool {
        self.status.is_ok()
    }

    /// Worst status and smallest margin of the parts; details are joined.
    pub fn combine(name: impl Into<String>, parts: &[CheckReport]) -> Self {
        let status = parts
            .iter()
            .map(|p| p.status)
            .max()
            .unwrap_or(Status::Inconclusive);
        let margin = parts
            .iter()
            .map(|p| p.margin)
            .filter(|m| !m.is_nan())
            .fold(f64::INFINITY, f64::min);
        let detail = parts
            .iter()
            .filter(|p| !p.status.is_ok())
            .map(|p| format!("{}: {} ({})", p.name, p.status, p.detail))
            .collect::<Vec<_>>()
            .join("; ");
        CheckReport::new(
            name,
            status,
            if margin.is_finite() { margin } else { f64::NAN },
        )
        .with_detail(detail)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] margin={:.6e}",
            self.name, self.status, self.margin
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combine_takes_worst() {
        let a = CheckReport::new("a", Status::Pass, 1.0);
        let b = CheckReport::new("b", Status::Inconclusive, 0.5);
        let c = CheckReport::new("c", Status::Exempt, f64::NAN);
        let all = CheckReport::combine("all", &[a.clone(), b, c.clone()]);
        assert_eq!(all.status, Status::Inconclusive);
        assert_eq!(all.margin, 0.5);
        assert_eq!(
            CheckReport::combine("x", &[c.clone(), c]).status,
            Status::Exempt
        );
        assert!(CheckReport::combine("y", &[a]).passed());
    }
}
