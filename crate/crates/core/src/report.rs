use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sidedness {
    TwoSided,
    OneSidedLower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    NotReject,
}

/// Which null hypothesis a p-value refers to. The same statistic means
/// different things under different nulls, so every report carries one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullDescriptor {
    pub model: String,
    pub constraint: String,
    pub variant: String,
    pub parameters: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl NullDescriptor {
    pub fn new(model: &str, constraint: &str, variant: &str) -> Self {
        Self {
            model: model.into(),
            constraint: constraint.into(),
            variant: variant.into(),
            parameters: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.into(), value);
        self
    }

    pub fn note(mut self, text: &str) -> Self {
        self.notes.push(text.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub statistic: String,
    pub observed: f64,
    pub z: f64,
    pub p_value: f64,
    pub null: NullDescriptor,
    pub alpha: f64,
    pub decision: Decision,
    pub sidedness: Sidedness,
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// p-value of a standard-normal z-score.
pub fn normal_p_value(z: f64, sidedness: Sidedness) -> f64 {
    match sidedness {
        Sidedness::TwoSided => (2.0 * normal_cdf(-z.abs())).min(1.0),
        Sidedness::OneSidedLower => normal_cdf(z),
    }
}

impl TestReport {
    /// Builds a report from a z-score assumed standard normal under the null.
    pub fn from_z(
        statistic: &str,
        observed: f64,
        z: f64,
        null: NullDescriptor,
        alpha: f64,
        sidedness: Sidedness,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        let p_value = normal_p_value(z, sidedness);
        let decision = if p_value < alpha { Decision::Reject } else { Decision::NotReject };
        Ok(Self { statistic: statistic.into(), observed, z, p_value, null, alpha, decision, sidedness })
    }

    pub fn rejected(&self) -> bool {
        self.decision == Decision::Reject
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn null() -> NullDescriptor {
        NullDescriptor::new("test", "none", "none")
    }

    #[test]
    fn decisions() {
        let r = TestReport::from_z("H1", 1.0, 0.0, null(), 0.05, Sidedness::TwoSided).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.decision, Decision::NotReject);
        let r = TestReport::from_z("H1", 0.0, -2.5, null(), 0.05, Sidedness::TwoSided).unwrap();
        assert!(r.rejected());
        let r = TestReport::from_z("H1", 0.0, 2.5, null(), 0.05, Sidedness::OneSidedLower).unwrap();
        assert!(!r.rejected());
        assert!(TestReport::from_z("H1", 0.0, 0.0, null(), 1.0, Sidedness::TwoSided).is_err());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let r = TestReport::from_z("H1", 0.8123456789012345, -1.61, null().with("n", 10.0), 0.05, Sidedness::TwoSided)
            .unwrap();
        let a = serde_json::to_string_pretty(&r).unwrap();
        let back: TestReport = serde_json::from_str(&a).unwrap();
        assert_eq!(back, r);
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), a);
    }
}
