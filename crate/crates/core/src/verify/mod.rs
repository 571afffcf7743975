//! Reproducible numerical checks of the smoothing estimates and the identities
//! behind them.
//!
//! Every check returns an [`EstimateReport`]: a list of labelled ratios, a set
//! of auxiliary conditions (trend slopes, per-level identities, cross-checks)
//! and a status. Equality checks compare each ratio with its target using a
//! two-sided tolerance. Inequality checks record empirical constants and pass
//! when the ratios stay below a generous cap and show no growth trend in `k`.
//! A doubling-gate failure anywhere makes the report inconclusive.

mod checks;

pub use checks::*;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::quadrature::RuleSizes;

/// Cap on the log-log slope of the running maximum of a ratio sequence.
pub const TREND_SLOPE_LIMIT: f64 = 0.05;

/// Default cap for inequality ratios. The estimates only assert that some
/// constant exists, so this is a sanity bound, not a claimed value.
pub const DEFAULT_BOUND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateId {
    OddIdentity,
    Radial3dIdentity,
    KatoNd,
    KernelBound,
    OperatorNorm,
    Morawetz2d,
    Even3d,
    HermiteSobolev,
    Collapse9d,
    AntiderivNorms,
    AppendixIdentities,
}

impl EstimateId {
    pub const ALL: [EstimateId; 11] = [
        EstimateId::OddIdentity,
        EstimateId::Radial3dIdentity,
        EstimateId::KatoNd,
        EstimateId::KernelBound,
        EstimateId::OperatorNorm,
        EstimateId::Morawetz2d,
        EstimateId::Even3d,
        EstimateId::HermiteSobolev,
        EstimateId::Collapse9d,
        EstimateId::AntiderivNorms,
        EstimateId::AppendixIdentities,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EstimateId::OddIdentity => "odd_identity",
            EstimateId::Radial3dIdentity => "radial_3d_identity",
            EstimateId::KatoNd => "kato_nd",
            EstimateId::KernelBound => "kernel_bound",
            EstimateId::OperatorNorm => "operator_norm",
            EstimateId::Morawetz2d => "morawetz_2d",
            EstimateId::Even3d => "even_3d",
            EstimateId::HermiteSobolev => "hermite_sobolev",
            EstimateId::Collapse9d => "collapse_9d",
            EstimateId::AntiderivNorms => "antideriv_norms",
            EstimateId::AppendixIdentities => "appendix_identities",
        }
    }

    /// Equality ids compare against a known value; the rest are bounds.
    pub fn is_equality(self) -> bool {
        matches!(
            self,
            EstimateId::OddIdentity
                | EstimateId::Radial3dIdentity
                | EstimateId::AntiderivNorms
                | EstimateId::AppendixIdentities
        )
    }
}

impl std::fmt::Display for EstimateId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Passed,
    Failed,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub ratio: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// A side condition of a check that is not itself a ratio sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub name: String,
    pub estimate_id: EstimateId,
    pub parameters: BTreeMap<String, Value>,
    pub samples: Vec<Sample>,
    pub conditions: Vec<Condition>,
    pub sup_ratio: f64,
    pub tolerance: f64,
    pub status: Status,
    pub passed: bool,
    /// Why the report is inconclusive, if it is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl EstimateReport {
    pub fn seed(&self) -> Option<u64> {
        self.parameters.get("seed").and_then(Value::as_u64)
    }
}

/// Options shared by every check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Largest level; `None` picks the per-check default.
    pub k_max: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Multiplies rule sizes; the doubling gate compares against twice this.
    pub rule_scale: f64,
    /// Overrides the per-check tolerance.
    pub tol: Option<f64>,
    /// Overrides [`DEFAULT_BOUND`].
    pub bound: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            k_max: None,
            trials: 16,
            seed: 42,
            rule_scale: 1.0,
            tol: None,
            bound: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rule_scale > 0.0) || !self.rule_scale.is_finite() {
            return Err(Error::input(format!(
                "rule scale must be positive, got {}",
                self.rule_scale
            )));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::input(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(b) = self.bound {
            if !(b > 0.0) {
                return Err(Error::input(format!("bound must be positive, got {b}")));
            }
        }
        if self.trials == 0 {
            return Err(Error::input("at least one trial is required"));
        }
        Ok(())
    }

    pub fn k_max_or(&self, default: usize) -> usize {
        self.k_max.unwrap_or(default)
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn bound(&self) -> f64 {
        self.bound.unwrap_or(DEFAULT_BOUND)
    }

    /// Integer refinement factor for the exact Gauss rules.
    pub fn refine(&self) -> usize {
        (self.rule_scale.round() as usize).max(1)
    }

    pub fn sizes(&self) -> RuleSizes {
        RuleSizes::default().scaled(self.rule_scale)
    }
}

/// Least-squares slope of `log M_k` against `log k`, where `M_k` is the running
/// maximum of `values` over `k ≥ 1`. Returns 0 with fewer than two points.
pub fn trend_slope(ks: &[usize], values: &[f64]) -> f64 {
    let mut running = f64::NEG_INFINITY;
    let mut points = Vec::new();
    for (&k, &v) in ks.iter().zip(values) {
        running = running.max(v);
        if k >= 1 && running > 0.0 {
            points.push(((k as f64).ln(), running.ln()));
        }
    }
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Accumulates samples and conditions, then settles the status.
#[derive(Debug)]
pub(crate) struct ReportBuilder {
    name: String,
    id: EstimateId,
    parameters: BTreeMap<String, Value>,
    samples: Vec<Sample>,
    conditions: Vec<Condition>,
    tolerance: f64,
    diagnostic: Option<String>,
}

impl ReportBuilder {
    pub(crate) fn new(name: impl Into<String>, id: EstimateId, cfg: &ScanConfig, tolerance: f64) -> Self {
        let mut parameters = BTreeMap::new();
        parameters.insert("seed".to_string(), Value::from(cfg.seed));
        parameters.insert("trials".to_string(), Value::from(cfg.trials));
        parameters.insert("rule_scale".to_string(), Value::from(cfg.rule_scale));
        Self {
            name: name.into(),
            id,
            parameters,
            samples: Vec::new(),
            conditions: Vec::new(),
            tolerance,
            diagnostic: None,
        }
    }

    pub(crate) fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    /// `|ratio − target| ≤ tol · scale`.
    pub(crate) fn equal(&mut self, label: impl Into<String>, ratio: f64, target: f64, tol: f64, scale: f64) {
        let passed = (ratio - target).abs() <= tol * scale;
        self.samples.push(Sample {
            label: label.into(),
            ratio,
            tolerance: tol,
            passed,
        });
    }

    /// `ratio ≤ limit`.
    pub(crate) fn at_most(&mut self, label: impl Into<String>, ratio: f64, limit: f64) {
        self.samples.push(Sample {
            label: label.into(),
            ratio,
            tolerance: limit,
            passed: ratio <= limit,
        });
    }

    pub(crate) fn sample(&mut self, label: impl Into<String>, ratio: f64, tolerance: f64, passed: bool) {
        self.samples.push(Sample {
            label: label.into(),
            ratio,
            tolerance,
            passed: passed && ratio.is_finite(),
        });
    }

    pub(crate) fn condition(&mut self, name: impl Into<String>, value: f64, limit: f64, passed: bool) {
        self.conditions.push(Condition {
            name: name.into(),
            value,
            limit,
            passed,
        });
    }

    pub(crate) fn trend(&mut self, name: &str, ks: &[usize], values: &[f64]) {
        let slope = trend_slope(ks, values);
        self.condition(
            format!("{name} trend slope"),
            slope,
            TREND_SLOPE_LIMIT,
            slope <= TREND_SLOPE_LIMIT,
        );
    }

    /// Turns a tolerance error into an inconclusive report; other errors
    /// propagate.
    pub(crate) fn gate<T>(&mut self, value: Result<T>) -> Result<Option<T>> {
        match value {
            Ok(v) => Ok(Some(v)),
            Err(e @ Error::Tolerance { .. }) | Err(e @ Error::NoConvergence { .. }) => {
                if self.diagnostic.is_none() {
                    self.diagnostic = Some(e.to_string());
                }
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }

    pub(crate) fn finish(self) -> EstimateReport {
        let sup_ratio = self.samples.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max);
        let all_ok = self.samples.iter().all(|s| s.passed) && self.conditions.iter().all(|c| c.passed);
        let status = if self.diagnostic.is_some() {
            Status::Inconclusive
        } else if all_ok && !self.samples.is_empty() {
            Status::Passed
        } else {
            Status::Failed
        };
        EstimateReport {
            name: self.name,
            estimate_id: self.id,
            parameters: self.parameters,
            samples: self.samples,
            conditions: self.conditions,
            sup_ratio: if sup_ratio.is_finite() { sup_ratio } else { 0.0 },
            tolerance: self.tolerance,
            passed: status == Status::Passed,
            status,
            diagnostic: self.diagnostic,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_running_max() {
        let ks: Vec<usize> = (1..=20).collect();
        let flat: Vec<f64> = ks.iter().map(|_| 3.0).collect();
        assert_eq!(trend_slope(&ks, &flat), 0.0);
        let growing: Vec<f64> = ks.iter().map(|&k| (k as f64).sqrt()).collect();
        assert!((trend_slope(&ks, &growing) - 0.5).abs() < 1e-12);
        let decaying: Vec<f64> = ks.iter().map(|&k| 1.0 / k as f64).collect();
        assert_eq!(trend_slope(&ks, &decaying), 0.0);
        assert_eq!(trend_slope(&[0, 1], &[1.0, 2.0]), 0.0);
    }

    #[test]
    fn builder_status() {
        let cfg = ScanConfig::default();
        let mut b = ReportBuilder::new("x", EstimateId::KatoNd, &cfg, 1e-9);
        b.at_most("a", 1.0, 2.0);
        b.equal("b", 2.0, 2.0 + 1e-12, 1e-9, 1.0);
        let r = b.finish();
        assert_eq!(r.status, Status::Passed);
        assert_eq!(r.sup_ratio, 2.0);
        assert_eq!(r.seed(), Some(42));

        let mut b = ReportBuilder::new("x", EstimateId::KatoNd, &cfg, 1e-9);
        b.at_most("a", 3.0, 2.0);
        assert_eq!(b.finish().status, Status::Failed);

        let mut b = ReportBuilder::new("x", EstimateId::KatoNd, &cfg, 1e-9);
        b.at_most("a", 1.0, 2.0);
        let gated: Option<f64> = b
            .gate(Err(Error::Tolerance {
                what: "w".into(),
                coarse: 1.0,
                fine: 2.0,
                tolerance: 1e-9,
            }))
            .unwrap();
        assert!(gated.is_none());
        let r = b.finish();
        assert_eq!(r.status, Status::Inconclusive);
        assert!(!r.passed);

        let mut b = ReportBuilder::new("x", EstimateId::KatoNd, &cfg, 1e-9);
        assert!(b.gate::<f64>(Err(Error::Input("bad".into()))).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ScanConfig::default().validate().is_ok());
        assert!(ScanConfig {
            rule_scale: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ScanConfig {
            tol: Some(-1.0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ScanConfig {
            trials: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert_eq!(
            ScanConfig {
                rule_scale: 2.4,
                ..Default::default()
            }
            .refine(),
            2
        );
    }
}
