use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// How `error` was derived from `value` and `reference`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `|value − reference| / max(|reference|, tiny)`.
    Relative,
    /// `|value − reference|`.
    Absolute,
    /// `|value − reference| / σ`, with `σ` the combined standard error.
    ZScore,
    /// Kolmogorov-Smirnov statistic against its critical value.
    Ks,
}

/// Outcome of one check. `pass` is exactly `error ≤ tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub value: f64,
    pub reference: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub metric: Metric,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Draws, quadrature nodes or trials behind the value.
    pub count: u64,
    /// Wall time; not serialized so that reports are reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        VerificationReport {
            check: check.into(),
            params: BTreeMap::new(),
            value: f64::NAN,
            reference: f64::NAN,
            abs_error: f64::NAN,
            rel_error: f64::NAN,
            metric: Metric::Absolute,
            error: f64::NAN,
            tolerance: 0.0,
            pass: false,
            count: 0,
            runtime: Duration::ZERO,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn count(mut self, n: u64) -> Self {
        self.count = n;
        self
    }

    /// Fills the error fields; `sigma` is only used by [`Metric::ZScore`] and
    /// `error` is given directly for [`Metric::Ks`].
    pub fn compare(mut self, value: f64, reference: f64, metric: Metric, tolerance: f64, sigma: f64) -> Self {
        self.value = value;
        self.reference = reference;
        self.abs_error = (value - reference).abs();
        self.rel_error = self.abs_error / reference.abs().max(f64::MIN_POSITIVE);
        self.metric = metric;
        self.error = match metric {
            Metric::Relative => self.rel_error,
            Metric::Absolute => self.abs_error,
            Metric::ZScore => self.abs_error / sigma,
            Metric::Ks => value,
        };
        self.tolerance = tolerance;
        self.pass = self.error <= tolerance;
        self
    }

    /// Compares two logarithms; the relative error is that of the
    /// exponentiated values, `|exp(value − reference) − 1|`.
    pub fn compare_log(mut self, log_value: f64, log_reference: f64, tolerance: f64) -> Self {
        self.value = log_value;
        self.reference = log_reference;
        self.abs_error = (log_value - log_reference).abs();
        self.rel_error = if log_value == log_reference {
            0.0
        } else {
            (log_value - log_reference).exp_m1().abs()
        };
        self.metric = Metric::Relative;
        self.error = self.rel_error;
        self.tolerance = tolerance;
        self.pass = self.error <= tolerance;
        self.params.insert("log_space".into(), true.into());
        self
    }

    /// `error / tolerance`, with exact checks mapped to 0 or `∞`.
    fn severity(&self) -> f64 {
        if self.tolerance > 0.0 {
            self.error / self.tolerance
        } else if self.error == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// A failed report carrying an error message instead of a value.
    pub fn failed(check: impl Into<String>, why: impl fmt::Display) -> Self {
        VerificationReport::new(check).param("failure", why.to_string())
    }

    pub fn timed(mut self, d: Duration) -> Self {
        self.runtime = d;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: value {:.6e} reference {:.6e} error {:.3e} ≤ {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.value,
            self.reference,
            self.error,
            self.tolerance
        )?;
        if let Some(Value::String(why)) = self.params.get("failure") {
            write!(f, " ({why})")?;
        }
        Ok(())
    }
}

/// Worst case of several reports of the same check, keeping the first
/// report's parameters and adding up counts.
pub fn worst(check: &str, reports: Vec<VerificationReport>) -> VerificationReport {
    let count = reports.iter().map(|r| r.count).sum();
    let runtime = reports.iter().map(|r| r.runtime).sum();
    let n = reports.len();
    let failing = reports.iter().filter(|r| !r.pass).count();
    let mut pick = reports
        .into_iter()
        .max_by(|a, b| (!a.pass).cmp(&!b.pass).then(a.severity().total_cmp(&b.severity())))
        .unwrap_or_else(|| VerificationReport::failed(check, "no cases"));
    pick.check = check.to_string();
    pick.count = count;
    pick.runtime = runtime;
    pick.params.insert("cases".into(), n.into());
    pick.params.insert("failing_cases".into(), failing.into());
    pick
}
