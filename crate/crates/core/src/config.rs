//! Spec files and report serialization shared by the command-line tools.
//!
//! A spec file is strict JSON:
//! `{"family", "beta", "n", "m", "nu"?, "a"?, "kappa", "tau"?, "mu"?,
//! "Sigma"?, "Theta"?, "Xi"?, "Delta"?, "Pi"?}` with matrices in the algebra
//! exchange format. Weight vectors are arrays or the string `"zero"`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Algebra, Matrix};
use crate::densities::{DistributionSpec, Family, SpecParams};
use crate::error::{Error, Result};
use crate::hwv::WeightVector;

/// Report schema version.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum WeightsJson {
    Explicit(Vec<f64>),
    Shorthand(String),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecJson {
    family: String,
    beta: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    kappa: WeightsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau: Option<WeightsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<Matrix>,
    #[serde(rename = "Sigma", default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Matrix>,
    #[serde(rename = "Theta", default, skip_serializing_if = "Option::is_none")]
    theta: Option<Matrix>,
    #[serde(rename = "Xi", default, skip_serializing_if = "Option::is_none")]
    xi: Option<Matrix>,
    #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
    delta: Option<Matrix>,
    #[serde(rename = "Pi", default, skip_serializing_if = "Option::is_none")]
    pi: Option<Matrix>,
}

/// A validated spec with its source text and the position of each top-level
/// field.
#[derive(Clone, Debug)]
pub struct SpecFile {
    pub spec: DistributionSpec,
    pub source: String,
    /// Field name to 1-based `(line, column)` of its key.
    pub locations: BTreeMap<String, (usize, usize)>,
}

fn weights(w: &WeightsJson, name: &str, m: usize, out: &mut Vec<String>) -> WeightVector {
    match w {
        WeightsJson::Explicit(v) => WeightVector::new(v.clone()),
        WeightsJson::Shorthand(s) if s == "zero" => WeightVector::zeros(m),
        WeightsJson::Shorthand(s) => {
            out.push(format!("{name} must be an array of numbers or \"zero\", got {s:?}"));
            WeightVector::zeros(m)
        }
    }
}

/// Positions of the top-level keys, found by scanning for `"key":` at
/// object depth one.
fn key_locations(text: &str) -> BTreeMap<String, (usize, usize)> {
    let mut out = BTreeMap::new();
    let (mut line, mut col) = (1, 1);
    let mut depth = 0i32;
    let mut in_str = false;
    let mut escaped = false;
    let mut current = String::new();
    let mut start = (0, 0);
    let mut last_str: Option<(String, (usize, usize))> = None;
    for ch in text.chars() {
        if in_str {
            if escaped {
                escaped = false;
                current.push(ch);
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_str = false;
                last_str = Some((std::mem::take(&mut current), start));
            } else {
                current.push(ch);
            }
        } else {
            match ch {
                '"' => {
                    in_str = true;
                    start = (line, col);
                }
                '{' | '[' => depth += 1,
                '}' | ']' => depth -= 1,
                ':' if depth == 1 => {
                    if let Some((k, pos)) = last_str.take() {
                        out.entry(k).or_insert(pos);
                    }
                }
                c if !c.is_whitespace() => last_str = None,
                _ => {}
            }
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    out
}

/// Parses and validates a spec, listing every violated constraint.
pub fn parse_spec(text: &str) -> Result<SpecFile> {
    let raw: SpecJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let locations = key_locations(text);
    let mut violations = Vec::new();
    let family = match raw.family.parse::<Family>() {
        Ok(f) => Some(f),
        Err(_) => {
            violations.push(format!(
                "unknown family {:?}; expected one of {}",
                raw.family,
                Family::ALL.map(|f| f.name()).join(", ")
            ));
            None
        }
    };
    let alg = match Algebra::from_beta(raw.beta) {
        Ok(a) => a,
        Err(e) => {
            violations.push(e.to_string());
            // Keep validating against the matrices' own algebra.
            [&raw.mu, &raw.sigma, &raw.theta, &raw.xi, &raw.delta, &raw.pi]
                .into_iter()
                .flatten()
                .map(Matrix::algebra)
                .next()
                .unwrap_or(Algebra::Real)
        }
    };
    let kappa = weights(&raw.kappa, "kappa", raw.m, &mut violations);
    let tau = raw.tau.as_ref().map(|t| weights(t, "tau", raw.m, &mut violations));
    let Some(family) = family else {
        return Err(Error::Validation(violations));
    };
    let params = SpecParams {
        family,
        alg,
        n: raw.n,
        m: raw.m,
        nu: raw.nu,
        a: raw.a,
        kappa,
        tau,
        mu: raw.mu,
        sigma: raw.sigma,
        theta: raw.theta,
        xi: raw.xi,
        delta: raw.delta,
        pi: raw.pi,
    };
    violations.extend(params.violations());
    if !violations.is_empty() {
        return Err(Error::Validation(violations));
    }
    Ok(SpecFile {
        spec: DistributionSpec::new(params)?,
        source: text.to_string(),
        locations,
    })
}

/// Canonical JSON of a spec; `parse_spec(emit_spec(s))` gives `s` back.
pub fn emit_spec(spec: &DistributionSpec) -> String {
    let p = spec.params();
    let j = SpecJson {
        family: p.family.name().to_string(),
        beta: p.alg.beta() as u32,
        n: p.n,
        m: p.m,
        nu: p.nu,
        a: p.a,
        kappa: WeightsJson::Explicit(p.kappa.as_slice().to_vec()),
        tau: p.tau.as_ref().map(|t| WeightsJson::Explicit(t.as_slice().to_vec())),
        mu: p.mu.clone(),
        sigma: p.sigma.clone(),
        theta: p.theta.clone(),
        xi: p.xi.clone(),
        delta: p.delta.clone(),
        pi: p.pi.clone(),
    };
    serde_json::to_string(&j).expect("spec serializes")
}

/// Hex SHA-256 of the canonical spec JSON.
pub fn spec_sha256(spec: &DistributionSpec) -> String {
    hex::encode(Sha256::digest(emit_spec(spec).as_bytes()))
}

#[derive(Serialize)]
struct ReportFile<'a, T> {
    schema: u32,
    reports: &'a [T],
}

/// Reports as JSON in the given order: `[]` when there are none, otherwise
/// `{"schema": 1, "reports": [...]}`.
pub fn emit_report<T: Serialize>(reports: &[T]) -> String {
    if reports.is_empty() {
        return "[]".to_string();
    }
    serde_json::to_string_pretty(&ReportFile {
        schema: REPORT_SCHEMA,
        reports,
    })
    .expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    const T_SPEC: &str = r#"{
  "family": "TRieszI",
  "beta": 1,
  "n": 3,
  "m": 2,
  "nu": 4.0,
  "kappa": [0.5, 0.2],
  "tau": "zero"
}"#;

    #[test]
    fn parses_and_locates() {
        let f = parse_spec(T_SPEC).unwrap();
        assert_eq!(f.spec.m(), 2);
        assert!(f.spec.tau().is_zero());
        assert_eq!(f.locations["nu"], (6, 3));
    }

    #[test]
    fn rejects_bad_beta_and_lists_everything() {
        let text = T_SPEC
            .replace("\"beta\": 1", "\"beta\": 3")
            .replace("[0.5, 0.2]", "[0.5]");
        let Err(Error::Validation(v)) = parse_spec(&text) else {
            panic!("expected validation error");
        };
        assert!(v.iter().any(|s| s.contains("beta must be 1, 2, or 4")), "{v:?}");
        assert!(v.iter().any(|s| s.contains("kappa has 1 entries")), "{v:?}");
    }

    #[test]
    fn names_the_failing_inequality() {
        let text = r#"{"family": "TRieszI", "beta": 1, "n": 2, "m": 2, "nu": 1, "kappa": [0, 0], "tau": [0, 0]}"#;
        let Err(Error::Validation(v)) = parse_spec(text) else {
            panic!("expected validation error");
        };
        assert!(
            v.iter()
                .any(|s| s.contains("Re(νβ/2) > (m−1)β/2 − k_m violated: 0.5 ≤ 0.5")),
            "{v:?}"
        );
    }

    #[test]
    fn unknown_fields_are_errors() {
        let text = T_SPEC.replace("\"m\": 2", "\"m\": 2, \"kapa\": [1, 2]");
        assert!(matches!(parse_spec(&text), Err(Error::Parse(_))));
        let text = T_SPEC.replace("\"kappa\": [0.5, 0.2],", "");
        assert!(matches!(parse_spec(&text), Err(Error::Parse(_))));
    }

    #[test]
    fn emit_round_trips() {
        let text = r#"{"family": "KotzRieszII", "beta": 2, "n": 2, "m": 2, "kappa": [-0.5, -1.0],
            "mu": {"beta": 2, "rows": 2, "cols": 2, "entries": [[0.1, 0.2], [0.3, -0.4], [0.5, 0.6], [0.7, 0.8]]},
            "Sigma": {"beta": 2, "rows": 2, "cols": 2, "entries": [[2, 0], [0.1, 0.3], [0.1, -0.3], [1, 0]]}}"#;
        let a = parse_spec(text).unwrap().spec;
        let b = parse_spec(&emit_spec(&a)).unwrap().spec;
        assert_eq!(a.params(), b.params());
        assert_eq!(spec_sha256(&a), spec_sha256(&b));
    }

    #[test]
    fn report_emission() {
        use crate::verify::{Metric, VerificationReport};
        assert_eq!(emit_report::<VerificationReport>(&[]), "[]");
        let r = VerificationReport::new("x").compare(1.0, 1.0, Metric::Absolute, 0.1, 0.0);
        let text = emit_report(&[r]);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["reports"][0]["pass"], true);
    }
}
