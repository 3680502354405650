//! Weight files, the analysis report and the per-`n` CSV table.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::constants::{best_u_prime, u_bounds, BoundsReport, ConditionReport};
use crate::error::{HardyError, Result};
use crate::model::{LambdaSeq, Params, WeightSpec};
use crate::optimizer::{estimate_best_constant, step_ratios, EstimateCertificate, EstimateOptions};
use crate::oracles::{run_suite, Check, CheckOutcome, SuiteConfig};

pub const TOOL_VERSION: &str = concat!("hardylab ", env!("CARGO_PKG_VERSION"));

fn field_err(location: &str, message: impl Into<String>) -> HardyError {
    HardyError::Parse {
        location: location.to_string(),
        message: message.into(),
    }
}

fn number(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    let loc = format!("{path}.{key}");
    obj.get(key)
        .ok_or_else(|| field_err(&loc, "missing field"))?
        .as_f64()
        .ok_or_else(|| field_err(&loc, "expected a number"))
}

fn explicit_array(v: &Value, path: &str) -> Result<Vec<f64>> {
    let loc = format!("{path}.explicit");
    v.as_array()
        .ok_or_else(|| field_err(&loc, "expected an array of numbers"))?
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| field_err(&format!("{loc}[{i}]"), "expected a number"))
        })
        .collect()
}

fn parse_weights(v: &Value) -> Result<WeightSpec> {
    let obj = v
        .as_object()
        .ok_or_else(|| field_err("b", "expected an object"))?;
    if let Some(arr) = obj.get("explicit") {
        return WeightSpec::explicit(&explicit_array(arr, "b")?);
    }
    match obj.get("family").and_then(Value::as_str) {
        Some("power") => WeightSpec::power(number(obj, "alpha", "b")?),
        Some("geometric") => WeightSpec::geometric(number(obj, "r", "b")?),
        Some(other) => Err(field_err("b.family", format!("unknown family {other:?}"))),
        None => Err(field_err("b", "expected \"explicit\" or \"family\"")),
    }
}

fn parse_lambda(v: Option<&Value>) -> Result<LambdaSeq> {
    let Some(v) = v else {
        return Ok(LambdaSeq::unit());
    };
    let obj = v
        .as_object()
        .ok_or_else(|| field_err("lambda", "expected an object"))?;
    if let Some(arr) = obj.get("explicit") {
        return LambdaSeq::new(&explicit_array(arr, "lambda")?);
    }
    match obj.get("family").and_then(Value::as_str) {
        Some("unit") => Ok(LambdaSeq::unit()),
        Some(other) => Err(field_err(
            "lambda.family",
            format!("unknown family {other:?}"),
        )),
        None => Err(field_err("lambda", "expected \"explicit\" or \"family\"")),
    }
}

/// Parses a weight file body: `{"b": …, "lambda": …}`. A missing `lambda`
/// means `λ ≡ 1`.
pub fn parse_weight_str(text: &str) -> Result<(WeightSpec, LambdaSeq)> {
    let root: Value = serde_json::from_str(text).map_err(|e| HardyError::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    let obj = root
        .as_object()
        .ok_or_else(|| field_err("$", "expected a JSON object"))?;
    let b = parse_weights(
        obj.get("b")
            .ok_or_else(|| field_err("b", "missing field"))?,
    )?;
    let lambda = parse_lambda(obj.get("lambda"))?;
    Ok((b, lambda))
}

pub fn parse_weight_file(path: impl AsRef<Path>) -> Result<(WeightSpec, LambdaSeq)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| HardyError::Io(format!("{}: {e}", path.display())))?;
    parse_weight_str(&text)
}

/// Inputs echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputsEcho {
    pub weights: WeightSpec,
    pub lambda: Vec<f64>,
    pub p: f64,
    pub n_max: usize,
    pub n_trunc: usize,
    pub restarts: usize,
    pub seed: u64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub inconclusive: usize,
    pub passed: bool,
}

impl From<&CheckOutcome> for CheckSummary {
    fn from(o: &CheckOutcome) -> Self {
        CheckSummary {
            name: o.name.clone(),
            trials: o.trials,
            failures: o.failures.len(),
            inconclusive: o.inconclusive,
            passed: o.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub n_trunc: usize,
    pub estimate: f64,
}

/// The stage at which a partial report stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incomplete {
    pub stage: String,
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub inputs: InputsEcho,
    pub condition: Option<ConditionReport>,
    pub bounds: Option<BoundsReport>,
    pub estimate: Option<EstimateCertificate>,
    pub ladder: Vec<LadderEntry>,
    pub checks: Vec<CheckSummary>,
    pub incomplete: Option<Incomplete>,
}

/// Settings for [`full_analysis`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub n_max: usize,
    pub estimate: EstimateOptions,
    pub suite: SuiteConfig,
}

impl AnalysisReport {
    /// True when every stage ran and every check passed.
    pub fn succeeded(&self) -> bool {
        self.incomplete.is_none() && self.checks.iter().all(|c| c.passed)
    }

    /// The error that stopped the analysis, if any.
    pub fn failure_exit_code(&self) -> Option<i32> {
        self.incomplete.as_ref().map(|inc| match inc.kind.as_str() {
            "RejectedInput" | "ParseError" | "IoError" => 3,
            _ => 2,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| HardyError::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HardyError::Parse {
            location: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

/// Truncation lengths `n/4, n/2, n` (deduplicated, at least 1).
pub fn ladder_lengths(n_trunc: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [n_trunc / 4, n_trunc / 2, n_trunc]
        .into_iter()
        .map(|n| n.max(1))
        .collect();
    v.dedup();
    v
}

/// Condition scan, bounds, best-constant estimate with its truncation ladder,
/// and the oracle suite. Stops at the first failing stage and marks the
/// report incomplete.
pub fn full_analysis(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    cfg: &AnalysisConfig,
) -> AnalysisReport {
    let mut report = AnalysisReport {
        tool_version: TOOL_VERSION.to_string(),
        inputs: InputsEcho {
            weights: b.clone(),
            lambda: lambda.values().to_vec(),
            p: params.p(),
            n_max: cfg.n_max,
            n_trunc: cfg.estimate.n_trunc,
            restarts: cfg.estimate.restarts,
            seed: cfg.estimate.seed,
            trials: cfg.suite.trials,
        },
        condition: None,
        bounds: None,
        estimate: None,
        ladder: Vec::new(),
        checks: Vec::new(),
        incomplete: None,
    };
    let stop = |report: &mut AnalysisReport, stage: &str, e: HardyError| {
        report.incomplete = Some(Incomplete {
            stage: stage.to_string(),
            kind: e.kind().to_string(),
            message: e.to_string(),
        });
    };

    let condition = match best_u_prime(b, lambda, params, cfg.n_max) {
        Ok(c) => c,
        Err(e) => {
            stop(&mut report, "condition", e);
            return report;
        }
    };
    report.bounds = Some(u_bounds(condition.u_prime, params));
    report.condition = Some(condition);

    for n in ladder_lengths(cfg.estimate.n_trunc) {
        let opts = EstimateOptions {
            n_trunc: n,
            ..cfg.estimate
        };
        match estimate_best_constant(b, lambda, params, &opts) {
            Ok(cert) => {
                report.ladder.push(LadderEntry {
                    n_trunc: n,
                    estimate: cert.estimate,
                });
                if n == cfg.estimate.n_trunc.max(1) {
                    report.estimate = Some(cert);
                }
            }
            Err(e) => {
                stop(&mut report, "estimate", e);
                return report;
            }
        }
    }

    match run_suite(&Check::ALL, &cfg.suite) {
        Ok(outcomes) => report.checks = outcomes.iter().map(CheckSummary::from).collect(),
        Err(e) => stop(&mut report, "checks", e),
    }
    report
}

/// Writes the `n, q_n, tail_value, tail_error, step_ratio` table.
pub fn write_condition_csv<W: Write>(
    out: W,
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    condition: &ConditionReport,
) -> Result<()> {
    let steps = step_ratios(b, lambda, params, condition.n_max)?;
    let io = |e: csv::Error| HardyError::Io(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["n", "q_n", "tail_value", "tail_error", "step_ratio"])
        .map_err(io)?;
    for (row, (n, step)) in condition.ratios.iter().zip(steps) {
        debug_assert_eq!(row.n, n);
        w.write_record([
            row.n.to_string(),
            row.q.to_string(),
            row.tail_value.to_string(),
            row.tail_error.to_string(),
            step.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| HardyError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_file_examples() {
        let (b, l) =
            parse_weight_str(r#"{"b":{"family":"power","alpha":0},"lambda":{"explicit":[1]}}"#)
                .unwrap();
        assert_eq!(b, WeightSpec::Power { alpha: 0.0 });
        assert_eq!(l.big_lambda(10), 10.0);

        let (b, _) =
            parse_weight_str(r#"{"b":{"explicit":[1,0.5]},"lambda":{"explicit":[1,1]}}"#).unwrap();
        assert_eq!(b.support(), Some(2));

        let e = parse_weight_str(r#"{"b":{"explicit":[-1]}}"#).unwrap_err();
        assert!(matches!(
            e,
            HardyError::RejectedInput { index: Some(1), .. }
        ));
    }

    #[test]
    fn weight_file_diagnostics() {
        let e = parse_weight_str("{\n  \"b\": [1,\n}").unwrap_err();
        match e {
            HardyError::Parse { location, .. } => assert!(location.starts_with("line 3")),
            other => panic!("{other:?}"),
        }
        let e = parse_weight_str(r#"{"b":{"family":"power"}}"#).unwrap_err();
        assert!(matches!(e, HardyError::Parse { ref location, .. } if location == "b.alpha"));
        let e = parse_weight_str(r#"{"b":{"explicit":[1,"x"]}}"#).unwrap_err();
        assert!(matches!(e, HardyError::Parse { ref location, .. } if location == "b.explicit[1]"));
        let e =
            parse_weight_str(r#"{"b":{"explicit":[1]},"lambda":{"explicit":[1,2]}}"#).unwrap_err();
        assert!(matches!(
            e,
            HardyError::RejectedInput { index: Some(2), .. }
        ));
        let e = parse_weight_str(r#"{"b":{"family":"geometric","r":1.5}}"#).unwrap_err();
        assert!(matches!(e, HardyError::RejectedInput { .. }));
    }

    #[test]
    fn ladder() {
        assert_eq!(ladder_lengths(64), vec![16, 32, 64]);
        assert_eq!(ladder_lengths(2), vec![1, 2]);
        assert_eq!(ladder_lengths(1), vec![1]);
    }
}
