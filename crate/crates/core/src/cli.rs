//! Command-line driver. Exit codes: 0 success, 1 check failure,
//! 2 divergent or ill-posed input, 3 parse or validation error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::constants::best_u_prime;
use crate::error::{HardyError, Result};
use crate::model::{LambdaSeq, Params, Tolerances, WeightSpec};
use crate::optimizer::EstimateOptions;
use crate::oracles::{
    check_g_nonneg, find_counterexample_p_gt2, run_check, Check, CheckOutcome, SuiteConfig,
};
use crate::report::{full_analysis, parse_weight_file, write_condition_csv, AnalysisConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;

/// Failures printed per check in `verify` output.
const MAX_PRINTED_FAILURES: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "hardylab",
    version,
    about = "Weighted Hardy inequalities on non-increasing sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan the weight condition and print the condition report.
    CheckCondition(InputArgs),
    /// Condition, bounds, best-constant estimate and the oracle suite.
    Analyze(AnalyzeArgs),
    /// Run the randomized inequality checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Weight file (same as --weights).
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 64)]
    pub n_trunc: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the per-n table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check name, or "all".
    #[arg(long, default_value = "all")]
    pub which: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
    /// Exponent for the single-instance forms of `g` and `counterexample`.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
}

impl InputArgs {
    fn load(&self) -> Result<(WeightSpec, LambdaSeq, Params)> {
        let path = self
            .weights
            .as_ref()
            .or(self.file.as_ref())
            .ok_or_else(|| HardyError::Parse {
                location: "arguments".into(),
                message: "a weight file is required (positional or --weights)".into(),
            })?;
        let (b, lambda) = parse_weight_file(path)?;
        Ok((b, lambda, Params::new(self.p)?))
    }
}

fn error_json(e: &HardyError) -> String {
    json!({"error": {"kind": e.kind(), "message": e.to_string()}}).to_string()
}

fn to_pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

fn write_out(out: &mut dyn Write, s: &str) {
    // a closed stdout is not worth a panic
    let _ = writeln!(out, "{s}");
}

/// Parses `args` (including the program name) and runs the command,
/// writing JSON to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => {
            write_out(out, &error_json(&e));
            return e.exit_code();
        }
    };
    match cli.command {
        Command::CheckCondition(args) => run_check_condition(&args, out),
        Command::Analyze(args) => run_full_analysis(&args, tol, out, err),
        Command::Verify(args) => run_verify(&args, tol, out),
    }
}

pub fn run_check_condition(args: &InputArgs, out: &mut dyn Write) -> i32 {
    let result = args
        .load()
        .and_then(|(b, lambda, params)| best_u_prime(&b, &lambda, params, args.n_max));
    match result {
        Ok(report) => {
            write_out(out, &to_pretty(&report));
            EXIT_OK
        }
        Err(e) => {
            write_out(out, &error_json(&e));
            e.exit_code()
        }
    }
}

pub fn run_full_analysis(
    args: &AnalyzeArgs,
    tol: Tolerances,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let (b, lambda, params) = match args.input.load() {
        Ok(v) => v,
        Err(e) => {
            write_out(out, &error_json(&e));
            return e.exit_code();
        }
    };
    let cfg = AnalysisConfig {
        n_max: args.input.n_max,
        estimate: EstimateOptions {
            n_trunc: args.n_trunc,
            restarts: args.restarts,
            seed: args.seed,
            rel: tol.rel,
            ..Default::default()
        },
        suite: SuiteConfig {
            trials: args.trials,
            seed: args.seed,
            tol,
            ..Default::default()
        },
    };
    let report = full_analysis(&b, &lambda, params, &cfg);
    let text = to_pretty(&report);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, format!("{text}\n")) {
                let e = HardyError::Io(format!("{}: {e}", path.display()));
                write_out(out, &error_json(&e));
                return e.exit_code();
            }
        }
        None => write_out(out, &text),
    }
    if let (Some(path), Some(cond)) = (&args.csv, &report.condition) {
        let written = std::fs::File::create(path)
            .map_err(|e| HardyError::Io(format!("{}: {e}", path.display())))
            .and_then(|f| write_condition_csv(f, &b, &lambda, params, cond));
        if let Err(e) = written {
            let _ = writeln!(err, "{}", error_json(&e));
            return e.exit_code();
        }
    }
    if let Some(code) = report.failure_exit_code() {
        return code;
    }
    if report.succeeded() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn outcome_json(o: &CheckOutcome) -> serde_json::Value {
    json!({
        "name": o.name,
        "trials": o.trials,
        "inconclusive": o.inconclusive,
        "passed": o.passed,
        "failure_count": o.failures.len(),
        "failures": o.failures.iter().take(MAX_PRINTED_FAILURES).collect::<Vec<_>>(),
    })
}

pub fn run_verify(args: &VerifyArgs, tol: Tolerances, out: &mut dyn Write) -> i32 {
    let cfg = SuiteConfig {
        trials: args.trials,
        seed: args.seed,
        max_n: args.max_n,
        tol,
    };
    let checks: Vec<Check> = if args.which == "all" {
        Check::ALL.to_vec()
    } else {
        match args.which.parse() {
            Ok(c) => vec![c],
            Err(e) => {
                write_out(out, &error_json(&e));
                return 3;
            }
        }
    };

    let mut results = Vec::new();
    for check in checks {
        let item = match (check, args.p, args.n) {
            (Check::Counterexample, Some(p), Some(n)) => {
                match find_counterexample_p_gt2(p, n, &tol) {
                    Ok(ce) => json!({"name": check.name(), "passed": true, "counterexample": ce}),
                    Err(e @ HardyError::SearchFailed(_)) => json!({
                        "name": check.name(), "passed": false,
                        "error": {"kind": e.kind(), "message": e.to_string()},
                    }),
                    Err(e) => {
                        write_out(out, &error_json(&e));
                        return e.exit_code();
                    }
                }
            }
            (Check::GNonneg, Some(p), _) => match check_g_nonneg(p, args.trials.max(2), &tol) {
                Ok(o) => outcome_json(&o),
                Err(e) => {
                    write_out(out, &error_json(&e));
                    return e.exit_code();
                }
            },
            _ => match run_check(check, &cfg) {
                Ok(o) => outcome_json(&o),
                Err(e) => {
                    write_out(out, &error_json(&e));
                    return e.exit_code();
                }
            },
        };
        results.push(item);
    }
    let passed = results.iter().all(|r| r["passed"] == json!(true));
    write_out(
        out,
        &to_pretty(&json!({"passed": passed, "checks": results})),
    );
    if passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
