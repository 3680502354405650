//! Lower-bound estimates of the best Hardy constant by maximizing the ratio
//! over truncated non-increasing trial vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::TailTable;
use crate::error::{HardyError, Result};
use crate::functional::RatioEvaluator;
use crate::model::{ConeVector, LambdaSeq, Params, Tolerances, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    StepSweep,
    ProjectedAscent,
    Multistart,
}

/// A best-constant lower bound together with the vector that attains it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateCertificate {
    pub estimate: f64,
    pub witness: ConeVector,
    pub method: Method,
    pub iterations: usize,
    pub n_trunc: usize,
}

/// Maximizes the ratio over step vectors `(1, …, 1, 0, …)` with `n ≤ n_max`
/// ones. Ties go to the smallest `n`.
///
/// The ratio of the `n`-th step vector is `1 + Λ_n^p T_{n+1} / B_n`; for
/// explicit weights every step is also evaluated through the full ratio and
/// the two must agree to `rel`.
pub fn step_sweep(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n_max: usize,
) -> Result<EstimateCertificate> {
    let tol = Tolerances::default();
    let explicit = b.support().is_some();
    let mut best: Option<(f64, usize)> = None;
    for (n, closed) in step_ratios(b, lambda, params, n_max)? {
        let ratio = if explicit {
            let direct = RatioEvaluator::new(b, lambda, params, n)?
                .evaluate(&vec![1.0; n])?
                .ratio;
            check_agreement(direct, closed, &tol, n)?;
            direct
        } else {
            closed
        };
        if best.is_none_or(|(v, _)| ratio > v) {
            best = Some((ratio, n));
        }
    }
    let (closed, n) = best.ok_or_else(|| {
        HardyError::ZeroDenominator(format!("all weights b_1..b_{n_max} are zero"))
    })?;
    let estimate = RatioEvaluator::new(b, lambda, params, n)?
        .evaluate(&vec![1.0; n])?
        .ratio;
    check_agreement(estimate, closed, &tol, n)?;
    Ok(EstimateCertificate {
        estimate,
        witness: ConeVector::step(n),
        method: Method::StepSweep,
        iterations: n_max,
        n_trunc: n,
    })
}

/// Closed-form step-vector ratios `1 + Λ_n^p T_{n+1} / B_n` for every
/// `n ≤ n_max` with `B_n > 0`.
pub fn step_ratios(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    if n_max == 0 {
        return Err(HardyError::rejected("n_max must be >= 1"));
    }
    let tails = TailTable::build(b, lambda, params, 2, n_max + 1)?;
    let p = params.p();
    let mut bn = 0.0;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        bn += b.value(n);
        if bn > 0.0 {
            out.push((
                n,
                1.0 + lambda.big_lambda(n).powf(p) * tails.value(n + 1) / bn,
            ));
        }
    }
    Ok(out)
}

fn check_agreement(direct: f64, closed: f64, tol: &Tolerances, n: usize) -> Result<()> {
    if (direct - closed).abs() > tol.rel * direct.abs().max(closed.abs()).max(1.0) {
        return Err(HardyError::NonFinite(format!(
            "step ratio at n = {n}: direct {direct} disagrees with closed form {closed}"
        )));
    }
    Ok(())
}

/// Euclidean projection onto `{x : x_1 ≥ … ≥ x_n ≥ 0}`: pool adjacent
/// violators for the non-increasing order, then clamp at zero.
pub fn isotonic_project(v: &[f64]) -> ConeVector {
    // (sum, count) blocks with non-increasing means
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(v.len());
    for &x in v {
        blocks.push((x, 1));
        while blocks.len() >= 2 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 >= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    let mut out = Vec::with_capacity(v.len());
    let mut prev = f64::INFINITY;
    for (s, c) in blocks {
        // pooled means can differ in the last ulp from the merge order
        let m = (s / c as f64).max(0.0).min(prev);
        prev = m;
        out.extend(std::iter::repeat_n(m, c));
    }
    ConeVector::from_sorted_unchecked(out)
}

/// Backtracking schedule for the ascent step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizePolicy {
    pub eta0: f64,
    pub max_halvings: usize,
}

impl Default for StepSizePolicy {
    fn default() -> Self {
        StepSizePolicy {
            eta0: 1.0,
            max_halvings: 30,
        }
    }
}

/// Result of a projected ascent run with its per-iteration ratios.
#[derive(Debug, Clone)]
pub struct AscentRun {
    pub certificate: EstimateCertificate,
    pub history: Vec<f64>,
}

fn normalize(x: ConeVector) -> Option<Vec<f64>> {
    let v = x.values();
    let head = v[0];
    (head > 0.0).then(|| v.iter().map(|t| t / head).collect())
}

/// Projected gradient ascent on the ratio, starting from `start` padded or
/// cut to `n_trunc`. Requires `p > 1`.
pub fn projected_ascent(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n_trunc: usize,
    start: &ConeVector,
    max_iters: usize,
    policy: StepSizePolicy,
) -> Result<AscentRun> {
    let ev = RatioEvaluator::new(b, lambda, params, n_trunc)?;
    ascend(
        &ev,
        params,
        start,
        max_iters,
        policy,
        Tolerances::default().rel,
    )
}

fn ascend(
    ev: &RatioEvaluator,
    params: Params,
    start: &ConeVector,
    max_iters: usize,
    policy: StepSizePolicy,
    rel: f64,
) -> Result<AscentRun> {
    if params.p() == 1.0 {
        return Err(HardyError::rejected(
            "projected ascent needs p > 1; step vectors are extremal at p = 1",
        ));
    }
    let n = ev.len();
    let mut padded = start.values().to_vec();
    padded.resize(n, 0.0);
    let mut x = normalize(ConeVector::from_sorted_unchecked(padded))
        .ok_or_else(|| HardyError::rejected("start vector is identically zero"))?;
    let mut ratio = ev.evaluate(&x)?.ratio;
    let mut history = vec![ratio];
    let mut iterations = 0;
    while iterations < max_iters {
        let (_, grad) = ev.gradient(&x)?;
        let mut eta = policy.eta0;
        let mut accepted = None;
        for _ in 0..=policy.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + eta * g).collect();
            if let Some(cand) = normalize(isotonic_project(&trial)) {
                match ev.evaluate(&cand) {
                    Ok(br) if br.ratio > ratio => {
                        accepted = Some((cand, br.ratio));
                        break;
                    }
                    Ok(_) | Err(HardyError::ZeroDenominator(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            eta *= 0.5;
        }
        let Some((cand, r)) = accepted else { break };
        iterations += 1;
        let improvement = (r - ratio) / ratio;
        x = cand;
        ratio = r;
        history.push(ratio);
        if improvement < rel {
            break;
        }
    }
    Ok(AscentRun {
        certificate: EstimateCertificate {
            estimate: ratio,
            witness: ConeVector::from_sorted_unchecked(x),
            method: Method::ProjectedAscent,
            iterations,
            n_trunc: n,
        },
        history,
    })
}

/// Settings for [`estimate_best_constant`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateOptions {
    pub n_trunc: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub policy: StepSizePolicy,
    /// Ascent stops once the relative improvement drops below this.
    pub rel: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            n_trunc: 64,
            restarts: 8,
            seed: 0,
            max_iters: 500,
            policy: StepSizePolicy::default(),
            rel: Tolerances::default().rel,
        }
    }
}

/// Uniform `(0, 1]` samples sorted descending and scaled so `x_1 = 1`.
pub fn random_start(rng: &mut impl Rng, n: usize) -> ConeVector {
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let head = v[0];
    ConeVector::from_sorted_unchecked(v.into_iter().map(|t| t / head).collect())
}

/// Best ratio found by the step sweep and by projected ascent from the best
/// step vector and from `restarts` random starts. Deterministic in `seed`.
pub fn estimate_best_constant(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    opts: &EstimateOptions,
) -> Result<EstimateCertificate> {
    if opts.restarts == 0 || opts.n_trunc == 0 {
        return Err(HardyError::rejected("restarts and n_trunc must be >= 1"));
    }
    let sweep_max = opts.n_trunc.max(b.support().unwrap_or(0));
    let step = step_sweep(b, lambda, params, sweep_max)?;
    let mut best = step.clone();
    best.method = Method::Multistart;
    if params.p() == 1.0 {
        return Ok(best);
    }

    // every trial vector must see at least one positive weight
    let n = opts.n_trunc.max(b.first_positive());
    let ev = RatioEvaluator::new(b, lambda, params, n)?;
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let seeds: Vec<u64> = (0..opts.restarts).map(|_| master.random()).collect();
    let rel = opts.rel;

    let mut step_start = step.witness.values().to_vec();
    step_start.truncate(n);
    let step_start = ConeVector::from_sorted_unchecked(step_start);

    let mut runs = vec![ascend(
        &ev,
        params,
        &step_start,
        opts.max_iters,
        opts.policy,
        rel,
    )?];
    let random_runs: Result<Vec<AscentRun>> = seeds
        .par_iter()
        .map(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let start = random_start(&mut rng, n);
            ascend(&ev, params, &start, opts.max_iters, opts.policy, rel)
        })
        .collect();
    runs.extend(random_runs?);

    let mut iterations = step.iterations;
    for run in runs {
        iterations += run.certificate.iterations;
        if run.certificate.estimate > best.estimate {
            best.estimate = run.certificate.estimate;
            best.witness = run.certificate.witness;
            best.n_trunc = run.certificate.n_trunc;
        }
    }
    best.iterations = iterations;
    Ok(best)
}
