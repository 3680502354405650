//! Refined power-rule constants, tail sums of `b_k / Λ_k^p`, the weight
//! condition and the two-sided bounds on the best Hardy constant.

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::model::{LambdaSeq, Params, WeightSpec};

/// Largest number of terms summed explicitly for an analytic weight family.
pub const DEFAULT_TAIL_CAP: usize = 1 << 21;

/// Absolute target for the family truncation error relative to the last
/// tabulated term.
const TAIL_TARGET_FACTOR: f64 = 1e-13;

fn check_index(lambda: &LambdaSeq, n: usize) -> Result<()> {
    if n == 0 || n > lambda.len() {
        return Err(HardyError::rejected(format!(
            "index n = {n} outside 1..={}",
            lambda.len()
        )));
    }
    Ok(())
}

/// `Λ_n^p / Σ_{i≤n} λ_i Λ_i^{p-1}`.
pub fn c_refined(lambda: &LambdaSeq, params: Params, n: usize) -> Result<f64> {
    check_index(lambda, n)?;
    let p = params.p();
    let denom: f64 = (1..=n)
        .map(|i| lambda.lambda_at(i) * lambda.big_lambda(i).powf(p - 1.0))
        .sum();
    Ok(lambda.big_lambda(n).powf(p) / denom)
}

/// `C_{k,p,λ}` for every `k = 1..=len(lambda)` in one pass.
pub fn c_refined_all(lambda: &LambdaSeq, params: Params) -> Vec<f64> {
    let p = params.p();
    let mut denom = 0.0;
    (1..=lambda.len())
        .map(|k| {
            let big = lambda.big_lambda(k);
            denom += lambda.lambda_at(k) * big.powf(p - 1.0);
            big.powf(p) / denom
        })
        .collect()
}

/// The constant in the refined power rule: `c_refined` for `p ≤ 2`, `p` above.
pub fn c_effective(lambda: &LambdaSeq, params: Params, n: usize) -> Result<f64> {
    if params.is_refined_range() {
        c_refined(lambda, params, n)
    } else {
        check_index(lambda, n)?;
        Ok(params.p())
    }
}

/// Checks that `Σ b_k / Λ_k^p` converges for the given family.
pub fn check_convergence(b: &WeightSpec, lambda: &LambdaSeq, params: Params) -> Result<()> {
    match b {
        WeightSpec::Explicit { .. } | WeightSpec::Geometric { .. } => Ok(()),
        WeightSpec::Power { alpha } => {
            if !lambda.is_unit() {
                return Err(HardyError::rejected(
                    "power-family weights are only supported with unit lambda; use explicit weights",
                ));
            }
            let s = alpha - params.p();
            if s >= -1.0 {
                Err(HardyError::DivergentSeries(format!(
                    "sum of k^(alpha - p) diverges for alpha - p = {s} >= -1"
                )))
            } else {
                Ok(())
            }
        }
    }
}

#[inline]
fn term(b: &WeightSpec, lambda: &LambdaSeq, p: f64, k: usize) -> f64 {
    match b {
        // unit lambda: b_k / Λ_k^p = k^(alpha - p)
        WeightSpec::Power { alpha } => (k as f64).powf(alpha - p),
        _ => {
            let bk = b.value(k);
            if bk == 0.0 {
                0.0
            } else {
                bk / lambda.big_lambda(k).powf(p)
            }
        }
    }
}

/// Rigorous upper bound on `Σ_{k≥m} b_k / Λ_k^p` (zero for explicit weights
/// once `m` is past the support). Assumes `check_convergence` passed.
pub fn tail_bound(b: &WeightSpec, lambda: &LambdaSeq, params: Params, m: usize) -> f64 {
    let p = params.p();
    match b {
        WeightSpec::Explicit { values } => (m..=values.len()).map(|k| term(b, lambda, p, k)).sum(),
        WeightSpec::Power { alpha } => {
            // integral test: k^s is decreasing for s < -1
            let s = alpha - p;
            let m = m as f64;
            m.powf(s) + m.powf(s + 1.0) / (-s - 1.0)
        }
        WeightSpec::Geometric { r } => {
            r.powi(m.min(i32::MAX as usize) as i32) / ((1.0 - r) * lambda.big_lambda(m).powf(p))
        }
    }
}

/// Tabulated tails `T_n = Σ_{k≥n} b_k / Λ_k^p` for `n` in `start..=end`,
/// summed backward from a truncation horizon, plus a uniform upper bound on
/// the omitted part.
#[derive(Debug, Clone)]
pub struct TailTable {
    start: usize,
    values: Vec<f64>,
    error: f64,
    horizon: usize,
}

impl TailTable {
    pub fn build(
        b: &WeightSpec,
        lambda: &LambdaSeq,
        params: Params,
        start: usize,
        end: usize,
    ) -> Result<Self> {
        Self::build_with_cap(b, lambda, params, start, end, DEFAULT_TAIL_CAP)
    }

    pub fn build_with_cap(
        b: &WeightSpec,
        lambda: &LambdaSeq,
        params: Params,
        start: usize,
        end: usize,
        cap: usize,
    ) -> Result<Self> {
        if start == 0 || end < start {
            return Err(HardyError::rejected(format!(
                "invalid tail range {start}..={end}"
            )));
        }
        check_convergence(b, lambda, params)?;
        let p = params.p();
        let horizon = match b {
            WeightSpec::Explicit { values } => values.len().max(end),
            _ => {
                let target = TAIL_TARGET_FACTOR * term(b, lambda, p, end);
                let mut h = end.max(64);
                while h < cap && tail_bound(b, lambda, params, h + 1) > target {
                    h = h.saturating_mul(2);
                }
                h.min(cap.max(end))
            }
        };
        Self::build_to_horizon(b, lambda, params, start, end, horizon)
    }

    /// Tabulate with an explicit truncation horizon `horizon ≥ end`.
    pub fn build_to_horizon(
        b: &WeightSpec,
        lambda: &LambdaSeq,
        params: Params,
        start: usize,
        end: usize,
        horizon: usize,
    ) -> Result<Self> {
        check_convergence(b, lambda, params)?;
        let p = params.p();
        let horizon = horizon.max(end);
        let error = match b {
            WeightSpec::Explicit { values } if values.len() <= horizon => 0.0,
            _ => tail_bound(b, lambda, params, horizon + 1),
        };
        let mut values = vec![0.0; end - start + 1];
        let mut acc = 0.0;
        for k in (start..=horizon).rev() {
            acc += term(b, lambda, p, k);
            if k <= end {
                values[k - start] = acc;
            }
        }
        if !acc.is_finite() || !error.is_finite() {
            return Err(HardyError::NonFinite("tail sum overflowed".into()));
        }
        Ok(TailTable {
            start,
            values,
            error,
            horizon,
        })
    }

    /// Partial sum `Σ_{k=n}^{horizon}` for `n` in `start..=end`.
    #[inline]
    pub fn value(&self, n: usize) -> f64 {
        self.values[n - self.start]
    }

    #[inline]
    pub fn error(&self) -> f64 {
        self.error
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn end(&self) -> usize {
        self.start + self.values.len() - 1
    }
}

/// Partial sum of `Σ_{k≥n} b_k / Λ_k^p` and an upper bound on the omitted
/// tail: the true value lies in `[value, value + error]`.
pub fn tail_sum(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n: usize,
) -> Result<(f64, f64)> {
    let t = TailTable::build(b, lambda, params, n, n)?;
    Ok((t.value(n), t.error()))
}

fn partial_weight(b: &WeightSpec, n: usize) -> f64 {
    (1..=n).map(|k| b.value(k)).sum()
}

/// `q_n = Λ_n^p (T_n + err) / B_n`, an over-approximation of the smallest
/// constant satisfying the weight condition at `n`.
pub fn condition_ratio(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n: usize,
) -> Result<f64> {
    if n == 0 {
        return Err(HardyError::rejected("n must be >= 1"));
    }
    let bn = partial_weight(b, n);
    if bn == 0.0 {
        return Err(HardyError::ZeroDenominator(format!(
            "B_{n} = 0; the condition is vacuous at this n"
        )));
    }
    let (value, error) = tail_sum(b, lambda, params, n)?;
    Ok(lambda.big_lambda(n).powf(params.p()) * (value + error) / bn)
}

/// One scanned index of the weight condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub n: usize,
    pub q: f64,
    pub tail_value: f64,
    pub tail_error: f64,
    pub weight_partial: f64,
}

/// Scan of the weight condition over `n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub u_prime: f64,
    pub argmax_n: usize,
    /// Rows for every scanned `n` with `B_n > 0` (leading zero weights skipped).
    pub ratios: Vec<ConditionRow>,
    pub tail_error: f64,
    pub n_max: usize,
    /// True when the scanned maximum is provably the supremum over all `n`.
    pub exact: bool,
}

/// Best condition constant over `1..=n_max`.
pub fn best_u_prime(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    n_max: usize,
) -> Result<ConditionReport> {
    if n_max == 0 {
        return Err(HardyError::rejected("n_max must be >= 1"));
    }
    let tails = TailTable::build(b, lambda, params, 1, n_max)?;
    let p = params.p();
    let mut ratios = Vec::with_capacity(n_max);
    let mut bn = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for n in 1..=n_max {
        bn += b.value(n);
        if bn == 0.0 {
            continue;
        }
        let tail_value = tails.value(n);
        let q = lambda.big_lambda(n).powf(p) * (tail_value + tails.error()) / bn;
        if !q.is_finite() {
            return Err(HardyError::NonFinite(format!("condition ratio at n = {n}")));
        }
        if best.is_none_or(|(v, _)| q > v) {
            best = Some((q, n));
        }
        ratios.push(ConditionRow {
            n,
            q,
            tail_value,
            tail_error: tails.error(),
            weight_partial: bn,
        });
    }
    let (u_prime, argmax_n) = best.ok_or_else(|| {
        HardyError::ZeroDenominator(format!("all weights b_1..b_{n_max} are zero"))
    })?;
    let exact = matches!(b.support(), Some(m) if m <= n_max);
    Ok(ConditionReport {
        u_prime,
        argmax_n,
        ratios,
        tail_error: tails.error(),
        n_max,
        exact,
    })
}

/// Two-sided bounds on the best constant `U_p` implied by `U'_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub p: f64,
    pub u_prime: f64,
    pub lower: f64,
    /// `(pU'+1)^p` for `p ≤ 2`, `p^p (U'+1)^p` above.
    pub upper_new: f64,
    /// `p^p (U'+1)^p` for every `p`.
    pub upper_bge: f64,
    /// `pU'+1` for `p ≤ 2`, `pU'+p` above.
    pub u_double_prime: f64,
}

pub fn u_bounds(u_prime: f64, params: Params) -> BoundsReport {
    let p = params.p();
    let u_double_prime = if params.is_refined_range() {
        p * u_prime + 1.0
    } else {
        p * u_prime + p
    };
    BoundsReport {
        p,
        u_prime,
        lower: u_prime,
        upper_new: u_double_prime.powf(p),
        upper_bge: (p * (u_prime + 1.0)).powf(p),
        u_double_prime,
    }
}

/// Left-hand sides `Σ_{k≤n} λ_k Λ_k^{p-1} Σ_{i≥k} C_i b_i / Λ_i^p` of the
/// estimate behind the sufficiency argument, for `n = 1..=M` (explicit
/// weights only; `C_i` is the effective constant).
pub fn chain_lhs(b: &WeightSpec, lambda: &LambdaSeq, params: Params) -> Result<Vec<f64>> {
    let m = b.support().ok_or_else(|| {
        HardyError::rejected("chain estimate is only evaluated for explicit weights")
    })?;
    let p = params.p();
    let lam = lambda.resized(m);
    let c = if params.is_refined_range() {
        c_refined_all(&lam, params)
    } else {
        vec![p; m]
    };
    // inner[k] = Σ_{i≥k} C_i b_i / Λ_i^p
    let mut inner = vec![0.0; m + 1];
    for i in (1..=m).rev() {
        inner[i - 1] = inner[i] + c[i - 1] * b.value(i) / lam.big_lambda(i).powf(p);
    }
    let mut acc = 0.0;
    Ok((1..=m)
        .map(|k| {
            acc += lam.lambda_at(k) * lam.big_lambda(k).powf(p - 1.0) * inner[k - 1];
            acc
        })
        .collect())
}
