//! Numerical checks of the auxiliary inequalities behind the refined power
//! rule, with hypothesis-enforcing random generators and the `p > 2`
//! counterexample search.
//!
//! A check records a failure only when an inequality is violated by more
//! than `oracle_slack` (scaled by the magnitude of the compared sides).
//! Claimed strict inequalities whose margin is below the slack are counted
//! as inconclusive instead.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::constants::{c_effective, c_refined};
use crate::error::{HardyError, Result};
use crate::functional::f_n_with_constant;
use crate::model::{ConeVector, LambdaSeq, Params, Tolerances};

/// Central-difference step for derivative cross-checks.
pub const FD_STEP: f64 = 1e-6;

/// One violation with enough context to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub input: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub trials: usize,
    pub failures: Vec<Failure>,
    pub inconclusive: usize,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            trials: 0,
            failures: Vec::new(),
            inconclusive: 0,
            passed: true,
        }
    }

    /// Records `lhs ≤ rhs` up to the scaled slack.
    fn assert_le(&mut self, tol: &Tolerances, lhs: f64, rhs: f64, input: impl FnOnce() -> Value) {
        self.trials += 1;
        let ok = lhs.is_finite() && rhs.is_finite() && lhs - rhs <= tol.slack_for(lhs, rhs);
        if !ok {
            self.fail(input(), lhs, rhs);
        }
    }

    /// Records strict `lhs < rhs`: violations beyond the slack fail, margins
    /// inside the slack are inconclusive.
    fn assert_lt(&mut self, tol: &Tolerances, lhs: f64, rhs: f64, input: impl FnOnce() -> Value) {
        self.trials += 1;
        let slack = tol.slack_for(lhs, rhs);
        if !(lhs.is_finite() && rhs.is_finite()) || lhs - rhs > slack {
            self.fail(input(), lhs, rhs);
        } else if rhs - lhs <= slack {
            self.inconclusive += 1;
        }
    }

    fn fail(&mut self, input: Value, lhs: f64, rhs: f64) {
        self.failures.push(Failure {
            input,
            lhs,
            rhs,
            margin: rhs - lhs,
        });
        self.passed = false;
    }

    /// Concatenates trials and failures of another outcome into this one.
    pub fn merge(&mut self, other: CheckOutcome) {
        self.trials += other.trials;
        self.inconclusive += other.inconclusive;
        self.passed &= other.passed;
        self.failures.extend(other.failures);
    }
}

fn require(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(HardyError::rejected(what.to_string()))
    }
}

fn require_nonneg(v: &[f64], what: &str) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !(x.is_finite() && x >= 0.0) {
            return Err(HardyError::rejected_at(
                format!("{what} must be non-negative"),
                i + 1,
            ));
        }
    }
    Ok(())
}

/// Power rule on the tail starting at 1-based `n`:
/// `(Σ_{k≥n} a_k)^p ≤ p Σ_{k≥n} a_k (Σ_{i≥k} a_i)^{p-1}`.
pub fn check_power_rule(a: &[f64], p: f64, n: usize, tol: &Tolerances) -> Result<CheckOutcome> {
    let params = Params::new(p)?;
    require_nonneg(a, "a")?;
    require(n >= 1 && n <= a.len().max(1), "n must lie in 1..=len(a)")?;
    let mut suffix = 0.0;
    let mut rhs = 0.0;
    for &ak in a[n - 1..].iter().rev() {
        suffix += ak;
        rhs += ak * suffix.powf(params.p() - 1.0);
    }
    let rhs = params.p() * rhs;
    let lhs = suffix.powf(params.p());
    let mut out = CheckOutcome::new("power_rule");
    out.assert_le(tol, lhs, rhs, || json!({"a": a, "p": p, "n": n}));
    Ok(out)
}

/// Summation comparison: if every partial sum of `u` is at most that of `v`,
/// then `Σ_{i≤n} u_i a_i ≤ Σ_{i≤n} v_i a_i` for non-increasing `a ≥ 0`.
pub fn check_summation_lemma(
    u: &[f64],
    v: &[f64],
    a: &[f64],
    tol: &Tolerances,
) -> Result<CheckOutcome> {
    require(
        u.len() == v.len() && v.len() == a.len(),
        "u, v, a must have equal lengths",
    )?;
    require_nonneg(u, "u")?;
    require_nonneg(v, "v")?;
    ConeVector::with_tolerance(a, tol.abs)?;
    let (mut su, mut sv) = (0.0, 0.0);
    for (i, (&ui, &vi)) in u.iter().zip(v).enumerate() {
        su += ui;
        sv += vi;
        if su - sv > tol.abs.max(tol.rel * sv.abs()) {
            return Err(HardyError::rejected_at(
                "hypothesis fails: partial sum of u exceeds that of v",
                i + 1,
            ));
        }
    }
    let mut out = CheckOutcome::new("summation_lemma");
    let (mut lu, mut lv) = (0.0, 0.0);
    for i in 0..a.len() {
        lu += u[i] * a[i];
        lv += v[i] * a[i];
        out.assert_le(tol, lu, lv, || json!({"u": u, "v": v, "a": a, "n": i + 1}));
    }
    Ok(out)
}

fn le_rel(a: f64, b: f64, tol: &Tolerances) -> bool {
    a - b <= tol.slack_for(a, b)
}

/// Ratio monotonicity: under `B_1/B_2 ≤ C_1/C_2` and
/// `ΔB_n / ΔB_{n+1} ≤ ΔC_n / ΔC_{n+1}`, conclude `B_n/B_{n+1} ≤ C_n/C_{n+1}`.
pub fn check_ratio_lemma(bs: &[f64], cs: &[f64], tol: &Tolerances) -> Result<CheckOutcome> {
    require(
        bs.len() == cs.len() && bs.len() >= 2,
        "B and C need equal length >= 2",
    )?;
    for s in [bs, cs] {
        require(s[0] > 0.0, "sequences must be positive")?;
        require(
            s.windows(2).all(|w| w[1] > w[0]),
            "sequences must be strictly increasing",
        )?;
    }
    if !le_rel(bs[0] / bs[1], cs[0] / cs[1], tol) {
        return Err(HardyError::rejected("hypothesis fails: B_1/B_2 > C_1/C_2"));
    }
    for k in 0..bs.len().saturating_sub(2) {
        let rb = (bs[k + 1] - bs[k]) / (bs[k + 2] - bs[k + 1]);
        let rc = (cs[k + 1] - cs[k]) / (cs[k + 2] - cs[k + 1]);
        if !le_rel(rb, rc, tol) {
            return Err(HardyError::rejected_at(
                "hypothesis fails: difference ratio of B exceeds that of C",
                k + 1,
            ));
        }
    }
    let mut out = CheckOutcome::new("ratio_lemma");
    for k in 0..bs.len() - 1 {
        out.assert_le(
            tol,
            bs[k] / bs[k + 1],
            cs[k] / cs[k + 1],
            || json!({"B": bs, "C": cs, "n": k + 1}),
        );
    }
    Ok(out)
}

/// `C_{k,p,λ} ≤ C_{k+1,p,λ}` for every `k`, `1 ≤ p ≤ 2`.
pub fn check_c_monotone(lambda: &LambdaSeq, p: f64, tol: &Tolerances) -> Result<CheckOutcome> {
    let params = Params::new(p)?;
    require(
        params.is_refined_range(),
        "c monotonicity is claimed for 1 <= p <= 2",
    )?;
    let mut out = CheckOutcome::new("c_monotone");
    let mut prev = c_refined(lambda, params, 1)?;
    for k in 2..=lambda.len() {
        let next = c_refined(lambda, params, k)?;
        out.assert_le(
            tol,
            prev,
            next,
            || json!({"lambda": lambda.values(), "p": p, "k": k - 1}),
        );
        prev = next;
    }
    if lambda.len() == 1 {
        out.trials += 1;
    }
    Ok(out)
}

/// `g(t) = t − (1+t)^{1−p} + (1−t)^p`.
pub fn g(p: f64, t: f64) -> f64 {
    t - (1.0 + t).powf(1.0 - p) + (1.0 - t).powf(p)
}

/// `g ≥ 0` on a uniform grid of `[0, 1/2]` with `g(0) = g'(0) = 0`.
pub fn check_g_nonneg(p: f64, grid: usize, tol: &Tolerances) -> Result<CheckOutcome> {
    require(p > 1.0 && p <= 2.0, "g is checked for 1 < p <= 2")?;
    require(grid >= 2, "grid must be >= 2")?;
    let mut out = CheckOutcome::new("g_nonneg");
    for i in 0..=grid {
        let t = 0.5 * i as f64 / grid as f64;
        out.assert_le(tol, 0.0, g(p, t), || json!({"p": p, "t": t}));
    }
    let g0 = g(p, 0.0);
    out.assert_le(
        tol,
        g0.abs(),
        0.0,
        || json!({"p": p, "t": 0.0, "what": "g(0)"}),
    );
    let dg0 = (g(p, FD_STEP) - g(p, -FD_STEP)) / (2.0 * FD_STEP);
    out.assert_le(
        tol,
        dg0.abs(),
        0.0,
        || json!({"p": p, "t": 0.0, "what": "g'(0)"}),
    );
    Ok(out)
}

/// Refined power rule `f_n(a) ≤ 0` with the effective constant, plus the
/// equality case for `1 < p ≤ 2`: zero exactly on constant `a`.
pub fn check_refined_power_rule(
    lambda: &LambdaSeq,
    p: f64,
    a: &ConeVector,
    tol: &Tolerances,
) -> Result<CheckOutcome> {
    let params = Params::new(p)?;
    let n = a.len();
    let lam = lambda.resized(lambda.len().max(n));
    let c = c_effective(&lam, params, n)?;
    let f = f_n_with_constant(&lam, params, a.values(), c);
    let s: f64 = a
        .values()
        .iter()
        .enumerate()
        .map(|(i, x)| lam.lambda_at(i + 1) * x)
        .sum();
    let scale = s.powf(p);
    let input = || json!({"lambda": lambda.values(), "p": p, "a": a.values()});
    let mut out = CheckOutcome::new("refined_power_rule");
    out.assert_le(tol, scale + f, scale, input);

    let constant = a.values().windows(2).all(|w| w[0] == w[1]);
    if params.is_refined_range() {
        if constant {
            out.assert_le(tol, scale + f.abs(), scale, input);
        } else if p > 1.0 && lam.values()[..n].iter().all(|&l| l > 0.0) {
            out.assert_lt(tol, scale + f, scale, input);
        }
    }
    Ok(out)
}

/// `S_r(x, y) = (x^r − y^r) / (x − y)`.
pub fn s_r(r: f64, x: f64, y: f64) -> f64 {
    (x.powf(r) - y.powf(r)) / (x - y)
}

/// `y ↦ S_r(x, y)` is non-decreasing for `r ≥ 1` and non-increasing for
/// `0 < r ≤ 1`, checked on a grid of `y ∈ (0, 4]` for several `x`.
pub fn check_s_r_monotone(r: f64, grid: usize, tol: &Tolerances) -> Result<CheckOutcome> {
    require(r > 0.0 && r.is_finite(), "r must be positive")?;
    require(grid >= 2, "grid must be >= 2")?;
    let mut out = CheckOutcome::new("s_r_monotone");
    for &x in &[0.3, 1.0, 2.5] {
        let ys: Vec<f64> = (1..=grid)
            .map(|i| 4.0 * i as f64 / grid as f64)
            .filter(|y| (y - x).abs() > 1e-3)
            .collect();
        for w in ys.windows(2) {
            let (s0, s1) = (s_r(r, x, w[0]), s_r(r, x, w[1]));
            let input = || json!({"r": r, "x": x, "y0": w[0], "y1": w[1]});
            if r >= 1.0 {
                out.assert_le(tol, s0, s1, input);
            }
            if r <= 1.0 {
                out.assert_le(tol, s1, s0, input);
            }
        }
    }
    Ok(out)
}

/// Adjacent transposition at 1-based `(i, i+1)` with `λ ≡ 1`:
/// `f_n(x) ≥ f_n(x')` when `x_{i+1} ≥ x_i` and `1 < p ≤ 2`, or when
/// `x_i ≥ x_{i+1}` and `p ≥ 2`. At `p = 2` the refined inequality is also
/// checked on `x` itself, which need not be monotone.
pub fn check_swap_monotonicity(
    p: f64,
    x: &[f64],
    i: usize,
    tol: &Tolerances,
) -> Result<CheckOutcome> {
    let params = Params::new(p)?;
    require(p > 1.0, "swap monotonicity is checked for p > 1")?;
    require_nonneg(x, "x")?;
    require(i >= 1 && i < x.len(), "i must lie in 1..len(x)")?;
    let unit = LambdaSeq::unit().resized(x.len());
    let c = c_refined(&unit, params, x.len())?;
    let mut swapped = x.to_vec();
    swapped.swap(i - 1, i);
    let fx = f_n_with_constant(&unit, params, x, c);
    let fs = f_n_with_constant(&unit, params, &swapped, c);
    let scale = x.iter().sum::<f64>().powf(p);
    let input = || json!({"p": p, "x": x, "i": i});
    let mut out = CheckOutcome::new("swap_monotonicity");
    let (xi, xj) = (x[i - 1], x[i]);
    let applies = (xj >= xi && p <= 2.0) || (xi >= xj && p >= 2.0);
    if applies {
        out.assert_le(tol, scale + fs, scale + fx, input);
    }
    if p == 2.0 {
        out.assert_le(tol, scale + fx, scale, input);
    }
    if !applies && p != 2.0 {
        out.trials += 1;
        out.inconclusive += 1;
    }
    Ok(out)
}

/// `Σ_{k=1}^n k^{p−1} < n^{p−1}(n+p−1)/p` for `p > 2`, `n ≥ 2`.
pub fn check_sum_power_inequality(p: f64, n: usize, tol: &Tolerances) -> Result<CheckOutcome> {
    require(p > 2.0 && p.is_finite(), "p must exceed 2")?;
    require(n >= 2, "n must be >= 2")?;
    let lhs: f64 = (1..=n).map(|k| (k as f64).powf(p - 1.0)).sum();
    let nf = n as f64;
    let rhs = nf.powf(p - 1.0) * (nf + p - 1.0) / p;
    let mut out = CheckOutcome::new("sum_power_inequality");
    out.assert_lt(tol, lhs, rhs, || json!({"p": p, "n": n}));
    Ok(out)
}

/// A non-increasing vector on which the refined power rule fails for `p > 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub p: f64,
    pub n: usize,
    pub c: f64,
    /// `∂f_n/∂x_n` at the all-ones vector, closed form.
    pub derivative: f64,
    /// The same derivative by central differences.
    pub derivative_fd: f64,
    /// `f_n(1, …, 1, 1 − ε) > oracle_slack` at this `ε`.
    pub epsilon: f64,
    pub f_value: f64,
    /// Located sign change of `ε ↦ f_n(1, …, 1, 1 − ε)` in `(0, 1]`.
    pub crossing: f64,
}

/// Shows that with `λ ≡ 1` and `p > 2` the refined constant does not work:
/// verifies the negative derivative at `(1, …, 1)`, halves `ε` from `1/2`
/// until `f_n(1, …, 1, 1 − ε)` exceeds the slack, then bisects for the point
/// where the sign changes back.
pub fn find_counterexample_p_gt2(p: f64, n: usize, tol: &Tolerances) -> Result<Counterexample> {
    let params = Params::new(p)?;
    require(p > 2.0, "the counterexample exists for p > 2")?;
    require(n >= 2, "n must be >= 2")?;
    let unit = LambdaSeq::unit().resized(n);
    let c = c_refined(&unit, params, n)?;
    let nf = n as f64;
    let derivative = nf.powf(p - 2.0) * (nf * p - c * (nf + p - 1.0));

    let f_last = |v: f64| {
        let mut x = vec![1.0; n];
        x[n - 1] = v;
        f_n_with_constant(&unit, params, &x, c)
    };
    let derivative_fd = (f_last(1.0 + FD_STEP) - f_last(1.0 - FD_STEP)) / (2.0 * FD_STEP);
    if (derivative - derivative_fd).abs() > 1e-5 * derivative.abs().max(1.0) {
        return Err(HardyError::SearchFailed(format!(
            "derivative cross-check failed: closed form {derivative}, finite difference {derivative_fd}"
        )));
    }
    if derivative.is_nan() || derivative >= 0.0 {
        return Err(HardyError::SearchFailed(format!(
            "derivative at the all-ones vector is {derivative}, not negative"
        )));
    }

    let f_eps = |e: f64| f_last(1.0 - e);
    let mut eps = 0.5;
    while f_eps(eps) <= tol.oracle_slack {
        eps *= 0.5;
        if eps < 1e-12 {
            return Err(HardyError::SearchFailed(format!(
                "no epsilon with f_n > {} found for p = {p}, n = {n}",
                tol.oracle_slack
            )));
        }
    }
    let f_value = f_eps(eps);

    let crossing = if f_eps(1.0) > 0.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (eps, 1.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if f_eps(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(Counterexample {
        p,
        n,
        c,
        derivative,
        derivative_fd,
        epsilon: eps,
        f_value,
        crossing,
    })
}

/// The statements the randomized suite can exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    PowerRule,
    SummationLemma,
    RatioLemma,
    CMonotone,
    GNonneg,
    RefinedPowerRule,
    SwapMonotonicity,
    SumPowerInequality,
    Counterexample,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::PowerRule,
        Check::SummationLemma,
        Check::RatioLemma,
        Check::CMonotone,
        Check::GNonneg,
        Check::RefinedPowerRule,
        Check::SwapMonotonicity,
        Check::SumPowerInequality,
        Check::Counterexample,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Check::PowerRule => "power-rule",
            Check::SummationLemma => "summation",
            Check::RatioLemma => "ratio",
            Check::CMonotone => "c-monotone",
            Check::GNonneg => "g",
            Check::RefinedPowerRule => "lemma1",
            Check::SwapMonotonicity => "swap",
            Check::SumPowerInequality => "sum-power",
            Check::Counterexample => "counterexample",
        }
    }
}

impl FromStr for Check {
    type Err = HardyError;
    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s)
            .ok_or_else(|| HardyError::rejected(format!("unknown check {s:?}")))
    }
}

/// Settings for a randomized run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_n: usize,
    pub tol: Tolerances,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 10_000,
            seed: 0,
            max_n: 12,
            tol: Tolerances::default(),
        }
    }
}

fn rng_for(check: Check, seed: u64) -> ChaCha8Rng {
    let idx = Check::ALL.iter().position(|c| *c == check).unwrap() as u64;
    ChaCha8Rng::seed_from_u64(seed ^ (idx + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Random non-increasing λ with `λ_1 > 0`; a quarter of the draws are `λ ≡ 1`.
pub fn random_lambda(rng: &mut impl Rng, n: usize) -> LambdaSeq {
    if rng.random_bool(0.25) {
        return LambdaSeq::unit().resized(n);
    }
    let mut v: Vec<f64> = (0..n).map(|_| 1.0 - rng.random::<f64>()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    LambdaSeq::new(&v).expect("sorted positive values form a valid lambda")
}

/// Random cone vector; one draw in eight is constant.
pub fn random_cone(rng: &mut impl Rng, n: usize) -> ConeVector {
    if rng.random_bool(0.125) {
        let c = 1.0 - rng.random::<f64>();
        return ConeVector::from_sorted_unchecked(vec![c; n]);
    }
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    ConeVector::from_sorted_unchecked(v)
}

fn random_nonneg(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if rng.random_bool(0.2) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

/// `v` random, `u` obtained from `v` by moving mass to the right, so every
/// partial sum of `u` is at most that of `v`.
pub fn random_dominated_pair(rng: &mut impl Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
    let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut u = v.clone();
    if n >= 2 {
        for _ in 0..rng.random_range(0..=2 * n) {
            let i = rng.random_range(0..n - 1);
            let j = rng.random_range(i + 1..n);
            let t = rng.random::<f64>() * u[i];
            u[i] -= t;
            u[j] += t;
        }
    }
    (u, v)
}

/// Increasing positive `B`, `C` satisfying both hypotheses of the ratio lemma
/// by construction.
pub fn random_ratio_pair(rng: &mut impl Rng, len: usize) -> (Vec<f64>, Vec<f64>) {
    let dc: Vec<f64> = (0..len - 1).map(|_| rng.random_range(0.1..2.0)).collect();
    let c1 = rng.random_range(0.1..2.0);
    let mut db = vec![rng.random_range(0.1..2.0)];
    for k in 0..len.saturating_sub(2) {
        let rc = dc[k] / dc[k + 1];
        let w = rng.random_range(0.5..=1.0);
        let next = db[k] / (rc * w);
        db.push(next);
    }
    let b1 = db[0] * (c1 / dc[0]) * rng.random_range(0.1..=1.0);
    let cum = |start: f64, d: &[f64]| {
        let mut out = vec![start];
        for x in d {
            out.push(out.last().unwrap() + x);
        }
        out
    };
    (cum(b1, &db), cum(c1, &dc))
}

/// Runs one randomized check for `cfg.trials` trials.
pub fn run_check(check: Check, cfg: &SuiteConfig) -> Result<CheckOutcome> {
    let mut rng = rng_for(check, cfg.seed);
    let tol = &cfg.tol;
    let max_n = cfg.max_n.max(2);
    let mut out = CheckOutcome::new(check.name());
    match check {
        Check::PowerRule => {
            for _ in 0..cfg.trials {
                let len = rng.random_range(1..=max_n);
                let a = random_nonneg(&mut rng, len);
                let p = rng.random_range(1.0..=4.0);
                let n = rng.random_range(1..=len);
                out.merge(check_power_rule(&a, p, n, tol)?);
            }
        }
        Check::SummationLemma => {
            for _ in 0..cfg.trials {
                let n = rng.random_range(1..=max_n);
                let (u, v) = random_dominated_pair(&mut rng, n);
                let a = random_cone(&mut rng, n);
                out.merge(check_summation_lemma(&u, &v, a.values(), tol)?);
            }
        }
        Check::RatioLemma => {
            for _ in 0..cfg.trials {
                let len = rng.random_range(2..=max_n);
                let (bs, cs) = random_ratio_pair(&mut rng, len);
                out.merge(check_ratio_lemma(&bs, &cs, tol)?);
            }
        }
        Check::CMonotone => {
            for _ in 0..cfg.trials {
                let n = rng.random_range(1..=max_n);
                let lambda = random_lambda(&mut rng, n);
                let p = rng.random_range(1.0..=2.0);
                out.merge(check_c_monotone(&lambda, p, tol)?);
            }
        }
        Check::GNonneg => {
            for &p in &[1.1, 1.5, 2.0] {
                out.merge(check_g_nonneg(p, 10_000, tol)?);
            }
            for _ in 0..cfg.trials {
                let p = 2.0 - rng.random::<f64>();
                let t = 0.5 * rng.random::<f64>();
                out.assert_le(tol, 0.0, g(p, t), || json!({"p": p, "t": t}));
            }
        }
        Check::RefinedPowerRule => {
            for _ in 0..cfg.trials {
                let n = rng.random_range(1..=max_n);
                let lambda = random_lambda(&mut rng, n);
                let a = random_cone(&mut rng, n);
                let p = rng.random_range(1.0..=3.0);
                out.merge(check_refined_power_rule(&lambda, p, &a, tol)?);
            }
        }
        Check::SwapMonotonicity => {
            for &r in &[0.25, 0.5, 1.0, 1.5, 2.0] {
                out.merge(check_s_r_monotone(r, 400, tol)?);
            }
            for _ in 0..cfg.trials {
                let n = rng.random_range(2..=max_n);
                let mut x = random_nonneg(&mut rng, n);
                let p = if rng.random_bool(0.25) {
                    2.0
                } else {
                    rng.random_range(1.0..=3.0f64).max(1.0 + 1e-6)
                };
                let i = rng.random_range(1..n);
                // arrange the pair so the hypothesis for this p applies
                let (lo, hi) = (x[i - 1].min(x[i]), x[i - 1].max(x[i]));
                if p <= 2.0 {
                    (x[i - 1], x[i]) = (lo, hi);
                } else {
                    (x[i - 1], x[i]) = (hi, lo);
                }
                out.merge(check_swap_monotonicity(p, &x, i, tol)?);
            }
        }
        Check::SumPowerInequality => {
            for _ in 0..cfg.trials {
                let p = 6.0 - 4.0 * rng.random::<f64>();
                let n = rng.random_range(2..=max_n);
                out.merge(check_sum_power_inequality(p, n, tol)?);
            }
        }
        Check::Counterexample => {
            for &p in &[2.1, 2.5, 3.0, 4.0] {
                for &n in &[2usize, 3, 5, 8] {
                    out.trials += 1;
                    match find_counterexample_p_gt2(p, n, tol) {
                        Ok(ce) if ce.f_value > tol.oracle_slack => {}
                        Ok(ce) => out.fail(json!({"p": p, "n": n}), ce.f_value, tol.oracle_slack),
                        Err(e) => {
                            out.fail(json!({"p": p, "n": n, "error": e.to_string()}), 0.0, 0.0)
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs several checks and returns one outcome per check.
pub fn run_suite(checks: &[Check], cfg: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    checks.iter().map(|&c| run_check(c, cfg)).collect()
}
