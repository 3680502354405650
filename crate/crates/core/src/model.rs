//! Validated domain types shared by every other module.
//!
//! All types are immutable once constructed. Sequences are stored 0-based but
//! the accessors that mirror the mathematical indexing (`lambda_at`,
//! `big_lambda`, `WeightSpec::value`) take 1-based indices.

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};

/// Forgiven monotonicity/negativity violation when validating user sequences.
pub const DEFAULT_ABS_TOL: f64 = 1e-12;

/// The exponent `p ≥ 1` together with its Hölder conjugate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Params {
    p: f64,
}

impl Params {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(HardyError::rejected(format!(
                "exponent p must be finite and >= 1, got {p}"
            )));
        }
        Ok(Params { p })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Hölder conjugate; `+inf` when `p = 1`.
    pub fn q(&self) -> f64 {
        if self.p == 1.0 {
            f64::INFINITY
        } else {
            self.p / (self.p - 1.0)
        }
    }

    /// `1/q`, which is exactly `0` at `p = 1`.
    pub fn inv_q(&self) -> f64 {
        if self.p == 1.0 {
            0.0
        } else {
            1.0 - 1.0 / self.p
        }
    }

    /// True on the branch `1 ≤ p ≤ 2` where the refined constant applies.
    #[inline]
    pub fn is_refined_range(&self) -> bool {
        self.p <= 2.0
    }
}

impl TryFrom<f64> for Params {
    type Error = HardyError;
    fn try_from(p: f64) -> Result<Self> {
        Params::new(p)
    }
}

impl From<Params> for f64 {
    fn from(v: Params) -> f64 {
        v.p
    }
}

/// Comparison tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub oracle_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-9,
            abs: DEFAULT_ABS_TOL,
            oracle_slack: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn new(rel: f64, abs: f64, oracle_slack: f64) -> Result<Self> {
        let all_pos = [rel, abs, oracle_slack]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if !all_pos {
            return Err(HardyError::rejected("tolerances must be finite and > 0"));
        }
        if oracle_slack < rel {
            return Err(HardyError::rejected("oracle_slack must be >= rel"));
        }
        Ok(Tolerances {
            rel,
            abs,
            oracle_slack,
        })
    }

    /// Defaults, with `rel` overridden by the `HARDYLAB_TOL` environment
    /// variable when set.
    pub fn from_env() -> Result<Self> {
        let base = Tolerances::default();
        match std::env::var("HARDYLAB_TOL") {
            Ok(s) => {
                let rel: f64 = s.trim().parse().map_err(|_| HardyError::Parse {
                    location: "HARDYLAB_TOL".into(),
                    message: format!("not a decimal number: {s:?}"),
                })?;
                Tolerances::new(rel, base.abs, base.oracle_slack.max(rel))
            }
            Err(_) => Ok(base),
        }
    }

    /// Slack scaled to the magnitude of the compared quantities.
    #[inline]
    pub fn slack_for(&self, a: f64, b: f64) -> f64 {
        self.oracle_slack * 1f64.max(a.abs()).max(b.abs())
    }

    /// `|a - b| <= rel * max(|a|, |b|) + abs`.
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.rel * a.abs().max(b.abs()) + self.abs
    }
}

/// Validate a sequence as non-negative and non-increasing, clamping
/// violations no larger than `abs`.
fn validate_monotone(values: &[f64], abs: f64, what: &str) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(HardyError::rejected(format!("{what} must be non-empty")));
    }
    let mut out = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(HardyError::rejected_at(
                format!("{what} value is not finite"),
                i + 1,
            ));
        }
        let mut v = if v < 0.0 {
            if v < -abs {
                return Err(HardyError::rejected_at(
                    format!("{what} value is negative"),
                    i + 1,
                ));
            }
            0.0
        } else {
            v
        };
        if let Some(&prev) = out.last() {
            if v > prev {
                if v - prev > abs {
                    return Err(HardyError::rejected_at(
                        format!("{what} is not non-increasing"),
                        i + 1,
                    ));
                }
                v = prev;
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// The non-negative, non-increasing sequence `λ` with its partial sums `Λ`.
///
/// Indices past the stored length see `λ` continued as the constant
/// `λ_N`, so `Λ_n = Λ_N + (n - N) λ_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaSeq {
    values: Vec<f64>,
    partials: Vec<f64>,
}

impl LambdaSeq {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::with_tolerance(values, DEFAULT_ABS_TOL)
    }

    pub fn with_tolerance(values: &[f64], abs: f64) -> Result<Self> {
        if let Some(&first) = values.first() {
            if first.is_nan() || first <= 0.0 {
                return Err(HardyError::rejected_at("lambda_1 must be > 0", 1));
            }
        }
        let values = validate_monotone(values, abs, "lambda")?;
        let partials = values
            .iter()
            .scan(0.0, |acc, &v| {
                *acc += v;
                Some(*acc)
            })
            .collect();
        Ok(LambdaSeq { values, partials })
    }

    /// The unit sequence `λ ≡ 1`.
    pub fn unit() -> Self {
        LambdaSeq {
            values: vec![1.0],
            partials: vec![1.0],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn partials(&self) -> &[f64] {
        &self.partials
    }

    /// True when every stored value is exactly one (so `Λ_n = n` everywhere).
    pub fn is_unit(&self) -> bool {
        self.values.iter().all(|&v| v == 1.0)
    }

    /// `λ_k` for 1-based `k`, with constant extension.
    #[inline]
    pub fn lambda_at(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        let n = self.values.len();
        if k <= n {
            self.values[k - 1]
        } else {
            self.values[n - 1]
        }
    }

    /// `Λ_k` for 1-based `k`, with constant extension.
    #[inline]
    pub fn big_lambda(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        let n = self.values.len();
        if k <= n {
            self.partials[k - 1]
        } else {
            self.partials[n - 1] + (k - n) as f64 * self.values[n - 1]
        }
    }

    /// The sequence extended (by the constant rule) or cut to length `n`.
    pub fn resized(&self, n: usize) -> LambdaSeq {
        let values: Vec<f64> = (1..=n.max(1)).map(|k| self.lambda_at(k)).collect();
        let partials = (1..=n.max(1)).map(|k| self.big_lambda(k)).collect();
        LambdaSeq { values, partials }
    }
}

/// Which analytic family (if any) a weight sequence belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    Explicit,
    PowerFamily,
    GeometricFamily,
}

/// The weight sequence `(b_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WeightSpec {
    /// `b_1..b_M`, zero beyond `M`.
    Explicit { values: Vec<f64> },
    /// `b_n = n^alpha`.
    Power { alpha: f64 },
    /// `b_n = r^n`, `0 < r < 1`.
    Geometric { r: f64 },
}

impl WeightSpec {
    pub fn explicit(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(HardyError::rejected("explicit weights must be non-empty"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(HardyError::rejected_at(
                    "weights must be finite and non-negative",
                    i + 1,
                ));
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(HardyError::rejected("weights are identically zero"));
        }
        Ok(WeightSpec::Explicit {
            values: values.to_vec(),
        })
    }

    pub fn power(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(HardyError::rejected("power exponent must be finite"));
        }
        Ok(WeightSpec::Power { alpha })
    }

    pub fn geometric(r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(HardyError::rejected(format!(
                "geometric ratio must lie in (0, 1), got {r}"
            )));
        }
        Ok(WeightSpec::Geometric { r })
    }

    pub fn kind(&self) -> WeightKind {
        match self {
            WeightSpec::Explicit { .. } => WeightKind::Explicit,
            WeightSpec::Power { .. } => WeightKind::PowerFamily,
            WeightSpec::Geometric { .. } => WeightKind::GeometricFamily,
        }
    }

    /// `b_n` for 1-based `n`.
    #[inline]
    pub fn value(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match self {
            WeightSpec::Explicit { values } => values.get(n - 1).copied().unwrap_or(0.0),
            WeightSpec::Power { alpha } => (n as f64).powf(*alpha),
            WeightSpec::Geometric { r } => r.powi(n.min(i32::MAX as usize) as i32),
        }
    }

    /// Stored length for explicit weights; `None` for the infinite families.
    pub fn support(&self) -> Option<usize> {
        match self {
            WeightSpec::Explicit { values } => Some(values.len()),
            _ => None,
        }
    }

    /// Index of the first strictly positive weight.
    pub fn first_positive(&self) -> usize {
        match self {
            WeightSpec::Explicit { values } => {
                values.iter().position(|&v| v > 0.0).map_or(1, |i| i + 1)
            }
            _ => 1,
        }
    }
}

/// A finite non-negative, non-increasing trial vector, embedded as
/// `(x_1, …, x_n, 0, 0, …)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ConeVector {
    values: Vec<f64>,
}

impl ConeVector {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::with_tolerance(values, DEFAULT_ABS_TOL)
    }

    pub fn with_tolerance(values: &[f64], abs: f64) -> Result<Self> {
        Ok(ConeVector {
            values: validate_monotone(values, abs, "cone vector")?,
        })
    }

    /// Wraps values already known to be in the cone.
    pub(crate) fn from_sorted_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.windows(2).all(|w| w[0] >= w[1]));
        debug_assert!(values.iter().all(|&v| v >= 0.0));
        ConeVector { values }
    }

    /// `(1, …, 1)` with `n` ones.
    pub fn step(n: usize) -> Self {
        ConeVector {
            values: vec![1.0; n.max(1)],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(HardyError::rejected(
                "scale factor must be positive and finite",
            ));
        }
        Ok(ConeVector {
            values: self.values.iter().map(|v| v * c).collect(),
        })
    }
}

impl TryFrom<Vec<f64>> for ConeVector {
    type Error = HardyError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        ConeVector::new(&v)
    }
}

impl From<ConeVector> for Vec<f64> {
    fn from(v: ConeVector) -> Vec<f64> {
        v.values
    }
}
