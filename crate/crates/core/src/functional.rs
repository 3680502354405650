//! The weighted averaging operator, the Hardy ratio and the proof function
//! `f_n` of the refined power rule.

use serde::{Deserialize, Serialize};

use crate::constants::{c_refined, TailTable};
use crate::error::{HardyError, Result};
use crate::model::{ConeVector, LambdaSeq, Params, WeightSpec};

/// `A_n = Σ_{k≤n} λ_k x_k / Λ_n` for `n = 1..=len(x)`.
pub fn weighted_averages(lambda: &LambdaSeq, x: &ConeVector) -> Vec<f64> {
    let mut s = 0.0;
    x.values()
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            s += lambda.lambda_at(i + 1) * xi;
            s / lambda.big_lambda(i + 1)
        })
        .collect()
}

/// Both sides of the Hardy inequality for one trial vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioBreakdown {
    /// `Σ b_n A_n^p`, with the part beyond `len(x)` taken at its lower
    /// (partial-sum) endpoint for analytic weights.
    pub lhs: f64,
    /// Width of the bracket on `lhs`; zero for explicit weights.
    pub lhs_error: f64,
    /// `Σ b_n x_n^p`.
    pub rhs: f64,
    pub ratio: f64,
    pub averages: Vec<f64>,
}

/// Evaluates the ratio and its gradient for trial vectors of a fixed length,
/// caching the weights and the tail beyond the truncation.
#[derive(Debug, Clone)]
pub struct RatioEvaluator {
    params: Params,
    lambda: LambdaSeq,
    weights: Vec<f64>,
    tail_after: f64,
    tail_error: f64,
}

impl RatioEvaluator {
    pub fn new(b: &WeightSpec, lambda: &LambdaSeq, params: Params, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(HardyError::rejected("trial length must be >= 1"));
        }
        let tails = TailTable::build(b, lambda, params, n + 1, n + 1)?;
        Ok(RatioEvaluator {
            params,
            lambda: lambda.resized(n),
            weights: (1..=n).map(|k| b.value(k)).collect(),
            tail_after: tails.value(n + 1),
            tail_error: tails.error(),
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `T_{n+1} = Σ_{m>n} b_m / Λ_m^p` (partial-sum value).
    pub fn tail_after(&self) -> f64 {
        self.tail_after
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<RatioBreakdown> {
        self.check_len(x)?;
        let p = self.params.p();
        let mut s = 0.0;
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        let mut averages = Vec::with_capacity(x.len());
        for (i, (&xi, &bi)) in x.iter().zip(&self.weights).enumerate() {
            s += self.lambda.lambda_at(i + 1) * xi;
            let a = s / self.lambda.big_lambda(i + 1);
            averages.push(a);
            if bi != 0.0 {
                lhs += bi * a.powf(p);
                rhs += bi * xi.powf(p);
            }
        }
        let sp = s.powf(p);
        lhs += sp * self.tail_after;
        let lhs_error = sp * self.tail_error;
        if rhs == 0.0 {
            return Err(HardyError::ZeroDenominator(
                "sum of b_n x_n^p is zero for this trial vector".into(),
            ));
        }
        let ratio = lhs / rhs;
        if !ratio.is_finite() {
            return Err(HardyError::NonFinite("hardy ratio".into()));
        }
        Ok(RatioBreakdown {
            lhs,
            lhs_error,
            rhs,
            ratio,
            averages,
        })
    }

    /// Ratio and its gradient with respect to `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let br = self.evaluate(x)?;
        let p = self.params.p();
        let n = x.len();
        let s_n = br.averages[n - 1] * self.lambda.big_lambda(n);
        // g_j = Σ_{m=j}^n b_m p A_m^{p-1} / Λ_m + p S_n^{p-1} T_{n+1}; ∂lhs/∂x_j = λ_j g_j
        let mut g = p * s_n.powf(p - 1.0) * self.tail_after;
        let mut grad = vec![0.0; n];
        for j in (1..=n).rev() {
            let bj = self.weights[j - 1];
            if bj != 0.0 {
                g += bj * p * br.averages[j - 1].powf(p - 1.0) / self.lambda.big_lambda(j);
            }
            let d_lhs = self.lambda.lambda_at(j) * g;
            let d_rhs = if bj != 0.0 {
                p * bj * x[j - 1].powf(p - 1.0)
            } else {
                0.0
            };
            grad[j - 1] = (d_lhs - br.ratio * d_rhs) / br.rhs;
        }
        if grad.iter().any(|v| !v.is_finite()) {
            return Err(HardyError::NonFinite("ratio gradient".into()));
        }
        Ok((br.ratio, grad))
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.weights.len() {
            return Err(HardyError::rejected(format!(
                "trial vector has length {}, evaluator expects {}",
                x.len(),
                self.weights.len()
            )));
        }
        Ok(())
    }
}

/// `Σ b_n A_n^p / Σ b_n x_n^p` for `x` embedded as `(x_1, …, x_n, 0, …)`.
pub fn hardy_ratio(
    b: &WeightSpec,
    lambda: &LambdaSeq,
    params: Params,
    x: &ConeVector,
) -> Result<RatioBreakdown> {
    RatioEvaluator::new(b, lambda, params, x.len())?.evaluate(x.values())
}

/// `(Σ λ_k x_k)^p − c Σ λ_k x_k (Σ_{i≤k} λ_i x_i)^{p-1}` for an arbitrary
/// non-negative `x` and a caller-supplied constant `c`.
pub fn f_n_with_constant(lambda: &LambdaSeq, params: Params, x: &[f64], c: f64) -> f64 {
    let p = params.p();
    let mut s = 0.0;
    let mut acc = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let w = lambda.lambda_at(i + 1) * xi;
        s += w;
        acc += w * s.powf(p - 1.0);
    }
    s.powf(p) - c * acc
}

/// `f_n` with the refined constant `C_{n,p,λ}`, `n = len(x)`.
pub fn f_n(lambda: &LambdaSeq, params: Params, x: &ConeVector) -> Result<f64> {
    f_n_slice(lambda, params, x.values())
}

/// `f_n` with the refined constant on an arbitrary non-negative slice.
pub fn f_n_slice(lambda: &LambdaSeq, params: Params, x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(HardyError::rejected("f_n needs a non-empty vector"));
    }
    let lam = lambda.resized(lambda.len().max(x.len()));
    let c = c_refined(&lam, params, x.len())?;
    Ok(f_n_with_constant(&lam, params, x, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(p: f64) -> Params {
        Params::new(p).unwrap()
    }

    fn cv(v: &[f64]) -> ConeVector {
        ConeVector::new(v).unwrap()
    }

    #[test]
    fn averages_examples() {
        let l = LambdaSeq::new(&[1.0, 1.0]).unwrap();
        assert_eq!(weighted_averages(&l, &cv(&[0.7, 0.7])), vec![0.7, 0.7]);
        assert_eq!(weighted_averages(&l, &cv(&[1.0, 0.0])), vec![1.0, 0.5]);
        let l = LambdaSeq::new(&[2.0, 1.0]).unwrap();
        let a = weighted_averages(&l, &cv(&[1.0, 0.0]));
        assert!((a[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let b = WeightSpec::explicit(&[1.0, 1.0]).unwrap();
        let l = LambdaSeq::new(&[1.0, 1.0]).unwrap();
        let r = hardy_ratio(&b, &l, pp(2.0), &cv(&[1.0, 1.0])).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (2.0, 2.0, 1.0));
        let r = hardy_ratio(&b, &l, pp(2.0), &cv(&[1.0, 0.0])).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (1.25, 1.0, 1.25));
        // x shorter than the support: the frozen numerator carries on
        let r = hardy_ratio(&b, &l, pp(2.0), &cv(&[1.0])).unwrap();
        assert_eq!(r.ratio, 1.25);
    }

    #[test]
    fn ratio_zero_rhs() {
        let b = WeightSpec::explicit(&[0.0, 1.0]).unwrap();
        let r = hardy_ratio(&b, &LambdaSeq::unit(), pp(2.0), &cv(&[1.0]));
        assert!(matches!(r, Err(HardyError::ZeroDenominator(_))));
    }

    #[test]
    fn ratio_family_reports_bracket() {
        let b = WeightSpec::power(0.0).unwrap();
        let r = hardy_ratio(&b, &LambdaSeq::unit(), pp(2.0), &cv(&[1.0])).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(r.lhs <= zeta2 && zeta2 <= r.lhs + r.lhs_error);
    }

    #[test]
    fn f_n_examples() {
        let l = LambdaSeq::unit();
        assert!((f_n(&l, pp(2.0), &cv(&[1.0, 0.0])).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        let v = f_n(&l, pp(3.0), &cv(&[1.0, 0.9])).unwrap();
        assert!((v - 0.0606).abs() < 1e-12, "{v}");
        let lam = LambdaSeq::new(&[3.0, 2.0, 0.5, 0.5]).unwrap();
        for p in [1.0, 1.3, 2.0, 2.7] {
            let v = f_n(&lam, pp(p), &cv(&[0.4; 4])).unwrap();
            assert!(v.abs() < 1e-12, "p = {p}: {v}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let b = WeightSpec::explicit(&[1.0, 0.5, 0.25, 2.0, 0.1]).unwrap();
        let l = LambdaSeq::new(&[2.0, 1.0, 1.0]).unwrap();
        let ev = RatioEvaluator::new(&b, &l, pp(1.5), 4).unwrap();
        let x = [1.0, 0.8, 0.5, 0.3];
        let (_, g) = ev.gradient(&x).unwrap();
        let h = 1e-6;
        for j in 0..4 {
            let mut up = x;
            let mut dn = x;
            up[j] += h;
            dn[j] -= h;
            let fd =
                (ev.evaluate(&up).unwrap().ratio - ev.evaluate(&dn).unwrap().ratio) / (2.0 * h);
            assert!(
                (fd - g[j]).abs() <= 1e-6 * g[j].abs().max(1.0),
                "{j}: {fd} vs {}",
                g[j]
            );
        }
    }
}
