//! Empirical Fourier coefficients, projection estimators and the oracle
//! dimension that balances squared bias against variance.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::basis::{gamma_value, synthesize, CoeffVector, GammaSequence};
use crate::error::{Error, Result};
use crate::numeric::integrate_unit;
use crate::pointprocess::{IntensityModel, SampleSet};

/// `β̂_j = (1/n) Σ_i Σ_{x ∈ N_i} φ_j(x)` for `|j| ≤ J`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCoeffs {
    pub coeffs: CoeffVector,
    pub n: usize,
}

impl EmpiricalCoeffs {
    pub fn beta0(&self) -> f64 {
        self.coeffs.get(0)
    }
}

/// Accumulates `Σ_x cos(2πjx)` and `Σ_x sin(2πjx)` for `j = 1..=J` over `points`.
fn trig_sums(points: impl Iterator<Item = f64>, max_index: usize, cos: &mut [f64], sin: &mut [f64]) {
    for x in points {
        let (s1, c1) = (2.0 * PI * x).sin_cos();
        let (mut s, mut c) = (s1, c1);
        for j in 1..=max_index {
            cos[j - 1] += c;
            sin[j - 1] += s;
            if j % 64 == 0 {
                let (sj, cj) = (2.0 * PI * (j + 1) as f64 * x).sin_cos();
                s = sj;
                c = cj;
            } else {
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
        }
    }
}

pub fn empirical_coeffs(samples: &SampleSet, max_index: usize) -> EmpiricalCoeffs {
    let n = samples.n();
    let mut cos = vec![0.0; max_index];
    let mut sin = vec![0.0; max_index];
    let points = samples.patterns.iter().flat_map(|p| p.points().iter().copied());
    trig_sums(points, max_index, &mut cos, &mut sin);
    let inv = 1.0 / n as f64;
    let mut coeffs = CoeffVector::zeros(max_index);
    coeffs.set(0, samples.total_count() as f64 * inv);
    for j in 1..=max_index {
        coeffs.set(j as i64, SQRT_2 * cos[j - 1] * inv);
        coeffs.set(-(j as i64), SQRT_2 * sin[j - 1] * inv);
    }
    EmpiricalCoeffs { coeffs, n }
}

/// `λ̂_k = Σ_{|j|≤k} β̂_j φ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionEstimate {
    pub k: usize,
    pub coeffs: CoeffVector,
}

impl ProjectionEstimate {
    pub fn eval(&self, t: f64) -> f64 {
        synthesize(&self.coeffs, t)
    }

    /// `λ̂_{k+}(t) = λ̂_k(t) ∨ 0`.
    pub fn eval_positive_part(&self, t: f64) -> f64 {
        self.eval(t).max(0.0)
    }

    /// View as empirical coefficients, for nested projections.
    pub fn as_emp(&self, n: usize) -> EmpiricalCoeffs {
        EmpiricalCoeffs {
            coeffs: self.coeffs.clone(),
            n,
        }
    }
}

pub fn project(emp: &EmpiricalCoeffs, k: usize) -> Result<ProjectionEstimate> {
    Ok(ProjectionEstimate {
        k,
        coeffs: emp.coeffs.truncated(k)?,
    })
}

/// `max(λ̂_k(t), 0)`.
pub fn eval_positive_part(est: &ProjectionEstimate, t: f64) -> f64 {
    est.eval_positive_part(t)
}

/// Oracle dimension `k*` and rate `Ψ_n = max{γ_{k*}^{-2}, (2k*+1)/n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub k_star: usize,
    pub psi_n: f64,
}

/// Default search cap `4⌈√n⌉ + 64`.
pub fn default_k_cap(n: usize) -> usize {
    4 * (n as f64).sqrt().ceil() as usize + 64
}

/// The objective `max{γ_k^{-2}, (2k+1)/n}`.
pub fn oracle_objective(gamma: &GammaSequence, n: usize, k: usize) -> f64 {
    let g = gamma_value(gamma, k as i64);
    (1.0 / (g * g)).max((2 * k + 1) as f64 / n as f64)
}

/// `argmin_{0≤k≤k_cap} max{γ_k^{-2}, (2k+1)/n}`, smallest minimizer on ties.
///
/// The search stops once `(2k+1)/n` exceeds the best objective seen, since that
/// term is strictly increasing. Fails if the minimizer is `k_cap` itself.
pub fn oracle_dimension(gamma: &GammaSequence, n: usize, k_cap: usize) -> Result<OracleResult> {
    if k_cap < 1 || n < 1 {
        return Err(Error::InvalidParameter("k_cap and n must be at least 1".into()));
    }
    gamma.validate()?;
    let mut best = OracleResult {
        k_star: 0,
        psi_n: oracle_objective(gamma, n, 0),
    };
    for k in 1..=k_cap {
        if (2 * k + 1) as f64 / n as f64 > best.psi_n {
            return Ok(best);
        }
        let v = oracle_objective(gamma, n, k);
        if v < best.psi_n {
            best = OracleResult { k_star: k, psi_n: v };
        }
    }
    if best.k_star == k_cap {
        return Err(Error::KCapTooSmall { k_cap });
    }
    Ok(best)
}

/// Log-log exponent `a` in `Ψ_n ≍ n^a` up to logarithmic factors.
pub fn rate_exponent(gamma: &GammaSequence) -> f64 {
    match *gamma {
        GammaSequence::Polynomial { p } => -2.0 * p / (2.0 * p + 1.0),
        GammaSequence::Analytic { .. } | GammaSequence::Generalized { .. } => -1.0,
    }
}

/// Rate shape: `n^{-2p/(2p+1)}`, `log n / n` or `(log n)^{1/p} / n`.
pub fn rate_target(gamma: &GammaSequence, n: usize) -> f64 {
    let nf = n as f64;
    match *gamma {
        GammaSequence::Polynomial { p } => nf.powf(-2.0 * p / (2.0 * p + 1.0)),
        GammaSequence::Analytic { .. } => nf.ln() / nf,
        GammaSequence::Generalized { p, .. } => nf.ln().powf(1.0 / p) / nf,
    }
}

/// `Σ_{|j|≤k}(β̂_j − β_j)² + Σ_{k<|j|≤J} β_j² + tail_sq`.
pub fn mise_exact(est: &ProjectionEstimate, truth: &CoeffVector, tail_sq: f64) -> Result<f64> {
    if truth.max_index() < est.k {
        return Err(Error::IndexOutOfRange {
            requested: est.k,
            available: truth.max_index(),
        });
    }
    let k = est.k as i64;
    let mut s = tail_sq;
    for (j, b) in truth.iter() {
        if j.abs() <= k {
            s += (est.coeffs.get(j) - b).powi(2);
        } else {
            s += b * b;
        }
    }
    Ok(s)
}

/// `∫(λ̂_{k+} − λ)²` by quadrature.
pub fn ise_positive_part(est: &ProjectionEstimate, model: &IntensityModel) -> f64 {
    integrate_unit(|t| (est.eval_positive_part(t) - model.eval(t)).powi(2))
}

/// `sup_{t∈B_k} ⟨λ̂_n − λ, t⟩² = Σ_{|j|≤k}(β̂_j − β_j)²`.
pub fn sup_ball_stat(emp: &EmpiricalCoeffs, truth: &CoeffVector, k: usize) -> Result<f64> {
    let avail = emp.coeffs.max_index().min(truth.max_index());
    if k > avail {
        return Err(Error::IndexOutOfRange {
            requested: k,
            available: avail,
        });
    }
    let k = k as i64;
    Ok((-k..=k).map(|j| (emp.coeffs.get(j) - truth.get(j)).powi(2)).sum())
}
