//! Penalized-contrast choice of the projection dimension.
//!
//! The contrast of `λ̂_k` is `-Σ_{|j|≤k} β̂_j²` and the penalty is
//! `24 · (β̂₀ ∨ 1) · (2k+1)/n`; `k̂` is the smallest minimizer of their sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{empirical_coeffs, project, EmpiricalCoeffs, ProjectionEstimate};
use crate::pointprocess::SampleSet;

/// Penalty constant.
pub const PENALTY_CONSTANT: f64 = 24.0;

/// Which mass enters the penalty scale `(β ∨ 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PenaltyScale {
    /// `β̂₀`, computable from data.
    #[default]
    Empirical,
    /// The true `β₀`, for comparison runs.
    Oracle,
}

/// One row of the selection criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub k: usize,
    pub contrast: f64,
    pub penalty: f64,
}

impl CriterionRow {
    pub fn criterion(&self) -> f64 {
        self.contrast + self.penalty
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub k_hat: usize,
    pub criterion: Vec<CriterionRow>,
    /// The realized `β ∨ 1` used in the penalty.
    pub pen_scale: f64,
}

impl SelectionTrace {
    /// Brute-force check that `k_hat` is the smallest minimizer of the traced criterion.
    pub fn verify_argmin(&self) -> Result<()> {
        let best = self
            .criterion
            .iter()
            .map(CriterionRow::criterion)
            .fold(f64::INFINITY, f64::min);
        let first = self
            .criterion
            .iter()
            .find(|r| r.criterion() == best)
            .map(|r| r.k)
            .ok_or_else(|| Error::Invariant("empty selection trace".into()))?;
        if first != self.k_hat {
            return Err(Error::Invariant(format!(
                "selection trace argmin is {first}, recorded k_hat is {}",
                self.k_hat
            )));
        }
        Ok(())
    }

    /// CSV body rows `k,contrast,penalty,criterion`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,contrast,penalty,criterion\n");
        for r in &self.criterion {
            s.push_str(&format!("{},{:e},{:e},{:e}\n", r.k, r.contrast, r.penalty, r.criterion()));
        }
        s
    }
}

/// `Υ_n(λ̂_k) = -Σ_{|j|≤k} β̂_j²`.
pub fn contrast_at(emp: &EmpiricalCoeffs, k: usize) -> Result<f64> {
    if k > emp.coeffs.max_index() {
        return Err(Error::IndexOutOfRange {
            requested: k,
            available: emp.coeffs.max_index(),
        });
    }
    let k = k as i64;
    Ok(-(-k..=k).map(|j| emp.coeffs.get(j).powi(2)).sum::<f64>())
}

/// `β ∨ 1` for the chosen penalty scale; `Oracle` needs the true `β₀`.
pub fn penalty_scale(emp: &EmpiricalCoeffs, scale: PenaltyScale, beta0_true: Option<f64>) -> Result<f64> {
    match (scale, beta0_true) {
        (PenaltyScale::Empirical, _) => Ok(emp.beta0().max(1.0)),
        (PenaltyScale::Oracle, Some(b)) => Ok(b.max(1.0)),
        (PenaltyScale::Oracle, None) => Err(Error::InvalidParameter(
            "oracle penalty scale requires the true mass".into(),
        )),
    }
}

/// `24 · scale · (2k+1) / n`.
pub fn penalty_from_scale(scale: f64, k: usize, n: usize) -> f64 {
    PENALTY_CONSTANT * scale * (2 * k + 1) as f64 / n as f64
}

/// `pen_k = 24 · (β̂₀ ∨ 1) · (2k+1) / n`.
pub fn penalty_at(emp: &EmpiricalCoeffs, k: usize) -> f64 {
    penalty_from_scale(emp.beta0().max(1.0), k, emp.n)
}

/// Full criterion over `k = 0..=k_max` with penalty scale `pen_scale`, smallest minimizer on ties.
pub fn select_dimension_with(emp: &EmpiricalCoeffs, k_max: usize, pen_scale: f64) -> Result<SelectionTrace> {
    if k_max > emp.coeffs.max_index() {
        return Err(Error::IndexOutOfRange {
            requested: k_max,
            available: emp.coeffs.max_index(),
        });
    }
    let mut criterion = Vec::with_capacity(k_max + 1);
    let mut contrast = -emp.coeffs.get(0).powi(2);
    let mut k_hat = 0;
    let mut best = f64::INFINITY;
    for k in 0..=k_max {
        if k > 0 {
            let j = k as i64;
            contrast -= emp.coeffs.get(j).powi(2) + emp.coeffs.get(-j).powi(2);
        }
        let row = CriterionRow {
            k,
            contrast,
            penalty: penalty_from_scale(pen_scale, k, emp.n),
        };
        if row.criterion() < best {
            best = row.criterion();
            k_hat = k;
        }
        criterion.push(row);
    }
    Ok(SelectionTrace {
        k_hat,
        criterion,
        pen_scale,
    })
}

pub fn select_dimension(emp: &EmpiricalCoeffs, k_max: usize) -> Result<SelectionTrace> {
    select_dimension_with(emp, k_max, emp.beta0().max(1.0))
}

/// Empirical coefficients up to `k_max`, selection, and projection at `k̂`.
pub fn adaptive_estimate_with(
    samples: &SampleSet,
    k_max: usize,
    scale: PenaltyScale,
    beta0_true: Option<f64>,
) -> Result<(ProjectionEstimate, SelectionTrace)> {
    if k_max > samples.n() {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} exceeds the sample size n = {}",
            samples.n()
        )));
    }
    let emp = empirical_coeffs(samples, k_max);
    let trace = select_dimension_with(&emp, k_max, penalty_scale(&emp, scale, beta0_true)?)?;
    Ok((project(&emp, trace.k_hat)?, trace))
}

pub fn adaptive_estimate(samples: &SampleSet, k_max: usize) -> Result<(ProjectionEstimate, SelectionTrace)> {
    adaptive_estimate_with(samples, k_max, PenaltyScale::Empirical, None)
}

/// The event `Ξ = {(β₀∨1)/2 ≤ β̂₀∨1 ≤ 2(β₀∨1)}`.
pub fn xi_indicator(emp: &EmpiricalCoeffs, beta0_true: f64) -> bool {
    let b = beta0_true.max(1.0);
    let bh = emp.beta0().max(1.0);
    b / 2.0 <= bh && bh <= 2.0 * b
}

/// `ω₁(η) = 1 − η + η ln η` and `ω₂(η) = 1 − 1/η − (1/η) ln η` for `0 < η < 1`.
pub fn chernoff_omegas(eta: f64) -> Result<(f64, f64)> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1), got {eta}")));
    }
    let l = eta.ln();
    Ok((1.0 - eta + eta * l, 1.0 - 1.0 / eta - l / eta))
}

/// `exp(−2ω₁(1/2)·n) + exp(−ω₂(1/2)·n)`.
pub fn xi_failure_bound(n: usize) -> f64 {
    let (w1, w2) = chernoff_omegas(0.5).expect("1/2 is in range");
    (-2.0 * w1 * n as f64).exp() + (-w2 * n as f64).exp()
}
