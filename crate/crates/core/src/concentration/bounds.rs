//! Closed-form bounds on the log-Laplace transform and the tails of `Z`.
//!
//! Tail bounds come in pairs: `log_*` returns the exponent and the plain name
//! its exponential. The exponents stay finite where the probabilities
//! underflow, so ordering and monotonicity can be checked on any grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be nonnegative and finite, got {v}")))
    }
}

fn check_pos(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

/// `t·EZ + (t/2)·υ·(exp((e^{2t} − 1)/2) − 1)`, bounding `log E e^{tZ}`.
pub fn bound_right_lmgf(t: f64, ez: f64, upsilon: f64) -> Result<f64> {
    check_nonneg("t", t)?;
    Ok(t * ez + 0.5 * t * upsilon * (0.5 * (2.0 * t).exp_m1()).exp_m1())
}

/// `-(x/4)·ln(1 + 2 ln(1 + x/υ))`.
pub fn log_bound_right_log(x: f64, upsilon: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    check_pos("upsilon", upsilon)?;
    Ok(-0.25 * x * (2.0 * (x / upsilon).ln_1p()).ln_1p())
}

pub fn bound_right_log(x: f64, upsilon: f64) -> Result<f64> {
    log_bound_right_log(x, upsilon).map(f64::exp)
}

/// Right-tail bounds on `P(Z ≥ EZ + x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RightTail {
    /// `exp(−x²/(υ + √(υ² + 3υx) + 3x/2))`
    pub sharp: f64,
    /// `exp(−x²/(2υ + 3x))`
    pub loose: f64,
}

pub fn log_bound_right_tail(x: f64, upsilon: f64) -> Result<RightTail> {
    check_nonneg("x", x)?;
    check_pos("upsilon", upsilon)?;
    let x2 = x * x;
    Ok(RightTail {
        sharp: -x2 / (upsilon + (upsilon * upsilon + 3.0 * upsilon * x).sqrt() + 1.5 * x),
        loose: -x2 / (2.0 * upsilon + 3.0 * x),
    })
}

pub fn bound_right_tail(x: f64, upsilon: f64) -> Result<RightTail> {
    let l = log_bound_right_tail(x, upsilon)?;
    Ok(RightTail {
        sharp: l.sharp.exp(),
        loose: l.loose.exp(),
    })
}

/// `−t·EZ + (υ/9)(e^{3t} − 3t − 1)`, bounding `log E e^{−tZ}`.
pub fn bound_left_lmgf(t: f64, ez: f64, upsilon: f64) -> Result<f64> {
    check_nonneg("t", t)?;
    Ok(-t * ez + upsilon / 9.0 * ((3.0 * t).exp_m1() - 3.0 * t))
}

/// `h(u) = (1 + u) ln(1 + u) − u` for `u ≥ 0`.
pub fn h(u: f64) -> f64 {
    if u.abs() < 1e-3 {
        // Σ_{k≥2} (−1)^k u^k / (k(k−1))
        let mut term = u * u;
        let mut sum = 0.0;
        for k in 2..12 {
            sum += term / (k * (k - 1)) as f64;
            term *= -u;
        }
        sum
    } else {
        // u(ln(1+u) − 1) + ln(1+u) stays finite-or-infinite without inf − inf
        let l = u.ln_1p();
        u * (l - 1.0) + l
    }
}

/// Left-tail bounds on `P(Z ≤ EZ − x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeftTail {
    /// `exp(−(υ/9)·h(3x/υ))`
    pub poisson_form: f64,
    /// `exp(−x²/(υ + √(υ² + 2υx) + x))`
    pub sharp: f64,
    /// `exp(−x²/(2υ + 2x))`
    pub loose: f64,
}

pub fn log_bound_left_tail(x: f64, upsilon: f64) -> Result<LeftTail> {
    check_nonneg("x", x)?;
    check_pos("upsilon", upsilon)?;
    let x2 = x * x;
    Ok(LeftTail {
        poisson_form: -upsilon / 9.0 * h(3.0 * x / upsilon),
        sharp: -x2 / (upsilon + (upsilon * upsilon + 2.0 * upsilon * x).sqrt() + x),
        loose: -x2 / (2.0 * upsilon + 2.0 * x),
    })
}

pub fn bound_left_tail(x: f64, upsilon: f64) -> Result<LeftTail> {
    let l = log_bound_left_tail(x, upsilon)?;
    Ok(LeftTail {
        poisson_form: l.poisson_form.exp(),
        sharp: l.sharp.exp(),
        loose: l.loose.exp(),
    })
}

/// `κ(ε) = 5/4 + 32/ε`.
pub fn kappa(eps: f64) -> f64 {
    1.25 + 32.0 / eps
}

/// `−x²/(12υ₀ + 2κ(ε)x)`.
pub fn log_bound_reynaud(x: f64, eps: f64, upsilon0: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    check_pos("eps", eps)?;
    check_pos("upsilon0", upsilon0)?;
    Ok(-x * x / (12.0 * upsilon0 + 2.0 * kappa(eps) * x))
}

/// Bound on `P(sup|I| ≥ (1+ε)E sup|I| + x)`.
pub fn bound_reynaud(x: f64, eps: f64, upsilon0: f64) -> Result<f64> {
    log_bound_reynaud(x, eps, upsilon0).map(f64::exp)
}

/// `C(ε) = (√(1+ε) − 1) ∧ 1`.
pub fn c_big(eps: f64) -> f64 {
    ((1.0 + eps).sqrt() - 1.0).min(1.0)
}

/// `c(ε) = 2(1 + 2ε)`.
pub fn c_small(eps: f64) -> f64 {
    2.0 * (1.0 + 2.0 * eps)
}

/// Exponent constant `c₂` of the first term of the integrated bound.
pub const C2: f64 = 1.0 / 6.0;

/// Default `c₁` of the integrated bound.
pub const DEFAULT_C1: f64 = 4.0;

/// Default `c₃` of the integrated bound.
pub const DEFAULT_C3: f64 = 1.0 / 42.0;

/// Inputs of the integrated bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratedInputs {
    pub eps: f64,
    pub h: f64,
    pub upsilon: f64,
    pub m1: f64,
    pub n: usize,
    pub c1: f64,
    pub c3: f64,
}

/// `c₁·{(υ/n)·exp(−c₂ ε nH²/υ) + M₁²/(C(ε)² n²)·exp(−c₃ C(ε) √ε nH/M₁)}`,
/// bounding `E[(sup S_n/n)² − c(ε)H²]₊`.
pub fn bound_integrated(p: &IntegratedInputs) -> Result<f64> {
    for (name, v) in [("eps", p.eps), ("H", p.h), ("upsilon", p.upsilon), ("M1", p.m1), ("c1", p.c1), ("c3", p.c3)] {
        check_pos(name, v)?;
    }
    if p.n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let n = p.n as f64;
    let cb = c_big(p.eps);
    let first = p.upsilon / n * (-C2 * p.eps * n * p.h * p.h / p.upsilon).exp();
    let second = p.m1 * p.m1 / (cb * cb * n * n) * (-p.c3 * cb * p.eps.sqrt() * n * p.h / p.m1).exp();
    Ok(p.c1 * (first + second))
}

/// Ball constants `M₁`, `H`, `υ` for `B_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallConstants {
    pub m1: f64,
    pub h: f64,
    pub upsilon: f64,
}

/// `M₁ = √(2k+1)`, `H = √((β₀∨1)(2k+1)/n)`, `υ = √(2k+1)·‖λ‖·(β₀∨1)`.
pub fn ball_constants(k: usize, beta0: f64, lambda_l2_norm: f64, n: usize) -> Result<BallConstants> {
    check_pos("beta0", beta0)?;
    check_pos("lambda_l2_norm", lambda_l2_norm)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let d = (2 * k + 1) as f64;
    let b = beta0.max(1.0);
    Ok(BallConstants {
        m1: d.sqrt(),
        h: (b * d / n as f64).sqrt(),
        upsilon: d.sqrt() * lambda_l2_norm * b,
    })
}
