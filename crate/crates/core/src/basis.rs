//! Trigonometric orthonormal basis of L²[0, 1], Fourier analysis and synthesis,
//! weight sequences γ and the smoothness ellipsoids they define.
//!
//! The basis is `φ₀ = 1`, `φ_j(t) = √2 cos(2πjt)` and `φ_{-j}(t) = √2 sin(2πjt)`
//! for `j ≥ 1`. Coefficient vectors store the symmetric block `{-J, …, J}`
//! contiguously, so index `j` lives at offset `j + J`.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::DEFAULT_PANELS;
use crate::pointprocess::IntensityModel;

/// Basis function `φ_j(t)`.
pub fn phi(j: i64, t: f64) -> f64 {
    match j {
        0 => 1.0,
        j if j > 0 => SQRT_2 * (2.0 * PI * j as f64 * t).cos(),
        j => SQRT_2 * (2.0 * PI * (-j) as f64 * t).sin(),
    }
}

/// Coefficients `c_j` for `j ∈ {-J, …, J}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoeffVectorRepr", into = "CoeffVectorRepr")]
pub struct CoeffVector {
    max_index: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoeffVectorRepr {
    #[serde(rename = "J")]
    max_index: usize,
    values: Vec<f64>,
}

impl TryFrom<CoeffVectorRepr> for CoeffVector {
    type Error = Error;
    fn try_from(r: CoeffVectorRepr) -> Result<Self> {
        CoeffVector::from_values(r.max_index, r.values)
    }
}

impl From<CoeffVector> for CoeffVectorRepr {
    fn from(c: CoeffVector) -> Self {
        CoeffVectorRepr {
            max_index: c.max_index,
            values: c.values,
        }
    }
}

impl CoeffVector {
    pub fn zeros(max_index: usize) -> Self {
        Self {
            max_index,
            values: vec![0.0; 2 * max_index + 1],
        }
    }

    /// Builds from values ordered `j = -J, …, J`.
    pub fn from_values(max_index: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != 2 * max_index + 1 {
            return Err(Error::LengthMismatch {
                expected: 2 * max_index + 1,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self { max_index, values })
    }

    /// Builds from `(j, c_j)` pairs; unspecified indices are zero.
    pub fn from_pairs(max_index: usize, pairs: &[(i64, f64)]) -> Result<Self> {
        let mut c = Self::zeros(max_index);
        for &(j, v) in pairs {
            if j.unsigned_abs() as usize > max_index {
                return Err(Error::IndexOutOfRange {
                    requested: j.unsigned_abs() as usize,
                    available: max_index,
                });
            }
            c.set(j, v);
        }
        Ok(c)
    }

    /// The largest index `J`.
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn offset(&self, j: i64) -> usize {
        (j + self.max_index as i64) as usize
    }

    /// `c_j`, or zero when `|j| > J`.
    pub fn get(&self, j: i64) -> f64 {
        if j.unsigned_abs() as usize > self.max_index {
            0.0
        } else {
            self.values[self.offset(j)]
        }
    }

    /// Panics if `|j| > J`.
    pub fn set(&mut self, j: i64, v: f64) {
        assert!(j.unsigned_abs() as usize <= self.max_index, "index {j} out of range");
        let o = self.offset(j);
        self.values[o] = v;
    }

    /// `(j, c_j)` in order `j = -J, …, J`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let jmax = self.max_index as i64;
        self.values.iter().enumerate().map(move |(o, &v)| (o as i64 - jmax, v))
    }

    /// Restriction to `{-k, …, k}`.
    pub fn truncated(&self, k: usize) -> Result<Self> {
        if k > self.max_index {
            return Err(Error::IndexOutOfRange {
                requested: k,
                available: self.max_index,
            });
        }
        let start = self.max_index - k;
        Ok(Self {
            max_index: k,
            values: self.values[start..start + 2 * k + 1].to_vec(),
        })
    }
}

/// `Σ_{|j|≤J} c_j φ_j(t)`.
pub fn synthesize(coeffs: &CoeffVector, t: f64) -> f64 {
    let mut sum = coeffs.get(0);
    let (s1, c1) = (2.0 * PI * t).sin_cos();
    let (mut s, mut c) = (0.0_f64, 1.0_f64);
    for j in 1..=coeffs.max_index() as i64 {
        // rotate (c, s) by 2πt; re-anchor periodically to bound drift
        if j % 64 == 0 {
            let (sj, cj) = (2.0 * PI * j as f64 * t).sin_cos();
            s = sj;
            c = cj;
        } else {
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
        }
        sum += SQRT_2 * (coeffs.get(j) * c + coeffs.get(-j) * s);
    }
    sum
}

/// `Σ c_j²`.
pub fn l2_norm_sq(coeffs: &CoeffVector) -> f64 {
    coeffs.values().iter().map(|v| v * v).sum()
}

/// Fourier coefficients `β_j = ∫ λ φ_j` for `|j| ≤ J`.
///
/// Families with closed-form coefficients are read out exactly; otherwise λ is
/// tabulated once and integrated by composite Simpson with
/// `max(2¹⁴, 64·J)` panels.
pub fn true_coeffs(model: &IntensityModel, max_index: usize) -> Result<CoeffVector> {
    if model.has_closed_form_coeffs() {
        let mut c = CoeffVector::zeros(max_index);
        for j in -(max_index as i64)..=max_index as i64 {
            c.set(j, model.coefficient(j).expect("closed form"));
        }
        return Ok(c);
    }
    quadrature_coeffs(|t| model.eval(t), max_index)
}

/// Simpson quadrature of `∫ f φ_j` for all `|j| ≤ J` from a single tabulation of `f`.
pub fn quadrature_coeffs<F>(f: F, max_index: usize) -> Result<CoeffVector>
where
    F: Fn(f64) -> f64,
{
    let panels = DEFAULT_PANELS.max(64 * max_index).next_multiple_of(2);
    let h = 1.0 / panels as f64;
    let table: Vec<f64> = (0..=panels)
        .map(|i| {
            let w = if i == 0 || i == panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            w * h / 3.0 * f(i as f64 * h)
        })
        .collect();
    if table.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureNotConverged {
            coarse: f64::NAN,
            fine: f64::NAN,
        });
    }
    let mut c = CoeffVector::zeros(max_index);
    c.set(0, table.iter().sum());
    for j in 1..=max_index as i64 {
        let (mut cs, mut sn) = (0.0, 0.0);
        for (i, w) in table.iter().enumerate() {
            // exact angle reduction keeps the argument in [0, 2π)
            let frac = ((j as u128 * i as u128) % panels as u128) as f64 / panels as f64;
            let (s, co) = (2.0 * PI * frac).sin_cos();
            cs += w * co;
            sn += w * s;
        }
        c.set(j, SQRT_2 * cs);
        c.set(-j, SQRT_2 * sn);
    }
    Ok(c)
}

/// Weight sequence γ with `γ₀ = 1`, symmetric in `j`, nondecreasing in `|j|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GammaSequence {
    /// `γ_j = |j|^p` (Sobolev ellipsoids).
    Polynomial { p: f64 },
    /// `γ_j = exp(ρ|j|)` (analytic functions).
    Analytic { rho: f64 },
    /// `γ_j = exp(2ρ|j|^p)` (generalized analytic functions).
    Generalized { rho: f64, p: f64 },
}

impl GammaSequence {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GammaSequence::Polynomial { p } => p > 0.0 && p.is_finite(),
            GammaSequence::Analytic { rho } => rho > 0.0 && rho.is_finite(),
            GammaSequence::Generalized { rho, p } => {
                rho > 0.0 && p > 0.0 && rho.is_finite() && p.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("gamma parameters must be positive: {self:?}")))
        }
    }
}

/// `γ_j`.
pub fn gamma_value(seq: &GammaSequence, j: i64) -> f64 {
    if j == 0 {
        return 1.0;
    }
    let a = j.unsigned_abs() as f64;
    match *seq {
        GammaSequence::Polynomial { p } => a.powf(p),
        GammaSequence::Analytic { rho } => (rho * a).exp(),
        GammaSequence::Generalized { rho, p } => (2.0 * rho * a.powf(p)).exp(),
    }
}

/// `Σ_{|j|≤J} γ_j² c_j²`.
pub fn gamma_norm_sq(coeffs: &CoeffVector, seq: &GammaSequence) -> f64 {
    coeffs
        .iter()
        .filter(|&(_, c)| c != 0.0)
        .map(|(j, c)| (gamma_value(seq, j) * c).powi(2))
        .sum()
}

/// The ellipsoid `{λ ≥ 0 : Σ γ_j² β_j² ≤ L²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessClass {
    pub gamma: GammaSequence,
    pub radius: f64,
}

impl SmoothnessClass {
    /// Membership of a model, using its coefficients up to `|j| ≤ J`.
    /// Nonnegativity is guaranteed by `IntensityModel` construction.
    pub fn contains(&self, model: &IntensityModel, max_index: usize, rel_tol: f64) -> Result<bool> {
        let c = true_coeffs(model, max_index)?;
        Ok(self.contains_coeffs(&c, rel_tol))
    }

    pub fn contains_coeffs(&self, coeffs: &CoeffVector, rel_tol: f64) -> bool {
        let l2 = self.radius * self.radius;
        gamma_norm_sq(coeffs, &self.gamma) <= l2 * (1.0 + rel_tol)
    }
}
