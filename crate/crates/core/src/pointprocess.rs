//! Simulation of Poisson point processes on [0, 1].
//!
//! A pattern is drawn by sampling a Poisson count with mean `Λ̄ = ∫λ` and then
//! placing that many i.i.d. points with density `λ / Λ̄`. Locations come from
//! inverting the CDF of the piecewise-linear interpolant of λ on a uniform grid;
//! `custom-grid` models, which are piecewise linear by construction on their own
//! knots, use thinning against their maximum instead.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::basis::{self, CoeffVector};
use crate::error::{Error, Result};
use crate::numeric::{cosine_series, hurwitz_zeta, integrate_unit_checked, DEFAULT_PANELS};
use crate::rng::SeedStream;

/// Knot count of the sampling grid and of the nonnegativity check.
pub const GRID_KNOTS: usize = 4097;

/// Values in `[-NEG_TOL, 0)` are clamped to zero; anything lower is rejected.
pub const NEG_TOL: f64 = 1e-9;

/// Number of cosine terms used when evaluating a `sobolev-decay` intensity.
pub const SOBOLEV_EVAL_TERMS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantParams {
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteFourierParams {
    pub coeffs: CoeffVector,
}

/// `β₀ = mass`, `β_j = amplitude · j^{-(p + 1/2 + excess)}` for `j ≥ 1`, sine part zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevParams {
    pub p: f64,
    pub amplitude: f64,
    pub mass: f64,
    #[serde(default = "default_excess")]
    pub excess: f64,
}

fn default_excess() -> f64 {
    0.1
}

impl SobolevParams {
    /// Decay exponent `q = p + 1/2 + excess`.
    pub fn decay(&self) -> f64 {
        self.p + 0.5 + self.excess
    }
}

/// `β₀ = mass`, `β_j = amplitude · e^{-ρj}` for `j ≥ 1`, sine part zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticParams {
    pub rho: f64,
    pub amplitude: f64,
    pub mass: f64,
}

/// Values on `values.len()` equispaced knots over [0, 1], linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomGridParams {
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFamily {
    Constant(ConstantParams),
    FiniteFourier(FiniteFourierParams),
    SobolevDecay(SobolevParams),
    AnalyticDecay(AnalyticParams),
    CustomGrid(CustomGridParams),
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::Constant(_) => "constant",
            ModelFamily::FiniteFourier(_) => "finite-fourier",
            ModelFamily::SobolevDecay(_) => "sobolev-decay",
            ModelFamily::AnalyticDecay(_) => "analytic-decay",
            ModelFamily::CustomGrid(_) => "custom-grid",
        }
    }

    fn params_json(&self) -> serde_json::Value {
        let v = match self {
            ModelFamily::Constant(p) => serde_json::to_value(p),
            ModelFamily::FiniteFourier(p) => serde_json::to_value(p),
            ModelFamily::SobolevDecay(p) => serde_json::to_value(p),
            ModelFamily::AnalyticDecay(p) => serde_json::to_value(p),
            ModelFamily::CustomGrid(p) => serde_json::to_value(p),
        };
        v.expect("params serialize")
    }

    fn from_json(family: &str, params: serde_json::Value) -> Result<Self> {
        Ok(match family {
            "constant" => ModelFamily::Constant(serde_json::from_value(params)?),
            "finite-fourier" => ModelFamily::FiniteFourier(serde_json::from_value(params)?),
            "sobolev-decay" => ModelFamily::SobolevDecay(serde_json::from_value(params)?),
            "analytic-decay" => ModelFamily::AnalyticDecay(serde_json::from_value(params)?),
            "custom-grid" => ModelFamily::CustomGrid(serde_json::from_value(params)?),
            other => return Err(Error::InvalidParameter(format!("unknown model family `{other}`"))),
        })
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    family: String,
    params: serde_json::Value,
    #[serde(default)]
    label: Option<String>,
}

#[derive(Debug)]
enum Sampler {
    Empty,
    InverseCdf { knots: Vec<f64>, cdf: Vec<f64> },
    Thinning { sup: f64 },
}

#[derive(Debug)]
struct ModelInner {
    family: ModelFamily,
    label: String,
    total_mass: f64,
    sobolev_weights: Vec<f64>,
    sampler: Sampler,
}

/// A validated nonnegative intensity on [0, 1]. Cheap to clone.
#[derive(Debug, Clone)]
pub struct IntensityModel {
    inner: Arc<ModelInner>,
}

impl PartialEq for IntensityModel {
    fn eq(&self, other: &Self) -> bool {
        self.inner.family == other.inner.family && self.inner.label == other.inner.label
    }
}

impl Serialize for IntensityModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelRepr {
            family: self.family_name().to_string(),
            params: self.inner.family.params_json(),
            label: Some(self.inner.label.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntensityModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ModelRepr::deserialize(d)?;
        let family = ModelFamily::from_json(&r.family, r.params).map_err(serde::de::Error::custom)?;
        let label = r.label.unwrap_or_else(|| r.family.clone());
        IntensityModel::new(family, label).map_err(serde::de::Error::custom)
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite")))
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")))
    }
}

impl IntensityModel {
    /// Validates parameters, checks nonnegativity on the grid and caches the total mass.
    pub fn new(family: ModelFamily, label: impl Into<String>) -> Result<Self> {
        match &family {
            ModelFamily::Constant(c) => {
                check_finite("level", c.level)?;
                if c.level < 0.0 {
                    return Err(Error::NegativeIntensity { min: c.level, at: 0.0 });
                }
            }
            ModelFamily::FiniteFourier(_) => {}
            ModelFamily::SobolevDecay(s) => {
                check_positive("p", s.p)?;
                check_positive("excess", s.excess)?;
                check_finite("amplitude", s.amplitude)?;
                check_finite("mass", s.mass)?;
            }
            ModelFamily::AnalyticDecay(a) => {
                check_positive("rho", a.rho)?;
                check_finite("amplitude", a.amplitude)?;
                check_finite("mass", a.mass)?;
            }
            ModelFamily::CustomGrid(g) => {
                if g.values.len() < 2 {
                    return Err(Error::InvalidParameter("custom-grid needs at least two knots".into()));
                }
                for &v in &g.values {
                    check_finite("grid value", v)?;
                }
            }
        }
        let sobolev_weights = match &family {
            ModelFamily::SobolevDecay(s) => {
                let q = s.decay();
                (1..=SOBOLEV_EVAL_TERMS).map(|j| SQRT_2 * s.amplitude * (j as f64).powf(-q)).collect()
            }
            _ => Vec::new(),
        };
        let mut inner = ModelInner {
            family,
            label: label.into(),
            total_mass: 0.0,
            sobolev_weights,
            sampler: Sampler::Empty,
        };

        let knots: Vec<f64> = (0..GRID_KNOTS)
            .map(|i| raw_eval(&inner, i as f64 / (GRID_KNOTS - 1) as f64))
            .collect();
        let (at, min) = knots
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
        if min < -NEG_TOL {
            return Err(Error::NegativeIntensity {
                min,
                at: at as f64 / (GRID_KNOTS - 1) as f64,
            });
        }
        if let ModelFamily::CustomGrid(g) = &inner.family {
            if let Some(&v) = g.values.iter().find(|&&v| v < -NEG_TOL) {
                return Err(Error::NegativeIntensity { min: v, at: f64::NAN });
            }
        }

        inner.total_mass = match &inner.family {
            ModelFamily::Constant(c) => c.level,
            ModelFamily::FiniteFourier(f) => f.coeffs.get(0),
            ModelFamily::SobolevDecay(s) => s.mass,
            ModelFamily::AnalyticDecay(a) => a.mass,
            ModelFamily::CustomGrid(g) => {
                // align Simpson nodes with the knots so each linear piece is integrated exactly
                let pieces = g.values.len() - 1;
                let panels = (4 * pieces).max(DEFAULT_PANELS.next_multiple_of(4 * pieces));
                integrate_unit_checked(|t| raw_eval(&inner, t).max(0.0), panels, 1e-10)?
            }
        };
        if !(inner.total_mass >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "total mass must be nonnegative, got {}",
                inner.total_mass
            )));
        }

        inner.sampler = if inner.total_mass == 0.0 {
            Sampler::Empty
        } else if let ModelFamily::CustomGrid(g) = &inner.family {
            Sampler::Thinning {
                sup: g.values.iter().cloned().fold(0.0, f64::max),
            }
        } else {
            let knots: Vec<f64> = knots.into_iter().map(|v| v.max(0.0)).collect();
            let h = 1.0 / (GRID_KNOTS - 1) as f64;
            let mut cdf = Vec::with_capacity(GRID_KNOTS);
            cdf.push(0.0);
            for w in knots.windows(2) {
                let last = *cdf.last().unwrap();
                cdf.push(last + 0.5 * h * (w[0] + w[1]));
            }
            if *cdf.last().unwrap() <= 0.0 {
                return Err(Error::InvalidParameter(
                    "intensity has positive mass but vanishes on the sampling grid".into(),
                ));
            }
            Sampler::InverseCdf { knots, cdf }
        };
        Ok(Self { inner: Arc::new(inner) })
    }

    pub fn constant(level: f64) -> Result<Self> {
        Self::new(ModelFamily::Constant(ConstantParams { level }), format!("constant-{level}"))
    }

    pub fn finite_fourier(coeffs: CoeffVector) -> Result<Self> {
        Self::new(ModelFamily::FiniteFourier(FiniteFourierParams { coeffs }), "finite-fourier")
    }

    pub fn family(&self) -> &ModelFamily {
        &self.inner.family
    }

    pub fn family_name(&self) -> &'static str {
        self.inner.family.name()
    }

    pub fn label(&self) -> &str {
        &self.inner.label
    }

    /// `Λ̄ = ∫₀¹ λ = β₀`.
    pub fn total_mass(&self) -> f64 {
        self.inner.total_mass
    }

    /// `λ(t)`, with tiny negative round-off clamped to zero.
    pub fn eval(&self, t: f64) -> f64 {
        raw_eval(&self.inner, t).max(0.0)
    }

    /// The same intensity scaled by `factor ≥ 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor >= 0.0 && factor.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale factor {factor}")));
        }
        let family = match &self.inner.family {
            ModelFamily::Constant(c) => ModelFamily::Constant(ConstantParams { level: c.level * factor }),
            ModelFamily::FiniteFourier(f) => {
                let vals = f.coeffs.values().iter().map(|v| v * factor).collect();
                ModelFamily::FiniteFourier(FiniteFourierParams {
                    coeffs: CoeffVector::from_values(f.coeffs.max_index(), vals)?,
                })
            }
            ModelFamily::SobolevDecay(s) => ModelFamily::SobolevDecay(SobolevParams {
                amplitude: s.amplitude * factor,
                mass: s.mass * factor,
                ..*s
            }),
            ModelFamily::AnalyticDecay(a) => ModelFamily::AnalyticDecay(AnalyticParams {
                amplitude: a.amplitude * factor,
                mass: a.mass * factor,
                ..*a
            }),
            ModelFamily::CustomGrid(g) => ModelFamily::CustomGrid(CustomGridParams {
                values: g.values.iter().map(|v| v * factor).collect(),
            }),
        };
        Self::new(family, format!("{}*{}", self.inner.label, factor))
    }

    /// Number of cosine terms used by `eval` for `sobolev-decay` models.
    pub fn eval_terms(&self) -> usize {
        SOBOLEV_EVAL_TERMS
    }

    /// True when every `β_j` is known in closed form.
    pub fn has_closed_form_coeffs(&self) -> bool {
        !matches!(self.inner.family, ModelFamily::CustomGrid(_))
    }

    /// Closed-form `β_j`, if available.
    pub fn coefficient(&self, j: i64) -> Option<f64> {
        match &self.inner.family {
            ModelFamily::Constant(c) => Some(if j == 0 { c.level } else { 0.0 }),
            ModelFamily::FiniteFourier(f) => Some(f.coeffs.get(j)),
            ModelFamily::SobolevDecay(s) => Some(match j {
                0 => s.mass,
                j if j > 0 => s.amplitude * (j as f64).powf(-s.decay()),
                _ => 0.0,
            }),
            ModelFamily::AnalyticDecay(a) => Some(match j {
                0 => a.mass,
                j if j > 0 => a.amplitude * (-a.rho * j as f64).exp(),
                _ => 0.0,
            }),
            ModelFamily::CustomGrid(_) => None,
        }
    }

    /// `Σ_{|j|>J} β_j²`, the squared L² distance to the truncation at `J`.
    pub fn tail_sq(&self, max_index: usize) -> Result<f64> {
        let jp = (max_index + 1) as f64;
        Ok(match &self.inner.family {
            ModelFamily::Constant(_) => 0.0,
            ModelFamily::FiniteFourier(f) => f
                .coeffs
                .iter()
                .filter(|&(j, _)| j.unsigned_abs() as usize > max_index)
                .map(|(_, v)| v * v)
                .sum(),
            ModelFamily::SobolevDecay(s) => s.amplitude.powi(2) * hurwitz_zeta(2.0 * s.decay(), jp),
            ModelFamily::AnalyticDecay(a) => {
                let r2 = (-2.0 * a.rho).exp();
                a.amplitude.powi(2) * r2.powf(jp) / (1.0 - r2)
            }
            ModelFamily::CustomGrid(_) => {
                let head = basis::true_coeffs(self, max_index)?;
                (self.l2_norm_sq()? - basis::l2_norm_sq(&head)).max(0.0)
            }
        })
    }

    /// `‖λ‖² = Σ_j β_j²`.
    pub fn l2_norm_sq(&self) -> Result<f64> {
        Ok(match &self.inner.family {
            ModelFamily::CustomGrid(g) => {
                let pieces = g.values.len() - 1;
                let panels = (4 * pieces).max(DEFAULT_PANELS.next_multiple_of(4 * pieces));
                integrate_unit_checked(|t| self.eval(t).powi(2), panels, 1e-10)?
            }
            _ => self.coefficient(0).unwrap().powi(2) + self.tail_sq(0)?,
        })
    }
}

fn raw_eval(inner: &ModelInner, t: f64) -> f64 {
    match &inner.family {
        ModelFamily::Constant(c) => c.level,
        ModelFamily::FiniteFourier(f) => basis::synthesize(&f.coeffs, t),
        ModelFamily::SobolevDecay(s) => s.mass + cosine_series(&inner.sobolev_weights, t),
        ModelFamily::AnalyticDecay(a) => {
            // Σ_{j≥1} r^j cos(jθ) = (r cos θ − r²) / (1 − 2r cos θ + r²)
            let r = (-a.rho).exp();
            let c = (2.0 * std::f64::consts::PI * t).cos();
            a.mass + SQRT_2 * a.amplitude * (r * c - r * r) / (1.0 - 2.0 * r * c + r * r)
        }
        ModelFamily::CustomGrid(g) => {
            let m = g.values.len() - 1;
            let x = t.clamp(0.0, 1.0) * m as f64;
            let i = (x.floor() as usize).min(m - 1);
            let w = x - i as f64;
            g.values[i] * (1.0 - w) + g.values[i + 1] * w
        }
    }
}

/// One realization: sorted points in [0, 1].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointPattern {
    points: Vec<f64>,
}

impl PointPattern {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts and validates `points ⊂ [0, 1]`.
    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if let Some(&p) = points.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Domain(format!("point {p} outside [0, 1]")));
        }
        points.sort_by(f64::total_cmp);
        Ok(Self { points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// `n` i.i.d. patterns with the seed and model they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub patterns: Vec<PointPattern>,
    pub seed: u64,
    pub model_id: String,
}

impl SampleSet {
    pub fn n(&self) -> usize {
        self.patterns.len()
    }

    pub fn total_count(&self) -> usize {
        self.patterns.iter().map(PointPattern::count).sum()
    }
}

fn draw_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("positive finite mean");
    d.sample(rng) as usize
}

/// Draws one pattern from `model` using `rng`.
pub fn sample_pattern(model: &IntensityModel, rng: &mut ChaCha8Rng) -> PointPattern {
    let inner = &model.inner;
    let mut points = match &inner.sampler {
        Sampler::Empty => Vec::new(),
        Sampler::InverseCdf { knots, cdf } => {
            let n = draw_count(inner.total_mass, rng);
            let total = *cdf.last().unwrap();
            let h = 1.0 / (GRID_KNOTS - 1) as f64;
            (0..n)
                .map(|_| {
                    let u = rng.random::<f64>() * total;
                    let k = (cdf.partition_point(|&c| c <= u).max(1) - 1).min(GRID_KNOTS - 2);
                    let m = (u - cdf[k]).max(0.0);
                    // density on the cell is f_a + s·x; solve f_a x + s x²/2 = m
                    let fa = knots[k];
                    let s = (knots[k + 1] - fa) / h;
                    let disc = (fa * fa + 2.0 * s * m).max(0.0);
                    let denom = fa + disc.sqrt();
                    let x = if denom > 0.0 { 2.0 * m / denom } else { 0.0 };
                    (k as f64 * h + x.clamp(0.0, h)).min(1.0)
                })
                .collect()
        }
        Sampler::Thinning { sup } => {
            let n = draw_count(*sup, rng);
            (0..n)
                .filter_map(|_| {
                    let x: f64 = rng.random();
                    let u: f64 = rng.random::<f64>() * sup;
                    (u < raw_eval(inner, x)).then_some(x)
                })
                .collect()
        }
    };
    points.sort_by(f64::total_cmp);
    PointPattern { points }
}

/// `n` patterns; pattern `i` uses child stream `i` of `stream`.
pub fn sample_many_from(model: &IntensityModel, n: usize, stream: SeedStream) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let patterns = (0..n)
        .map(|i| sample_pattern(model, &mut stream.child(i as u64).rng()))
        .collect();
    Ok(SampleSet {
        patterns,
        seed: stream.key(),
        model_id: model.label().to_string(),
    })
}

/// `n` patterns from the root stream of `seed`.
pub fn sample_many(model: &IntensityModel, n: usize, seed: u64) -> Result<SampleSet> {
    let mut set = sample_many_from(model, n, SeedStream::new(seed))?;
    set.seed = seed;
    Ok(set)
}

/// Multiset union of patterns.
pub fn superpose(patterns: &[PointPattern]) -> PointPattern {
    let mut points: Vec<f64> = patterns.iter().flat_map(|p| p.points.iter().copied()).collect();
    points.sort_by(f64::total_cmp);
    PointPattern { points }
}

/// `e^{-mean} mean^k / k!`, evaluated in log space.
pub fn poisson_pmf(k: u64, mean: f64) -> Result<f64> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::Domain(format!("Poisson mean must be positive, got {mean}")));
    }
    let ln = k as f64 * mean.ln() - mean - statrs::function::factorial::ln_factorial(k);
    Ok(ln.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::integrate_unit;
    use crate::stats;
    use proptest::prelude::*;

    fn cos_model() -> IntensityModel {
        // 2 + cos(2πt) = 2φ₀ + φ₁/√2
        let c = CoeffVector::from_pairs(1, &[(0, 2.0), (1, 1.0 / SQRT_2)]).unwrap();
        IntensityModel::finite_fourier(c).unwrap()
    }

    #[test]
    fn total_mass_examples() {
        assert_eq!(IntensityModel::constant(2.0).unwrap().total_mass(), 2.0);
        let c = CoeffVector::from_pairs(1, &[(0, 3.0), (1, 0.5)]).unwrap();
        assert_eq!(IntensityModel::finite_fourier(c).unwrap().total_mass(), 3.0);
        let m = cos_model();
        let q = integrate_unit(|t| m.eval(t));
        assert!((q - 2.0).abs() < 1e-10);
        assert!((m.total_mass() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn total_mass_matches_quadrature_for_every_family() {
        let models = [
            IntensityModel::new(
                ModelFamily::SobolevDecay(SobolevParams {
                    p: 2.0,
                    amplitude: 3.0,
                    mass: 5.0,
                    excess: 0.1,
                }),
                "s",
            )
            .unwrap(),
            IntensityModel::new(
                ModelFamily::AnalyticDecay(AnalyticParams {
                    rho: 1.0,
                    amplitude: 2.0,
                    mass: 4.0,
                }),
                "a",
            )
            .unwrap(),
            IntensityModel::new(
                ModelFamily::CustomGrid(CustomGridParams {
                    values: vec![1.0, 3.0, 0.5, 2.0],
                }),
                "g",
            )
            .unwrap(),
        ];
        for m in &models {
            let q = integrate_unit(|t| m.eval(t));
            assert!((q - m.total_mass()).abs() <= 1e-8 * m.total_mass(), "{}: {q}", m.label());
        }
        let g = &models[2];
        assert!((g.total_mass() - (2.0 + 1.75 + 1.25) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn negative_models_are_rejected_and_noise_clamped() {
        let c = CoeffVector::from_pairs(1, &[(0, 0.5), (1, 1.0)]).unwrap();
        assert!(matches!(
            IntensityModel::finite_fourier(c),
            Err(Error::NegativeIntensity { .. })
        ));
        // min is exactly zero up to round-off
        let c = CoeffVector::from_pairs(1, &[(0, SQRT_2), (1, 1.0)]).unwrap();
        let m = IntensityModel::finite_fourier(c).unwrap();
        assert!(m.eval(0.5) >= 0.0);
        assert!(IntensityModel::constant(-1.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let m = cos_model();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains(r#""family":"finite-fourier""#));
        let back: IntensityModel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let c: IntensityModel =
            serde_json::from_str(r#"{"family":"constant","params":{"level":3.5},"label":"c"}"#).unwrap();
        assert_eq!(c.total_mass(), 3.5);
        assert!(serde_json::from_str::<IntensityModel>(
            r#"{"family":"constant","params":{"level":3.5,"bogus":1}}"#
        )
        .is_err());
        assert!(serde_json::from_str::<IntensityModel>(r#"{"family":"weird","params":{}}"#).is_err());
    }

    #[test]
    fn zero_intensity_gives_empty_patterns() {
        let z = IntensityModel::constant(0.0).unwrap();
        let set = sample_many(&z, 3, 1).unwrap();
        assert_eq!(set.n(), 3);
        assert!(set.patterns.iter().all(|p| p.count() == 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let m = IntensityModel::constant(5.0).unwrap();
        let s = SeedStream::new(9);
        assert_eq!(sample_pattern(&m, &mut s.rng()), sample_pattern(&m, &mut s.rng()));
        let m = cos_model();
        assert_eq!(sample_many(&m, 20, 4).unwrap(), sample_many(&m, 20, 4).unwrap());
        assert_ne!(sample_many(&m, 20, 4).unwrap(), sample_many(&m, 20, 5).unwrap());
        assert!(sample_many(&m, 0, 4).is_err());
    }

    #[test]
    fn sample_many_count_mean() {
        let m = IntensityModel::constant(2.0).unwrap();
        let set = sample_many(&m, 10_000, 17).unwrap();
        let mean = set.total_count() as f64 / 1e4;
        assert!((mean - 2.0).abs() <= 3.0 * (2.0f64 / 1e4).sqrt(), "{mean}");
    }

    #[test]
    fn inverse_cdf_locations_follow_density() {
        // CDF of 2 + cos(2πt) normalized: F(t) = t + sin(2πt)/(4π)
        let m = cos_model();
        let set = sample_many(&m, 20_000, 3).unwrap();
        let u: Vec<f64> = set
            .patterns
            .iter()
            .flat_map(|p| p.points().iter().map(|&t| t + (2.0 * std::f64::consts::PI * t).sin() / (4.0 * std::f64::consts::PI)))
            .collect();
        let (_, p) = stats::ks_uniform(&u);
        assert!(p > 1e-3, "KS p = {p}");
    }

    #[test]
    fn thinning_path_follows_density() {
        // density ∝ t on [0,1]: F(t) = t²
        let m = IntensityModel::new(
            ModelFamily::CustomGrid(CustomGridParams { values: vec![0.0, 6.0] }),
            "ramp",
        )
        .unwrap();
        assert!((m.total_mass() - 3.0).abs() < 1e-12);
        let set = sample_many(&m, 20_000, 8).unwrap();
        let u: Vec<f64> = set.patterns.iter().flat_map(|p| p.points().iter().map(|t| t * t)).collect();
        let (_, p) = stats::ks_uniform(&u);
        assert!(p > 1e-3, "KS p = {p}");
        let mean = set.total_count() as f64 / 2e4;
        assert!((mean - 3.0).abs() < 4.0 * (3.0f64 / 2e4).sqrt());
    }

    #[test]
    fn superpose_basics() {
        let p = PointPattern::from_points(vec![0.5, 0.1]).unwrap();
        let q = PointPattern::from_points(vec![0.3]).unwrap();
        assert_eq!(superpose(&[p.clone(), PointPattern::empty()]), p);
        let r = superpose(&[p.clone(), q.clone()]);
        assert_eq!(r.count(), 3);
        assert_eq!(r.points(), &[0.1, 0.3, 0.5]);
        assert!(PointPattern::from_points(vec![1.5]).is_err());
    }

    #[test]
    fn poisson_pmf_examples() {
        assert!((poisson_pmf(0, 1.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let s: f64 = (0..=200).map(|k| poisson_pmf(k, 5.0).unwrap()).sum();
        assert!((s - 1.0).abs() < 1e-12);
        // 5⁵ e⁻⁵ / 120
        let direct = 3125.0 * (-5f64).exp() / 120.0;
        assert!((poisson_pmf(5, 5.0).unwrap() - direct).abs() < 1e-14);
        assert!((poisson_pmf(5, 5.0).unwrap() - 0.175467).abs() < 1e-6);
        assert!(poisson_pmf(3, 0.0).is_err());
        assert!(poisson_pmf(10_000, 10_000.0).unwrap().is_finite());
    }

    #[test]
    fn closed_form_tails() {
        let s = IntensityModel::new(
            ModelFamily::SobolevDecay(SobolevParams {
                p: 1.0,
                amplitude: 2.0,
                mass: 5.0,
                excess: 0.25,
            }),
            "s",
        )
        .unwrap();
        let direct: f64 = (11..200_000).map(|j| s.coefficient(j).unwrap().powi(2)).sum();
        let tail = s.tail_sq(10).unwrap();
        assert!((tail - direct).abs() < 1e-6 * tail);
        let a = IntensityModel::new(
            ModelFamily::AnalyticDecay(AnalyticParams {
                rho: 0.5,
                amplitude: 1.0,
                mass: 3.0,
            }),
            "a",
        )
        .unwrap();
        let direct: f64 = (4..400).map(|j| a.coefficient(j).unwrap().powi(2)).sum();
        assert!((a.tail_sq(3).unwrap() - direct).abs() < 1e-14);
        let q = integrate_unit(|t| a.eval(t).powi(2));
        assert!((a.l2_norm_sq().unwrap() - q).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn patterns_are_sorted_and_in_range(seed in any::<u64>(), level in 0.0f64..30.0) {
            let m = IntensityModel::constant(level).unwrap();
            let p = sample_pattern(&m, &mut SeedStream::new(seed).rng());
            prop_assert!(p.points().windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(p.points().iter().all(|t| (0.0..=1.0).contains(t)));
        }

        #[test]
        fn superpose_adds_counts(a in proptest::collection::vec(0.0f64..=1.0, 0..20),
                                 b in proptest::collection::vec(0.0f64..=1.0, 0..20)) {
            let p = PointPattern::from_points(a).unwrap();
            let q = PointPattern::from_points(b).unwrap();
            let r = superpose(&[p.clone(), q.clone()]);
            prop_assert_eq!(r.count(), p.count() + q.count());
            prop_assert!(r.points().windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
