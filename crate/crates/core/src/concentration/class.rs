//! Finite classes of test functions `[0, 1] → [-1, 1]` with their compensators.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{simpson, DEFAULT_PANELS};
use crate::pointprocess::{IntensityModel, ModelFamily, PointPattern, GRID_KNOTS};

/// One member of a function class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `amplitude · cos(2πjt)` for `j > 0`, `amplitude · sin(2π|j|t)` for `j < 0`.
    ScaledTrig { j: i64, amplitude: f64 },
    Constant { c: f64 },
    /// `levels[i]` on `[b_i, b_{i+1})` with `b_0 = 0` and `b_m = 1`.
    Step { breakpoints: Vec<f64>, levels: Vec<f64> },
}

impl FunctionSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::ScaledTrig { j, amplitude } => {
                let w = 2.0 * PI * j.unsigned_abs() as f64 * t;
                if *j > 0 {
                    amplitude * w.cos()
                } else {
                    amplitude * w.sin()
                }
            }
            FunctionSpec::Constant { c } => *c,
            FunctionSpec::Step { breakpoints, levels } => levels[breakpoints.partition_point(|&b| b <= t)],
        }
    }

    /// The member `-s`.
    pub fn negated(&self) -> Self {
        match self {
            FunctionSpec::ScaledTrig { j, amplitude } => FunctionSpec::ScaledTrig {
                j: *j,
                amplitude: -amplitude,
            },
            FunctionSpec::Constant { c } => FunctionSpec::Constant { c: -c },
            FunctionSpec::Step { breakpoints, levels } => FunctionSpec::Step {
                breakpoints: breakpoints.clone(),
                levels: levels.iter().map(|l| -l).collect(),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            FunctionSpec::ScaledTrig { j, amplitude } => {
                if *j == 0 {
                    return bad("scaled-trig needs j ≠ 0; use a constant member".into());
                }
                if !(amplitude.abs() <= 1.0) {
                    return bad(format!("scaled-trig amplitude {amplitude} exceeds 1"));
                }
            }
            FunctionSpec::Constant { c } => {
                if !(c.abs() <= 1.0) {
                    return bad(format!("constant {c} exceeds 1 in absolute value"));
                }
            }
            FunctionSpec::Step { breakpoints, levels } => {
                if levels.len() != breakpoints.len() + 1 {
                    return Err(Error::LengthMismatch {
                        expected: breakpoints.len() + 1,
                        got: levels.len(),
                    });
                }
                if breakpoints.iter().any(|&b| !(b > 0.0 && b < 1.0))
                    || breakpoints.windows(2).any(|w| w[0] >= w[1])
                {
                    return bad("step breakpoints must be strictly increasing inside (0, 1)".into());
                }
                if levels.iter().any(|l| !(l.abs() <= 1.0)) {
                    return bad("step levels must lie in [-1, 1]".into());
                }
            }
        }
        Ok(())
    }

    /// `∫₀¹ s λ`.
    pub fn compensator(&self, model: &IntensityModel) -> f64 {
        self.weighted_integral(model, false)
    }

    /// `∫₀¹ s² λ`, the variance of `I(s)`.
    pub fn second_moment(&self, model: &IntensityModel) -> f64 {
        self.weighted_integral(model, true)
    }

    fn weighted_integral(&self, model: &IntensityModel, squared: bool) -> f64 {
        let closed = model.has_closed_form_coeffs();
        match self {
            FunctionSpec::Constant { c } => {
                let w = if squared { c * c } else { *c };
                w * model.total_mass()
            }
            FunctionSpec::ScaledTrig { j, amplitude } if closed => {
                let m = j.unsigned_abs() as i64;
                let coef = |i: i64| model.coefficient(i).expect("closed form");
                if squared {
                    // cos² = (1 + cos 2θ)/2, sin² = (1 − cos 2θ)/2
                    let sign = if *j > 0 { 1.0 } else { -1.0 };
                    amplitude * amplitude * 0.5 * (coef(0) + sign * coef(2 * m) / SQRT_2)
                } else {
                    let i = if *j > 0 { m } else { -m };
                    amplitude * coef(i) / SQRT_2
                }
            }
            FunctionSpec::Step { breakpoints, levels } => {
                let mut edges = Vec::with_capacity(breakpoints.len() + 2);
                edges.push(0.0);
                edges.extend_from_slice(breakpoints);
                edges.push(1.0);
                edges
                    .windows(2)
                    .zip(levels)
                    .map(|(e, &l)| {
                        let w = if squared { l * l } else { l };
                        if w == 0.0 {
                            0.0
                        } else {
                            w * segment_mass(model, e[0], e[1])
                        }
                    })
                    .sum()
            }
            _ => {
                let f = |t: f64| {
                    let s = self.eval(t);
                    let s = if squared { s * s } else { s };
                    s * model.eval(t)
                };
                simpson(f, 0.0, 1.0, DEFAULT_PANELS)
            }
        }
    }
}

fn segment_mass(model: &IntensityModel, a: f64, b: f64) -> f64 {
    if let ModelFamily::Constant(c) = model.family() {
        return c.level * (b - a);
    }
    simpson(|t| model.eval(t), a, b, DEFAULT_PANELS)
}

/// A nonempty finite list of members bounded by 1 in sup norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<FunctionSpec>", into = "Vec<FunctionSpec>")]
pub struct FunctionClass {
    members: Vec<FunctionSpec>,
}

impl TryFrom<Vec<FunctionSpec>> for FunctionClass {
    type Error = Error;
    fn try_from(members: Vec<FunctionSpec>) -> Result<Self> {
        FunctionClass::new(members)
    }
}

impl From<FunctionClass> for Vec<FunctionSpec> {
    fn from(c: FunctionClass) -> Self {
        c.members
    }
}

impl FunctionClass {
    pub fn new(members: Vec<FunctionSpec>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("function class must be nonempty".into()));
        }
        for m in &members {
            m.validate()?;
            let h = 1.0 / (GRID_KNOTS - 1) as f64;
            if (0..GRID_KNOTS).any(|i| m.eval(i as f64 * h).abs() > 1.0 + 1e-12) {
                return Err(Error::InvalidParameter(format!("member {m:?} exceeds sup norm 1")));
            }
        }
        Ok(Self { members })
    }

    /// `{±cos(2πjt), ±sin(2πjt) : 1 ≤ j ≤ freqs}`, plus `±1` if `constants`.
    pub fn symmetric_trig(freqs: usize, constants: bool) -> Self {
        let mut members = Vec::new();
        for j in 1..=freqs as i64 {
            for jj in [j, -j] {
                for a in [1.0, -1.0] {
                    members.push(FunctionSpec::ScaledTrig { j: jj, amplitude: a });
                }
            }
        }
        if constants {
            members.push(FunctionSpec::Constant { c: 1.0 });
            members.push(FunctionSpec::Constant { c: -1.0 });
        }
        Self::new(members).expect("valid by construction")
    }

    pub fn members(&self) -> &[FunctionSpec] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// True if `-s` belongs to the class for every member `s`.
    pub fn is_symmetric(&self) -> bool {
        self.members.iter().all(|m| self.members.contains(&m.negated()))
    }

    pub fn compensators(&self, model: &IntensityModel) -> Vec<f64> {
        self.members.iter().map(|m| m.compensator(model)).collect()
    }

    pub fn second_moments(&self, model: &IntensityModel) -> Vec<f64> {
        self.members.iter().map(|m| m.second_moment(model)).collect()
    }
}

/// `I(s) = Σ_{x∈N} s(x) − ∫ s dΛ`.
pub fn centered_integral(s: &FunctionSpec, pattern: &PointPattern, model: &IntensityModel) -> f64 {
    pattern.points().iter().map(|&x| s.eval(x)).sum::<f64>() - s.compensator(model)
}

/// `V = max_s ∫ s² dΛ`.
pub fn wimpy_variance(class: &FunctionClass, model: &IntensityModel) -> f64 {
    class.second_moments(model).into_iter().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::CoeffVector;
    use crate::numeric::integrate_unit;
    use crate::pointprocess::{AnalyticParams, CustomGridParams};

    fn models() -> Vec<IntensityModel> {
        vec![
            IntensityModel::constant(2.0).unwrap(),
            IntensityModel::finite_fourier(CoeffVector::from_pairs(3, &[(0, 3.0), (2, 0.5), (-1, 0.4), (3, -0.3)]).unwrap())
                .unwrap(),
            IntensityModel::new(
                ModelFamily::AnalyticDecay(AnalyticParams {
                    rho: 0.7,
                    amplitude: 1.0,
                    mass: 3.0,
                }),
                "a",
            )
            .unwrap(),
            IntensityModel::new(
                ModelFamily::CustomGrid(CustomGridParams {
                    values: vec![1.0, 2.0, 0.5],
                }),
                "g",
            )
            .unwrap(),
        ]
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let members = [
            FunctionSpec::ScaledTrig { j: 1, amplitude: 1.0 },
            FunctionSpec::ScaledTrig { j: -1, amplitude: -0.5 },
            FunctionSpec::ScaledTrig { j: 2, amplitude: 0.8 },
            FunctionSpec::ScaledTrig { j: -3, amplitude: 1.0 },
            FunctionSpec::Constant { c: -0.3 },
            FunctionSpec::Step {
                breakpoints: vec![0.25, 0.6],
                levels: vec![1.0, -0.5, 0.2],
            },
        ];
        for m in models() {
            for s in &members {
                let c = integrate_unit(|t| s.eval(t) * m.eval(t));
                let v = integrate_unit(|t| s.eval(t).powi(2) * m.eval(t));
                let tol = if matches!(s, FunctionSpec::Step { .. }) { 1e-4 } else { 1e-9 };
                assert!((s.compensator(&m) - c).abs() < tol, "{s:?} on {}", m.label());
                assert!((s.second_moment(&m) - v).abs() < tol, "{s:?} on {}", m.label());
            }
        }
    }

    #[test]
    fn wimpy_variance_examples() {
        let two = IntensityModel::constant(2.0).unwrap();
        let c = FunctionClass::new(vec![FunctionSpec::ScaledTrig { j: 1, amplitude: 1.0 }]).unwrap();
        assert!((wimpy_variance(&c, &two) - 1.0).abs() < 1e-15);
        let five = IntensityModel::constant(5.0).unwrap();
        let one = FunctionClass::new(vec![FunctionSpec::Constant { c: 1.0 }]).unwrap();
        assert_eq!(wimpy_variance(&one, &five), 5.0);
    }

    #[test]
    fn centered_integral_examples() {
        let five = IntensityModel::constant(5.0).unwrap();
        let one = FunctionSpec::Constant { c: 1.0 };
        let p = PointPattern::from_points(vec![0.1, 0.2, 0.9]).unwrap();
        assert_eq!(centered_integral(&one, &p, &five), -2.0);
        let s = FunctionSpec::Constant { c: 0.5 };
        assert_eq!(centered_integral(&s, &PointPattern::empty(), &five), -2.5);
    }

    #[test]
    fn validation() {
        assert!(FunctionClass::new(vec![]).is_err());
        assert!(FunctionClass::new(vec![FunctionSpec::Constant { c: 1.5 }]).is_err());
        assert!(FunctionClass::new(vec![FunctionSpec::ScaledTrig { j: 2, amplitude: 1.01 }]).is_err());
        assert!(FunctionClass::new(vec![FunctionSpec::Step {
            breakpoints: vec![0.5, 0.4],
            levels: vec![0.0, 0.0, 0.0]
        }])
        .is_err());
        assert!(FunctionClass::new(vec![FunctionSpec::Step {
            breakpoints: vec![0.5],
            levels: vec![0.0]
        }])
        .is_err());
        let c: FunctionClass = serde_json::from_str(r#"[{"kind":"scaled-trig","j":-2,"amplitude":0.5}]"#).unwrap();
        assert_eq!(c.len(), 1);
        assert!(serde_json::from_str::<FunctionClass>("[]").is_err());
    }

    #[test]
    fn symmetric_class_shape() {
        let c = FunctionClass::symmetric_trig(2, true);
        assert_eq!(c.len(), 10);
        assert!(c.is_symmetric());
        let half = FunctionClass::new(vec![FunctionSpec::Constant { c: 1.0 }]).unwrap();
        assert!(!half.is_symmetric());
        let step = FunctionSpec::Step {
            breakpoints: vec![0.5],
            levels: vec![1.0, -1.0],
        };
        assert_eq!(step.eval(0.25), 1.0);
        assert_eq!(step.eval(0.5), -1.0);
        assert_eq!(step.eval(1.0), -1.0);
    }
}
