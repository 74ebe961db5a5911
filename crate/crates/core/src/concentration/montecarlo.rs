//! Monte-Carlo draws of `S_n(s)` over a function class and of its suprema.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::class::{FunctionClass, FunctionSpec};
use crate::error::{Error, Result};
use crate::pointprocess::{sample_pattern, IntensityModel, SampleSet};
use crate::rng::SeedStream;

/// `S_n(s) = Σ_i I^i(s_i)` with per-sample functions and intensities.
pub fn sn_statistic(s_tuple: &[FunctionSpec], samples: &SampleSet, models: &[IntensityModel]) -> Result<f64> {
    let n = samples.n();
    for len in [s_tuple.len(), models.len()] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, got: len });
        }
    }
    Ok(s_tuple
        .iter()
        .zip(&samples.patterns)
        .zip(models)
        .map(|((s, p), m)| super::class::centered_integral(s, p, m))
        .sum())
}

/// `R` replications of `Z = sup_s S_n(s)` and `sup_s |S_n(s)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZSamples {
    pub z_sup: Vec<f64>,
    pub z_sup_abs: Vec<f64>,
    pub n: usize,
    pub seed: u64,
}

impl ZSamples {
    pub fn reps(&self) -> usize {
        self.z_sup.len()
    }
}

/// `S_n(s)` for every member, in each of `reps` replications.
///
/// Replication `r` draws its `n` patterns from child streams `(r, i)` of
/// `seed`; runs on the current rayon pool and collects by index.
pub fn mc_member_values(
    class: &FunctionClass,
    model: &IntensityModel,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if n == 0 || reps == 0 {
        return Err(Error::InvalidParameter("n and R must be at least 1".into()));
    }
    let comp: Vec<f64> = class.compensators(model).iter().map(|c| c * n as f64).collect();
    let root = SeedStream::new(seed);
    Ok((0..reps)
        .into_par_iter()
        .map(|r| {
            let rs = root.child(r as u64);
            let mut sums = vec![0.0; class.len()];
            for i in 0..n {
                let p = sample_pattern(model, &mut rs.child(i as u64).rng());
                for &x in p.points() {
                    for (acc, s) in sums.iter_mut().zip(class.members()) {
                        *acc += s.eval(x);
                    }
                }
            }
            sums.iter().zip(&comp).map(|(s, c)| s - c).collect()
        })
        .collect())
}

/// Suprema of `S_n` over `class` in `reps` replications.
pub fn mc_sup_samples(
    class: &FunctionClass,
    model: &IntensityModel,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<ZSamples> {
    let vals = mc_member_values(class, model, n, reps, seed)?;
    let z_sup = vals.iter().map(|v| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)).collect();
    let z_sup_abs = vals.iter().map(|v| v.iter().map(|x| x.abs()).fold(0.0, f64::max)).collect();
    Ok(ZSamples {
        z_sup,
        z_sup_abs,
        n,
        seed,
    })
}
