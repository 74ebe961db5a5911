//! Experiment drivers. Each returns in-memory results; `run` persists them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{true_coeffs, GammaSequence};
use crate::concentration::bounds::{
    ball_constants, bound_integrated, c_small, log_bound_left_tail, log_bound_reynaud, log_bound_right_log,
    log_bound_right_tail, IntegratedInputs,
};
use crate::concentration::verify::{variance_check, verify_tails, ConcParams, TailReport};
use crate::concentration::{mc_sup_samples, wimpy_variance, FunctionClass, FunctionSpec, ZSamples};
use crate::error::{Error, Result};
use crate::estimator::{
    default_k_cap, empirical_coeffs, mise_exact, oracle_dimension, project, rate_exponent, rate_target,
    OracleResult,
};
use crate::harness::config::KMaxPolicy;
use crate::modelselect::{penalty_scale, select_dimension_with, PenaltyScale};
use crate::pointprocess::{poisson_pmf, sample_many_from, IntensityModel, ModelFamily};
use crate::rng::SeedStream;
use crate::stats;

/// One estimator on one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub n: usize,
    pub rep: usize,
    pub estimator: String,
    pub k: usize,
    pub mise: f64,
    pub k_star: usize,
    pub psi_n: f64,
}

/// Log-log least-squares fit of median MISE against n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub n_grid: Vec<usize>,
    pub median_mise: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Residual sum of squares of the retained points.
    pub rss: f64,
    pub theoretical_exponent: f64,
    /// Grid values excluded from the fit.
    pub dropped: Vec<usize>,
    /// Median MISE divided by the rate shape of the weight family.
    pub normalized: Vec<f64>,
}

/// OLS of `ln median` on `ln n`. The smallest n is dropped when its residual
/// against the fit of the remaining points exceeds twice their largest residual.
pub fn fit_rate(n_grid: &[usize], median_mise: &[f64], gamma: &GammaSequence) -> Result<RateFit> {
    if n_grid.len() != median_mise.len() {
        return Err(Error::LengthMismatch {
            expected: n_grid.len(),
            got: median_mise.len(),
        });
    }
    if n_grid.len() < 2 {
        return Err(Error::InvalidParameter("a rate fit needs at least two grid points".into()));
    }
    let lx: Vec<f64> = n_grid.iter().map(|&n| (n as f64).ln()).collect();
    let ly: Vec<f64> = median_mise.iter().map(|m| m.ln()).collect();
    let mut fit = stats::ols(&lx, &ly);
    let mut dropped = Vec::new();
    if n_grid.len() >= 4 {
        let i0 = (0..n_grid.len()).min_by_key(|&i| n_grid[i]).unwrap();
        let keep: Vec<usize> = (0..n_grid.len()).filter(|&i| i != i0).collect();
        let kx: Vec<f64> = keep.iter().map(|&i| lx[i]).collect();
        let ky: Vec<f64> = keep.iter().map(|&i| ly[i]).collect();
        let rest = stats::ols(&kx, &ky);
        let others = rest.residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
        let r0 = ly[i0] - (rest.intercept + rest.slope * lx[i0]);
        if r0.abs() > 2.0 * others.max(1e-12) {
            dropped.push(n_grid[i0]);
            fit = rest;
        }
    }
    Ok(RateFit {
        n_grid: n_grid.to_vec(),
        median_mise: median_mise.to_vec(),
        slope: fit.slope,
        intercept: fit.intercept,
        rss: fit.rss(),
        theoretical_exponent: rate_exponent(gamma),
        dropped,
        normalized: n_grid
            .iter()
            .zip(median_mise)
            .map(|(&n, m)| m / rate_target(gamma, n))
            .collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskResult {
    pub rows: Vec<RiskRow>,
    pub oracle: RateFit,
    pub adaptive: RateFit,
    pub oracle_by_n: Vec<OracleResult>,
    pub k_max_by_n: Vec<usize>,
    /// Replications whose selected `k̂` hit the search limit below `n`.
    pub boundary_hits: usize,
}

impl RiskResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,rep,estimator,k,mise,k_star,psi_n\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{:e},{},{:e}\n",
                r.n, r.rep, r.estimator, r.k, r.mise, r.k_star, r.psi_n
            ));
        }
        s
    }

    /// Median MISE of `estimator` at each grid value.
    pub fn medians(&self, estimator: &str) -> Vec<f64> {
        medians_of(&self.rows, &self.oracle.n_grid, estimator)
    }
}

fn medians_of(rows: &[RiskRow], n_grid: &[usize], estimator: &str) -> Vec<f64> {
    n_grid
        .iter()
        .map(|&n| {
            let v: Vec<f64> = rows
                .iter()
                .filter(|r| r.n == n && r.estimator == estimator)
                .map(|r| r.mise)
                .collect();
            stats::median(&v)
        })
        .collect()
}

/// Oracle-`k*` and adaptive estimators over `n_grid × reps` replications.
///
/// Replication `r` at sample size `n` draws from stream `(seed, n, r)`, so the
/// result is independent of the rayon pool size.
pub fn risk_sweep(
    model: &IntensityModel,
    gamma: &GammaSequence,
    n_grid: &[usize],
    reps: usize,
    seed: u64,
    k_max: KMaxPolicy,
    scale: PenaltyScale,
) -> Result<RiskResult> {
    if n_grid.is_empty() || reps == 0 {
        return Err(Error::InvalidParameter("risk sweep needs a grid and R ≥ 1".into()));
    }
    let oracle_by_n: Vec<OracleResult> = n_grid
        .iter()
        .map(|&n| oracle_dimension(gamma, n, default_k_cap(n)))
        .collect::<Result<_>>()?;
    let k_max_by_n: Vec<usize> = n_grid.iter().map(|&n| k_max.resolve(n)).collect();
    let truth_j = oracle_by_n
        .iter()
        .zip(&k_max_by_n)
        .map(|(o, &k)| o.k_star.max(k))
        .max()
        .unwrap();
    let truth = true_coeffs(model, truth_j)?;
    let tail = model.tail_sq(truth_j)?;
    let beta0 = model.total_mass();
    let root = SeedStream::new(seed);

    let jobs: Vec<(usize, usize)> = (0..n_grid.len()).flat_map(|i| (0..reps).map(move |r| (i, r))).collect();
    let per_job: Vec<(RiskRow, RiskRow, bool)> = jobs
        .par_iter()
        .map(|&(i, r)| -> Result<_> {
            let n = n_grid[i];
            let orc = oracle_by_n[i];
            let km = k_max_by_n[i];
            let samples = sample_many_from(model, n, root.child(n as u64).child(r as u64))?;
            let emp = empirical_coeffs(&samples, orc.k_star.max(km));
            let oracle_est = project(&emp, orc.k_star)?;
            let trace = select_dimension_with(&emp, km, penalty_scale(&emp, scale, Some(beta0))?)?;
            trace.verify_argmin()?;
            let adaptive_est = project(&emp, trace.k_hat)?;
            let row = |estimator: &str, k, mise| RiskRow {
                n,
                rep: r,
                estimator: estimator.to_string(),
                k,
                mise,
                k_star: orc.k_star,
                psi_n: orc.psi_n,
            };
            Ok((
                row("oracle", orc.k_star, mise_exact(&oracle_est, &truth, tail)?),
                row("adaptive", trace.k_hat, mise_exact(&adaptive_est, &truth, tail)?),
                trace.k_hat == km && km < n,
            ))
        })
        .collect::<Result<_>>()?;

    let boundary_hits = per_job.iter().filter(|j| j.2).count();
    let rows: Vec<RiskRow> = per_job.into_iter().flat_map(|(a, b, _)| [a, b]).collect();
    let (mo, ma) = (medians_of(&rows, n_grid, "oracle"), medians_of(&rows, n_grid, "adaptive"));
    let (oracle, adaptive) = if n_grid.len() >= 2 {
        (fit_rate(n_grid, &mo, gamma)?, fit_rate(n_grid, &ma, gamma)?)
    } else {
        let single = |m: Vec<f64>| RateFit {
            n_grid: n_grid.to_vec(),
            normalized: vec![m[0] / rate_target(gamma, n_grid[0])],
            median_mise: m,
            slope: f64::NAN,
            intercept: f64::NAN,
            rss: 0.0,
            theoretical_exponent: rate_exponent(gamma),
            dropped: vec![],
        };
        (single(mo), single(ma))
    };
    Ok(RiskResult {
        rows,
        oracle,
        adaptive,
        oracle_by_n,
        k_max_by_n,
        boundary_hits,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcResult {
    pub report: TailReport,
    /// `(sample var Z, its SE, V + 2ÊZ)`.
    pub variance: (f64, f64, f64),
    /// Exact `P(Z ≥ ÊZ + x)` when `Z` is a centered Poisson count.
    pub exact_right: Option<Vec<f64>>,
    #[serde(skip)]
    pub samples: Option<ZSamples>,
}

impl ConcResult {
    pub fn flag_count(&self) -> usize {
        self.report.flags.len()
    }

    pub fn to_csv(&self) -> String {
        let base = self.report.to_csv();
        match &self.exact_right {
            None => base,
            Some(ex) => base
                .lines()
                .enumerate()
                .map(|(i, l)| {
                    if i == 0 {
                        format!("{l},exact_right\n")
                    } else {
                        format!("{l},{:e}\n", ex[i - 1])
                    }
                })
                .collect(),
        }
    }
}

/// `P(N ≥ k)` for `N ~ Poisson(mean)`.
pub fn poisson_survival(k: u64, mean: f64) -> Result<f64> {
    if k == 0 {
        return Ok(1.0);
    }
    let below: f64 = (0..k).map(|i| poisson_pmf(i, mean)).sum::<Result<f64>>()?;
    if below < 0.5 {
        return Ok(1.0 - below);
    }
    // sum the upper tail directly to avoid cancellation
    let mut s = 0.0;
    let mut i = k;
    loop {
        let p = poisson_pmf(i, mean)?;
        s += p;
        if (i as f64) > mean && p < 1e-18 * s.max(1e-300) {
            break;
        }
        i += 1;
    }
    Ok(s)
}

/// Draws `Z`, estimates its constants and checks every tail bound on `x_grid`.
///
/// For the class `{s ≡ 1}` on a constant intensity `Z = N − nΛ̄` with `E Z = 0`,
/// so the exact constants are used and an exact Poisson column is attached.
pub fn conc_sweep(
    class: &FunctionClass,
    model: &IntensityModel,
    n: usize,
    reps: usize,
    x_grid: &[f64],
    seed: u64,
    eps: f64,
) -> Result<ConcResult> {
    let zs = mc_sup_samples(class, model, n, reps, seed)?;
    let v = n as f64 * wimpy_variance(class, model);
    let count_case =
        class.members() == [FunctionSpec::Constant { c: 1.0 }] && matches!(model.family(), ModelFamily::Constant(_));
    let params = if count_case {
        ConcParams {
            ez_abs_hat: stats::mean(&zs.z_sup_abs),
            ..ConcParams::exact(0.0, v)
        }
    } else {
        ConcParams::from_samples(&zs, v)
    };
    let report = verify_tails(&zs, &params, x_grid, eps)?;
    let exact_right = if count_case && v > 0.0 {
        let mean = v;
        Some(
            x_grid
                .iter()
                .map(|&x| poisson_survival((mean + params.ez_hat + x - 1e-9).ceil().max(0.0) as u64, mean))
                .collect::<Result<_>>()?,
        )
    } else {
        None
    };
    Ok(ConcResult {
        variance: variance_check(&zs, &params),
        report,
        exact_right,
        samples: Some(zs),
    })
}

/// Pure bound values on `x_grid × upsilon`, no random numbers involved.
pub fn bounds_table(upsilon: &[f64], x_grid: &[f64], eps: f64) -> Result<String> {
    let mut s = String::from(
        "upsilon,x,right_log,right_sharp,right_loose,left_poisson,left_sharp,left_loose,reynaud\n",
    );
    for &u in upsilon {
        for &x in x_grid {
            let r = log_bound_right_tail(x, u)?;
            let l = log_bound_left_tail(x, u)?;
            let vals = [
                log_bound_right_log(x, u)?,
                r.sharp,
                r.loose,
                l.poisson_form,
                l.sharp,
                l.loose,
                log_bound_reynaud(x, eps, u)?,
            ];
            s.push_str(&format!("{u},{x}"));
            for v in vals {
                s.push_str(&format!(",{:e}", v.exp()));
            }
            s.push('\n');
        }
    }
    Ok(s)
}

/// Integrated bound for the ball `B_k` along `n_grid`; `k` is fixed or the oracle `k*`.
pub fn integrated_table(
    model: &IntensityModel,
    k: Option<usize>,
    gamma: Option<&GammaSequence>,
    n_grid: &[usize],
    eps: f64,
    c1: f64,
    c3: f64,
) -> Result<String> {
    let norm = model.l2_norm_sq()?.sqrt();
    let mut s = String::from("n,k,M1,H,upsilon,c_eps_H2,bound\n");
    for &n in n_grid {
        let k = match (k, gamma) {
            (Some(k), _) => k,
            (None, Some(g)) => oracle_dimension(g, n, default_k_cap(n))?.k_star,
            (None, None) => return Err(Error::Config("integrated table needs `k` or `gamma`".into())),
        };
        let bc = ball_constants(k, model.total_mass(), norm, n)?;
        let b = bound_integrated(&IntegratedInputs {
            eps,
            h: bc.h,
            upsilon: bc.upsilon,
            m1: bc.m1,
            n,
            c1,
            c3,
        })?;
        s.push_str(&format!(
            "{n},{k},{:e},{:e},{:e},{:e},{:e}\n",
            bc.m1,
            bc.h,
            bc.upsilon,
            c_small(eps) * bc.h * bc.h,
            b
        ));
    }
    Ok(s)
}
