//! Comparison of Monte-Carlo tails of `Z` against the closed-form bounds.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::concentration::bounds::{
    bound_left_lmgf, bound_right_lmgf, log_bound_left_tail, log_bound_reynaud, log_bound_right_log,
    log_bound_right_tail,
};
use crate::concentration::montecarlo::ZSamples;
use crate::error::{Error, Result};
use crate::rng::SeedStream;
use crate::stats;

/// Minimum replication count accepted by [`verify_tails`].
pub const MIN_REPS: usize = 1000;

/// Plug-in constants for bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcParams {
    /// Estimate of `E Z`.
    pub ez_hat: f64,
    /// Monte-Carlo standard error of `ez_hat` (zero when `E Z` is known).
    pub ez_se: f64,
    /// Wimpy variance `V`.
    pub v: f64,
    /// `2·ÊZ + V`.
    pub upsilon: f64,
    /// `2·(ÊZ + 3·SE) + V`, used when evaluating bounds.
    pub upsilon_plus: f64,
    /// `sup_s ∫ s² dΛ` summed over the `n` samples.
    pub upsilon0: f64,
    /// Estimate of `E sup|S_n|`, the centering of the sup-abs bound.
    pub ez_abs_hat: f64,
}

impl ConcParams {
    /// Known `E Z` (no plug-in noise).
    pub fn exact(ez: f64, v: f64) -> Self {
        Self {
            ez_hat: ez,
            ez_se: 0.0,
            v,
            upsilon: 2.0 * ez + v,
            upsilon_plus: 2.0 * ez + v,
            upsilon0: v,
            ez_abs_hat: ez,
        }
    }

    /// Plug-in from samples; `v` is the wimpy variance of `S_n`.
    pub fn from_samples(zs: &ZSamples, v: f64) -> Self {
        let ez = stats::mean(&zs.z_sup);
        let se = stats::se_mean(&zs.z_sup);
        Self {
            ez_hat: ez,
            ez_se: se,
            v,
            upsilon: 2.0 * ez + v,
            upsilon_plus: 2.0 * (ez + 3.0 * se) + v,
            upsilon0: v,
            ez_abs_hat: stats::mean(&zs.z_sup_abs),
        }
    }
}

/// A point where an empirical tail exceeds a bound by more than 3 SE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flag {
    pub x: f64,
    pub bound: String,
    pub empirical: f64,
    pub se: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub x_grid: Vec<f64>,
    pub reps: usize,
    pub params: ConcParams,
    /// `P̂(Z ≥ ÊZ + x)`
    pub emp_right: Vec<f64>,
    pub se_right: Vec<f64>,
    /// `P̂(Z ≤ ÊZ − x)`
    pub emp_left: Vec<f64>,
    pub se_left: Vec<f64>,
    /// `P̂(sup|S_n| ≥ (1+ε)Ê sup|S_n| + x)`
    pub emp_abs: Vec<f64>,
    pub se_abs: Vec<f64>,
    pub reynaud_eps: f64,
    /// Bound values per x, keyed by bound name.
    pub bounds: BTreeMap<String, Vec<f64>>,
    pub flags: Vec<Flag>,
    pub notes: Vec<String>,
}

/// Names of right-tail bounds (compared with `emp_right`).
pub const RIGHT_BOUNDS: [&str; 3] = ["right_log", "right_sharp", "right_loose"];
/// Names of left-tail bounds (compared with `emp_left`).
pub const LEFT_BOUNDS: [&str; 3] = ["left_poisson", "left_sharp", "left_loose"];
/// Sup-abs bound (compared with `emp_abs`).
pub const ABS_BOUND: &str = "reynaud";

impl TailReport {
    /// CSV body: x, empirical tails with SEs, then one column per bound.
    pub fn to_csv(&self) -> String {
        let names: Vec<&String> = self.bounds.keys().collect();
        let mut s = String::from("x,emp_right,se_right,emp_left,se_left,emp_abs,se_abs");
        for n in &names {
            s.push(',');
            s.push_str(n);
        }
        s.push('\n');
        for (i, x) in self.x_grid.iter().enumerate() {
            s.push_str(&format!(
                "{x},{:e},{:e},{:e},{:e},{:e},{:e}",
                self.emp_right[i], self.se_right[i], self.emp_left[i], self.se_left[i], self.emp_abs[i], self.se_abs[i]
            ));
            for n in &names {
                s.push_str(&format!(",{:e}", self.bounds[*n][i]));
            }
            s.push('\n');
        }
        s
    }
}

fn tail_fraction(z: &[f64], pred: impl Fn(f64) -> bool) -> (f64, f64) {
    let p = z.iter().filter(|&&v| pred(v)).count() as f64 / z.len() as f64;
    (p, stats::binomial_se(p, z.len()))
}

/// Empirical tails on `x_grid` against every bound, evaluated at `υ̂₊`.
pub fn verify_tails(zs: &ZSamples, params: &ConcParams, x_grid: &[f64], reynaud_eps: f64) -> Result<TailReport> {
    let reps = zs.reps();
    if reps < MIN_REPS {
        return Err(Error::InvalidParameter(format!(
            "R = {reps} replications is below the minimum of {MIN_REPS}"
        )));
    }
    if x_grid.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidParameter("x grid must be nonnegative".into()));
    }
    // a degenerate Z ≡ 0 gives υ = 0; any positive scale leaves bounds at x > 0 nonnegative
    let ups = if params.upsilon_plus > 0.0 { params.upsilon_plus } else { f64::MIN_POSITIVE };
    let ups0 = if params.upsilon0 > 0.0 { params.upsilon0 } else { f64::MIN_POSITIVE };
    let abs_center = (1.0 + reynaud_eps) * params.ez_abs_hat;

    let mut report = TailReport {
        x_grid: x_grid.to_vec(),
        reps,
        params: *params,
        emp_right: vec![],
        se_right: vec![],
        emp_left: vec![],
        se_left: vec![],
        emp_abs: vec![],
        se_abs: vec![],
        reynaud_eps,
        bounds: BTreeMap::new(),
        flags: vec![],
        notes: vec![
            format!("bounds evaluated at upsilon_plus = {ups:e}"),
            format!("reynaud column centered at (1+eps)*E|Z| = {abs_center:e}, eps = {reynaud_eps}"),
        ],
    };
    let mut push = |name: &str, v: f64| report.bounds.entry(name.to_string()).or_default().push(v);
    for &x in x_grid {
        let r = log_bound_right_tail(x, ups)?;
        let l = log_bound_left_tail(x, ups)?;
        push("right_log", log_bound_right_log(x, ups)?.exp());
        push("right_sharp", r.sharp.exp());
        push("right_loose", r.loose.exp());
        push("left_poisson", l.poisson_form.exp());
        push("left_sharp", l.sharp.exp());
        push("left_loose", l.loose.exp());
        push(ABS_BOUND, log_bound_reynaud(x, reynaud_eps, ups0)?.exp());
    }
    for &x in x_grid {
        let (p, se) = tail_fraction(&zs.z_sup, |z| z >= params.ez_hat + x);
        report.emp_right.push(p);
        report.se_right.push(se);
        let (p, se) = tail_fraction(&zs.z_sup, |z| z <= params.ez_hat - x);
        report.emp_left.push(p);
        report.se_left.push(se);
        let (p, se) = tail_fraction(&zs.z_sup_abs, |z| z >= abs_center + x);
        report.emp_abs.push(p);
        report.se_abs.push(se);
    }
    let groups: [(&[&str], &Vec<f64>, &Vec<f64>); 3] = [
        (&RIGHT_BOUNDS, &report.emp_right, &report.se_right),
        (&LEFT_BOUNDS, &report.emp_left, &report.se_left),
        (&[ABS_BOUND], &report.emp_abs, &report.se_abs),
    ];
    let mut flags = Vec::new();
    for (names, emp, se) in groups {
        for name in names {
            for (i, &x) in x_grid.iter().enumerate() {
                let value = report.bounds[*name][i];
                if emp[i] - 3.0 * se[i] > value {
                    flags.push(Flag {
                        x,
                        bound: name.to_string(),
                        empirical: emp[i],
                        se: se[i],
                        value,
                    });
                }
            }
        }
    }
    report.flags = flags;
    Ok(report)
}

/// `var Z ≤ V + 2EZ` check: returns `(sample variance, its SE, V + 2ÊZ)`.
pub fn variance_check(zs: &ZSamples, params: &ConcParams) -> (f64, f64, f64) {
    (
        stats::variance(&zs.z_sup),
        stats::se_variance(&zs.z_sup),
        params.v + 2.0 * params.ez_hat,
    )
}

/// Log-Laplace transform of `Z` at `±t` against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgfRow {
    pub t: f64,
    pub right_emp: f64,
    pub right_se: f64,
    pub right_bound: f64,
    pub left_emp: f64,
    pub left_se: f64,
    pub left_bound: f64,
}

impl MgfRow {
    pub fn passes(&self) -> bool {
        self.right_emp <= self.right_bound + 3.0 * self.right_se && self.left_emp <= self.left_bound + 3.0 * self.left_se
    }
}

/// `log mean exp(±tZ)` with bootstrap SEs (`boot` resamples) against both lmgf bounds.
pub fn mgf_check(zs: &ZSamples, params: &ConcParams, ts: &[f64], boot: usize, seed: u64) -> Result<Vec<MgfRow>> {
    let z = &zs.z_sup;
    let r = z.len();
    let mut rng = SeedStream::new(seed).rng();
    let resamples: Vec<Vec<usize>> = (0..boot)
        .map(|_| (0..r).map(|_| rng.random_range(0..r)).collect())
        .collect();
    let boot_se = |t: f64| {
        let vals: Vec<f64> = resamples
            .iter()
            .map(|idx| {
                let zb: Vec<f64> = idx.iter().map(|&i| z[i]).collect();
                stats::log_mean_exp(&zb, t)
            })
            .collect();
        vals.len().checked_sub(1).map_or(0.0, |_| stats::variance(&vals).sqrt())
    };
    ts.iter()
        .map(|&t| {
            Ok(MgfRow {
                t,
                right_emp: stats::log_mean_exp(z, t),
                right_se: boot_se(t),
                right_bound: bound_right_lmgf(t, params.ez_hat, params.upsilon_plus)?,
                left_emp: stats::log_mean_exp(z, -t),
                left_se: boot_se(-t),
                left_bound: bound_left_lmgf(t, params.ez_hat, params.upsilon_plus)?,
            })
        })
        .collect()
}
