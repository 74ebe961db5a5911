//! Configuration, experiment orchestration and persistence behind the CLI.
//!
//! Computational modules never touch the filesystem; everything written to
//! disk goes through [`run`], atomically.

pub mod config;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use serde_json::json;

pub use config::{Experiment, ExperimentConfig, KMaxPolicy, XGrid};
pub use experiments::{
    bounds_table, conc_sweep, fit_rate, integrated_table, risk_sweep, ConcResult, RateFit, RiskResult, RiskRow,
};

use crate::basis::true_coeffs;
use crate::error::{Error, Result};
use crate::estimator::{default_k_cap, empirical_coeffs, ise_positive_part, mise_exact, oracle_dimension, project};
use crate::modelselect::{adaptive_estimate_with, PenaltyScale};
use crate::pointprocess::sample_many;
use output::{csv_with_header, write_atomic};

/// Files written by a run and its JSON summary.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

struct Writer<'a> {
    cfg: &'a ExperimentConfig,
    hash: String,
    files: Vec<PathBuf>,
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.cfg.out_dir().join(name);
        write_atomic(&path, csv_with_header(body, &self.hash, self.cfg.seed).as_bytes())?;
        self.files.push(path);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        let path = self.cfg.out_dir().join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        self.files.push(path);
        Ok(())
    }
}

/// Validates `cfg`, runs its experiment on a pool of `cfg.threads` workers and
/// writes `<experiment>.csv` and `<experiment>.json` under the output directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_inner(cfg))
}

fn run_inner(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let exp = cfg.experiment()?;
    let mut w = Writer {
        cfg,
        hash: cfg.hash(),
        files: Vec::new(),
    };
    let name = exp.name();
    let meta = json!({
        "experiment": name,
        "version": output::VERSION,
        "config_sha256": w.hash,
        "seed": cfg.seed,
    });
    let summary = match exp {
        Experiment::Simulate => {
            let model = cfg.model()?;
            let n = cfg.n()?;
            let set = sample_many(model, n, cfg.seed)?;
            let mut body = String::from("sample,index,t\n");
            for (i, p) in set.patterns.iter().enumerate() {
                for (k, t) in p.points().iter().enumerate() {
                    body.push_str(&format!("{i},{k},{t:e}\n"));
                }
            }
            w.csv("simulate.csv", &body)?;
            json!({
                "n": n,
                "total_count": set.total_count(),
                "mean_count": set.total_count() as f64 / n as f64,
                "total_mass": model.total_mass(),
            })
        }
        Experiment::Coeffs => {
            let model = cfg.model()?;
            let n = cfg.n()?;
            let j = cfg.max_index.unwrap_or(16);
            let emp = empirical_coeffs(&sample_many(model, n, cfg.seed)?, j);
            let truth = true_coeffs(model, j)?;
            let mut body = String::from("j,beta_hat,beta_true\n");
            for (jj, b) in emp.coeffs.iter() {
                body.push_str(&format!("{jj},{b:e},{:e}\n", truth.get(jj)));
            }
            w.csv("coeffs.csv", &body)?;
            json!({ "n": n, "J": j, "empirical": emp })
        }
        Experiment::Estimate => {
            let model = cfg.model()?;
            let n = cfg.n()?;
            let (k, oracle) = match cfg.k {
                Some(k) => (k, None),
                None => {
                    let o = oracle_dimension(cfg.gamma()?, n, default_k_cap(n))?;
                    (o.k_star, Some(o))
                }
            };
            let emp = empirical_coeffs(&sample_many(model, n, cfg.seed)?, k);
            let est = project(&emp, k)?;
            let truth = true_coeffs(model, k)?;
            let mise = mise_exact(&est, &truth, model.tail_sq(k)?)?;
            let mut body = String::from("j,beta_hat\n");
            for (jj, b) in est.coeffs.iter() {
                body.push_str(&format!("{jj},{b:e}\n"));
            }
            w.csv("estimate.csv", &body)?;
            json!({
                "n": n,
                "k": k,
                "oracle": oracle,
                "mise": mise,
                "ise_positive_part": ise_positive_part(&est, model),
            })
        }
        Experiment::Adapt => {
            let model = cfg.model()?;
            let n = cfg.n()?;
            let k_max = cfg.k_max.resolve(n);
            let set = sample_many(model, n, cfg.seed)?;
            let beta0 = model.total_mass();
            let (est, trace) = adaptive_estimate_with(&set, k_max, cfg.penalty_scale, Some(beta0))?;
            trace.verify_argmin()?;
            let truth = true_coeffs(model, k_max)?;
            let mise = mise_exact(&est, &truth, model.tail_sq(k_max)?)?;
            w.csv("adapt.csv", &trace.to_csv())?;
            json!({
                "k_hat": trace.k_hat,
                "pen_scale": trace.pen_scale,
                "mise_if_truth_known": mise,
                "k_max": k_max,
                "at_boundary": trace.k_hat == k_max && k_max < n,
            })
        }
        Experiment::Risk => {
            let r = risk_sweep(
                cfg.model()?,
                cfg.gamma()?,
                &cfg.n_grid,
                cfg.reps,
                cfg.seed,
                cfg.k_max,
                cfg.penalty_scale,
            )?;
            w.csv("risk.csv", &r.to_csv())?;
            json!({
                "oracle": r.oracle,
                "adaptive": r.adaptive,
                "oracle_by_n": r.oracle_by_n,
                "k_max_by_n": r.k_max_by_n,
                "boundary_hits": r.boundary_hits,
                "penalty_scale": cfg.penalty_scale,
            })
        }
        Experiment::Conc => {
            let class = cfg.class.as_ref().expect("validated");
            let c = conc_sweep(
                class,
                cfg.model()?,
                cfg.n()?,
                cfg.reps,
                &cfg.x_grid.values(),
                cfg.seed,
                cfg.eps,
            )?;
            w.csv("conc.csv", &c.to_csv())?;
            json!({
                "flag_count": c.flag_count(),
                "report": c.report,
                "variance": { "var_z": c.variance.0, "se": c.variance.1, "v_plus_2ez": c.variance.2 },
                "symmetric_class": class.is_symmetric(),
            })
        }
        Experiment::BoundsTable => {
            let table = bounds_table(&cfg.upsilon, &cfg.x_grid.values(), cfg.eps)?;
            w.csv("bounds-table.csv", &table)?;
            if let Some(model) = &cfg.model {
                let t = integrated_table(model, cfg.k, cfg.gamma.as_ref(), &cfg.n_grid, cfg.eps, cfg.c1(), cfg.c3())?;
                w.csv("integrated.csv", &t)?;
            }
            json!({ "upsilon": cfg.upsilon, "x_grid": cfg.x_grid.values(), "eps": cfg.eps, "c1": cfg.c1(), "c3": cfg.c3() })
        }
    };
    let summary = json!({ "meta": meta, "result": summary });
    w.json(&format!("{name}.json"), &summary)?;
    Ok(RunOutcome {
        files: w.files,
        summary,
    })
}

/// Applies CLI overrides to a loaded config.
pub fn apply_overrides(
    cfg: &mut ExperimentConfig,
    experiment: Experiment,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> Result<()> {
    match cfg.experiment {
        Some(e) if e != experiment => {
            return Err(Error::Config(format!(
                "config selects `{}` but the command is `{}`",
                e.name(),
                experiment.name()
            )))
        }
        _ => cfg.experiment = Some(experiment),
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = threads {
        cfg.threads = t;
    }
    if let Some(o) = out {
        cfg.out_dir = Some(o);
    }
    if cfg.penalty_scale == PenaltyScale::Oracle && cfg.model.is_none() {
        return Err(Error::Config("oracle penalty scale needs a model".into()));
    }
    Ok(())
}
