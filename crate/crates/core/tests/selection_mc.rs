//! Monte-Carlo behaviour of the estimators and of model selection.

use pppconc::basis::{true_coeffs, GammaSequence};
use pppconc::estimator::{default_k_cap, empirical_coeffs, mise_exact, oracle_dimension, project};
use pppconc::modelselect::{adaptive_estimate, xi_failure_bound, xi_indicator};
use pppconc::pointprocess::{sample_many, sample_many_from, IntensityModel};
use pppconc::rng::SeedStream;
use pppconc::stats;

fn sobolev() -> IntensityModel {
    serde_json::from_value(serde_json::json!({
        "family": "sobolev-decay", "params": {"p": 2.0, "amplitude": 24.0, "mass": 36.0}
    }))
    .unwrap()
}

#[test]
fn empirical_coefficient_variance_matches_campbell() {
    let m = sobolev();
    let n = 4;
    let root = SeedStream::new(51);
    let reps = 5_000;
    let draws: Vec<Vec<f64>> = (0..reps)
        .map(|r| empirical_coeffs(&sample_many_from(&m, n, root.child(r)).unwrap(), 3).coeffs.values().to_vec())
        .collect();
    let truth = true_coeffs(&m, 3).unwrap();
    for (idx, (j, _)) in truth.iter().enumerate() {
        let col: Vec<f64> = draws.iter().map(|d| d[idx]).collect();
        let target = pppconc::numeric::integrate_unit(|t| pppconc::basis::phi(j, t).powi(2) * m.eval(t)) / n as f64;
        let (v, se) = (stats::variance(&col), stats::se_variance(&col));
        assert!((v - target).abs() < 4.0 * se, "j={j}: var {v} vs {target}, se {se}");
    }
}

#[test]
fn adaptive_risk_tracks_oracle_risk() {
    let m = sobolev();
    let g = GammaSequence::Polynomial { p: 2.0 };
    let n = 1024;
    let o = oracle_dimension(&g, n, default_k_cap(n)).unwrap();
    let truth = true_coeffs(&m, 64).unwrap();
    let tail = m.tail_sq(64).unwrap();
    let (mut orc, mut ada) = (Vec::new(), Vec::new());
    for r in 0..40 {
        let set = sample_many(&m, n, 500 + r).unwrap();
        let emp = empirical_coeffs(&set, 64);
        orc.push(mise_exact(&project(&emp, o.k_star).unwrap(), &truth, tail).unwrap());
        let (est, trace) = adaptive_estimate(&set, 64).unwrap();
        trace.verify_argmin().unwrap();
        assert!(trace.k_hat < 64);
        ada.push(mise_exact(&est, &truth, tail).unwrap());
    }
    let ratio = stats::median(&ada) / stats::median(&orc);
    assert!(ratio < 4.0, "ratio {ratio}");
}

#[test]
fn xi_failure_frequency_decays_with_n() {
    let m = IntensityModel::constant(0.8).unwrap();
    let mut prev = f64::INFINITY;
    for n in [1usize, 2, 4, 8] {
        let root = SeedStream::new(70).child(n as u64);
        let reps = 20_000;
        let fails = (0..reps)
            .filter(|&r| !xi_indicator(&empirical_coeffs(&sample_many_from(&m, n, root.child(r)).unwrap(), 0), 0.8))
            .count() as f64
            / reps as f64;
        let se = stats::binomial_se(fails, reps as usize);
        assert!(fails <= xi_failure_bound(n).min(1.0) + 3.0 * se, "n={n}: {fails}");
        assert!(fails <= prev + 3.0 * se);
        prev = fails;
    }
}
