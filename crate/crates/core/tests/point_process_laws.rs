//! Distributional checks of the sampler against Poisson process laws.

use pppconc::pointprocess::{poisson_pmf, sample_pattern, superpose, IntensityModel};
use pppconc::rng::SeedStream;
use pppconc::stats::{chi_square_gof, ks_uniform};

fn sobolev() -> IntensityModel {
    serde_json::from_value(serde_json::json!({
        "family": "sobolev-decay", "params": {"p": 2.0, "amplitude": 1.0, "mass": 3.0}
    }))
    .unwrap()
}

fn count_histogram(counts: impl Iterator<Item = usize>, max_k: usize) -> Vec<u64> {
    let mut h = vec![0u64; max_k + 1];
    for c in counts {
        h[c.min(max_k)] += 1;
    }
    h
}

fn poisson_cells(mean: f64, max_k: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..max_k as u64).map(|k| poisson_pmf(k, mean).unwrap()).collect();
    p.push(1.0 - p.iter().sum::<f64>());
    p
}

#[test]
fn counts_are_poisson_for_inhomogeneous_model() {
    let m = sobolev();
    let root = SeedStream::new(21);
    let h = count_histogram((0..20_000).map(|r| sample_pattern(&m, &mut root.child(r).rng()).count()), 20);
    let t = chi_square_gof(&h, &poisson_cells(m.total_mass(), 20));
    assert!(t.p_value > 1e-3, "{t:?}");
}

#[test]
fn counts_in_disjoint_windows_are_independent_poisson() {
    let m = sobolev();
    let root = SeedStream::new(22);
    let (mut a, mut b, mut ab) = (0.0, 0.0, 0.0);
    let reps = 20_000;
    for r in 0..reps {
        let p = sample_pattern(&m, &mut root.child(r).rng());
        let na = p.points().iter().filter(|&&x| x < 0.5).count() as f64;
        let nb = p.count() as f64 - na;
        a += na;
        b += nb;
        ab += na * nb;
    }
    let r = reps as f64;
    let cov = ab / r - (a / r) * (b / r);
    // Var(N_A N_B) ≈ Λ_A Λ_B (1 + Λ_A + Λ_B) for independent Poisson counts
    let (la, lb) = (a / r, b / r);
    let se = (la * lb * (1.0 + la + lb) / r).sqrt();
    assert!(cov.abs() < 4.0 * se, "cov {cov}, se {se}");
}

#[test]
fn homogeneous_locations_are_uniform() {
    let m = IntensityModel::constant(7.0).unwrap();
    let root = SeedStream::new(23);
    let pts: Vec<f64> = (0..2_000)
        .flat_map(|r| sample_pattern(&m, &mut root.child(r).rng()).points().to_vec())
        .collect();
    let (d, p) = ks_uniform(&pts);
    assert!(p > 1e-3, "D = {d}, p = {p}");
}

#[test]
fn locations_follow_the_normalized_intensity() {
    let m = sobolev();
    let root = SeedStream::new(24);
    let mass = m.total_mass();
    // probability integral transform through the exact cumulative intensity
    let cdf = |x: f64| pppconc::numeric::simpson(|t| m.eval(t), 0.0, x, 512) / mass;
    let u: Vec<f64> = (0..1_500)
        .flat_map(|r| sample_pattern(&m, &mut root.child(r).rng()).points().to_vec())
        .map(cdf)
        .collect();
    let (d, p) = ks_uniform(&u);
    assert!(p > 1e-3, "D = {d}, p = {p}");
}

#[test]
fn superposition_of_thinned_parts_is_poisson_on_inhomogeneous_model() {
    let m = sobolev();
    let part = m.scaled(1.0 / 8.0).unwrap();
    let root = SeedStream::new(25);
    let h = count_histogram(
        (0..20_000).map(|r| {
            let rs = root.child(r);
            let parts: Vec<_> = (0..8).map(|i| sample_pattern(&part, &mut rs.child(i).rng())).collect();
            superpose(&parts).count()
        }),
        20,
    );
    let t = chi_square_gof(&h, &poisson_cells(m.total_mass(), 20));
    assert!(t.p_value > 1e-3, "{t:?}");
}
