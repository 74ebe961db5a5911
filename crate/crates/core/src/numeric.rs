//! Quadrature and special functions shared by the simulation and estimation code.

use crate::error::{Error, Result};

/// Panel count used for every intensity integral over [0, 1].
pub const DEFAULT_PANELS: usize = 1 << 14;

/// Composite Simpson rule on `[a, b]` with `panels` subintervals (rounded up to even).
pub fn simpson<F>(f: F, a: f64, b: f64, panels: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let m = panels.max(2).next_multiple_of(2);
    let h = (b - a) / m as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..m {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b))
}

/// Simpson over [0, 1] with the default panel count.
pub fn integrate_unit<F>(f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    simpson(f, 0.0, 1.0, DEFAULT_PANELS)
}

/// Simpson over [0, 1] at `panels` and `panels / 2`; fails if the two disagree
/// by more than `rel_tol` (relative to `max(|fine|, 1)`).
pub fn integrate_unit_checked<F>(f: F, panels: usize, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fine = simpson(&f, 0.0, 1.0, panels);
    let coarse = simpson(&f, 0.0, 1.0, panels / 2);
    if !fine.is_finite() || (fine - coarse).abs() > rel_tol * fine.abs().max(1.0) {
        return Err(Error::QuadratureNotConverged { coarse, fine });
    }
    Ok(fine)
}

/// Evaluates `Σ_{j=1}^{len} w[j-1] · cos(2πjt)` by Clenshaw's recurrence.
pub fn cosine_series(weights: &[f64], t: f64) -> f64 {
    let c = (2.0 * std::f64::consts::PI * t).cos();
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &w in weights.iter().rev() {
        let b0 = w + 2.0 * c * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    b1 * c - b2
}

// B_{2m} / (2m)! for m = 1..8.
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (k + q)^{-s}` for `s > 1`, `q > 0`,
/// via Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0, "hurwitz_zeta requires s > 1, q > 0");
    const DIRECT: usize = 16;
    let mut sum = 0.0;
    for k in 0..DIRECT {
        sum += (k as f64 + q).powf(-s);
    }
    let x = q + DIRECT as f64;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // term m: B_{2m}/(2m)! · s(s+1)…(s+2m-2) · x^{-s-2m+1}
    let mut rising = s;
    let mut xpow = x.powf(-s - 1.0);
    for (i, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        if i > 0 {
            let m = i as f64;
            rising *= (s + 2.0 * m - 1.0) * (s + 2.0 * m);
            xpow /= x * x;
        }
        sum += coef * rising * xpow;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn simpson_integrates_trig_exactly_below_nyquist() {
        for j in [1, 7, 100, 4095] {
            let v = integrate_unit(|t| (2.0 * PI * j as f64 * t).cos());
            assert!(v.abs() < 1e-12, "j = {j}: {v}");
        }
    }

    #[test]
    fn checked_quadrature_flags_discontinuous_garbage() {
        let r = integrate_unit_checked(|t| if t < 0.3 { 1e12 } else { 0.0 }, 64, 1e-8);
        assert!(r.is_err());
        let ok = integrate_unit_checked(|t| t * t, 64, 1e-8).unwrap();
        assert!((ok - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let w: Vec<f64> = (1..=50).map(|j| 1.0 / (j as f64).powi(2)).collect();
        for &t in &[0.0, 0.1, 0.37, 0.5, 0.93] {
            let direct: f64 = w
                .iter()
                .enumerate()
                .map(|(i, wj)| wj * (2.0 * PI * (i + 1) as f64 * t).cos())
                .sum();
            assert!((cosine_series(&w, t) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn hurwitz_matches_known_values() {
        // ζ(2) = π²/6, ζ(4) = π⁴/90
        assert!((hurwitz_zeta(2.0, 1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((hurwitz_zeta(4.0, 1.0) - PI.powi(4) / 90.0).abs() < 1e-13);
        // shift identity ζ(s, q) = q^{-s} + ζ(s, q + 1)
        let s = 5.2;
        let lhs = hurwitz_zeta(s, 3.0);
        let rhs = 3f64.powf(-s) + hurwitz_zeta(s, 4.0);
        assert!((lhs - rhs).abs() < 1e-15);
        // brute force with integral tail
        let q = 65.0;
        let direct: f64 = (0..200_000).map(|k| (k as f64 + q).powf(-s)).sum::<f64>()
            + (200_000.0 + q - 0.5f64).powf(1.0 - s) / (s - 1.0);
        let v = hurwitz_zeta(s, q);
        assert!((v - direct).abs() < 1e-10 * v, "{v} vs {direct}");
    }
}
