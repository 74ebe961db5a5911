//! Small descriptive statistics and goodness-of-fit helpers for Monte-Carlo checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the sample mean.
pub fn se_mean(xs: &[f64]) -> f64 {
    (variance(xs) / xs.len() as f64).sqrt()
}

/// Large-sample standard error of the sample variance, `sqrt((m4 - m2²) / R)`.
pub fn se_variance(xs: &[f64]) -> f64 {
    let r = xs.len() as f64;
    let m = mean(xs);
    let (m2, m4) = xs.iter().fold((0.0, 0.0), |(a, b), x| {
        let d2 = (x - m).powi(2);
        (a + d2, b + d2 * d2)
    });
    let (m2, m4) = (m2 / r, m4 / r);
    ((m4 - m2 * m2).max(0.0) / r).sqrt()
}

/// Binomial standard error `sqrt(p(1-p)/R)`.
pub fn binomial_se(p: f64, reps: usize) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `log(mean(exp(t · z)))`, computed stably.
pub fn log_mean_exp(z: &[f64], t: f64) -> f64 {
    let m = z.iter().map(|x| t * x).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = z.iter().map(|x| (t * x - m).exp()).sum();
    m + (s / z.len() as f64).ln()
}

/// Ordinary least squares line `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

impl LineFit {
    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

pub fn ols(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2, "need at least two points for a line fit");
    let mx = mean(x);
    let my = mean(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    LineFit {
        slope,
        intercept,
        residuals,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square goodness of fit. `expected` holds cell probabilities
/// (the last cell should absorb the upper tail); adjacent cells are pooled until
/// each expected count reaches 5.
pub fn chi_square_gof(observed: &[u64], expected_prob: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), expected_prob.len());
    let total: u64 = observed.iter().sum();
    let total = total as f64;
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o_acc, mut e_acc) = (0.0, 0.0);
    for (&o, &p) in observed.iter().zip(expected_prob) {
        o_acc += o as f64;
        e_acc += p * total;
        if e_acc >= 5.0 {
            cells.push((o_acc, e_acc));
            o_acc = 0.0;
            e_acc = 0.0;
        }
    }
    if e_acc > 0.0 || o_acc > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o_acc;
                last.1 += e_acc;
            }
            None => cells.push((o_acc, e_acc)),
        }
    }
    let statistic: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN);
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

/// Kolmogorov–Smirnov test of `samples` against Uniform[0, 1]; returns `(D, p)`
/// with the asymptotic p-value (Stephens' small-sample correction).
pub fn ks_uniform(samples: &[f64]) -> (f64, f64) {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let d = v
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = x - i as f64 / n;
            let hi = (i as f64 + 1.0) / n - x;
            lo.max(hi)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    (d, kolmogorov_survival(lambda))
}

fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_small_sample() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&x), 2.5);
        assert!((variance(&x) - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(median(&x), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn ols_recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 0.8 * v).collect();
        let fit = ols(&x, &y);
        assert!((fit.slope + 0.8).abs() < 1e-14);
        assert!((fit.intercept - 1.5).abs() < 1e-14);
        assert!(fit.rss() < 1e-25);
    }

    #[test]
    fn log_mean_exp_is_stable() {
        let z = [1000.0, 1000.0];
        assert!((log_mean_exp(&z, 1.0) - 1000.0).abs() < 1e-12);
        let z = [0.0, (3f64).ln()];
        assert!((log_mean_exp(&z, 1.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn chi_square_accepts_exact_fit_and_rejects_bad_fit() {
        let probs = [0.25, 0.25, 0.25, 0.25];
        let good = chi_square_gof(&[250, 250, 250, 250], &probs);
        assert_eq!(good.statistic, 0.0);
        assert!(good.p_value > 0.99);
        let bad = chi_square_gof(&[400, 200, 200, 200], &probs);
        assert!(bad.p_value < 1e-10);
    }

    #[test]
    fn ks_detects_shift() {
        let good: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(&good).1 > 0.99);
        let bad: Vec<f64> = good.iter().map(|x| x * x).collect();
        assert!(ks_uniform(&bad).1 < 1e-6);
    }
}
