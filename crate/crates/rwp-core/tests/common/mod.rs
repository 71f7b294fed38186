//! Shared helpers for the integration suites: an independent Gaussian-tail
//! oracle and small statistics utilities.

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Independent Q oracle: Maclaurin series of erf for small arguments, the
/// Laplace continued fraction for the tail. Never calls the library.
pub fn q_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_oracle(-x);
    }
    if x <= 3.0 {
        let z = x / 2f64.sqrt();
        let mut term = z;
        let mut sum = z;
        let mut n = 1.0;
        loop {
            term *= -z * z / n;
            let contrib = term / (2.0 * n + 1.0);
            sum += contrib;
            if contrib.abs() < 1e-22 {
                break;
            }
            n += 1.0;
        }
        0.5 * (1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum)
    } else {
        let mut cf = 0.0;
        for k in (1..=160).rev() {
            cf = k as f64 / (x + cf);
        }
        phi(x) / (x + cf)
    }
}

/// Mean and standard error of a set of batch means.
pub fn batch_mean_se(batch_means: &[f64]) -> (f64, f64) {
    let n = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / n;
    let var = batch_means
        .iter()
        .map(|m| (m - mean) * (m - mean))
        .sum::<f64>()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Two-sided Kolmogorov–Smirnov distance between sorted samples and a cdf.
#[allow(dead_code)]
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        ks = ks
            .max((f - (i + 1) as f64 / n).abs())
            .max((f - i as f64 / n).abs());
    }
    ks
}
