//! Small statistics helpers: moments, least squares, KS distances.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// Sample mean and unbiased variance (0 for fewer than two values).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, 0.0);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1) as f64)
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let (m, v) = mean_var(xs);
    (m, (v / xs.len() as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares y = a + b x.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept: my - slope * mx, r2 }
}

/// One-sample Kolmogorov–Smirnov statistic sup |F_n - F|.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let w = vec![1.0; samples.len()];
    weighted_ks_statistic(samples, &w, cdf)
}

/// KS distance for a self-normalised weighted sample.
pub fn weighted_ks_statistic(samples: &[f64], weights: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[a].total_cmp(&samples[b]));
    let total: f64 = weights.iter().sum();
    let mut acc = 0.0;
    let mut d: f64 = 0.0;
    for &i in &idx {
        let f = cdf(samples[i]);
        d = d.max((f - acc / total).abs());
        acc += weights[i];
        d = d.max((acc / total - f).abs());
    }
    d
}

/// CDF of the 1-d Gibbs law with density proportional to (1 + x^2)^{-(1+kappa)/2},
/// which is a t_kappa law scaled by 1/sqrt(kappa).
pub fn student_t_gibbs_cdf(x: f64, kappa: f64) -> f64 {
    let t = StudentsT::new(0.0, 1.0, kappa).expect("kappa > 0");
    t.cdf(kappa.sqrt() * x)
}
