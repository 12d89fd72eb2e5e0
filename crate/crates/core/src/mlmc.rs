//! Multilevel estimator assembly, pilot statistics, level allocation, rate
//! fitting and the quantum query model.

use crate::error::{Error, Result};
use crate::langevin::{simulate_coupled, simulate_path, PathConfig};
use crate::measure_change::{coarse_steps, grid_horizon};
use crate::potentials::{Observable, Potential};
use crate::rng::{tag, RngStream};
use crate::stats::{linear_fit, mean_var};
use rayon::prelude::*;
use std::sync::Arc;

/// Level 0 returns P_0; level l >= 1 returns one draw of P_l - P_{l-1}.
pub trait LevelSampler: Sync {
    fn sample(&self, level: usize, rng: &mut RngStream) -> Result<(f64, u64)>;
    fn max_level_hint(&self) -> Option<usize> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelStat {
    pub mean: f64,
    pub variance: f64,
    pub mean_cost: f64,
    pub n_used: u64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct LevelStats {
    pub levels: Vec<LevelStat>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r2_alpha: f64,
    pub r2_beta: f64,
    pub r2_gamma: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCost {
    pub level: usize,
    /// N_l for classical runs, sigma_hat_l for the quantum model.
    pub n_or_sigma: f64,
    pub mean: f64,
    pub variance: f64,
    pub queries: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CostReport {
    pub estimate: f64,
    pub est_variance: f64,
    pub classical_queries: u64,
    pub quantum_model_queries: f64,
    pub per_level: Vec<LevelCost>,
}

/// Draws `n` values of level `level` on streams (seed, ns, level, i), in parallel,
/// returned in index order.
pub fn draw_level(
    sampler: &dyn LevelSampler,
    level: usize,
    n: u64,
    seed: u64,
    ns: &[u64],
) -> Result<Vec<(f64, u64)>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut parts = ns.to_vec();
            parts.extend_from_slice(&[level as u64, i]);
            let mut rng = RngStream::keyed(seed, &parts);
            sampler
                .sample(level, &mut rng)
                .map_err(|e| Error::Sample { level, index: i, source: Box::new(e) })
        })
        .collect()
}

fn summarize(draws: &[(f64, u64)]) -> (LevelStat, u64) {
    let vals: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let q: u64 = draws.iter().map(|d| d.1).sum();
    let (mean, variance) = mean_var(&vals);
    let n = draws.len() as u64;
    (LevelStat { mean, variance, mean_cost: q as f64 / n as f64, n_used: n }, q)
}

/// sum_l mean of N_l level-l draws, on production streams.
pub fn mlmc_estimate(sampler: &dyn LevelSampler, n_per_level: &[u64], seed: u64) -> Result<CostReport> {
    mlmc_estimate_ns(sampler, n_per_level, seed, &[tag::PRODUCTION])
}

/// As `mlmc_estimate`, with an explicit stream namespace.
pub fn mlmc_estimate_ns(sampler: &dyn LevelSampler, n_per_level: &[u64], seed: u64, ns: &[u64]) -> Result<CostReport> {
    if n_per_level.is_empty() || n_per_level.iter().any(|&n| n == 0) {
        return Err(Error::param("n_per_level", "need at least one level and N_l >= 1"));
    }
    let mut report = CostReport {
        estimate: 0.0,
        est_variance: 0.0,
        classical_queries: 0,
        quantum_model_queries: 0.0,
        per_level: Vec::with_capacity(n_per_level.len()),
    };
    for (level, &n) in n_per_level.iter().enumerate() {
        let draws = draw_level(sampler, level, n, seed, ns)?;
        let (st, q) = summarize(&draws);
        report.estimate += st.mean;
        report.est_variance += st.variance / n as f64;
        report.classical_queries += q;
        report.per_level.push(LevelCost {
            level,
            n_or_sigma: n as f64,
            mean: st.mean,
            variance: st.variance,
            queries: q as f64,
        });
    }
    Ok(report)
}

/// Pilot statistics on levels `levels`, drawn from the pilot namespace.
pub fn estimate_level_stats(
    sampler: &dyn LevelSampler,
    levels: std::ops::Range<usize>,
    n_pilot: u64,
    seed: u64,
) -> Result<LevelStats> {
    Ok(estimate_level_stats_counted(sampler, levels, n_pilot, seed)?.0)
}

/// As `estimate_level_stats`, also returning the total gradient queries spent.
pub fn estimate_level_stats_counted(
    sampler: &dyn LevelSampler,
    levels: std::ops::Range<usize>,
    n_pilot: u64,
    seed: u64,
) -> Result<(LevelStats, u64)> {
    if n_pilot < 2 {
        return Err(Error::param("n_pilot", "need at least 2 pilot draws"));
    }
    let mut out = LevelStats::default();
    let mut total = 0;
    for level in levels {
        let draws = draw_level(sampler, level, n_pilot, seed, &[tag::PILOT])?;
        let (st, q) = summarize(&draws);
        out.levels.push(st);
        total += q;
    }
    Ok((out, total))
}

/// N_l = ceil(mu sqrt(V_l / C_l)) with sum V_l / N_l <= eps^2 / 2.
pub fn allocate_classical(stats: &LevelStats, eps: f64) -> Result<Vec<u64>> {
    if !(eps > 0.0) {
        return Err(Error::param("eps", "target accuracy must be positive"));
    }
    if !stats.levels.iter().any(|l| l.mean_cost > 0.0) {
        return Err(Error::param("stats", "no level with positive cost"));
    }
    let mut mu_sum = 0.0;
    for l in &stats.levels {
        if l.variance > 0.0 && !(l.mean_cost > 0.0) {
            return Err(Error::param("stats", "level with positive variance has zero cost"));
        }
        mu_sum += (l.variance * l.mean_cost).sqrt();
    }
    let mu = 2.0 / (eps * eps) * mu_sum;
    Ok(stats
        .levels
        .iter()
        .map(|l| {
            if l.variance > 0.0 {
                ((mu * (l.variance / l.mean_cost).sqrt()).ceil() as u64).max(1)
            } else {
                1
            }
        })
        .collect())
}

/// Smallest L >= 0 with K1 2^{-alpha L} <= target / sqrt 2.
pub fn bias_level(k1: f64, alpha: f64, target: f64) -> usize {
    let goal = target / std::f64::consts::SQRT_2;
    if k1 <= goal {
        return 0;
    }
    let l = ((k1 / goal).log2() / alpha - 1e-12).ceil();
    l.max(0.0) as usize
}

/// Per-level accuracy split of the QMLMC2 proof.
pub fn quantum_sigma_split(beta: f64, gamma: f64, sigma_hat: f64, big_l: usize) -> Vec<f64> {
    let e = beta / 2.0 - gamma;
    let tol = 1e-12;
    (0..=big_l)
        .map(|l| {
            let l = l as f64;
            if e > tol {
                sigma_hat / 2.0 * (1.0 - 2f64.powf(-e / 2.0)) * 2f64.powf(-e * l / 2.0)
            } else if e < -tol {
                // mirror image of the e > 0 split, so the sum stays below sigma_hat / 2
                let g = -e;
                sigma_hat / 2.0 * (1.0 - 2f64.powf(-g / 2.0)) * 2f64.powf(-g * (big_l as f64 - l) / 2.0)
            } else {
                sigma_hat / (2.0 * (big_l as f64 + 1.0))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumAllocation {
    pub big_l: usize,
    pub sigma_per_level: Vec<f64>,
    pub queries: f64,
    pub per_level_queries: Vec<f64>,
}

/// Extends measured (V_l, C_l) past the last measured level with the given rates.
pub fn extrapolated(stats: &LevelStats, beta: f64, gamma: f64, upto: usize) -> LevelStats {
    let mut out = stats.clone();
    let last = *stats.levels.last().expect("nonempty stats");
    let top = stats.levels.len() - 1;
    for l in stats.levels.len()..=upto {
        let k = (l - top) as f64;
        out.levels.push(LevelStat {
            mean: last.mean * 2f64.powf(-k),
            variance: last.variance * 2f64.powf(-beta * k),
            mean_cost: last.mean_cost * 2f64.powf(gamma * k),
            n_used: 0,
        });
    }
    out
}

/// Query cost sum_l sqrt(r) sqrt(V_l) C_l / sigma_hat_l with unit constant.
pub fn allocate_quantum_model(
    k1: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    stats: &LevelStats,
    sigma_hat: f64,
    r: usize,
) -> Result<QuantumAllocation> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("sigma_hat", sigma_hat)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::param(name, format!("must be positive, got {v}")));
        }
    }
    if stats.levels.is_empty() {
        return Err(Error::param("stats", "no levels"));
    }
    let big_l = bias_level(k1, alpha, sigma_hat);
    let st = extrapolated(stats, beta, gamma, big_l);
    let sig = quantum_sigma_split(beta, gamma, sigma_hat, big_l);
    let sr = (r as f64).sqrt();
    let per: Vec<f64> = (0..=big_l)
        .map(|l| sr * st.levels[l].variance.sqrt() / sig[l] * st.levels[l].mean_cost)
        .collect();
    Ok(QuantumAllocation { big_l, queries: per.iter().sum(), sigma_per_level: sig, per_level_queries: per })
}

/// Classical MLMC cost sum_l N_l C_l at RMSE `eps`, with L from the bias
/// model and stats extended past the measured levels.
pub fn classical_model_queries(k1: f64, alpha: f64, beta: f64, gamma: f64, stats: &LevelStats, eps: f64) -> Result<f64> {
    if stats.levels.is_empty() {
        return Err(Error::param("stats", "no levels"));
    }
    let big_l = bias_level(k1, alpha, eps);
    let mut st = extrapolated(stats, beta, gamma, big_l);
    st.levels.truncate(big_l + 1);
    let n = allocate_classical(&st, eps)?;
    Ok(n.iter().zip(&st.levels).map(|(&n, l)| n as f64 * l.mean_cost).sum())
}

/// Least-squares rates over `range` (inclusive start, exclusive end).
///
/// Levels with |mean| = 0 leave alpha undefined (NaN).
pub fn fit_rates(stats: &LevelStats, range: std::ops::Range<usize>) -> Result<RateFit> {
    if range.end > stats.levels.len() || range.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 measured levels in {range:?}")));
    }
    let ls: Vec<f64> = range.clone().map(|l| l as f64).collect();
    let sel = &stats.levels[range];
    if sel.iter().any(|l| !(l.variance > 0.0)) {
        return Err(Error::Fit("nonpositive variance in fit range".into()));
    }
    let lv: Vec<f64> = sel.iter().map(|l| l.variance.log2()).collect();
    let lc: Vec<f64> = sel.iter().map(|l| l.mean_cost.log2()).collect();
    let b = linear_fit(&ls, &lv);
    let c = linear_fit(&ls, &lc);
    let (alpha, r2_alpha) = if sel.iter().all(|l| l.mean != 0.0) {
        let lm: Vec<f64> = sel.iter().map(|l| l.mean.abs().log2()).collect();
        let a = linear_fit(&ls, &lm);
        (-a.slope, a.r2)
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(RateFit { alpha, beta: -b.slope, gamma: c.slope, r2_alpha, r2_beta: b.r2, r2_gamma: c.r2 })
}

/// K1 estimate max_l |mean_l| 2^{alpha l} over `range`.
pub fn fit_k1(stats: &LevelStats, alpha: f64, range: std::ops::Range<usize>) -> f64 {
    range.map(|l| stats.levels[l].mean.abs() * 2f64.powf(alpha * l as f64)).fold(0.0, f64::max)
}

/// Plain same-noise EM level sampler: level 0 is one path at h0,
/// level l couples steps h0 2^-l and h0 2^{1-l}.
#[derive(Clone)]
pub struct CoupledSampler {
    pub potential: Arc<dyn Potential>,
    pub phi: Observable,
    pub h0: f64,
    pub t: f64,
    pub x0: Vec<f64>,
}

impl CoupledSampler {
    /// T is rounded up to the h0 grid.
    pub fn new(potential: Arc<dyn Potential>, phi: Observable, h0: f64, t: f64, x0: Vec<f64>) -> Result<Self> {
        if !(h0 > 0.0) {
            return Err(Error::param("h0", "base step must be positive"));
        }
        if x0.len() != potential.dim() {
            return Err(Error::param("x0", "start point dimension mismatch"));
        }
        Ok(CoupledSampler { potential, phi, h0, t: grid_horizon(t, h0), x0 })
    }
}

impl LevelSampler for CoupledSampler {
    fn sample(&self, level: usize, rng: &mut RngStream) -> Result<(f64, u64)> {
        let p = self.potential.as_ref();
        if level == 0 {
            let cfg = PathConfig::with_horizon(self.h0, self.t, self.x0.clone())?;
            let (x, q) = simulate_path(p, &cfg, rng)?;
            return Ok((self.phi.eval(&x), q));
        }
        let h = self.h0 * 0.5f64.powi(level as i32);
        let n = coarse_steps(self.t, h)?;
        let c = simulate_coupled(p, h, n, &self.x0, &self.x0, rng)?;
        Ok((self.phi.eval(&c.x_fine) - self.phi.eval(&c.x_coarse), c.grad_queries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Telescoping;
    impl LevelSampler for Telescoping {
        fn sample(&self, level: usize, _rng: &mut RngStream) -> Result<(f64, u64)> {
            Ok((if level == 0 { 0.0 } else { 0.5f64.powi(level as i32) }, 1 << level))
        }
    }

    struct Constant3;
    impl LevelSampler for Constant3 {
        fn sample(&self, level: usize, _rng: &mut RngStream) -> Result<(f64, u64)> {
            Ok((if level == 0 { 3.0 } else { 0.0 }, 1))
        }
    }

    struct Coin;
    impl LevelSampler for Coin {
        fn sample(&self, _level: usize, rng: &mut RngStream) -> Result<(f64, u64)> {
            Ok((if rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 }, 1))
        }
    }

    fn synth(v: impl Fn(f64) -> f64, c: impl Fn(f64) -> f64, n: usize) -> LevelStats {
        LevelStats {
            levels: (0..n)
                .map(|l| LevelStat { mean: 0.0, variance: v(l as f64), mean_cost: c(l as f64), n_used: 2 })
                .collect(),
        }
    }

    #[test]
    fn telescoping_is_exact() {
        let r = mlmc_estimate(&Constant3, &[5, 3, 2], 1).unwrap();
        assert_eq!(r.estimate, 3.0);
        assert_eq!(r.est_variance, 0.0);
        let r = mlmc_estimate(&Telescoping, &[4, 4, 4, 4, 4], 1).unwrap();
        assert_eq!(r.estimate, 0.9375);
        assert_eq!(r.classical_queries, 4 * (1 + 2 + 4 + 8 + 16));
        assert!(mlmc_estimate(&Constant3, &[], 1).is_err());
        assert!(mlmc_estimate(&Constant3, &[1, 0], 1).is_err());
    }

    #[test]
    fn pilot_stats() {
        let s = estimate_level_stats(&Constant3, 0..3, 10, 1).unwrap();
        assert!(s.levels.iter().all(|l| l.variance == 0.0));
        let n = 20_000;
        let s = estimate_level_stats(&Coin, 0..1, n, 4).unwrap();
        assert!((s.levels[0].variance - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
    }

    #[test]
    fn classical_allocation_examples() {
        let one = synth(|_| 1.0, |_| 1.0, 1);
        assert_eq!(allocate_classical(&one, 0.1).unwrap(), vec![200]);
        let two = LevelStats {
            levels: vec![
                LevelStat { mean: 0.0, variance: 1.0, mean_cost: 1.0, n_used: 2 },
                LevelStat { mean: 0.0, variance: 0.25, mean_cost: 4.0, n_used: 2 },
            ],
        };
        assert_eq!(allocate_classical(&two, 0.1).unwrap(), vec![400, 100]);
        let zero = synth(|_| 0.0, |_| 1.0, 3);
        assert_eq!(allocate_classical(&zero, 0.1).unwrap(), vec![1, 1, 1]);
        let mixed = synth(|l| if l == 1.0 { 0.0 } else { 1.0 }, |_| 1.0, 3);
        assert_eq!(allocate_classical(&mixed, 0.1).unwrap()[1], 1);
    }

    #[test]
    fn allocation_budget_holds() {
        let st = synth(|l| 2f64.powf(-2.0 * l), |l| 2f64.powf(l), 6);
        for eps in [0.1, 0.01, 0.003] {
            let n = allocate_classical(&st, eps).unwrap();
            let v: f64 = st.levels.iter().zip(&n).map(|(l, &n)| l.variance / n as f64).sum();
            assert!(v <= eps * eps / 2.0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sigma_split_examples() {
        let s = quantum_sigma_split(2.0, 1.0, 0.4, 3);
        assert!(s.iter().all(|v| (v - 0.05).abs() < 1e-15));
        let s = quantum_sigma_split(4.0, 1.0, 0.1, 2);
        for (l, v) in s.iter().enumerate() {
            let want = 0.05 * (1.0 - 0.5f64.sqrt()) * 2f64.powf(-(l as f64) / 2.0);
            assert!((v - want).abs() < 1e-16);
        }
        let total: f64 = s.iter().sum();
        assert!((total - 0.05 * (1.0 - 2f64.powf(-1.5))).abs() < 1e-15);
        assert!((total - 0.032322330470336).abs() < 1e-12);
    }

    #[test]
    fn bias_level_rule() {
        assert_eq!(bias_level(1.0, 1.0, 2.0), 0);
        // 2^-L <= 0.1/sqrt2 -> L = 4
        assert_eq!(bias_level(1.0, 1.0, 0.1), 4);
        assert_eq!(bias_level(1.0, 1.0, std::f64::consts::SQRT_2 / 8.0), 3);
    }

    #[test]
    fn fit_exact_geometric() {
        let mut st = synth(|l| 2f64.powf(-2.0 * l), |l| 2f64.powf(l), 5);
        for (l, s) in st.levels.iter_mut().enumerate() {
            s.mean = 3.0 * 2f64.powf(-(l as f64));
        }
        let f = fit_rates(&st, 0..5).unwrap();
        assert!((f.beta - 2.0).abs() < 1e-12 && (f.r2_beta - 1.0).abs() < 1e-12);
        assert!((f.alpha - 1.0).abs() < 1e-12);
        assert!((f.gamma - 1.0).abs() < 1e-12);
        st.levels[2].variance = 0.0;
        assert!(matches!(fit_rates(&st, 0..5), Err(Error::Fit(_))));
        assert!(fit_rates(&st, 0..2).is_err());
    }

    #[test]
    fn quantum_parameter_errors() {
        let st = synth(|_| 1.0, |_| 1.0, 2);
        assert!(allocate_quantum_model(1.0, 0.0, 2.0, 1.0, &st, 0.1, 1).is_err());
        assert!(allocate_quantum_model(1.0, 1.0, 2.0, -1.0, &st, 0.1, 1).is_err());
        assert!(allocate_quantum_model(1.0, 1.0, 2.0, 1.0, &st, 0.0, 1).is_err());
    }
}
