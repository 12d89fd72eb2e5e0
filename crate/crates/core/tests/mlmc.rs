use langevin_mlmc::measure_change::SpringSampler;
use langevin_mlmc::mlmc::*;
use langevin_mlmc::potentials::{Oscillatory, Quadratic};
use langevin_mlmc::rng::RngStream;
use langevin_mlmc::stats::linear_fit;
use langevin_mlmc::{Observable, Result};
use proptest::prelude::*;
use std::sync::Arc;

struct Ladder;
impl LevelSampler for Ladder {
    fn sample(&self, level: usize, _: &mut RngStream) -> Result<(f64, u64)> {
        Ok(if level == 0 { (0.0, 1) } else { (0.5f64.powi(level as i32), 1) })
    }
}

struct Coin;
impl LevelSampler for Coin {
    fn sample(&self, _: usize, rng: &mut RngStream) -> Result<(f64, u64)> {
        Ok((if rng.uniform() < 0.5 { 1.0 } else { -1.0 }, 1))
    }
}

fn synthetic(levels: usize) -> LevelStats {
    LevelStats {
        levels: (0..levels)
            .map(|l| LevelStat { mean: 0.5f64.powi(l as i32), variance: 4f64.powi(-(l as i32)), mean_cost: 2f64.powi(l as i32), n_used: 0 })
            .collect(),
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    linear_fit(&xs.iter().map(|v| v.ln()).collect::<Vec<_>>(), &ys.iter().map(|v| v.ln()).collect::<Vec<_>>()).slope
}

fn decade() -> Vec<f64> {
    (0..=10).map(|k| 1e-4 * 10f64.powf(k as f64 / 10.0)).collect()
}

#[test]
fn finite_telescoping() {
    let r = mlmc_estimate(&Ladder, &[3, 3, 3, 3, 3], 0).unwrap();
    assert_eq!(r.estimate, 0.9375);
    assert_eq!(r.est_variance, 0.0);
}

#[test]
fn quadratic_cos_estimate() {
    let s = CoupledSampler::new(Arc::new(Quadratic::new(1)), Observable::cos(0), 0.1, 8.0, vec![0.0]).unwrap();
    let stats = estimate_level_stats(&s, 0..5, 1000, 11).unwrap();
    let n = allocate_classical(&stats, 0.01).unwrap();
    let r = mlmc_estimate(&s, &n, 11).unwrap();
    assert!((r.estimate - (-0.5f64).exp()).abs() <= 0.03, "{}", r.estimate);
}

#[test]
fn coin_variance() {
    let s = estimate_level_stats(&Coin, 0..1, 20_000, 2).unwrap();
    assert!((s.levels[0].variance - 1.0).abs() <= 3.0 * (2.0f64 / 20_000.0).sqrt());
}

#[test]
fn spring_query_counts() {
    let s = SpringSampler::new(Arc::new(Oscillatory::new(2)), Observable::cos(0), 2.0, 0.1, 1.0, vec![0.0, 0.0]).unwrap();
    let st = estimate_level_stats(&s, 1..4, 10, 3).unwrap();
    for (k, l) in st.levels.iter().enumerate() {
        let level = k + 1;
        assert_eq!(l.mean_cost, 3.0 * 1.0 / (2.0 * 0.1 * 0.5f64.powi(level as i32)));
    }
}

#[test]
fn spring_rates_oscillatory() {
    let s = SpringSampler::new(Arc::new(Oscillatory::new(2)), Observable::cos(0), 2.0, 0.1, 1.0, vec![0.0, 0.0]).unwrap();
    let st = estimate_level_stats(&s, 0..5, 10_000, 4).unwrap();
    let f = fit_rates(&st, 1..5).unwrap();
    assert!((1.6..=2.4).contains(&f.beta), "{f:?}");
    assert!((0.9..=1.1).contains(&f.gamma), "{f:?}");
}

#[test]
fn classical_vs_quantum_scaling() {
    let st = synthetic(3);
    let eps = decade();
    let c: Vec<f64> = eps.iter().map(|&e| classical_model_queries(1.0, 1.0, 2.0, 1.0, &st, e).unwrap()).collect();
    let q: Vec<f64> = eps.iter().map(|&e| allocate_quantum_model(1.0, 1.0, 2.0, 1.0, &st, e, 1).unwrap().queries).collect();
    let (sc, sq) = (slope(&eps, &c), slope(&eps, &q));
    assert!((-2.3..=-1.8).contains(&sc), "{sc}");
    assert!((-1.3..=-0.8).contains(&sq), "{sq}");
}

#[test]
fn quantum_halving_ratio() {
    // beta = 4 > 2 gamma, V_l C_l constant in l
    let st = LevelStats {
        levels: (0..3).map(|l| LevelStat { mean: 0.5f64.powi(l), variance: 16f64.powi(-l), mean_cost: 4f64.powi(l), n_used: 0 }).collect(),
    };
    let a = allocate_quantum_model(1.0, 1.0, 4.0, 1.0, &st, 1e-3, 1).unwrap().queries;
    let b = allocate_quantum_model(1.0, 1.0, 4.0, 1.0, &st, 5e-4, 1).unwrap().queries;
    assert!((1.9..=2.6).contains(&(b / a)), "{}", b / a);
}

proptest! {
    #[test]
    fn allocation_monotone(vs in prop::collection::vec(0.0f64..2.0, 1..6), cs in prop::collection::vec(0.5f64..50.0, 6), e in 0.001f64..0.5, shrink in 0.1f64..1.0) {
        let st = LevelStats { levels: vs.iter().zip(&cs).map(|(&v, &c)| LevelStat { mean: 0.0, variance: v, mean_cost: c, n_used: 0 }).collect() };
        let a = allocate_classical(&st, e).unwrap();
        let b = allocate_classical(&st, e * shrink).unwrap();
        prop_assert!(a.iter().zip(&b).all(|(x, y)| y >= x));
        let var: f64 = st.levels.iter().zip(&a).map(|(l, &n)| l.variance / n as f64).sum();
        prop_assert!(var <= e * e / 2.0 * (1.0 + 1e-12));
    }

    #[test]
    fn quantum_budget(beta in 0.2f64..6.0, gamma in 0.2f64..3.0, l in 0usize..30, s in 1e-6f64..1.0) {
        let total: f64 = quantum_sigma_split(beta, gamma, s, l).iter().sum();
        prop_assert!(total <= s / 2.0 * (1.0 + 1e-12));
    }
}
