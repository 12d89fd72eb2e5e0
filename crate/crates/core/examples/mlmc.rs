// Pilot, allocate, estimate.
use langevin_mlmc::mlmc::{allocate_classical, estimate_level_stats, mlmc_estimate, CoupledSampler};
use langevin_mlmc::potentials::Quadratic;
use langevin_mlmc::Observable;
use std::sync::Arc;

fn main() -> langevin_mlmc::Result<()> {
    let s = CoupledSampler::new(Arc::new(Quadratic::new(1)), Observable::cos(0), 0.1, 8.0, vec![0.0])?;
    let stats = estimate_level_stats(&s, 0..5, 1000, 1)?;
    let n = allocate_classical(&stats, 0.005)?;
    let r = mlmc_estimate(&s, &n, 1)?;
    for l in &r.per_level {
        println!("level {} N={:<7} mean={:+.3e} var={:.3e}", l.level, l.n_or_sigma, l.mean, l.variance);
    }
    println!("estimate {:.5} +- {:.5}, {} queries", r.estimate, r.est_variance.sqrt(), r.classical_queries);
    Ok(())
}
