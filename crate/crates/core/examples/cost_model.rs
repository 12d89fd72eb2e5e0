// Rate fit on the spring sampler, then classical vs quantum-model cost over a decade of accuracy.
use langevin_mlmc::measure_change::SpringSampler;
use langevin_mlmc::mlmc::{allocate_quantum_model, classical_model_queries, estimate_level_stats, fit_k1, fit_rates};
use langevin_mlmc::potentials::Oscillatory;
use langevin_mlmc::Observable;
use std::sync::Arc;

fn main() -> langevin_mlmc::Result<()> {
    let s = SpringSampler::new(Arc::new(Oscillatory::new(2)), Observable::cos(0), 2.0, 0.1, 1.0, vec![0.0, 0.0])?;
    let st = estimate_level_stats(&s, 0..5, 4000, 2)?;
    let f = fit_rates(&st, 1..5)?;
    let k1 = fit_k1(&st, 1.0, 1..5);
    println!("alpha {:.2} beta {:.2} gamma {:.2} K1 {k1:.3e}", f.alpha, f.beta, f.gamma);
    for eps in [1e-3, 5e-4, 2e-4, 1e-4] {
        let c = classical_model_queries(k1, 1.0, f.beta, f.gamma, &st, eps)?;
        let q = allocate_quantum_model(k1, 1.0, f.beta, f.gamma, &st, eps, 1)?;
        println!("eps {eps:.0e}: classical {c:.3e}  quantum model {:.3e} (L = {})", q.queries, q.big_l);
    }
    Ok(())
}
