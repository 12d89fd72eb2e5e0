// Unbiased E_pi[cos] for the standard Gaussian, both methods.
use langevin_mlmc::debias::{unbiased_gibbs_estimate, UnbiasedConfig, UnbiasedMethod};
use langevin_mlmc::potentials::Quadratic;
use langevin_mlmc::Observable;
use std::sync::Arc;

fn main() -> langevin_mlmc::Result<()> {
    let p = Arc::new(Quadratic::new(1));
    for (method, sigma) in [(UnbiasedMethod::Osl, 0.02), (UnbiasedMethod::Dissipative, 0.1)] {
        let cfg = UnbiasedConfig::new(sigma, 0.1, vec![0.0])?;
        let r = unbiased_gibbs_estimate(p.clone(), &Observable::cos(0), method, &cfg, 3)?;
        println!(
            "{method:?}: {:.5} (sigma~ {sigma}), {} + {} pilot queries, outer {} j {:?}",
            r.report.estimate, r.report.classical_queries, r.pilot_queries, r.n_outer, r.j_drawn
        );
    }
    println!("exact {:.5}", (-0.5f64).exp());
    Ok(())
}
