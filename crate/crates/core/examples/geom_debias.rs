// Randomized debiasing of a procedure whose bias equals its accuracy target.
use langevin_mlmc::debias::{geom_debias, GeomDebiasConfig};
use langevin_mlmc::rng::{tag, RngStream};
use langevin_mlmc::stats::mean_var;

fn main() -> langevin_mlmc::Result<()> {
    let cfg = GeomDebiasConfig::with_sigma(0.1)?;
    let biased = |s: f64, _: &mut RngStream| Ok((1.7 + s, 1));
    let mut xs = Vec::new();
    for i in 0..50_000 {
        xs.push(geom_debias(&biased, &cfg, &mut RngStream::keyed(5, &[tag::TEST, i]))?.value);
    }
    let (m, v) = mean_var(&xs);
    println!("mean {m:.6} (target 1.7, biased proc gives {:.4}), variance {v:.2e} <= {:.2e}", 1.7 + cfg.sigma_at(0), 0.01);
    Ok(())
}
