// Student-t via the radial transform: ULA on the light-tailed f_h, mapped back through h.
use langevin_mlmc::harness::transformed_ula_endpoints;
use langevin_mlmc::potentials::StudentT;
use langevin_mlmc::stats::{ks_statistic, student_t_gibbs_cdf};
use langevin_mlmc::tail_transform::{TransformParams, TransformedPotential};
use std::sync::Arc;

fn main() -> langevin_mlmc::Result<()> {
    let tp = TransformedPotential::new(Arc::new(StudentT::new(1, 3.0)?), TransformParams::default())?;
    let (xs, _) = transformed_ula_endpoints(&tp, 0.005, 4000, &[0.0], 4000, 1)?;
    let xs: Vec<f64> = xs.iter().map(|x| x[0]).collect();
    let big = xs.iter().filter(|x| x.abs() > 5.0).count() as f64 / xs.len() as f64;
    println!("P(|X| > 5) ~ {big:.4} (exact {:.4})", 2.0 * (1.0 - student_t_gibbs_cdf(5.0, 3.0)));
    println!("KS distance {:.4}", ks_statistic(&xs, |x| student_t_gibbs_cdf(x, 3.0)));
    Ok(())
}
