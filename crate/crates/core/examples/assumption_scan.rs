// Tail expressions of f_h for Student-t(d = 3, kappa = 2).
use langevin_mlmc::potentials::StudentT;
use langevin_mlmc::tail_transform::{assumption_scan, ScanCandidates, TransformParams, TransformedPotential};
use std::sync::Arc;

fn main() -> langevin_mlmc::Result<()> {
    let tp = TransformedPotential::new(Arc::new(StudentT::new(3, 2.0)?), TransformParams::default())?;
    let grid: Vec<f64> = (1..=8).map(|k| 2.0 + k as f64).collect();
    let rep = assumption_scan(&tp, &grid, ScanCandidates { l: 20.0, a: 1.0, b: 1.0 })?;
    println!("{:>5} {:>10} {:>10} {:>11} {:>10} {:>10}", "r", "smooth_r", "smooth_t", "diss", "hess_r", "hess_t");
    for w in &rep.rows {
        println!("{:>5} {:>10.4} {:>10.4} {:>11.3} {:>10.2e} {:>10.2e}", w.r, w.smooth_rad, w.smooth_tan, w.dissipative, w.hess_rad, w.hess_tan);
    }
    println!("smooth {} dissipative {} hessian {}", rep.smooth_ok, rep.dissipative_ok, rep.hessian_ok);
    Ok(())
}
