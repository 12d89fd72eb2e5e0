// Plain unadjusted Langevin: E[cos X] under N(0, 1) is exp(-1/2).
use langevin_mlmc::harness::ula_endpoints;
use langevin_mlmc::potentials::Quadratic;
use langevin_mlmc::stats::mean_stderr;

fn main() -> langevin_mlmc::Result<()> {
    let (xs, q) = ula_endpoints(&Quadratic::new(1), 0.01, 8.0, &[0.0], 20_000, 1)?;
    let (m, se) = mean_stderr(&xs.iter().map(|x| x[0].cos()).collect::<Vec<_>>());
    println!("E cos X ~ {m:.5} +- {se:.5} (exact {:.5}), {q} gradient queries", (-0.5f64).exp());
    Ok(())
}
