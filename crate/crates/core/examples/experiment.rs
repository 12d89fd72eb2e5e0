// A config-driven run, as the lmc binary does it.
use langevin_mlmc::harness::{self, report, ExperimentConfig};

const CONFIG: &str = "
method = mlmc
coupling.kind = spring
coupling.S = 2
potential.name = oscillatory
potential.d = 2
observable.name = cos
path.T = 2
path.h = 0.1
mlmc.levels = 4
target.eps = 0.01
seed = 11
";

fn main() -> langevin_mlmc::Result<()> {
    let cfg = ExperimentConfig::parse_str(CONFIG)?;
    let out = harness::run(&cfg)?;
    print!("{}", report::to_csv(&out.rows));
    println!("{}", out.summary.line());
    Ok(())
}
