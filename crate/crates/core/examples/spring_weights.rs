// Spring-coupled level samples carry Radon-Nikodym weights with mean one.
use langevin_mlmc::measure_change::{spring_level_sample, SpringConfig};
use langevin_mlmc::potentials::Oscillatory;
use langevin_mlmc::rng::{tag, RngStream};
use langevin_mlmc::stats::mean_stderr;
use langevin_mlmc::Observable;

fn main() -> langevin_mlmc::Result<()> {
    let p = Oscillatory::new(2);
    let cfg = SpringConfig::new(2.0, 0.01, 100, vec![0.0, 0.0]);
    let (mut rf, mut rc, mut delta) = (vec![], vec![], vec![]);
    for i in 0..20_000 {
        let w = spring_level_sample(&p, &Observable::cos(0), &cfg, &mut RngStream::keyed(4, &[tag::PATH, i]))?;
        rf.push(w.log_rf.exp());
        rc.push(w.log_rc.exp());
        delta.push(w.delta);
    }
    for (name, v) in [("E R^f", &rf), ("E R^c", &rc), ("E delta", &delta)] {
        let (m, se) = mean_stderr(v);
        println!("{name:<8} {m:.5} +- {se:.5}");
    }
    Ok(())
}
