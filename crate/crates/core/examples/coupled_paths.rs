// Shared-noise fine/coarse pairs: Var of the level difference shrinks like h^2.
use langevin_mlmc::langevin::simulate_coupled;
use langevin_mlmc::potentials::Oscillatory;
use langevin_mlmc::rng::{tag, RngStream};
use langevin_mlmc::stats::{linear_fit, mean_var};

fn main() -> langevin_mlmc::Result<()> {
    let p = Oscillatory::new(2);
    let (mut lh, mut lv) = (vec![], vec![]);
    for h in [0.04, 0.02, 0.01, 0.005] {
        let n = (1.0 / (2.0 * h)) as u64;
        let mut d = Vec::new();
        for i in 0..4000 {
            let c = simulate_coupled(&p, h, n, &[0.0, 0.0], &[0.0, 0.0], &mut RngStream::keyed(3, &[tag::PATH, i]))?;
            d.push(c.x_fine[0].cos() - c.x_coarse[0].cos());
        }
        let v = mean_var(&d).1;
        println!("h={h:<6} Var={v:.3e}");
        lh.push(h.log2());
        lv.push(v.log2());
    }
    println!("slope {:.2}", linear_fit(&lh, &lv).slope);
    Ok(())
}
