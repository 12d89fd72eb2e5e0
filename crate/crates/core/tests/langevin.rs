use langevin_mlmc::langevin::{em_step, evolve, simulate_coupled, simulate_path, PathConfig};
use langevin_mlmc::potentials::{Oscillatory, Quadratic};
use langevin_mlmc::rng::{tag, RngStream};
use langevin_mlmc::stats::mean_var;
use langevin_mlmc::{Error, Potential};

#[test]
fn increment_moments() {
    let mut rng = RngStream::keyed(1, &[tag::TEST, 1]);
    let xs: Vec<f64> = (0..1_000_000).map(|_| rng.gaussian_increment(1, 0.01)[0]).collect();
    let (m, v) = mean_var(&xs);
    assert!(m.abs() <= 4.0 * 0.1 / 1e3, "{m}");
    assert!((v / 0.01 - 1.0).abs() <= 0.01, "{v}");

    let mut rng = RngStream::keyed(1, &[tag::TEST, 2]);
    let draws: Vec<Vec<f64>> = (0..100_000).map(|_| rng.gaussian_increment(2, 4.0)).collect();
    for i in 0..2 {
        let (_, v) = mean_var(&draws.iter().map(|w| w[i]).collect::<Vec<_>>());
        assert!((v / 4.0 - 1.0).abs() <= 0.02, "{v}");
    }
}

#[test]
fn same_state_same_path() {
    let p = Oscillatory::new(2);
    let cfg = PathConfig::new(0.01, 500, vec![1.0, -1.0]).unwrap();
    let a = simulate_path(&p, &cfg, &mut RngStream::new(3, 9)).unwrap();
    let b = simulate_path(&p, &cfg, &mut RngStream::new(3, 9)).unwrap();
    assert_eq!(a, b);
    assert_eq!(em_step(&[1.0], &[1.0], 0.5, &[0.1])[0], 1.0 - 0.5 + std::f64::consts::SQRT_2 * 0.1);
}

#[test]
fn zero_steps() {
    let p = Quadratic::new(2);
    let cfg = PathConfig::new(0.1, 0, vec![0.5, 0.25]).unwrap();
    assert_eq!(simulate_path(&p, &cfg, &mut RngStream::new(0, 0)).unwrap(), (vec![0.5, 0.25], 0));
    let c = simulate_coupled(&p, 0.1, 0, &[0.5, 0.25], &[0.5, 0.25], &mut RngStream::new(0, 0)).unwrap();
    assert_eq!((c.x_fine, c.x_coarse, c.grad_queries), (vec![0.5, 0.25], vec![0.5, 0.25], 0));
}

#[test]
fn stationary_law_of_quadratic() {
    let p = Quadratic::new(1);
    let cfg = PathConfig::with_horizon(0.01, 10.0, vec![5.0]).unwrap();
    let xs: Vec<f64> = (0..10_000)
        .map(|i| simulate_path(&p, &cfg, &mut RngStream::keyed(2, &[tag::PATH, i])).unwrap().0[0])
        .collect();
    let (m, v) = mean_var(&xs);
    assert!(m.abs() <= 3.0 * (v / xs.len() as f64).sqrt(), "{m}");
    assert!((v - 1.0).abs() <= 0.1, "{v}");
}

#[test]
fn remainder_step() {
    let cfg = PathConfig::with_horizon(0.3, 1.0, vec![0.0]).unwrap();
    assert_eq!(cfg.n_steps, 3);
    assert!((cfg.horizon() - 1.0).abs() < 1e-15);
    assert_eq!(cfg.grad_queries(), 4);
}

/// The coarse path rebuilt from the fine increments matches the coupled sampler bit for bit.
#[test]
fn exact_noise_sharing() {
    let p = Oscillatory::new(2);
    let (h, n, x0) = (0.02, 100, vec![0.4, -0.3]);
    let c = simulate_coupled(&p, h, n, &x0, &x0, &mut RngStream::new(8, 1)).unwrap();

    let mut rng = RngStream::new(8, 1);
    let incs: Vec<Vec<f64>> = (0..2 * n).map(|_| rng.gaussian_increment(2, h)).collect();
    let mut xc = x0.clone();
    for k in 0..n as usize {
        let dw: Vec<f64> = (0..2).map(|i| incs[2 * k][i] + incs[2 * k + 1][i]).collect();
        xc = em_step(&xc, &p.grad_vec(&xc), 2.0 * h, &dw);
    }
    assert_eq!(xc, c.x_coarse);

    let mut xf = x0.clone();
    evolve(&p, &mut xf, h, 2 * n, &mut RngStream::new(8, 1)).unwrap();
    assert_eq!(xf, c.x_fine);
}

#[test]
fn synchronous_contraction() {
    let p = Quadratic::new(1);
    let h = 0.01;
    for t in [1.0, 2.0, 4.0] {
        let n = (t / (2.0 * h)) as u64;
        let gaps: Vec<f64> = (0..10_000)
            .map(|i| {
                let c = simulate_coupled(&p, h, n, &[0.0], &[4.0], &mut RngStream::keyed(4, &[tag::PATH, i])).unwrap();
                // compare the two fine-grid paths: rerun from 4 with the fine step
                let mut y = vec![4.0];
                evolve(&p, &mut y, h, 2 * n, &mut RngStream::keyed(4, &[tag::PATH, i])).unwrap();
                (c.x_fine[0] - y[0]).powi(2)
            })
            .collect();
        let (m, _) = mean_var(&gaps);
        assert!(m <= (-2.0 * t).exp() * 16.0 * 1.1, "T = {t}: {m}");
    }
}

#[test]
fn divergence_is_reported() {
    let p = Quadratic::new(1);
    let cfg = PathConfig::new(3.0, 200, vec![1.0]).unwrap();
    match simulate_path(&p, &cfg, &mut RngStream::new(0, 0)) {
        Err(Error::Divergence { step, .. }) => assert!(step > 1 && step < 200),
        other => panic!("{other:?}"),
    }
}
