use langevin_mlmc::potentials::{check_gradient, CosineWell, Dataset, Oscillatory, Quadratic, StudentT, Welsch};
use langevin_mlmc::{make_potential, BuiltinSpec, Error, Observable, Potential};
use proptest::prelude::*;

fn in_ball(mut x: Vec<f64>, r: f64) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > r {
        x.iter_mut().for_each(|v| *v *= r / n);
    }
    x
}

#[test]
fn value_examples() {
    let o = Oscillatory::new(2);
    assert_eq!(o.value(&[0.0, 0.0]), -2.0);
    assert_eq!(o.grad_vec(&[0.0, 0.0]), vec![0.0, 0.0]);
    let t = StudentT::new(1, 3.0).unwrap();
    assert!((t.value(&[2.0]) - 3.2188758248682006).abs() < 1e-12);
    let q = Quadratic::new(3);
    assert_eq!(q.value(&[1.0, 2.0, 2.0]), 4.5);
    assert_eq!(q.grad_vec(&[1.0, 2.0, 2.0]), vec![1.0, 2.0, 2.0]);
    // second directional derivative of the oscillatory potential at x1 = pi
    let e = 1e-4;
    let f = |x: f64| o.value(&[x, 0.0]);
    let pi = std::f64::consts::PI;
    let d2 = (f(pi + e) - 2.0 * f(pi) + f(pi - e)) / (e * e);
    assert!((d2 + 1.0).abs() < 1e-6);
}

#[test]
fn gradient_check_examples() {
    assert!(check_gradient(&Quadratic::new(2), &[1.0, 1.0], 1e-5).unwrap() <= 1e-8);
    let w = Welsch::new(Dataset::new(vec![vec![1.0]], vec![0.0]).unwrap(), 1.0, 0.1).unwrap();
    assert!(check_gradient(&w, &[0.5], 1e-5).unwrap() <= 1e-5);
    let t = StudentT::new(3, 2.0).unwrap();
    assert!(check_gradient(&t, &[0.7, -1.2, 2.1], 1e-5).unwrap() <= 1e-5);
    assert!(matches!(check_gradient(&t, &[0.0; 3], 0.1), Err(Error::Parameter { .. })));
}

#[test]
fn parameter_domain_errors() {
    assert!(matches!(make_potential(&BuiltinSpec::RadialGauss { d: 2, a: 1.0 }), Err(Error::Parameter { .. })));
    assert!(matches!(make_potential(&BuiltinSpec::StudentT { d: 2, kappa: 0.0 }), Err(Error::Parameter { .. })));
    assert!(matches!(BuiltinSpec::by_name("banana", 2), Err(Error::UnknownPotential(_))));
}

#[test]
fn oscillatory_metadata() {
    let r = Oscillatory::new(2).regularity().clone();
    assert_eq!((r.smooth_l, r.hessian_l, r.weak_osl_lambda, r.dissipative), (Some(3.0), Some(2.0), Some(1.0), Some((0.5, 2.0))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradients_match_fd(x in prop::collection::vec(-5.0f64..5.0, 3)) {
        let x = in_ball(x, 5.0);
        for spec in BuiltinSpec::all_builtins(3) {
            let p = make_potential(&spec).unwrap();
            let err = check_gradient(p.as_ref(), &x, 1e-5).unwrap();
            prop_assert!(err <= 1e-5, "{}: {}", spec.name(), err);
        }
    }

    #[test]
    fn dissipativity_inequalities(x in prop::collection::vec(-5.0f64..5.0, 2)) {
        let x = in_ball(x, 5.0);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let inner = |p: &dyn Potential| p.grad_vec(&x).iter().zip(&x).map(|(g, v)| g * v).sum::<f64>();
        prop_assert!(inner(&Oscillatory::new(2)) >= 0.5 * r2 - 2.0 - 1e-12);
        let rg = make_potential(&BuiltinSpec::RadialGauss { d: 2, a: 2.0 }).unwrap();
        prop_assert!(inner(rg.as_ref()) >= r2 - 1e-12);
    }

    #[test]
    fn cosine_well_lipschitz(x in prop::collection::vec(-5.0f64..5.0, 2), y in prop::collection::vec(-5.0f64..5.0, 2)) {
        let p = CosineWell::new(2, 0.5).unwrap();
        let (gx, gy) = (p.grad_vec(&x), p.grad_vec(&y));
        let dg = gx.iter().zip(&gy).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dx = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dg <= 1.5 * dx + 1e-12);
    }

    #[test]
    fn observables_are_1_lipschitz(a in -10.0f64..10.0, b in -10.0f64..10.0) {
        for phi in [Observable::cos(0), Observable::tanh(0)] {
            prop_assert_eq!(phi.lipschitz_k(), 1.0);
            prop_assert!((phi.eval(&[a]) - phi.eval(&[b])).abs() <= (a - b).abs() + 1e-15);
        }
    }
}
