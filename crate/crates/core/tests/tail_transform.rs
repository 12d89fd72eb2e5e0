use langevin_mlmc::langevin::{simulate_path, PathConfig};
use langevin_mlmc::potentials::{check_gradient, Quadratic, StudentT};
use langevin_mlmc::rng::{tag, RngStream};
use langevin_mlmc::tail_transform::*;
use langevin_mlmc::{make_potential, BuiltinSpec, Error, Potential};
use proptest::prelude::*;
use std::sync::Arc;

fn student(d: usize, kappa: f64) -> TransformedPotential {
    TransformedPotential::new(Arc::new(StudentT::new(d, kappa).unwrap()), TransformParams::default()).unwrap()
}

#[test]
fn chi_endpoint_derivatives() {
    assert_eq!(chi_poly(0.0), [1.0, 0.0, 0.0, 0.0]);
    assert_eq!(chi_poly(1.0), [0.0, 0.0, 0.0, 0.0]);
    for t in [0.1, 0.3, 0.45] {
        assert!((chi_poly(t)[0] + chi_poly(1.0 - t)[0] - 1.0).abs() < 1e-14);
    }
}

#[test]
fn inverse_examples() {
    let p = TransformParams::default();
    assert!((p.g_inverse(9f64.exp()).unwrap() - 3.0).abs() <= 1e-10);
    assert_eq!(p.h_map(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn f_h_gradient_matches_fd() {
    let tp = student(2, 3.0);
    let mut rng = RngStream::keyed(0, &[tag::TEST, 0x71]);
    for _ in 0..100 {
        let r = 0.1 + 3.9 * rng.uniform();
        let a = 2.0 * std::f64::consts::PI * rng.uniform();
        let x = [r * a.cos(), r * a.sin()];
        assert!(check_gradient(&tp, &x, 1e-5).unwrap() <= 1e-5, "{x:?}");
    }
}

#[test]
fn hessian_eigs_match_fd_hessian() {
    let tp = student(2, 3.0);
    let x = [3.0, 0.0];
    let e = 1e-5;
    let g = |x: [f64; 2]| tp.grad_vec(&x);
    let h11 = (g([3.0 + e, 0.0])[0] - g([3.0 - e, 0.0])[0]) / (2.0 * e);
    let h22 = (g([3.0, e])[1] - g([3.0, -e])[1]) / (2.0 * e);
    let (l1, l2) = tp.hessian_eigs(3.0).unwrap();
    assert!((l1 - h11).abs() <= 1e-5 * l1.abs().max(1.0), "{l1} {h11}");
    assert!((l2 - h22).abs() <= 1e-5 * l2.abs().max(1.0), "{l2} {h22}");
    assert_eq!(tp.value(&x), tp.value(&[0.0, 3.0]));
}

#[test]
fn log_jacobian_matches_fd_determinant() {
    let p = TransformParams::default();
    let e = 1e-6;
    for x in [[0.3, 0.4], [1.2, 0.5], [2.0, -1.5]] {
        let col = |i: usize| {
            let (mut a, mut b) = (x, x);
            a[i] += e;
            b[i] -= e;
            let (ha, hb) = (p.h_map(&a).unwrap(), p.h_map(&b).unwrap());
            [(ha[0] - hb[0]) / (2.0 * e), (ha[1] - hb[1]) / (2.0 * e)]
        };
        let (c0, c1) = (col(0), col(1));
        let det = c0[0] * c1[1] - c0[1] * c1[0];
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let lj = p.log_jacobian(r, 2).unwrap();
        assert!((det.ln() - lj).abs() <= 1e-6 * lj.abs().max(1.0), "{x:?}: {} {lj}", det.ln());
    }
}

#[test]
fn student_t_tail_limits() {
    let tp = student(3, 2.0);
    let rep = assumption_scan(&tp, &[10.0], ScanCandidates { l: 1e3, a: 1.0, b: 1.0 }).unwrap();
    assert!(rep.simplified);
    let row = rep.rows[0];
    assert!(row.dissipative > 0.9 * 2.0 * 2.0 * 100.0, "{}", row.dissipative);
    assert!(row.hess_rad.abs() < 1.0, "{}", row.hess_rad);
    assert!(matches!(assumption_scan(&tp, &[2.0], ScanCandidates { l: 1.0, a: 1.0, b: 1.0 }), Err(Error::Domain(_))));
}

#[test]
fn general_and_simplified_scans_agree() {
    // alpha = 0, beta = 2 takes the closed forms; nudging beta forces the general path.
    let base: Arc<dyn Potential> = Arc::new(StudentT::new(3, 2.0).unwrap());
    let a = TransformedPotential::new(base.clone(), TransformParams::default()).unwrap();
    let b = TransformedPotential::new(base, TransformParams { beta: 2.0 - 1e-12, ..TransformParams::default() }).unwrap();
    let c = ScanCandidates { l: 10.0, a: 1.0, b: 1.0 };
    let (ra, rb) = (assumption_scan(&a, &[3.0, 5.0], c).unwrap(), assumption_scan(&b, &[3.0, 5.0], c).unwrap());
    assert!(ra.simplified && !rb.simplified);
    for (x, y) in ra.rows.iter().zip(&rb.rows) {
        assert!((x.smooth_rad - y.smooth_rad).abs() < 1e-6 * x.smooth_rad.abs().max(1.0));
        assert!((x.dissipative - y.dissipative).abs() < 1e-6 * x.dissipative.abs());
        assert!((x.hess_rad - y.hess_rad).abs() < 1e-3 * x.hess_rad.abs().max(1.0), "{} {}", x.hess_rad, y.hess_rad);
    }
}

#[test]
fn isotropy_is_checked() {
    let p = make_potential(&BuiltinSpec::by_name("logistic_regression", 3).unwrap()).unwrap();
    assert!(matches!(TransformedPotential::new(p, TransformParams::default()), Err(Error::Isotropy(_))));
}

#[test]
fn zero_steps_maps_start() {
    let tp = student(2, 3.0);
    let y0 = [1.5, 0.5];
    let (x, q) = transformed_langevin_sample(&tp, 0.01, 0, &y0, &mut RngStream::new(0, 0)).unwrap();
    assert_eq!((x, q), (tp.params().h_map(&y0).unwrap(), 0));
}

/// With the identity region covering every visited state, transformed ULA is plain ULA.
#[test]
fn wide_identity_region_is_plain_ula() {
    let params = TransformParams::new(1.0, 0.0, 2.0, 100.0, 200.0).unwrap();
    let base: Arc<dyn Potential> = Arc::new(Quadratic::new(2));
    let tp = TransformedPotential::new(base.clone(), params).unwrap();
    let x0 = vec![0.5, -0.5];
    for i in 0..50 {
        let (a, _) = transformed_langevin_sample(&tp, 0.01, 300, &x0, &mut RngStream::new(4, i)).unwrap();
        let (b, _) = simulate_path(base.as_ref(), &PathConfig::new(0.01, 300, x0.clone()).unwrap(), &mut RngStream::new(4, i)).unwrap();
        assert_eq!(a, b);
    }
}

proptest! {
    #[test]
    fn h_round_trip(x in prop::collection::vec(-4.0f64..4.0, 3)) {
        let p = TransformParams::default();
        let back = p.h_inverse(&p.h_map(&x).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn g_is_increasing(r in 0.01f64..4.0) {
        let p = TransformParams::default();
        prop_assert!(p.g_deriv(r, 1).unwrap() > 0.0);
        prop_assert!(p.g_eval(r).unwrap() >= r * (1.0 - 1e-15));
    }
}
