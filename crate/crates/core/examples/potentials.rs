// Builtin potentials, their declared constants, and an FD gradient check.
use langevin_mlmc::potentials::check_gradient;
use langevin_mlmc::{make_potential, BuiltinSpec};

fn main() -> langevin_mlmc::Result<()> {
    for spec in BuiltinSpec::all_builtins(2) {
        let p = make_potential(&spec)?;
        let x = vec![0.7; p.dim()];
        let r = p.regularity();
        println!(
            "{:<26} d={} f(x)={:>9.4} fd_err={:.1e} L={:?} m={:?} lambda={:?} diss={:?}",
            p.name(),
            p.dim(),
            p.value(&x),
            check_gradient(p.as_ref(), &x, 1e-5)?,
            r.smooth_l,
            r.osl_m,
            r.weak_osl_lambda,
            r.dissipative
        );
    }
    Ok(())
}
