//! Potentials f with hand-coded gradients, their regularity metadata, and observables.

mod builtin;
mod data;
mod observable;

pub use builtin::{CosineWell, Oscillatory, Quadratic, RadialGauss, StudentT, Zero};
pub use data::{Dataset, GaussianMixtureLogistic, LogisticRegression, Welsch};
pub use observable::Observable;

use crate::error::{Error, Result};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Declared regularity constants. `None` means the property is not claimed.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RegularityInfo {
    pub smooth_l: Option<f64>,
    pub hessian_l: Option<f64>,
    pub osl_m: Option<f64>,
    pub weak_osl_lambda: Option<f64>,
    /// (a, b) with <x, grad f(x)> >= a|x|^2 - b.
    pub dissipative: Option<(f64, f64)>,
    /// |grad f(0)|, recorded but not bounded.
    pub grad_norm_at_origin: f64,
}

/// Radial profile of an isotropic potential, f(x) = F(|x|).
pub trait RadialProfile: Send + Sync {
    fn value(&self, r: f64) -> f64;
    /// (F'(r), F''(r), F'''(r)).
    fn derivs(&self, r: f64) -> [f64; 3];
    /// (s F'(s), s^2 F''(s), s^3 F'''(s)); override when large s needs care.
    fn scaled_derivs(&self, s: f64) -> [f64; 3] {
        let [d1, d2, d3] = self.derivs(s);
        [s * d1, s * s * d2, s * s * s * d3]
    }
}

pub trait Potential: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Writes grad f(x) into `out`.
    fn grad(&self, x: &[f64], out: &mut [f64]);
    fn regularity(&self) -> &RegularityInfo;
    /// Analytic radial profile, for isotropic builtins.
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        None
    }

    fn grad_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.grad(x, &mut g);
        g
    }
}

/// Named builtin with parameters.
#[derive(Clone, Debug)]
pub enum BuiltinSpec {
    Quadratic { d: usize },
    Oscillatory { d: usize },
    RadialGauss { d: usize, a: f64 },
    StudentT { d: usize, kappa: f64 },
    LogisticRegression { data: Dataset, lambda: Vec<Vec<f64>> },
    GaussianMixtureLogistic { data: Dataset, means: Vec<Vec<f64>>, weights: Vec<f64>, lambda: Vec<Vec<f64>> },
    Welsch { data: Dataset, sigma: f64, lambda0: f64 },
    CosineWell { d: usize, lambda0: f64 },
    Zero { d: usize },
}

impl BuiltinSpec {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltinSpec::Quadratic { .. } => "quadratic",
            BuiltinSpec::Oscillatory { .. } => "oscillatory",
            BuiltinSpec::RadialGauss { .. } => "radial_gauss",
            BuiltinSpec::StudentT { .. } => "student_t",
            BuiltinSpec::LogisticRegression { .. } => "logistic_regression",
            BuiltinSpec::GaussianMixtureLogistic { .. } => "gaussian_mixture_logistic",
            BuiltinSpec::Welsch { .. } => "welsch",
            BuiltinSpec::CosineWell { .. } => "cosine_well",
            BuiltinSpec::Zero { .. } => "zero",
        }
    }

    /// Default instance of a named builtin in dimension `d`.
    /// Data-driven potentials use the shipped synthetic dataset (d = 3).
    pub fn by_name(name: &str, d: usize) -> Result<BuiltinSpec> {
        let eye = |d: usize, s: f64| -> Vec<Vec<f64>> {
            (0..d).map(|i| (0..d).map(|j| if i == j { s } else { 0.0 }).collect()).collect()
        };
        Ok(match name {
            "quadratic" => BuiltinSpec::Quadratic { d },
            "oscillatory" => BuiltinSpec::Oscillatory { d },
            "radial_gauss" => BuiltinSpec::RadialGauss { d, a: 2.0 },
            "student_t" => BuiltinSpec::StudentT { d, kappa: 3.0 },
            "logistic_regression" => BuiltinSpec::LogisticRegression { data: Dataset::synthetic(0), lambda: eye(3, 1.0) },
            "gaussian_mixture_logistic" => BuiltinSpec::GaussianMixtureLogistic {
                data: Dataset::synthetic(0),
                means: vec![vec![1.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0]],
                weights: vec![0.5, 0.5],
                lambda: eye(3, 1.0),
            },
            "welsch" => BuiltinSpec::Welsch { data: Dataset::synthetic(0), sigma: 1.0, lambda0: 0.5 },
            "cosine_well" => BuiltinSpec::CosineWell { d, lambda0: 0.5 },
            "zero" => BuiltinSpec::Zero { d },
            other => return Err(Error::UnknownPotential(other.to_string())),
        })
    }

    /// The eight named builtins at default parameters.
    pub fn all_builtins(d: usize) -> Vec<BuiltinSpec> {
        [
            "quadratic",
            "oscillatory",
            "radial_gauss",
            "student_t",
            "logistic_regression",
            "gaussian_mixture_logistic",
            "welsch",
            "cosine_well",
        ]
        .iter()
        .map(|n| BuiltinSpec::by_name(n, d).unwrap())
        .collect()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be positive"));
    }
    Ok(())
}

pub fn make_potential(spec: &BuiltinSpec) -> Result<Arc<dyn Potential>> {
    Ok(match spec.clone() {
        BuiltinSpec::Quadratic { d } => {
            check_dim(d)?;
            Arc::new(Quadratic::new(d))
        }
        BuiltinSpec::Oscillatory { d } => {
            check_dim(d)?;
            Arc::new(Oscillatory::new(d))
        }
        BuiltinSpec::RadialGauss { d, a } => {
            check_dim(d)?;
            Arc::new(RadialGauss::new(d, a)?)
        }
        BuiltinSpec::StudentT { d, kappa } => {
            check_dim(d)?;
            Arc::new(StudentT::new(d, kappa)?)
        }
        BuiltinSpec::LogisticRegression { data, lambda } => Arc::new(LogisticRegression::new(data, lambda)?),
        BuiltinSpec::GaussianMixtureLogistic { data, means, weights, lambda } => {
            Arc::new(GaussianMixtureLogistic::new(data, means, weights, lambda)?)
        }
        BuiltinSpec::Welsch { data, sigma, lambda0 } => Arc::new(Welsch::new(data, sigma, lambda0)?),
        BuiltinSpec::CosineWell { d, lambda0 } => {
            check_dim(d)?;
            Arc::new(CosineWell::new(d, lambda0)?)
        }
        BuiltinSpec::Zero { d } => {
            check_dim(d)?;
            Arc::new(Zero::new(d))
        }
    })
}

/// Max over coordinates of |central FD - grad_i| / max(1, |grad|).
pub fn check_gradient(p: &dyn Potential, x: &[f64], fd_step: f64) -> Result<f64> {
    if !(fd_step > 0.0 && fd_step <= 1e-2) {
        return Err(Error::param("fd_step", "must lie in (0, 1e-2]"));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite point".into()));
    }
    let g = p.grad_vec(x);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite gradient".into()));
    }
    let scale = norm(&g).max(1.0);
    let mut xp = x.to_vec();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        xp[i] = x[i] + fd_step;
        let fp = p.value(&xp);
        xp[i] = x[i] - fd_step;
        let fm = p.value(&xp);
        xp[i] = x[i];
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::Numeric(format!("non-finite value near coordinate {i}")));
        }
        let fd = (fp - fm) / (2.0 * fd_step);
        worst = worst.max((fd - g[i]).abs() / scale);
    }
    Ok(worst)
}

/// Wraps a potential and counts gradient calls.
pub struct CountingPotential {
    inner: Arc<dyn Potential>,
    calls: AtomicU64,
}

impl CountingPotential {
    pub fn new(inner: Arc<dyn Potential>) -> Self {
        CountingPotential { inner, calls: AtomicU64::new(0) }
    }

    pub fn grad_calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl Potential for CountingPotential {
    fn name(&self) -> &str {
        self.inner.name()
    }
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.grad(x, out)
    }
    fn regularity(&self) -> &RegularityInfo {
        self.inner.regularity()
    }
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        self.inner.radial_profile()
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn origin_grad_norm(p: &dyn Potential) -> f64 {
    norm(&p.grad_vec(&vec![0.0; p.dim()]))
}
