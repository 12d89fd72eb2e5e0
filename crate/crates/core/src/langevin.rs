//! Euler–Maruyama stepping for single paths and same-noise fine/coarse pairs.

use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::rng::RngStream;
use std::f64::consts::SQRT_2;

/// States with a coordinate beyond this magnitude abort the run.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// x - h g + sqrt(2) dW.
pub fn em_step(x: &[f64], g: &[f64], h: f64, dw: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    em_step_in_place(&mut y, g, h, dw);
    y
}

#[inline]
pub fn em_step_in_place(x: &mut [f64], g: &[f64], h: f64, dw: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i] - h * g[i] + SQRT_2 * dw[i];
    }
}

pub(crate) fn check_state(x: &[f64], step: u64, what: &str) -> Result<()> {
    for v in x {
        if !(v.abs() <= DIVERGENCE_BOUND) {
            return Err(Error::Divergence {
                step,
                context: format!("{what} state coordinate {v:e} beyond {DIVERGENCE_BOUND:e}"),
            });
        }
    }
    Ok(())
}

/// N steps of size h, optionally followed by one shorter step.
#[derive(Clone, Debug, PartialEq)]
pub struct PathConfig {
    pub h: f64,
    pub n_steps: u64,
    pub x0: Vec<f64>,
    /// Extra final step of length T - N h from the remainder rule.
    pub tail_step: Option<f64>,
}

impl PathConfig {
    pub fn new(h: f64, n_steps: u64, x0: Vec<f64>) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::param("h", format!("step size must be positive, got {h}")));
        }
        Ok(PathConfig { h, n_steps, x0, tail_step: None })
    }

    /// floor(T/h) steps of h, plus one step of T - N h when T/h is not integral.
    pub fn with_horizon(h: f64, t: f64, x0: Vec<f64>) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::param("T", format!("horizon must be nonnegative, got {t}")));
        }
        let mut cfg = PathConfig::new(h, 0, x0)?;
        let ratio = t / h;
        let n = (ratio + 1e-9).floor();
        cfg.n_steps = n as u64;
        let rem = t - n * h;
        if rem > 1e-12 * t.max(h) {
            cfg.tail_step = Some(rem);
        }
        Ok(cfg)
    }

    pub fn horizon(&self) -> f64 {
        self.h * self.n_steps as f64 + self.tail_step.unwrap_or(0.0)
    }

    pub fn grad_queries(&self) -> u64 {
        self.n_steps + self.tail_step.is_some() as u64
    }
}

/// Runs EM from `cfg.x0`; returns the endpoint and the gradient query count.
pub fn simulate_path(p: &dyn Potential, cfg: &PathConfig, rng: &mut RngStream) -> Result<(Vec<f64>, u64)> {
    let mut x = cfg.x0.clone();
    let q = evolve(p, &mut x, cfg.h, cfg.n_steps, rng)?;
    let mut queries = q;
    if let Some(hr) = cfg.tail_step {
        queries += evolve(p, &mut x, hr, 1, rng)?;
    }
    Ok((x, queries))
}

/// Advances `x` in place by `n` EM steps of size `h`.
pub fn evolve(p: &dyn Potential, x: &mut [f64], h: f64, n: u64, rng: &mut RngStream) -> Result<u64> {
    let d = x.len();
    let mut g = vec![0.0; d];
    let mut dw = vec![0.0; d];
    for step in 0..n {
        p.grad(x, &mut g);
        rng.fill_increment(h, &mut dw);
        em_step_in_place(x, &g, h, &dw);
        check_state(x, step + 1, "path")?;
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoupledEndpoints {
    pub x_fine: Vec<f64>,
    pub x_coarse: Vec<f64>,
    pub grad_queries: u64,
}

/// 2N fine steps of h and N coarse steps of 2h on shared noise.
///
/// Per coarse step the stream yields dW_{2n} then dW_{2n+1} (d draws each);
/// the coarse increment is their sum.
pub fn simulate_coupled(
    p: &dyn Potential,
    h: f64,
    n: u64,
    x0_fine: &[f64],
    x0_coarse: &[f64],
    rng: &mut RngStream,
) -> Result<CoupledEndpoints> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::param("h", format!("step size must be positive, got {h}")));
    }
    let d = x0_fine.len();
    let mut xf = x0_fine.to_vec();
    let mut xc = x0_coarse.to_vec();
    let mut g = vec![0.0; d];
    let mut dw0 = vec![0.0; d];
    let mut dw1 = vec![0.0; d];
    for step in 0..n {
        rng.fill_increment(h, &mut dw0);
        rng.fill_increment(h, &mut dw1);
        p.grad(&xf, &mut g);
        em_step_in_place(&mut xf, &g, h, &dw0);
        p.grad(&xf, &mut g);
        em_step_in_place(&mut xf, &g, h, &dw1);
        p.grad(&xc, &mut g);
        for i in 0..d {
            dw0[i] += dw1[i];
        }
        em_step_in_place(&mut xc, &g, 2.0 * h, &dw0);
        check_state(&xf, 2 * step + 2, "fine")?;
        check_state(&xc, step + 1, "coarse")?;
    }
    Ok(CoupledEndpoints { x_fine: xf, x_coarse: xc, grad_queries: 3 * n })
}
