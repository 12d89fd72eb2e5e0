//! Spring-coupled fine/coarse paths with Girsanov reweighting.

use crate::error::{Error, Result};
use crate::langevin::{check_state, simulate_path, PathConfig};
use crate::mlmc::LevelSampler;
use crate::potentials::{Observable, Potential};
use crate::rng::{tag, RngStream};
use rayon::prelude::*;
use std::f64::consts::SQRT_2;
use std::sync::Arc;

/// Largest accepted log weight.
pub const MAX_LOG_WEIGHT: f64 = 700.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SpringConfig {
    /// Spring coefficient S.
    pub s: f64,
    /// Fine step h; the coarse path steps 2h.
    pub h: f64,
    /// Coarse steps N (the fine path takes 2N).
    pub n: u64,
    pub x0: Vec<f64>,
    /// Skip the S > lambda/2 check against the potential's metadata.
    pub override_lambda_check: bool,
}

impl SpringConfig {
    pub fn new(s: f64, h: f64, n: u64, x0: Vec<f64>) -> Self {
        SpringConfig { s, h, n, x0, override_lambda_check: false }
    }

    /// Default spring max(lambda, 1).
    pub fn default_spring(p: &dyn Potential) -> f64 {
        p.regularity().weak_osl_lambda.unwrap_or(1.0).max(1.0)
    }

    pub fn validate(&self, p: &dyn Potential) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::param("h", format!("step size must be positive, got {}", self.h)));
        }
        if !(self.s >= 0.0) || !self.s.is_finite() {
            return Err(Error::param("S", format!("spring must be nonnegative, got {}", self.s)));
        }
        if self.s * self.h >= 1.0 {
            return Err(Error::param("S", format!("need S*h < 1, got {}", self.s * self.h)));
        }
        if self.x0.len() != p.dim() {
            return Err(Error::param("x0", "start point dimension mismatch"));
        }
        if !self.override_lambda_check {
            match p.regularity().weak_osl_lambda {
                Some(lam) if lam > 0.0 && self.s <= lam / 2.0 => {
                    return Err(Error::param("S", format!("need S > lambda/2 = {}, got {}", lam / 2.0, self.s)));
                }
                Some(_) => {}
                None => {
                    return Err(Error::Regime(format!(
                        "{} declares no weak one-sided Lipschitz constant; set override_lambda_check",
                        p.name()
                    )))
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedLevelSample {
    /// phi(y^f) R^f - phi(y^c) R^c.
    pub delta: f64,
    pub log_rf: f64,
    pub log_rc: f64,
    pub grad_queries: u64,
    pub x_fine: Vec<f64>,
    pub x_coarse: Vec<f64>,
    /// max over even fine indices of |y^f - y^c|^2.
    pub max_sq_gap: f64,
}

impl WeightedLevelSample {
    pub fn recompute_delta(&self, phi: &Observable) -> f64 {
        phi.eval(&self.x_fine) * self.log_rf.exp() - phi.eval(&self.x_coarse) * self.log_rc.exp()
    }
}

/// log of the single-step Radon–Nikodym factor, -(sqrt2/2)<dW, S> - |S|^2 h / 4.
pub fn rn_step_log(dw: &[f64], spring: &[f64], h: f64) -> f64 {
    let mut ip = 0.0;
    let mut sq = 0.0;
    for (w, s) in dw.iter().zip(spring) {
        ip += w * s;
        sq += s * s;
    }
    -(SQRT_2 / 2.0) * ip - 0.25 * sq * h
}

fn check_weight(lr: f64, step: u64) -> Result<()> {
    if !(lr <= MAX_LOG_WEIGHT) {
        return Err(Error::WeightOverflow { step, log_weight: lr });
    }
    Ok(())
}

/// One level-l correction under the spring-coupled measure.
///
/// Draw order per coarse step matches `langevin::simulate_coupled`, so S = 0
/// reproduces the plain coupled pair bit for bit.
pub fn spring_level_sample(
    p: &dyn Potential,
    phi: &Observable,
    cfg: &SpringConfig,
    rng: &mut RngStream,
) -> Result<WeightedLevelSample> {
    cfg.validate(p)?;
    let d = cfg.x0.len();
    let (h, s) = (cfg.h, cfg.s);
    let h2 = 2.0 * h;
    let mut yf = cfg.x0.clone();
    let mut yc = cfg.x0.clone();
    let mut yc_mid = vec![0.0; d];
    let mut gf = vec![0.0; d];
    let mut gc = vec![0.0; d];
    let mut dw0 = vec![0.0; d];
    let mut dw1 = vec![0.0; d];
    let mut sf = vec![0.0; d];
    let mut sc = vec![0.0; d];
    let (mut lrf, mut lrc) = (0.0f64, 0.0f64);
    let mut max_gap: f64 = 0.0;
    for step in 0..cfg.n {
        rng.fill_increment(h, &mut dw0);
        rng.fill_increment(h, &mut dw1);
        p.grad(&yf, &mut gf);
        p.grad(&yc, &mut gc);
        let mut gap = 0.0;
        for i in 0..d {
            sf[i] = s * (yc[i] - yf[i]);
            sc[i] = s * (yf[i] - yc[i]);
            gap += (yf[i] - yc[i]) * (yf[i] - yc[i]);
        }
        max_gap = max_gap.max(gap);
        // odd index: both paths move with springs frozen at 2n
        lrf += rn_step_log(&dw0, &sf, h);
        for i in 0..d {
            yf[i] = yf[i] + (sf[i] - gf[i]) * h + SQRT_2 * dw0[i];
            yc_mid[i] = yc[i] + (sc[i] - gc[i]) * h + SQRT_2 * dw0[i];
        }
        // even index: fine spring refreshed, coarse spring and drift still frozen
        p.grad(&yf, &mut gf);
        for i in 0..d {
            sf[i] = s * (yc_mid[i] - yf[i]);
        }
        lrf += rn_step_log(&dw1, &sf, h);
        for i in 0..d {
            yf[i] = yf[i] + (sf[i] - gf[i]) * h + SQRT_2 * dw1[i];
            dw0[i] += dw1[i];
        }
        lrc += rn_step_log(&dw0, &sc, h2);
        for i in 0..d {
            yc[i] = yc[i] + (sc[i] - gc[i]) * h2 + SQRT_2 * dw0[i];
        }
        check_state(&yf, 2 * step + 2, "fine")?;
        check_state(&yc, step + 1, "coarse")?;
        check_weight(lrf, step + 1)?;
        check_weight(lrc, step + 1)?;
    }
    let gap: f64 = yf.iter().zip(&yc).map(|(a, b)| (a - b) * (a - b)).sum();
    max_gap = max_gap.max(gap);
    let delta = phi.eval(&yf) * lrf.exp() - phi.eval(&yc) * lrc.exp();
    if !delta.is_finite() {
        return Err(Error::Numeric(format!("level correction {delta}")));
    }
    Ok(WeightedLevelSample {
        delta,
        log_rf: lrf,
        log_rc: lrc,
        grad_queries: 3 * cfg.n,
        x_fine: yf,
        x_coarse: yc,
        max_sq_gap: max_gap,
    })
}

/// Rounds a horizon up to a multiple of h0, valid at every level of a spring sampler.
pub fn grid_horizon(t: f64, h0: f64) -> f64 {
    (t / h0 - 1e-9).ceil().max(0.0) * h0
}

/// Empirical Var(delta) at each fine step in `h_list`, horizon T.
pub fn spring_variance_scan(
    p: &dyn Potential,
    phi: &Observable,
    s: f64,
    h_list: &[f64],
    t: f64,
    x0: &[f64],
    n_pilot: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    if n_pilot < 1000 {
        return Err(Error::param("n_pilot", "variance scans need at least 1000 pilots"));
    }
    h_list
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            let n = coarse_steps(t, h)?;
            let cfg = SpringConfig { s, h, n, x0: x0.to_vec(), override_lambda_check: true };
            let deltas: Vec<f64> = (0..n_pilot as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RngStream::keyed(seed, &[tag::PILOT, 0x5C4A, k as u64, i]);
                    spring_level_sample(p, phi, &cfg, &mut rng).map(|w| w.delta)
                })
                .collect::<Result<_>>()?;
            Ok((h, crate::stats::mean_var(&deltas).1))
        })
        .collect()
}

/// N with 2 N h = T, or an error when T is off the grid.
pub fn coarse_steps(t: f64, h: f64) -> Result<u64> {
    let n = (t / (2.0 * h)).round();
    if (n * 2.0 * h - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::param("T", format!("horizon {t} is not a multiple of 2h = {}", 2.0 * h)));
    }
    Ok(n as u64)
}

/// Level sampler: level 0 is a plain EM path at h0; level l >= 1 is a
/// spring-coupled correction with fine step h0 2^-l.
#[derive(Clone)]
pub struct SpringSampler {
    pub potential: Arc<dyn Potential>,
    pub phi: Observable,
    pub s: f64,
    pub h0: f64,
    pub t: f64,
    pub x0: Vec<f64>,
}

impl SpringSampler {
    /// Builds a sampler with T rounded up to the h0 grid.
    pub fn new(potential: Arc<dyn Potential>, phi: Observable, s: f64, h0: f64, t: f64, x0: Vec<f64>) -> Result<Self> {
        if !(h0 > 0.0) {
            return Err(Error::param("h0", "base step must be positive"));
        }
        let cfg = SpringConfig::new(s, h0 / 2.0, 0, x0.clone());
        cfg.validate(potential.as_ref())?;
        Ok(SpringSampler { potential, phi, s, h0, t: grid_horizon(t, h0), x0 })
    }

    pub fn level_config(&self, level: usize) -> Result<SpringConfig> {
        let h = self.h0 * 0.5f64.powi(level as i32);
        let n = coarse_steps(self.t, h)?;
        Ok(SpringConfig { s: self.s, h, n, x0: self.x0.clone(), override_lambda_check: true })
    }
}

impl LevelSampler for SpringSampler {
    fn sample(&self, level: usize, rng: &mut RngStream) -> Result<(f64, u64)> {
        if level == 0 {
            let cfg = PathConfig::with_horizon(self.h0, self.t, self.x0.clone())?;
            let (x, q) = simulate_path(self.potential.as_ref(), &cfg, rng)?;
            return Ok((self.phi.eval(&x), q));
        }
        let w = spring_level_sample(self.potential.as_ref(), &self.phi, &self.level_config(level)?, rng)?;
        Ok((w.delta, w.grad_queries))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langevin::simulate_coupled;
    use crate::potentials::{Oscillatory, Quadratic, Zero};

    #[test]
    fn rn_step_values() {
        assert_eq!(rn_step_log(&[0.3, -0.2], &[0.0, 0.0], 0.1), 0.0);
        let v = rn_step_log(&[0.1], &[2.0], 0.01);
        assert!((v - (-0.15142135623730950)).abs() < 1e-15);
        let (s, h) = (1.7f64, 0.02);
        let dw = -(SQRT_2 / 4.0) * s * h;
        assert!(rn_step_log(&[dw], &[s], h).abs() < 1e-17);
    }

    #[test]
    fn s_zero_reduces_to_plain_coupling() {
        let p = Oscillatory::new(2);
        let phi = Observable::cos(0);
        let mut cfg = SpringConfig::new(0.0, 0.01, 150, vec![0.3, -0.4]);
        cfg.override_lambda_check = true;
        for k in 0..20 {
            let w = spring_level_sample(&p, &phi, &cfg, &mut RngStream::new(5, k)).unwrap();
            let c = simulate_coupled(&p, 0.01, 150, &cfg.x0, &cfg.x0, &mut RngStream::new(5, k)).unwrap();
            assert_eq!(w.log_rf, 0.0);
            assert_eq!(w.log_rc, 0.0);
            assert_eq!(w.x_fine, c.x_fine);
            assert_eq!(w.x_coarse, c.x_coarse);
            assert_eq!(w.delta.to_bits(), (phi.eval(&c.x_fine) - phi.eval(&c.x_coarse)).to_bits());
        }
    }

    #[test]
    fn n_zero_gives_zero_delta() {
        let p = Quadratic::new(1);
        let cfg = SpringConfig::new(1.0, 0.01, 0, vec![0.7]);
        let w = spring_level_sample(&p, &Observable::cos(0), &cfg, &mut RngStream::new(1, 1)).unwrap();
        assert_eq!(w.delta, 0.0);
        assert_eq!(w.grad_queries, 0);
    }

    #[test]
    fn queries_and_recompute() {
        let p = Oscillatory::new(2);
        let phi = Observable::tanh(0);
        let cfg = SpringConfig::new(2.0, 0.01, 100, vec![0.0, 0.0]);
        for k in 0..10 {
            let w = spring_level_sample(&p, &phi, &cfg, &mut RngStream::new(2, k)).unwrap();
            assert_eq!(w.grad_queries, 300);
            let r = w.recompute_delta(&phi);
            assert!((r - w.delta).abs() <= 1e-12 * w.delta.abs().max(1e-300));
            assert!(w.log_rf.is_finite() && w.log_rc.is_finite());
        }
    }

    #[test]
    fn validation() {
        let p = Oscillatory::new(2);
        assert!(SpringConfig::new(0.4, 0.01, 1, vec![0.0; 2]).validate(&p).is_err());
        assert!(SpringConfig::new(2.0, 0.6, 1, vec![0.0; 2]).validate(&p).is_err());
        assert!(SpringConfig::new(2.0, 0.01, 1, vec![0.0; 2]).validate(&p).is_ok());
        assert_eq!(SpringConfig::default_spring(&p), 1.0);
    }

    #[test]
    fn zero_potential_scan_is_flat() {
        let p = Zero::new(2);
        let v = spring_variance_scan(&p, &Observable::cos(0), 0.0, &[0.02, 0.01], 1.0, &[0.0, 0.0], 1000, 3).unwrap();
        for (_, var) in v {
            assert!(var < 1e-28);
        }
    }

    #[test]
    fn weight_guard() {
        assert!(check_weight(699.0, 3).is_ok());
        assert_eq!(check_weight(701.0, 3), Err(Error::WeightOverflow { step: 3, log_weight: 701.0 }));
        assert!(check_weight(f64::NAN, 3).is_err());
    }
}
