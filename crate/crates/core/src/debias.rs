//! Geometric-randomization debiasing and the time-shifted unbiased level sampler.

use crate::error::{Error, Result};
use crate::langevin::{evolve, simulate_coupled};
use crate::measure_change::{grid_horizon, SpringSampler};
use crate::mlmc::{
    allocate_classical, bias_level, draw_level, estimate_level_stats_counted, extrapolated, fit_k1, fit_rates,
    mlmc_estimate_ns, CostReport, LevelCost, LevelSampler, LevelStats,
};
use crate::potentials::{Observable, Potential};
use crate::rng::{tag, RngStream};
use crate::stats::mean_var;
use rayon::prelude::*;
use std::sync::Arc;

/// A procedure returning an estimate with RMSE at most `sigma`, plus its query count.
pub trait BiasedProcedure: Sync {
    fn run(&self, sigma: f64, rng: &mut RngStream) -> Result<(f64, u64)>;
}

impl<F> BiasedProcedure for F
where
    F: Fn(f64, &mut RngStream) -> Result<(f64, u64)> + Sync,
{
    fn run(&self, sigma: f64, rng: &mut RngStream) -> Result<(f64, u64)> {
        self(sigma, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeomDebiasConfig {
    pub rho: f64,
    pub m: f64,
    pub sigma_tilde: f64,
    pub j_cap: u32,
    /// Cost exponent p of the wrapped procedure; rho must lie in (1/2, 1/p).
    pub p: f64,
}

impl GeomDebiasConfig {
    pub fn new(rho: f64, m: f64, sigma_tilde: f64, j_cap: u32) -> Result<Self> {
        let c = GeomDebiasConfig { rho, m, sigma_tilde, j_cap, p: 1.0 };
        c.validate()?;
        Ok(c)
    }

    /// rho = 3/4, M = 8, j_cap = 64.
    pub fn with_sigma(sigma_tilde: f64) -> Result<Self> {
        Self::new(0.75, 8.0, sigma_tilde, 64)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.5 && self.rho < 1.0 / self.p) {
            return Err(Error::param("rho", format!("need 1/2 < rho < 1/p = {}, got {}", 1.0 / self.p, self.rho)));
        }
        let need = 2.0 + 16.0 / (1.0 - 2f64.powf(1.0 - 2.0 * self.rho));
        if !(self.m * self.m > need) {
            return Err(Error::param("M", format!("need M^2 > {need}, got {}", self.m * self.m)));
        }
        if !(self.sigma_tilde > 0.0) || !self.sigma_tilde.is_finite() {
            return Err(Error::param("sigma_tilde", "must be positive"));
        }
        if self.j_cap == 0 {
            return Err(Error::param("j_cap", "must be at least 1"));
        }
        Ok(())
    }

    /// Accuracy requested from the k-th procedure call.
    pub fn sigma_at(&self, k: u32) -> f64 {
        2f64.powf(-self.rho * k as f64) * self.sigma_tilde / self.m
    }
}

/// j >= 1 with P[j = k] = 2^-k, from trailing zeros of uniform words.
pub fn geom_draw(rng: &mut RngStream, j_cap: u32) -> Result<u32> {
    let mut j: u32 = 0;
    loop {
        let u = rng.next_u64();
        if u != 0 {
            j = j.saturating_add(u.trailing_zeros() + 1);
            break;
        }
        j = j.saturating_add(64);
    }
    if j > j_cap {
        return Err(Error::JCap { j, cap: j_cap });
    }
    Ok(j)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DebiasDraw {
    pub value: f64,
    pub queries: u64,
    pub j: u32,
}

/// mu_0 + 2^j (mu_j - mu_{j-1}); the three calls use independent child streams.
pub fn geom_debias(proc_: &dyn BiasedProcedure, cfg: &GeomDebiasConfig, rng: &mut RngStream) -> Result<DebiasDraw> {
    cfg.validate()?;
    let j = geom_draw(rng, cfg.j_cap)?;
    let (m0, q0) = proc_.run(cfg.sigma_at(0), &mut rng.child(0))?;
    let (mj, qj) = proc_.run(cfg.sigma_at(j), &mut rng.child(1))?;
    let (mjm, qjm) = proc_.run(cfg.sigma_at(j - 1), &mut rng.child(2))?;
    let value = m0 + 2f64.powi(j as i32) * (mj - mjm);
    Ok(DebiasDraw { value, queries: q0 + qj + qjm, j })
}

/// Affine horizon schedule T_l = T0 + slope l.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSchedule {
    pub t0: f64,
    pub slope: f64,
}

impl TimeSchedule {
    /// A zero slope is accepted for structural checks.
    pub fn new(t0: f64, slope: f64) -> Result<Self> {
        if !(t0 > 0.0) || !t0.is_finite() {
            return Err(Error::param("T0", "must be positive"));
        }
        if !(slope >= 0.0) || !slope.is_finite() {
            return Err(Error::param("slope", "must be nonnegative"));
        }
        Ok(TimeSchedule { t0, slope })
    }

    /// slope = 4 ln 2 / m_hat.
    pub fn from_contraction(t0: f64, m_hat: f64) -> Result<Self> {
        if !(m_hat > 0.0) {
            return Err(Error::param("m_hat", "contraction estimate must be positive"));
        }
        Self::new(t0, 4.0 * std::f64::consts::LN_2 / m_hat)
    }

    pub fn horizon(&self, level: usize) -> f64 {
        self.t0 + self.slope * level as f64
    }

    /// ceil(T_l / h0): T_l is rounded up to the h0 grid so the telescoping sum stays exact.
    pub fn grid_steps(&self, level: usize, h0: f64) -> u64 {
        (self.horizon(level) / h0 - 1e-9).ceil().max(0.0) as u64
    }
}

/// One draw of P_0 (l = 0) or P_l - P_{l-1} for the one-sided Lipschitz regime.
pub fn unbiased_level_sample_osl(
    p: &dyn Potential,
    phi: &Observable,
    level: usize,
    h0: f64,
    sched: &TimeSchedule,
    x0: &[f64],
    rng: &mut RngStream,
) -> Result<(f64, u64)> {
    if p.regularity().osl_m.is_none() {
        return Err(Error::Regime(format!("{} has no one-sided Lipschitz constant m", p.name())));
    }
    if !(h0 > 0.0) {
        return Err(Error::param("h0", "base step must be positive"));
    }
    let mut x = x0.to_vec();
    if level == 0 {
        let q = evolve(p, &mut x, h0, sched.grid_steps(0, h0), rng)?;
        return Ok((phi.eval(&x), q));
    }
    let h = h0 * 0.5f64.powi(level as i32);
    let n_fine = sched.grid_steps(level, h0) << level;
    let n_coarse = sched.grid_steps(level - 1, h0) << (level - 1);
    let pre = n_fine - 2 * n_coarse;
    let q_pre = evolve(p, &mut x, h, pre, rng)?;
    let c = simulate_coupled(p, h, n_coarse, &x, x0, rng)?;
    Ok((phi.eval(&c.x_fine) - phi.eval(&c.x_coarse), q_pre + c.grad_queries))
}

#[derive(Clone)]
pub struct OslSampler {
    pub potential: Arc<dyn Potential>,
    pub phi: Observable,
    pub h0: f64,
    pub schedule: TimeSchedule,
    pub x0: Vec<f64>,
}

impl LevelSampler for OslSampler {
    fn sample(&self, level: usize, rng: &mut RngStream) -> Result<(f64, u64)> {
        unbiased_level_sample_osl(self.potential.as_ref(), &self.phi, level, self.h0, &self.schedule, &self.x0, rng)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnbiasedMethod {
    Osl,
    Dissipative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnbiasedConfig {
    pub debias: GeomDebiasConfig,
    pub h0: f64,
    pub x0: Vec<f64>,
    /// osl: horizon schedule.
    pub schedule: TimeSchedule,
    pub n_pilot: u64,
    /// dissipative: spring coefficient, horizon T(sigma) = t_base + c_t ln(1/sigma).
    pub spring: f64,
    pub t_base: f64,
    pub c_t: f64,
    /// dissipative: levels measured by the pilot.
    pub pilot_levels: usize,
    /// dissipative: hard ceiling on the bias level L(sigma).
    pub max_level: usize,
}

impl UnbiasedConfig {
    pub fn new(sigma_tilde: f64, h0: f64, x0: Vec<f64>) -> Result<Self> {
        Ok(UnbiasedConfig {
            debias: GeomDebiasConfig::with_sigma(sigma_tilde)?,
            h0,
            x0,
            schedule: TimeSchedule::from_contraction(4.0, 1.0)?,
            n_pilot: 1000,
            spring: 2.0,
            t_base: 4.0,
            c_t: 0.5,
            pilot_levels: 4,
            max_level: 10,
        })
    }
}

/// Unbiased estimate of E_pi[phi].
///
/// `Osl` averages n independent single-term draws Z = P_0 + 2^J (P_J - P_{J-1}),
/// J ~ Geom(1/2), with n set from a pilot so that Var(mean) <= sigma_tilde^2.
/// `Dissipative` returns one `geom_debias` draw around a spring-coupled MLMC at
/// horizon T(sigma).
pub fn unbiased_gibbs_estimate(
    p: Arc<dyn Potential>,
    phi: &Observable,
    method: UnbiasedMethod,
    cfg: &UnbiasedConfig,
    seed: u64,
) -> Result<UnbiasedReport> {
    cfg.debias.validate()?;
    match method {
        UnbiasedMethod::Osl => osl_estimate(p, phi, cfg, seed),
        UnbiasedMethod::Dissipative => dissipative_estimate(p, phi, cfg, seed),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnbiasedReport {
    pub report: CostReport,
    /// Gradient queries spent on pilots (not in `report.classical_queries`).
    pub pilot_queries: u64,
    /// Outer draws averaged (osl) or the geometric index j (dissipative).
    pub n_outer: u64,
    pub j_drawn: Option<u32>,
}

struct OslDraw {
    z: f64,
    j: u32,
    p0: f64,
    delta: f64,
    queries: u64,
}

fn osl_single_term(s: &OslSampler, j_cap: u32, rng: &mut RngStream) -> Result<OslDraw> {
    let j = geom_draw(rng, j_cap)?;
    let (p0, q0) = s.sample(0, &mut rng.child(0))?;
    let (delta, qj) = s.sample(j as usize, &mut rng.child(1))?;
    Ok(OslDraw { z: p0 + 2f64.powi(j as i32) * delta, j, p0, delta, queries: q0 + qj })
}

fn osl_draws(s: &OslSampler, j_cap: u32, n: u64, seed: u64, ns: u64) -> Result<Vec<OslDraw>> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::keyed(seed, &[ns, 0x051, i]);
            osl_single_term(s, j_cap, &mut rng).map_err(|e| match e {
                Error::JCap { .. } => e,
                e => Error::Sample { level: 0, index: i, source: Box::new(e) },
            })
        })
        .collect()
}

fn osl_estimate(p: Arc<dyn Potential>, phi: &Observable, cfg: &UnbiasedConfig, seed: u64) -> Result<UnbiasedReport> {
    if p.regularity().osl_m.is_none() {
        return Err(Error::Regime(format!("method osl needs a one-sided Lipschitz constant; {} has none", p.name())));
    }
    let s = OslSampler { potential: p, phi: phi.clone(), h0: cfg.h0, schedule: cfg.schedule, x0: cfg.x0.clone() };
    let cap = cfg.debias.j_cap;
    let pilot = osl_draws(&s, cap, cfg.n_pilot.max(2), seed, tag::PILOT)?;
    let pilot_queries = pilot.iter().map(|d| d.queries).sum();
    let (_, vz) = mean_var(&pilot.iter().map(|d| d.z).collect::<Vec<_>>());
    let sig2 = cfg.debias.sigma_tilde * cfg.debias.sigma_tilde;
    let n_outer = ((vz / sig2).ceil() as u64).max(2);
    let draws = osl_draws(&s, cap, n_outer, seed, tag::PRODUCTION)?;
    let zs: Vec<f64> = draws.iter().map(|d| d.z).collect();
    let (est, var_z) = mean_var(&zs);
    let total: u64 = draws.iter().map(|d| d.queries).sum();
    let max_j = draws.iter().map(|d| d.j).max().unwrap_or(1) as usize;
    let mut per_level = Vec::new();
    for level in 0..=max_j {
        let vals: Vec<f64> = if level == 0 {
            draws.iter().map(|d| d.p0).collect()
        } else {
            draws.iter().filter(|d| d.j as usize == level).map(|d| d.delta).collect()
        };
        if vals.is_empty() {
            continue;
        }
        let (m, v) = mean_var(&vals);
        per_level.push(LevelCost { level, n_or_sigma: vals.len() as f64, mean: m, variance: v, queries: f64::NAN });
    }
    let mean_cost = total as f64 / n_outer as f64;
    let report = CostReport {
        estimate: est,
        est_variance: var_z / n_outer as f64,
        classical_queries: total,
        quantum_model_queries: var_z.sqrt() / cfg.debias.sigma_tilde * mean_cost,
        per_level,
    };
    Ok(UnbiasedReport { report, pilot_queries, n_outer, j_drawn: None })
}

/// Spring MLMC with RMSE about sigma at horizon T(sigma), budgeted from one pilot.
struct SpringMlmc {
    potential: Arc<dyn Potential>,
    phi: Observable,
    cfg: UnbiasedConfig,
    pilot: LevelStats,
    t_ref: f64,
    k1: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    seed: u64,
}

impl SpringMlmc {
    fn horizon(&self, sigma: f64) -> f64 {
        grid_horizon(self.cfg.t_base + self.cfg.c_t * (1.0 / sigma).ln().max(0.0), self.cfg.h0)
    }
}

impl BiasedProcedure for SpringMlmc {
    fn run(&self, sigma: f64, rng: &mut RngStream) -> Result<(f64, u64)> {
        let t = self.horizon(sigma);
        let sampler =
            SpringSampler::new(self.potential.clone(), self.phi.clone(), self.cfg.spring, self.cfg.h0, t, self.cfg.x0.clone())?;
        let big_l = bias_level(self.k1, self.alpha, sigma).min(self.cfg.max_level);
        let mut st = extrapolated(&self.pilot, self.beta, self.gamma, big_l);
        st.levels.truncate(big_l + 1);
        for l in st.levels.iter_mut() {
            l.mean_cost *= t / self.t_ref;
        }
        let n = allocate_classical(&st, sigma)?;
        let r = mlmc_estimate_ns(&sampler, &n, self.seed, &[tag::DEBIAS, rng.stream_id()])?;
        Ok((r.estimate, r.classical_queries))
    }
}

fn dissipative_estimate(p: Arc<dyn Potential>, phi: &Observable, cfg: &UnbiasedConfig, seed: u64) -> Result<UnbiasedReport> {
    if p.regularity().dissipative.is_none() {
        return Err(Error::Regime(format!("method dissipative needs dissipativity metadata; {} has none", p.name())));
    }
    let sig0 = cfg.debias.sigma_at(0);
    let proto = SpringMlmc {
        potential: p.clone(),
        phi: phi.clone(),
        cfg: cfg.clone(),
        pilot: LevelStats::default(),
        t_ref: 0.0,
        k1: 0.0,
        alpha: 1.0,
        beta: 2.0,
        gamma: 1.0,
        seed,
    };
    let t_ref = proto.horizon(sig0);
    let sampler = SpringSampler::new(p.clone(), phi.clone(), cfg.spring, cfg.h0, t_ref, cfg.x0.clone())?;
    let levels = cfg.pilot_levels.max(1);
    let (pilot, pilot_queries) = estimate_level_stats_counted(&sampler, 0..levels, cfg.n_pilot.max(2), seed)?;
    let (mut alpha, mut beta, mut gamma, mut k1) = (1.0, 2.0, 1.0, 0.0);
    if levels >= 4 {
        if let Ok(f) = fit_rates(&pilot, 1..levels) {
            beta = f.beta.clamp(0.5, 4.0);
            gamma = f.gamma.clamp(0.5, 2.0);
            if f.alpha.is_finite() {
                alpha = f.alpha.clamp(0.5, 4.0);
            }
        }
    }
    if levels >= 2 {
        k1 = fit_k1(&pilot, alpha, 1..levels);
    }
    let proc_ = SpringMlmc { pilot, t_ref, k1, alpha, beta, gamma, ..proto };
    let mut rng = RngStream::keyed(seed, &[tag::DEBIAS]);
    let d = geom_debias(&proc_, &cfg.debias, &mut rng)?;
    let report = CostReport {
        estimate: d.value,
        est_variance: cfg.debias.sigma_tilde * cfg.debias.sigma_tilde,
        classical_queries: d.queries,
        quantum_model_queries: f64::NAN,
        per_level: vec![LevelCost {
            level: d.j as usize,
            n_or_sigma: cfg.debias.sigma_at(d.j),
            mean: d.value,
            variance: f64::NAN,
            queries: d.queries as f64,
        }],
    };
    Ok(UnbiasedReport { report, pilot_queries, n_outer: 1, j_drawn: Some(d.j) })
}

/// Level-l draws of the osl sampler, exposed for rate checks.
pub fn osl_level_draws(s: &OslSampler, level: usize, n: u64, seed: u64) -> Result<Vec<(f64, u64)>> {
    draw_level(s, level, n, seed, &[tag::PILOT])
}
