//! Experiment orchestration behind the `lmc` binary.
//!
//! Every entry point takes a parsed [`ExperimentConfig`] and an output
//! directory, runs inside a rayon pool of `threads` workers and writes
//! deterministic CSV files there.

pub mod config;
pub mod report;

pub use config::{Coupling, ExperimentConfig, Method};
pub use report::{ReportRow, Summary};

use crate::debias::{unbiased_gibbs_estimate, OslSampler, UnbiasedMethod};
use crate::error::{Error, Result};
use crate::langevin::{simulate_path, PathConfig};
use crate::measure_change::{grid_horizon, spring_level_sample, SpringConfig, SpringSampler};
use crate::mlmc::{
    allocate_classical, allocate_quantum_model, estimate_level_stats_counted, fit_k1, fit_rates, mlmc_estimate,
    CoupledSampler, LevelSampler, LevelStats, RateFit,
};
use crate::potentials::{check_gradient, make_potential, norm, CountingPotential, Observable, Potential};
use crate::rng::{stream_id, tag, RngStream};
use crate::stats::{ks_statistic, mean_var, student_t_gibbs_cdf, weighted_ks_statistic};
use crate::tail_transform::{assumption_scan, chi_poly, AssumptionReport, TransformParams, TransformedPotential};
use rayon::prelude::*;
use report::{fmt_f64, ReplicationSummary};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;
    pool.install(f)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), text)?;
    Ok(())
}

/// Builds the level sampler the config asks for.
pub fn level_sampler(cfg: &ExperimentConfig, p: Arc<dyn Potential>, phi: Observable) -> Result<Box<dyn LevelSampler>> {
    let x0 = cfg.start();
    Ok(match (cfg.method, cfg.coupling) {
        (Method::UnbiasedOsl, _) => {
            Box::new(OslSampler { potential: p, phi, h0: cfg.h, schedule: cfg.schedule()?, x0 })
        }
        (Method::Mlmc | Method::QamlmcModel, Coupling::Plain) => Box::new(CoupledSampler::new(p, phi, cfg.h, cfg.t, x0)?),
        (Method::Mlmc | Method::QamlmcModel, Coupling::Spring) => {
            if cfg.override_lambda_check {
                SpringConfig { override_lambda_check: true, ..SpringConfig::new(cfg.spring, cfg.h / 2.0, 0, x0.clone()) }
                    .validate(p.as_ref())?;
                Box::new(SpringSampler { potential: p, phi, s: cfg.spring, h0: cfg.h, t: grid_horizon(cfg.t, cfg.h), x0 })
            } else {
                Box::new(SpringSampler::new(p, phi, cfg.spring, cfg.h, cfg.t, x0)?)
            }
        }
        (m, _) => return Err(Error::config("method", format!("{} has no level sampler", m.name()))),
    })
}

struct Once {
    estimate: f64,
    est_variance: f64,
    rows: Vec<ReportRow>,
    grad_queries: u64,
    quantum: f64,
}

fn row(method: Method, level: usize, n_or_sigma: f64, mean: f64, variance: f64, q: u64, qm: f64) -> ReportRow {
    ReportRow {
        method: method.name().into(),
        level,
        n_or_sigma,
        mean,
        variance,
        cost_grad_queries: q,
        quantum_model_queries: qm,
        wall_seconds: 0.0,
    }
}

/// Endpoints of `chains` independent EM chains on `p`, in chain order.
pub fn ula_endpoints(p: &dyn Potential, h: f64, t: f64, x0: &[f64], chains: u64, seed: u64) -> Result<(Vec<Vec<f64>>, u64)> {
    let pc = PathConfig::with_horizon(h, t, x0.to_vec())?;
    let out: Vec<(Vec<f64>, u64)> = (0..chains)
        .into_par_iter()
        .map(|i| simulate_path(p, &pc, &mut RngStream::keyed(seed, &[tag::PATH, i])))
        .collect::<Result<_>>()?;
    let q = out.iter().map(|o| o.1).sum();
    Ok((out.into_iter().map(|o| o.0).collect(), q))
}

/// Transformed ULA: `n_steps` EM steps on f_h from h^{-1}(x0), mapped through h.
pub fn transformed_ula_endpoints(
    tp: &TransformedPotential,
    h: f64,
    n_steps: u64,
    x0: &[f64],
    chains: u64,
    seed: u64,
) -> Result<(Vec<Vec<f64>>, u64)> {
    let y0 = tp.params().h_inverse(x0)?;
    let out: Vec<(Vec<f64>, u64)> = (0..chains)
        .into_par_iter()
        .map(|i| {
            crate::tail_transform::transformed_langevin_sample(tp, h, n_steps, &y0, &mut RngStream::keyed(seed, &[tag::CHAIN, i]))
        })
        .collect::<Result<_>>()?;
    let q = out.iter().map(|o| o.1).sum();
    Ok((out.into_iter().map(|o| o.0).collect(), q))
}

/// Fine endpoints of the spring-coupled pair with their log weights log R^f.
/// Weighted by exp(log R^f) they are draws of plain EM at step `cfg.h` after 2N steps.
pub fn spring_fine_endpoints(p: &dyn Potential, cfg: &SpringConfig, chains: u64, seed: u64) -> Result<(Vec<(Vec<f64>, f64)>, u64)> {
    let phi = Observable::constant(0.0);
    let out: Vec<_> = (0..chains)
        .into_par_iter()
        .map(|i| spring_level_sample(p, &phi, cfg, &mut RngStream::keyed(seed, &[tag::CHAIN, i])))
        .collect::<Result<_>>()?;
    let q = out.iter().map(|w| w.grad_queries).sum();
    Ok((out.into_iter().map(|w| (w.x_fine, w.log_rf)).collect(), q))
}

fn run_once(cfg: &ExperimentConfig, p: Arc<dyn Potential>, phi: &Observable, seed: u64) -> Result<Once> {
    let m = cfg.method;
    match m {
        Method::Mc => {
            let (xs, q) = ula_endpoints(p.as_ref(), cfg.h, cfg.t, &cfg.start(), cfg.mc_n, seed)?;
            let vals: Vec<f64> = xs.iter().map(|x| phi.eval(x)).collect();
            let (mean, var) = mean_var(&vals);
            Ok(Once {
                estimate: mean,
                est_variance: var / vals.len() as f64,
                rows: vec![row(m, 0, cfg.mc_n as f64, mean, var, q, 0.0)],
                grad_queries: q,
                quantum: 0.0,
            })
        }
        Method::TransformedUla => {
            let tp = TransformedPotential::new(p, cfg.transform)?;
            let n_steps = (cfg.t / cfg.h).ceil() as u64;
            let (xs, q) = transformed_ula_endpoints(&tp, cfg.h, n_steps, &cfg.start(), cfg.mc_n, seed)?;
            let vals: Vec<f64> = xs.iter().map(|x| phi.eval(x)).collect();
            let (mean, var) = mean_var(&vals);
            Ok(Once {
                estimate: mean,
                est_variance: var / vals.len() as f64,
                rows: vec![row(m, 0, cfg.mc_n as f64, mean, var, q, 0.0)],
                grad_queries: q,
                quantum: 0.0,
            })
        }
        Method::Mlmc => {
            let s = level_sampler(cfg, p, phi.clone())?;
            let (stats, pilot_q) = estimate_level_stats_counted(s.as_ref(), 0..cfg.levels + 1, cfg.n_pilot, seed)?;
            let n = allocate_classical(&stats, cfg.eps)?;
            let r = mlmc_estimate(s.as_ref(), &n, seed)?;
            let rows =
                r.per_level.iter().map(|l| row(m, l.level, l.n_or_sigma, l.mean, l.variance, l.queries as u64, 0.0)).collect();
            Ok(Once {
                estimate: r.estimate,
                est_variance: r.est_variance,
                rows,
                grad_queries: r.classical_queries + pilot_q,
                quantum: 0.0,
            })
        }
        Method::QamlmcModel => {
            let s = level_sampler(cfg, p, phi.clone())?;
            let (stats, pilot_q) = estimate_level_stats_counted(s.as_ref(), 0..cfg.levels + 1, cfg.n_pilot, seed)?;
            let fit = fit_rates(&stats, 1..cfg.levels + 1)?;
            let alpha = if fit.alpha.is_finite() && fit.alpha > 0.0 { fit.alpha } else { 1.0 };
            let k1 = fit_k1(&stats, alpha, 1..cfg.levels + 1);
            let qa = allocate_quantum_model(k1, alpha, fit.beta, fit.gamma, &stats, cfg.sigma_hat, 1)?;
            let ext = crate::mlmc::extrapolated(&stats, fit.beta, fit.gamma, qa.big_l);
            let rows = (0..=qa.big_l)
                .map(|l| {
                    let st = ext.levels[l];
                    row(m, l, qa.sigma_per_level[l], st.mean, st.variance, 0, qa.per_level_queries[l])
                })
                .collect();
            let estimate = stats.levels.iter().map(|l| l.mean).sum();
            let est_variance = stats.levels.iter().map(|l| l.variance / l.n_used as f64).sum();
            Ok(Once { estimate, est_variance, rows, grad_queries: pilot_q, quantum: qa.queries })
        }
        Method::UnbiasedOsl | Method::UnbiasedDissipative => {
            let um = if m == Method::UnbiasedOsl { UnbiasedMethod::Osl } else { UnbiasedMethod::Dissipative };
            let u = unbiased_gibbs_estimate(p, phi, um, &cfg.unbiased()?, seed)?;
            let r = &u.report;
            let rows = r
                .per_level
                .iter()
                .map(|l| {
                    let q = if l.queries.is_finite() { l.queries as u64 } else { 0 };
                    row(m, l.level, l.n_or_sigma, l.mean, l.variance, q, 0.0)
                })
                .collect();
            Ok(Once {
                estimate: r.estimate,
                est_variance: r.est_variance,
                rows,
                grad_queries: r.classical_queries + u.pilot_queries,
                quantum: r.quantum_model_queries,
            })
        }
    }
}

/// Result of `run`: CSV rows and the summary.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

/// Seed of replication k; replication 0 of a single run uses the config seed itself.
pub fn replication_seed(seed: u64, k: u64, n: u64) -> u64 {
    if n == 1 {
        seed
    } else {
        stream_id(&[seed, tag::REPLICATION, k])
    }
}

/// Runs the configured method. With `n_replications > 1` each CSV row is one
/// replication: level is the replication index, mean its estimate and
/// variance its internal variance estimate.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    in_pool(cfg.threads, || {
        let counter = Arc::new(CountingPotential::new(make_potential(&cfg.builtin()?)?));
        let p: Arc<dyn Potential> = counter.clone();
        let phi = cfg.observable()?;
        let n = cfg.n_replications;
        let mut outs = Vec::with_capacity(n as usize);
        for k in 0..n {
            outs.push(run_once(cfg, p.clone(), &phi, replication_seed(cfg.seed, k, n))?);
        }
        let grad_queries = outs.iter().map(|o| o.grad_queries).sum();
        let quantum = outs.iter().map(|o| o.quantum).sum();
        let (rows, estimate, stderr, replications) = if n == 1 {
            let o = outs.pop().expect("one replication");
            (o.rows, o.estimate, o.est_variance.sqrt(), None)
        } else {
            let ests: Vec<f64> = outs.iter().map(|o| o.estimate).collect();
            let (mean, var) = mean_var(&ests);
            let internal = outs.iter().map(|o| o.est_variance).sum::<f64>() / n as f64;
            let rows = outs
                .iter()
                .enumerate()
                .map(|(k, o)| {
                    let q = o.rows.iter().map(|r| r.cost_grad_queries).sum();
                    row(cfg.method, k, o.rows.len() as f64, o.estimate, o.est_variance, q, o.quantum)
                })
                .collect();
            let rep = ReplicationSummary { n, empirical_sd: var.sqrt(), internal_sd: internal.sqrt() };
            (rows, mean, (var / n as f64).sqrt(), Some(rep))
        };
        let wall = start.elapsed().as_secs_f64();
        let mut rows: Vec<ReportRow> = rows;
        if cfg.wall_clock {
            for r in &mut rows {
                r.wall_seconds = wall;
            }
        }
        Ok(RunOutput {
            rows,
            summary: Summary {
                method: cfg.method.name().into(),
                estimate,
                stderr,
                grad_queries,
                counted_grad_calls: counter.grad_calls(),
                quantum_model_queries: quantum,
                wall_seconds: wall,
                replications,
            },
        })
    })
}

pub fn write_run(out: &RunOutput, dir: &Path) -> Result<()> {
    write(dir, "report.csv", &report::to_csv(&out.rows))?;
    write(dir, "summary.txt", &(out.summary.line() + "\n"))
}

/// Pilot statistics and fitted rates over levels 1..=L.
#[derive(Clone, Debug, PartialEq)]
pub struct RatesOutput {
    pub stats: LevelStats,
    pub fit: RateFit,
    pub pilot_queries: u64,
}

impl RatesOutput {
    pub fn line(&self) -> String {
        let f = &self.fit;
        format!(
            "alpha={} r2_alpha={} beta={} r2_beta={} gamma={} r2_gamma={}",
            fmt_f64(f.alpha),
            fmt_f64(f.r2_alpha),
            fmt_f64(f.beta),
            fmt_f64(f.r2_beta),
            fmt_f64(f.gamma),
            fmt_f64(f.r2_gamma)
        )
    }
}

/// Pilot-samples levels 0..=mlmc.levels and fits (alpha, beta, gamma) on levels 1..=L.
pub fn rates(cfg: &ExperimentConfig) -> Result<RatesOutput> {
    in_pool(cfg.threads, || {
        let p = make_potential(&cfg.builtin()?)?;
        let s = level_sampler(cfg, p, cfg.observable()?)?;
        let (stats, pilot_queries) = estimate_level_stats_counted(s.as_ref(), 0..cfg.levels + 1, cfg.n_pilot, cfg.seed)?;
        let fit = fit_rates(&stats, 1..cfg.levels + 1)?;
        Ok(RatesOutput { stats, fit, pilot_queries })
    })
}

pub fn write_rates(cfg: &ExperimentConfig, out: &RatesOutput, dir: &Path) -> Result<()> {
    let rows: Vec<ReportRow> = out
        .stats
        .levels
        .iter()
        .enumerate()
        .map(|(l, s)| row(cfg.method, l, s.n_used as f64, s.mean, s.variance, (s.mean_cost * s.n_used as f64).round() as u64, 0.0))
        .collect();
    write(dir, "rates.csv", &report::to_csv(&rows))?;
    write(dir, "rates.txt", &(out.line() + "\n"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransformCheckOutput {
    pub checks: Vec<Check>,
    pub scan: AssumptionReport,
}

impl TransformCheckOutput {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("check,pass,value,threshold\n");
        for c in &self.checks {
            s += &format!("{},{},{},{}\n", c.name, c.pass, fmt_f64(c.value), fmt_f64(c.threshold));
        }
        s
    }

    pub fn scan_csv(&self) -> String {
        let mut s = String::from("r,smooth_rad,smooth_tan,dissipative,hess_rad,hess_tan\n");
        for r in &self.scan.rows {
            s += &format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(r.r),
                fmt_f64(r.smooth_rad),
                fmt_f64(r.smooth_tan),
                fmt_f64(r.dissipative),
                fmt_f64(r.hess_rad),
                fmt_f64(r.hess_tan)
            );
        }
        s
    }
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check { name, pass: value <= threshold, value, threshold }
}

/// Max |g^(k)(R + d) - g^(k)(R - d)| / max(1, |g^(k)(R)|) over k = 0..3 at both junctions.
pub fn junction_jump(tp: &TransformParams, delta: f64) -> Result<f64> {
    let mut worst = 0.0f64;
    for r in [tp.r1, tp.r2] {
        let (a, b, c) = (tp.g_all(r - delta)?, tp.g_all(r + delta)?, tp.g_all(r)?);
        for k in 0..4 {
            worst = worst.max((a[k] - b[k]).abs() / c[k].abs().max(1.0));
        }
    }
    Ok(worst)
}

/// KS distances of transformed ULA and of the weighted spring sampler on f_h
/// against the Student-t law (d = 1).
pub fn student_t_ks(tp: &TransformedPotential, kappa: f64, h: f64, n_steps: u64, chains: u64, seed: u64) -> Result<(f64, f64)> {
    let cdf = |x: f64| student_t_gibbs_cdf(x, kappa);
    let (xs, _) = transformed_ula_endpoints(tp, h, n_steps, &[0.0], chains, seed)?;
    let ula = ks_statistic(&xs.iter().map(|x| x[0]).collect::<Vec<_>>(), cdf);
    let scfg = SpringConfig { override_lambda_check: true, ..SpringConfig::new(1.0, h, n_steps / 2, vec![0.0]) };
    let (ws, _) = spring_fine_endpoints(tp, &scfg, chains, stream_id(&[seed, tag::CHAIN]))?;
    let mut pts = Vec::with_capacity(ws.len());
    let mut wts = Vec::with_capacity(ws.len());
    for (y, lw) in ws {
        pts.push(tp.params().h_map(&y)?[0]);
        wts.push(lw.exp());
    }
    Ok((ula, weighted_ks_statistic(&pts, &wts, cdf)))
}

/// Invariant battery, assumption scan and optional KS test for the transformed potential.
pub fn transform_check(cfg: &ExperimentConfig) -> Result<TransformCheckOutput> {
    in_pool(cfg.threads, || {
        let tparams = TransformParams::new(
            cfg.transform.alpha,
            cfg.transform.b,
            cfg.transform.beta,
            cfg.transform.r1,
            cfg.transform.r2,
        )?;
        let base = make_potential(&cfg.builtin()?)?;
        let tp = TransformedPotential::new(base.clone(), tparams)?;
        let d = tp.dim();
        let mut checks = Vec::new();

        let (c0, c1) = (chi_poly(0.0), chi_poly(1.0));
        let chi_err = (c0[0] - 1.0).abs().max(c1[0].abs()).max(c0[1..].iter().chain(&c1[1..]).fold(0.0, |a, v| a.max(v.abs())));
        checks.push(check("chi_endpoints", chi_err, 1e-12));
        checks.push(check("g_c3_continuity", junction_jump(&tparams, 1e-10)?, 1e-6));

        let mut rt = 0.0f64;
        for k in 1..=200 {
            let r = 0.025 * k as f64;
            rt = rt.max((tparams.g_inverse(tparams.g_eval(r)?)? - r).abs() / r.max(1.0));
        }
        checks.push(check("g_round_trip", rt, 1e-10));

        let mut rng = RngStream::keyed(cfg.seed, &[tag::TEST, 0x7A11]);
        let mut grad_err = 0.0f64;
        let mut ident = 0.0f64;
        let mut hmap_rt = 0.0f64;
        for _ in 0..100 {
            let dir: Vec<f64> = (0..d).map(|_| rng.normal()).collect();
            let n = norm(&dir);
            let r = 0.1 + 3.9 * rng.uniform();
            let x: Vec<f64> = dir.iter().map(|v| v * r / n).collect();
            grad_err = grad_err.max(check_gradient(&tp, &x, 1e-5)?);
            let back = tparams.h_inverse(&tparams.h_map(&x)?)?;
            hmap_rt = hmap_rt.max(back.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / r.max(1.0));
            let xi: Vec<f64> = dir.iter().map(|v| v * tparams.r1 * rng.uniform() / n).collect();
            let same = tp.value(&xi).to_bits() == base.value(&xi).to_bits() && tp.grad_vec(&xi) == base.grad_vec(&xi);
            ident = ident.max(if same { 0.0 } else { 1.0 });
        }
        checks.push(check("h_round_trip", hmap_rt, 1e-10));
        checks.push(check("f_h_gradient_fd", grad_err, 1e-5));
        checks.push(check("identity_region_exact", ident, 0.0));

        let mut eig_err = 0.0f64;
        for k in 1..=20 {
            let r = 0.2 * k as f64 + 0.05;
            let (l1, l2) = tp.hessian_eigs(r)?;
            let dr = 1e-6 * r;
            let fd = (tp.radial_slope(r + dr)? - tp.radial_slope(r - dr)?) / (2.0 * dr);
            let u1 = tp.radial_slope(r)?;
            eig_err = eig_err.max((l1 - fd).abs() / l1.abs().max(1.0)).max((l2 - u1 / r).abs() / l2.abs().max(1.0));
        }
        checks.push(check("hessian_eigs_fd", eig_err, 1e-5));

        let n = cfg.scan_n_grid.max(1);
        let grid: Vec<f64> =
            (1..=n).map(|k| tparams.r2 + (cfg.scan_r_max - tparams.r2) * k as f64 / n as f64).collect();
        let scan = assumption_scan(&tp, &grid, cfg.scan)?;
        checks.push(check("scan_smoothness", scan.smooth_max, cfg.scan.l));
        checks.push(Check {
            name: "scan_dissipativity",
            pass: scan.dissipative_ok,
            value: scan.dissipative_margin_min,
            threshold: 0.0,
        });
        checks.push(check("scan_hessian_smoothness", scan.hessian_max, cfg.scan.l));

        if cfg.ks_chains > 0 {
            if cfg.potential != "student_t" || d != 1 {
                return Err(Error::config("ks.chains", "the KS test needs potential.name = student_t with potential.d = 1"));
            }
            let (ula, spring) = student_t_ks(&tp, cfg.kappa, cfg.h, cfg.ks_steps, cfg.ks_chains, cfg.seed)?;
            checks.push(check("ks_transformed_ula", ula, 0.05));
            checks.push(check("ks_spring_on_f_h", spring, 0.05));
        }
        Ok(TransformCheckOutput { checks, scan })
    })
}

pub fn write_transform_check(out: &TransformCheckOutput, dir: &Path) -> Result<()> {
    write(dir, "checks.csv", &out.csv())?;
    write(dir, "scan.csv", &out.scan_csv())
}

/// Raw endpoints: one row per draw with coordinates and a log weight (0 unless spring-weighted).
pub fn sample(cfg: &ExperimentConfig) -> Result<Vec<(Vec<f64>, f64)>> {
    in_pool(cfg.threads, || {
        let p = make_potential(&cfg.builtin()?)?;
        let x0 = cfg.start();
        let unweighted = |xs: Vec<Vec<f64>>| xs.into_iter().map(|x| (x, 0.0)).collect();
        match (cfg.method, cfg.coupling) {
            (Method::Mc, _) => Ok(unweighted(ula_endpoints(p.as_ref(), cfg.h, cfg.t, &x0, cfg.sample_n, cfg.seed)?.0)),
            (Method::TransformedUla, _) => {
                let tp = TransformedPotential::new(p, cfg.transform)?;
                let n_steps = (cfg.t / cfg.h).ceil() as u64;
                Ok(unweighted(transformed_ula_endpoints(&tp, cfg.h, n_steps, &x0, cfg.sample_n, cfg.seed)?.0))
            }
            (Method::Mlmc, Coupling::Spring) => {
                let h = cfg.h * 0.5f64.powi(cfg.sample_level as i32);
                let n = crate::measure_change::coarse_steps(grid_horizon(cfg.t, cfg.h), h)?;
                let scfg = SpringConfig { override_lambda_check: cfg.override_lambda_check, ..SpringConfig::new(cfg.spring, h, n, x0) };
                Ok(spring_fine_endpoints(p.as_ref(), &scfg, cfg.sample_n, cfg.seed)?.0)
            }
            (m, _) => Err(Error::config(
                "method",
                format!("sample supports mc, transformed_ula and mlmc with coupling.kind = spring, not {}", m.name()),
            )),
        }
    })
}

pub fn write_sample(draws: &[(Vec<f64>, f64)], dir: &Path) -> Result<()> {
    let d = draws.first().map_or(0, |x| x.0.len());
    let mut s = String::from("index");
    for i in 0..d {
        s += &format!(",x{i}");
    }
    s += ",log_weight\n";
    for (i, (x, w)) in draws.iter().enumerate() {
        s += &i.to_string();
        for v in x {
            s += ",";
            s += &fmt_f64(*v);
        }
        s += &format!(",{}\n", fmt_f64(*w));
    }
    write(dir, "samples.csv", &s)
}
