//! Flat `key = value` experiment configs with dotted sections.

use crate::debias::{GeomDebiasConfig, TimeSchedule, UnbiasedConfig};
use crate::error::{Error, Result};
use crate::potentials::{BuiltinSpec, Observable};
use crate::tail_transform::{ScanCandidates, TransformParams};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mc,
    Mlmc,
    QamlmcModel,
    UnbiasedOsl,
    UnbiasedDissipative,
    TransformedUla,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Mc => "mc",
            Method::Mlmc => "mlmc",
            Method::QamlmcModel => "qamlmc_model",
            Method::UnbiasedOsl => "unbiased_osl",
            Method::UnbiasedDissipative => "unbiased_dissipative",
            Method::TransformedUla => "transformed_ula",
        }
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "mc" => Method::Mc,
            "mlmc" => Method::Mlmc,
            "qamlmc_model" => Method::QamlmcModel,
            "unbiased_osl" => Method::UnbiasedOsl,
            "unbiased_dissipative" => Method::UnbiasedDissipative,
            "transformed_ula" => Method::TransformedUla,
            _ => return Err(format!("unknown method `{s}`")),
        })
    }
}

/// Level coupling used by `mlmc`, `qamlmc_model` and `sample`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coupling {
    Plain,
    Spring,
}

impl FromStr for Coupling {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(Coupling::Plain),
            "spring" => Ok(Coupling::Spring),
            _ => Err(format!("unknown coupling `{s}` (plain or spring)")),
        }
    }
}

/// Every key with its default, in file order. `ExperimentConfig::default()` agrees with this table.
pub const KEYS: &[(&str, &str)] = &[
    ("method", "mc"),
    ("seed", "0"),
    ("threads", "0"),
    ("n_replications", "1"),
    ("output_path", "out"),
    ("potential.name", "quadratic"),
    ("potential.d", "1"),
    ("potential.a", "2"),
    ("potential.kappa", "3"),
    ("potential.lambda0", "0.5"),
    ("potential.sigma", "1"),
    ("observable.name", "cos"),
    ("observable.coord", "0"),
    ("observable.value", "1"),
    ("path.h", "0.01"),
    ("path.T", "8"),
    ("path.x0", "0"),
    ("mc.n", "100000"),
    ("mlmc.levels", "4"),
    ("mlmc.n_pilot", "1000"),
    ("coupling.kind", "plain"),
    ("coupling.S", "2"),
    ("coupling.override_lambda_check", "false"),
    ("schedule.t0", "4"),
    ("schedule.slope", "2.772588722239781"),
    ("debias.rho", "0.75"),
    ("debias.M", "8"),
    ("debias.sigma_tilde", "0.05"),
    ("debias.j_cap", "64"),
    ("debias.n_pilot", "1000"),
    ("dissipative.t_base", "4"),
    ("dissipative.c_T", "0.5"),
    ("dissipative.pilot_levels", "4"),
    ("dissipative.max_level", "10"),
    ("target.eps", "0.01"),
    ("target.sigma_hat", "0.01"),
    ("transform.alpha", "0"),
    ("transform.b", "1"),
    ("transform.beta", "2"),
    ("transform.R1", "1"),
    ("transform.R2", "2"),
    ("scan.r_max", "10"),
    ("scan.n_grid", "50"),
    ("scan.L", "10"),
    ("scan.A", "1"),
    ("scan.B", "1"),
    ("ks.chains", "0"),
    ("ks.steps", "4000"),
    ("sample.n", "1000"),
    ("sample.level", "0"),
    ("report.wall_clock", "false"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub method: Method,
    pub seed: u64,
    /// Worker threads; 0 uses all cores. Never changes results.
    pub threads: usize,
    pub n_replications: u64,
    pub output_path: PathBuf,
    pub potential: String,
    pub d: usize,
    pub radial_a: f64,
    pub kappa: f64,
    pub lambda0: f64,
    pub welsch_sigma: f64,
    pub observable: String,
    pub observable_coord: usize,
    pub observable_value: f64,
    pub h: f64,
    pub t: f64,
    pub x0: Vec<f64>,
    pub mc_n: u64,
    pub levels: usize,
    pub n_pilot: u64,
    pub coupling: Coupling,
    pub spring: f64,
    pub override_lambda_check: bool,
    pub schedule_t0: f64,
    pub schedule_slope: f64,
    pub rho: f64,
    pub debias_m: f64,
    pub sigma_tilde: f64,
    pub j_cap: u32,
    pub debias_n_pilot: u64,
    pub t_base: f64,
    pub c_t: f64,
    pub pilot_levels: usize,
    pub max_level: usize,
    pub eps: f64,
    pub sigma_hat: f64,
    pub transform: TransformParams,
    pub scan_r_max: f64,
    pub scan_n_grid: usize,
    pub scan: ScanCandidates,
    pub ks_chains: u64,
    pub ks_steps: u64,
    pub sample_n: u64,
    pub sample_level: usize,
    pub wall_clock: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            method: Method::Mc,
            seed: 0,
            threads: 0,
            n_replications: 1,
            output_path: PathBuf::from("out"),
            potential: "quadratic".into(),
            d: 1,
            radial_a: 2.0,
            kappa: 3.0,
            lambda0: 0.5,
            welsch_sigma: 1.0,
            observable: "cos".into(),
            observable_coord: 0,
            observable_value: 1.0,
            h: 0.01,
            t: 8.0,
            x0: vec![0.0],
            mc_n: 100_000,
            levels: 4,
            n_pilot: 1000,
            coupling: Coupling::Plain,
            spring: 2.0,
            override_lambda_check: false,
            schedule_t0: 4.0,
            schedule_slope: 4.0 * std::f64::consts::LN_2,
            rho: 0.75,
            debias_m: 8.0,
            sigma_tilde: 0.05,
            j_cap: 64,
            debias_n_pilot: 1000,
            t_base: 4.0,
            c_t: 0.5,
            pilot_levels: 4,
            max_level: 10,
            eps: 0.01,
            sigma_hat: 0.01,
            transform: TransformParams::default(),
            scan_r_max: 10.0,
            scan_n_grid: 50,
            scan: ScanCandidates { l: 10.0, a: 1.0, b: 1.0 },
            ks_chains: 0,
            ks_steps: 4000,
            sample_n: 1000,
            sample_level: 0,
            wall_clock: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::config(key, format!("cannot parse `{v}`: {e}")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse::<f64>(key, s.trim())).collect()
}

impl ExperimentConfig {
    /// Sets one key. Unknown keys are an error naming the key.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "method" => self.method = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            "n_replications" => self.n_replications = parse(key, v)?,
            "output_path" => self.output_path = PathBuf::from(v),
            "potential.name" => self.potential = v.to_string(),
            "potential.d" => self.d = parse(key, v)?,
            "potential.a" => self.radial_a = parse(key, v)?,
            "potential.kappa" => self.kappa = parse(key, v)?,
            "potential.lambda0" => self.lambda0 = parse(key, v)?,
            "potential.sigma" => self.welsch_sigma = parse(key, v)?,
            "observable.name" => self.observable = v.to_string(),
            "observable.coord" => self.observable_coord = parse(key, v)?,
            "observable.value" => self.observable_value = parse(key, v)?,
            "path.h" => self.h = parse(key, v)?,
            "path.T" => self.t = parse(key, v)?,
            "path.x0" => self.x0 = parse_list(key, v)?,
            "mc.n" => self.mc_n = parse(key, v)?,
            "mlmc.levels" => self.levels = parse(key, v)?,
            "mlmc.n_pilot" => self.n_pilot = parse(key, v)?,
            "coupling.kind" => self.coupling = parse(key, v)?,
            "coupling.S" => self.spring = parse(key, v)?,
            "coupling.override_lambda_check" => self.override_lambda_check = parse(key, v)?,
            "schedule.t0" => self.schedule_t0 = parse(key, v)?,
            "schedule.slope" => self.schedule_slope = parse(key, v)?,
            "debias.rho" => self.rho = parse(key, v)?,
            "debias.M" => self.debias_m = parse(key, v)?,
            "debias.sigma_tilde" => self.sigma_tilde = parse(key, v)?,
            "debias.j_cap" => self.j_cap = parse(key, v)?,
            "debias.n_pilot" => self.debias_n_pilot = parse(key, v)?,
            "dissipative.t_base" => self.t_base = parse(key, v)?,
            "dissipative.c_T" => self.c_t = parse(key, v)?,
            "dissipative.pilot_levels" => self.pilot_levels = parse(key, v)?,
            "dissipative.max_level" => self.max_level = parse(key, v)?,
            "target.eps" => self.eps = parse(key, v)?,
            "target.sigma_hat" => self.sigma_hat = parse(key, v)?,
            "transform.alpha" => self.transform.alpha = parse(key, v)?,
            "transform.b" => self.transform.b = parse(key, v)?,
            "transform.beta" => self.transform.beta = parse(key, v)?,
            "transform.R1" => self.transform.r1 = parse(key, v)?,
            "transform.R2" => self.transform.r2 = parse(key, v)?,
            "scan.r_max" => self.scan_r_max = parse(key, v)?,
            "scan.n_grid" => self.scan_n_grid = parse(key, v)?,
            "scan.L" => self.scan.l = parse(key, v)?,
            "scan.A" => self.scan.a = parse(key, v)?,
            "scan.B" => self.scan.b = parse(key, v)?,
            "ks.chains" => self.ks_chains = parse(key, v)?,
            "ks.steps" => self.ks_steps = parse(key, v)?,
            "sample.n" => self.sample_n = parse(key, v)?,
            "sample.level" => self.sample_level = parse(key, v)?,
            "report.wall_clock" => self.wall_clock = parse(key, v)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// Parses config text; `#` starts a comment, repeated keys are an error.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::config(&format!("line {}", i + 1), format!("expected key = value, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if !seen.insert(k.to_string()) {
                return Err(Error::config(k, "key given twice"));
            }
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config("--config", format!("{}: {e}", path.display())))?;
        Self::parse_str(&text)
    }

    /// Checks cross-field constraints that do not need a potential.
    pub fn validate(&self) -> Result<()> {
        let pos = |key: &str, v: f64| -> Result<()> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        pos("path.h", self.h)?;
        pos("path.T", self.t)?;
        pos("target.eps", self.eps)?;
        pos("target.sigma_hat", self.sigma_hat)?;
        if self.n_replications == 0 {
            return Err(Error::config("n_replications", "must be at least 1"));
        }
        if self.x0.len() != 1 && self.x0.len() != self.dim() {
            return Err(Error::config("path.x0", format!("need 1 or {} entries, got {}", self.dim(), self.x0.len())));
        }
        if self.spring < 0.0 {
            return Err(Error::config("coupling.S", "must be nonnegative"));
        }
        Ok(())
    }

    /// Dimension of the configured potential (data potentials are fixed at 3).
    pub fn dim(&self) -> usize {
        match self.potential.as_str() {
            "logistic_regression" | "gaussian_mixture_logistic" | "welsch" => 3,
            _ => self.d,
        }
    }

    pub fn start(&self) -> Vec<f64> {
        if self.x0.len() == 1 {
            vec![self.x0[0]; self.dim()]
        } else {
            self.x0.clone()
        }
    }

    pub fn builtin(&self) -> Result<BuiltinSpec> {
        let mut spec = BuiltinSpec::by_name(&self.potential, self.d)?;
        match &mut spec {
            BuiltinSpec::RadialGauss { a, .. } => *a = self.radial_a,
            BuiltinSpec::StudentT { kappa, .. } => *kappa = self.kappa,
            BuiltinSpec::CosineWell { lambda0, .. } => *lambda0 = self.lambda0,
            BuiltinSpec::Welsch { sigma, lambda0, .. } => {
                *sigma = self.welsch_sigma;
                *lambda0 = self.lambda0;
            }
            _ => {}
        }
        Ok(spec)
    }

    pub fn observable(&self) -> Result<Observable> {
        Observable::by_name(&self.observable, self.observable_coord, self.observable_value, self.dim())
    }

    pub fn schedule(&self) -> Result<TimeSchedule> {
        TimeSchedule::new(self.schedule_t0, self.schedule_slope)
    }

    pub fn unbiased(&self) -> Result<UnbiasedConfig> {
        let mut u = UnbiasedConfig::new(self.sigma_tilde, self.h, self.start())?;
        u.debias = GeomDebiasConfig::new(self.rho, self.debias_m, self.sigma_tilde, self.j_cap)?;
        u.schedule = self.schedule()?;
        u.n_pilot = self.debias_n_pilot;
        u.spring = self.spring;
        u.t_base = self.t_base;
        u.c_t = self.c_t;
        u.pilot_levels = self.pilot_levels;
        u.max_level = self.max_level;
        Ok(u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_agree_with_key_table() {
        let mut c = ExperimentConfig::default();
        for (k, v) in KEYS {
            c.set(k, v).unwrap();
        }
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn unknown_and_repeated_keys() {
        let e = ExperimentConfig::parse_str("method = mc\nsprng_S = 2\n").unwrap_err();
        assert!(matches!(&e, Error::Config { key, .. } if key == "sprng_S"));
        assert_eq!(e.exit_code(), 2);
        assert!(ExperimentConfig::parse_str("seed=1\nseed=2").is_err());
        assert!(ExperimentConfig::parse_str("seed = x").is_err());
        let c = ExperimentConfig::parse_str("# comment\ncoupling.S = 1.5  # trailing\npath.x0 = 1, 2\npotential.d = 2").unwrap();
        assert_eq!(c.spring, 1.5);
        assert_eq!(c.start(), vec![1.0, 2.0]);
    }
}
