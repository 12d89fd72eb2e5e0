use super::{dot, norm, origin_grad_norm, Potential, RegularityInfo};
use crate::error::{Error, Result};
use crate::rng::{tag, RngStream};
use nalgebra::{DMatrix, SymmetricEigen};

/// In-memory regression data (x_i, y_i).
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub xs: Vec<Vec<f64>>,
    pub ys: Vec<f64>,
}

impl Dataset {
    pub fn new(xs: Vec<Vec<f64>>, ys: Vec<f64>) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::param("data", "need n >= 1 rows with one label each"));
        }
        let d = xs[0].len();
        if d == 0 || xs.iter().any(|x| x.len() != d) {
            return Err(Error::param("data", "rows must share a positive dimension"));
        }
        if xs.iter().flatten().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::param("data", "non-finite entry"));
        }
        Ok(Dataset { xs, ys })
    }

    /// Fixed synthetic set: n = 20, d = 3, Gaussian features, labels in {-1, +1}.
    pub fn synthetic(seed: u64) -> Self {
        let mut rng = RngStream::keyed(seed, &[tag::TEST, 0xDA7A]);
        let w = [1.0, -0.5, 0.25];
        let mut xs = Vec::with_capacity(20);
        let mut ys = Vec::with_capacity(20);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|_| rng.normal()).collect();
            let z = dot(&x, &w) + 0.5 * rng.normal();
            ys.push(if z >= 0.0 { 1.0 } else { -1.0 });
            xs.push(x);
        }
        Dataset { xs, ys }
    }

    pub fn n(&self) -> usize {
        self.xs.len()
    }

    pub fn dim(&self) -> usize {
        self.xs[0].len()
    }

    fn max_x_norm(&self) -> f64 {
        self.xs.iter().map(|x| norm(x)).fold(0.0, f64::max)
    }

    fn sum_x_norm(&self) -> f64 {
        self.xs.iter().map(|x| norm(x)).sum()
    }

    /// Largest eigenvalue of sum_i x_i x_i^T.
    fn scatter_norm(&self) -> f64 {
        let d = self.dim();
        let mut m = DMatrix::<f64>::zeros(d, d);
        for x in &self.xs {
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += x[i] * x[j];
                }
            }
        }
        SymmetricEigen::new(m).eigenvalues.max()
    }
}

/// Checked symmetric positive definite precision matrix with extreme eigenvalues.
#[derive(Clone, Debug)]
struct Precision {
    m: Vec<Vec<f64>>,
    lmin: f64,
    lmax: f64,
}

impl Precision {
    fn new(m: Vec<Vec<f64>>, d: usize) -> Result<Self> {
        if m.len() != d || m.iter().any(|r| r.len() != d) {
            return Err(Error::param("lambda", format!("precision must be {d}x{d}")));
        }
        for i in 0..d {
            for j in 0..i {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * (1.0 + m[i][j].abs()) {
                    return Err(Error::param("lambda", "precision must be symmetric"));
                }
            }
        }
        let dm = DMatrix::from_fn(d, d, |i, j| m[i][j]);
        let ev = SymmetricEigen::new(dm).eigenvalues;
        let (lmin, lmax) = (ev.min(), ev.max());
        if !(lmin > 0.0) {
            return Err(Error::param("lambda", "precision must be positive definite"));
        }
        Ok(Precision { m, lmin, lmax })
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(&self.m) {
            *o = dot(row, x);
        }
    }

    fn quad(&self, x: &[f64]) -> f64 {
        self.m.iter().zip(x).map(|(row, xi)| xi * dot(row, x)).sum()
    }
}

fn softplus_neg(z: f64) -> f64 {
    // log(1 + e^{-z})
    (-z).max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

fn logistic_loss(data: &Dataset, w: &[f64]) -> f64 {
    data.xs.iter().zip(&data.ys).map(|(x, y)| softplus_neg(y * dot(x, w))).sum()
}

fn add_logistic_grad(data: &Dataset, w: &[f64], out: &mut [f64]) {
    for (x, y) in data.xs.iter().zip(&data.ys) {
        let s = sigmoid(-y * dot(x, w)) * y;
        for (o, xi) in out.iter_mut().zip(x) {
            *o -= s * xi;
        }
    }
}

/// Bayesian logistic regression, f(w) = w^T Lambda w / 2 + sum_i log(1 + exp(-y_i x_i^T w)).
pub struct LogisticRegression {
    data: Dataset,
    lambda: Precision,
    reg: RegularityInfo,
}

impl LogisticRegression {
    pub fn new(data: Dataset, lambda: Vec<Vec<f64>>) -> Result<Self> {
        let data = Dataset::new(data.xs, data.ys)?;
        let lambda = Precision::new(lambda, data.dim())?;
        let n = data.n() as f64;
        let r = data.max_x_norm();
        let m = lambda.lmin;
        let reg = RegularityInfo {
            smooth_l: Some(lambda.lmax + n * r * r / 4.0),
            hessian_l: Some(n * r.powi(3) / (6.0 * 3f64.sqrt())),
            osl_m: Some(m),
            weak_osl_lambda: Some(0.0),
            dissipative: Some((m / 2.0, data.sum_x_norm().powi(2) / (2.0 * m))),
            grad_norm_at_origin: 0.0,
        };
        let mut p = LogisticRegression { data, lambda, reg };
        p.reg.grad_norm_at_origin = origin_grad_norm(&p);
        Ok(p)
    }
}

impl Potential for LogisticRegression {
    fn name(&self) -> &str {
        "logistic_regression"
    }
    fn dim(&self) -> usize {
        self.data.dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        0.5 * self.lambda.quad(w) + logistic_loss(&self.data, w)
    }
    fn grad(&self, w: &[f64], out: &mut [f64]) {
        self.lambda.apply(w, out);
        add_logistic_grad(&self.data, w, out);
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}

/// Gaussian-mixture prior with logistic likelihood.
pub struct GaussianMixtureLogistic {
    data: Dataset,
    means: Vec<Vec<f64>>,
    log_weights: Vec<f64>,
    lambda: Precision,
    reg: RegularityInfo,
}

impl GaussianMixtureLogistic {
    pub fn new(data: Dataset, means: Vec<Vec<f64>>, weights: Vec<f64>, lambda: Vec<Vec<f64>>) -> Result<Self> {
        let data = Dataset::new(data.xs, data.ys)?;
        let d = data.dim();
        if means.is_empty() || means.len() != weights.len() || means.iter().any(|m| m.len() != d) {
            return Err(Error::param("means", "need K >= 1 means of the data dimension, one weight each"));
        }
        if weights.iter().any(|&p| !(p > 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::param("weights", "weights must be positive and sum to 1"));
        }
        let lambda = Precision::new(lambda, d)?;
        let big_m = means.iter().map(|m| norm(m)).fold(0.0, f64::max);
        let (ln, lmin) = (lambda.lmax, lambda.lmin);
        let cov = ln * ln * big_m * big_m;
        let reg = RegularityInfo {
            // Lambda Cov Lambda can push the Hessian down by |Lambda|^2 M^2, so it enters L too.
            smooth_l: Some(ln + cov + 0.25 * data.scatter_norm()),
            hessian_l: None,
            osl_m: if lmin > cov { Some(lmin - cov) } else { None },
            weak_osl_lambda: Some((cov - lmin).max(0.0)),
            dissipative: Some((lmin / 4.0, cov / (2.0 * lmin) + data.sum_x_norm().powi(2) / lmin)),
            grad_norm_at_origin: 0.0,
        };
        let log_weights = weights.iter().map(|p| p.ln()).collect();
        let mut p = GaussianMixtureLogistic { data, means, log_weights, lambda, reg };
        p.reg.grad_norm_at_origin = origin_grad_norm(&p);
        Ok(p)
    }

    /// Component log-terms log p_k - (w - m_k)^T Lambda (w - m_k) / 2.
    fn log_terms(&self, w: &[f64]) -> Vec<f64> {
        let mut diff = vec![0.0; w.len()];
        self.means
            .iter()
            .zip(&self.log_weights)
            .map(|(m, lw)| {
                for i in 0..w.len() {
                    diff[i] = w[i] - m[i];
                }
                lw - 0.5 * self.lambda.quad(&diff)
            })
            .collect()
    }
}

impl Potential for GaussianMixtureLogistic {
    fn name(&self) -> &str {
        "gaussian_mixture_logistic"
    }
    fn dim(&self) -> usize {
        self.data.dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        let t = self.log_terms(w);
        let mx = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = mx + t.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
        -lse + logistic_loss(&self.data, w)
    }
    fn grad(&self, w: &[f64], out: &mut [f64]) {
        let t = self.log_terms(w);
        let mx = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = t.iter().map(|v| (v - mx).exp()).collect();
        let z: f64 = e.iter().sum();
        let mut diff = w.to_vec();
        for (m, ek) in self.means.iter().zip(&e) {
            for i in 0..w.len() {
                diff[i] -= ek / z * m[i];
            }
        }
        self.lambda.apply(&diff, out);
        add_logistic_grad(&self.data, w, out);
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}

/// Regularised Welsch (correntropy) regression loss.
pub struct Welsch {
    data: Dataset,
    sigma: f64,
    lambda0: f64,
    reg: RegularityInfo,
}

impl Welsch {
    pub fn new(data: Dataset, sigma: f64, lambda0: f64) -> Result<Self> {
        let data = Dataset::new(data.xs, data.ys)?;
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::param("sigma", "welsch needs sigma > 0"));
        }
        if !(lambda0 > 0.0) || !lambda0.is_finite() {
            return Err(Error::param("lambda0", "welsch needs lambda0 > 0"));
        }
        let r = data.ys.iter().map(|y| y.abs()).fold(data.max_x_norm(), f64::max);
        let q = r * r / (sigma * sigma);
        // sup_s |s (3 - s^2) exp(-s^2/2)|, attained at s^2 = 3 - sqrt 6
        let s2 = 3.0 - 6f64.sqrt();
        let c3 = s2.sqrt() * 6f64.sqrt() * (-s2 / 2.0).exp();
        let dip = 2.0 * (-1.5f64).exp() * q;
        let reg = RegularityInfo {
            smooth_l: Some(lambda0 + q),
            hessian_l: Some(c3 * (r / sigma).powi(3)),
            osl_m: if lambda0 > dip { Some(lambda0 - dip) } else { None },
            weak_osl_lambda: Some((dip - lambda0).max(0.0)),
            dissipative: Some((lambda0 / 2.0, q * q / (2.0 * lambda0))),
            grad_norm_at_origin: 0.0,
        };
        let mut p = Welsch { data, sigma, lambda0, reg };
        p.reg.grad_norm_at_origin = origin_grad_norm(&p);
        Ok(p)
    }
}

impl Potential for Welsch {
    fn name(&self) -> &str {
        "welsch"
    }
    fn dim(&self) -> usize {
        self.data.dim()
    }
    fn value(&self, w: &[f64]) -> f64 {
        let s2 = 2.0 * self.sigma * self.sigma;
        let n = self.data.n() as f64;
        let loss: f64 = self
            .data
            .xs
            .iter()
            .zip(&self.data.ys)
            .map(|(x, y)| {
                let t = y - dot(x, w);
                -(-t * t / s2).exp_m1()
            })
            .sum();
        loss / n + 0.5 * self.lambda0 * dot(w, w)
    }
    fn grad(&self, w: &[f64], out: &mut [f64]) {
        let sig2 = self.sigma * self.sigma;
        let n = self.data.n() as f64;
        for (o, wi) in out.iter_mut().zip(w) {
            *o = self.lambda0 * wi;
        }
        for (x, y) in self.data.xs.iter().zip(&self.data.ys) {
            let t = y - dot(x, w);
            let dphi = t / sig2 * (-t * t / (2.0 * sig2)).exp();
            for (o, xi) in out.iter_mut().zip(x) {
                *o -= dphi * xi / n;
            }
        }
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}
