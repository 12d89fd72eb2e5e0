use super::{Potential, RadialProfile, RegularityInfo};
use crate::error::{Error, Result};

/// f = |x|^2 / 2.
pub struct Quadratic {
    d: usize,
    reg: RegularityInfo,
}

impl Quadratic {
    pub fn new(d: usize) -> Self {
        let reg = RegularityInfo {
            smooth_l: Some(1.0),
            hessian_l: Some(0.0),
            osl_m: Some(1.0),
            weak_osl_lambda: Some(0.0),
            dissipative: Some((1.0, 0.0)),
            grad_norm_at_origin: 0.0,
        };
        Quadratic { d, reg }
    }
}

struct QuadraticProfile;

impl RadialProfile for QuadraticProfile {
    fn value(&self, r: f64) -> f64 {
        0.5 * r * r
    }
    fn derivs(&self, r: f64) -> [f64; 3] {
        [r, 1.0, 0.0]
    }
}

impl Potential for Quadratic {
    fn name(&self) -> &str {
        "quadratic"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        Some(&QuadraticProfile)
    }
}

/// f = |x|^2 / 2 - 2 cos(x_1).
pub struct Oscillatory {
    d: usize,
    reg: RegularityInfo,
}

impl Oscillatory {
    pub fn new(d: usize) -> Self {
        let reg = RegularityInfo {
            smooth_l: Some(3.0),
            hessian_l: Some(2.0),
            osl_m: None,
            weak_osl_lambda: Some(1.0),
            dissipative: Some((0.5, 2.0)),
            grad_norm_at_origin: 0.0,
        };
        Oscillatory { d, reg }
    }
}

impl Potential for Oscillatory {
    fn name(&self) -> &str {
        "oscillatory"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>() - 2.0 * x[0].cos()
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        out[0] += 2.0 * x[0].sin();
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}

/// f = |x|^2 / 2 - a exp(-|x|^2), nonconvex for a > e/2.
pub struct RadialGauss {
    d: usize,
    a: f64,
    profile: RadialGaussProfile,
    reg: RegularityInfo,
}

impl RadialGauss {
    pub fn new(d: usize, a: f64) -> Result<Self> {
        if !(a > std::f64::consts::E / 2.0) || !a.is_finite() {
            return Err(Error::param("a", format!("radial_gauss needs a > e/2, got {a}")));
        }
        let reg = RegularityInfo {
            smooth_l: Some(1.0 + 2.0 * a),
            hessian_l: None,
            osl_m: None,
            weak_osl_lambda: Some((4.0 * a * (-1.5f64).exp() - 1.0).max(0.0)),
            dissipative: Some((1.0, 0.0)),
            grad_norm_at_origin: 0.0,
        };
        Ok(RadialGauss { d, a, profile: RadialGaussProfile(a), reg })
    }
}

struct RadialGaussProfile(f64);

impl RadialProfile for RadialGaussProfile {
    fn value(&self, r: f64) -> f64 {
        0.5 * r * r - self.0 * (-r * r).exp()
    }
    fn derivs(&self, r: f64) -> [f64; 3] {
        let e = 2.0 * self.0 * (-r * r).exp();
        [r + e * r, 1.0 + e * (1.0 - 2.0 * r * r), e * (4.0 * r * r * r - 6.0 * r)]
    }
}

impl Potential for RadialGauss {
    fn name(&self) -> &str {
        "radial_gauss"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        0.5 * r2 - self.a * (-r2).exp()
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let s = 1.0 + 2.0 * self.a * (-r2).exp();
        for (o, v) in out.iter_mut().zip(x) {
            *o = s * v;
        }
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        Some(&self.profile)
    }
}

/// Student-t potential f = ((d + kappa)/2) log(1 + |x|^2).
pub struct StudentT {
    d: usize,
    kappa: f64,
    profile: StudentTProfile,
    reg: RegularityInfo,
}

#[derive(Clone, Copy, Debug)]
pub struct StudentTProfile {
    c: f64,
}

impl StudentT {
    pub fn new(d: usize, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) || !kappa.is_finite() {
            return Err(Error::param("kappa", format!("student_t needs kappa > 0, got {kappa}")));
        }
        let c = d as f64 + kappa;
        let reg = RegularityInfo {
            smooth_l: Some(c),
            hessian_l: None,
            osl_m: None,
            weak_osl_lambda: Some(c / 8.0),
            dissipative: None,
            grad_norm_at_origin: 0.0,
        };
        Ok(StudentT { d, kappa, profile: StudentTProfile { c }, reg })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

impl RadialProfile for StudentTProfile {
    fn value(&self, r: f64) -> f64 {
        if r > 1e100 {
            self.c * (r.ln() + 0.5 * (1.0 / (r * r)).ln_1p())
        } else {
            0.5 * self.c * (r * r).ln_1p()
        }
    }
    fn derivs(&self, r: f64) -> [f64; 3] {
        let c = self.c;
        let q = 1.0 + r * r;
        [c * r / q, c * (1.0 - r * r) / (q * q), 2.0 * c * r * (r * r - 3.0) / (q * q * q)]
    }
    fn scaled_derivs(&self, s: f64) -> [f64; 3] {
        let c = self.c;
        if s <= 1.0 {
            let s2 = s * s;
            let q = 1.0 + s2;
            return [c * s2 / q, c * s2 * (1.0 - s2) / (q * q), 2.0 * c * s2 * s2 * (s2 - 3.0) / (q * q * q)];
        }
        // divide through by powers of s^2 so nothing overflows
        let u = 1.0 / (s * s);
        let w = 1.0 / (1.0 + u);
        [c * w, c * w * (u - 1.0) / (u + 1.0), 2.0 * c * w * w * (1.0 - 3.0 * u) / (1.0 + u)]
    }
}

impl Potential for StudentT {
    fn name(&self) -> &str {
        "student_t"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        0.5 * self.profile.c * r2.ln_1p()
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let s = self.profile.c / (1.0 + r2);
        for (o, v) in out.iter_mut().zip(x) {
            *o = s * v;
        }
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        Some(&self.profile)
    }
}

/// f = |x|^2 / 2 + lambda0 sum_i cos(x_i / sqrt d).
pub struct CosineWell {
    d: usize,
    lambda0: f64,
    reg: RegularityInfo,
}

impl CosineWell {
    pub fn new(d: usize, lambda0: f64) -> Result<Self> {
        if !(lambda0 > 0.0) || !lambda0.is_finite() {
            return Err(Error::param("lambda0", format!("cosine_well needs lambda0 > 0, got {lambda0}")));
        }
        let df = d as f64;
        let reg = RegularityInfo {
            smooth_l: Some(1.0 + lambda0),
            hessian_l: Some(lambda0 / df.sqrt()),
            osl_m: if lambda0 < df { Some(1.0 - lambda0 / df) } else { None },
            weak_osl_lambda: Some((lambda0 / df - 1.0).max(0.0)),
            dissipative: Some((0.5, 0.5 * lambda0 * lambda0 * df)),
            grad_norm_at_origin: 0.0,
        };
        Ok(CosineWell { d, lambda0, reg })
    }
}

impl Potential for CosineWell {
    fn name(&self) -> &str {
        "cosine_well"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, x: &[f64]) -> f64 {
        let s = (self.d as f64).sqrt();
        x.iter().map(|v| 0.5 * v * v + self.lambda0 * (v / s).cos()).sum()
    }
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        let s = (self.d as f64).sqrt();
        for (o, v) in out.iter_mut().zip(x) {
            *o = v - self.lambda0 / s * (v / s).sin();
        }
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}

/// f = 0. Pure Brownian motion; useful for coupling checks.
pub struct Zero {
    d: usize,
    reg: RegularityInfo,
}

impl Zero {
    pub fn new(d: usize) -> Self {
        let reg = RegularityInfo {
            smooth_l: Some(0.0),
            hessian_l: Some(0.0),
            osl_m: None,
            weak_osl_lambda: Some(0.0),
            dissipative: None,
            grad_norm_at_origin: 0.0,
        };
        Zero { d, reg }
    }
}

struct ZeroProfile;

impl RadialProfile for ZeroProfile {
    fn value(&self, _r: f64) -> f64 {
        0.0
    }
    fn derivs(&self, _r: f64) -> [f64; 3] {
        [0.0; 3]
    }
}

impl Potential for Zero {
    fn name(&self) -> &str {
        "zero"
    }
    fn dim(&self) -> usize {
        self.d
    }
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }
    fn grad(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
    fn radial_profile(&self) -> Option<&dyn RadialProfile> {
        Some(&ZeroProfile)
    }
}
