//! Radial heavy-tail transformation h(x) = g(|x|) x/|x| and the transformed potential f_h.

use crate::error::{Error, Result};
use crate::langevin::evolve;
use crate::potentials::{norm, Potential, RadialProfile, RegularityInfo};
use crate::rng::{tag, RngStream};
use std::sync::Arc;

/// p(t) and its first three derivatives in t.
pub fn chi_poly(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        1.0 + t3 * t * (-35.0 + t * (84.0 + t * (-70.0 + 20.0 * t))),
        -140.0 * t3 * (1.0 - t).powi(3),
        t2 * (-420.0 + t * (1680.0 + t * (-2100.0 + 840.0 * t))),
        t * (-840.0 + t * (5040.0 + t * (-8400.0 + 4200.0 * t))),
    ]
}

/// Bump chi and its first three derivatives: 1 below R1, 0 above R2,
/// p(t) = 1 - 35t^4 + 84t^5 - 70t^6 + 20t^7 between.
pub fn chi(r: f64, r1: f64, r2: f64) -> [f64; 4] {
    if r <= r1 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    if r >= r2 {
        return [0.0; 4];
    }
    let w = r2 - r1;
    let [p, p1, p2, p3] = chi_poly((r - r1) / w);
    [p, p1 / w, p2 / (w * w), p3 / (w * w * w)]
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransformParams {
    pub alpha: f64,
    pub b: f64,
    pub beta: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Default for TransformParams {
    fn default() -> Self {
        TransformParams { alpha: 0.0, b: 1.0, beta: 2.0, r1: 1.0, r2: 2.0 }
    }
}

impl TransformParams {
    pub fn new(alpha: f64, b: f64, beta: f64, r1: f64, r2: f64) -> Result<Self> {
        let p = TransformParams { alpha, b, beta, r1, r2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let TransformParams { alpha, b, beta, r1, r2 } = *self;
        if !(alpha >= 0.0 && b >= 0.0) || !alpha.is_finite() || !b.is_finite() {
            return Err(Error::param("alpha/b", "must be nonnegative"));
        }
        if alpha == 0.0 && b == 0.0 {
            return Err(Error::param("alpha/b", "alpha and b cannot both be zero"));
        }
        if b == 0.0 && alpha < 1.0 {
            return Err(Error::param("alpha", "need alpha >= 1 when b = 0"));
        }
        if !(beta > 1.0 && beta <= 2.0) {
            return Err(Error::param("beta", format!("need beta in (1, 2], got {beta}")));
        }
        if !(r1 > 0.0 && r2 > r1) || !r2.is_finite() {
            return Err(Error::param("R1/R2", format!("need 0 < R1 < R2, got R1 = {r1}, R2 = {r2}")));
        }
        let psi = self.psi(r1)?[0];
        if !(psi >= r1) {
            return Err(Error::param("R1", format!("need psi(R1) >= R1, got psi({r1}) = {psi}")));
        }
        Ok(())
    }

    /// psi(r) = r^alpha exp(b r^beta) and its first three derivatives, r > 0.
    pub fn psi(&self, r: f64) -> Result<[f64; 4]> {
        let TransformParams { alpha: a, b, beta: be, .. } = *self;
        let e = b * r.powf(be);
        if e > 700.0 {
            return Err(Error::Range(format!("b r^beta = {e} exceeds 700 at r = {r}")));
        }
        let psi = r.powf(a) * e.exp();
        // derivatives of log psi
        let l1 = a / r + b * be * r.powf(be - 1.0);
        let l2 = -a / (r * r) + b * be * (be - 1.0) * r.powf(be - 2.0);
        let l3 = 2.0 * a / (r * r * r) + b * be * (be - 1.0) * (be - 2.0) * r.powf(be - 3.0);
        Ok([psi, psi * l1, psi * (l1 * l1 + l2), psi * (l1 * l1 * l1 + 3.0 * l1 * l2 + l3)])
    }

    /// g and its first three derivatives.
    pub fn g_all(&self, r: f64) -> Result<[f64; 4]> {
        if r < self.r1 {
            return Ok([r, 1.0, 0.0, 0.0]);
        }
        let s = self.psi(r)?;
        if r >= self.r2 {
            return Ok(s);
        }
        let c = chi(r, self.r1, self.r2);
        // g = psi + chi q with q = r - psi
        let q = [r - s[0], 1.0 - s[1], -s[2], -s[3]];
        Ok([
            s[0] + c[0] * q[0],
            s[1] + c[1] * q[0] + c[0] * q[1],
            s[2] + c[2] * q[0] + 2.0 * c[1] * q[1] + c[0] * q[2],
            s[3] + c[3] * q[0] + 3.0 * c[2] * q[1] + 3.0 * c[1] * q[2] + c[0] * q[3],
        ])
    }

    pub fn g_eval(&self, r: f64) -> Result<f64> {
        Ok(self.g_all(r)?[0])
    }

    pub fn g_deriv(&self, r: f64, order: usize) -> Result<f64> {
        if !(1..=3).contains(&order) {
            return Err(Error::param("order", "derivative order must be 1, 2 or 3"));
        }
        Ok(self.g_all(r)?[order])
    }

    /// r with g(r) = s, by bisection.
    pub fn g_inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::param("s", "need finite s >= 0"));
        }
        if s < self.r1 {
            return Ok(s);
        }
        let below = |r: f64| -> bool { matches!(self.g_eval(r), Ok(v) if v < s) };
        let mut lo = self.r1;
        let mut hi = 2.0 * self.r1;
        while below(hi) {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (glo, ghi) = (self.g_eval(lo).unwrap_or(f64::INFINITY), self.g_eval(hi).unwrap_or(f64::INFINITY));
        Ok(if (s - glo).abs() <= (ghi - s).abs() { lo } else { hi })
    }

    pub fn h_map(&self, x: &[f64]) -> Result<Vec<f64>> {
        let r = norm(x);
        if r == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        let k = self.g_eval(r)? / r;
        Ok(x.iter().map(|v| v * k).collect())
    }

    pub fn h_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        let s = norm(y);
        if s == 0.0 {
            return Ok(vec![0.0; y.len()]);
        }
        let k = self.g_inverse(s)? / s;
        Ok(y.iter().map(|v| v * k).collect())
    }

    /// log of the Jacobian determinant (g/r)^{d-1} g'.
    pub fn log_jacobian(&self, r: f64, d: usize) -> Result<f64> {
        let g = self.g_all(r)?;
        Ok((d as f64 - 1.0) * (g[0] / r).ln() + g[1].ln())
    }
}

/// Radial profile of an isotropic potential by finite differences along e1.
struct FdProfile {
    base: Arc<dyn Potential>,
}

impl FdProfile {
    fn f(&self, r: f64) -> f64 {
        let mut x = vec![0.0; self.base.dim()];
        x[0] = r;
        self.base.value(&x)
    }
}

impl RadialProfile for FdProfile {
    fn value(&self, r: f64) -> f64 {
        self.f(r)
    }
    fn derivs(&self, r: f64) -> [f64; 3] {
        let d = 1e-3 * r.abs().max(1.0);
        let (fm2, fm1, f0, fp1, fp2) = (self.f(r - 2.0 * d), self.f(r - d), self.f(r), self.f(r + d), self.f(r + 2.0 * d));
        [
            (fp1 - fm1) / (2.0 * d),
            (fp1 - 2.0 * f0 + fm1) / (d * d),
            (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * d * d * d),
        ]
    }
}

enum Profile {
    Base,
    Fd(FdProfile),
}

/// f_h(x) = f(g(r)) - log g'(r) - (d-1) log g(r) + (d-1) log r, with f_h = f for r < R1.
pub struct TransformedPotential {
    base: Arc<dyn Potential>,
    params: TransformParams,
    profile: Profile,
    reg: RegularityInfo,
    name: String,
}

impl TransformedPotential {
    /// Checks isotropy of `base` on random points before accepting it.
    pub fn new(base: Arc<dyn Potential>, params: TransformParams) -> Result<Self> {
        params.validate()?;
        let d = base.dim();
        let mut rng = RngStream::keyed(0x150, &[tag::TEST, d as u64]);
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| 2.0 * rng.normal()).collect();
            let r = norm(&x);
            let mut e1 = vec![0.0; d];
            e1[0] = r;
            let (a, b) = (base.value(&x), base.value(&e1));
            if !((a - b).abs() <= 1e-10 * a.abs().max(1.0)) {
                return Err(Error::Isotropy(format!("{}: f(x) = {a} but f(|x| e1) = {b}", base.name())));
            }
        }
        let profile = if base.radial_profile().is_some() { Profile::Base } else { Profile::Fd(FdProfile { base: base.clone() }) };
        let reg = RegularityInfo { grad_norm_at_origin: base.regularity().grad_norm_at_origin, ..Default::default() };
        let name = format!("{}_transformed", base.name());
        Ok(TransformedPotential { base, params, profile, reg, name })
    }

    pub fn params(&self) -> &TransformParams {
        &self.params
    }

    pub fn base(&self) -> &Arc<dyn Potential> {
        &self.base
    }

    pub fn profile(&self) -> &dyn RadialProfile {
        match &self.profile {
            Profile::Base => self.base.radial_profile().expect("checked at construction"),
            Profile::Fd(p) => p,
        }
    }

    fn dm1(&self) -> f64 {
        self.base.dim() as f64 - 1.0
    }

    pub fn try_value(&self, x: &[f64]) -> Result<f64> {
        let r = norm(x);
        if r < self.params.r1 {
            return Ok(self.base.value(x));
        }
        let g = self.params.g_all(r)?;
        Ok(self.profile().value(g[0]) - g[1].ln() - self.dm1() * (g[0].ln() - r.ln()))
    }

    /// u'(r) where f_h(x) = u(|x|).
    pub fn radial_slope(&self, r: f64) -> Result<f64> {
        let g = self.params.g_all(r)?;
        let f1 = self.profile().derivs(g[0])[0];
        let k = self.dm1();
        Ok(g[1] * f1 - g[2] / g[1] - k * g[1] / g[0] + k / r)
    }

    pub fn try_grad(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        let r = norm(x);
        if r < self.params.r1 {
            self.base.grad(x, out);
            return Ok(());
        }
        let s = self.radial_slope(r)? / r;
        for (o, v) in out.iter_mut().zip(x) {
            *o = s * v;
        }
        Ok(())
    }

    /// Radial (multiplicity 1) and tangential (multiplicity d-1) Hessian eigenvalues at radius r.
    pub fn hessian_eigs(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::param("r", "radius must be positive"));
        }
        let g = self.params.g_all(r)?;
        let [f1, f2, _] = self.profile().derivs(g[0]);
        let k = self.dm1();
        let u1 = g[1] * f1 - g[2] / g[1] - k * g[1] / g[0] + k / r;
        let u2 = g[1] * g[1] * f2 + g[2] * f1 - (g[3] * g[1] - g[2] * g[2]) / (g[1] * g[1])
            - k * (g[2] * g[0] - g[1] * g[1]) / (g[0] * g[0])
            - k / (r * r);
        Ok((u2, u1 / r))
    }
}

impl Potential for TransformedPotential {
    fn name(&self) -> &str {
        &self.name
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.try_value(x).unwrap_or(f64::INFINITY)
    }
    /// Out-of-range radii yield NaN, which the samplers report as divergence.
    fn grad(&self, x: &[f64], out: &mut [f64]) {
        if self.try_grad(x, out).is_err() {
            out.fill(f64::NAN);
        }
    }
    fn regularity(&self) -> &RegularityInfo {
        &self.reg
    }
}

/// Candidate constants checked by `assumption_scan`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanCandidates {
    /// Bound on |Hessian eigenvalues| and on the third-derivative expressions.
    pub l: f64,
    /// Dissipativity: expression >= a r^2 - b.
    pub a: f64,
    pub b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow {
    pub r: f64,
    /// Radial and tangential smoothness expressions (Hessian eigenvalues).
    pub smooth_rad: f64,
    pub smooth_tan: f64,
    /// u'(r) r.
    pub dissipative: f64,
    /// Third radial derivative u'''(r) and |d/dr (u'/r)|.
    pub hess_rad: f64,
    pub hess_tan: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub rows: Vec<ScanRow>,
    pub simplified: bool,
    pub smooth_max: f64,
    pub dissipative_margin_min: f64,
    pub hessian_max: f64,
    pub smooth_ok: bool,
    pub dissipative_ok: bool,
    pub hessian_ok: bool,
}

fn scan_row(tp: &TransformedPotential, r: f64) -> Result<(ScanRow, bool)> {
    let p = tp.params;
    let d = tp.dim() as f64;
    if p.alpha == 0.0 && p.beta == 2.0 {
        let b = p.b;
        let psi = p.psi(r)?[0];
        let [s1, s2, s3] = tp.profile().scaled_derivs(psi);
        let (r2, r3) = (r * r, r * r * r);
        let row = ScanRow {
            r,
            smooth_tan: 2.0 * b * s1 - 2.0 * b * d + (d - 2.0) / r2,
            smooth_rad: 4.0 * b * b * r2 * s2 + (2.0 * b + 4.0 * b * b * r2) * s1 - 2.0 * b * d - (d - 2.0) / r2,
            dissipative: 2.0 * b * r2 * s1 - 2.0 * b * d * r2 + (d - 2.0),
            hess_rad: (12.0 * b * b * r + 8.0 * b * b * b * r3) * s1
                + (12.0 * b * b * r + 24.0 * b * b * b * r3) * s2
                + 8.0 * b * b * b * r3 * s3
                + 2.0 * (d - 2.0) / r3,
            hess_tan: (4.0 * b * b * r * s1 + 4.0 * b * b * r * s2 - 2.0 * (d - 2.0) / r3).abs(),
        };
        return Ok((row, true));
    }
    let (lr, lt) = tp.hessian_eigs(r)?;
    let u1 = tp.radial_slope(r)?;
    let dr = 1e-5 * r;
    let u2p = tp.hessian_eigs(r + dr)?.0;
    let u2m = tp.hessian_eigs(r - dr)?.0;
    Ok((
        ScanRow {
            r,
            smooth_rad: lr,
            smooth_tan: lt,
            dissipative: u1 * r,
            hess_rad: (u2p - u2m) / (2.0 * dr),
            hess_tan: (lr / r - u1 / (r * r)).abs(),
        },
        false,
    ))
}

/// Evaluates the smoothness, dissipativity and Hessian-smoothness expressions on a tail grid.
pub fn assumption_scan(tp: &TransformedPotential, r_grid: &[f64], cand: ScanCandidates) -> Result<AssumptionReport> {
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut simplified = false;
    for &r in r_grid {
        if !(r > tp.params.r2) {
            return Err(Error::Domain(format!("grid point r = {r} not in the tail r > R2 = {}", tp.params.r2)));
        }
        let (row, s) = scan_row(tp, r)?;
        simplified = s;
        rows.push(row);
    }
    let smooth_max = rows.iter().map(|w| w.smooth_rad.abs().max(w.smooth_tan.abs())).fold(0.0, f64::max);
    let dissipative_margin_min =
        rows.iter().map(|w| w.dissipative - (cand.a * w.r * w.r - cand.b)).fold(f64::INFINITY, f64::min);
    let hessian_max = rows.iter().map(|w| w.hess_rad.abs().max(w.hess_tan)).fold(0.0, f64::max);
    Ok(AssumptionReport {
        rows,
        simplified,
        smooth_max,
        dissipative_margin_min,
        hessian_max,
        smooth_ok: smooth_max <= cand.l,
        dissipative_ok: dissipative_margin_min >= 0.0,
        hessian_ok: hessian_max <= cand.l,
    })
}

/// EM on f_h for N steps from y0, mapped back through h.
pub fn transformed_langevin_sample(
    tp: &TransformedPotential,
    h: f64,
    n: u64,
    y0: &[f64],
    rng: &mut RngStream,
) -> Result<(Vec<f64>, u64)> {
    if !(h > 0.0) {
        return Err(Error::param("h", "step size must be positive"));
    }
    let mut y = y0.to_vec();
    let q = evolve(tp, &mut y, h, n, rng)?;
    Ok((tp.params.h_map(&y)?, q))
}
