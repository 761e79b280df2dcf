//! Confluent Heun function HC(α,β,γ,δ,η,x) and the Heun-based spectral
//! conditions of the Rabi and asymmetric Rabi models.
//!
//! Convention: HC = Σ hₙxⁿ with h₋₁ = 0, h₀ = 1 and Aₙhₙ = Bₙhₙ₋₁ + Cₙhₙ₋₂,
//!   Aₙ = 1 + β/n,
//!   Bₙ = 1 + (β+γ−α−1)/n + [η − β/2 + (γ−α)(β−1)/2]/n²,
//!   Cₙ = [δ + α(β+γ)/2 + α(n−1)]/n².

use crate::error::{RabiError, Result};
use crate::model::{ModelParams, Variant};
use crate::recurrences::GSign;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
}

impl HeunParams {
    pub fn mu(&self) -> f64 {
        self.delta + self.alpha * (self.beta + self.gamma + 2.0) / 2.0
    }
    pub fn nu(&self) -> f64 {
        self.eta + self.beta / 2.0 + (self.gamma - self.alpha) * (self.beta + 1.0) / 2.0
    }
    /// HC(α, γ, β, −δ, η+δ), the partner used by the second solution set.
    pub fn swapped(&self) -> HeunParams {
        HeunParams {
            alpha: self.alpha,
            beta: self.gamma,
            gamma: self.beta,
            delta: -self.delta,
            eta: self.eta + self.delta,
        }
    }
    /// −β a non-negative integer: the second Frobenius solution degenerates.
    pub fn degenerate_frobenius(&self) -> bool {
        let b = -self.beta;
        b >= -1e-12 && (b - b.round()).abs() < 1e-12
    }

    fn coeffs(&self, n: usize) -> (f64, f64, f64, f64) {
        let nf = n as f64;
        let (a, b, c, d, e) = (self.alpha, self.beta, self.gamma, self.delta, self.eta);
        let an = 1.0 + b / nf;
        let b1 = (b + c - a - 1.0) / nf;
        let b2 = (e - b / 2.0 + (c - a) * (b - 1.0) / 2.0) / (nf * nf);
        let parts = d.abs() + (a * (b + c) / 2.0).abs() + (a * (nf - 1.0)).abs();
        let mut cnum = d + a * (b + c) / 2.0 + a * (nf - 1.0);
        if cnum.abs() <= 1e-12 * parts {
            cnum = 0.0;
        }
        (an, 1.0 + b1 + b2, cnum / (nf * nf), 1.0 + b1.abs() + b2.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeunValue {
    pub value: f64,
    pub derivative: f64,
    pub terms_used: usize,
    pub truncated_at: Option<usize>,
}

pub const HC_TOL: f64 = 1e-15;
const HC_CAP: usize = 20_000;
const HC_WINDOW: usize = 5;

/// Series value and x-derivative of the confluent Heun function.
pub fn hc_eval(p: &HeunParams, x: f64, tol: f64) -> Result<HeunValue> {
    if !(x.abs() < 1.0) {
        return Err(RabiError::Domain(format!("confluent Heun series needs |x| < 1, got {x}")));
    }
    let (mut hm2, mut hm1) = (0.0f64, 1.0f64);
    let mut value = 1.0;
    let mut deriv = 0.0;
    let mut scale = 1.0f64;
    let mut quiet = 0;
    let mut xn1 = 1.0; // x^{n-1}
    let mut last_nonzero = 0usize;
    for n in 1..HC_CAP {
        let (an, bn, cn, bmag) = p.coeffs(n);
        let rhs = bn * hm1 + cn * hm2;
        let h = if an.abs() <= 1e-12 * (1.0 + p.beta.abs() / n as f64) {
            let size = bmag * hm1.abs() + (cn * hm2).abs();
            if rhs.abs() <= 1e-8 * size || rhs == 0.0 {
                0.0
            } else {
                return Err(RabiError::Degenerate(format!(
                    "A_{n} = 0 (beta = {}) with non-vanishing right-hand side {rhs:e}",
                    p.beta
                )));
            }
        } else {
            rhs / an
        };
        if h == 0.0 && hm1 == 0.0 {
            return Ok(HeunValue { value, derivative: deriv, terms_used: n, truncated_at: Some(last_nonzero) });
        }
        if h != 0.0 {
            last_nonzero = n;
        }
        let t = h * xn1 * x;
        let dt = n as f64 * h * xn1;
        value += t;
        deriv += dt;
        scale = scale.max(value.abs()).max(deriv.abs()).max(t.abs());
        if t.abs().max(dt.abs()) <= tol * scale {
            quiet += 1;
            if quiet >= HC_WINDOW {
                return Ok(HeunValue { value, derivative: deriv, terms_used: n + 1, truncated_at: None });
            }
        } else {
            quiet = 0;
        }
        xn1 *= x;
        hm2 = hm1;
        hm1 = h;
    }
    Err(RabiError::NonConvergence(format!("confluent Heun series at x = {x} not converged in {HC_CAP} terms")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationCheck {
    /// δ + (N + (γ+β+2)/2)α
    pub delta_residual: f64,
    /// right-hand side of the (N+1)-th recurrence step once A_{N+1} = 0
    pub residual: f64,
    /// residual relative to the size of its two contributions
    pub normalized: f64,
    pub holds: bool,
}

/// Polynomial-truncation test at order N (δ condition plus the constraint residual).
pub fn truncation_check(p: &HeunParams, n: usize) -> TruncationCheck {
    let nf = n as f64;
    let delta_residual = p.delta + (nf + (p.gamma + p.beta + 2.0) / 2.0) * p.alpha;
    let (a, b, c, d, e) = (p.alpha, p.beta, p.gamma, p.delta, p.eta);
    let bcoef = |k: f64| k * k + (b + c - a - 1.0) * k + e - b / 2.0 + (c - a) * (b - 1.0) / 2.0;
    let ccoef = |k: f64| d + a * (b + c) / 2.0 + a * (k - 1.0);
    let (mut hm2, mut hm1) = (0.0f64, 1.0f64);
    let mut last = (0.0, 0.0);
    for k in 1..=(n + 1) {
        let kf = k as f64;
        let tb = bcoef(kf) * hm1;
        let tc = ccoef(kf) * hm2;
        if k == n + 1 {
            last = (tb, tc);
            break;
        }
        let h = (tb + tc) / (kf * (kf + b));
        hm2 = hm1;
        hm1 = h;
        if k % 16 == 0 {
            let s = hm1.abs().max(hm2.abs());
            if s > 0.0 {
                hm1 /= s;
                hm2 /= s;
            }
        }
    }
    let residual = last.0 + last.1;
    let size = last.0.abs() + last.1.abs();
    let normalized = if size > 0.0 { residual / size } else { 0.0 };
    let tol = 1e-9;
    TruncationCheck {
        delta_residual,
        residual,
        normalized,
        holds: delta_residual.abs() <= tol * (1.0 + p.alpha.abs() * (1.0 + nf)) && normalized.abs() <= tol,
    }
}

/// Constraint residual with the Rabi-specialised coefficients
/// Aₙ = n(n−1−N), Bₙ = (1−n+N)² − 4(n−1)g² − Δ², Cₙ = 4(n−2−N)g² (ω = 1 units).
pub fn rabi_constraint_residual(n: usize, g: f64, delta: f64) -> f64 {
    let nn = n as f64;
    let (mut hm2, mut hm1) = (0.0f64, 1.0f64);
    for k in 1..=(n + 1) {
        let kf = k as f64;
        let b = (1.0 - kf + nn).powi(2) - 4.0 * (kf - 1.0) * g * g - delta * delta;
        let c = 4.0 * (kf - 2.0 - nn) * g * g;
        let rhs = b * hm1 + c * hm2;
        if k == n + 1 {
            return rhs;
        }
        let h = rhs / (kf * (kf - 1.0 - nn));
        hm2 = hm1;
        hm1 = h;
        if k % 16 == 0 {
            let s = hm1.abs().max(hm2.abs());
            if s > 0.0 {
                hm1 /= s;
                hm2 /= s;
            }
        }
    }
    unreachable!()
}

/// Parameter tuples of the two local solution sets at energy E (ω = 1 units).
///
/// φ₁¹ = e^{−gz}HC(p1; x₁), φ₂¹ = c⁺e^{−gz}HC(p2; x₁),
/// φ₁² = c⁻e^{gz}HC(q1; x₂), φ₂² = e^{gz}HC(q2; x₂),
/// with x₁ = (g−z)/2g, x₂ = (g+z)/2g and q = p.swapped().
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RabiHeunMap {
    pub p1: HeunParams,
    pub p2: HeunParams,
    pub q1: HeunParams,
    pub q2: HeunParams,
    pub c_plus: f64,
    pub c_minus: f64,
    pub g: f64,
    pub energy: f64,
    pub delta: f64,
    pub eps: f64,
}

pub fn heun_map(e: f64, params: &ModelParams) -> Result<RabiHeunMap> {
    let s = params.scaled();
    let eps = match params.variant {
        Variant::Rabi => 0.0,
        Variant::Asymmetric => s.eps,
        v => return Err(RabiError::Domain(format!("no Heun map for the {} model", v.name()))),
    };
    let (g, d) = (s.g, s.delta);
    if g <= 0.0 {
        return Err(RabiError::Domain("Heun arguments (g ∓ z)/2g need g > 0".into()));
    }
    let g2 = g * g;
    let a = 4.0 * g2;
    let p1 = HeunParams {
        alpha: a,
        beta: -(e + eps + g2 + 1.0),
        gamma: -(e - eps + g2),
        delta: -2.0 * (1.0 - 2.0 * eps) * g2,
        eta: -1.5 * g2 * g2 + (1.0 - 2.0 * e - 4.0 * eps) * g2 / 2.0
            + (e * e + e - eps * eps + eps - 2.0 * d * d + 1.0) / 2.0,
    };
    let p2 = HeunParams {
        alpha: a,
        beta: -(e + eps + g2),
        gamma: -(e - eps + g2 + 1.0),
        delta: 2.0 * (1.0 + 2.0 * eps) * g2,
        eta: -1.5 * g2 * g2 - (3.0 + 2.0 * e + 4.0 * eps) * g2 / 2.0
            + (e * e + e - eps * eps - eps - 2.0 * d * d + 1.0) / 2.0,
    };
    let cp = e + g2 + eps;
    let cm = e + g2 - eps;
    if cp == 0.0 || cm == 0.0 {
        return Err(RabiError::PoleProximity { x: e + g2, pole: -eps, guard: 0.0 });
    }
    Ok(RabiHeunMap {
        p1,
        p2,
        q1: p1.swapped(),
        q2: p2.swapped(),
        c_plus: d / cp,
        c_minus: d / cm,
        g,
        energy: e,
        delta: d,
        eps,
    })
}

/// Values and z-derivatives of the four local solutions at z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Solutions {
    pub phi1_1: (f64, f64),
    pub phi2_1: (f64, f64),
    pub phi1_2: (f64, f64),
    pub phi2_2: (f64, f64),
}

fn check_z(g: f64, z: f64) -> Result<(f64, f64)> {
    let x1 = (g - z) / (2.0 * g);
    let x2 = (g + z) / (2.0 * g);
    if x1.abs() >= 1.0 || x2.abs() >= 1.0 {
        return Err(RabiError::Domain(format!(
            "z = {z} puts a Heun argument outside the unit disk (need |z| < g = {g})"
        )));
    }
    Ok((x1, x2))
}

pub fn solutions(m: &RabiHeunMap, z: f64) -> Result<Solutions> {
    let g = m.g;
    let (x1, x2) = check_z(g, z)?;
    let em = (-g * z).exp();
    let ep = (g * z).exp();
    let h = |p: &HeunParams, x: f64| hc_eval(p, x, HC_TOL);
    let a = h(&m.p1, x1)?;
    let b = h(&m.p2, x1)?;
    let c = h(&m.q1, x2)?;
    let d = h(&m.q2, x2)?;
    // d/dz HC(x₁) = −HC'/2g, d/dz HC(x₂) = +HC'/2g
    let left = |v: &HeunValue, k: f64| (k * em * v.value, k * em * (-g * v.value - v.derivative / (2.0 * g)));
    let right = |v: &HeunValue, k: f64| (k * ep * v.value, k * ep * (g * v.value + v.derivative / (2.0 * g)));
    Ok(Solutions {
        phi1_1: left(&a, 1.0),
        phi2_1: left(&b, m.c_plus),
        phi1_2: right(&c, m.c_minus),
        phi2_2: right(&d, 1.0),
    })
}

/// Residuals of the first-order Bargmann system for both solution pairs,
/// each normalised by the largest term.
pub fn system_residuals(m: &RabiHeunMap, z: f64) -> Result<[f64; 4]> {
    let s = solutions(m, z)?;
    let (g, e, d, eps) = (m.g, m.energy, m.delta, m.eps);
    let eq = |p1: (f64, f64), p2: (f64, f64)| {
        let a = [(z + g) * p1.1, (g * z + eps - e) * p1.0, d * p2.0];
        let b = [(z - g) * p2.1, -(g * z + eps + e) * p2.0, d * p1.0];
        let n = |t: [f64; 3]| t.iter().sum::<f64>() / t.iter().map(|v| v.abs()).fold(1e-300, f64::max);
        (n(a), n(b))
    };
    let (r1, r2) = eq(s.phi1_1, s.phi2_1);
    let (r3, r4) = eq(s.phi1_2, s.phi2_2);
    Ok([r1, r2, r3, r4])
}

fn rabi_map(e: f64, params: &ModelParams) -> Result<RabiHeunMap> {
    if params.variant != Variant::Rabi {
        return Err(RabiError::Domain("weak conditions are defined for the Rabi model".into()));
    }
    heun_map(e, params)
}

/// F₁..F₄ at (E, z), Rabi model.
pub fn f_components(e: f64, z: f64, params: &ModelParams) -> Result<[f64; 4]> {
    let m = rabi_map(e, params)?;
    let g = m.g;
    let (x1, x2) = check_z(g, z)?;
    let hc1_x1 = hc_eval(&m.p1, x1, HC_TOL)?;
    let hc2_x1 = hc_eval(&m.p2, x1, HC_TOL)?;
    let hc1_x2 = hc_eval(&m.p1, x2, HC_TOL)?;
    let hc2_x2 = hc_eval(&m.p2, x2, HC_TOL)?;
    let w = (g + z) / (2.0 * g);
    Ok([
        (e + g * g) * hc1_x1.value + w * hc1_x1.derivative,
        hc2_x1.value,
        hc1_x2.value,
        (e - g * g - 2.0 * g * z) * hc2_x2.value - w * hc2_x2.derivative,
    ])
}

/// G^±₁..G^±₄ at (E, z).
pub fn weak_conditions(e: f64, z: f64, sign: GSign, params: &ModelParams) -> Result<[f64; 4]> {
    let s = params.scaled();
    let (g, d) = (s.g, s.delta);
    if e + g * g == 0.0 {
        return Err(RabiError::PoleProximity { x: 0.0, pole: 0.0, guard: 0.0 });
    }
    let [f1, f2, f3, f4] = f_components(e, z, params)?;
    let c = d / (e + g * g);
    let sg = sign.value();
    let e2 = (2.0 * g * z).exp();
    Ok([
        f1 + sg * c * e2 * f4,
        f3 + sg * c * f2 / e2,
        f1 - sg * d * e2 * f3,
        f4 - sg * d * f2 / e2,
    ])
}

/// G^±₁..G^±₄ each divided by the sum of its two term magnitudes.
pub fn weak_conditions_normalized(e: f64, z: f64, sign: GSign, params: &ModelParams) -> Result<[f64; 4]> {
    let s = params.scaled();
    let (g, d) = (s.g, s.delta);
    let [f1, f2, f3, f4] = f_components(e, z, params)?;
    let raw = weak_conditions(e, z, sign, params)?;
    let c = d / (e + g * g);
    let e2 = (2.0 * g * z).exp();
    let scale = [
        f1.abs() + (c * e2 * f4).abs(),
        f3.abs() + (c * f2 / e2).abs(),
        f1.abs() + (d * e2 * f3).abs(),
        f4.abs() + (d * f2 / e2).abs(),
    ];
    let mut out = [0.0; 4];
    for k in 0..4 {
        out[k] = raw[k] / scale[k].max(1e-300);
    }
    Ok(out)
}

/// K^±(E,z) = e^{−gz}G^±₁ ∓ Δe^{gz}G^±₂.
pub fn k_condition(e: f64, z: f64, sign: GSign, params: &ModelParams) -> Result<f64> {
    let s = params.scaled();
    let [g1, g2, _, _] = weak_conditions(e, z, sign, params)?;
    Ok((-s.g * z).exp() * g1 - sign.value() * s.delta * (s.g * z).exp() * g2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WhichWronskian {
    W1,
    W2,
}

/// W₁ = φ₁²φ₁¹' − φ₁¹φ₁²', W₂ = φ₂²φ₂¹' − φ₂¹φ₂²' (Rabi or asymmetric).
pub fn wronskian(e: f64, z: f64, which: WhichWronskian, params: &ModelParams) -> Result<f64> {
    let m = heun_map(e, params)?;
    for p in [&m.p1, &m.p2, &m.q1, &m.q2] {
        if p.degenerate_frobenius() {
            return Err(RabiError::Degenerate(format!(
                "integer beta = {} at E = {e}: the two solution sets are not comparable",
                p.beta
            )));
        }
    }
    let s = solutions(&m, z)?;
    Ok(match which {
        WhichWronskian::W1 => s.phi1_2.0 * s.phi1_1.1 - s.phi1_1.0 * s.phi1_2.1,
        WhichWronskian::W2 => s.phi2_2.0 * s.phi2_1.1 - s.phi2_1.0 * s.phi2_2.1,
    })
}

/// Wronskian normalised by the size of its two products.
pub fn wronskian_normalized(e: f64, z: f64, which: WhichWronskian, params: &ModelParams) -> Result<f64> {
    let m = heun_map(e, params)?;
    let s = solutions(&m, z)?;
    let (a, b) = match which {
        WhichWronskian::W1 => (s.phi1_2.0 * s.phi1_1.1, s.phi1_1.0 * s.phi1_2.1),
        WhichWronskian::W2 => (s.phi2_2.0 * s.phi2_1.1, s.phi2_1.0 * s.phi2_2.1),
    };
    Ok((a - b) / (a.abs() + b.abs()).max(1e-300))
}

/// The 8-point certification grid, equally spaced inside (−0.6g, 0.6g).
pub fn z_grid(g: f64) -> [f64; 8] {
    let mut out = [0.0; 8];
    for (k, z) in out.iter_mut().enumerate() {
        *z = -0.6 * g + 1.2 * g * (k + 1) as f64 / 9.0;
    }
    out
}

/// Largest normalised |W₁| over the z grid: small iff E is an eigenvalue.
pub fn wronskian_certificate(e: f64, params: &ModelParams) -> Result<f64> {
    let g = params.scaled().g;
    let mut worst = 0.0f64;
    for z in z_grid(g) {
        worst = worst.max(wronskian_normalized(e, z, WhichWronskian::W1, params)?.abs());
    }
    Ok(worst)
}
