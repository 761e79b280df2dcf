//! Three-term recurrences and the G-functions built from them.
//!
//! All functions take the physical [`ModelParams`] but evaluate in units of
//! ω = 1; spectral variables (`x`, `E`) are dimensionless.

use crate::error::{RabiError, Result};
use crate::model::{ModelParams, Parity, TwoPhotonClass, Variant};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GSign {
    Plus,
    Minus,
}

impl GSign {
    pub fn value(self) -> f64 {
        match self {
            GSign::Plus => 1.0,
            GSign::Minus => -1.0,
        }
    }
}

/// Parity sector whose levels are the zeros of Braak's G with the given sign.
/// At g → 0 the zero of G_+ sits at x = Δ, i.e. |↑,0⟩ with Π = −1; the
/// spectrum module re-derives this from the oracle and asserts it.
pub const fn braak_parity(sign: GSign) -> Parity {
    match sign {
        GSign::Plus => Parity::Minus,
        GSign::Minus => Parity::Plus,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesConfig {
    pub tol: f64,
    pub cap: usize,
    pub window: usize,
    pub pole_guard: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { tol: 1e-13, cap: 512, window: 5, pole_guard: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GEvaluation {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
    pub near_pole: bool,
    pub converged: bool,
}

/// Running sums of several series that stop together.
struct Tail {
    sums: Vec<f64>,
    scale: f64,
    quiet: usize,
    last_big: f64,
    n: usize,
}

impl Tail {
    fn new(k: usize) -> Self {
        Tail { sums: vec![0.0; k], scale: 0.0, quiet: 0, last_big: 0.0, n: 0 }
    }

    /// Adds one term to each sum; returns true once converged.
    fn push(&mut self, terms: &[f64], cfg: &SeriesConfig) -> bool {
        let mut big = 0.0f64;
        for (s, t) in self.sums.iter_mut().zip(terms) {
            *s += t;
            big = big.max(t.abs());
            self.scale = self.scale.max(s.abs()).max(t.abs());
        }
        self.n += 1;
        self.last_big = big;
        if big <= cfg.tol * self.scale {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= cfg.window
    }

    fn tail_bound(&self) -> f64 {
        if self.scale > 0.0 {
            self.last_big / self.scale
        } else {
            0.0
        }
    }
}

fn check_pole(x: f64, pole: f64, guard: f64) -> Result<()> {
    if (x - pole).abs() < guard {
        Err(RabiError::PoleProximity { x, pole, guard })
    } else {
        Ok(())
    }
}

fn check_integer_poles(x: f64, guard: f64) -> Result<()> {
    let m = x.round();
    if m >= 0.0 {
        check_pole(x, m, guard)?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct KSequence {
    pub x: f64,
    pub k: Vec<f64>,
    /// min over n ≤ N of |x − n|.
    pub pole_proximity: f64,
}

/// Braak coefficients K_0..K_{n_terms-1} (unscaled; needs g > 0).
pub fn k_coeffs(x: f64, params: &ModelParams, n_terms: usize) -> Result<KSequence> {
    let s = params.scaled();
    if s.g <= 0.0 {
        return Err(RabiError::Domain("K_n needs g > 0 (Ω has a 1/2g prefactor)".into()));
    }
    let guard = SeriesConfig::default().pole_guard;
    let mut prox = f64::INFINITY;
    for n in 0..n_terms {
        prox = prox.min((x - n as f64).abs());
    }
    if prox < guard {
        return Err(RabiError::PoleProximity { x, pole: x.round(), guard });
    }
    let omega = |m: f64| (m + 4.0 * s.g * s.g - x - s.delta * s.delta / (m - x)) / (2.0 * s.g);
    let mut k = Vec::with_capacity(n_terms);
    for n in 0..n_terms {
        let v = match n {
            0 => 1.0,
            1 => omega(0.0),
            _ => (omega((n - 1) as f64) * k[n - 1] - k[n - 2]) / n as f64,
        };
        k.push(v);
    }
    Ok(KSequence { x, k, pole_proximity: prox })
}

/// K_n(x) gⁿ for n = 0..=n, via the scaled recurrence (finite at g = 0).
pub fn scaled_k(x: f64, delta: f64, g: f64, shift: f64, n: usize) -> Vec<f64> {
    // shift = ε enters as in the asymmetric K⁻ sequence; 0 for Rabi
    let w = |m: f64| 0.5 * (m + 4.0 * g * g - shift - x - delta * delta / (m - x + shift));
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let v = match j {
            0 => 1.0,
            1 => w(0.0),
            _ => (w((j - 1) as f64) * out[j - 1] - g * g * out[j - 2]) / j as f64,
        };
        out.push(v);
    }
    out
}

/// Braak's G_±(x) = Σ K_n(x)(1 ∓ Δ/(x−n)) gⁿ.
pub fn braak_g(x: f64, sign: GSign, params: &ModelParams, cfg: &SeriesConfig) -> Result<GEvaluation> {
    let s = params.scaled();
    check_integer_poles(x, cfg.pole_guard)?;
    let (d, g) = (s.delta, s.g);
    let w = |m: f64| 0.5 * (m + 4.0 * g * g - x - d * d / (m - x));
    let mut tail = Tail::new(1);
    let (mut km2, mut km1) = (0.0, 0.0);
    for n in 0..cfg.cap {
        let kn = match n {
            0 => 1.0,
            _ => (w((n - 1) as f64) * km1 - g * g * km2) / n as f64,
        };
        let term = kn * (1.0 - sign.value() * d / (x - n as f64));
        km2 = km1;
        km1 = kn;
        if tail.push(&[term], cfg) {
            return Ok(GEvaluation {
                value: tail.sums[0],
                terms_used: n + 1,
                tail_bound: tail.tail_bound(),
                near_pole: false,
                converged: true,
            });
        }
    }
    Ok(GEvaluation {
        value: tail.sums[0],
        terms_used: cfg.cap,
        tail_bound: tail.tail_bound(),
        near_pole: false,
        converged: false,
    })
}

#[derive(Debug, Clone)]
pub struct AsymKSequences {
    /// K_n⁺ gⁿ.
    pub plus: Vec<f64>,
    /// K_n⁻ gⁿ.
    pub minus: Vec<f64>,
}

pub fn asym_k_coeffs(x: f64, params: &ModelParams, n: usize) -> AsymKSequences {
    let s = params.scaled();
    AsymKSequences {
        plus: scaled_k(x, s.delta, s.g, -s.eps, n),
        minus: scaled_k(x, s.delta, s.g, s.eps, n),
    }
}

/// Pole locations n ± ε (n ≥ 0) of the asymmetric G-function up to `x_max`.
pub fn asym_poles(eps: f64, x_max: f64) -> Vec<f64> {
    let mut p = Vec::new();
    let mut n = 0.0;
    while n - eps.abs() <= x_max + 1.0 {
        p.push(n + eps);
        if eps != 0.0 {
            p.push(n - eps);
        }
        n += 1.0;
    }
    p.sort_by(f64::total_cmp);
    p.dedup();
    p
}

/// G_ε = Δ²R̄⁺R̄⁻ − R⁺R⁻ of the asymmetric model.
pub fn asym_g(x: f64, params: &ModelParams, cfg: &SeriesConfig) -> Result<GEvaluation> {
    let s = params.scaled();
    let (d, g, e) = (s.delta, s.g, s.eps);
    for pole in [x - e, x + e] {
        // x near n + ε or n − ε
        let m = pole.round();
        if m >= 0.0 && (pole - m).abs() < cfg.pole_guard {
            return Err(RabiError::PoleProximity { x, pole: x - (pole - m), guard: cfg.pole_guard });
        }
    }
    let wp = |m: f64| 0.5 * (m + 4.0 * g * g + e - x - d * d / (m - x - e));
    let wm = |m: f64| 0.5 * (m + 4.0 * g * g - e - x - d * d / (m - x + e));
    let mut tail = Tail::new(4);
    let (mut p2, mut p1, mut m2, mut m1) = (0.0, 0.0, 0.0, 0.0);
    let mut n_used = cfg.cap;
    let mut converged = false;
    for n in 0..cfg.cap {
        let nf = n as f64;
        let (kp, km) = if n == 0 {
            (1.0, 1.0)
        } else {
            (
                (wp(nf - 1.0) * p1 - g * g * p2) / nf,
                (wm(nf - 1.0) * m1 - g * g * m2) / nf,
            )
        };
        p2 = p1;
        p1 = kp;
        m2 = m1;
        m1 = km;
        let terms = [kp, km, kp / (x - nf + e), km / (x - nf - e)];
        if tail.push(&terms, cfg) {
            n_used = n + 1;
            converged = true;
            break;
        }
    }
    let [rp, rm, rbp, rbm] = [tail.sums[0], tail.sums[1], tail.sums[2], tail.sums[3]];
    Ok(GEvaluation {
        value: d * d * rbp * rbm - rp * rm,
        terms_used: n_used,
        tail_bound: tail.tail_bound(),
        near_pole: false,
        converged,
    })
}

/// Shifts of the anisotropic model: (√λ, α, x − E).
pub fn aniso_shifts(params: &ModelParams) -> (f64, f64, f64) {
    let s = params.scaled();
    let (d, g, l) = (s.delta, s.g, s.lambda);
    let r = l.sqrt();
    let alpha = -(1.0 - l) * g * g * r - 2.0 * r * d / (1.0 + l);
    let shift = g * g * l - (1.0 - l) * d / (1.0 + l);
    (r, alpha, shift)
}

/// Extra singular points of the anisotropic recurrence where a_n(x) = 0.
pub fn aniso_extra_poles(params: &ModelParams, x_max: f64) -> Vec<f64> {
    let s = params.scaled();
    let l = s.lambda;
    let off = -(1.0 - l) * (1.0 - l) * s.g * s.g / 2.0 - (1.0 - l) * s.delta / (1.0 + l);
    if off == 0.0 {
        return vec![];
    }
    (0..)
        .map(|n| n as f64 + off)
        .take_while(|&p| p <= x_max + 1.0)
        .filter(|&p| p >= -2.0 - s.delta - s.g * s.g)
        .collect()
}

/// G_±^λ of the anisotropic model at z, as a function of x = E + g²λ − (1−λ)Δ/(1+λ).
pub fn aniso_g(x: f64, sign: GSign, params: &ModelParams, z: f64, cfg: &SeriesConfig) -> Result<GEvaluation> {
    let s = params.scaled();
    let l = s.lambda;
    if l < 0.0 {
        return Err(RabiError::Domain("anisotropy lambda < 0 is not defined by the sqrt(lambda) transform".into()));
    }
    if l == 0.0 || s.g == 0.0 {
        return Err(RabiError::Degenerate(
            "a_n = c_n = 0 at lambda = 0 or g = 0; use aniso_jc_levels".into(),
        ));
    }
    check_integer_poles(x, cfg.pole_guard)?;
    let (r, alpha, _) = aniso_shifts(params);
    let (d, g) = (s.delta, s.g);
    let b0 = 4.0 * g * g * l - 2.0 * (1.0 - l) * d / (1.0 + l) - x;
    let a = |n: f64| 2.0 * g * r * (n + 1.0) + (1.0 - l) * (n + 1.0) * g * alpha / (n - x);
    let b = |n: f64| n + b0 - alpha * alpha / (n - x) - (1.0 - l) * (1.0 - l) * g * g * n / (n - 1.0 - x);
    let c = |n: f64| -2.0 * g * r - (1.0 - l) * g * alpha / (n - 1.0 - x);

    // φ_i(z) = f_i(z + g√λ) e^{−g√λ z}; need f at y = ±z + g√λ
    let mut out = [0.0; 4]; // f1(y+), f2(y+), f1(y−), f2(y−)
    let mut used = 0;
    let mut conv = true;
    for (slot, zz) in [(0usize, z), (2usize, -z)] {
        let y = zz + g * r;
        if y == 0.0 {
            // only n = 0 survives: f2 = K_0, f1 = (αK_0 + (1−λ)gK_1)/(−x)
            let k1 = b(0.0) / a(0.0);
            out[slot] = (alpha + (1.0 - l) * g * k1) / -x;
            out[slot + 1] = 1.0;
            continue;
        }
        // t_n = K_n yⁿ
        let mut tail = Tail::new(2);
        let (mut tm1, mut t0) = (0.0, 1.0);
        let mut done = false;
        for n in 0..cfg.cap {
            let nf = n as f64;
            let an = a(nf);
            if an.abs() < 1e-300 {
                return Err(RabiError::PoleProximity { x, pole: x, guard: cfg.pole_guard });
            }
            let tp1 = y * (b(nf) * t0 + y * c(nf) * tm1) / an;
            let f1 = (alpha * t0 + (1.0 - l) * (nf + 1.0) * g * tp1 / y) / (nf - x);
            if tail.push(&[f1, t0], cfg) {
                used = used.max(n + 1);
                done = true;
                break;
            }
            tm1 = t0;
            t0 = tp1;
        }
        if !done {
            conv = false;
            used = cfg.cap;
        }
        out[slot] = tail.sums[0];
        out[slot + 1] = tail.sums[1];
    }
    let ez = (-g * r * z).exp();
    let emz = (g * r * z).exp();
    let (p1, p2) = (out[0] * ez, out[1] * ez); // φ(z)
    let (m1, m2) = (out[2] * emz, out[3] * emz); // φ(−z)
    let value = match sign {
        GSign::Plus => (1.0 + r) * (m1 - p2) - (1.0 - r) * (p1 + m2),
        GSign::Minus => (1.0 + r) * (m1 + p2) + (1.0 - r) * (p1 - m2),
    };
    Ok(GEvaluation { value, terms_used: used, tail_bound: 0.0, near_pole: false, converged: conv })
}

/// Energies at λ = 0 from b_N(x) = 0: (N − 2Δ − x)(N − 1 − x) = g²N, x = E − Δ,
/// for N = 0..=n_max, tagged with the parity (−1)^N of the excitation block.
pub fn aniso_jc_levels(params: &ModelParams, n_max: usize) -> Vec<(f64, Parity)> {
    let s = params.scaled();
    let (d, g) = (s.delta, s.g);
    let mut out = vec![(-d, Parity::Plus)];
    for n in 1..=n_max {
        let nf = n as f64;
        // in E: (N − Δ − E)(N − 1 + Δ − E) = g²N
        let mid = nf - 0.5;
        let half = ((d - 0.5) * (d - 0.5) + g * g * nf).sqrt();
        let p = if n % 2 == 0 { Parity::Plus } else { Parity::Minus };
        out.push((mid - half, p));
        out.push((mid + half, p));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// κ = (1 − √(1−4g²))/4g.
pub fn kappa(g: f64) -> f64 {
    if g == 0.0 {
        0.0
    } else {
        (1.0 - (1.0 - 4.0 * g * g).sqrt()) / (4.0 * g)
    }
}

#[derive(Debug, Clone)]
pub struct TwoPhotonSeries {
    pub q: Vec<f64>,
    pub k: Vec<f64>,
    pub kappa: f64,
    pub class: TwoPhotonClass,
}

/// Truncation order used by the two-photon condition.
pub const TWO_PHOTON_ORDER: usize = 256;

pub fn twophoton_series(e: f64, class: TwoPhotonClass, params: &ModelParams, order: usize) -> Result<TwoPhotonSeries> {
    params.validate()?;
    let s = params.scaled();
    let (d, g) = (s.delta, s.g);
    if params.variant != Variant::TwoPhoton {
        return Err(RabiError::Domain("two-photon series needs the two-photon model".into()));
    }
    if g <= 0.0 {
        return Err(RabiError::Domain("two-photon recurrence divides by g; need g > 0".into()));
    }
    let kap = kappa(g);
    let len = order + 2;
    let mut q = vec![0.0; len];
    let mut k = vec![0.0; len];
    let n0 = if class.is_odd() { 1 } else { 0 };
    q[n0] = 1.0;
    k[n0] = match class {
        TwoPhotonClass::One | TwoPhotonClass::I => 1.0,
        TwoPhotonClass::MinusOne | TwoPhotonClass::MinusI => -1.0,
    };
    let mut n = n0;
    while n + 2 < len {
        let nf = n as f64;
        let den = g * (nf + 2.0) * (nf + 1.0);
        let km2 = if n >= 2 { k[n - 2] } else { 0.0 };
        q[n + 2] = -(((1.0 - 4.0 * g * kap) * nf - 2.0 * g * kap - e) * q[n] + d * k[n]) / den;
        k[n + 2] = (((1.0 + 4.0 * g * kap) * nf + 2.0 * g * kap - e) * k[n] - 4.0 * kap * km2 + d * q[n]) / den;
        n += 2;
    }
    Ok(TwoPhotonSeries { q, k, kappa: kap, class })
}

/// Two-photon condition for class C: the highest retained coefficient K_M(E),
/// normalised by the largest |Q_n|, |K_n|. Its sign changes locate the levels.
pub fn twophoton_g(e: f64, class: TwoPhotonClass, params: &ModelParams) -> Result<GEvaluation> {
    let order = TWO_PHOTON_ORDER + usize::from(class.is_odd());
    let ser = twophoton_series(e, class, params, order)?;
    let scale = ser
        .q
        .iter()
        .chain(&ser.k)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if !scale.is_finite() {
        return Err(RabiError::NonConvergence(format!("two-photon coefficients overflow at E = {e}")));
    }
    Ok(GEvaluation {
        value: ser.k[order] / scale,
        terms_used: order + 1,
        tail_bound: ser.q[order].abs().max(ser.k[order].abs()) / scale,
        near_pole: false,
        converged: true,
    })
}

/// Values G_C(z, E) of the literal definition, from truncated series; these
/// vanish identically (see [`twophoton_g`] for the usable condition).
pub fn twophoton_gc_literal(e: f64, class: TwoPhotonClass, params: &ModelParams, z: f64) -> Result<f64> {
    let ser = twophoton_series(e, class, params, TWO_PHOTON_ORDER + 1)?;
    let kap = ser.kappa;
    // φ₁(z) = e^{−κz²}Σ Q_n zⁿ ; φ₂(iz) = e^{κz²}Σ K_n (iz)ⁿ
    let phi1: f64 = (-kap * z * z).exp() * ser.q.iter().enumerate().map(|(n, c)| c * z.powi(n as i32)).sum::<f64>();
    let mut re = 0.0;
    let mut im = 0.0;
    for (n, c) in ser.k.iter().enumerate() {
        let zn = c * z.powi(n as i32);
        match n % 4 {
            0 => re += zn,
            1 => im += zn,
            2 => re -= zn,
            _ => im -= zn,
        }
    }
    let w = (kap * z * z).exp();
    let (re, im) = (re * w, im * w);
    Ok(match class {
        TwoPhotonClass::One => re - phi1,
        TwoPhotonClass::MinusOne => re + phi1,
        TwoPhotonClass::I => -im + phi1,
        TwoPhotonClass::MinusI => -im - phi1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BogoliubovClass {
    Even,
    Odd,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhotonBogoliubov {
    pub u: f64,
    pub v: f64,
    pub beta: f64,
}

impl TwoPhotonBogoliubov {
    pub fn new(g: f64) -> Self {
        let beta = 1.0 / (1.0 - 4.0 * g * g).sqrt();
        TwoPhotonBogoliubov { u: ((beta + 1.0) / 2.0).sqrt(), v: ((beta - 1.0) / 2.0).sqrt(), beta }
    }
    /// x = ν² + Eβ.
    pub fn x_of_energy(&self, e: f64) -> f64 {
        self.v * self.v + e * self.beta
    }
    pub fn energy_of_x(&self, x: f64) -> f64 {
        (x - self.v * self.v) / self.beta
    }
    /// L_n = (n!/k!)(ν/2u)^k with k = ⌊n/2⌋.
    pub fn l_n(&self, n: usize) -> f64 {
        let k = n / 2;
        let c = self.v / (2.0 * self.u);
        let mut out = c.powi(k as i32);
        for j in (k + 1)..=n {
            out *= j as f64;
        }
        out
    }
}

/// Which two-photon symmetry class a Bogoliubov G-function describes.
pub fn bogoliubov_class(class: BogoliubovClass, sign: GSign) -> TwoPhotonClass {
    match (class, sign) {
        (BogoliubovClass::Even, GSign::Plus) => TwoPhotonClass::MinusOne,
        (BogoliubovClass::Even, GSign::Minus) => TwoPhotonClass::One,
        (BogoliubovClass::Odd, GSign::Minus) => TwoPhotonClass::I,
        (BogoliubovClass::Odd, GSign::Plus) => TwoPhotonClass::MinusI,
    }
}

/// G_{e,o}^± = Σ f_n [1 ∓ Δβ/(n − x)] L_n.
pub fn twophoton_bogoliubov_g(
    x: f64,
    class: BogoliubovClass,
    sign: GSign,
    params: &ModelParams,
    cfg: &SeriesConfig,
) -> Result<GEvaluation> {
    params.validate()?;
    let s = params.scaled();
    let (d, g) = (s.delta, s.g);
    if g <= 0.0 {
        return Err(RabiError::Domain("Bogoliubov recurrence divides by g; need g > 0".into()));
    }
    let n0 = match class {
        BogoliubovClass::Even => 0usize,
        BogoliubovClass::Odd => 1,
    };
    let m = x.round();
    if m >= 0.0 && (m as usize) % 2 == n0 % 2 {
        check_pole(x, m, cfg.pole_guard)?;
    }
    let b = TwoPhotonBogoliubov::new(g);
    let e = b.energy_of_x(x);
    let omega = |m: f64| {
        b.beta * m + b.v * b.v + 2.0 * g * b.u * b.v * (2.0 * m + 1.0) - e
            - d * d / ((m - b.v * b.v) / b.beta - e)
    };
    let den = b.u * b.v + g * b.beta;
    let c = b.v / (2.0 * b.u);
    // q_n = f_n L_n; q_{m+2} = Ω(m)/den · c/(k+1) q_m − m(m−1)c²/(k(k+1)) q_{m−2}
    let mut tail = Tail::new(1);
    let (mut qm2, mut q) = (0.0, 1.0);
    let mut mm = n0;
    let mut used = 0;
    let mut conv = false;
    while used < cfg.cap {
        let term = q * (1.0 - sign.value() * d * b.beta / (mm as f64 - x));
        used += 1;
        if tail.push(&[term], cfg) {
            conv = true;
            break;
        }
        let k = (mm / 2) as f64;
        let mf = mm as f64;
        let back = if mm >= 2 { mf * (mf - 1.0) * c * c / (k * (k + 1.0)) * qm2 } else { 0.0 };
        let next = omega(mf) / den * c / (k + 1.0) * q - back;
        qm2 = q;
        q = next;
        mm += 2;
    }
    Ok(GEvaluation { value: tail.sums[0], terms_used: used, tail_bound: tail.tail_bound(), near_pole: false, converged: conv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SeriesConfig {
        SeriesConfig::default()
    }

    #[test]
    fn small_coupling_zeros() {
        // Kₙgⁿ stays O(1) as g → 0, but every n ≥ 1 term carries x² − Δ²
        let p = ModelParams::rabi(0.4, 1e-9);
        let gp = |x| braak_g(x, GSign::Plus, &p, &cfg()).unwrap().value;
        let gm = |x| braak_g(x, GSign::Minus, &p, &cfg()).unwrap().value;
        assert!(gp(0.4).abs() < 1e-8);
        assert!(gm(-0.4).abs() < 1e-8);
        assert!(gp(-0.4).abs() > 0.1);
        assert!(gm(0.4).abs() > 0.1);
    }

    #[test]
    fn recurrence_identity_and_scaled_agreement() {
        let p = ModelParams::rabi(0.4, 0.7);
        let ks = k_coeffs(2.3, &p, 60).unwrap();
        let om = |m: f64| (m + 4.0 * 0.49 - 2.3 - 0.16 / (m - 2.3)) / 1.4;
        for n in 2..60 {
            let lhs = n as f64 * ks.k[n];
            let rhs = om((n - 1) as f64) * ks.k[n - 1] - ks.k[n - 2];
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        }
        let sc = scaled_k(2.3, 0.4, 0.7, 0.0, 59);
        for n in 0..60 {
            assert!((sc[n] - ks.k[n] * 0.7f64.powi(n as i32)).abs() < 1e-12 * sc[n].abs().max(1e-300) + 1e-300);
        }
        let nstar = (0..60).find(|&n| (n..60).all(|m| sc[m].abs() < 1e-14)).unwrap();
        assert!(nstar > 5 && nstar < 50, "n* = {nstar}");
    }

    #[test]
    fn zero_splitting_has_no_delta_pole() {
        let p = ModelParams::rabi(0.0, 0.7);
        let ks = k_coeffs(0.51, &p, 40).unwrap();
        assert!(ks.k.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn pole_guard_rejects_integers() {
        let p = ModelParams::rabi(0.4, 0.7);
        assert!(matches!(braak_g(2.0 + 1e-8, GSign::Plus, &p, &cfg()), Err(RabiError::PoleProximity { .. })));
        assert!(braak_g(-1.0, GSign::Plus, &p, &cfg()).is_ok());
    }

    #[test]
    fn tolerance_does_not_move_signs() {
        let p = ModelParams::rabi(0.4, 0.7);
        let loose = SeriesConfig { tol: 1e-12, ..cfg() };
        let tight = SeriesConfig { tol: 1e-14, ..cfg() };
        let mut x = -0.95;
        while x < 5.0 {
            for s in [GSign::Plus, GSign::Minus] {
                let a = braak_g(x, s, &p, &loose).unwrap().value;
                let b = braak_g(x, s, &p, &tight).unwrap().value;
                assert_eq!(a.signum(), b.signum());
            }
            x += 0.0173;
        }
    }

    #[test]
    fn asym_reduces_to_product_at_zero_bias() {
        let p = ModelParams::asymmetric(0.4, 0.7, 0.0);
        let r = ModelParams::rabi(0.4, 0.7);
        for x in [-0.6, 0.37, 1.8, 3.3] {
            let ge = asym_g(x, &p, &cfg()).unwrap().value;
            let gp = braak_g(x, GSign::Plus, &r, &cfg()).unwrap().value;
            let gm = braak_g(x, GSign::Minus, &r, &cfg()).unwrap().value;
            assert!((ge + gp * gm).abs() < 1e-12 * (gp * gm).abs().max(1.0));
        }
        let ks = asym_k_coeffs(1.3, &p, 40);
        for (a, b) in ks.plus.iter().zip(&ks.minus) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn asym_small_coupling_zeros() {
        let p = ModelParams::asymmetric(0.4, 1e-9, 0.3);
        let r = (0.16f64 + 0.09).sqrt();
        for x in [r, -r] {
            assert!(asym_g(x, &p, &cfg()).unwrap().value.abs() < 1e-7);
        }
        assert!(asym_g(0.1, &p, &cfg()).unwrap().value.abs() > 0.1);
    }

    #[test]
    fn jc_levels_match_blocks() {
        let p = ModelParams::anisotropic(0.4, 0.6, 0.0);
        let lv = aniso_jc_levels(&p, 3);
        let sp = crate::model::oracle_energies(&p, 5, 1e-12).unwrap();
        for (a, b) in lv.iter().zip(&sp.energies) {
            assert!((a.0 - b).abs() < 1e-10);
        }
    }

    #[test]
    fn bogoliubov_identities() {
        for g in [0.01, 0.2, 0.35, 0.49] {
            let b = TwoPhotonBogoliubov::new(g);
            assert!((b.u * b.u - b.v * b.v - 1.0).abs() < 1e-12);
            assert!((b.u * b.v - g * b.beta).abs() < 1e-12);
            assert!(b.beta >= 1.0);
        }
        let b0 = TwoPhotonBogoliubov::new(0.0);
        assert_eq!((b0.beta, b0.v), (1.0, 0.0));
        assert_eq!(b0.l_n(1), 1.0);
        for n in 3..12 {
            assert_eq!(b0.l_n(n), 0.0);
        }
        // closed form of the even-index sum
        let b = TwoPhotonBogoliubov::new(0.3);
        for k in 0..6usize {
            let mut sum = 0.0;
            let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
            for j in 0..=k {
                sum += (-b.v * b.v / (b.u * b.u)).powi(j as i32) / (fact(j) * fact(k - j));
            }
            let series = fact(2 * k) * (b.u * b.v).powi(k as i32) / 2f64.powi(k as i32) * sum;
            assert!((series - b.l_n(2 * k)).abs() < 1e-10 * series.abs().max(1.0));
        }
    }

    #[test]
    fn twophoton_class_parity_of_coefficients() {
        let p = ModelParams::two_photon(1.0, 0.25);
        for c in TwoPhotonClass::ALL {
            let s = twophoton_series(0.7, c, &p, 40).unwrap();
            let odd = usize::from(c.is_odd());
            for n in 0..40 {
                if n % 2 != odd {
                    assert_eq!((s.q[n], s.k[n]), (0.0, 0.0));
                }
            }
        }
        assert_eq!(kappa(0.0), 0.0);
        assert!(twophoton_g(0.3, TwoPhotonClass::One, &ModelParams::two_photon(1.0, 0.5)).is_err());
    }
}
