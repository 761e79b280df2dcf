//! Time evolution, population inversion and closed-form dynamics.

use crate::error::{RabiError, Result};
use crate::linalg::{self, Eigen};
use crate::model::{self, ModelParams};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_SAMPLES: usize = 2048;
/// Largest weight allowed in the two outermost Fock levels.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// Largest Fock cutoff the spectral propagator will diagonalise.
pub const MAX_FOCK: usize = 4096;
const MAX_ENLARGE: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
    pub time: f64,
}

impl QuantumState {
    pub fn n_max(&self) -> usize {
        self.up.len() - 1
    }

    pub fn fock(up: bool, n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(RabiError::Domain(format!("Fock level {n} above n_max = {n_max}")));
        }
        let mut s = QuantumState { up: vec![Complex64::ZERO; n_max + 1], down: vec![Complex64::ZERO; n_max + 1], time: 0.0 };
        if up {
            s.up[n] = Complex64::ONE;
        } else {
            s.down[n] = Complex64::ONE;
        }
        Ok(s)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.up.iter().chain(&self.down).map(|c| c.norm_sqr()).sum()
    }

    /// P = Σ |c↑|² − |c↓|²
    pub fn inversion(&self) -> f64 {
        self.up.iter().map(|c| c.norm_sqr()).sum::<f64>() - self.down.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn photon_number(&self) -> f64 {
        (0..self.up.len())
            .map(|n| n as f64 * (self.up[n].norm_sqr() + self.down[n].norm_sqr()))
            .sum()
    }

    /// ⟨self|other⟩ over the common Fock range.
    pub fn overlap(&self, other: &QuantumState) -> Complex64 {
        let m = self.up.len().min(other.up.len());
        (0..m)
            .map(|n| self.up[n].conj() * other.up[n] + self.down[n].conj() * other.down[n])
            .sum()
    }

    /// Weight in the two highest Fock levels.
    pub fn boundary_weight(&self) -> f64 {
        let n = self.up.len();
        (n.saturating_sub(2)..n).map(|k| self.up[k].norm_sqr() + self.down[k].norm_sqr()).sum()
    }

    pub fn resized(&self, n_max: usize) -> QuantumState {
        let mut s = self.clone();
        s.up.resize(n_max + 1, Complex64::ZERO);
        s.down.resize(n_max + 1, Complex64::ZERO);
        s
    }

    fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::ZERO; 2 * self.up.len()];
        for n in 0..self.up.len() {
            v[model::basis_index(true, n)] = self.up[n];
            v[model::basis_index(false, n)] = self.down[n];
        }
        v
    }

    fn from_dense(v: &[Complex64], time: f64) -> QuantumState {
        let n = v.len() / 2;
        QuantumState {
            up: (0..n).map(|k| v[model::basis_index(true, k)]).collect(),
            down: (0..n).map(|k| v[model::basis_index(false, k)]).collect(),
            time,
        }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// n_max needed so the Poisson tail of a coherent state is negligible.
pub fn coherent_n_max(alpha: f64) -> usize {
    let a = alpha.abs();
    (a * a + 10.0 * a + 20.0).ceil() as usize
}

/// Coherent state e^{−α²/2} Σ αⁿ/√n! |level, n⟩.
pub fn coherent_initial(alpha: f64, up: bool, n_max: usize) -> Result<QuantumState> {
    if !alpha.is_finite() {
        return Err(RabiError::Domain("alpha must be finite".into()));
    }
    if n_max < coherent_n_max(alpha) {
        return Err(RabiError::Domain(format!(
            "n_max = {n_max} too small for alpha = {alpha}; need at least {}",
            coherent_n_max(alpha)
        )));
    }
    let mut s = QuantumState::fock(up, 0, n_max)?;
    if alpha != 0.0 {
        let la = alpha.abs().ln();
        let coeffs = if up { &mut s.up } else { &mut s.down };
        for (n, c) in coeffs.iter_mut().enumerate() {
            let mag = (-0.5 * alpha * alpha + n as f64 * la - 0.5 * ln_factorial(n)).exp();
            let sign = if alpha < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            *c = Complex64::new(sign * mag, 0.0);
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Spectral,
    Ode,
    ClosedRwa,
    ClosedDeepStrong,
    ClosedDelta0,
}

#[derive(Debug, Clone, Serialize)]
pub struct DynamicsTrace {
    pub times: Vec<f64>,
    pub inversion: Vec<f64>,
    /// |⟨ψ(0)|ψ(t)⟩|²
    pub revival: Option<Vec<f64>>,
    pub method: Method,
    pub n_max: usize,
    pub max_norm_drift: f64,
    pub max_boundary_weight: f64,
    /// largest populated ΔE times the sampling step exceeds π
    pub aliased: bool,
}

/// `samples` uniform points on [0, t_max] (2048 by default).
pub fn time_grid(t_max: f64, samples: Option<usize>) -> Vec<f64> {
    let n = samples.unwrap_or(DEFAULT_SAMPLES).max(2);
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

struct Block {
    idx: Vec<usize>,
    eig: Eigen,
}

fn blocks(params: &ModelParams, n_max: usize) -> Result<Vec<Block>> {
    match model::chains(params, n_max) {
        Some(chs) => chs
            .iter()
            .map(|c| {
                Ok(Block {
                    idx: c.sites.iter().map(|&(up, n)| model::basis_index(up, n)).collect(),
                    eig: linalg::tridiag_eigen(&c.diag, &c.offdiag)?,
                })
            })
            .collect(),
        None => {
            let h = model::build_hamiltonian(params, n_max)?;
            Ok(vec![Block { idx: (0..2 * (n_max + 1)).collect(), eig: linalg::dense_eigen(&h.dense) }])
        }
    }
}

struct Spectral {
    /// (energy, amplitude, block, eigenvector index)
    modes: Vec<(f64, Complex64, usize, usize)>,
    blocks: Vec<Block>,
    dim: usize,
}

impl Spectral {
    fn new(state: &QuantumState, params: &ModelParams) -> Result<Self> {
        let n_max = state.n_max();
        let psi = state.to_dense();
        let blocks = blocks(params, n_max)?;
        let mut modes = Vec::new();
        for (b, blk) in blocks.iter().enumerate() {
            for (k, (e, v)) in blk.eig.values.iter().zip(&blk.eig.vectors).enumerate() {
                let amp: Complex64 = blk.idx.iter().zip(v).map(|(&i, &c)| psi[i] * c).sum();
                if amp.norm_sqr() > 1e-30 {
                    modes.push((*e, amp, b, k));
                }
            }
        }
        Ok(Spectral { modes, blocks, dim: psi.len() })
    }

    fn at(&self, t: f64) -> QuantumState {
        let mut psi = vec![Complex64::ZERO; self.dim];
        for &(e, amp, b, k) in &self.modes {
            let c = amp * Complex64::from_polar(1.0, -e * t);
            let blk = &self.blocks[b];
            for (&i, &v) in blk.idx.iter().zip(&blk.eig.vectors[k]) {
                psi[i] += c * v;
            }
        }
        QuantumState::from_dense(&psi, t)
    }

    fn max_frequency(&self) -> f64 {
        let (lo, hi) = self
            .modes
            .iter()
            .filter(|m| m.1.norm_sqr() > 1e-12)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), m| (l.min(m.0), h.max(m.0)));
        if hi > lo { hi - lo } else { 0.0 }
    }
}

fn initial_n_max(state: &QuantumState, params: &ModelParams) -> usize {
    let s = params.scaled();
    let reach = match params.variant {
        model::Variant::TwoPhoton => 40,
        _ => (16.0 * s.g * s.g).ceil() as usize + 40,
    };
    let populated = (0..=state.n_max())
        .rev()
        .find(|&n| state.up[n].norm_sqr() + state.down[n].norm_sqr() > 1e-16)
        .unwrap_or(0);
    state.n_max().max(populated + reach)
}

/// Evolved states on `times`, enlarging the truncation until the boundary
/// weight stays below [`LEAKAGE_TOL`].
pub fn propagate_states(state: &QuantumState, params: &ModelParams, times: &[f64]) -> Result<(Vec<QuantumState>, f64, bool)> {
    params.validate()?;
    let mut n_max = initial_n_max(state, params);
    for _ in 0..=MAX_ENLARGE {
        if n_max > MAX_FOCK {
            return Err(RabiError::NonConvergence(format!(
                "propagation needs n_max = {n_max}, above the cap of {MAX_FOCK} photons"
            )));
        }
        let s0 = state.resized(n_max);
        let sp = Spectral::new(&s0, params)?;
        let states: Vec<QuantumState> = times.par_iter().map(|&t| sp.at(t)).collect();
        let leak = states.iter().map(|s| s.boundary_weight()).fold(0.0, f64::max);
        if leak <= LEAKAGE_TOL {
            let dt = times.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
            let aliased = sp.max_frequency() * dt > std::f64::consts::PI;
            return Ok((states, leak, aliased));
        }
        n_max *= 2;
    }
    Err(RabiError::NonConvergence(format!(
        "truncation leakage above {LEAKAGE_TOL:e} even at n_max = {}",
        n_max / 2
    )))
}

/// Spectral propagation: expand in eigenvectors, evolve phases, reassemble.
pub fn propagate(state: &QuantumState, params: &ModelParams, times: &[f64]) -> Result<DynamicsTrace> {
    let norm0 = state.norm_sqr();
    let (states, leak, aliased) = propagate_states(state, params, times)?;
    Ok(DynamicsTrace {
        times: times.to_vec(),
        inversion: states.iter().map(|s| s.inversion()).collect(),
        revival: Some(states.iter().map(|s| state.overlap(s).norm_sqr() / norm0).collect()),
        method: Method::Spectral,
        n_max: states.first().map_or(state.n_max(), |s| s.n_max()),
        max_norm_drift: states.iter().map(|s| (s.norm_sqr() - norm0).abs()).fold(0.0, f64::max),
        max_boundary_weight: leak,
        aliased,
    })
}

/// Adaptive Dormand–Prince 5(4) integration of i dψ/dt = Hψ (verification mode).
pub fn propagate_ode(state: &QuantumState, params: &ModelParams, times: &[f64], rtol: f64) -> Result<Vec<QuantumState>> {
    params.validate()?;
    let n_max = initial_n_max(state, params);
    let h = model::build_hamiltonian(params, n_max)?;
    let dim = h.dimension();
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    for i in 0..dim {
        for j in 0..dim {
            let v = h.dense[(i, j)];
            if v != 0.0 {
                rows[i].push((j, v));
            }
        }
    }
    let rhs = |y: &[Complex64]| -> Vec<Complex64> {
        rows.iter()
            .map(|r| {
                let s: Complex64 = r.iter().map(|&(j, v)| y[j] * v).sum();
                Complex64::new(s.im, -s.re)
            })
            .collect()
    };
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0,
    ];
    let mut y = state.resized(n_max).to_dense();
    let mut t = 0.0;
    let mut step: f64 = 1e-3;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < t {
            return Err(RabiError::Domain("ODE time grid must be non-decreasing from 0".into()));
        }
        while t < target {
            let hstep = step.min(target - t);
            let mut k: Vec<Vec<Complex64>> = Vec::with_capacity(7);
            for s in 0..7 {
                let ys: Vec<Complex64> = (0..dim)
                    .map(|i| y[i] + (0..s).map(|j| k[j][i] * (A[s][j] * hstep)).sum::<Complex64>())
                    .collect();
                k.push(rhs(&ys));
            }
            let mut err: f64 = 0.0;
            let mut y5 = vec![Complex64::ZERO; dim];
            for i in 0..dim {
                let d5: Complex64 = (0..7).map(|s| k[s][i] * B5[s]).sum();
                let d4: Complex64 = (0..7).map(|s| k[s][i] * B4[s]).sum();
                y5[i] = y[i] + d5 * hstep;
                let sc = rtol * (1e-3 + y[i].norm().max(y5[i].norm()));
                err = err.max(((d5 - d4) * hstep).norm() / sc);
            }
            if err <= 1.0 {
                t += hstep;
                y = y5;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            step = hstep * factor;
            if step < 1e-14 {
                return Err(RabiError::NonConvergence("ODE step size underflow".into()));
            }
        }
        out.push(QuantumState::from_dense(&y, target));
    }
    Ok(out)
}

/// P(t) = Σ |c↑_n(0)|² cos(2√(n+1) g t), valid at resonance 2Δ = ω.
pub fn p_rwa(state0: &QuantumState, params: &ModelParams, times: &[f64]) -> Result<DynamicsTrace> {
    if (2.0 * params.delta - params.omega).abs() > 1e-12 * params.omega {
        return Err(RabiError::Domain("RWA closed form needs 2*delta = omega".into()));
    }
    let w: Vec<f64> = state0.up.iter().map(|c| c.norm_sqr()).collect();
    let inversion = times
        .iter()
        .map(|&t| {
            w.iter()
                .enumerate()
                .map(|(n, p)| p * (2.0 * ((n + 1) as f64).sqrt() * params.g * t).cos())
                .sum()
        })
        .collect();
    Ok(closed(times, inversion, None, Method::ClosedRwa, state0.n_max()))
}

fn closed(times: &[f64], inversion: Vec<f64>, revival: Option<Vec<f64>>, method: Method, n_max: usize) -> DynamicsTrace {
    DynamicsTrace {
        times: times.to_vec(),
        inversion,
        revival,
        method,
        n_max,
        max_norm_drift: 0.0,
        max_boundary_weight: 0.0,
        aliased: false,
    }
}

/// Displaced-number-state overlap D_nm(x) via associated Laguerre polynomials.
pub fn d_nm(n: usize, m: usize, x: f64) -> f64 {
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let k = (m - n) as f64;
    let y = x * x;
    let (mut l0, mut l1) = (1.0, 1.0 + k - y);
    let lag = if n == 0 {
        1.0
    } else {
        for j in 1..n {
            let jf = j as f64;
            let l2 = ((2.0 * jf + 1.0 + k - y) * l1 - (jf + k) * l0) / (jf + 1.0);
            l0 = l1;
            l1 = l2;
        }
        l1
    };
    if lag == 0.0 {
        return 0.0;
    }
    let ln_pre = if x == 0.0 {
        if m == n { 0.0 } else { return 0.0 }
    } else {
        k * x.abs().ln()
    };
    let mag = (ln_pre + 0.5 * (ln_factorial(n) - ln_factorial(m)) - 0.5 * y).exp();
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 } * if x < 0.0 && (m - n) % 2 == 1 { -1.0 } else { 1.0 };
    sign * mag * lag
}

/// Photon cutoff of the deep-strong double sum: Poisson weight of the
/// initial coherent state above 1e−14.
pub fn deep_strong_cutoff(alpha: f64) -> usize {
    let a2 = alpha * alpha;
    let mut n = 0;
    loop {
        let ln_w = -a2 + if a2 > 0.0 { n as f64 * a2.ln() } else { 0.0 } - ln_factorial(n);
        if (n as f64) > a2 && ln_w < (1e-14f64).ln() {
            return n.max(1);
        }
        n += 1;
    }
}

/// Deep-strong closed form, coefficients taken literally, with the phase read as ΔE·t.
pub fn p_deep_strong(params: &ModelParams, alpha: f64, times: &[f64]) -> Result<DynamicsTrace> {
    params.validate()?;
    let s = params.scaled();
    let x = 2.0 * s.g;
    let cut = deep_strong_cutoff(alpha);
    let pre = (-(s.g - alpha).powi(2)).exp();
    let f = |n: usize, plus: bool| {
        let par = if n % 2 == 0 { 1.0 } else { -1.0 };
        pre * if plus { 1.0 + par } else { 1.0 - par }
    };
    let energy = |m: usize, plus: bool| {
        let d = s.delta * d_nm(m, m, x);
        m as f64 - s.g * s.g + if plus { d } else { -d }
    };
    let mut terms = Vec::new();
    for n in 0..=cut {
        let a = f(n, true).powi(2) + f(n, false).powi(2);
        for m in 0..=cut {
            let d = d_nm(n, m, x);
            let b = d * f(n, true) * f(m, true);
            let mu = d * f(n, false) * f(m, false);
            let norm = 4.0 * (a * a + b * b + mu * mu).sqrt();
            if norm == 0.0 {
                continue;
            }
            let dp = energy(n, true) - energy(m, true);
            let dm = energy(n, false) - energy(m, false);
            terms.push((a * b / norm, dp, a * mu / norm, dm));
        }
    }
    let inversion = times
        .par_iter()
        .map(|&t| {
            let wt = params.omega * t;
            -terms.iter().map(|&(cb, dp, cm, dm)| cb * (dp * wt).cos() - cm * (dm * wt).cos()).sum::<f64>()
        })
        .collect();
    Ok(closed(times, inversion, None, Method::ClosedDeepStrong, cut))
}

/// Δ = 0 from |↓,0⟩: survival e^{−|α(t)|²} and P(t) = −e^{−2|α(t)|²},
/// α(t) = (g/ω)(e^{−iωt} − 1).
pub fn delta0_revival(g: f64, omega: f64, times: &[f64]) -> DynamicsTrace {
    let a2: Vec<f64> = times
        .iter()
        .map(|&t| {
            let a = Complex64::from_polar(1.0, -omega * t) - 1.0;
            (a * (g / omega)).norm_sqr()
        })
        .collect();
    closed(
        times,
        a2.iter().map(|v| -(-2.0 * v).exp()).collect(),
        Some(a2.iter().map(|v| (-v).exp()).collect()),
        Method::ClosedDelta0,
        0,
    )
}

/// Local maximum of `values` within `half_width` of `t0`, refined by a parabola.
pub fn peak_near(times: &[f64], values: &[f64], t0: f64, half_width: f64) -> Option<(f64, f64)> {
    let idx: Vec<usize> = (0..times.len()).filter(|&i| (times[i] - t0).abs() <= half_width).collect();
    let &best = idx.iter().max_by(|&&a, &&b| values[a].total_cmp(&values[b]))?;
    if best == 0 || best + 1 >= times.len() {
        return Some((times[best], values[best]));
    }
    let (y0, y1, y2) = (values[best - 1], values[best], values[best + 1]);
    let den = y0 - 2.0 * y1 + y2;
    let dt = times[best + 1] - times[best];
    let shift = if den != 0.0 { 0.5 * (y0 - y2) / den } else { 0.0 };
    Some((times[best] + shift.clamp(-1.0, 1.0) * dt, y1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_state_moments() {
        let s = coherent_initial(10f64.sqrt(), true, 80).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((s.photon_number() - 10.0).abs() < 1e-10);
        let s = coherent_initial(8.0, false, coherent_n_max(8.0)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(coherent_initial(0.0, true, 20).unwrap(), QuantumState::fock(true, 0, 20).unwrap());
        assert!(coherent_initial(3.0, true, 10).is_err());
    }

    #[test]
    fn displacement_overlaps() {
        let x: f64 = 1.3;
        assert!((d_nm(0, 0, x) - (-x * x / 2.0).exp()).abs() < 1e-15);
        assert!((d_nm(1, 1, x) - (x * x - 1.0) * (-x * x / 2.0).exp()).abs() < 1e-15);
        assert!((d_nm(2, 0, x) - d_nm(0, 2, x)).abs() < 1e-15);
        // direct alternating sum
        let direct = |n: usize, m: usize| -> f64 {
            let f = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
            let s: f64 = (0..=n.min(m))
                .map(|i| {
                    (-1f64).powi(i as i32) * (f(n) * f(m)).sqrt() * x.powi((n + m - 2 * i) as i32)
                        / (f(i) * f(m - i) * f(n - i))
                })
                .sum();
            s * (-x * x / 2.0).exp()
        };
        for (n, m) in [(3, 5), (4, 4), (6, 2)] {
            assert!((d_nm(n, m, x) - direct(n, m)).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_matches_ode() {
        let p = ModelParams::rabi(0.5, 0.3);
        let s0 = coherent_initial(1.5, true, coherent_n_max(1.5)).unwrap();
        let times = time_grid(6.0, Some(13));
        let (spectral, _, _) = propagate_states(&s0, &p, &times).unwrap();
        let ode = propagate_ode(&s0, &p, &times, 1e-11).unwrap();
        for (a, b) in spectral.iter().zip(&ode) {
            assert!(a.overlap(b).norm() > 1.0 - 1e-8, "{}", a.overlap(b).norm());
        }
    }

    #[test]
    fn single_fock_rwa_is_pure_cosine() {
        let s = QuantumState::fock(true, 3, 10).unwrap();
        let p = ModelParams::rabi(0.5, 0.1);
        let tr = p_rwa(&s, &p, &[0.0, 1.0, 2.5]).unwrap();
        for (t, v) in tr.times.iter().zip(&tr.inversion) {
            assert!((v - (4.0 * 0.1 * t).cos()).abs() < 1e-15);
        }
        assert!(p_rwa(&s, &ModelParams::rabi(0.4, 0.1), &[0.0]).is_err());
    }

    #[test]
    fn delta0_closed_form_matches_propagation() {
        let p = ModelParams::rabi(0.0, 2.0);
        let s0 = QuantumState::fock(false, 0, 10).unwrap();
        let times = time_grid(4.0 * std::f64::consts::PI, Some(201));
        let tr = propagate(&s0, &p, &times).unwrap();
        let cf = delta0_revival(2.0, 1.0, &times);
        let rev = tr.revival.unwrap();
        let crev = cf.revival.unwrap();
        for i in 0..times.len() {
            assert!((rev[i] - crev[i]).abs() < 1e-6);
            assert!((tr.inversion[i] - cf.inversion[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn parity_confinement() {
        let p = ModelParams::rabi(0.7, 0.8);
        let s0 = QuantumState::fock(false, 0, 10).unwrap();
        let (states, _, _) = propagate_states(&s0, &p, &[0.0, 3.0, 7.0]).unwrap();
        for s in states {
            // p = +1 chain: |↓, even⟩ and |↑, odd⟩
            let w: f64 = (0..s.up.len())
                .map(|n| if n % 2 == 0 { s.down[n].norm_sqr() } else { s.up[n].norm_sqr() })
                .sum();
            assert!(w > 1.0 - 1e-10);
        }
    }
}
