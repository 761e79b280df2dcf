//! Root scanning, labelled regular spectra and exceptional points.

use crate::error::{RabiError, Result};
use crate::heun;
use crate::model::{self, ModelParams, Parity, SymmetryLabel, TwoPhotonClass, Variant};
use crate::recurrences::{self, GSign, SeriesConfig};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootScanConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub scan_step: f64,
    pub bisection_tol: f64,
    pub pole_guard: f64,
}

impl RootScanConfig {
    pub fn new(x_min: f64, x_max: f64) -> Self {
        RootScanConfig { x_min, x_max, scan_step: 0.01, bisection_tol: 1e-12, pole_guard: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoleReport {
    pub pole: f64,
    /// f(p ± h)·h averaged over both sides, h = 4·pole_guard
    pub residue: f64,
    /// residue small against the neighbourhood: a root may sit on the pole
    pub exceptional_candidate: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ScanResult {
    pub roots: Vec<f64>,
    pub poles: Vec<PoleReport>,
    /// sign changes that grew under bisection (hidden singularities)
    pub rejected: Vec<f64>,
    /// sub-intervals where the condition could not be evaluated
    pub unscanned: Vec<(f64, f64)>,
    /// (n, roots in [n, n+1)) for every unit interval touched by the scan
    pub interval_counts: Vec<(i64, usize)>,
}

/// All sign changes of `f` on [x_min, x_max], bisected to `bisection_tol`.
/// `poles` split the range; nothing is evaluated within `pole_guard` of a pole.
pub fn scan_roots<F>(f: F, poles: &[f64], cfg: &RootScanConfig) -> ScanResult
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut cuts: Vec<f64> = poles
        .iter()
        .copied()
        .filter(|p| *p > cfg.x_min && *p < cfg.x_max)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut segments = Vec::new();
    let mut lo = cfg.x_min;
    // stay clear of the evaluators' own pole guard
    let edge = 2.0 * cfg.pole_guard;
    for &p in &cuts {
        segments.push((lo, p - edge));
        lo = p + edge;
    }
    segments.push((lo, cfg.x_max));

    let parts: Vec<ScanResult> = segments
        .par_iter()
        .map(|&(a, b)| scan_segment(&f, a, b, cfg))
        .collect();
    let mut out = ScanResult::default();
    for p in parts {
        out.roots.extend(p.roots);
        out.rejected.extend(p.rejected);
        out.unscanned.extend(p.unscanned);
    }
    let h = 4.0 * cfg.pole_guard;
    for &p in &cuts {
        let l = f(p - h).ok();
        let r = f(p + h).ok();
        let (Some(l), Some(r)) = (l, r) else { continue };
        let residue = 0.5 * (r - l) * h;
        let far = [f(p - 0.05).ok(), f(p + 0.05).ok()]
            .iter()
            .flatten()
            .map(|v| v.abs())
            .fold(0.0, f64::max);
        out.poles.push(PoleReport {
            pole: p,
            residue,
            exceptional_candidate: residue.abs() < 1e-6 * far.max(1e-300) * 0.05,
        });
    }
    let first = cfg.x_min.floor() as i64;
    let last = cfg.x_max.floor() as i64;
    for n in first..=last {
        let c = out
            .roots
            .iter()
            .filter(|&&x| x >= n as f64 && x < (n + 1) as f64)
            .count();
        out.interval_counts.push((n, c));
    }
    out
}

fn scan_segment<F>(f: &F, a: f64, b: f64, cfg: &RootScanConfig) -> ScanResult
where
    F: Fn(f64) -> Result<f64>,
{
    let mut out = ScanResult::default();
    if b <= a {
        return out;
    }
    let steps = ((b - a) / cfg.scan_step).ceil().max(1.0) as usize;
    let xs: Vec<f64> = (0..=steps).map(|i| a + (b - a) * i as f64 / steps as f64).collect();
    let vals: Vec<Option<f64>> = xs.iter().map(|&x| f(x).ok().filter(|v| v.is_finite())).collect();
    for i in 0..steps {
        let (x0, x1) = (xs[i], xs[i + 1]);
        let (Some(f0), Some(f1)) = (vals[i], vals[i + 1]) else {
            out.unscanned.push((x0, x1));
            continue;
        };
        if f0 == 0.0 {
            out.roots.push(x0);
            continue;
        }
        if f0.signum() == f1.signum() || f1 == 0.0 && i + 1 < steps {
            continue;
        }
        match bisect(f, x0, x1, f0, cfg.bisection_tol) {
            Some((x, true)) => out.roots.push(x),
            Some((x, false)) => out.rejected.push(x),
            None => out.unscanned.push((x0, x1)),
        }
    }
    out
}

/// Bisection; the flag is false when |f| grew, i.e. the sign change was a pole.
fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, mut flo: f64, tol: f64) -> Option<(f64, bool)>
where
    F: Fn(f64) -> Result<f64>,
{
    let start = flo.abs().max(f(hi).ok()?.abs());
    let mut fhi_last = f64::NAN;
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid).ok()?;
        if fm == 0.0 {
            return Some((mid, true));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi_last = fm;
        }
    }
    let end = flo.abs().min(if fhi_last.is_nan() { f64::INFINITY } else { fhi_last.abs() });
    Some((0.5 * (lo + hi), end <= start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelKind {
    Regular,
    ExceptionalDegenerate,
    ExceptionalNondegenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumLevel {
    pub energy: f64,
    pub x: f64,
    pub label: SymmetryLabel,
    /// order of the zero within its own condition function
    pub n: usize,
    pub kind: LevelKind,
}

/// Parity assigned to G_+ by matching the small-g zero near x = Δ with the oracle.
pub fn calibrate_braak_parity() -> Result<Parity> {
    let p = ModelParams::rabi(0.4, 1e-4);
    let cfg = SeriesConfig::default();
    let scan = scan_roots(
        |x| recurrences::braak_g(x, GSign::Plus, &p, &cfg).map(|v| v.value),
        &[0.0, 1.0],
        &RootScanConfig::new(-0.9, 0.9),
    );
    let x = scan
        .roots
        .iter()
        .copied()
        .min_by(|a, b| (a - 0.4).abs().total_cmp(&(b - 0.4).abs()))
        .ok_or_else(|| RabiError::NonConvergence("calibration: no G_+ zero near x = Delta".into()))?;
    let e = p.energy_of_x(x);
    let sp = model::oracle_spectrum(&p, 4, 1e-12)?;
    let (i, _) = sp
        .energies
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - e).abs().total_cmp(&(b.1 - e).abs()))
        .unwrap();
    model::parity_of_state(&sp.vectors[i])
        .ok_or_else(|| RabiError::Degenerate("calibration level has no definite parity".into()))
}

fn rabi_x_range(params: &ModelParams, k: usize) -> (f64, f64) {
    let s = params.scaled();
    (-s.delta - 0.5, k as f64 / 2.0 + s.delta + 3.0)
}

fn integer_poles(x_max: f64) -> Vec<f64> {
    (0..=(x_max.max(0.0) as usize + 1)).map(|n| n as f64).collect()
}

fn push_levels(out: &mut Vec<SpectrumLevel>, xs: &[f64], label: SymmetryLabel, energy: impl Fn(f64) -> f64) {
    for (n, &x) in xs.iter().enumerate() {
        out.push(SpectrumLevel { energy: energy(x), x, label, n, kind: LevelKind::Regular });
    }
}

fn finish(mut levels: Vec<SpectrumLevel>, k: usize, top: f64) -> Option<Vec<SpectrumLevel>> {
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.label.cmp(&b.label)));
    // only trust the lowest k if the k-th is safely inside the scanned window
    if levels.len() >= k && levels[k - 1].energy < top {
        levels.truncate(k);
        Some(levels)
    } else {
        None
    }
}

/// Lowest `k` levels from the variant's analytic conditions, labelled and sorted.
pub fn regular_spectrum(params: &ModelParams, k: usize) -> Result<Vec<SpectrumLevel>> {
    params.validate()?;
    if k == 0 {
        return Err(RabiError::Domain("k must be >= 1".into()));
    }
    let mut extra = 0.0;
    for _ in 0..6 {
        if let Some(levels) = spectrum_window(params, k, extra)? {
            return Ok(levels);
        }
        extra = 2.0 * extra + 4.0;
    }
    Err(RabiError::NonConvergence(format!("could not bracket the lowest {k} levels")))
}

fn spectrum_window(params: &ModelParams, k: usize, extra: f64) -> Result<Option<Vec<SpectrumLevel>>> {
    let s = params.scaled();
    let cfg = SeriesConfig::default();
    let w = params.omega;
    let mut levels = Vec::new();
    match params.variant {
        Variant::Rabi => {
            let (lo, hi) = rabi_x_range(params, k);
            let hi = hi + extra;
            let poles = integer_poles(hi);
            for sign in [GSign::Plus, GSign::Minus] {
                let label = SymmetryLabel::Parity(recurrences::braak_parity(sign));
                let scan = scan_roots(
                    |x| braak_checked(x, sign, params, &cfg),
                    &poles,
                    &RootScanConfig::new(lo, hi),
                );
                push_levels(&mut levels, &scan.roots, label, |x| params.energy_of_x(x));
            }
            add_rabi_exceptional(params, &mut levels, hi);
            Ok(finish(levels, k, params.energy_of_x(hi - 0.5)))
        }
        Variant::Asymmetric => {
            let (lo, hi) = rabi_x_range(params, k);
            let (lo, hi) = (lo - s.eps.abs(), hi + extra + s.eps.abs());
            let poles = recurrences::asym_poles(s.eps, hi);
            let scan = scan_roots(
                |x| {
                    let v = recurrences::asym_g(x, params, &cfg)?;
                    if v.converged { Ok(v.value) } else { Err(RabiError::NonConvergence("G_eps".into())) }
                },
                &poles,
                &RootScanConfig::new(lo, hi),
            );
            push_levels(&mut levels, &scan.roots, SymmetryLabel::Undefined, |x| params.energy_of_x(x));
            add_asym_exceptional(params, &mut levels, hi);
            Ok(finish(levels, k, params.energy_of_x(hi - 0.5)))
        }
        // λ = 1 is the Rabi model; its path also supplies the exceptional levels
        Variant::Anisotropic if s.lambda == 1.0 => {
            spectrum_window(&ModelParams { variant: Variant::Rabi, lambda: 0.0, ..*params }, k, extra)
        }
        Variant::Anisotropic if s.lambda == 0.0 || s.g == 0.0 => {
            let top = k / 2 + 2 + extra as usize;
            let lv = if s.lambda == 0.0 {
                recurrences::aniso_jc_levels(params, top)
            } else {
                // g = 0: uncoupled levels n ± Δ
                let mut v: Vec<(f64, Parity)> = (0..=top)
                    .flat_map(|n| {
                        let p = |up: bool| {
                            if (n % 2 == 0) != up { Parity::Plus } else { Parity::Minus }
                        };
                        [(n as f64 + s.delta, p(true)), (n as f64 - s.delta, p(false))]
                    })
                    .collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                v
            };
            let mut counts = [0usize; 2];
            for (e, p) in lv {
                let slot = usize::from(p == Parity::Minus);
                let (_, _, shift) = recurrences::aniso_shifts(params);
                levels.push(SpectrumLevel {
                    energy: e * w,
                    x: e + shift,
                    label: SymmetryLabel::Parity(p),
                    n: counts[slot],
                    kind: LevelKind::Regular,
                });
                counts[slot] += 1;
            }
            Ok(finish(levels, k, (top as f64 - 1.0) * w))
        }
        Variant::Anisotropic => {
            let (_, _, shift) = recurrences::aniso_shifts(params);
            let lo = -s.delta - s.g * s.g - 0.5 + shift;
            let hi = k as f64 / 2.0 + s.delta + 3.0 + extra + shift.max(0.0);
            let mut poles = integer_poles(hi);
            poles.extend(recurrences::aniso_extra_poles(params, hi));
            let plus = aniso_plus_parity();
            for sign in [GSign::Plus, GSign::Minus] {
                let label = SymmetryLabel::Parity(if sign == GSign::Plus { plus } else { plus.flip() });
                let scan = scan_roots(
                    |x| {
                        let v = recurrences::aniso_g(x, sign, params, 0.0, &cfg)?;
                        if v.converged { Ok(v.value) } else { Err(RabiError::NonConvergence("G^lambda".into())) }
                    },
                    &poles,
                    &RootScanConfig::new(lo, hi),
                );
                push_levels(&mut levels, &scan.roots, label, |x| (x - shift) * w);
            }
            Ok(finish(levels, k, (hi - 0.5 - shift) * w))
        }
        Variant::TwoPhoton => {
            let lo = -s.delta - 1.0;
            let collapse = (1.0 - 4.0 * s.g * s.g).sqrt();
            let hi = lo + (k as f64 / 4.0 + 3.0 + extra) * collapse.max(0.05) + 2.0 * s.delta + 1.0;
            for c in TwoPhotonClass::ALL {
                let scan = scan_roots(
                    |e| recurrences::twophoton_g(e, c, params).map(|v| v.value),
                    &[],
                    &RootScanConfig::new(lo, hi),
                );
                push_levels(&mut levels, &scan.roots, SymmetryLabel::TwoPhoton(c), |e| e * w);
            }
            Ok(finish(levels, k, (hi - 0.5) * w))
        }
    }
}

fn braak_checked(x: f64, sign: GSign, params: &ModelParams, cfg: &SeriesConfig) -> Result<f64> {
    let v = recurrences::braak_g(x, sign, params, cfg)?;
    if v.converged {
        Ok(v.value)
    } else {
        Err(RabiError::NonConvergence(format!("G at x = {x} hit the term cap")))
    }
}

/// Which parity the anisotropic G_+^λ describes (fixed by oracle comparison,
/// see `aniso_parity_matches_oracle` in the tests).
pub fn aniso_plus_parity() -> Parity {
    Parity::Minus
}

fn add_rabi_exceptional(params: &ModelParams, levels: &mut Vec<SpectrumLevel>, x_max: f64) {
    let s = params.scaled();
    if s.g == 0.0 {
        return;
    }
    for n in 1..=(x_max as usize) {
        let t = heun::truncation_check(
            &match heun::heun_map(n as f64 - s.g * s.g, params) {
                Ok(m) => m.p1,
                Err(_) => continue,
            },
            n,
        );
        if t.holds {
            for p in [Parity::Plus, Parity::Minus] {
                levels.push(SpectrumLevel {
                    energy: params.energy_of_x(n as f64),
                    x: n as f64,
                    label: SymmetryLabel::Parity(p),
                    n: usize::MAX,
                    kind: LevelKind::ExceptionalDegenerate,
                });
            }
        }
    }
}

/// Levels sitting on the poles x = n ± ε, present where the branch constraint vanishes.
fn add_asym_exceptional(params: &ModelParams, levels: &mut Vec<SpectrumLevel>, x_max: f64) {
    let s = params.scaled();
    if s.g == 0.0 || s.eps == 0.0 {
        return;
    }
    let mut found: Vec<f64> = Vec::new();
    for n in 1..=(x_max + 1.0) as usize {
        for (branch, sgn) in [(AsymBranch::Plus, 1.0), (AsymBranch::Minus, -1.0)] {
            let x = n as f64 + sgn * s.eps;
            let ks = recurrences::scaled_k(x, s.delta, s.g, sgn * s.eps, n);
            let scale = ks.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if x <= x_max && (asym_constraint(n, s.g, s.delta, s.eps, branch) / scale.max(1e-300)).abs() < 1e-9 {
                found.push(x);
            }
        }
    }
    for &x in &found {
        let twin = found.iter().filter(|&&y| (y - x).abs() < 1e-12).count() > 1;
        levels.push(SpectrumLevel {
            energy: params.energy_of_x(x),
            x,
            label: SymmetryLabel::Undefined,
            n: usize::MAX,
            kind: if twin { LevelKind::ExceptionalDegenerate } else { LevelKind::ExceptionalNondegenerate },
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JuddPoint {
    pub n: usize,
    pub g_star: f64,
    pub delta: f64,
    pub omega: f64,
    pub energy: f64,
    /// normalised constraint residual at g_star
    pub residual: f64,
    /// gap between the two oracle levels closest to `energy`
    pub degeneracy_gap: f64,
    /// largest distance of that pair from `energy`
    pub oracle_offset: f64,
}

/// Sign-change roots of `f` on [a, b], polished to ~1e-15.
pub fn roots_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a) / step).ceil() as usize;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(x0);
    for i in 1..=n {
        let x1 = a + (b - a) * i as f64 / n as f64;
        let f1 = f(x1);
        if f0 == 0.0 {
            out.push(x0);
        } else if f0.signum() != f1.signum() && f1 != 0.0 || (f1 == 0.0 && i == n) {
            let (mut lo, mut hi, mut flo) = (x0, x1, f0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

fn oracle_pair(params: &ModelParams, e: f64) -> Result<(f64, f64)> {
    let k = 2 * ((e / params.omega).max(0.0) as usize) + 8;
    let sp = model::oracle_energies(params, k, 1e-12)?;
    let mut d: Vec<f64> = sp.energies.clone();
    d.sort_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()));
    let (a, b) = (d[0], d[1]);
    Ok(((a - b).abs(), (a - e).abs().max((b - e).abs())))
}

fn oracle_offset(params: &ModelParams, e: f64) -> Result<f64> {
    let k = 2 * ((e / params.omega).max(0.0) as usize) + 8;
    let sp = model::oracle_energies(params, k, 1e-12)?;
    Ok(sp.energies.iter().map(|v| (v - e).abs()).fold(f64::INFINITY, f64::min))
}

/// Braak-route constraint K_n(x = n)·gⁿ as a function of g (ω = 1 units).
pub fn braak_constraint(n: usize, g: f64, delta: f64) -> f64 {
    recurrences::scaled_k(n as f64, delta, g, 0.0, n)[n]
}

/// Judd points of level n (Rabi) for g in `g_range` (physical units).
pub fn judd_points(n: usize, delta: f64, omega: f64, g_range: (f64, f64)) -> Result<Vec<JuddPoint>> {
    if n == 0 {
        return Ok(vec![]);
    }
    let d = delta / omega;
    let (a, b) = (g_range.0 / omega, g_range.1 / omega);
    let step = 1e-3;
    let r1 = roots_1d(|g| braak_constraint(n, g, d), a.max(1e-9), b, step);
    let r2 = roots_1d(|g| heun::rabi_constraint_residual(n, g, d), a.max(1e-9), b, step);
    if r1.len() != r2.len() || r1.iter().zip(&r2).any(|(x, y)| (x - y).abs() > 1e-9) {
        return Err(RabiError::RouteDisagreement(format!(
            "Judd n = {n}, Delta = {delta}: K_n route {r1:?} vs Heun route {r2:?}"
        )));
    }
    let mut out = Vec::new();
    for g in r1 {
        let params = ModelParams::rabi(delta, g * omega).with_omega(omega);
        let m = heun::heun_map(n as f64 - g * g, &params)?;
        let t = heun::truncation_check(&m.p1, n);
        let energy = (n as f64 - g * g) * omega;
        let (gap, off) = oracle_pair(&params, energy)?;
        out.push(JuddPoint {
            n,
            g_star: g * omega,
            delta,
            omega,
            energy,
            residual: t.normalized,
            degeneracy_gap: gap,
            oracle_offset: off,
        });
    }
    Ok(out)
}

/// k with k < Δ/ω < k+1 (None exactly on an integer).
pub fn kus_band(delta_over_omega: f64) -> Option<usize> {
    let k = delta_over_omega.floor();
    if delta_over_omega == k {
        None
    } else {
        Some(k as usize)
    }
}

/// Band k of the asymmetric crossing rule √(k²+2kε) < Δ < √((k+1)²+2(k+1)ε).
/// The +ε branch follows it with ε, the −ε branch with −ε (|ε| < 1/2).
pub fn asym_band(delta: f64, eps: f64) -> Option<usize> {
    let edge = |k: f64| (k * k + 2.0 * k * eps).max(0.0).sqrt();
    (0..10_000usize).find(|&k| edge(k as f64) < delta && delta < edge(k as f64 + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AsymBranch {
    /// E = n − g² + ε (K⁻ constraint)
    Plus,
    /// E = n − g² − ε (K⁺ constraint)
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymJuddPoint {
    pub branch: AsymBranch,
    pub point: JuddPoint,
}

/// Asymmetric constraint K_n^∓(x = n ± ε)·gⁿ.
pub fn asym_constraint(n: usize, g: f64, delta: f64, eps: f64, branch: AsymBranch) -> f64 {
    match branch {
        AsymBranch::Plus => recurrences::scaled_k(n as f64 + eps, delta, g, eps, n)[n],
        AsymBranch::Minus => recurrences::scaled_k(n as f64 - eps, delta, g, -eps, n)[n],
    }
}

/// Exceptional points of the asymmetric model at E = nω − g²/ω ± ε.
pub fn asym_judd_points(n: usize, delta: f64, eps: f64, omega: f64, g_range: (f64, f64)) -> Result<Vec<AsymJuddPoint>> {
    let (d, e) = (delta / omega, eps / omega);
    let (a, b) = (g_range.0 / omega, g_range.1 / omega);
    let mut out = Vec::new();
    if n == 0 {
        return Ok(out);
    }
    for branch in [AsymBranch::Plus, AsymBranch::Minus] {
        let sgn = if branch == AsymBranch::Plus { 1.0 } else { -1.0 };
        for g in roots_1d(|g| asym_constraint(n, g, d, e, branch), a.max(1e-9), b, 1e-3) {
            let params = ModelParams::asymmetric(delta, g * omega, eps).with_omega(omega);
            let energy = (n as f64 - g * g + sgn * e) * omega;
            let (gap, _) = oracle_pair(&params, energy)?;
            let off = oracle_offset(&params, energy)?;
            let scale: f64 = recurrences::scaled_k(n as f64 + sgn * e, d, g, sgn * e, n)
                .iter()
                .fold(0.0, |m, v| m.max(v.abs()));
            out.push(AsymJuddPoint {
                branch,
                point: JuddPoint {
                    n,
                    g_star: g * omega,
                    delta,
                    omega,
                    energy,
                    residual: asym_constraint(n, g, d, e, branch) / scale.max(1e-300),
                    degeneracy_gap: gap,
                    oracle_offset: off,
                },
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoPhotonFamily {
    /// E/ω = −1/2 + (N+1/2)√(1−4g²/ω²)
    HalfInteger,
    /// E/ω = −1/2 + N√(1−4g²/ω²)
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhotonExceptional {
    pub family: TwoPhotonFamily,
    pub n: usize,
    pub g_star: f64,
    pub energy: f64,
    pub degeneracy_gap: f64,
    pub oracle_offset: f64,
}

/// Candidate couplings g² (ω = 1) from the parameter relations of each family.
pub fn twophoton_relation_g2(family: TwoPhotonFamily, n: usize, delta: f64) -> Result<Vec<f64>> {
    let d2 = delta * delta;
    let raw = match (family, n) {
        (TwoPhotonFamily::HalfInteger, 2) => vec![1.0 / 6.0 - d2 / 24.0],
        (TwoPhotonFamily::HalfInteger, 3) => vec![1.0 / 10.0 - d2 / 40.0],
        (TwoPhotonFamily::HalfInteger, 4) => {
            let b = -2.0 / 7.0 + 17.0 * d2 / 560.0;
            let c = d2 * d2 / 4480.0 - d2 / 224.0 + 1.0 / 70.0;
            let disc = b * b - 4.0 * c;
            if disc < 0.0 {
                vec![]
            } else {
                vec![(-b - disc.sqrt()) / 2.0, (-b + disc.sqrt()) / 2.0]
            }
        }
        (TwoPhotonFamily::Integer, 2) => {
            if delta > 0.5 && delta < 1.5 {
                vec![(4.0 * d2 - 9.0) * (1.0 - 4.0 * d2) / (256.0 * d2)]
            } else {
                vec![]
            }
        }
        (TwoPhotonFamily::Integer, 3) => {
            let mut v = Vec::new();
            if delta > 0.5 && delta < 2.5 {
                v.push((5.0 - 2.0 * delta) * (2.0 * delta + 3.0) * (1.0 + 2.0 * delta) / (256.0 * delta));
            }
            if delta > 0.5 && delta < 1.5 {
                v.push((5.0 + 2.0 * delta) * (2.0 * delta - 3.0) * (1.0 - 2.0 * delta) / (256.0 * delta));
            }
            v
        }
        _ => {
            return Err(RabiError::Domain(format!(
                "no closed parameter relation for N = {n} in the {family:?} family"
            )))
        }
    };
    Ok(raw.into_iter().filter(|g2| *g2 > 0.0 && *g2 < 0.25).collect())
}

pub fn twophoton_exceptional(family: TwoPhotonFamily, n: usize, delta: f64, omega: f64) -> Result<Vec<TwoPhotonExceptional>> {
    if n < 2 {
        return Err(RabiError::Domain("two-photon exceptional points need N >= 2".into()));
    }
    let d = delta / omega;
    let mut out = Vec::new();
    for g2 in twophoton_relation_g2(family, n, d)? {
        let g = g2.sqrt();
        let root = (1.0 - 4.0 * g2).sqrt();
        let e = match family {
            TwoPhotonFamily::HalfInteger => -0.5 + (n as f64 + 0.5) * root,
            TwoPhotonFamily::Integer => -0.5 + n as f64 * root,
        };
        let params = ModelParams::two_photon(delta, g * omega).with_omega(omega);
        let (gap, off) = oracle_pair(&params, e * omega)?;
        out.push(TwoPhotonExceptional {
            family,
            n,
            g_star: g * omega,
            energy: e * omega,
            degeneracy_gap: gap,
            oracle_offset: off,
        });
    }
    Ok(out)
}

/// Adjacency findings for per-interval root counts (reported, not asserted).
#[derive(Debug, Clone, Default, Serialize)]
pub struct IntervalFindings {
    pub out_of_range: Vec<(i64, usize)>,
    pub adjacent_double: Vec<i64>,
    pub adjacent_empty: Vec<i64>,
}

pub fn interval_findings(counts: &[(i64, usize)]) -> IntervalFindings {
    let mut f = IntervalFindings::default();
    for &(n, c) in counts {
        if c > 2 {
            f.out_of_range.push((n, c));
        }
    }
    for w in counts.windows(2) {
        if w[0].1 == 2 && w[1].1 == 2 {
            f.adjacent_double.push(w[0].0);
        }
        if w[0].1 == 0 && w[1].1 == 0 {
            f.adjacent_empty.push(w[0].0);
        }
    }
    f
}

/// Braak G_± interval counts on [n, n+1) for n = x_min..x_max, per sign.
pub fn braak_interval_counts(params: &ModelParams, x_min: f64, x_max: f64) -> Vec<(GSign, Vec<(i64, usize)>)> {
    let cfg = SeriesConfig::default();
    [GSign::Plus, GSign::Minus]
        .into_iter()
        .map(|sign| {
            let scan = scan_roots(
                |x| braak_checked(x, sign, params, &cfg),
                &integer_poles(x_max),
                &RootScanConfig::new(x_min, x_max),
            );
            let counts = scan
                .interval_counts
                .into_iter()
                .filter(|(n, _)| (*n as f64) < x_max)
                .collect();
            (sign, counts)
        })
        .collect()
}

/// Zeros of the Bogoliubov two-photon G-function in E, with the symmetry class it describes.
pub fn bogoliubov_roots(
    params: &ModelParams,
    class: recurrences::BogoliubovClass,
    sign: GSign,
    e_range: (f64, f64),
) -> Result<(TwoPhotonClass, Vec<f64>)> {
    if params.variant != Variant::TwoPhoton {
        return Err(RabiError::Domain("Bogoliubov G-functions belong to the two-photon model".into()));
    }
    let s = params.scaled();
    let b = recurrences::TwoPhotonBogoliubov::new(s.g);
    let (lo, hi) = (b.x_of_energy(e_range.0 / params.omega), b.x_of_energy(e_range.1 / params.omega));
    let n0 = usize::from(class == recurrences::BogoliubovClass::Odd);
    let poles: Vec<f64> = (n0..=(hi.max(0.0) as usize + 2)).step_by(2).map(|n| n as f64).collect();
    let cfg = SeriesConfig::default();
    let scan = scan_roots(
        |x| {
            let v = recurrences::twophoton_bogoliubov_g(x, class, sign, params, &cfg)?;
            if v.converged { Ok(v.value) } else { Err(RabiError::NonConvergence("Bogoliubov G".into())) }
        },
        &poles,
        &RootScanConfig::new(lo, hi),
    );
    let es = scan.roots.iter().map(|&x| b.energy_of_x(x) * params.omega).collect();
    Ok((recurrences::bogoliubov_class(class, sign), es))
}

/// Rabi-model spectral conditions as functions of E (ω = 1 units of `params`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    Braak(GSign),
    /// G^±_k with k in 1..=4
    Weak(GSign, usize),
    K(GSign),
    W1,
    W2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionRoot {
    pub energy: f64,
    /// the condition also vanishes on the whole 8-point z grid
    pub certified: bool,
    /// largest normalised value of the condition over the z grid
    pub grid_residual: f64,
}

pub const CERTIFY_TOL: f64 = 1e-6;

fn condition_value(c: Condition, e: f64, z: f64, params: &ModelParams, normalized: bool) -> Result<f64> {
    let cfg = SeriesConfig::default();
    match c {
        Condition::Braak(sign) => braak_checked(params.x_of_energy(e), sign, params, &cfg),
        Condition::Weak(sign, k) => {
            if !(1..=4).contains(&k) {
                return Err(RabiError::Domain(format!("weak condition index {k} not in 1..=4")));
            }
            let v = if normalized {
                heun::weak_conditions_normalized(e, z, sign, params)?
            } else {
                heun::weak_conditions(e, z, sign, params)?
            };
            Ok(v[k - 1])
        }
        Condition::K(sign) => heun::k_condition(e, z, sign, params),
        Condition::W1 | Condition::W2 => {
            let w = if c == Condition::W1 { heun::WhichWronskian::W1 } else { heun::WhichWronskian::W2 };
            if normalized {
                heun::wronskian_normalized(e, z, w, params)
            } else {
                heun::wronskian(e, z, w, params)
            }
        }
    }
}

/// Zeros in E of one condition at fixed z, each checked on the z grid.
/// Poles sit at x = E + g² ∈ {0, 1, 2, ...} (and E = −g² for the weak conditions).
pub fn condition_roots(params: &ModelParams, c: Condition, z: f64, e_range: (f64, f64)) -> Result<Vec<ConditionRoot>> {
    if params.variant != Variant::Rabi {
        return Err(RabiError::Domain("condition scans are defined for the Rabi model".into()));
    }
    let s = params.scaled();
    let w = params.omega;
    let (lo, hi) = (e_range.0 / w, e_range.1 / w);
    let g2 = s.g * s.g;
    let poles: Vec<f64> = (0..=((hi + g2).max(0.0) as usize + 1)).map(|n| n as f64 - g2).collect();
    let unit = params.with_omega(1.0).with_delta(s.delta).with_g(s.g);
    let scan = scan_roots(
        |e| condition_value(c, e, z / w, &unit, false),
        &poles,
        &RootScanConfig::new(lo, hi),
    );
    let zs = heun::z_grid(s.g);
    scan.roots
        .iter()
        .map(|&e| {
            let grid_residual = match c {
                Condition::Braak(_) => 0.0,
                _ => zs
                    .iter()
                    .map(|&zz| condition_value(c, e, zz, &unit, true).map(f64::abs))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max),
            };
            Ok(ConditionRoot { energy: e * w, certified: grid_residual < CERTIFY_TOL, grid_residual })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let r = scan_roots(|x| Ok(x - 1.5), &[], &RootScanConfig::new(0.0, 3.0));
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - 1.5).abs() < 1e-12);
    }

    #[test]
    fn poles_are_not_roots() {
        let r = scan_roots(|x| Ok(1.0 / (x - 0.7321)), &[], &RootScanConfig::new(0.0, 2.0));
        assert!(r.roots.is_empty());
        assert_eq!(r.rejected.len(), 1);
        let r = scan_roots(|x| Ok(1.0 / (x - 1.0)), &[1.0], &RootScanConfig::new(0.0, 2.0));
        assert!(r.roots.is_empty() && r.rejected.is_empty());
    }

    #[test]
    fn calibration_matches_stored_convention() {
        assert_eq!(calibrate_braak_parity().unwrap(), recurrences::braak_parity(GSign::Plus));
    }

    #[test]
    fn uncoupled_spectrum_labels() {
        let p = ModelParams::anisotropic(0.4, 0.0, 0.5);
        let lv = regular_spectrum(&p, 4).unwrap();
        // −Δ: |↓,0⟩ (+), Δ: |↑,0⟩ (−), 1−Δ: |↓,1⟩ (−), 1+Δ: |↑,1⟩ (+)
        let want = [(-0.4, 1), (0.4, -1), (0.6, -1), (1.4, 1)];
        for (l, (e, par)) in lv.iter().zip(want) {
            assert!((l.energy - e).abs() < 1e-12);
            assert_eq!(l.label, SymmetryLabel::Parity(Parity::from_value(par).unwrap()));
        }
    }

    #[test]
    fn rabi_levels_match_oracle() {
        let p = ModelParams::rabi(0.4, 0.7);
        let lv = regular_spectrum(&p, 12).unwrap();
        let sp = model::oracle_spectrum(&p, 12, 1e-12).unwrap();
        for (l, (e, lab)) in lv.iter().zip(sp.energies.iter().zip(&sp.labels)) {
            assert!((l.energy - e).abs() < 1e-8, "{l:?} vs {e}");
            assert_eq!(l.label, *lab);
        }
    }

    #[test]
    fn aniso_parity_matches_oracle() {
        let p = ModelParams::anisotropic(0.4, 0.6, 0.5);
        let lv = regular_spectrum(&p, 6).unwrap();
        let sp = model::oracle_spectrum(&p, 6, 1e-12).unwrap();
        for (l, (e, lab)) in lv.iter().zip(sp.energies.iter().zip(&sp.labels)) {
            assert!((l.energy - e).abs() < 1e-8, "{l:?} vs {e}");
            assert_eq!(l.label, *lab);
        }
    }

    #[test]
    fn two_photon_classes_match_chains() {
        let p = ModelParams::two_photon(1.0, 0.25);
        let lv = regular_spectrum(&p, 8).unwrap();
        let sp = model::oracle_spectrum(&p, 8, 1e-12).unwrap();
        for (l, (e, lab)) in lv.iter().zip(sp.energies.iter().zip(&sp.labels)) {
            assert!((l.energy - e).abs() < 1e-6, "{l:?} vs {e}");
            assert_eq!(l.label, *lab);
        }
    }

    #[test]
    fn first_judd_point() {
        let pts = judd_points(1, 0.6, 1.0, (0.0, 2.0)).unwrap();
        assert_eq!(pts.len(), 1);
        assert!((pts[0].g_star - 0.4).abs() < 1e-12);
        assert!((pts[0].energy - 0.84).abs() < 1e-12);
        assert!(pts[0].degeneracy_gap < 1e-8);
        assert!(judd_points(0, 0.6, 1.0, (0.0, 2.0)).unwrap().is_empty());
    }

    #[test]
    fn exceptional_levels_on_poles() {
        // Δ² + 4g² = 1: doubly degenerate level at E = 1 − g² in both forms of the Rabi model
        for p in [ModelParams::rabi(0.8, 0.3), ModelParams::anisotropic(0.8, 0.3, 1.0)] {
            let lv = regular_spectrum(&p, 6).unwrap();
            let hits = lv.iter().filter(|l| (l.energy - 0.91).abs() < 1e-12).count();
            assert_eq!(hits, 2, "{p:?}");
        }
        for (eps, n_hits) in [(0.5, 2), (0.3, 1)] {
            let a = asym_judd_points(2, 0.8, eps, 1.0, (0.0, 3.0)).unwrap()[0];
            let p = ModelParams::asymmetric(0.8, a.point.g_star, eps);
            let lv = regular_spectrum(&p, 8).unwrap();
            let or = model::oracle_energies(&p, 8, 1e-12).unwrap();
            for (l, e) in lv.iter().zip(&or.energies) {
                assert!((l.energy - e).abs() < 1e-8, "{l:?} vs {e}");
            }
            let hits = lv.iter().filter(|l| (l.energy - a.point.energy).abs() < 1e-12).count();
            assert_eq!(hits, n_hits);
        }
    }

    #[test]
    fn two_photon_relations() {
        let g2 = twophoton_relation_g2(TwoPhotonFamily::HalfInteger, 2, 1.0).unwrap();
        assert!((g2[0] - 0.125).abs() < 1e-15);
        let g2 = twophoton_relation_g2(TwoPhotonFamily::Integer, 2, 1.0).unwrap();
        assert!((g2[0] - 15.0 / 256.0).abs() < 1e-15);
        assert!(twophoton_relation_g2(TwoPhotonFamily::Integer, 2, 0.4).unwrap().is_empty());
        assert!(twophoton_relation_g2(TwoPhotonFamily::HalfInteger, 7, 1.0).is_err());
    }

    #[test]
    fn interval_adjacency_findings() {
        let f = interval_findings(&[(0, 2), (1, 2), (2, 0), (3, 0), (4, 3)]);
        assert_eq!(f.adjacent_double, vec![0]);
        assert_eq!(f.adjacent_empty, vec![2]);
        assert_eq!(f.out_of_range, vec![(4, 3)]);
    }
}
