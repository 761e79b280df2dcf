//! Level-spacing statistics and Berry phases.

use crate::error::{RabiError, Result};
use crate::linalg;
use crate::model::{self, ModelParams, Parity, SymmetryLabel};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBins {
    pub width: f64,
    pub max: f64,
}

impl Default for HistogramBins {
    fn default() -> Self {
        HistogramBins { width: 0.02, max: 2.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacingHistogram {
    pub parity: Parity,
    /// in units of ω
    pub spacings: Vec<f64>,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub levels_used: usize,
    /// spacings beyond the last edge, clamped into the last bin
    pub overflow: usize,
}

impl SpacingHistogram {
    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

/// Nearest-neighbour spacings of the lowest `k` levels in one parity sector.
pub fn spacing_histogram(params: &ModelParams, parity: Parity, k: usize, bins: HistogramBins) -> Result<SpacingHistogram> {
    if k < 50 {
        return Err(RabiError::Domain(format!("level statistics need k >= 50, got {k}")));
    }
    if !(bins.width > 0.0 && bins.max > bins.width) {
        return Err(RabiError::Domain("histogram needs 0 < width < max".into()));
    }
    let sp = model::oracle_sector(params, SymmetryLabel::Parity(parity), k, 1e-8, false)?;
    let spacings: Vec<f64> = sp.energies.windows(2).map(|w| (w[1] - w[0]) / params.omega).collect();
    let nb = (bins.max / bins.width).round() as usize;
    let edges: Vec<f64> = (0..=nb).map(|i| i as f64 * bins.width).collect();
    let mut counts = vec![0usize; nb];
    let mut overflow = 0;
    for &s in &spacings {
        let i = (s / bins.width).floor();
        if i >= nb as f64 {
            overflow += 1;
        }
        counts[(i.max(0.0) as usize).min(nb - 1)] += 1;
    }
    Ok(SpacingHistogram { parity, spacings, edges, counts, levels_used: sp.energies.len(), overflow })
}

/// Positions of the two most prominent maxima of the 5-bin smoothed histogram.
/// Prominence: height above the higher of the two minima that separate a
/// maximum from any taller point (or the histogram edge).
pub fn histogram_peaks(h: &SpacingHistogram) -> Vec<f64> {
    let c: Vec<f64> = h.counts.iter().map(|&v| v as f64).collect();
    let n = c.len();
    let s: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(2), (i + 3).min(n));
            c[a..b].iter().sum::<f64>() / (b - a) as f64
        })
        .collect();
    let centers = h.centers();
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        let l = if i > 0 { s[i - 1] } else { f64::NEG_INFINITY };
        let r = if i + 1 < n { s[i + 1] } else { f64::NEG_INFINITY };
        if !(s[i] > l && s[i] >= r && s[i] > 0.0) {
            continue;
        }
        let mut left_min = s[i];
        for j in (0..i).rev() {
            if s[j] > s[i] {
                break;
            }
            left_min = left_min.min(s[j]);
        }
        let mut right_min = s[i];
        for &v in &s[i + 1..] {
            if v > s[i] {
                break;
            }
            right_min = right_min.min(v);
        }
        peaks.push((s[i] - left_min.max(right_min), centers[i]));
    }
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));
    let mut pos: Vec<f64> = peaks.into_iter().take(2).map(|p| p.1).collect();
    pos.sort_by(f64::total_cmp);
    pos
}

/// Standard deviation of the spacings on each side of ω (a width measure per peak).
pub fn peak_widths(h: &SpacingHistogram) -> (f64, f64) {
    let sd = |v: Vec<f64>| {
        if v.len() < 2 {
            return 0.0;
        }
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let lo = h.spacings.iter().copied().filter(|&s| s < 1.0).collect();
    let hi = h.spacings.iter().copied().filter(|&s| s >= 1.0).collect();
    (sd(lo), sd(hi))
}

#[derive(Debug, Clone, Serialize)]
pub struct BerryPhaseResult {
    pub n: usize,
    pub g: Vec<f64>,
    pub energy: Vec<f64>,
    /// γ_n / 2π = ⟨a†a⟩
    pub gamma: Vec<f64>,
    pub label: Vec<SymmetryLabel>,
    /// smallest overlap between consecutive tracked eigenvectors
    pub min_overlap: f64,
    /// g values where the overlap stayed below threshold at the smallest step
    pub ambiguous: Vec<f64>,
    /// largest change of ⟨a†a⟩ under one extra truncation doubling
    pub truncation_change: f64,
    pub n_max: usize,
}

pub const OVERLAP_THRESHOLD: f64 = 0.99;
const MIN_STEP: f64 = 1e-4;
/// Eigenvector tracking stores full vectors; past this the doubled check no longer fits in memory.
pub const BERRY_MAX_FOCK: usize = 1024;

fn eigenpairs(params: &ModelParams, n_max: usize) -> Result<Vec<(f64, SymmetryLabel, Vec<f64>)>> {
    let mut out = Vec::new();
    match model::chains(params, n_max) {
        Some(chs) => {
            for c in chs {
                let eig = linalg::tridiag_eigen(&c.diag, &c.offdiag)?;
                for (e, v) in eig.values.into_iter().zip(eig.vectors) {
                    out.push((e, c.label, c.embed(&v, n_max)));
                }
            }
        }
        None => {
            let h = model::build_hamiltonian(params, n_max)?;
            let eig = linalg::dense_eigen(&h.dense);
            for (e, v) in eig.values.into_iter().zip(eig.vectors) {
                out.push((e, SymmetryLabel::Undefined, v));
            }
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Follow the state that is level `n` at the first grid point by eigenvector overlap.
pub fn berry_phase(params: &ModelParams, n: usize, g_grid: &[f64]) -> Result<BerryPhaseResult> {
    if g_grid.is_empty() {
        return Err(RabiError::Domain("empty g grid".into()));
    }
    let g_max = g_grid.iter().cloned().fold(0.0, f64::max);
    let n_max = model::oracle_start(&params.with_g(g_max), n + 1).max(2 * n + 40);
    if n_max > BERRY_MAX_FOCK {
        return Err(RabiError::NonConvergence(format!(
            "berry phase needs n_max = {n_max}, above the cap of {BERRY_MAX_FOCK} photons"
        )));
    }
    let at = |g: f64| eigenpairs(&params.with_g(g), n_max);

    let first = at(g_grid[0])?;
    if n >= first.len() {
        return Err(RabiError::Domain(format!("level {n} beyond truncation")));
    }
    let mut prev = first[n].2.clone();
    let mut res = BerryPhaseResult {
        n,
        g: vec![g_grid[0]],
        energy: vec![first[n].0],
        gamma: vec![model::photon_number(&prev)],
        label: vec![first[n].1],
        min_overlap: 1.0,
        ambiguous: Vec::new(),
        truncation_change: 0.0,
        n_max,
    };
    let mut tracked = vec![prev.clone()];
    let mut g_prev = g_grid[0];
    for &target in &g_grid[1..] {
        let mut g_cur = g_prev;
        let mut step = target - g_prev;
        while g_cur != target {
            let g_try = if (target - g_cur).abs() <= step.abs() { target } else { g_cur + step };
            let levels = at(g_try)?;
            let (best, ov) = levels
                .iter()
                .enumerate()
                .map(|(i, l)| (i, dot(&l.2, &prev).abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if ov < OVERLAP_THRESHOLD && step.abs() > MIN_STEP {
                step *= 0.5;
                continue;
            }
            if ov < OVERLAP_THRESHOLD {
                res.ambiguous.push(g_try);
            }
            res.min_overlap = res.min_overlap.min(ov);
            let l = &levels[best];
            prev = if dot(&l.2, &prev) < 0.0 { l.2.iter().map(|v| -v).collect() } else { l.2.clone() };
            g_cur = g_try;
            if g_cur == target {
                res.g.push(target);
                res.energy.push(l.0);
                res.gamma.push(model::photon_number(&prev));
                res.label.push(l.1);
                tracked.push(prev.clone());
            }
        }
        g_prev = target;
    }
    // stability: the doubled basis extends the small one (dense index 2n, 2n+1),
    // so the tracked vector is matched by overlap on the leading block
    let changes: Vec<f64> = res
        .g
        .par_iter()
        .zip(&tracked)
        .zip(&res.gamma)
        .map(|((&g, v), &gam)| -> Result<f64> {
            let big = eigenpairs(&params.with_g(g), 2 * n_max)?;
            let l = big
                .iter()
                .max_by(|a, b| dot(&a.2, v).abs().total_cmp(&dot(&b.2, v).abs()))
                .unwrap();
            Ok((model::photon_number(&l.2) - gam).abs())
        })
        .collect::<Result<_>>()?;
    res.truncation_change = changes.into_iter().fold(0.0, f64::max);
    Ok(res)
}

#[derive(Debug, Clone, Serialize)]
pub struct JcBranch {
    /// excitation number N (block |↑,N−1⟩, |↓,N⟩); N = 0 is |↓,0⟩ alone
    pub excitation: usize,
    /// +1 upper, −1 lower eigenvector of the block
    pub branch: i32,
    pub g: Vec<f64>,
    pub energy: Vec<f64>,
    pub gamma: Vec<f64>,
}

/// ⟨a†a⟩ along the exact 2×2 Jaynes–Cummings blocks (comparison curves).
pub fn jc_branches(params: &ModelParams, max_excitation: usize, g_grid: &[f64]) -> Vec<JcBranch> {
    let (w, d) = (params.omega, params.delta);
    let mut out = vec![JcBranch {
        excitation: 0,
        branch: -1,
        g: g_grid.to_vec(),
        energy: vec![-d; g_grid.len()],
        gamma: vec![0.0; g_grid.len()],
    }];
    for n in 1..=max_excitation {
        for branch in [-1, 1] {
            let mut b = JcBranch { excitation: n, branch, g: g_grid.to_vec(), energy: vec![], gamma: vec![] };
            for &g in g_grid {
                // H = [[ (N−1)ω + Δ, g√N ], [ g√N, Nω − Δ ]]
                let a = (n as f64 - 1.0) * w + d;
                let c = n as f64 * w - d;
                let off = g * (n as f64).sqrt();
                let mean = 0.5 * (a + c);
                let half = (0.25 * (a - c).powi(2) + off * off).sqrt();
                let e = mean + branch as f64 * half;
                // weight on |↓,N⟩
                let pd = if half == 0.0 {
                    0.5
                } else if off == 0.0 {
                    if (e - c).abs() < (e - a).abs() { 1.0 } else { 0.0 }
                } else {
                    let (x, y) = (off, e - a);
                    y * y / (x * x + y * y)
                };
                b.energy.push(e);
                b.gamma.push(n as f64 - 1.0 + pd);
            }
            out.push(b);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_zero_spacings_are_omega() {
        let p = ModelParams::rabi(0.0, 0.5);
        let h = spacing_histogram(&p, Parity::Plus, 60, HistogramBins::default()).unwrap();
        assert!(h.spacings.iter().all(|s| (s - 1.0).abs() < 1e-8));
        assert_eq!(h.counts.iter().sum::<usize>(), h.levels_used - 1);
        assert!(spacing_histogram(&p, Parity::Plus, 10, HistogramBins::default()).is_err());
    }

    #[test]
    fn berry_phase_limits() {
        let grid: Vec<f64> = (0..=10).map(|i| 0.05 * i as f64).collect();
        let r = berry_phase(&ModelParams::rabi(0.0, 0.0), 3, &grid).unwrap();
        // Δ = 0: levels n − g² are doubly degenerate, level 3 is photon number 1
        for (g, gam) in r.g.iter().zip(&r.gamma) {
            assert!((gam - (1.0 + g * g)).abs() < 1e-9, "{g} {gam}");
        }
        let r = berry_phase(&ModelParams::rabi(0.3, 0.0), 2, &[0.0]).unwrap();
        // g = 0 order: −0.3 (n=0), 0.3 (n=0), 0.7 (n=1)
        assert!((r.gamma[0] - 1.0).abs() < 1e-15);
        assert!(r.truncation_change < 1e-8);
    }

    #[test]
    fn jc_blocks_limits() {
        let p = ModelParams::rabi(0.5, 0.0);
        let b = jc_branches(&p, 2, &[0.0, 0.3]);
        // resonance: at g > 0 each block is an equal superposition
        for br in &b[1..] {
            assert!((br.gamma[1] - (br.excitation as f64 - 0.5)).abs() < 1e-12);
        }
    }
}
