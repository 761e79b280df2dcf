//! Model parameters, truncated Fock-basis hamiltonians and the brute-force
//! diagonalisation oracle.
//!
//! Basis layout of every dense vector: index `2n` is |↑,n⟩, index `2n+1` is |↓,n⟩.

use crate::error::{RabiError, Result};
use crate::linalg;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Rabi,
    Asymmetric,
    Anisotropic,
    TwoPhoton,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Rabi => "rabi",
            Variant::Asymmetric => "asymmetric",
            Variant::Anisotropic => "anisotropic",
            Variant::TwoPhoton => "twophoton",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = RabiError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rabi" => Ok(Variant::Rabi),
            "asymmetric" | "asym" => Ok(Variant::Asymmetric),
            "anisotropic" | "aniso" => Ok(Variant::Anisotropic),
            "twophoton" | "two-photon" | "2p" => Ok(Variant::TwoPhoton),
            other => Err(RabiError::Parse(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn value(self) -> i32 {
        match self {
            Parity::Plus => 1,
            Parity::Minus => -1,
        }
    }
    pub fn from_value(p: i32) -> Option<Parity> {
        match p {
            1 => Some(Parity::Plus),
            -1 => Some(Parity::Minus),
            _ => None,
        }
    }
    pub fn flip(self) -> Parity {
        match self {
            Parity::Plus => Parity::Minus,
            Parity::Minus => Parity::Plus,
        }
    }
}

/// Symmetry class C of the two-photon model: φ₁(iz) = Cφ₂(z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TwoPhotonClass {
    One,
    MinusOne,
    I,
    MinusI,
}

impl TwoPhotonClass {
    pub const ALL: [TwoPhotonClass; 4] = [
        TwoPhotonClass::One,
        TwoPhotonClass::MinusOne,
        TwoPhotonClass::I,
        TwoPhotonClass::MinusI,
    ];
    pub fn symbol(self) -> &'static str {
        match self {
            TwoPhotonClass::One => "+1",
            TwoPhotonClass::MinusOne => "-1",
            TwoPhotonClass::I => "+i",
            TwoPhotonClass::MinusI => "-i",
        }
    }
    /// Whether the class lives on odd photon numbers.
    pub fn is_odd(self) -> bool {
        matches!(self, TwoPhotonClass::I | TwoPhotonClass::MinusI)
    }
    /// Parity-chain start (spin up?, photon number) holding this class.
    pub fn chain_start(self) -> (bool, usize) {
        match self {
            TwoPhotonClass::One => (true, 0),
            TwoPhotonClass::MinusOne => (false, 0),
            TwoPhotonClass::I => (true, 1),
            TwoPhotonClass::MinusI => (false, 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymmetryLabel {
    Parity(Parity),
    TwoPhoton(TwoPhotonClass),
    Undefined,
}

impl SymmetryLabel {
    pub fn short(self) -> String {
        match self {
            SymmetryLabel::Parity(p) => format!("{:+}", p.value()),
            SymmetryLabel::TwoPhoton(c) => format!("C{}", c.symbol()),
            SymmetryLabel::Undefined => "none".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub variant: Variant,
    pub delta: f64,
    pub omega: f64,
    pub g: f64,
    pub epsilon: f64,
    pub lambda: f64,
}

/// Dimensionless parameters (ω = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub delta: f64,
    pub g: f64,
    pub eps: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn rabi(delta: f64, g: f64) -> Self {
        ModelParams { variant: Variant::Rabi, delta, omega: 1.0, g, epsilon: 0.0, lambda: 0.0 }
    }
    pub fn asymmetric(delta: f64, g: f64, epsilon: f64) -> Self {
        ModelParams { variant: Variant::Asymmetric, epsilon, ..Self::rabi(delta, g) }
    }
    pub fn anisotropic(delta: f64, g: f64, lambda: f64) -> Self {
        ModelParams { variant: Variant::Anisotropic, lambda, ..Self::rabi(delta, g) }
    }
    pub fn two_photon(delta: f64, g: f64) -> Self {
        ModelParams { variant: Variant::TwoPhoton, ..Self::rabi(delta, g) }
    }
    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }
    pub fn with_g(mut self, g: f64) -> Self {
        self.g = g;
        self
    }
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.delta, self.omega, self.g, self.epsilon, self.lambda]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(RabiError::Domain("parameters must be finite".into()));
        }
        if self.omega <= 0.0 {
            return Err(RabiError::Domain(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.delta < 0.0 {
            return Err(RabiError::Domain(format!("delta must be >= 0, got {}", self.delta)));
        }
        if self.g < 0.0 {
            return Err(RabiError::Domain(format!("g must be >= 0, got {}", self.g)));
        }
        if self.variant != Variant::Asymmetric && self.epsilon != 0.0 {
            return Err(RabiError::Domain("epsilon is only used by the asymmetric model".into()));
        }
        if self.variant != Variant::Anisotropic && self.lambda != 0.0 {
            return Err(RabiError::Domain("lambda is only used by the anisotropic model".into()));
        }
        if self.variant == Variant::Anisotropic && self.lambda < 0.0 {
            return Err(RabiError::Domain(format!(
                "anisotropy lambda must be >= 0 (sqrt(lambda) transform), got {}",
                self.lambda
            )));
        }
        if self.variant == Variant::TwoPhoton && self.g >= 0.5 * self.omega {
            return Err(RabiError::Domain(format!(
                "two-photon coupling g = {} must be below omega/2 = {}",
                self.g,
                0.5 * self.omega
            )));
        }
        Ok(())
    }

    pub fn scaled(&self) -> Scaled {
        Scaled {
            delta: self.delta / self.omega,
            g: self.g / self.omega,
            eps: self.epsilon / self.omega,
            lambda: self.lambda,
        }
    }

    /// The spectral variable x = E/ω + g²/ω².
    pub fn x_of_energy(&self, e: f64) -> f64 {
        let s = self.scaled();
        e / self.omega + s.g * s.g
    }
    pub fn energy_of_x(&self, x: f64) -> f64 {
        let s = self.scaled();
        (x - s.g * s.g) * self.omega
    }

    /// Symmetry sectors the model splits into (empty for the asymmetric model).
    pub fn sectors(&self) -> Vec<SymmetryLabel> {
        match self.variant {
            Variant::Rabi | Variant::Anisotropic => vec![
                SymmetryLabel::Parity(Parity::Plus),
                SymmetryLabel::Parity(Parity::Minus),
            ],
            Variant::TwoPhoton => TwoPhotonClass::ALL.iter().map(|&c| SymmetryLabel::TwoPhoton(c)).collect(),
            Variant::Asymmetric => vec![],
        }
    }
}

pub fn basis_index(up: bool, n: usize) -> usize {
    if up {
        2 * n
    } else {
        2 * n + 1
    }
}

/// One symmetry sector as a tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Chain {
    pub label: SymmetryLabel,
    /// (spin up?, photon number) of every site.
    pub sites: Vec<(bool, usize)>,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl Chain {
    /// Embed a chain vector into the full dense basis of size `2(n_max+1)`.
    pub fn embed(&self, v: &[f64], n_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; 2 * (n_max + 1)];
        for (&(up, n), &c) in self.sites.iter().zip(v) {
            out[basis_index(up, n)] = c;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct FockHamiltonian {
    pub n_max: usize,
    pub dense: DMatrix<f64>,
    pub chains: Option<Vec<Chain>>,
}

impl FockHamiltonian {
    pub fn dimension(&self) -> usize {
        self.dense.nrows()
    }
}

/// Chain of one parity sector (Rabi and anisotropic models).
pub fn parity_chain(params: &ModelParams, parity: Parity, n_max: usize) -> Chain {
    let (w, d, g) = (params.omega, params.delta, params.g);
    let aniso = params.variant == Variant::Anisotropic;
    let mut sites = Vec::with_capacity(n_max + 1);
    let mut diag = Vec::with_capacity(n_max + 1);
    let mut offdiag = Vec::with_capacity(n_max);
    for j in 0..=n_max {
        // p=+1 starts |↓,0⟩, p=−1 starts |↑,0⟩, spins alternate along the chain
        let up = (j % 2 == 1) == (parity == Parity::Plus);
        sites.push((up, j));
        diag.push(j as f64 * w + if up { d } else { -d });
        if j < n_max {
            let amp = g * ((j + 1) as f64).sqrt();
            // ↓n → ↑n+1 is the counter-rotating a†σ⁺ link
            let counter = !up;
            offdiag.push(if aniso && counter { params.lambda * amp } else { amp });
        }
    }
    Chain { label: SymmetryLabel::Parity(parity), sites, diag, offdiag }
}

/// Chain of one two-photon symmetry class.
pub fn two_photon_chain(params: &ModelParams, class: TwoPhotonClass, n_max: usize) -> Chain {
    let (w, d, g) = (params.omega, params.delta, params.g);
    let (up0, n0) = class.chain_start();
    let mut sites = Vec::new();
    let mut diag = Vec::new();
    let mut offdiag = Vec::new();
    let mut j = 0;
    loop {
        let n = n0 + 2 * j;
        if n > n_max {
            break;
        }
        let up = up0 ^ (j % 2 == 1);
        sites.push((up, n));
        diag.push(n as f64 * w + if up { d } else { -d });
        if n + 2 <= n_max {
            offdiag.push(g * (((n + 1) * (n + 2)) as f64).sqrt());
        }
        j += 1;
    }
    Chain { label: SymmetryLabel::TwoPhoton(class), sites, diag, offdiag }
}

pub fn chains(params: &ModelParams, n_max: usize) -> Option<Vec<Chain>> {
    match params.variant {
        Variant::Rabi | Variant::Anisotropic => Some(vec![
            parity_chain(params, Parity::Plus, n_max),
            parity_chain(params, Parity::Minus, n_max),
        ]),
        Variant::TwoPhoton => Some(
            TwoPhotonClass::ALL
                .iter()
                .map(|&c| two_photon_chain(params, c, n_max))
                .collect(),
        ),
        Variant::Asymmetric if params.epsilon == 0.0 => Some(vec![
            parity_chain(params, Parity::Plus, n_max),
            parity_chain(params, Parity::Minus, n_max),
        ]),
        Variant::Asymmetric => None,
    }
}

pub fn build_hamiltonian(params: &ModelParams, n_max: usize) -> Result<FockHamiltonian> {
    params.validate()?;
    if n_max < 2 {
        return Err(RabiError::Domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let dim = 2 * (n_max + 1);
    let mut h = DMatrix::zeros(dim, dim);
    let (w, d, g) = (params.omega, params.delta, params.g);
    let mut set = |i: usize, j: usize, v: f64| {
        h[(i, j)] += v;
        if i != j {
            h[(j, i)] += v;
        }
    };
    for n in 0..=n_max {
        let up = basis_index(true, n);
        let dn = basis_index(false, n);
        set(up, up, n as f64 * w + d);
        set(dn, dn, n as f64 * w - d);
        match params.variant {
            Variant::TwoPhoton => {
                if n + 2 <= n_max {
                    let amp = g * (((n + 1) * (n + 2)) as f64).sqrt();
                    set(up, basis_index(false, n + 2), amp);
                    set(dn, basis_index(true, n + 2), amp);
                }
            }
            _ => {
                if n < n_max {
                    let amp = g * ((n + 1) as f64).sqrt();
                    let counter = if params.variant == Variant::Anisotropic { params.lambda } else { 1.0 };
                    set(up, basis_index(false, n + 1), amp);
                    set(dn, basis_index(true, n + 1), counter * amp);
                }
                if params.variant == Variant::Asymmetric {
                    set(up, dn, params.epsilon);
                }
            }
        }
    }
    Ok(FockHamiltonian { n_max, dense: h, chains: chains(params, n_max) })
}

/// ⟨Π⟩ with Π = −σ_z(−1)^{a†a}.
pub fn parity_expectation(v: &[f64]) -> f64 {
    v.iter()
        .enumerate()
        .map(|(i, c)| {
            let n = i / 2;
            let up = i % 2 == 0;
            let sz = if up { 1.0 } else { -1.0 };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            -sz * sign * c * c
        })
        .sum()
}

/// Parity label of a normalised state, `None` when |⟨Π⟩| ≤ 0.999.
pub fn parity_of_state(v: &[f64]) -> Option<Parity> {
    let p = parity_expectation(v);
    if p > 0.999 {
        Some(Parity::Plus)
    } else if p < -0.999 {
        Some(Parity::Minus)
    } else {
        None
    }
}

/// ⟨a†a⟩ of a dense-basis state.
pub fn photon_number(v: &[f64]) -> f64 {
    v.iter().enumerate().map(|(i, c)| (i / 2) as f64 * c * c).sum()
}

#[derive(Debug, Clone)]
pub struct OracleSpectrum {
    pub energies: Vec<f64>,
    pub labels: Vec<SymmetryLabel>,
    /// Dense-basis eigenvectors of the truncation actually used.
    pub vectors: Vec<Vec<f64>>,
    pub truncation_used: usize,
    pub converged: bool,
}

pub const ORACLE_TOL: f64 = 1e-10;
pub const MAX_DOUBLINGS: usize = 6;

pub fn oracle_start(params: &ModelParams, k: usize) -> usize {
    let s = params.scaled();
    (4 * k).max((16.0 * s.g * s.g).ceil() as usize + 32)
}

struct Level {
    e: f64,
    label: SymmetryLabel,
    vec: Option<Vec<f64>>,
}

fn solve_at(params: &ModelParams, n_max: usize, want_vectors: bool, only: Option<SymmetryLabel>) -> Result<Vec<Level>> {
    let mut out = Vec::new();
    match chains(params, n_max) {
        Some(chs) => {
            for ch in chs.iter().filter(|c| only.is_none_or(|l| l == c.label)) {
                if want_vectors {
                    let eig = linalg::tridiag_eigen(&ch.diag, &ch.offdiag)?;
                    for (e, v) in eig.values.into_iter().zip(eig.vectors) {
                        out.push(Level { e, label: ch.label, vec: Some(ch.embed(&v, n_max)) });
                    }
                } else {
                    for e in linalg::tridiag_eigenvalues(&ch.diag, &ch.offdiag)? {
                        out.push(Level { e, label: ch.label, vec: None });
                    }
                }
            }
        }
        None => {
            let h = build_hamiltonian(params, n_max)?;
            let eig = linalg::dense_eigen(&h.dense);
            for (e, v) in eig.values.into_iter().zip(eig.vectors) {
                let label = parity_of_state(&v).map_or(SymmetryLabel::Undefined, SymmetryLabel::Parity);
                out.push(Level { e, label, vec: Some(v) });
            }
        }
    }
    out.sort_by(|a, b| a.e.total_cmp(&b.e).then(a.label.cmp(&b.label)));
    Ok(out)
}

fn oracle_impl(
    params: &ModelParams,
    k: usize,
    tol: f64,
    want_vectors: bool,
    only: Option<SymmetryLabel>,
    start: Option<usize>,
) -> Result<OracleSpectrum> {
    params.validate()?;
    if k == 0 || !(tol > 0.0) {
        return Err(RabiError::Domain("oracle needs k >= 1 and tol > 0".into()));
    }
    let mut n = start.unwrap_or_else(|| oracle_start(params, k)).max(2);
    let mut prev = solve_at(params, n, false, only)?;
    for _ in 0..MAX_DOUBLINGS {
        let m = 2 * n;
        let cur = solve_at(params, m, want_vectors, only)?;
        if prev.len() >= k && cur.len() >= k {
            let shift = prev[..k]
                .iter()
                .zip(&cur[..k])
                .map(|(a, b)| (a.e - b.e).abs())
                .fold(0.0, f64::max);
            if shift < tol * params.omega {
                let cur: Vec<Level> = cur.into_iter().take(k).collect();
                return Ok(OracleSpectrum {
                    energies: cur.iter().map(|l| l.e).collect(),
                    labels: cur.iter().map(|l| l.label).collect(),
                    vectors: cur.into_iter().filter_map(|l| l.vec).collect(),
                    truncation_used: m,
                    converged: true,
                });
            }
        }
        prev = if want_vectors { solve_at(params, m, false, only)? } else { cur };
        n = m;
    }
    Err(RabiError::NonConvergence(format!(
        "oracle: lowest {k} levels not converged to {tol:e} after {MAX_DOUBLINGS} truncation doublings (n_max = {n})"
    )))
}

/// Lowest `k` levels converged under truncation doubling.
pub fn oracle_spectrum(params: &ModelParams, k: usize, tol: f64) -> Result<OracleSpectrum> {
    oracle_impl(params, k, tol, true, None, None)
}

/// Like [`oracle_spectrum`] but without eigenvectors.
pub fn oracle_energies(params: &ModelParams, k: usize, tol: f64) -> Result<OracleSpectrum> {
    oracle_impl(params, k, tol, false, None, None)
}

/// Lowest `k` levels of one symmetry sector.
pub fn oracle_sector(params: &ModelParams, label: SymmetryLabel, k: usize, tol: f64, want_vectors: bool) -> Result<OracleSpectrum> {
    if !params.sectors().contains(&label) {
        return Err(RabiError::Domain(format!("{:?} has no sector {:?}", params.variant, label)));
    }
    oracle_impl(params, k, tol, want_vectors, Some(label), None)
}

/// Oracle starting from an explicit truncation (used to test truncation stability).
pub fn oracle_from(params: &ModelParams, k: usize, tol: f64, n_start: usize) -> Result<OracleSpectrum> {
    oracle_impl(params, k, tol, true, None, Some(n_start))
}

/// Every eigenvalue of the truncated hamiltonian at fixed `n_max`.
pub fn truncated_energies(params: &ModelParams, n_max: usize) -> Result<Vec<f64>> {
    params.validate()?;
    Ok(solve_at(params, n_max, false, None)?.into_iter().map(|l| l.e).collect())
}

/// Smallest gap between neighbouring oracle levels around `e`.
pub fn gap_near(params: &ModelParams, e: f64) -> Result<(f64, f64, f64)> {
    let k = ((e / params.omega).max(0.0) as usize) * 4 + 12;
    let sp = oracle_energies(params, k, 1e-12)?;
    let mut best = (f64::INFINITY, f64::NAN, f64::NAN);
    for w in sp.energies.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if (mid - e).abs() < 0.25 * params.omega {
            let gap = w[1] - w[0];
            if gap < best.0 {
                best = (gap, w[0], w[1]);
            }
        }
    }
    if best.0.is_finite() {
        Ok(best)
    } else {
        Err(RabiError::Domain(format!("no pair of levels near E = {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_levels() {
        let p = ModelParams::rabi(0.4, 0.0);
        let sp = oracle_spectrum(&p, 6, 1e-12).unwrap();
        let want = [-0.4, 0.4, 0.6, 1.4, 1.6, 2.4];
        for (a, b) in sp.energies.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_splitting_gives_shifted_ladder() {
        let p = ModelParams::rabi(0.0, 0.7);
        let sp = oracle_energies(&p, 8, 1e-11).unwrap();
        for (i, e) in sp.energies.iter().enumerate() {
            assert!((e - ((i / 2) as f64 - 0.49)).abs() < 1e-9, "{i} {e}");
        }
    }

    #[test]
    fn chains_reproduce_dense_spectrum() {
        let p = ModelParams::rabi(0.4, 0.7);
        let h = build_hamiltonian(&p, 200).unwrap();
        let dense = linalg::dense_eigen(&h.dense).values;
        let mut merged: Vec<f64> = h
            .chains
            .unwrap()
            .iter()
            .flat_map(|c| linalg::tridiag_eigenvalues(&c.diag, &c.offdiag).unwrap())
            .collect();
        merged.sort_by(f64::total_cmp);
        for (a, b) in dense.iter().zip(&merged) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn parity_commutes_with_symmetric_models() {
        for p in [ModelParams::rabi(0.4, 0.7), ModelParams::anisotropic(0.3, 0.9, 0.4)] {
            let h = build_hamiltonian(&p, 30).unwrap().dense;
            let dim = h.nrows();
            let pi = DMatrix::from_fn(dim, dim, |i, j| {
                if i != j {
                    0.0
                } else {
                    let mut v = vec![0.0; dim];
                    v[i] = 1.0;
                    parity_expectation(&v)
                }
            });
            assert!((&pi * &h - &h * &pi).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_parities() {
        let mut v = vec![0.0; 8];
        v[basis_index(false, 0)] = 1.0;
        assert_eq!(parity_of_state(&v), Some(Parity::Plus));
        let mut v = vec![0.0; 8];
        v[basis_index(true, 0)] = 1.0;
        assert_eq!(parity_of_state(&v), Some(Parity::Minus));
    }

    #[test]
    fn asymmetric_eigenvectors_have_no_parity() {
        let p = ModelParams::asymmetric(0.4, 0.7, 0.25);
        let sp = oracle_spectrum(&p, 4, 1e-10).unwrap();
        assert!(sp.labels.iter().all(|l| *l == SymmetryLabel::Undefined));
    }

    #[test]
    fn two_photon_has_no_single_photon_elements() {
        let p = ModelParams::two_photon(1.0, 0.3);
        let h = build_hamiltonian(&p, 20).unwrap().dense;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                if (i / 2).abs_diff(j / 2) % 2 == 1 {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
        assert!(build_hamiltonian(&ModelParams::two_photon(1.0, 0.5), 20).is_err());
    }

    #[test]
    fn oracle_is_variational_in_truncation() {
        let p = ModelParams::rabi(0.7, 1.1);
        let mut prev = vec![f64::INFINITY; 6];
        for n in [10, 14, 20, 30, 45] {
            let e = truncated_energies(&p, n).unwrap();
            for k in 0..6 {
                assert!(e[k] <= prev[k] + 1e-12);
                prev[k] = e[k];
            }
        }
    }

    #[test]
    fn omega_rescaling() {
        let a = oracle_energies(&ModelParams::rabi(0.4, 0.7), 5, 1e-11).unwrap();
        let b = oracle_energies(&ModelParams::rabi(0.8, 1.4).with_omega(2.0), 5, 1e-11).unwrap();
        for (x, y) in a.energies.iter().zip(&b.energies) {
            assert!((2.0 * x - y).abs() < 1e-9);
        }
    }
}
