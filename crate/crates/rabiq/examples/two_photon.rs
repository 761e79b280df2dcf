// Two-photon model: four C4 symmetry classes, the N = 2 exceptional point
// at delta = 1, and the collapse of the level spacing as g -> omega/2.

use rabiq::model::{self, ModelParams};
use rabiq::spectrum::{self, TwoPhotonFamily};

pub struct Summary {
    pub root_error: f64,
    pub exceptional_g2: f64,
    pub exceptional_gap: f64,
    /// (g, mean low-level spacing, sqrt(1 - 4g^2)/2)
    pub spacing: Vec<(f64, f64, f64)>,
}

pub fn run_example() -> rabiq::Result<Summary> {
    let p = ModelParams::two_photon(1.0, 0.25);
    let lv = spectrum::regular_spectrum(&p, 8)?;
    let or = model::oracle_energies(&p, 8, 1e-12)?;
    let mut root_error = 0.0f64;
    for (l, e) in lv.iter().zip(&or.energies) {
        root_error = root_error.max((l.energy - e).abs());
        println!("{:>5} {:.12} oracle {:.12}", l.label.short(), l.energy, e);
    }
    let ep = spectrum::twophoton_exceptional(TwoPhotonFamily::HalfInteger, 2, 1.0, 1.0)?;
    let ep = ep.first().ok_or_else(|| rabiq::RabiError::NonConvergence("no N=2 point".into()))?;
    println!("N=2: g^2 = {:.12} E = {:.10} gap {:.1e}", ep.g_star * ep.g_star, ep.energy, ep.degeneracy_gap);

    // mean spacing of the lowest 21 levels against sqrt(1 - 4g^2)/2 (four interleaved ladders
    // of step 2 sqrt(1 - 4g^2)); delta is kept small so level repulsion stays a percent effect
    let mut spacing = Vec::new();
    for g in [0.3, 0.4, 0.44, 0.45] {
        let e = model::oracle_energies(&ModelParams::two_photon(0.1, g), 21, 1e-10)?.energies;
        let mean = (e[20] - e[0]) / 20.0;
        let want = (1.0 - 4.0 * g * g).sqrt() / 2.0;
        println!("g={g}: mean spacing {mean:.5}, sqrt(1-4g^2)/2 = {want:.5}, ratio {:.4}", mean / want);
        spacing.push((g, mean, want));
    }
    Ok(Summary { root_error, exceptional_g2: ep.g_star * ep.g_star, exceptional_gap: ep.degeneracy_gap, spacing })
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
