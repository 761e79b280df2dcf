// Asymmetric model: half-integer bias restores the level crossings, and the
// number of exceptional crossings per branch follows the band rule.

use rabiq::model::{self, ModelParams};
use rabiq::spectrum::{self, AsymBranch};

pub struct Crossings {
    pub delta: f64,
    /// bands for the +eps and -eps branches
    pub band: (Option<usize>, Option<usize>),
    pub plus: usize,
    pub minus: usize,
}

pub fn run_example() -> rabiq::Result<(f64, Vec<Crossings>)> {
    let mut gap = 0.0f64;
    for a in spectrum::asym_judd_points(2, 0.4, 0.5, 1.0, (0.0, 3.0))? {
        println!("eps=0.5 {:?}: g*={:.6} E={:.6} gap {:.1e}", a.branch, a.point.g_star, a.point.energy, a.point.degeneracy_gap);
        gap = gap.max(a.point.degeneracy_gap);
    }
    let lv = spectrum::regular_spectrum(&ModelParams::asymmetric(0.4, 0.7, 0.3), 6)?;
    let or = model::oracle_energies(&ModelParams::asymmetric(0.4, 0.7, 0.3), 6, 1e-12)?;
    for (l, e) in lv.iter().zip(&or.energies) {
        println!("eps=0.3 g=0.7  {:.12}  oracle {:.12}", l.energy, e);
    }
    let mut rows = Vec::new();
    for delta in [0.5, 1.0, 1.3, 1.8, 2.2] {
        let pts = spectrum::asym_judd_points(3, delta, 0.2, 1.0, (0.0, 4.0))?;
        let plus = pts.iter().filter(|a| a.branch == AsymBranch::Plus).count();
        let c = Crossings { delta, band: (spectrum::asym_band(delta, 0.2), spectrum::asym_band(delta, -0.2)), plus, minus: pts.len() - plus };
        println!(
            "N=3 eps=0.2 delta={delta}: +eps band {:?} -> {} crossings, -eps band {:?} -> {} crossings",
            c.band.0, c.plus, c.band.1, c.minus
        );
        rows.push(c);
    }
    Ok((gap, rows))
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
