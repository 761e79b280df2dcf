// Lowest Rabi levels from the G-function zeros, side by side with the
// truncated-Fock diagonalization.

use rabiq::model::{self, ModelParams};
use rabiq::spectrum;

/// Largest |E_analytic - E_oracle| over the printed levels.
pub fn run_example() -> rabiq::Result<f64> {
    let p = ModelParams::rabi(0.4, 0.7);
    let levels = spectrum::regular_spectrum(&p, 12)?;
    let oracle = model::oracle_spectrum(&p, 12, 1e-12)?;
    println!("{:>3} {:>8} {:>20} {:>20} {:>9}", "k", "parity", "E (G zero)", "E (oracle)", "diff");
    let mut worst = 0.0f64;
    for (k, (l, e)) in levels.iter().zip(&oracle.energies).enumerate() {
        let d = (l.energy - e).abs();
        worst = worst.max(d);
        println!("{k:>3} {:>8} {:>20.14} {:>20.14} {d:>9.1e}", l.label.short(), l.energy, e);
    }
    Ok(worst)
}

fn main() -> rabiq::Result<()> {
    let worst = run_example()?;
    println!("max deviation {worst:.2e}");
    Ok(())
}
