// Anisotropic model from the isotropic (lambda = 1) to the Jaynes-Cummings
// (lambda = 0) limit.

use rabiq::model::{self, ModelParams};
use rabiq::recurrences;
use rabiq::spectrum;

/// (lambda, largest deviation from the reference) for each lambda.
pub fn run_example() -> rabiq::Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for lambda in [1.0, 0.5, 0.0] {
        let p = ModelParams::anisotropic(0.4, 0.7, lambda);
        let lv = spectrum::regular_spectrum(&p, 10)?;
        let reference: Vec<f64> = if lambda == 0.0 {
            recurrences::aniso_jc_levels(&p, 12).into_iter().map(|(e, _)| e).collect()
        } else {
            model::oracle_energies(&p, 10, 1e-12)?.energies
        };
        let d = lv.iter().zip(&reference).map(|(l, e)| (l.energy - e).abs()).fold(0.0, f64::max);
        let labels: Vec<String> = lv.iter().map(|l| l.label.short()).collect();
        println!("lambda={lambda}: max dev {d:.1e}, parities {}", labels.join(" "));
        out.push((lambda, d));
    }
    Ok(out)
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
