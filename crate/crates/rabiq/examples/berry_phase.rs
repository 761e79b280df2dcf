// Geometric phase gamma_n / 2 pi = <a+a> along a coupling sweep, tracked by
// eigenvector overlap.

use rabiq::analysis;
use rabiq::model::ModelParams;

pub fn run_example() -> rabiq::Result<f64> {
    let grid: Vec<f64> = (0..=50).map(|i| i as f64 * 0.02).collect();
    let mut worst = 0.0f64;
    for n in 0..3 {
        // delta = 0: levels 2n and 2n+1 are displaced Fock states with <a+a> = n + g^2
        let r = analysis::berry_phase(&ModelParams::rabi(0.0, 0.0), 2 * n, &grid)?;
        let dev = r.g.iter().zip(&r.gamma).map(|(g, y)| (y - (n as f64 + g * g)).abs()).fold(0.0, f64::max);
        worst = worst.max(dev);
        println!("delta=0 n={n}: max |gamma/2pi - (n + g^2)| = {dev:.1e}, truncation change {:.1e}", r.truncation_change);
    }
    let r = analysis::berry_phase(&ModelParams::rabi(0.3, 0.0), 1, &grid)?;
    println!("delta=0.3 n=1: gamma/2pi from {:.6} (g=0) to {:.6} (g=1), min overlap {:.4}", r.gamma[0], r.gamma[50], r.min_overlap);
    for b in analysis::jc_branches(&ModelParams::anisotropic(0.3, 0.0, 0.0), 2, &[0.0, 0.5, 1.0]) {
        println!("JC N={} branch {:+}: gamma/2pi at g = {:?}: {:.4?}", b.excitation, b.branch, b.g, b.gamma);
    }
    Ok(worst)
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
