// Collapse and revival of the inversion from a coherent field.
// Weak coupling at resonance against the RWA formula, the delta = 0 closed
// form, and deep-strong periodic revivals.

use std::f64::consts::PI;

use rabiq::dynamics::{self, QuantumState};
use rabiq::model::ModelParams;

pub struct Summary {
    pub norm_drift: f64,
    pub rwa_max_diff: f64,
    pub delta0_max_diff: f64,
    pub deep_strong_peaks: Vec<f64>,
}

pub fn run_example() -> rabiq::Result<Summary> {
    let alpha = 3.0;
    let psi = dynamics::coherent_initial(alpha, true, dynamics::coherent_n_max(alpha))?;

    let weak = ModelParams::rabi(0.5, 0.02);
    let times = dynamics::time_grid(5.0 / 0.02, Some(1024));
    let full = dynamics::propagate(&psi, &weak, &times)?;
    let rwa = dynamics::p_rwa(&psi, &weak, &times)?;
    let rwa_max_diff = full.inversion.iter().zip(&rwa.inversion).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    for i in (0..times.len()).step_by(128) {
        println!("gt={:5.2} P={:+.4} P_rwa={:+.4}", 0.02 * times[i], full.inversion[i], rwa.inversion[i]);
    }
    println!("max |P - P_rwa| = {rwa_max_diff:.4}");

    let long = dynamics::propagate(&psi, &ModelParams::rabi(0.5, 0.2), &dynamics::time_grid(250.0, Some(512)))?;
    println!("norm drift over gt <= 50: {:.1e}", long.max_norm_drift);

    let d0 = ModelParams::rabi(0.0, 0.3);
    let t2 = dynamics::time_grid(4.0 * PI, Some(256));
    let num = dynamics::propagate(&QuantumState::fock(true, 0, 40)?, &d0, &t2)?;
    let closed = dynamics::delta0_revival(0.3, 1.0, &t2);
    let delta0_max_diff = match (&num.revival, &closed.revival) {
        (Some(a), Some(b)) => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        _ => f64::NAN,
    };
    println!("delta=0 revival vs exp(-|alpha(t)|^2): {delta0_max_diff:.1e}");

    let ds = ModelParams::rabi(0.5, 2.0);
    let a = 10f64.sqrt();
    let t3 = dynamics::time_grid(20.0, Some(4001));
    let tr = dynamics::propagate(&dynamics::coherent_initial(a, true, dynamics::coherent_n_max(a))?, &ds, &t3)?;
    let rev = tr.revival.clone().unwrap_or_default();
    let mut peaks = Vec::new();
    for k in 1..=3 {
        if let Some((t, v)) = dynamics::peak_near(&t3, &rev, 2.0 * PI * k as f64, 0.5) {
            println!("deep strong: revival {v:.3} at t = {t:.4} (2 pi k = {:.4})", 2.0 * PI * k as f64);
            peaks.push(t);
        }
    }
    Ok(Summary { norm_drift: long.max_norm_drift, rwa_max_diff, delta0_max_diff, deep_strong_peaks: peaks })
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
