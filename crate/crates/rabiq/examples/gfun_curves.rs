// G_+ and G_- on x in [-1, 5] at g = 0.7, delta = 0.4, and where they vanish.
// Pipe the table into any plotting tool; poles sit at the integers.

use rabiq::model::ModelParams;
use rabiq::recurrences::{self, GSign, SeriesConfig};
use rabiq::spectrum::{scan_roots, RootScanConfig};

pub fn run_example() -> rabiq::Result<(Vec<f64>, Vec<f64>)> {
    let p = ModelParams::rabi(0.4, 0.7);
    let cfg = SeriesConfig::default();
    let g = |x: f64, s| recurrences::braak_g(x, s, &p, &cfg).map_or(f64::NAN, |v| v.value);
    for i in 0..=24 {
        let x = -1.0 + 0.25 * i as f64 + 0.01;
        println!("{x:6.2} {:14.6} {:14.6}", g(x, GSign::Plus), g(x, GSign::Minus));
    }
    let poles: Vec<f64> = (0..=6).map(f64::from).collect();
    let roots = |s| {
        scan_roots(|x| recurrences::braak_g(x, s, &p, &cfg).map(|v| v.value), &poles, &RootScanConfig::new(-1.0, 5.0)).roots
    };
    let (rp, rm) = (roots(GSign::Plus), roots(GSign::Minus));
    println!("G_+ zeros (parity {:+}): {rp:.6?}", recurrences::braak_parity(GSign::Plus).value());
    println!("G_- zeros (parity {:+}): {rm:.6?}", recurrences::braak_parity(GSign::Minus).value());
    Ok((rp, rm))
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
