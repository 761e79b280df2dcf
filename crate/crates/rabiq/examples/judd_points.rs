// Exceptional (Judd) degeneracies at E = n - g^2: the constraint roots, the
// oracle gap there, and the n - k counting rule for k < delta < k + 1.

use rabiq::spectrum::{self, JuddPoint};

pub fn run_example() -> rabiq::Result<Vec<JuddPoint>> {
    let mut all = Vec::new();
    for delta in [0.3, 0.6, 0.9, 1.4] {
        let k = spectrum::kus_band(delta).unwrap_or(0);
        for n in 1..=3usize {
            let pts = spectrum::judd_points(n, delta, 1.0, (0.0, 3.0))?;
            let gs: Vec<String> = pts.iter().map(|p| format!("{:.6}", p.g_star)).collect();
            let gap = pts.iter().map(|p| p.degeneracy_gap).fold(0.0, f64::max);
            println!("delta={delta} n={n}: {} roots (n-k = {}) g*=[{}] max gap {gap:.1e}", pts.len(), n.saturating_sub(k), gs.join(", "));
            all.extend(pts);
        }
    }
    Ok(all)
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
