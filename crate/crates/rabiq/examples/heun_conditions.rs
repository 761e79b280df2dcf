// The confluent-Heun form of the spectral condition. The weak conditions
// G^+_k share zeros with G_+ or G_-, W1 vanishes on both sets, and K is
// identically zero. Away from z = 0 a weak condition can pick up a stray zero;
// it does not survive the z-grid certificate.

use rabiq::heun;
use rabiq::model::ModelParams;
use rabiq::recurrences::GSign;
use rabiq::spectrum::{condition_roots, Condition, ConditionRoot};

pub struct Report {
    pub braak_plus: Vec<f64>,
    pub braak_minus: Vec<f64>,
    pub weak: Vec<(usize, f64, Vec<ConditionRoot>)>,
    pub w1: Vec<ConditionRoot>,
}

pub fn run_example() -> rabiq::Result<Report> {
    let p = ModelParams::rabi(0.7, 0.8);
    let range = (-1.5, 4.0);
    let energies = |c| -> rabiq::Result<Vec<f64>> { Ok(condition_roots(&p, c, 0.0, range)?.iter().map(|r| r.energy).collect()) };
    let braak_plus = energies(Condition::Braak(GSign::Plus))?;
    let braak_minus = energies(Condition::Braak(GSign::Minus))?;
    println!("G_+ : {braak_plus:.8?}");
    println!("G_- : {braak_minus:.8?}");
    let mut weak = Vec::new();
    for z in [0.0, 0.24] {
        for k in 1..=4 {
            let r = condition_roots(&p, Condition::Weak(GSign::Plus, k), z, range)?;
            let show: Vec<String> = r
                .iter()
                .map(|c| if c.certified { format!("{:.8}", c.energy) } else { format!("({:.8}, residual {:.2})", c.energy, c.grid_residual) })
                .collect();
            println!("G^+_{k} z={z}: {}", show.join(" "));
            weak.push((k, z, r));
        }
    }
    let w1 = condition_roots(&p, Condition::W1, 0.0, range)?;
    println!("W1  : {} zeros", w1.len());
    let k = heun::k_condition(1.3, 0.2, GSign::Plus, &p)?;
    println!("K^+(1.3, 0.2) = {k:.1e}");
    Ok(Report { braak_plus, braak_minus, weak, w1 })
}

fn main() -> rabiq::Result<()> {
    run_example().map(|_| ())
}
