//! Every example runs and its headline number holds.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(spectrum);
example!(gfun_curves);
example!(judd_points);
example!(heun_conditions);
example!(asymmetric);
example!(anisotropic);
example!(two_photon);
example!(dynamics_collapse_revival);
example!(level_statistics);
example!(berry_phase);

#[test]
fn spectrum_example() {
    assert!(spectrum::run_example().unwrap() < 1e-8);
}

#[test]
fn gfun_example() {
    let (p, m) = gfun_curves::run_example().unwrap();
    assert_eq!(p.len() + m.len(), 11);
    // G_+ carries parity -1: its first zero is above the G_- ground state
    assert!(m[0] < p[0]);
}

#[test]
fn judd_example() {
    let pts = judd_points::run_example().unwrap();
    assert_eq!(pts.len(), 3 * 6 + 3);
    assert!(pts.iter().all(|p| p.degeneracy_gap < 1e-8));
}

#[test]
fn heun_example() {
    let r = heun_conditions::run_example().unwrap();
    for (k, _, roots) in &r.weak {
        let want = if *k >= 3 { &r.braak_plus } else { &r.braak_minus };
        let got: Vec<f64> = roots.iter().filter(|c| c.certified).map(|c| c.energy).collect();
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-8);
        }
    }
    assert_eq!(r.w1.len(), r.braak_plus.len() + r.braak_minus.len());
}

#[test]
fn asymmetric_example() {
    let (gap, rows) = asymmetric::run_example().unwrap();
    assert!(gap < 1e-8);
    for c in rows {
        assert_eq!(c.plus, 3 - c.band.0.unwrap());
        assert_eq!(c.minus, 3 - c.band.1.unwrap());
    }
}

#[test]
fn anisotropic_example() {
    for (lambda, d) in anisotropic::run_example().unwrap() {
        assert!(d < 1e-7, "lambda {lambda}: {d}");
    }
}

#[test]
fn two_photon_example() {
    let s = two_photon::run_example().unwrap();
    assert!(s.root_error < 1e-6);
    assert!((s.exceptional_g2 - 0.125).abs() < 1e-12 && s.exceptional_gap < 1e-7);
    for (g, mean, want) in s.spacing {
        assert!((mean / want - 1.0).abs() < 0.02, "g = {g}");
    }
}

#[test]
fn dynamics_example() {
    let s = dynamics_collapse_revival::run_example().unwrap();
    assert!(s.norm_drift < 1e-10);
    assert!(s.delta0_max_diff < 1e-6);
    // counter-rotating terms shift P by a few percent at g = 0.02, n = 9
    assert!(s.rwa_max_diff < 0.1);
    assert_eq!(s.deep_strong_peaks.len(), 3);
    for (k, t) in s.deep_strong_peaks.iter().enumerate() {
        assert!((t / (2.0 * std::f64::consts::PI * (k + 1) as f64) - 1.0).abs() < 0.01);
    }
}

#[test]
fn statistics_example() {
    for (g, peaks) in level_statistics::run_example().unwrap() {
        assert_eq!(peaks.len(), 2, "g = {g}");
        assert!(peaks[0] < 1.0 && peaks[1] > 1.0);
    }
}

#[test]
fn berry_example() {
    assert!(berry_phase::run_example().unwrap() < 1e-6);
}
