use std::path::Path;

use num_complex::Complex64;
use proptest::prelude::*;

use primordia_core::io::{parse_config_str, read_snapshot};
use primordia_core::roots::{from_roots, poly_roots};
use primordia_core::sim::run_simulation;
use primordia_core::stability::*;
use primordia_core::{ParameterSet, SteadyState};

#[test]
fn config_to_snapshots() {
    let text = "\
[simulation]
preset = suppressed_motion
[grid]
nx = 10
ny = 8
[time]
t_final = 1
[output]
output_every = 2
snapshot_fields = m, f
";
    let cfg = parse_config_str(text, Path::new("run.cfg")).unwrap().sim_config().unwrap();
    assert_eq!(cfg.params.m0, 0.75);
    assert_eq!(cfg.steps(), 5);
    let dir = tempfile::tempdir().unwrap();
    let run = run_simulation(&cfg, Some(dir.path())).unwrap();
    for name in ["m_000000.txt", "m_000002.txt", "m_000004.txt", "f_000005.txt", "diagnostics.csv"] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    let snap = read_snapshot(&dir.path().join("m_000005.txt")).unwrap();
    assert_eq!((snap.nx, snap.ny), (10, 8));
    assert!((snap.t - 1.0).abs() < 1e-12);
    assert_eq!(snap.values, run.final_state.m);
    let rows = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 1 + 5);
}

#[test]
fn dispersion_agrees_with_patterning_flag() {
    // the flag says some k^2 in the window grows; the scan should see it
    let grid = log_k2_grid(1e-3, DEFAULT_K2_MAX, 2000);
    for (m0, alpha) in [(2.0, 4.0), (0.5, 4.0), (2.0, 0.2), (4.0, 10.0), (0.15, 12.0)] {
        let mut p = ParameterSet::default();
        p.m0 = m0;
        p.alpha = alpha;
        p.tau = 0.0;
        let s = SteadyState::new(&p).unwrap();
        let flag = uncoupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap().patterning;
        let grows = dispersion(&p, &s, &grid, DispersionOptions::default()).unwrap().iter().any(|pt| pt.max_re > 1e-9);
        assert_eq!(flag, grows, "m0 = {m0}, alpha = {alpha}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn companion_roots_recover_constructed_roots(
        mods in prop::collection::vec(0.5f64..2.0, 5),
        args in prop::collection::vec(-3.1f64..3.1, 5),
    ) {
        let exact: Vec<Complex64> = mods.iter().zip(&args).map(|(&r, &a)| Complex64::from_polar(r, a)).collect();
        let sep = exact.iter().enumerate().flat_map(|(i, a)| exact[i + 1..].iter().map(move |b| (a - b).norm()))
            .fold(f64::INFINITY, f64::min);
        prop_assume!(sep > 0.1);
        let found = poly_roots(&from_roots(&exact)).unwrap();
        for z in &exact {
            let d = found.iter().map(|w| (w - z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(d < 1e-8, "{z} missed by {d}");
        }
    }

    #[test]
    fn no_active_stress_means_no_coupling(m0 in 0.1f64..5.0, alpha in 0.0f64..12.0, xi in 0.0f64..0.5) {
        let mut p = ParameterSet::default();
        p.m0 = m0;
        p.alpha = alpha;
        p.xi_f = xi;
        p.tau = 0.0;
        let s = SteadyState::new(&p).unwrap();
        for x in [0.1, 1.0, 10.0] {
            prop_assert!(CharPoly::new(&p, &s, x).b.iter().all(|&b| b == 0.0));
        }
        let u = uncoupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
        let c = coupled_conditions(&p, &s, DEFAULT_K2_MAX).unwrap();
        prop_assert_eq!(u.patterning, c.patterning);
    }
}
