mod support;

use bandcut::decay::{fit_in_gap_states, DecayOptions};
use bandcut::fiber::{fiber_essential_gap, solve_fiber, Boundary, FiberSpec};
use bandcut::potential::{make_potential, PotentialSpec, RationalAngle};
use std::f64::consts::TAU;
use support::{fd_floquet_exponent, separable_split, spearman, Hill};

const V: f64 = 30.0;
const NY: usize = 16;

fn fits(t: f64, k: f64, periods: usize) -> Vec<(f64, bandcut::DecayFit, (f64, f64))> {
    let v = make_potential(&PotentialSpec::Cosine2d { amplitude: V }).unwrap();
    let spec = FiberSpec::new(v, RationalAngle::UNROTATED, Boundary::Dislocated, NY, periods).unwrap().with_t(t).with_k(k);
    let gap = fiber_essential_gap(&spec, -1.0, 17).unwrap().unwrap();
    let mut s = solve_fiber(&spec, gap, 100).unwrap();
    s.classify(gap);
    fit_in_gap_states(&s, &DecayOptions::default()).unwrap().into_iter().map(|(e, f)| (e, f.unwrap(), gap)).collect()
}

#[test]
fn decay_rate_matches_the_transfer_matrix_and_ignores_the_wall() {
    let h = 1.0 / NY as f64;
    let cell: Vec<f64> = (0..NY).map(|n| V * (TAU * n as f64 * h).cos()).collect();
    let hill = Hill::cosine(V);
    let (short, long) = (fits(0.4, 0.2, 10), fits(0.4, 0.2, 20));
    assert!(!short.is_empty());
    assert_eq!(short.len(), long.len());
    for ((e, f, _), (_, g, _)) in short.iter().zip(&long) {
        assert!(f.accepted(), "{e}: {f:?}");
        assert!((f.alpha_fit - g.alpha_fit).abs() < 0.02 * f.alpha_fit, "{f:?} vs {g:?}");
        let (e1, _) = separable_split(V, h, 10, 0.4, 0.2, false, *e);
        let fd = fd_floquet_exponent(h, &cell, e1);
        assert!((f.alpha_fit - fd).abs() < 0.1 * fd, "{e}: fit {} vs transfer matrix {fd}", f.alpha_fit);
        let continuum = hill.floquet_exponent(e1);
        assert!((f.alpha_fit - continuum).abs() < 0.1 * continuum, "{e}: fit {} vs Hill {continuum}", f.alpha_fit);
    }
}

#[test]
fn deeper_states_decay_faster() {
    let (mut depth, mut alpha) = (Vec::new(), Vec::new());
    for i in 0..12 {
        for (e, f, gap) in fits(i as f64 / 12.0, 0.0, 8) {
            assert!(f.alpha_fit > 0.0);
            depth.push((e - gap.0).min(gap.1 - e));
            alpha.push(f.alpha_fit);
        }
    }
    assert!(alpha.len() >= 5);
    assert!(spearman(&depth, &alpha) >= 0.0, "{depth:?} {alpha:?}");
}
