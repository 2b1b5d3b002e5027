mod support;

use bandcut::bulk::{compute_bands, find_gaps};
use bandcut::fiber::Boundary;
use bandcut::flow::{compute_flow, verify_flow_theorem, FlowSetup};
use bandcut::potential::{make_potential, PotentialSpec, RationalAngle};
use support::Hill;

fn deep_well() -> (bandcut::Potential, bandcut::SpectralGap) {
    let v = make_potential(&PotentialSpec::Cosine2d { amplitude: 30.0 }).unwrap();
    let bs = compute_bands(&v, &RationalAngle::UNROTATED, 12, 4, 6).unwrap();
    let gap = find_gaps(&bs, (-30.0, 20.0), 1e-6).unwrap()[0];
    (v, gap)
}

#[test]
fn one_downward_branch_per_period_and_reversal() {
    let (v, gap) = deep_well();
    // Exactly one separable band lies below the gap: 2 top_1 < gap < bottom_1 + bottom_2.
    let edges = Hill::cosine(30.0).band_edges(2);
    assert!(2.0 * edges[0].1 <= gap.a + 1e-6 && gap.b <= edges[0].0 + edges[1].0 + 1e-6);
    assert_eq!(gap.n_below, 1);

    let angle = RationalAngle::UNROTATED;
    let setup = FlowSetup::for_angle(&angle);
    let (report, bf) = verify_flow_theorem(&v, &angle, gap, 0.0, Boundary::Dislocated, &setup).unwrap();
    assert!(report.pass, "{report:?}");
    assert_eq!(report.measured_flow, 1);
    assert_eq!(compute_flow(&bf.reversed(), report.reference_energy).unwrap().flow, -1);
    assert!(bf.min_overlap >= 0.7);
    for b in &bf.branches {
        assert!(b.points.iter().all(|p| bf.gap.a <= p.energy && p.energy <= bf.gap.b));
    }

    // The family is periodic: the in-gap spectrum returns after one period.
    let (first, last) = (bf.energies_at(0), bf.energies_at(bf.t_grid.len() - 1));
    assert_eq!(first.len(), last.len());
    for (x, y) in first.iter().zip(&last) {
        assert!((x - y).abs() < 1e-4);
    }

    let mut fine = setup.clone();
    fine.tracking.initial_steps *= 2;
    let (refined, _) = verify_flow_theorem(&v, &angle, gap, 0.0, Boundary::Dislocated, &fine).unwrap();
    assert_eq!(refined.measured_flow, report.measured_flow);
}

#[test]
fn dirichlet_and_dislocated_agree_per_period() {
    let (v, gap) = deep_well();
    let angle = RationalAngle::UNROTATED;
    let setup = FlowSetup::for_angle(&angle);
    let (dirichlet, _) = verify_flow_theorem(&v, &angle, gap, 0.0, Boundary::Dirichlet, &setup).unwrap();
    let (dislocated, _) = verify_flow_theorem(&v, &angle, gap, 0.0, Boundary::Dislocated, &setup).unwrap();
    assert_eq!(dirichlet.measured_flow, dislocated.measured_flow);
    assert!(dirichlet.max_rate <= 1.2 * dirichlet.lipschitz_nu);
}

#[test]
fn free_operator_has_zero_flow() {
    let v = make_potential(&PotentialSpec::Zero).unwrap();
    let angle = RationalAngle::UNROTATED;
    let gap = bandcut::SpectralGap { a: -3.0, b: -1.0, n_below: 0 };
    let (report, bf) = verify_flow_theorem(&v, &angle, gap, 0.0, Boundary::Dislocated, &FlowSetup::for_angle(&angle)).unwrap();
    assert!(bf.is_empty());
    assert_eq!(report.measured_flow, 0);
    assert!(report.pass);
}
