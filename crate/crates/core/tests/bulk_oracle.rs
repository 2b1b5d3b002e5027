mod support;

use bandcut::bulk::{bands_below, compute_bands, essential_band_edges, find_gaps};
use bandcut::potential::{grid_scan, make_potential, PotentialSpec, RationalAngle};
use num_complex::Complex;
use support::{fourier_grid_bounds, Hill};

fn cosine(v: f64) -> bandcut::Potential {
    make_potential(&PotentialSpec::Cosine2d { amplitude: v }).unwrap()
}

fn sorted_sums(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut s: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
    s.sort_by(|x, y| x.partial_cmp(y).unwrap());
    s.truncate(n);
    s
}

#[test]
fn separable_bands_are_sums_of_hill_bands() {
    let v = cosine(2.0);
    let bs = compute_bands(&v, &RationalAngle::UNROTATED, 4, 6, 8).unwrap();
    let hill = Hill::cosine(2.0);
    for k in [[0.3, 0.7], [-1.1, 2.4], [0.05, -2.9]] {
        let got = bs.lowest(k, 6).unwrap();
        let want = sorted_sums(&hill.bands_at(k[0], 4), &hill.bands_at(k[1], 4), 6);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-6, "k = {k:?}: {g} vs {w}");
        }
    }
}

#[test]
fn deep_well_gap_from_hill_band_edges() {
    let v = cosine(30.0);
    let bs = compute_bands(&v, &RationalAngle::UNROTATED, 16, 4, 6).unwrap();
    let gaps = find_gaps(&bs, (-30.0, 20.0), 1e-6).unwrap();
    let edges = Hill::cosine(30.0).band_edges(2);
    let (a, b) = (2.0 * edges[0].1, edges[0].0 + edges[1].0);
    assert!(a < b);
    let g = gaps[0];
    assert!((g.a - a).abs() < 1e-5 && (g.b - b).abs() < 1e-5, "{g:?} vs ({a}, {b})");
    assert_eq!(g.n_below, 1);
    assert_eq!(bands_below(&bs, g.midpoint()).unwrap(), 1);
    assert_eq!(bands_below(&bs, -v.sup_norm() - 1.0).unwrap(), 0);

    let fine = compute_bands(&v, &RationalAngle::UNROTATED, 32, 4, 6).unwrap();
    let gf = find_gaps(&fine, (-30.0, 20.0), 1e-6).unwrap()[0];
    assert!((gf.a - g.a).abs() < 1e-4 && (gf.b - g.b).abs() < 1e-4);
}

#[test]
fn rotated_lattice_multiplies_band_count_and_keeps_the_gap() {
    let v = cosine(30.0);
    let e = -1.0;
    let straight = compute_bands(&v, &RationalAngle::UNROTATED, 8, 4, 6).unwrap();
    let rotated = compute_bands(&v, &RationalAngle::new(1, 1).unwrap(), 8, 6, 7).unwrap();
    let n = bands_below(&straight, e).unwrap();
    assert_eq!(n, 1);
    assert_eq!(bands_below(&rotated, e).unwrap(), 2 * n);
    let g0 = find_gaps(&straight, (e, e + 1e-6), 1e-6).unwrap()[0];
    let g1 = find_gaps(&rotated, (e, e + 1e-6), 1e-6).unwrap()[0];
    assert!((g0.a - g1.a).abs() < 1e-4 && (g0.b - g1.b).abs() < 1e-4, "{g0:?} vs {g1:?}");
}

#[test]
fn essential_edges_at_fixed_k_are_shifted_hill_bands() {
    let v = cosine(30.0);
    let bs = compute_bands(&v, &RationalAngle::UNROTATED, 16, 4, 6).unwrap();
    let hill = Hill::cosine(30.0);
    let bands = hill.band_edges(3);
    for k in [0.0, 1.3] {
        let mu = hill.bands_at(k, 2);
        let mut want: Vec<(f64, f64)> = bands.iter().flat_map(|&(lo, hi)| mu.iter().map(move |m| (lo + m, hi + m))).collect();
        want.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in want {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        let want = merged;
        let got = essential_band_edges(&bs, k);
        // Only the lowest interval and the bottom of the next are below the
        // truncation of both lists.
        assert!((got[0].0 - want[0].0).abs() < 1e-5 && (got[0].1 - want[0].1).abs() < 1e-5, "k = {k}: {:?} vs {:?}", got[0], want[0]);
        assert!((got[1].0 - want[1].0).abs() < 1e-5, "k = {k}: {:?} vs {:?}", got[1], want[1]);
        let g = find_gaps(&bs, (-30.0, 20.0), 1e-6).unwrap()[0];
        assert!(got[0].1 <= g.a + 1e-9 && got[1].0 >= g.b - 1e-9);
    }
}

#[test]
fn cosine_bounds_match_a_grid_scan() {
    let v = cosine(4.0);
    let coeffs = [(1, 0, Complex::new(2.0, 0.0)), (-1, 0, Complex::new(2.0, 0.0)), (0, 1, Complex::new(2.0, 0.0)), (0, -1, Complex::new(2.0, 0.0))];
    let (sup, nu) = fourier_grid_bounds(&coeffs, 512);
    assert!((v.sup_norm() - sup).abs() < 1e-9);
    assert!(v.lipschitz_nu() >= nu && v.lipschitz_nu() < nu * 1.01);
    let (s2, n2) = grid_scan(&v, 512);
    assert!((s2 - sup).abs() < 1e-9 && (n2 - nu).abs() < 1e-9);
}
