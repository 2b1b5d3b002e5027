//! Continuous tracking of eigenvalue branches of a fiber family `t -> H(t)`
//! and the spectral flow through a reference energy.

use crate::bulk::SpectralGap;
use crate::error::{Error, Result};
use crate::fiber::{fiber_essential_gap, solve_fiber_seeded, Boundary, FiberSpec, FiberSpectrum};
use crate::linalg::{dot, max_weight_assignment, WindowOptions};
use crate::scalar::Scalar;
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Dyadic resolution of the t-axis: `dt_min = T / TICKS`.
pub const TICKS: u64 = 4096;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TrackingOptions<T: Scalar> {
    /// Uniform steps per period before refinement, rounded up to a power of two.
    pub initial_steps: u64,
    pub overlap_threshold: T,
    /// Largest accepted energy move per step, as a fraction of the window width.
    pub max_move_fraction: T,
    /// Branch speeds are compared against `lipschitz_factor * nu`.
    pub lipschitz_factor: T,
    pub n_max: usize,
}

impl<T: Scalar> Default for TrackingOptions<T> {
    fn default() -> Self {
        Self {
            initial_steps: 64,
            overlap_threshold: T::lit(0.7),
            max_move_fraction: T::lit(0.125),
            lipschitz_factor: T::lit(1.2),
            n_max: 400,
        }
    }
}

/// The fibers `base.with_t(t)` for `t` in `[0, period]`, solved in `window`.
#[derive(Debug, Clone)]
pub struct FiberFamily<T: Scalar> {
    pub base: FiberSpec<T>,
    pub period: T,
    pub window: (T, T),
}

impl<T: Scalar> FiberFamily<T> {
    fn t_at(&self, tick: u64) -> T {
        self.period * T::lit(tick as f64) / T::lit(TICKS as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BranchPoint<T: Scalar> {
    /// Index into `BranchFamily::t_grid`.
    pub t_index: usize,
    pub energy: T,
    pub spurious: bool,
    /// Position of the eigenpair within the fiber spectrum at this t.
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Branch<T: Scalar> {
    pub id: usize,
    pub points: Vec<BranchPoint<T>>,
    /// Entered the window mid-sweep (from a band), rather than at `t = 0`.
    pub entered: bool,
    /// Left the window before the end of the sweep.
    pub left: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BranchFamily<T: Scalar> {
    pub t_grid: Vec<T>,
    pub branches: Vec<Branch<T>>,
    pub gap: SpectralGap<T>,
    pub window: (T, T),
    pub k: T,
    pub period: T,
    /// Largest `|d lambda| / dt` over accepted steps.
    pub max_rate: T,
    /// Largest `|d lambda|` over accepted steps.
    pub max_move: T,
    pub min_overlap: T,
    pub halvings: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Crossing<T: Scalar> {
    pub t: T,
    pub branch_id: usize,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowResult<T: Scalar> {
    pub flow: i64,
    pub reference_energy: T,
    pub crossings: Vec<Crossing<T>>,
    pub period: T,
}

struct Sample<T: Scalar> {
    tick: u64,
    spectrum: FiberSpectrum<T>,
}

/// Overlap of state `i` of `a` with state `j` of `b`, measured between
/// near-degenerate clusters so that arbitrary bases inside a cluster match.
fn overlap_matrix<T: Scalar>(a: &FiberSpectrum<T>, b: &FiberSpectrum<T>, cluster_tol: T) -> Vec<Vec<f64>> {
    let raw: Vec<Vec<T>> = a
        .vectors
        .iter()
        .map(|u| b.vectors.iter().map(|w| dot(u, w).norm_sqr()).collect())
        .collect();
    let clusters = |e: &[T]| -> Vec<usize> {
        let mut id = Vec::with_capacity(e.len());
        for i in 0..e.len() {
            id.push(if i > 0 && e[i] - e[i - 1] <= cluster_tol { id[i - 1] } else { i });
        }
        id
    };
    let (ca, cb) = (clusters(&a.eigenvalues), clusters(&b.eigenvalues));
    (0..a.len())
        .map(|i| {
            (0..b.len())
                .map(|j| {
                    let into_b: T = (0..b.len()).filter(|&j2| cb[j2] == cb[j]).fold(T::zero(), |s, j2| s + raw[i][j2]);
                    let into_a: T = (0..a.len()).filter(|&i2| ca[i2] == ca[i]).fold(T::zero(), |s, i2| s + raw[i2][j]);
                    into_b.max(into_a).sqrt().min(T::one()).as_f64()
                })
                .collect()
        })
        .collect()
}

enum StepOutcome {
    Accepted { pairs: Vec<(usize, usize)>, rate: f64, moved: f64, min_overlap: f64 },
    Refine,
}

fn try_step<T: Scalar>(
    cur: &FiberSpectrum<T>,
    next: &FiberSpectrum<T>,
    dt: T,
    window: (T, T),
    reach: T,
    opts: &TrackingOptions<T>,
) -> StepOutcome {
    let tol = (window.1 - window.0) * T::lit(1e-9);
    let weights = overlap_matrix(cur, next, tol);
    let assignment = max_weight_assignment(&weights, next.len());
    let threshold = opts.overlap_threshold.as_f64();
    let max_move = ((window.1 - window.0) * opts.max_move_fraction).as_f64();
    let mut pairs = Vec::new();
    let mut matched_next = vec![false; next.len()];
    let mut unmatched_cur = Vec::new();
    let (mut rate, mut moved, mut min_overlap) = (0.0f64, 0.0f64, 1.0f64);
    for (i, a) in assignment.iter().enumerate() {
        match *a {
            Some(j) if weights[i][j] >= threshold => {
                let d = (next.eigenvalues[j] - cur.eigenvalues[i]).abs().as_f64();
                if d > max_move {
                    return StepOutcome::Refine;
                }
                rate = rate.max(d / dt.as_f64());
                moved = moved.max(d);
                min_overlap = min_overlap.min(weights[i][j]);
                matched_next[j] = true;
                pairs.push((i, j));
            }
            _ => unmatched_cur.push(i),
        }
    }
    // An unmatched state must be close enough to a window edge to have
    // crossed it during the step.
    let near_edge = |e: T| (e - window.0).min(window.1 - e) <= reach;
    if unmatched_cur.iter().any(|&i| !near_edge(cur.eigenvalues[i])) {
        return StepOutcome::Refine;
    }
    if (0..next.len()).any(|j| !matched_next[j] && !near_edge(next.eigenvalues[j])) {
        return StepOutcome::Refine;
    }
    StepOutcome::Accepted { pairs, rate, moved, min_overlap }
}

/// Tracks every eigenvalue branch of the family through its window on an
/// adaptive dyadic t-grid, halving steps where the overlap matching is
/// ambiguous, down to `period / 4096`.
pub fn track_branches<T: Scalar>(family: &FiberFamily<T>, gap: SpectralGap<T>, opts: &TrackingOptions<T>) -> Result<BranchFamily<T>> {
    if !(family.period > T::zero()) {
        return Err(Error::InvalidArgument { field: "period", reason: "must be positive".into() });
    }
    let (lo, hi) = family.window;
    if !(lo < hi) {
        return Err(Error::InvalidArgument { field: "window", reason: "empty".into() });
    }
    let wopts = WindowOptions::<T>::default();
    let solve = |tick: u64, seeds: &[Vec<Complex<T>>]| -> Result<Sample<T>> {
        let spec = family.base.clone().with_t(family.t_at(tick));
        Ok(Sample { tick, spectrum: solve_fiber_seeded(&spec, family.window, opts.n_max, &wopts, seeds)? })
    };
    let nu = family.base.potential.lipschitz_nu();
    let slack = (hi - lo) * T::lit(1e-6);
    let base_step = TICKS / opts.initial_steps.clamp(1, TICKS).next_power_of_two();

    let mut cur = solve(0, &[])?;
    let mut bf = BranchFamily {
        t_grid: vec![T::zero()],
        branches: Vec::new(),
        gap,
        window: family.window,
        k: family.base.k,
        period: family.period,
        max_rate: T::zero(),
        max_move: T::zero(),
        min_overlap: T::one(),
        halvings: 0,
    };
    let mut open: Vec<usize> = Vec::new();
    for (s, (&e, &sp)) in cur.spectrum.eigenvalues.iter().zip(&cur.spectrum.spurious).enumerate() {
        open.push(bf.branches.len());
        bf.branches.push(Branch {
            id: bf.branches.len(),
            points: vec![BranchPoint { t_index: 0, energy: e, spurious: sp, state: s }],
            entered: false,
            left: false,
        });
    }
    let mut step = base_step;
    while cur.tick < TICKS {
        let target = (cur.tick + step).min(TICKS);
        let next = solve(target, &cur.spectrum.vectors)?;
        let dt = family.t_at(target - cur.tick);
        let reach = nu * opts.lipschitz_factor * dt + slack;
        match try_step(&cur.spectrum, &next.spectrum, dt, family.window, reach, opts) {
            StepOutcome::Refine => {
                if target - cur.tick <= 1 {
                    return Err(Error::BranchAmbiguity { t: family.t_at(cur.tick).as_f64() });
                }
                step = (target - cur.tick) / 2;
                bf.halvings += 1;
            }
            StepOutcome::Accepted { pairs, rate, moved, min_overlap } => {
                let t_index = bf.t_grid.len();
                bf.t_grid.push(family.t_at(target));
                bf.max_rate = bf.max_rate.max(T::lit(rate));
                bf.max_move = bf.max_move.max(T::lit(moved));
                bf.min_overlap = bf.min_overlap.min(T::lit(min_overlap));
                let mut new_open = vec![usize::MAX; next.spectrum.len()];
                let mut continued = vec![false; open.len()];
                for (i, j) in pairs {
                    let b = open[i];
                    continued[i] = true;
                    new_open[j] = b;
                }
                for (i, &b) in open.iter().enumerate() {
                    if !continued[i] {
                        bf.branches[b].left = true;
                    }
                }
                for (j, slot) in new_open.iter_mut().enumerate() {
                    if *slot == usize::MAX {
                        *slot = bf.branches.len();
                        bf.branches.push(Branch { id: bf.branches.len(), points: Vec::new(), entered: true, left: false });
                    }
                    bf.branches[*slot].points.push(BranchPoint {
                        t_index,
                        energy: next.spectrum.eigenvalues[j],
                        spurious: next.spectrum.spurious[j],
                        state: j,
                    });
                }
                open = new_open;
                cur = next;
                step = (step * 2).min(base_step);
                // Stay on the dyadic grid of the current step.
                while cur.tick % step != 0 {
                    step /= 2;
                }
            }
        }
    }
    Ok(bf)
}

impl<T: Scalar> BranchFamily<T> {
    /// The same family traversed from `t = period` back to `t = 0`.
    pub fn reversed(&self) -> Self {
        let last = self.t_grid.len() - 1;
        let mut out = self.clone();
        out.t_grid = self.t_grid.iter().rev().map(|&t| self.period - t).collect();
        for b in &mut out.branches {
            b.points.reverse();
            for p in &mut b.points {
                p.t_index = last - p.t_index;
            }
            std::mem::swap(&mut b.entered, &mut b.left);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Non-spurious energies present at grid index `t_index`.
    pub fn energies_at(&self, t_index: usize) -> Vec<T> {
        let mut e: Vec<T> = self
            .branches
            .iter()
            .flat_map(|b| b.points.iter())
            .filter(|p| p.t_index == t_index && !p.spurious)
            .map(|p| p.energy)
            .collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "branch_id", "energy", "spurious"])?;
        for b in &self.branches {
            for p in &b.points {
                w.write_record([self.t_grid[p.t_index].to_string(), b.id.to_string(), p.energy.to_string(), p.spurious.to_string()])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Net number of downward crossings of `e` by non-spurious branch segments.
pub fn compute_flow<T: Scalar>(bf: &BranchFamily<T>, e: T) -> Result<FlowResult<T>> {
    let (a, b) = (bf.gap.a.max(bf.window.0), bf.gap.b.min(bf.window.1));
    let margin = bf.max_move * T::lit(2.0);
    if !(e - a > margin && b - e > margin) {
        return Err(Error::EnergyTooCloseToEdge { energy: e.as_f64(), margin: margin.as_f64(), a: a.as_f64(), b: b.as_f64() });
    }
    let mut crossings = Vec::new();
    for br in &bf.branches {
        // Samples exactly at `e` are skipped so the secant through their
        // neighbours decides the crossing.
        let pts: Vec<&BranchPoint<T>> = br.points.iter().filter(|p| p.energy != e).collect();
        for w in pts.windows(2) {
            let (p, q) = (w[0], w[1]);
            if p.spurious || q.spurious || (p.energy > e) == (q.energy > e) {
                continue;
            }
            let (t0, t1) = (bf.t_grid[p.t_index], bf.t_grid[q.t_index]);
            let t = t0 + (t1 - t0) * (e - p.energy) / (q.energy - p.energy);
            let direction = if p.energy > e { Direction::Down } else { Direction::Up };
            crossings.push(Crossing { t, branch_id: br.id, direction });
        }
    }
    crossings.sort_by(|x, y| x.t.partial_cmp(&y.t).unwrap().then(x.branch_id.cmp(&y.branch_id)));
    let flow = crossings.iter().map(|c| if c.direction == Direction::Down { 1 } else { -1 }).sum();
    Ok(FlowResult { flow, reference_energy: e, crossings, period: bf.period })
}

pub fn write_crossings_csv<T: Scalar, W: Write>(flow: &FlowResult<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "branch_id", "direction"])?;
    for c in &flow.crossings {
        let d = match c.direction {
            Direction::Down => "down",
            Direction::Up => "up",
        };
        w.write_record([c.t.to_string(), c.branch_id.to_string(), d.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Discretization and tracking parameters for a flow verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowSetup<T: Scalar> {
    pub points_per_period: usize,
    /// `X / L`.
    pub periods: usize,
    /// Fraction of the discrete essential gap kept clear at each window edge.
    pub edge_margin: T,
    pub tracking: TrackingOptions<T>,
}

impl<T: Scalar> FlowSetup<T> {
    pub fn for_angle(angle: &crate::potential::RationalAngle) -> Self {
        Self {
            points_per_period: default_points_per_period(angle),
            periods: 6,
            edge_margin: T::lit(0.05),
            tracking: TrackingOptions::default(),
        }
    }
}

/// Nodes per period giving `h <= 1/16`, rounded up to a multiple of `L^2` when
/// that costs at most a quarter more nodes, so that `t -> t + 1/L` is a grid shift.
pub fn default_points_per_period(angle: &crate::potential::RationalAngle) -> usize {
    let l2 = angle.length_squared() as usize;
    let base = (16.0 * (l2 as f64).sqrt()).ceil() as usize;
    let aligned = base.div_ceil(l2) * l2;
    if aligned * 4 <= base * 5 {
        aligned
    } else {
        base
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FlowReport<T: Scalar> {
    pub angle: crate::potential::RationalAngle,
    pub boundary: Boundary,
    pub k: T,
    pub period: T,
    /// `N(E)` of the unrotated lattice.
    pub bands_below: usize,
    pub expected_flow: i64,
    pub measured_flow: i64,
    pub pass: bool,
    pub reference_energy: T,
    pub window: (T, T),
    pub crossings: Vec<Crossing<T>>,
    pub max_rate: T,
    pub lipschitz_nu: T,
    pub accepted_steps: usize,
    pub halvings: usize,
    pub min_overlap: T,
}

/// Sweeps one period of the dislocation (`T = L`, expecting `L^2 N`) or of
/// the Dirichlet cut (`T = 1/L`, expecting `N`), where `N = gap.n_below`
/// counts bands of the unrotated lattice below the gap.
pub fn verify_flow_theorem<T: Scalar>(
    potential: &crate::potential::PeriodicPotential<T>,
    angle: &crate::potential::RationalAngle,
    gap: SpectralGap<T>,
    k: T,
    boundary: Boundary,
    setup: &FlowSetup<T>,
) -> Result<(FlowReport<T>, BranchFamily<T>)> {
    let n = gap.n_below;
    let l = angle.length::<T>();
    let (period, expected) = match boundary {
        Boundary::Dislocated => (l, (angle.length_squared() as usize * n) as i64),
        Boundary::Dirichlet => (T::one() / l, n as i64),
        Boundary::DomainWall => {
            return Err(Error::InvalidArgument { field: "boundary", reason: "flow is verified for dislocated or Dirichlet fibers".into() })
        }
    };
    let base = FiberSpec::new(potential.clone(), *angle, boundary, setup.points_per_period, setup.periods)?.with_k(k);
    let (fa, fb) = fiber_essential_gap(&base, gap.midpoint(), 17)?
        .ok_or(Error::NotInGap { energy: gap.midpoint().as_f64() })?;
    // Below the whole spectrum the fiber gap is unbounded; the bulk gap caps it.
    let (fa, fb) = (if fa.is_finite() { fa } else { gap.a }, if fb.is_finite() { fb } else { gap.b });
    let d = (fb - fa) * setup.edge_margin;
    let window = (fa + d, fb - d);
    let family = FiberFamily { base, period, window };
    let bf = track_branches(&family, SpectralGap { a: fa, b: fb, n_below: n }, &setup.tracking)?;
    let e = (window.0 + window.1) / T::lit(2.0);
    let flow = compute_flow(&bf, e)?;
    let report = FlowReport {
        angle: *angle,
        boundary,
        k,
        period,
        bands_below: n,
        expected_flow: expected,
        measured_flow: flow.flow,
        pass: flow.flow == expected,
        reference_energy: e,
        window,
        crossings: flow.crossings,
        max_rate: bf.max_rate,
        lipschitz_nu: potential.lipschitz_nu(),
        accepted_steps: bf.t_grid.len() - 1,
        halvings: bf.halvings,
        min_overlap: bf.min_overlap,
    };
    Ok((report, bf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{make_potential, FourierTerm, PotentialSpec, RationalAngle};

    fn point(t_index: usize, energy: f64) -> BranchPoint<f64> {
        BranchPoint { t_index, energy, spurious: false, state: 0 }
    }

    fn synthetic(branches: Vec<Vec<f64>>) -> BranchFamily<f64> {
        let n = branches[0].len();
        BranchFamily {
            t_grid: (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
            branches: branches
                .into_iter()
                .enumerate()
                .map(|(id, e)| Branch { id, points: e.into_iter().enumerate().map(|(i, x)| point(i, x)).collect(), entered: false, left: false })
                .collect(),
            gap: SpectralGap { a: -1.0, b: 1.0, n_below: 1 },
            window: (-1.0, 1.0),
            k: 0.0,
            period: 1.0,
            max_rate: 0.0,
            max_move: 0.2,
            min_overlap: 1.0,
            halvings: 0,
        }
    }

    #[test]
    fn counts_signed_crossings_and_reverses() {
        let bf = synthetic(vec![vec![0.8, 0.3, -0.2, -0.7], vec![-0.5, -0.1, 0.2, 0.1], vec![0.5, 0.4, 0.45, 0.3]]);
        let f = compute_flow(&bf, 0.0).unwrap();
        assert_eq!(f.flow, 0);
        assert_eq!(f.crossings.len(), 2);
        let bf = synthetic(vec![vec![0.8, 0.3, -0.2, -0.7]]);
        assert_eq!(compute_flow(&bf, 0.0).unwrap().flow, 1);
        assert!((compute_flow(&bf, 0.0).unwrap().crossings[0].t - (1.0 + 0.6) / 3.0).abs() < 1e-12);
        assert_eq!(compute_flow(&bf.reversed(), 0.0).unwrap().flow, -1);
    }

    #[test]
    fn sample_exactly_at_reference_uses_secant() {
        let bf = synthetic(vec![vec![0.5, 0.0, -0.5], vec![0.5, 0.0, 0.5]]);
        let f = compute_flow(&bf, 0.0).unwrap();
        assert_eq!(f.flow, 1);
        assert_eq!(f.crossings.len(), 1);
    }

    #[test]
    fn spurious_segments_are_ignored() {
        let mut bf = synthetic(vec![vec![0.8, 0.3, -0.2, -0.7]]);
        bf.branches[0].points[2].spurious = true;
        assert_eq!(compute_flow(&bf, 0.0).unwrap().flow, 0);
    }

    #[test]
    fn empty_family_and_edge_guard() {
        let mut bf = synthetic(vec![vec![0.0, 0.0]]);
        bf.branches.clear();
        assert_eq!(compute_flow(&bf, 0.0).unwrap().flow, 0);
        assert!(matches!(compute_flow(&bf, 0.7), Err(Error::EnergyTooCloseToEdge { .. })));
    }

    #[test]
    fn free_operator_has_no_branches_in_a_window_below_zero() {
        let v = make_potential::<f64>(&PotentialSpec::Zero).unwrap();
        let base = FiberSpec::new(v, RationalAngle::UNROTATED, Boundary::Dislocated, 16, 5).unwrap();
        let family = FiberFamily { base, period: 1.0, window: (-3.0, -1.0) };
        let gap = SpectralGap { a: -3.0, b: -1.0, n_below: 0 };
        let bf = track_branches(&family, gap, &TrackingOptions { initial_steps: 8, ..Default::default() }).unwrap();
        assert!(bf.is_empty());
        assert_eq!(compute_flow(&bf, -2.0).unwrap().flow, 0);
    }

    #[test]
    fn translation_invariant_family_has_constant_branches() {
        // Depends on x2 only, so the dislocation changes nothing.
        let spec = PotentialSpec::Fourier {
            coefficients: vec![FourierTerm { g1: 0, g2: 1, re: -15.0, im: 0.0 }, FourierTerm { g1: 0, g2: -1, re: -15.0, im: 0.0 }],
        };
        let v = make_potential::<f64>(&spec).unwrap();
        let base = FiberSpec::new(v, RationalAngle::UNROTATED, Boundary::Dislocated, 16, 5).unwrap();
        let family = FiberFamily { base, period: 1.0, window: (-40.0, -4.0) };
        let gap = SpectralGap { a: -40.0, b: -4.0, n_below: 0 };
        let bf = track_branches(&family, gap, &TrackingOptions { initial_steps: 4, ..Default::default() }).unwrap();
        assert!(!bf.is_empty());
        for b in &bf.branches {
            let e0 = b.points[0].energy;
            assert!(b.points.iter().all(|p| (p.energy - e0).abs() < 1e-8));
        }
        assert_eq!(compute_flow(&bf, -22.0).unwrap().flow, 0);
    }

    #[test]
    fn default_grid_aligns_with_inverse_length_shift() {
        assert_eq!(default_points_per_period(&RationalAngle::UNROTATED), 16);
        assert_eq!(default_points_per_period(&RationalAngle::new(1, 1).unwrap()), 24);
        assert_eq!(default_points_per_period(&RationalAngle::new(1, 2).unwrap()), 40);
        assert_eq!(default_points_per_period(&RationalAngle::new(5, 8).unwrap()), 178);
        assert_eq!(default_points_per_period(&RationalAngle::new(8, 13).unwrap()), 245);
    }
}
