//! Gap filling along continued-fraction approximants: Dirichlet fibers are
//! solved on a `(k, t)` grid for each convergent angle and the in-gap edge
//! spectrum is aggregated.

use crate::bulk::{zone_grid, SpectralGap};
use crate::convergents::{continued_fraction_convergents, Slope};
use crate::error::{Error, Result};
use crate::fiber::{assemble_fiber, solve_fiber, Boundary, FiberSpec};
use crate::potential::{PeriodicPotential, RationalAngle};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FillOptions<T: Scalar> {
    pub k_samples: usize,
    /// Samples of `t` in `[0, 1/L)`.
    pub t_samples: usize,
    /// Grid nodes per unit length, raised to at least 16 per period `L`.
    pub points_per_unit_length: T,
    /// `X / L`.
    pub periods: usize,
    /// Fraction of the gap width left out at each edge.
    pub gap_margin: T,
    /// Largest fiber matrix, in stored entries, the sweep will assemble.
    pub nnz_budget: usize,
    pub n_max: usize,
}

impl<T: Scalar> Default for FillOptions<T> {
    fn default() -> Self {
        Self {
            k_samples: 8,
            t_samples: 16,
            points_per_unit_length: T::lit(8.0),
            periods: 5,
            gap_margin: T::lit(0.1),
            nnz_budget: 200_000,
            n_max: 4000,
        }
    }
}

impl<T: Scalar> FillOptions<T> {
    pub fn points_per_period(&self, angle: &RationalAngle) -> usize {
        let l = angle.length::<f64>();
        ((self.points_per_unit_length.as_f64() * l).ceil() as usize).max(16)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FillSample<T: Scalar> {
    pub t: T,
    pub k: T,
    /// Non-spurious eigenvalues inside the analysis interval.
    pub energies: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FillRecord<T: Scalar> {
    pub angle: RationalAngle,
    pub length: T,
    pub points_per_period: usize,
    pub dim: usize,
    pub nnz: usize,
    /// Sorted union over the `(k, t)` grid.
    pub energies: Vec<T>,
    pub max_free_subinterval_length: T,
    /// Per `k`, the count maximized over `t`; then the minimum over `k`.
    pub eigenvalue_count: usize,
    /// Smallest count over all `(k, t)` samples.
    pub min_count: usize,
    pub lower_bound: usize,
    pub samples: Vec<FillSample<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FillReport<T: Scalar> {
    pub alpha: Slope,
    pub gap: SpectralGap<T>,
    /// The gap without its edge margins, where edge states are counted.
    pub interval: (T, T),
    pub lipschitz_nu: T,
    pub records: Vec<FillRecord<T>>,
    /// Why the sweep stopped before `n_convergents`, if it did.
    pub truncation: Option<String>,
}

/// Longest subinterval of `(a, b)` containing none of `energies`.
pub fn max_free_subinterval<T: Scalar>(interval: (T, T), energies: &[T]) -> T {
    let mut pts: Vec<T> = energies.iter().copied().filter(|&e| interval.0 < e && e < interval.1).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut prev = interval.0;
    let mut best = T::zero();
    for e in pts.into_iter().chain(std::iter::once(interval.1)) {
        best = best.max(e - prev);
        prev = e;
    }
    best
}

/// `floor(width L / nu) N`, or 0 when `nu` vanishes.
pub fn counting_bound<T: Scalar>(width: T, length: T, nu: T, n_below: usize) -> usize {
    if !(nu > T::zero()) {
        return 0;
    }
    (width * length / nu).floor().as_f64().max(0.0) as usize * n_below
}

/// Dirichlet edge spectrum of one angle on the `(k, t)` grid.
pub fn fill_record<T: Scalar>(
    potential: &PeriodicPotential<T>,
    angle: &RationalAngle,
    gap: &SpectralGap<T>,
    opts: &FillOptions<T>,
) -> Result<FillRecord<T>> {
    if opts.k_samples == 0 || opts.t_samples == 0 {
        return Err(Error::InvalidArgument { field: "k_samples", reason: "k_samples and t_samples must be positive".into() });
    }
    let interval = gap.shrunk(opts.gap_margin);
    let interval = (interval.a, interval.b);
    let ny = opts.points_per_period(angle);
    let base = FiberSpec::new(potential.clone(), *angle, Boundary::Dirichlet, ny, opts.periods)?;
    let l = base.length();
    let ks = if opts.k_samples == 1 { vec![T::zero()] } else { zone_grid(l, opts.k_samples) };
    let ts: Vec<T> = (0..opts.t_samples).map(|i| T::from_usize_lossy(i) / (T::from_usize_lossy(opts.t_samples) * l)).collect();
    let grid: Vec<(usize, T, T)> = ks.iter().enumerate().flat_map(|(ki, &k)| ts.iter().map(move |&t| (ki, k, t))).collect();
    let solved: Vec<Result<(usize, FillSample<T>)>> = grid
        .par_iter()
        .map(|&(ki, k, t)| {
            let spec = base.clone().with_k(k).with_t(t);
            let s = solve_fiber(&spec, interval, opts.n_max)?;
            if s.truncated {
                log::warn!("fiber at {angle}, k = {k}, t = {t} has more than {} states in the gap; count truncated", opts.n_max);
            }
            let energies: Vec<T> = s.non_spurious().filter(|&e| interval.0 < e && e < interval.1).collect();
            Ok((ki, FillSample { t, k, energies }))
        })
        .collect();
    let solved: Vec<(usize, FillSample<T>)> = solved.into_iter().collect::<Result<_>>()?;

    let mut per_k = vec![0usize; ks.len()];
    let mut min_count = usize::MAX;
    let mut energies = Vec::new();
    for (ki, s) in &solved {
        per_k[*ki] = per_k[*ki].max(s.energies.len());
        min_count = min_count.min(s.energies.len());
        energies.extend_from_slice(&s.energies);
    }
    energies.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let a = assemble_fiber(&base)?;
    Ok(FillRecord {
        angle: *angle,
        length: l,
        points_per_period: ny,
        dim: a.dim(),
        nnz: a.nnz(),
        max_free_subinterval_length: max_free_subinterval(interval, &energies),
        energies,
        eigenvalue_count: per_k.iter().copied().min().unwrap_or(0),
        min_count,
        lower_bound: counting_bound(interval.1 - interval.0, l, potential.lipschitz_nu(), gap.n_below),
        samples: solved.into_iter().map(|(_, s)| s).collect(),
    })
}

/// Stored entries of the Dirichlet fiber for `angle`, without assembling it.
pub fn fiber_nnz<T: Scalar>(angle: &RationalAngle, opts: &FillOptions<T>) -> usize {
    let ny = opts.points_per_period(angle);
    let rows = (opts.periods * ny - 1) * ny;
    5 * rows
}

/// Edge spectrum of the first `n_convergents` approximants of `alpha`, where
/// `gap.n_below` is `N(E)` of the unrotated lattice.
pub fn approximant_sweep<T: Scalar>(
    potential: &PeriodicPotential<T>,
    alpha: &Slope,
    n_convergents: usize,
    gap: SpectralGap<T>,
    opts: &FillOptions<T>,
) -> Result<FillReport<T>> {
    if !(gap.a < gap.b) {
        return Err(Error::InvalidArgument { field: "gap", reason: "empty gap".into() });
    }
    let seq = continued_fraction_convergents(alpha, n_convergents)?;
    let shrunk = gap.shrunk(opts.gap_margin);
    let mut report = FillReport {
        alpha: *alpha,
        gap,
        interval: (shrunk.a, shrunk.b),
        lipschitz_nu: potential.lipschitz_nu(),
        records: Vec::new(),
        truncation: None,
    };
    if seq.convergents.len() < n_convergents && !seq.terminated {
        report.truncation = Some(format!("slope precision certifies only {} convergents", seq.convergents.len()));
    }
    let mut seen = Vec::new();
    for angle in &seq.convergents {
        // Degenerate expansions can repeat a denominator, e.g. 1/1 then 2/1.
        if seen.contains(angle) {
            continue;
        }
        seen.push(*angle);
        let nnz = fiber_nnz(angle, opts);
        if nnz > opts.nnz_budget {
            report.truncation = Some(format!("stopped at {angle}: fiber needs about {nnz} nonzeros, budget is {}", opts.nnz_budget));
            break;
        }
        report.records.push(fill_record(potential, angle, &gap, opts)?);
    }
    Ok(report)
}

/// Counting lemma for one record.
pub fn count_check<T: Scalar>(record: &FillRecord<T>) -> bool {
    record.eigenvalue_count >= record.lower_bound
}

impl<T: Scalar> FillReport<T> {
    /// Rows `(L, t, k, energy)`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["L", "t", "k", "energy"])?;
        for r in &self.records {
            for s in &r.samples {
                for e in &s.energies {
                    w.write_record([r.length.to_string(), s.t.to_string(), s.k.to_string(), e.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}
