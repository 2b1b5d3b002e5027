//! Bloch band structure of the bulk operator `-Laplacian + V_theta` in a
//! plane-wave basis, gap detection and band counting.

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::potential::{PeriodicPotential, RationalAngle};
use crate::scalar::{czero, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

pub const DEFAULT_CUTOFF: usize = 10;
pub const DEFAULT_GAP_TOLERANCE: f64 = 1e-3;

/// Quasi-momentum in the Brillouin zone `[-pi/L, pi/L]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BlochWavevector<T: Scalar> {
    pub k: [T; 2],
    pub l: T,
}

impl<T: Scalar> BlochWavevector<T> {
    pub fn new(k: [T; 2], l: T) -> Result<Self> {
        let edge = T::pi() / l * (T::one() + T::default_epsilon() * T::lit(16.0));
        if k.iter().any(|c| c.abs() > edge) {
            return Err(Error::InvalidArgument { field: "k", reason: format!("({}, {}) outside the Brillouin zone", k[0], k[1]) });
        }
        Ok(Self { k, l })
    }
}

/// Harmonics `G'` of `V_theta` that no pair of basis vectors can couple.
pub fn missing_harmonics<T: Scalar>(v: &PeriodicPotential<T>, angle: &RationalAngle, cutoff: usize) -> Vec<(i64, i64)> {
    let reach = 2 * cutoff as i64;
    v.rotated_coefficients(angle).into_keys().filter(|g| g.0.abs() > reach || g.1.abs() > reach).collect()
}

/// Galerkin matrix of the Bloch fiber `H_k` on `{exp(i(k + 2 pi G/L).x) : |G|_inf <= cutoff}`.
pub fn assemble_bulk_fiber<T: Scalar>(
    v: &PeriodicPotential<T>,
    angle: &RationalAngle,
    k: [T; 2],
    cutoff: usize,
) -> Result<DMatrix<Complex<T>>> {
    if cutoff < 1 {
        return Err(Error::InvalidArgument { field: "cutoff", reason: "must be at least 1".into() });
    }
    let missing = missing_harmonics(v, angle, cutoff);
    if !missing.is_empty() {
        log::warn!("plane-wave cutoff {cutoff} cannot represent {} harmonics of the rotated potential", missing.len());
    }
    Ok(assemble_with(&v.rotated_coefficients(angle), angle.length(), k, cutoff))
}

fn assemble_with<T: Scalar>(coeffs: &BTreeMap<(i64, i64), Complex<T>>, l: T, k: [T; 2], cutoff: usize) -> DMatrix<Complex<T>> {
    let c = cutoff as i64;
    let side = 2 * c + 1;
    let basis: Vec<(i64, i64)> = (-c..=c).flat_map(|a| (-c..=c).map(move |b| (a, b))).collect();
    let n = basis.len();
    let scale = T::two_pi() / l;
    let mut m = DMatrix::from_element(n, n, czero());
    for (i, &(a, b)) in basis.iter().enumerate() {
        let p1 = k[0] + scale * T::lit(a as f64);
        let p2 = k[1] + scale * T::lit(b as f64);
        m[(i, i)] = Complex::new(p1 * p1 + p2 * p2, T::zero());
    }
    for (&(g1, g2), &val) in coeffs {
        for (i, &(a, b)) in basis.iter().enumerate() {
            let (a2, b2) = (a - g1, b - g2);
            if a2.abs() <= c && b2.abs() <= c {
                let j = ((a2 + c) * side + (b2 + c)) as usize;
                m[(i, j)] += val;
            }
        }
    }
    m
}

/// Lowest `n_bands` eigenvalues per k on a regular grid including both zone edges.
#[derive(Debug, Clone, Serialize)]
#[serde(bound = "")]
pub struct BandStructure<T: Scalar> {
    #[serde(skip)]
    potential: PeriodicPotential<T>,
    pub angle: RationalAngle,
    pub cutoff: usize,
    pub grid_size: usize,
    pub k_grid: Vec<[T; 2]>,
    /// `bands[i][n]` is `eps_{n+1}` at `k_grid[i]`.
    pub bands: Vec<Vec<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpectralGap<T: Scalar> {
    pub a: T,
    pub b: T,
    pub n_below: usize,
}

impl<T: Scalar> SpectralGap<T> {
    pub fn width(&self) -> T {
        self.b - self.a
    }

    pub fn midpoint(&self) -> T {
        (self.a + self.b) / T::lit(2.0)
    }

    pub fn contains(&self, e: T) -> bool {
        self.a < e && e < self.b
    }

    /// The gap with `fraction` of its width removed at each end.
    pub fn shrunk(&self, fraction: T) -> Self {
        let d = self.width() * fraction;
        Self { a: self.a + d, b: self.b - d, n_below: self.n_below }
    }
}

pub fn zone_grid<T: Scalar>(l: T, grid_size: usize) -> Vec<T> {
    let edge = T::pi() / l;
    (0..grid_size)
        .map(|i| -edge + T::lit(2.0) * edge * T::from_usize_lossy(i) / T::from_usize_lossy(grid_size - 1))
        .collect()
}

pub fn compute_bands<T: Scalar>(
    v: &PeriodicPotential<T>,
    angle: &RationalAngle,
    grid_size: usize,
    n_bands: usize,
    cutoff: usize,
) -> Result<BandStructure<T>> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument { field: "grid_size", reason: "must be at least 2".into() });
    }
    if n_bands < 1 {
        return Err(Error::InvalidArgument { field: "n_bands", reason: "must be at least 1".into() });
    }
    let dim = (2 * cutoff + 1).pow(2);
    if n_bands > dim {
        return Err(Error::InvalidArgument { field: "n_bands", reason: format!("exceeds the plane-wave basis size {dim}") });
    }
    // Emits the truncation warning once.
    assemble_bulk_fiber(v, angle, [T::zero(), T::zero()], cutoff)?;
    let axis = zone_grid(angle.length::<T>(), grid_size);
    let k_grid: Vec<[T; 2]> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| [a, b])).collect();
    let mut bs = BandStructure { potential: v.clone(), angle: *angle, cutoff, grid_size, k_grid, bands: vec![] };
    let bands: Vec<Result<Vec<T>>> = bs.k_grid.par_iter().map(|&k| bs.lowest(k, n_bands)).collect();
    bs.bands = bands.into_iter().collect::<Result<_>>()?;
    Ok(bs)
}

impl<T: Scalar> BandStructure<T> {
    pub fn n_bands(&self) -> usize {
        self.bands.first().map_or(0, |b| b.len())
    }

    pub fn potential(&self) -> &PeriodicPotential<T> {
        &self.potential
    }

    pub fn length(&self) -> T {
        self.angle.length()
    }

    /// Lowest `n` eigenvalues of the fiber at an arbitrary `k`.
    pub fn lowest(&self, k: [T; 2], n: usize) -> Result<Vec<T>> {
        let m = assemble_with(&self.potential.rotated_coefficients(&self.angle), self.length(), k, self.cutoff);
        let mut vals = hermitian_eigenvalues(m);
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotConverged { context: format!("dense fiber eigensolve at k = ({}, {})", k[0], k[1]) });
        }
        vals.truncate(n);
        Ok(vals)
    }

    fn band_at(&self, k: [T; 2], band: usize) -> T {
        self.lowest(k, band + 1).map(|v| v[band]).unwrap_or(T::nan())
    }

    /// Refines `sign * eps_band` to a local maximum near the grid optimum by
    /// repeated three-point parabolic steps along the free axes.
    fn refine_extremum(&self, start: [T; 2], band: usize, sign: T, axes: &[usize]) -> T {
        let f = |k: [T; 2]| sign * self.band_at(k, band);
        let mut k = start;
        let mut best = f(k);
        let mut step = T::two_pi() / self.length() / T::from_usize_lossy(self.grid_size - 1);
        for _ in 0..10 {
            for &d in axes {
                let mut km = k;
                km[d] -= step;
                let mut kp = k;
                kp[d] += step;
                let (fm, fp) = (f(km), f(kp));
                let curv = fm - best * T::lit(2.0) + fp;
                let mut candidates = vec![(fm, km), (fp, kp)];
                if curv < T::zero() {
                    let delta = (step * (fm - fp) / (T::lit(2.0) * curv)).max(-step).min(step);
                    let mut kv = k;
                    kv[d] -= delta;
                    candidates.push((f(kv), kv));
                }
                for (fv, kv) in candidates {
                    if fv > best {
                        best = fv;
                        k = kv;
                    }
                }
            }
            step /= T::lit(2.0);
        }
        sign * best
    }

    /// Grid optimum of `sign * eps_band` over the given subset of k-indices.
    fn grid_extremum(&self, band: usize, sign: T, rows: impl Iterator<Item = usize>) -> (T, [T; 2]) {
        let mut best = (T::neg_infinity(), [T::zero(), T::zero()]);
        for i in rows {
            let v = sign * self.bands[i][band];
            if v > best.0 {
                best = (v, self.k_grid[i]);
            }
        }
        (sign * best.0, best.1)
    }

    pub fn band_minimum(&self, band: usize) -> T {
        self.grid_extremum(band, -T::one(), 0..self.k_grid.len()).0
    }
}

/// Maximal gaps `(a, b)` meeting `window`, with `a = max eps_N`, `b = min eps_{N+1}`.
pub fn find_gaps<T: Scalar>(bs: &BandStructure<T>, window: (T, T), tolerance: T) -> Result<Vec<SpectralGap<T>>> {
    let nb = bs.n_bands();
    let all = 0..bs.k_grid.len();
    let top = bs.band_minimum(nb - 1);
    if window.1 > top {
        return Err(Error::InsufficientBands { top: top.as_f64(), requested: window.1.as_f64() });
    }
    let mut gaps = Vec::new();
    for n in 0..nb - 1 {
        let (a0, ka) = bs.grid_extremum(n, T::one(), all.clone());
        let (b0, kb) = bs.grid_extremum(n + 1, -T::one(), all.clone());
        if b0 - a0 <= tolerance || b0 <= window.0 || a0 >= window.1 {
            continue;
        }
        let a = bs.refine_extremum(ka, n, T::one(), &[0, 1]).max(a0);
        let b = bs.refine_extremum(kb, n + 1, -T::one(), &[0, 1]).min(b0);
        if b - a > tolerance && b > window.0 && a < window.1 {
            gaps.push(SpectralGap { a, b, n_below: n + 1 });
        }
    }
    Ok(gaps)
}

/// Number of bands below `e`, which must lie in a gap or below the spectrum.
pub fn bands_below<T: Scalar>(bs: &BandStructure<T>, e: T) -> Result<usize> {
    if e < bs.band_minimum(0) {
        return Ok(0);
    }
    let gaps = find_gaps(bs, (e - T::lit(1e-9), e + T::lit(1e-9)), T::lit(DEFAULT_GAP_TOLERANCE))?;
    gaps.iter().find(|g| g.contains(e)).map(|g| g.n_below).ok_or(Error::NotInGap { energy: e.as_f64() })
}

/// Union over `k1` of the fiber bands at transverse momentum `k2 = k`, merged.
pub fn essential_band_edges<T: Scalar>(bs: &BandStructure<T>, k: T) -> Vec<(T, T)> {
    let axis = zone_grid(bs.length(), bs.grid_size);
    let nb = bs.n_bands();
    let rows: Vec<Vec<T>> = axis.par_iter().map(|&k1| bs.lowest([k1, k], nb).unwrap_or_default()).collect();
    let mut intervals = Vec::with_capacity(nb);
    for n in 0..nb {
        let mut lo = (T::infinity(), T::zero());
        let mut hi = (T::neg_infinity(), T::zero());
        for (r, &k1) in rows.iter().zip(&axis) {
            if r[n] < lo.0 {
                lo = (r[n], k1);
            }
            if r[n] > hi.0 {
                hi = (r[n], k1);
            }
        }
        let a = bs.refine_extremum([lo.1, k], n, -T::one(), &[0]).min(lo.0);
        let b = bs.refine_extremum([hi.1, k], n, T::one(), &[0]).max(hi.0);
        intervals.push((a, b));
    }
    intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut merged: Vec<(T, T)> = Vec::new();
    for (a, b) in intervals {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    merged
}

pub fn write_bands_csv<T: Scalar, W: Write>(bs: &BandStructure<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k1", "k2", "band_index", "energy"])?;
    for (k, row) in bs.k_grid.iter().zip(&bs.bands) {
        for (n, e) in row.iter().enumerate() {
            w.write_record([k[0].to_string(), k[1].to_string(), (n + 1).to_string(), e.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
