//! Finite-difference fiber operators on the tube `[-X, X] x [0, L)` and the
//! semi-tube `[0, X] x [0, L)` at transverse Bloch number `k`, their
//! in-window spectra and the essential spectrum of each fiber.

use crate::bulk::zone_grid;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, lowest_eigenvalues, solve_window, solve_window_seeded, CsrMatrix, TripletBuilder, WindowOptions};
use crate::potential::{evaluate_rotated, PeriodicPotential, RationalAngle};
use crate::scalar::{cis, Scalar};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// `-Laplacian + W_t` on the full tube.
    Dislocated,
    /// `-Laplacian + V_theta(x - t e1)` on the semi-tube, Dirichlet at `x1 = 0`.
    Dirichlet,
    /// `-Laplacian + chi(x1) V_theta(x - t e1)` on the full tube.
    DomainWall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSpec<T: Scalar> {
    pub potential: PeriodicPotential<T>,
    pub angle: RationalAngle,
    pub t: T,
    pub k: T,
    pub boundary: Boundary,
    /// Truncation half-length `X`.
    pub x_extent: T,
    pub h: T,
    pub wall_switch_width: T,
}

/// Rounds `x` to an integer when it is one up to relative round-off.
fn integral<T: Scalar>(x: T) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= T::lit(1e-9) * x.abs().max(T::one()) && r >= T::zero()).then(|| r.as_f64() as usize)
}

impl<T: Scalar> FiberSpec<T> {
    /// Grid with `points_per_period` nodes per period `L` and `X = periods * L`.
    pub fn new(
        potential: PeriodicPotential<T>,
        angle: RationalAngle,
        boundary: Boundary,
        points_per_period: usize,
        periods: usize,
    ) -> Result<Self> {
        let l = angle.length::<T>();
        let spec = Self {
            potential,
            angle,
            t: T::zero(),
            k: T::zero(),
            boundary,
            x_extent: l * T::from_usize_lossy(periods),
            h: l / T::from_usize_lossy(points_per_period.max(1)),
            wall_switch_width: l,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_t(mut self, t: T) -> Self {
        self.t = t;
        self
    }

    pub fn with_k(mut self, k: T) -> Self {
        self.k = k;
        self
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn length(&self) -> T {
        self.angle.length()
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.length();
        let slack = T::one() + T::lit(1e-9);
        if !(self.h > T::zero()) || self.h > l / T::lit(16.0) * slack {
            return Err(Error::Grid(format!("h = {} must satisfy 0 < h <= L/16 = {}", self.h, l / T::lit(16.0))));
        }
        if self.x_extent * slack < l * T::lit(5.0) {
            return Err(Error::Grid(format!("X = {} must be at least 5L = {}", self.x_extent, l * T::lit(5.0))));
        }
        if integral(l / self.h).is_none() {
            return Err(Error::Grid(format!("L/h = {} is not an integer", l / self.h)));
        }
        if integral(self.x_extent / self.h).is_none() {
            return Err(Error::Grid(format!("X/h = {} is not an integer", self.x_extent / self.h)));
        }
        if self.k.abs() > T::pi() / l * slack {
            return Err(Error::InvalidArgument { field: "k", reason: format!("{} outside [-pi/L, pi/L]", self.k) });
        }
        if self.boundary == Boundary::DomainWall && !(self.wall_switch_width >= T::zero()) {
            return Err(Error::InvalidArgument { field: "wall_switch_width", reason: "must be nonnegative".into() });
        }
        Ok(())
    }

    /// Nodes per period in `x2`.
    pub fn ny(&self) -> usize {
        integral(self.length() / self.h).unwrap_or(0)
    }

    /// `X / h`.
    pub fn half_cells(&self) -> usize {
        integral(self.x_extent / self.h).unwrap_or(0)
    }

    /// Interior `x1` nodes; the Dirichlet walls are eliminated.
    pub fn x1_nodes(&self) -> Vec<T> {
        let m = self.half_cells() as i64;
        let range = match self.boundary {
            Boundary::Dirichlet => 1..m,
            _ => (1 - m)..m,
        };
        range.map(|i| T::lit(i as f64) * self.h).collect()
    }

    pub fn dim(&self) -> usize {
        self.x1_nodes().len() * self.ny()
    }

    /// Quintic smoothstep from 0 at `x1 = 0` to 1 at `x1 = wall_switch_width`.
    pub fn switch(&self, x1: T) -> T {
        if x1 <= T::zero() {
            return T::zero();
        }
        if x1 >= self.wall_switch_width {
            return T::one();
        }
        let s = x1 / self.wall_switch_width;
        s * s * s * (T::lit(10.0) + s * (T::lit(-15.0) + s * T::lit(6.0)))
    }

    /// Potential sampled at a grid node.
    pub fn potential_at(&self, x1: T, x2: T) -> T {
        let v = |s: T| evaluate_rotated(&self.potential, &self.angle, [s, x2]);
        match self.boundary {
            Boundary::Dislocated | Boundary::Dirichlet => {
                if x1 <= T::zero() {
                    v(x1)
                } else {
                    v(x1 - self.t)
                }
            }
            Boundary::DomainWall => {
                let chi = self.switch(x1);
                if chi == T::zero() {
                    T::zero()
                } else {
                    chi * v(x1 - self.t)
                }
            }
        }
    }

    /// Periodic media filling the two ends of the tube.
    fn end_regions(&self) -> Vec<EndRegion<T>> {
        match self.boundary {
            Boundary::Dislocated => vec![EndRegion::Periodic(T::zero()), EndRegion::Periodic(self.t)],
            Boundary::Dirichlet => vec![EndRegion::Periodic(self.t)],
            Boundary::DomainWall => vec![EndRegion::Free, EndRegion::Periodic(self.t)],
        }
    }
}

/// Five-point Laplacian plus potential, `x1`-major ordering, Bloch phase
/// `e^{ikL}` on the `x2` wrap-around.
pub fn assemble_fiber<T: Scalar>(spec: &FiberSpec<T>) -> Result<CsrMatrix<T>> {
    spec.validate()?;
    let ny = spec.ny();
    let xs = spec.x1_nodes();
    let nx = xs.len();
    let inv_h2 = T::one() / (spec.h * spec.h);
    let off = Complex::new(-inv_h2, T::zero());
    let wrap = cis(spec.k * spec.length()) * (-inv_h2);
    let mut b = TripletBuilder::new(nx * ny);
    for (i, &x1) in xs.iter().enumerate() {
        for j in 0..ny {
            let r = i * ny + j;
            let x2 = T::from_usize_lossy(j) * spec.h;
            b.add(r, r, Complex::new(T::lit(4.0) * inv_h2 + spec.potential_at(x1, x2), T::zero()));
            if i + 1 < nx {
                b.add(r, r + ny, off);
                b.add(r + ny, r, off);
            }
            if j + 1 < ny {
                b.add(r, r + 1, off);
                b.add(r + 1, r, off);
            } else {
                // f(x1, L) = e^{ikL} f(x1, 0)
                b.add(r, i * ny, wrap);
                b.add(i * ny, r, wrap.conj());
            }
        }
    }
    Ok(b.build())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Localization<T: Scalar> {
    /// Mass within `2L` of the cut.
    pub near_cut: T,
    pub interior: T,
    /// Mass in the outer 20% of each half-range.
    pub far_boundary: T,
}

#[derive(Debug, Clone)]
pub struct FiberSpectrum<T: Scalar> {
    pub spec: FiberSpec<T>,
    pub eigenvalues: Vec<T>,
    pub localization: Vec<Localization<T>>,
    pub spurious: Vec<bool>,
    pub in_gap: Vec<bool>,
    pub vectors: Vec<Vec<Complex<T>>>,
    /// More eigenvalues were in the window than requested.
    pub truncated: bool,
}

pub const SPURIOUS_WEIGHT: f64 = 0.5;

pub fn localization<T: Scalar>(spec: &FiberSpec<T>, v: &[Complex<T>]) -> Localization<T> {
    let ny = spec.ny();
    let near = spec.length() * T::lit(2.0);
    let far = spec.x_extent * T::lit(0.8);
    let (mut total, mut n, mut f) = (T::zero(), T::zero(), T::zero());
    for (i, &x1) in spec.x1_nodes().iter().enumerate() {
        let m: T = v[i * ny..(i + 1) * ny].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
        total += m;
        if x1.abs() <= near {
            n += m;
        } else if x1.abs() >= far {
            f += m;
        }
    }
    let (n, f) = (n / total, f / total);
    Localization { near_cut: n, far_boundary: f, interior: T::one() - n - f }
}

/// All eigenpairs of the fiber in `window` (at most `n_max`) with localization data.
pub fn solve_fiber<T: Scalar>(spec: &FiberSpec<T>, window: (T, T), n_max: usize) -> Result<FiberSpectrum<T>> {
    solve_fiber_with(spec, window, n_max, &WindowOptions::default())
}

pub fn solve_fiber_with<T: Scalar>(
    spec: &FiberSpec<T>,
    window: (T, T),
    n_max: usize,
    opts: &WindowOptions<T>,
) -> Result<FiberSpectrum<T>> {
    solve_fiber_seeded(spec, window, n_max, opts, &[])
}

/// Solve starting from approximate eigenvectors, e.g. those of a nearby `t`.
pub fn solve_fiber_seeded<T: Scalar>(
    spec: &FiberSpec<T>,
    window: (T, T),
    n_max: usize,
    opts: &WindowOptions<T>,
    seeds: &[Vec<Complex<T>>],
) -> Result<FiberSpectrum<T>> {
    let a = assemble_fiber(spec)?;
    let sigma = (window.0 + window.1) / T::lit(2.0);
    let w = solve_window_seeded(&a, sigma, window.0, window.1, n_max, opts, seeds).map_err(|e| match e {
        Error::NotConverged { context } => Error::NotConverged {
            context: format!("{context}; fiber {:?} t = {} k = {} dim = {}", spec.boundary, spec.t, spec.k, a.dim()),
        },
        other => other,
    })?;
    let localization: Vec<_> = w.vectors.iter().map(|v| localization(spec, v)).collect();
    let spurious = localization.iter().map(|l| l.far_boundary > T::lit(SPURIOUS_WEIGHT)).collect();
    Ok(FiberSpectrum {
        spec: spec.clone(),
        in_gap: vec![false; w.values.len()],
        eigenvalues: w.values,
        localization,
        spurious,
        vectors: w.vectors,
        truncated: w.truncated,
    })
}

impl<T: Scalar> FiberSpectrum<T> {
    /// Flags non-spurious eigenvalues strictly inside `gap`.
    pub fn classify(&mut self, gap: (T, T)) {
        self.in_gap = self.eigenvalues.iter().zip(&self.spurious).map(|(&e, &s)| !s && gap.0 < e && e < gap.1).collect();
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn non_spurious(&self) -> impl Iterator<Item = T> + '_ {
        self.eigenvalues.iter().zip(&self.spurious).filter(|(_, &s)| !s).map(|(&e, _)| e)
    }

    pub fn in_gap_values(&self) -> Vec<T> {
        self.eigenvalues.iter().zip(&self.in_gap).filter(|(_, &g)| g).map(|(&e, _)| e).collect()
    }

    pub fn write_csv<W: Write>(&self, out: W, header: bool) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
        if header {
            w.write_record(["t", "k", "energy", "weight_near_cut", "weight_far_boundary", "spurious_flag", "in_gap_flag"])?;
        }
        for i in 0..self.len() {
            w.write_record([
                self.spec.t.to_string(),
                self.spec.k.to_string(),
                self.eigenvalues[i].to_string(),
                self.localization[i].near_cut.to_string(),
                self.localization[i].far_boundary.to_string(),
                self.spurious[i].to_string(),
                self.in_gap[i].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `m(x1) = max_{x2} |psi(x1, x2)|` on the interior nodes.
pub fn transverse_max_profile<T: Scalar>(spec: &FiberSpec<T>, v: &[Complex<T>]) -> Vec<(T, T)> {
    let ny = spec.ny();
    spec.x1_nodes()
        .iter()
        .enumerate()
        .map(|(i, &x1)| (x1, v[i * ny..(i + 1) * ny].iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EndRegion<T> {
    /// Periodic medium sampled at `V_theta(x1 - offset, x2)`.
    Periodic(T),
    Free,
}

/// Position of `x1`-index `i` in the folded ordering `0, N-1, 1, N-2, ...`,
/// which keeps periodic neighbours within two slots of each other.
fn folded(i: usize, n: usize) -> usize {
    if 2 * i < n {
        2 * i
    } else {
        2 * (n - 1 - i) + 1
    }
}

/// Finite-difference operator on one `L x L` cell with Bloch phases
/// `e^{i k1 L}`, `e^{i k2 L}`, sampling `V_theta(x1 - offset, x2)`.
pub fn fd_cell_operator<T: Scalar>(
    potential: &PeriodicPotential<T>,
    angle: &RationalAngle,
    ny: usize,
    k: [T; 2],
    offset: T,
) -> CsrMatrix<T> {
    let l = angle.length::<T>();
    let h = l / T::from_usize_lossy(ny);
    let inv_h2 = T::one() / (h * h);
    let n = ny;
    let idx = |i: usize, j: usize| folded(i, n) * ny + j;
    let ph1 = cis(k[0] * l) * (-inv_h2);
    let ph2 = cis(k[1] * l) * (-inv_h2);
    let off = Complex::new(-inv_h2, T::zero());
    let mut b = TripletBuilder::new(n * ny);
    for i in 0..n {
        for j in 0..ny {
            let r = idx(i, j);
            let x = [T::from_usize_lossy(i) * h - offset, T::from_usize_lossy(j) * h];
            b.add(r, r, Complex::new(T::lit(4.0) * inv_h2 + evaluate_rotated(potential, angle, x), T::zero()));
            let (c1, v1) = if i + 1 < n { (idx(i + 1, j), off) } else { (idx(0, j), ph1) };
            b.add(r, c1, v1);
            b.add(c1, r, v1.conj());
            let (c2, v2) = if j + 1 < ny { (idx(i, j + 1), off) } else { (idx(i, 0), ph2) };
            b.add(r, c2, v2);
            b.add(c2, r, v2.conj());
        }
    }
    b.build()
}

/// Infimum of the discrete bulk spectrum for the sampling `offset`: the
/// ground state of the periodic cell at `k = 0`.
pub fn discrete_bulk_infimum<T: Scalar>(potential: &PeriodicPotential<T>, angle: &RationalAngle, ny: usize, offset: T) -> Result<T> {
    let a = fd_cell_operator(potential, angle, ny, [T::zero(), T::zero()], offset);
    let lower = -potential.sup_norm() - T::one();
    lowest_eigenvalues(&a, lower, 1, &WindowOptions::default())?
        .first()
        .copied()
        .ok_or_else(|| Error::NotConverged { context: "cell ground state".into() })
}

/// Nearest eigenvalues of `a` strictly below and above `e` (`None` if absent).
fn bracket<T: Scalar>(a: &CsrMatrix<T>, e: T) -> Result<(Option<T>, Option<T>)> {
    if a.dim() <= WindowOptions::<T>::default().dense_threshold {
        let ev = hermitian_eigenvalues(a.to_dense());
        return Ok((ev.iter().copied().filter(|&x| x < e).last(), ev.iter().copied().find(|&x| x > e)));
    }
    let scale = a.norm_inf();
    let mut width = T::one();
    loop {
        let w = solve_window(a, e, e - width, e + width, a.dim(), &WindowOptions::default())?;
        let below = w.values.iter().copied().filter(|&x| x < e).fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.max(x))));
        let above = w.values.iter().copied().filter(|&x| x > e).fold(None, |m: Option<T>, x| Some(m.map_or(x, |m| m.min(x))));
        let exhausted = width > scale * T::lit(2.0);
        if (below.is_some() && above.is_some()) || exhausted {
            return Ok((below, above));
        }
        width *= T::lit(4.0);
    }
}

/// Three-point parabolic maximization of `f` starting at the sample `(x0, f0)`.
fn refine_max<T: Scalar>(f: impl Fn(T) -> T, x0: T, f0: T, step: T) -> T {
    let (mut x, mut best, mut step) = (x0, f0, step);
    for _ in 0..12 {
        let (fm, fp) = (f(x - step), f(x + step));
        let curv = fm - best * T::lit(2.0) + fp;
        let mut cands = vec![(fm, x - step), (fp, x + step)];
        if curv < T::zero() {
            let d = (step * (fm - fp) / (T::lit(2.0) * curv)).max(-step).min(step);
            cands.push((f(x - d), x - d));
        }
        for (fv, xv) in cands {
            if fv > best {
                best = fv;
                x = xv;
            }
        }
        step /= T::lit(2.0);
    }
    best
}

/// Gap of the essential spectrum of the fiber around `e_ref`, computed from
/// the periodic media at the two ends of the tube; `None` when `e_ref` lies
/// in the essential spectrum.
pub fn fiber_essential_gap<T: Scalar>(spec: &FiberSpec<T>, e_ref: T, k1_samples: usize) -> Result<Option<(T, T)>> {
    spec.validate()?;
    let ny = spec.ny();
    let l = spec.length();
    let (mut a, mut b) = (T::neg_infinity(), T::infinity());
    let mut regions = spec.end_regions();
    regions.dedup();
    for region in regions {
        let (lo, hi) = match region {
            EndRegion::Free => {
                // -Laplacian on the grid: 4/h^2 sin^2(q h/2) in each direction.
                let h = spec.h;
                let s = |q: T| {
                    let v = (q * h / T::lit(2.0)).sin();
                    T::lit(4.0) / (h * h) * v * v
                };
                let bottom = (0..ny)
                    .map(|m| s(spec.k + T::two_pi() * T::from_usize_lossy(m) / l))
                    .fold(T::infinity(), |x, y| x.min(y));
                if e_ref >= bottom {
                    return Ok(None);
                }
                (T::neg_infinity(), bottom)
            }
            EndRegion::Periodic(offset) => {
                let edges = |k1: T| -> Result<(Option<T>, Option<T>)> {
                    bracket(&fd_cell_operator(&spec.potential, &spec.angle, ny, [k1, spec.k], offset), e_ref)
                };
                let grid = zone_grid(l, k1_samples.max(3));
                let mut samples = Vec::with_capacity(grid.len());
                for &k1 in &grid {
                    samples.push((k1, edges(k1)?));
                }
                let step = T::two_pi() / l / T::from_usize_lossy(grid.len() - 1);
                let below: Vec<(T, T)> = samples.iter().filter_map(|(k1, (lo, _))| lo.map(|v| (*k1, v))).collect();
                let above: Vec<(T, T)> = samples.iter().filter_map(|(k1, (_, hi))| hi.map(|v| (*k1, v))).collect();
                let lo = match below.iter().copied().max_by(|x, y| x.1.partial_cmp(&y.1).unwrap()) {
                    Some((k1, v)) => refine_max(|q| edges(q).ok().and_then(|e| e.0).unwrap_or(T::neg_infinity()), k1, v, step),
                    None => T::neg_infinity(),
                };
                let hi = match above.iter().copied().min_by(|x, y| x.1.partial_cmp(&y.1).unwrap()) {
                    Some((k1, v)) => -refine_max(|q| -edges(q).ok().and_then(|e| e.1).unwrap_or(T::infinity()), k1, -v, step),
                    None => T::infinity(),
                };
                (lo, hi)
            }
        };
        a = a.max(lo);
        b = b.min(hi);
    }
    Ok((a < e_ref && e_ref < b).then_some((a, b)))
}
