//! Windowed Hermitian eigensolver: block Krylov iteration on the
//! shift-inverted operator `(A - sigma)^-1` with full reorthogonalization.
//!
//! Eigenvalues of `A` inside `[lo, hi]` map to the largest-magnitude
//! eigenvalues of the inverted operator, so they are the first to converge.
//! Block size bounds the multiplicity that is guaranteed to be resolved.

use super::{axpy, count_below, dot, hermitian_eigh, norm, BandLu, CsrMatrix};
use crate::error::{Error, Result};
use crate::scalar::{czero, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct WindowOptions<T: Scalar> {
    pub block_size: usize,
    /// Converged when `||A y - lambda y|| <= tol * ||A||_inf`.
    pub tol: T,
    pub max_basis: usize,
    pub seed: u64,
    /// Matrices at or below this dimension are diagonalized densely.
    pub dense_threshold: usize,
}

impl<T: Scalar> Default for WindowOptions<T> {
    fn default() -> Self {
        Self { block_size: 4, tol: T::solver_tolerance(), max_basis: 900, seed: 0x5eed_f10b, dense_threshold: 256 }
    }
}

#[derive(Debug, Clone)]
pub struct EigenWindow<T: Scalar> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<Complex<T>>>,
    pub residuals: Vec<T>,
    /// More than `n_max` eigenvalues were found; only the ones closest to the
    /// shift are kept.
    pub truncated: bool,
    pub basis_size: usize,
}

fn random_vector<T: Scalar>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|_| Complex::new(T::lit(rng.gen_range(-1.0..1.0)), T::lit(rng.gen_range(-1.0..1.0))))
        .collect()
}

/// Orthogonalizes `v` against `basis` twice; returns the norm that remains.
fn orthogonalize<T: Scalar>(basis: &[Vec<Complex<T>>], v: &mut [Complex<T>]) -> T {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
    norm(v)
}

fn dense_window<T: Scalar>(a: &CsrMatrix<T>, lo: T, hi: T) -> EigenWindow<T> {
    let (vals, vecs) = hermitian_eigh(a.to_dense());
    let mut out = EigenWindow { values: vec![], vectors: vec![], residuals: vec![], truncated: false, basis_size: a.dim() };
    for (j, &v) in vals.iter().enumerate() {
        if v >= lo && v <= hi {
            out.values.push(v);
            out.vectors.push(vecs.column(j).iter().copied().collect());
            out.residuals.push(T::zero());
        }
    }
    out
}

/// All eigenpairs of the Hermitian matrix `a` with eigenvalue in `[lo, hi]`
/// (at most `n_max`, the ones closest to `sigma` when there are more).
pub fn solve_window<T: Scalar>(
    a: &CsrMatrix<T>,
    sigma: T,
    lo: T,
    hi: T,
    n_max: usize,
    opts: &WindowOptions<T>,
) -> Result<EigenWindow<T>> {
    solve_window_seeded(a, sigma, lo, hi, n_max, opts, &[])
}

/// As [`solve_window`], starting the Krylov space from `seeds` (typically
/// eigenvectors of a nearby matrix) in addition to random vectors.
///
/// The number of eigenvalues in the window is known beforehand from the
/// inertia of `A - lo` and `A - hi`, so the iteration stops as soon as that
/// many Ritz pairs have converged.
pub fn solve_window_seeded<T: Scalar>(
    a: &CsrMatrix<T>,
    sigma: T,
    lo: T,
    hi: T,
    n_max: usize,
    opts: &WindowOptions<T>,
    seeds: &[Vec<Complex<T>>],
) -> Result<EigenWindow<T>> {
    if !(lo < hi) {
        return Err(Error::InvalidArgument { field: "window", reason: format!("empty window [{lo}, {hi}]") });
    }
    let n = a.dim();
    if n <= opts.dense_threshold {
        let mut w = dense_window(a, lo, hi);
        truncate_to(&mut w, sigma, n_max);
        return Ok(w);
    }
    let (below_lo, below_hi) = (count_below(a, lo)?, count_below(a, hi)?);
    let mut leaves = Vec::new();
    slice_window(a, (lo, below_lo), (hi, below_hi), (hi - lo) / T::lit(8.0), &mut leaves)?;
    let mut out = EigenWindow { values: vec![], vectors: vec![], residuals: vec![], truncated: false, basis_size: 0 };
    let mut rayleigh = Vec::with_capacity(seeds.len());
    let mut scratch = vec![czero(); n];
    for s in seeds.iter().filter(|s| s.len() == n) {
        a.matvec(s, &mut scratch);
        rayleigh.push((dot(s, &scratch).re / dot(s, s).re, s));
    }
    for (l, h, count) in leaves {
        let near: Vec<Vec<Complex<T>>> =
            rayleigh.iter().filter(|(r, _)| *r >= l - (h - l) && *r <= h + (h - l)).map(|(_, s)| (*s).clone()).collect();
        let w = krylov_window(a, (l + h) / T::lit(2.0), l, h, count, opts, &near)?;
        out.basis_size = out.basis_size.max(w.basis_size);
        out.values.extend(w.values);
        out.vectors.extend(w.vectors);
        out.residuals.extend(w.residuals);
    }
    let mut order: Vec<usize> = (0..out.values.len()).collect();
    order.sort_by(|&i, &j| out.values[i].partial_cmp(&out.values[j]).unwrap());
    let mut w = EigenWindow {
        values: order.iter().map(|&i| out.values[i]).collect(),
        vectors: order.iter().map(|&i| std::mem::take(&mut out.vectors[i])).collect(),
        residuals: order.iter().map(|&i| out.residuals[i]).collect(),
        truncated: false,
        basis_size: out.basis_size,
    };
    truncate_to(&mut w, sigma, n_max);
    Ok(w)
}

/// Splits `[lo, hi]` by bisection into pieces no wider than `min_width` that
/// hold eigenvalues, dropping the empty ones. Each end carries its inertia count.
fn slice_window<T: Scalar>(a: &CsrMatrix<T>, lo: (T, usize), hi: (T, usize), min_width: T, out: &mut Vec<(T, T, usize)>) -> Result<()> {
    let count = hi.1.saturating_sub(lo.1);
    if count == 0 {
        return Ok(());
    }
    if hi.0 - lo.0 <= min_width {
        out.push((lo.0, hi.0, count));
        return Ok(());
    }
    let mid = (lo.0 + hi.0) / T::lit(2.0);
    let at_mid = (mid, count_below(a, mid)?.clamp(lo.1, hi.1));
    slice_window(a, lo, at_mid, min_width, out)?;
    slice_window(a, at_mid, hi, min_width, out)
}

/// Krylov iteration for the `expected` eigenpairs of `a` in `[lo, hi]`.
fn krylov_window<T: Scalar>(
    a: &CsrMatrix<T>,
    sigma: T,
    lo: T,
    hi: T,
    expected: usize,
    opts: &WindowOptions<T>,
    seeds: &[Vec<Complex<T>>],
) -> Result<EigenWindow<T>> {
    let n = a.dim();
    let empty = EigenWindow { values: vec![], vectors: vec![], residuals: vec![], truncated: false, basis_size: 0 };
    let anorm = a.norm_inf().max(T::one());
    let radius = (sigma - lo).abs().max((hi - sigma).abs());
    let theta_min = T::one() / radius * T::lit(0.999_999);

    let mut shift = sigma;
    let mut lu = None;
    for attempt in 0..4 {
        match BandLu::factor(&a.shifted(shift)) {
            Ok(f) => {
                lu = Some(f);
                break;
            }
            Err(Error::Singular(_)) => {
                shift += T::lit(1e-7 * (attempt + 1) as f64) * anorm.sqrt();
            }
            Err(e) => return Err(e),
        }
    }
    let lu = lu.ok_or_else(|| Error::NotConverged { context: "shifted matrix singular".into() })?;
    let b = opts.block_size.max(1);
    let max_basis = opts.max_basis.max(3 * expected + 4 * b).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    let mut proj: Vec<Vec<Complex<T>>> = Vec::new(); // proj[j][i] = <q_i, Op q_j>
    let mut block: Vec<Vec<Complex<T>>> = seeds.iter().filter(|s| s.len() == n).cloned().collect();
    block.extend((0..b).map(|_| random_vector(&mut rng, n)));
    let mut next_check = block.len().max(expected);
    let mut scratch = vec![czero(); n];
    let mut previous: Vec<T> = Vec::new();

    loop {
        // Orthonormalize the incoming block against the basis and itself.
        let mut fresh: Vec<Vec<Complex<T>>> = Vec::with_capacity(block.len());
        for mut v in block.drain(..) {
            if basis.len() + fresh.len() >= max_basis {
                break;
            }
            let before = norm(&v);
            let mut nv = orthogonalize(&basis, &mut v).min(orthogonalize(&fresh, &mut v));
            if nv <= before * T::lit(1e-10) {
                // Invariant subspace reached along this direction: restart it randomly.
                v = random_vector::<T>(&mut rng, n);
                orthogonalize(&basis, &mut v);
                nv = orthogonalize(&fresh, &mut v);
                if nv == T::zero() {
                    continue;
                }
            }
            v.iter_mut().for_each(|x| *x = x.unscale(nv));
            fresh.push(v);
        }
        if fresh.is_empty() {
            return Err(Error::NotConverged { context: format!("basis exhausted at size {}", basis.len()) });
        }
        // Apply the inverted operator.
        let mut images = Vec::with_capacity(fresh.len());
        for q in &fresh {
            let mut z = q.clone();
            lu.solve_in_place(&mut z);
            images.push(z);
        }
        basis.extend(fresh);
        for z in &images {
            proj.push(basis.iter().map(|q| dot(q, z)).collect());
        }
        let m = basis.len();
        let complete = m >= n;

        if m >= next_check || m >= max_basis || complete {
            next_check = m + b.max(m / 6);
            let t = DMatrix::from_fn(m, m, |i, j| {
                let hij = if i < proj[j].len() { proj[j][i] } else { proj[i][j].conj() };
                let hji = if j < proj[i].len() { proj[i][j] } else { proj[j][i].conj() };
                (hij + hji.conj()).unscale(T::lit(2.0))
            });
            let (thetas, s) = hermitian_eigh(t);
            let mut found: Vec<(T, Vec<Complex<T>>, T)> = Vec::new();
            let last_chance = complete || m >= max_basis;
            for (j, &theta) in thetas.iter().enumerate() {
                if theta.abs() < theta_min {
                    continue;
                }
                // Ritz values that still move are not worth a residual check yet.
                let settled = previous.iter().any(|&p| (p - theta).abs() <= theta.abs() * T::lit(1e-6));
                if !settled && !last_chance {
                    continue;
                }
                let mut y = vec![czero(); n];
                for (i, q) in basis.iter().enumerate() {
                    axpy(s[(i, j)], q, &mut y);
                }
                // Inverse-iteration steps damp the high-energy components that
                // the A-residual would amplify.
                for _ in 0..2 {
                    lu.solve_in_place(&mut y);
                    let ny = norm(&y);
                    y.iter_mut().for_each(|x| *x = x.unscale(ny));
                }
                a.matvec(&y, &mut scratch);
                let lambda = dot(&y, &scratch).re;
                axpy(Complex::new(-lambda, T::zero()), &y, &mut scratch);
                let res = norm(&scratch);
                if lambda < lo || lambda > hi || res > opts.tol * anorm {
                    continue;
                }
                found.push((lambda, y, res));
            }
            previous = thetas;
            if found.len() >= expected || last_chance {
                if found.len() < expected && !complete {
                    return Err(Error::NotConverged {
                        context: format!("basis limit {max_basis} reached with {} of {expected} eigenpairs converged", found.len()),
                    });
                }
                found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
                return Ok(EigenWindow {
                    values: found.iter().map(|f| f.0).collect(),
                    residuals: found.iter().map(|f| f.2).collect(),
                    vectors: found.into_iter().map(|f| f.1).collect(),
                    basis_size: m,
                    ..empty
                });
            }
        }
        block = images;
    }
}

fn truncate_to<T: Scalar>(w: &mut EigenWindow<T>, sigma: T, n_max: usize) {
    if w.values.len() <= n_max {
        return;
    }
    let mut order: Vec<usize> = (0..w.values.len()).collect();
    order.sort_by(|&i, &j| (w.values[i] - sigma).abs().partial_cmp(&(w.values[j] - sigma).abs()).unwrap());
    let mut keep: Vec<usize> = order.into_iter().take(n_max).collect();
    keep.sort_unstable();
    w.values = keep.iter().map(|&i| w.values[i]).collect();
    w.residuals = keep.iter().map(|&i| w.residuals[i]).collect();
    w.vectors = keep.iter().map(|&i| w.vectors[i].clone()).collect();
    w.truncated = true;
}

/// The `count` smallest eigenvalues of `a`, all of which must lie above `lower_bound`.
pub fn lowest_eigenvalues<T: Scalar>(a: &CsrMatrix<T>, lower_bound: T, count: usize, opts: &WindowOptions<T>) -> Result<Vec<T>> {
    let count = count.min(a.dim());
    let mut width = T::one().max(a.norm_inf() * T::lit(1e-3));
    loop {
        let w = solve_window(a, lower_bound, lower_bound, lower_bound + width, a.dim(), opts)?;
        if w.values.len() >= count || width > a.norm_inf() * T::lit(4.0) {
            let mut v = w.values;
            v.truncate(count);
            return Ok(v);
        }
        width *= T::lit(2.0);
    }
}

/// Polishes an eigenpair by inverse iteration at a shift next to `lambda`.
pub fn refine_eigenpair<T: Scalar>(
    a: &CsrMatrix<T>,
    lambda: T,
    vector: &[Complex<T>],
    iterations: usize,
) -> Result<(T, Vec<Complex<T>>)> {
    let offset = T::lit(1e-9) * a.norm_inf().max(T::one());
    let lu = BandLu::factor(&a.shifted(lambda + offset))?;
    let mut x = vector.to_vec();
    for _ in 0..iterations {
        lu.solve_in_place(&mut x);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v = v.unscale(nx));
    }
    let mut ax = vec![czero(); x.len()];
    a.matvec(&x, &mut ax);
    Ok((dot(&x, &ax).re, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::TripletBuilder;

    fn laplacian_like(n: usize, shift_diag: impl Fn(usize) -> f64) -> CsrMatrix<f64> {
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            b.add(i, i, Complex::new(2.0 + shift_diag(i), 0.0));
            if i + 1 < n {
                b.add(i, i + 1, Complex::new(-1.0, 0.2));
                b.add(i + 1, i, Complex::new(-1.0, -0.2));
            }
        }
        b.build()
    }

    #[test]
    fn finds_every_eigenvalue_in_window_against_dense_reference() {
        let a = laplacian_like(600, |i| (i as f64 * 0.37).sin() * 1.5);
        let (all, _) = hermitian_eigh(a.to_dense());
        let (lo, hi) = (0.8, 1.3);
        let expected: Vec<f64> = all.into_iter().filter(|&v| v >= lo && v <= hi).collect();
        let w = solve_window(&a, 1.05, lo, hi, 1000, &WindowOptions::default()).unwrap();
        assert_eq!(w.values.len(), expected.len());
        for (x, y) in w.values.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn resolves_exact_double_degeneracy() {
        // Block diagonal copy of the same matrix: every eigenvalue is double.
        let base = laplacian_like(300, |i| (i as f64 * 0.11).cos());
        let mut b = TripletBuilder::new(600);
        for i in 0..300 {
            for (j, v) in base.row(i) {
                b.add(i, j, v);
                b.add(i + 300, j + 300, v);
            }
        }
        let a = b.build();
        let (all, _) = hermitian_eigh(base.to_dense());
        let single: Vec<f64> = all.into_iter().filter(|&v| (1.9..=2.1).contains(&v)).collect();
        let w = solve_window(&a, 2.0, 1.9, 2.1, 1000, &WindowOptions::default()).unwrap();
        assert_eq!(w.values.len(), 2 * single.len());
    }

    #[test]
    fn lowest_eigenvalues_from_below() {
        let a = laplacian_like(500, |i| (i as f64 * 0.7).sin());
        let (all, _) = hermitian_eigh(a.to_dense());
        let low = lowest_eigenvalues(&a, -2.0, 3, &WindowOptions::default()).unwrap();
        for i in 0..3 {
            assert!((low[i] - all[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn refine_reduces_residual() {
        let a = laplacian_like(400, |i| if i == 200 { -3.0 } else { 0.0 });
        let w = solve_window(&a, -0.9, -2.0, -0.1, 10, &WindowOptions::default()).unwrap();
        assert_eq!(w.values.len(), 1);
        let (lam, x) = refine_eigenpair(&a, w.values[0], &w.vectors[0], 2).unwrap();
        let mut ax = vec![czero(); 400];
        a.matvec(&x, &mut ax);
        axpy(Complex::new(-lam, 0.0), &x, &mut ax);
        assert!(norm(&ax) < 1e-12);
    }
}
