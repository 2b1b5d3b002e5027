//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use std::f64::consts::{PI, TAU};

/// One-dimensional Hill operator `-u'' + v cos(2 pi s) u` on the unit period.
#[derive(Clone, Debug)]
pub struct Hill {
    pub v: f64,
    pub steps: usize,
    /// `v cos(2 pi s)` at the RK4 half steps.
    table: Vec<f64>,
}

impl Hill {
    pub fn cosine(v: f64) -> Self {
        let steps = 2000;
        let table = (0..=2 * steps).map(|i| v * (TAU * i as f64 / (2 * steps) as f64).cos()).collect();
        Self { v, steps, table }
    }

    /// Monodromy matrix over one period, columns from `(1, 0)` and `(0, 1)`.
    pub fn monodromy(&self, e: f64) -> [[f64; 2]; 2] {
        let h = 1.0 / self.steps as f64;
        let f = |i: usize, y: [f64; 2]| [y[1], (self.table[i] - e) * y[0]];
        let mut cols = [[1.0, 0.0], [0.0, 1.0]];
        for y in cols.iter_mut() {
            for n in 0..self.steps {
                let k1 = f(2 * n, *y);
                let k2 = f(2 * n + 1, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
                let k3 = f(2 * n + 1, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
                let k4 = f(2 * n + 2, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            }
        }
        cols
    }

    /// Discriminant `D(E) = tr M(E)`.
    pub fn discriminant(&self, e: f64) -> f64 {
        let m = self.monodromy(e);
        m[0][0] + m[1][1]
    }

    /// Roots of `D(E) = c` in `[lo, hi]`, by scanning and bisection.
    pub fn roots(&self, c: f64, lo: f64, hi: f64) -> Vec<f64> {
        let n = ((hi - lo) / 0.02).ceil() as usize;
        let f = |e: f64| self.discriminant(e) - c;
        let mut out = Vec::new();
        let mut a = lo;
        let mut fa = f(a);
        for i in 1..=n {
            let b = lo + (hi - lo) * i as f64 / n as f64;
            let fb = f(b);
            if fa == 0.0 {
                out.push(a);
            } else if fa * fb < 0.0 {
                let (mut x0, mut x1, mut f0) = (a, b, fa);
                while x1 - x0 > 1e-13 * x0.abs().max(1.0) {
                    let m = 0.5 * (x0 + x1);
                    let fm = f(m);
                    if fm * f0 <= 0.0 {
                        x1 = m;
                    } else {
                        x0 = m;
                        f0 = fm;
                    }
                }
                out.push(0.5 * (x0 + x1));
            }
            a = b;
            fa = fb;
        }
        out
    }

    /// Roots of `D(E) = c` above the spectrum bottom, scanning upwards until `n` are found.
    fn lowest_roots(&self, c: &[f64], n: usize) -> Vec<f64> {
        let mut lo = -self.v.abs() - 1.0;
        let mut out = Vec::new();
        while out.len() < n {
            for &ci in c {
                out.extend(self.roots(ci, lo, lo + 40.0));
            }
            lo += 40.0;
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    /// Lowest `n` Bloch eigenvalues at quasi-momentum `k` (period 1); at the
    /// zone centre and edge only open gaps are resolved.
    pub fn bands_at(&self, k: f64, n: usize) -> Vec<f64> {
        let mut r = self.lowest_roots(&[2.0 * k.cos()], n);
        r.truncate(n);
        r
    }

    /// Band edges `[(bottom_n, top_n)]` of the lowest `n` bands.
    pub fn band_edges(&self, n: usize) -> Vec<(f64, f64)> {
        let e = self.lowest_roots(&[2.0, -2.0], 2 * n);
        (0..n).map(|i| (e[2 * i], e[2 * i + 1])).collect()
    }

    /// Lyapunov exponent per unit length, `acosh(|D|/2)`, zero inside bands.
    pub fn floquet_exponent(&self, e: f64) -> f64 {
        let d = self.discriminant(e).abs() / 2.0;
        if d <= 1.0 {
            0.0
        } else {
            d.acosh()
        }
    }
}

/// Second-difference operator on `n` nodes with spacing `h`, diagonal `v`,
/// Dirichlet ends.
pub fn fd_dirichlet_eigenvalues(h: f64, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / (h * h) + v[i]
        } else if i.abs_diff(j) == 1 {
            -1.0 / (h * h)
        } else {
            0.0
        }
    });
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Periodic second difference with Bloch phase `e^{i k n h}` across the wrap.
pub fn fd_periodic_eigenvalues(h: f64, v: &[f64], k: f64) -> Vec<f64> {
    let n = v.len();
    let phase = Complex::from_polar(1.0, k * n as f64 * h);
    let mut m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex::new(2.0 / (h * h) + v[i], 0.0)
        } else if i.abs_diff(j) == 1 {
            Complex::new(-1.0 / (h * h), 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    if n > 2 {
        m[(n - 1, 0)] += -phase / (h * h);
        m[(0, n - 1)] += -phase.conj() / (h * h);
    } else {
        // Two nodes: both neighbours coincide.
        m[(1, 0)] += -phase / (h * h);
        m[(0, 1)] += -phase.conj() / (h * h);
    }
    let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Nodes of the 1D fiber grid: `i h` for `i` in `(-m, m)` or `[1, m)`.
pub fn fiber_nodes(h: f64, m: i64, dirichlet: bool) -> Vec<f64> {
    let start = if dirichlet { 1 } else { 1 - m };
    (start..m).map(|i| i as f64 * h).collect()
}

/// `v cos(2 pi (x - t))` to the right of the cut, `v cos(2 pi x)` to the left.
pub fn dislocated_cosine(v: f64, t: f64, x: f64) -> f64 {
    let s = if x > 0.0 { x - t } else { x };
    v * (TAU * s).cos()
}

/// Eigenvalues of the 2D separable fiber from the 1D pieces, inside `(lo, hi)`.
pub fn separable_fiber_oracle(v: f64, h: f64, periods: i64, t: f64, k: f64, dirichlet: bool, lo: f64, hi: f64) -> Vec<f64> {
    let ny = (1.0 / h).round() as usize;
    let m = periods * ny as i64;
    let along: Vec<f64> = fiber_nodes(h, m, dirichlet).iter().map(|&x| dislocated_cosine(v, t, x)).collect();
    let across: Vec<f64> = (0..ny).map(|j| v * (TAU * j as f64 * h).cos()).collect();
    let e1 = fd_dirichlet_eigenvalues(h, &along);
    let mu = fd_periodic_eigenvalues(h, &across, k);
    let mut out: Vec<f64> = e1.iter().flat_map(|a| mu.iter().map(move |b| a + b)).filter(|&e| lo < e && e < hi).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Exact continued-fraction convergents of `(1 + sqrt 5)/2` and `sqrt 2`.
pub fn fibonacci_convergents(n: usize) -> Vec<(i64, i64)> {
    let (mut a, mut b) = (1i64, 1i64);
    let mut out = Vec::new();
    for _ in 0..n {
        out.push((b, a));
        (a, b) = (b, a + b);
    }
    out
}

pub fn pell_convergents(n: usize) -> Vec<(i64, i64)> {
    let (mut p, mut q) = (1i64, 1i64);
    let mut out = Vec::new();
    for _ in 0..n {
        out.push((p, q));
        (p, q) = (p + 2 * q, p + q);
    }
    out
}

/// Brute-force `sup |V|` and `sup |grad V|` of a Fourier series on an `n x n` grid.
pub fn fourier_grid_bounds(coeffs: &[(i64, i64, Complex<f64>)], n: usize) -> (f64, f64) {
    let (mut sup, mut lip) = (0.0f64, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let x = [i as f64 / n as f64, j as f64 / n as f64];
            let (mut v, mut g1, mut g2) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
            for &(a, b, c) in coeffs {
                let e = c * Complex::from_polar(1.0, TAU * (a as f64 * x[0] + b as f64 * x[1]));
                v += e;
                g1 += e * Complex::new(0.0, TAU * a as f64);
                g2 += e * Complex::new(0.0, TAU * b as f64);
            }
            sup = sup.max(v.re.abs());
            lip = lip.max((g1.re * g1.re + g2.re * g2.re).sqrt());
        }
    }
    (sup, lip)
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

pub const TWO_PI: f64 = 2.0 * PI;

/// Decay rate per unit length of the 1D finite-difference recurrence
/// `-(u_{n+1} - 2u_n + u_{n-1})/h^2 + v_n u_n = e u_n` over one period of `v`.
pub fn fd_floquet_exponent(h: f64, v: &[f64], e: f64) -> f64 {
    let (mut a, mut b) = ([1.0, 0.0], [0.0, 1.0]);
    for &vn in v {
        let c = 2.0 + h * h * (vn - e);
        a = [a[1], c * a[1] - a[0]];
        b = [b[1], c * b[1] - b[0]];
    }
    let d = (a[0] + b[1]).abs() / 2.0;
    let period = h * v.len() as f64;
    if d <= 1.0 {
        0.0
    } else {
        d.acosh() / period
    }
}

/// Splits an eigenvalue of the separable fiber as `e1 + mu` with `e1` from
/// the 1D cut operator and `mu` from the transverse Bloch operator.
pub fn separable_split(v: f64, h: f64, periods: i64, t: f64, k: f64, dirichlet: bool, e: f64) -> (f64, f64) {
    let ny = (1.0 / h).round() as usize;
    let along: Vec<f64> = fiber_nodes(h, periods * ny as i64, dirichlet).iter().map(|&x| dislocated_cosine(v, t, x)).collect();
    let across: Vec<f64> = (0..ny).map(|j| v * (TAU * j as f64 * h).cos()).collect();
    let e1 = fd_dirichlet_eigenvalues(h, &along);
    let mu = fd_periodic_eigenvalues(h, &across, k);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for a in &e1 {
        for m in &mu {
            let d = (a + m - e).abs();
            if d < best.0 {
                best = (d, *a, *m);
            }
        }
    }
    (best.1, best.2)
}
