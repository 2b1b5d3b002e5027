//! Linear-algebra kernels: sparse Hermitian storage, banded LU, dense
//! Hermitian eigensolves, shift-invert windowed eigensolver and a linear
//! assignment solver for eigenvector matching.

mod assignment;
mod banded;
mod csr;
mod dense;
mod inertia;
mod krylov;

pub use assignment::max_weight_assignment;
pub use banded::BandLu;
pub use csr::{CsrMatrix, TripletBuilder};
pub use dense::{hermitian_eigenvalues, hermitian_eigh};
pub use inertia::{count_below, count_in_window};
pub use krylov::{lowest_eigenvalues, refine_eigenpair, solve_window, solve_window_seeded, EigenWindow, WindowOptions};

use crate::scalar::Scalar;
use num_complex::Complex;

/// `⟨a, b⟩ = Σ conj(a_i) b_i`.
pub fn dot<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut re = T::zero();
    let mut im = T::zero();
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex::new(re, im)
}

pub fn norm<T: Scalar>(a: &[Complex<T>]) -> T {
    let mut s = T::zero();
    for x in a {
        s += x.re * x.re + x.im * x.im;
    }
    s.sqrt()
}

/// `y += alpha x`.
pub fn axpy<T: Scalar>(alpha: Complex<T>, x: &[Complex<T>], y: &mut [Complex<T>]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}
