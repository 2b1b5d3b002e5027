use crate::scalar::{czero, Scalar};
use num_complex::Complex;
use std::collections::BTreeMap;

/// Compressed sparse row matrix with complex entries.
#[derive(Debug, Clone)]
pub struct CsrMatrix<T: Scalar> {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

/// Accumulates `(row, col, value)` triplets; duplicates are summed.
#[derive(Debug, Clone)]
pub struct TripletBuilder<T: Scalar> {
    n: usize,
    rows: Vec<BTreeMap<usize, Complex<T>>>,
}

impl<T: Scalar> TripletBuilder<T> {
    pub fn new(n: usize) -> Self {
        Self { n, rows: vec![BTreeMap::new(); n] }
    }

    pub fn add(&mut self, i: usize, j: usize, v: Complex<T>) {
        *self.rows[i].entry(j).or_insert_with(czero) += v;
    }

    pub fn build(self) -> CsrMatrix<T> {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (j, v) in row {
                cols.push(j);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        CsrMatrix { n: self.n, row_ptr, cols, vals }
    }
}

impl<T: Scalar> CsrMatrix<T> {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex<T>)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(pos) => self.vals[r.start + pos],
            Err(_) => czero(),
        }
    }

    pub fn matvec(&self, x: &[Complex<T>], y: &mut [Complex<T>]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            let mut acc = czero();
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    /// Largest `|i - j|` over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                bw = bw.max(i.abs_diff(self.cols[k]));
            }
        }
        bw
    }

    /// Exact Hermiticity: every stored `a_ij` equals `conj(a_ji)` bit for bit.
    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|i| self.row(i).all(|(j, v)| self.get(j, i) == v.conj()))
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).fold(T::zero(), |s, (_, v)| s + v.norm_sqr().sqrt()))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i).re).collect()
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex<T>> {
        let mut m = nalgebra::DMatrix::from_element(self.n, self.n, czero());
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Returns `A - sigma I`.
    pub fn shifted(&self, sigma: T) -> Self {
        let mut out = self.clone();
        let mut found = 0;
        for i in 0..self.n {
            for k in out.row_ptr[i]..out.row_ptr[i + 1] {
                if out.cols[k] == i {
                    out.vals[k].re -= sigma;
                    found += 1;
                }
            }
        }
        if found == self.n {
            return out;
        }
        let mut b = TripletBuilder::new(self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                b.add(i, j, v);
            }
            b.add(i, i, Complex::new(-sigma, T::zero()));
        }
        b.build()
    }
}
