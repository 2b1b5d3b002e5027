use super::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Scalar};
use num_complex::Complex;

/// LU factorization with partial pivoting of a banded matrix.
///
/// Row `r` stores the absolute column window `[r - kl, r - kl + width)`, with
/// `width = 2 kl + ku + 1`; row interchanges during elimination grow the
/// upper bandwidth to `kl + ku`, which the window accommodates.
#[derive(Debug, Clone)]
pub struct BandLu<T: Scalar> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<Complex<T>>,
    pivots: Vec<usize>,
}

impl<T: Scalar> BandLu<T> {
    #[inline]
    fn idx(&self, r: usize, c: usize) -> usize {
        // c >= r - kl is guaranteed by the callers.
        r * self.width + (c + self.kl - r)
    }

    pub fn factor(a: &CsrMatrix<T>) -> Result<Self> {
        let bw = a.bandwidth();
        Self::factor_with_bandwidth(a, bw, bw)
    }

    pub fn factor_with_bandwidth(a: &CsrMatrix<T>, kl: usize, ku: usize) -> Result<Self> {
        let n = a.dim();
        let width = 2 * kl + ku + 1;
        let mut lu = BandLu { n, kl, ku, width, data: vec![czero(); n * width], pivots: vec![0; n] };
        for r in 0..n {
            for (c, v) in a.row(r) {
                if c + kl < r || c > r + ku {
                    return Err(Error::InvalidArgument {
                        field: "bandwidth",
                        reason: format!("entry ({r}, {c}) outside declared band ({kl}, {ku})"),
                    });
                }
                let k = lu.idx(r, c);
                lu.data[k] = v;
            }
        }
        lu.eliminate()?;
        Ok(lu)
    }

    fn eliminate(&mut self) -> Result<()> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        for i in 0..n {
            let last_row = (i + kl).min(n - 1);
            let last_col = (i + kl + ku).min(n - 1);
            let mut p = i;
            let mut best = self.data[self.idx(i, i)].norm_sqr().sqrt();
            for r in i + 1..=last_row {
                let v = self.data[self.idx(r, i)].norm_sqr().sqrt();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            self.pivots[i] = p;
            if best == T::zero() {
                return Err(Error::Singular(i));
            }
            if p != i {
                for c in i..=last_col {
                    let a = self.idx(i, c);
                    let b = self.idx(p, c);
                    self.data.swap(a, b);
                }
            }
            let inv = Complex::new(T::one(), T::zero()) / self.data[self.idx(i, i)];
            let prow = self.idx(i, i);
            for r in i + 1..=last_row {
                let ri = self.idx(r, i);
                let l = self.data[ri] * inv;
                self.data[ri] = l;
                if l == czero() {
                    continue;
                }
                let rrow = self.idx(r, i);
                for off in 1..=(last_col - i) {
                    let u = self.data[prow + off];
                    self.data[rrow + off] -= l * u;
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        for i in 0..n {
            let p = self.pivots[i];
            if p != i {
                b.swap(i, p);
            }
            let bi = b[i];
            if bi == czero() {
                continue;
            }
            for r in i + 1..=(i + kl).min(n - 1) {
                b[r] -= self.data[self.idx(r, i)] * bi;
            }
        }
        for i in (0..n).rev() {
            let row = self.idx(i, i);
            let mut acc = b[i];
            let last_col = (i + kl + ku).min(n - 1);
            for off in 1..=(last_col - i) {
                acc -= self.data[row + off] * b[i + off];
            }
            b[i] = acc / self.data[row];
        }
    }
}
