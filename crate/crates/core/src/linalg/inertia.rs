use super::CsrMatrix;
use crate::error::{Error, Result};
use crate::scalar::{czero, Scalar};

/// Number of eigenvalues of the Hermitian banded matrix `a` below `s`, from
/// the signs of the pivots of `a - s = L D L^H` (Sylvester's law of inertia).
///
/// The shift is nudged away from `s` when a pivot nearly vanishes, so the
/// count is exact unless an eigenvalue lies within about `1e-10 ||A||` of `s`.
pub fn count_below<T: Scalar>(a: &CsrMatrix<T>, s: T) -> Result<usize> {
    let scale = a.norm_inf().max(T::one());
    let mut shift = s;
    for attempt in 0..6 {
        if let Some(c) = ldl_negative_pivots(a, shift, scale * T::lit(1e-13)) {
            return Ok(c);
        }
        shift = s + scale * T::lit(1e-11 * (1 << attempt) as f64);
    }
    Err(Error::Singular(a.dim()))
}

fn ldl_negative_pivots<T: Scalar>(a: &CsrMatrix<T>, s: T, tiny: T) -> Option<usize> {
    let n = a.dim();
    let w = a.bandwidth();
    // Row r of L holds columns r - w .. r - 1 at offsets 0 .. w - 1.
    let mut l = vec![czero::<T>(); n * w.max(1)];
    let mut d = vec![T::zero(); n];
    let mut row = vec![czero::<T>(); w + 1];
    let mut negatives = 0;
    for r in 0..n {
        let first = r.saturating_sub(w);
        row.iter_mut().for_each(|x| *x = czero());
        for (c, v) in a.row(r) {
            if c >= first && c <= r {
                row[c - first] += v;
            }
        }
        // row[c - first] holds a[r][c] for c in first..=r.
        for c in first..r {
            let cfirst = c.saturating_sub(w);
            let mut acc = row[c - first];
            for k in first.max(cfirst)..c {
                let lrk = l[r * w + (k + w - r)];
                let lck = l[c * w + (k + w - c)];
                acc -= lrk * lck.conj().scale(d[k]);
            }
            l[r * w + (c + w - r)] = acc.unscale(d[c]);
        }
        let mut dr = row[r - first].re - s;
        for k in first..r {
            dr -= l[r * w + (k + w - r)].norm_sqr() * d[k];
        }
        if dr.abs() <= tiny {
            return None;
        }
        if dr < T::zero() {
            negatives += 1;
        }
        d[r] = dr;
    }
    Some(negatives)
}

/// Eigenvalues of `a` in `[lo, hi)`.
pub fn count_in_window<T: Scalar>(a: &CsrMatrix<T>, lo: T, hi: T) -> Result<usize> {
    Ok(count_below(a, hi)?.saturating_sub(count_below(a, lo)?))
}
