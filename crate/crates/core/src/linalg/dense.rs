use crate::scalar::Scalar;
use nalgebra::DMatrix;
use num_complex::Complex;

/// Eigen-decomposition of a dense Hermitian matrix, eigenvalues ascending.
/// Column `j` of the returned matrix is the eigenvector of eigenvalue `j`.
pub fn hermitian_eigh<T: Scalar>(m: DMatrix<Complex<T>>) -> (Vec<T>, DMatrix<Complex<T>>) {
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Ascending eigenvalues of a dense Hermitian matrix.
pub fn hermitian_eigenvalues<T: Scalar>(m: DMatrix<Complex<T>>) -> Vec<T> {
    let mut v: Vec<T> = m.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}
