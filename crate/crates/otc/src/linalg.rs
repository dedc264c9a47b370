//! Small dense linear algebra shims over nalgebra.

use nalgebra::DMatrix;
use ndarray::Array2;

/// Full symmetric eigendecomposition, eigenvalues descending by value with
/// matching eigenvector columns.
pub(crate) fn symmetric_eigen_desc(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    let m = DMatrix::from_fn(n, n, |i, j| a[(i, j)]);
    let decomp = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        decomp.eigenvalues[j]
            .partial_cmp(&decomp.eigenvalues[i])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| decomp.eigenvalues[i]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = decomp.eigenvectors[(row, src)];
        }
    }
    (values, vectors)
}
