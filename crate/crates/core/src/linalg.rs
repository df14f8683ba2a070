use nalgebra::DMatrix;

/// QR factorization with a nonnegative diagonal in `R` (zero diagonal keeps +1).
pub(crate) fn positive_qr(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows().min(r.ncols()) {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

/// `|det m|` through Householder reduction.
pub(crate) fn abs_det(m: &DMatrix<f64>) -> f64 {
    debug_assert!(m.is_square());
    if m.nrows() == 0 {
        return 1.0;
    }
    let r = m.clone().qr().r();
    (0..r.nrows()).map(|i| r[(i, i)].abs()).product()
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// `max |m mᵀ - I|`, the row-orthonormality deviation.
pub(crate) fn row_orthonormality_deviation(m: &DMatrix<f64>) -> f64 {
    let gram = m * m.transpose();
    max_abs(&(gram - DMatrix::identity(m.nrows(), m.nrows())))
}

pub(crate) fn remove_column(m: &DMatrix<f64>, j: usize) -> DMatrix<f64> {
    m.clone().remove_column(j)
}
