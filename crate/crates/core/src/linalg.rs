//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::prelude::*;

/// Eigenvalues (ascending) and matching eigenvectors of a symmetric matrix.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).into_owned())
        .collect();
    (values, vectors)
}

/// Minimum-norm solution of the underdetermined system `A x = b` with `A`
/// of full row rank: `x = Aᵀ (A Aᵀ)⁻¹ b`.
pub(crate) fn min_norm_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = a * a.transpose();
    let y = gram.lu().solve(b)?;
    Some(a.transpose() * y)
}

/// Solve a square system by LU with partial pivoting.
pub(crate) fn solve(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    a.lu().solve(b)
}
