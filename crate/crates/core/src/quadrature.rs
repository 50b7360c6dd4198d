//! Gauss–Hermite rules for expectations under `N(0, 1)`.

use nalgebra::DMatrix;

/// Nodes and weights with `Σ w_k g(x_k) ≈ E g(Z)`, `Z ~ N(0, 1)`; exact for
/// polynomials of degree below `2n`. Built from the eigen-decomposition of the
/// Jacobi matrix of the probabilists' Hermite polynomials.
pub fn gauss_hermite_normal(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(x, w)| (x, w / total)).unzip()
}
