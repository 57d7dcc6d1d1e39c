use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Dominant (Perron-Frobenius) eigenpair of a Metzler matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Eigenvalue with the largest real part.
    pub value: f64,
    /// Strictly positive eigenvector scaled to unit max-norm.
    pub vector: DVector<f64>,
    pub iterations: usize,
    /// `max |M v - value v|` at termination.
    pub residual: f64,
}

/// True when the directed graph of off-diagonal nonzeros is strongly connected.
pub fn is_irreducible(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n <= 1 {
        return true;
    }
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] != 0.0 {
                out[i].push(j);
                inc[j].push(i);
            }
        }
    }
    super::bfs(&out, 0).into_iter().all(|s| s) && super::bfs(&inc, 0).into_iter().all(|s| s)
}

/// Power iteration on `M + cI`, `c = 1 + max |M_ii|`, from the all-ones vector.
///
/// The shift makes the iterated matrix nonnegative with a positive diagonal,
/// hence primitive whenever `M` is irreducible, so the iteration converges to
/// the Perron pair. The returned value is shifted back.
pub fn pf_eigen(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<SpectralResult> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite entry at ({i}, {j})")));
            }
            if i != j && v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "negative off-diagonal entry {v} at ({i}, {j}); matrix is not Metzler"
                )));
            }
        }
    }
    if !is_irreducible(m) {
        return Err(Error::Reducible);
    }

    let shift = 1.0 + (0..n).map(|i| m[(i, i)].abs()).fold(0.0, f64::max);
    let mut b = m.clone();
    for i in 0..n {
        b[(i, i)] += shift;
    }

    let mut v = DVector::from_element(n, 1.0);
    let mut w = DVector::zeros(n);
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        w.gemv(1.0, &b, &v, 0.0);
        let lambda = v.dot(&w) / v.dot(&v);
        residual = (&w - lambda * &v).amax();
        if residual <= tol {
            return Ok(SpectralResult { value: lambda - shift, vector: v, iterations: iter, residual });
        }
        let scale = w.amax();
        v.copy_from(&w);
        v /= scale;
    }
    Err(Error::NotConverged { iterations: max_iter, residual })
}

pub fn pf_eigen_default(m: &DMatrix<f64>) -> Result<SpectralResult> {
    pf_eigen(m, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    // Dense symmetric eigensolve, independent of the power iteration.
    fn dense_max_eig(m: &DMatrix<f64>) -> f64 {
        m.clone().symmetric_eigen().eigenvalues.max()
    }

    #[test]
    fn complete_graph() {
        let a = Graph::complete(5).unwrap().adjacency();
        let r = pf_eigen_default(&a).unwrap();
        assert!((r.value - 4.0).abs() < 1e-9);
        assert!(r.vector.iter().all(|&x| x > 0.0));
        assert!(r.residual <= DEFAULT_TOL);
    }

    #[test]
    fn star_three_leaves() {
        let a = Graph::star(4).unwrap().adjacency();
        let r = pf_eigen_default(&a).unwrap();
        let oracle = dense_max_eig(&a);
        assert!((oracle - 3f64.sqrt()).abs() < 1e-12);
        assert!((r.value - 3f64.sqrt()).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn shifted_metzler() {
        let a = Graph::complete(5).unwrap().adjacency();
        let m = &a - DMatrix::identity(5, 5);
        let r = pf_eigen_default(&m).unwrap();
        assert!((dense_max_eig(&m) - 3.0).abs() < 1e-12);
        assert!((r.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn reducible_rejected() {
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(pf_eigen_default(&m), Err(Error::Reducible)));
        // one-way coupling is weakly but not strongly connected
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(pf_eigen_default(&m), Err(Error::Reducible)));
    }

    #[test]
    fn not_metzler_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!(matches!(pf_eigen_default(&m), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let a = Graph::path(9).unwrap().adjacency();
        match pf_eigen(&a, 1e-14, 2) {
            Err(Error::NotConverged { iterations, residual }) => {
                assert_eq!(iterations, 2);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nonsymmetric_metzler_matches_schur() {
        // diag(s) A - I is similar to a symmetric matrix only when s > 0; use it
        // with a generic oracle through the complex eigenvalues.
        let a = Graph::wheel(6).unwrap().adjacency();
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![0.9, 0.5, 0.7, 0.3, 0.8, 0.6]));
        let m = &s * &a * 1.3 - DMatrix::identity(6, 6) * 0.7;
        let oracle = m
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let r = pf_eigen_default(&m).unwrap();
        assert!((r.value - oracle).abs() < 1e-9, "{} vs {}", r.value, oracle);
        let resid = (&m * &r.vector - r.value * &r.vector).amax();
        assert!(resid <= 2.0 * DEFAULT_TOL);
    }
}
