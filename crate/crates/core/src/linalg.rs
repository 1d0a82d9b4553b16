//! Dense symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector};

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order and
/// eigenvectors as the matching orthonormal columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymmetricEigen {
    /// Only the lower triangle of `m` is read.
    ///
    /// # Panics
    /// If `m` is not square.
    pub fn new(m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "eigendecomposition needs a square matrix");
        let n = m.nrows();
        let (values, vectors) = {
            let eig = nalgebra::SymmetricEigen::new(m.clone());
            if eig
                .eigenvalues
                .iter()
                .chain(eig.eigenvectors.iter())
                .all(|v| v.is_finite())
            {
                (eig.eigenvalues, eig.eigenvectors)
            } else {
                log::debug!("QR eigensolver produced non-finite output, using Jacobi");
                jacobi(m)
            }
        };
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| values[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    /// `U diag(values) U^T`.
    pub fn recompose_with(&self, values: &DVector<f64>) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.eigenvectors.nrows(), self.eigenvectors.ncols(), |r, c| {
            self.eigenvectors[(r, c)] * values[c]
        });
        &scaled * self.eigenvectors.transpose()
    }

    pub fn recompose(&self) -> DMatrix<f64> {
        self.recompose_with(&self.eigenvalues)
    }
}

/// Cyclic Jacobi rotations on the symmetrized lower triangle.
fn jacobi(mut a: DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = a.nrows();
    for r in 0..n {
        for c in r + 1..n {
            a[(r, c)] = a[(c, r)];
        }
    }
    let mut v = DMatrix::identity(n, n);
    let scale = a.norm();
    for _ in 0..100 {
        let mut off = 0.0;
        for r in 0..n {
            for c in r + 1..n {
                off += a[(r, c)] * a[(r, c)];
            }
        }
        if off.sqrt() <= 1e-14 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}
