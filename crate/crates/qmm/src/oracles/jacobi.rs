//! Cyclic Jacobi eigensolver for dense real symmetric matrices.
//!
//! All matrices in this crate are small (a few hundred rows at most), so the
//! quadratically convergent Jacobi sweep is fast enough and keeps the crate
//! free of external linear-algebra dependencies.

use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 50;

/// Eigendecomposition of a symmetric matrix, values ascending.
pub struct Eigh {
    pub values: Vec<f64>,
    vectors: Option<Vec<f64>>,
    n: usize,
}

impl Eigh {
    /// Eigenvector for `values[j]`, unit norm, sign unspecified.
    pub fn vector(&self, j: usize) -> &[f64] {
        let v = self
            .vectors
            .as_ref()
            .expect("decomposition was computed without vectors");
        &v[j * self.n..(j + 1) * self.n]
    }
}

/// Diagonalize the row-major symmetric `n x n` matrix `a`.
///
/// Only the given storage is read; symmetry is assumed, not checked.
pub fn eigh(a: &[f64], n: usize, want_vectors: bool) -> Result<Eigh> {
    assert_eq!(a.len(), n * n, "matrix storage does not match dimension");
    if n == 0 {
        return Ok(Eigh {
            values: Vec::new(),
            vectors: want_vectors.then(Vec::new),
            n,
        });
    }
    let mut a = a.to_vec();
    let mut v = if want_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    } else {
        Vec::new()
    };

    // Frobenius norm is invariant under the rotations; fix the scale once.
    let fro2: f64 = a.iter().map(|x| x * x).sum();
    let tol2 = fro2 * 1e-30;

    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off2 += a[p * n + q] * a[p * n + q];
            }
        }
        if off2 <= tol2 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                // t is the smaller-magnitude root of t^2 + 2 tau t - 1 = 0;
                // for huge tau the sqrt overflows and t collapses to 0, which
                // zeroes an element already far below eigenvalue resolution.
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    let rp = c * aip - s * aiq;
                    let rq = s * aip + c * aiq;
                    a[i * n + p] = rp;
                    a[p * n + i] = rp;
                    a[i * n + q] = rq;
                    a[q * n + i] = rq;
                }
                if want_vectors {
                    for i in 0..n {
                        let vip = v[i * n + p];
                        let viq = v[i * n + q];
                        v[i * n + p] = c * vip - s * viq;
                        v[i * n + q] = s * vip + c * viq;
                    }
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .expect("eigenvalues are finite")
    });
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = want_vectors.then(|| {
        let mut cols = vec![0.0; n * n];
        for (slot, &j) in order.iter().enumerate() {
            for i in 0..n {
                cols[slot * n + i] = v[i * n + j];
            }
        }
        cols
    });
    Ok(Eigh { values, vectors, n })
}
