use nalgebra::DMatrix;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    Full,
    /// Leader row and column removed; stores the 0-based leader index.
    Grounded { leader: usize },
    /// Symmetric part `(L + Lᵀ)/2`.
    Mirror,
}

/// Dense Laplacian with a tag recording how it was derived.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    pub matrix: DMatrix<f64>,
    pub kind: LaplacianKind,
}

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// `(L + Lᵀ)/2`, tagged as a mirror Laplacian.
    pub fn symmetric_part(&self) -> LaplacianMatrix {
        let m = (&self.matrix + self.matrix.transpose()) * 0.5;
        LaplacianMatrix {
            matrix: m,
            kind: LaplacianKind::Mirror,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let m = &self.matrix;
        let n = m.nrows();
        (0..n).all(|i| (0..i).all(|j| m[(i, j)] == m[(j, i)]))
    }
}

/// `[L]_ij = −w_ij` for `j ∈ N_i`, `[L]_ii = Σ_k w_ik`, zero elsewhere.
///
/// The diagonal is accumulated from the same weights as the off-diagonal
/// entries, in the same order, so every row sums to zero up to one rounding
/// of the running sum.
pub fn build_laplacian(g: &Graph) -> LaplacianMatrix {
    let n = g.node_count();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for &(j, w) in g.neighbors(i) {
            m[(i, j)] = -w;
            diag += w;
        }
        m[(i, i)] = diag;
    }
    LaplacianMatrix {
        matrix: m,
        kind: LaplacianKind::Full,
    }
}

/// Full Laplacian with the leader's row and column removed.
pub fn grounded_laplacian(g: &Graph, leader: usize) -> Result<LaplacianMatrix> {
    let n = g.node_count();
    if leader >= n {
        return Err(Error::NodeOutOfRange {
            index: leader + 1,
            n,
        });
    }
    if n < 2 {
        return Err(Error::TooFewNodes { n, min: 2 });
    }
    let full = build_laplacian(g).matrix;
    let m = full.remove_row(leader).remove_column(leader);
    Ok(LaplacianMatrix {
        matrix: m,
        kind: LaplacianKind::Grounded { leader },
    })
}

/// True iff `‖LᵀL − LLᵀ‖_max ≤ tol`.
pub fn is_normal(l: &LaplacianMatrix, tol: f64) -> bool {
    let m = &l.matrix;
    let lt = m.transpose();
    let comm = &lt * m - m * &lt;
    comm.amax() <= tol
}
