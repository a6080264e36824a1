//! Laplacian spectra.
//!
//! Everything downstream consumes a [`ComplexSpectrum`]; the dense solver in
//! [`eigenvalues`] is the only numerical kernel and the analytic routes
//! ([`circulant_spectrum`], [`kron_sum_spectrum`]) produce the same type.

mod analytic;

pub use analytic::{circulant_spectrum, family_spectrum, kron_sum_spectrum};

use std::fmt::Write as _;

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

/// Largest matrix the dense solver accepts.
pub const MAX_DENSE_DIM: usize = 4096;

/// Eigenvalues sorted by ascending real part, ties (real parts within
/// `zero_tol`) broken by ascending imaginary part.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    values: Vec<Complex64>,
    zero_multiplicity: usize,
    zero_tol: f64,
}

impl ComplexSpectrum {
    pub fn from_values(mut values: Vec<Complex64>, zero_tol: f64) -> Self {
        sort_eigenvalues(&mut values, zero_tol);
        let zero_multiplicity = values.iter().filter(|v| v.norm() <= zero_tol).count();
        ComplexSpectrum {
            values,
            zero_multiplicity,
            zero_tol,
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn zero_multiplicity(&self) -> usize {
        self.zero_multiplicity
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn is_zero(&self, v: Complex64) -> bool {
        v.norm() <= self.zero_tol
    }

    /// Eigenvalues with `|λ| > zero_tol`, in spectrum order.
    pub fn nonzero(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().copied().filter(|v| v.norm() > self.zero_tol)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.im.abs() <= tol)
    }

    /// CSV with columns `l,re,im,is_zero`; `l` is 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,re,im,is_zero\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", i + 1, v.re, v.im, self.is_zero(*v));
        }
        out
    }
}

/// `1e-9 · max(1, ‖L‖_max)`.
pub fn default_zero_tol(l: &LaplacianMatrix) -> f64 {
    1e-9 * l.max_abs().max(1.0)
}

/// Full spectrum of a dense real matrix.
///
/// The matrix is first split along the strongly connected components of its
/// sparsity pattern; in that order it is block triangular, so the spectrum
/// is the union of the diagonal blocks' spectra (and exact for 1×1 blocks).
/// Symmetric blocks go through symmetric tridiagonal QR, everything else
/// through the real Schur form. Both are backward stable.
pub fn eigenvalues(l: &LaplacianMatrix, zero_tol: f64) -> Result<ComplexSpectrum> {
    let dim = l.dim();
    if dim > MAX_DENSE_DIM {
        return Err(Error::MatrixTooLarge {
            dim,
            limit: MAX_DENSE_DIM,
        });
    }
    let mut values = Vec::with_capacity(dim);
    for block in strong_components(&l.matrix) {
        if let [i] = block[..] {
            values.push(Complex64::new(l.matrix[(i, i)], 0.0));
            continue;
        }
        let sub = l.matrix.select_rows(&block).select_columns(&block);
        values.extend(dense_block_eigenvalues(sub)?);
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NoConvergence { dim });
    }
    Ok(ComplexSpectrum::from_values(values, zero_tol))
}

fn dense_block_eigenvalues(m: DMatrix<f64>) -> Result<Vec<Complex64>> {
    let dim = m.nrows();
    let max_iter = 200 * dim.max(10);
    if m == m.transpose() {
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, max_iter).ok_or(Error::NoConvergence { dim })?;
        return Ok(eig.eigenvalues.iter().map(|&v| Complex64::new(v, 0.0)).collect());
    }
    // the QR iteration can stall at a deflation threshold of one ulp
    for eps in [4.0 * f64::EPSILON, 64.0 * f64::EPSILON] {
        if let Some(schur) = Schur::try_new(m.clone(), eps, max_iter) {
            return Ok(schur.complex_eigenvalues().iter().map(|v| Complex64::new(v.re, v.im)).collect());
        }
    }
    Err(Error::NoConvergence { dim })
}

/// Strongly connected components of the pattern `i → j` iff `m[(i, j)] ≠ 0`
/// (Tarjan, iterative).
fn strong_components(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let succ: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && m[(i, j)] != 0.0).collect())
        .collect();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut component = Vec::new();
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    component.push(w);
                    if w == v {
                        break;
                    }
                }
                component.sort_unstable();
                components.push(component);
            }
        }
    }
    components
}

/// [`eigenvalues`] with [`default_zero_tol`].
pub fn laplacian_spectrum(l: &LaplacianMatrix) -> Result<ComplexSpectrum> {
    eigenvalues(l, default_zero_tol(l))
}

/// `λ₂`: the eigenvalue of smallest real part among those with
/// `|λ| > zero_tol`. Requires a simple zero eigenvalue.
pub fn algebraic_connectivity(spec: &ComplexSpectrum) -> Result<Complex64> {
    if spec.zero_multiplicity() != 1 {
        return Err(Error::ZeroMultiplicity(spec.zero_multiplicity()));
    }
    spec.nonzero().next().ok_or(Error::ZeroMultiplicity(1))
}

fn sort_eigenvalues(values: &mut [Complex64], tie_tol: f64) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut start = 0;
    while start < values.len() {
        let anchor = values[start].re;
        let mut end = start + 1;
        while end < values.len() && values[end].re - anchor <= tie_tol {
            end += 1;
        }
        values[start..end].sort_by(|a, b| a.im.total_cmp(&b.im));
        start = end;
    }
}
