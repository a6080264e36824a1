use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Monic polynomial `sⁿ + b_{n−1}sⁿ⁻¹ + … + b₀` with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    /// `b₀..b_{n−1}`, lowest order first.
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    /// Monic polynomial from its non-leading coefficients `b₀..b_{n−1}`.
    pub fn monic(coeffs: Vec<Complex64>) -> Self {
        ComplexPolynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::monic(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        // full coefficient vector, highest order last
        let mut full = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); full.len() + 1];
            for (k, &c) in full.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            full = next;
        }
        full.pop();
        Self::monic(full)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `b₀..b_{n−1}`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `b_k` for `k < n`, `1` for `k = n`.
    pub fn coeff(&self, k: usize) -> Complex64 {
        match k.cmp(&self.degree()) {
            std::cmp::Ordering::Less => self.coeffs[k],
            std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
            std::cmp::Ordering::Greater => Complex64::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(1.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// `max_k |b_k|`, at least 1 (the leading coefficient).
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max)
    }

    /// `p(σt)/σⁿ`: same root arguments, magnitudes divided by `σ`.
    pub fn rescale(&self, sigma: f64) -> Self {
        let n = self.degree() as i32;
        Self::monic(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c * sigma.powi(k as i32 - n))
                .collect(),
        )
    }

    /// Smallest `σ` with `|b_k| σ^{k−n} ≤ 1` for every `k`.
    pub fn balancing_scale(&self) -> f64 {
        let n = self.degree();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
    }

    fn check(&self) -> Result<()> {
        if self.degree() == 0 {
            return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
        }
        if self.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite polynomial coefficient".into()));
        }
        Ok(())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.check()
    }
}

/// Coefficients of a monic polynomial in `μ = −js` as `(f_k, g_k)` pairs,
/// lowest order first: `c_k = b_k j^{k−n} = f_k + j g_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MuPolynomial {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl MuPolynomial {
    pub fn degree(&self) -> usize {
        self.f.len()
    }

    pub fn to_polynomial(&self) -> ComplexPolynomial {
        ComplexPolynomial::monic(
            self.f
                .iter()
                .zip(&self.g)
                .map(|(&f, &g)| Complex64::new(f, g))
                .collect(),
        )
    }
}

/// Substitute `μ = −js`; the roots of the result are `−j` times the roots of
/// `p`, so `Re s < 0` becomes `Im μ > 0`.
pub fn s_to_mu(p: &ComplexPolynomial) -> MuPolynomial {
    let n = p.degree();
    let (f, g) = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            // j^{k−n} = j^{(k−n) mod 4}
            let c = match (k as i64 - n as i64).rem_euclid(4) {
                0 => b,
                1 => Complex64::new(-b.im, b.re),
                2 => -b,
                _ => Complex64::new(b.im, -b.re),
            };
            (c.re, c.im)
        })
        .unzip();
    MuPolynomial { f, g }
}

/// All roots, as the eigenvalues of the companion matrix (complex Schur).
pub fn polynomial_roots(p: &ComplexPolynomial) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidArgument("polynomial degree must be at least 1".into()));
    }
    // exact zero roots are split off; a nilpotent companion block can stall
    // the Schur iteration
    let zeros = p.coeffs().iter().take_while(|c| **c == Complex64::new(0.0, 0.0)).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let b = &p.coeffs()[zeros..];
    let n = n - zeros;
    match n {
        0 => return Ok(roots),
        1 => {
            roots.push(-b[0]);
            return Ok(roots);
        }
        _ => {}
    }
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        c[(0, k)] = -b[n - 1 - k];
    }
    for i in 1..n {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let schur = [f64::EPSILON, 4.0 * f64::EPSILON, 64.0 * f64::EPSILON]
        .iter()
        .find_map(|&eps| Schur::try_new(c.clone(), eps, 1000 * n))
        .ok_or(Error::NoConvergence { dim: n })?;
    let (_, t) = schur.unpack();
    roots.extend((0..n).map(|i| t[(i, i)]));
    Ok(roots)
}
