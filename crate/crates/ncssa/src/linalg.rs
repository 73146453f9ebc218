//! Dense complex linear algebra kernels.
//!
//! Every matrix function in the crate (powers, log, exp, support projections)
//! goes through one backend: the Hermitian eigendecomposition provided by
//! [`herm_eigen`]. Keeping a single spectral path makes tolerance behaviour
//! uniform across entropies, norms, and solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative eigenvalue cutoff below which a direction counts as kernel.
///
/// Used by support projections and negative/fractional matrix powers. The
/// scale is `support_tol * lambda_max(|x|)`, so the cutoff follows the
/// magnitude of the input.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-10;

pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Frobenius distance from Hermitian symmetry, `max |x - x*|` entrywise.
pub fn herm_defect(x: &CMat) -> f64 {
    let adj = x.adjoint();
    (x - adj).iter().map(|e| e.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(x: &CMat, tol: f64) -> bool {
    x.is_square() && herm_defect(x) <= tol
}

/// Hermitian part `(x + x*)/2`.
pub fn hermitize(x: &CMat) -> CMat {
    (x + x.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and a unitary whose columns are the
/// matching eigenvectors, so `x = u diag(vals) u*`. The input is symmetrized
/// first; callers are expected to have validated Hermitian-ness at their own
/// tolerance.
pub fn herm_eigen(x: &CMat) -> Result<(Vec<f64>, CMat)> {
    if !x.is_square() {
        return Err(Error::shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let n = x.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0, 0)));
    }
    let sym = hermitize(x);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("eigenvalues of a Hermitian matrix are finite reals")
    });
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMat::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        vals.push(eig.eigenvalues[idx]);
        vecs.set_column(col, &eig.eigenvectors.column(idx));
    }
    Ok((vals, vecs))
}

/// Applies a scalar function to the spectrum of a Hermitian matrix.
pub fn herm_fn(x: &CMat, f: impl Fn(f64) -> C64) -> Result<CMat> {
    let (vals, u) = herm_eigen(x)?;
    Ok(recompose(&vals.iter().map(|&v| f(v)).collect::<Vec<_>>(), &u))
}

fn recompose(fvals: &[C64], u: &CMat) -> CMat {
    let mut scaled = u.clone();
    for (c, &fv) in fvals.iter().enumerate() {
        let mut col = scaled.column_mut(c);
        col *= fv;
    }
    scaled * u.adjoint()
}

/// `x^z` for Hermitian positive semidefinite `x`, taken on the support.
///
/// Eigenvalues at or below `support_tol * lambda_max` count as kernel and map
/// to zero for every exponent; in particular `z = 0` yields the support
/// projection. Eigenvalues below the cutoff must not be more negative than
/// the cutoff scale allows, otherwise the input was not positive.
pub fn herm_power(x: &CMat, z: C64, support_tol: f64) -> Result<CMat> {
    let (vals, u) = herm_eigen(x)?;
    let lam_max = vals.iter().cloned().fold(0.0, f64::max);
    let cutoff = support_tol * lam_max.max(1e-300);
    let floor = -support_tol * lam_max.abs().max(1.0);
    let mut fvals = Vec::with_capacity(vals.len());
    for &v in &vals {
        if v <= cutoff {
            if v < floor {
                return Err(Error::NotPositive { min_eig: v });
            }
            fvals.push(C64::from(0.0));
        } else {
            // v^z = exp(z ln v) for v > 0.
            let w = z * v.ln();
            fvals.push(w.exp() * C64::from(1.0));
        }
    }
    Ok(recompose(&fvals, &u))
}

/// Orthogonal projection onto the support (range) of a PSD matrix.
pub fn support_projection(x: &CMat, support_tol: f64) -> Result<CMat> {
    herm_power(x, C64::from(0.0), support_tol)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn lambda_max(x: &CMat) -> Result<f64> {
    let (vals, _) = herm_eigen(x)?;
    vals.last().copied().ok_or_else(|| Error::shape("lambda_max of empty matrix"))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn lambda_min(x: &CMat) -> Result<f64> {
    let (vals, _) = herm_eigen(x)?;
    vals.first().copied().ok_or_else(|| Error::shape("lambda_min of empty matrix"))
}

/// Operator norm of a Hermitian matrix, `max |eigenvalue|`.
pub fn op_norm_herm(x: &CMat) -> Result<f64> {
    let (vals, _) = herm_eigen(x)?;
    Ok(vals.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// Kronecker product ordered so that `(i,k),(j,l) -> (i*b+k, j*b+l)`.
pub fn kron(x: &CMat, y: &CMat) -> CMat {
    x.kronecker(y)
}

/// Identity matrix of size n.
pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Discrete Fourier unitary `F[j,k] = e^{2πi jk/d}/√d`, whose columns form
/// a basis mutually unbiased to the computational one.
pub fn fourier_unitary(d: usize) -> CMat {
    let mut f = CMat::zeros(d, d);
    let scale = 1.0 / (d as f64).sqrt();
    for j in 0..d {
        for k in 0..d {
            let phase = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
            f[(j, k)] = C64::new(phase.cos(), phase.sin()) * C64::from(scale);
        }
    }
    f
}
