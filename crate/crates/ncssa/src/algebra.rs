//! Finite-dimensional von Neumann algebras and their elements.
//!
//! An [`Algebra`] is an ordered direct sum of full matrix blocks
//! `⊕_k M_{d_k}` together with one positive weight per block; the trace of an
//! element is `τ(x) = Σ_k w_k tr(x_k)`. Weights are never renormalized
//! behind the caller's back: a subalgebra carries whatever trace it was
//! constructed with, and all pairings downstream account for it explicitly.
//!
//! Elements are stored blockwise as dense complex matrices. The linear
//! coordinates used by channels come from [`AlgElement::to_vec`], which scans
//! blocks in order and each block row-major.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec};

/// One full matrix block `M_dim` with trace weight `weight`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub dim: usize,
    pub weight: f64,
}

/// A finite-dimensional von Neumann algebra with a weighted trace.
#[derive(Clone)]
pub struct Algebra {
    blocks: Arc<Vec<Block>>,
}

impl PartialEq for Algebra {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl fmt::Debug for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| format!("M{}(w={})", b.dim, b.weight))
            .collect();
        write!(f, "Algebra[{}]", parts.join(" ⊕ "))
    }
}

impl Algebra {
    /// Direct sum of full blocks with explicit weights.
    pub fn new(blocks: Vec<Block>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("no blocks".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.dim == 0 {
                return Err(Error::InvalidAlgebra(format!("block {k} has dimension 0")));
            }
            if !(b.weight > 0.0) || !b.weight.is_finite() {
                return Err(Error::InvalidAlgebra(format!(
                    "block {k} has non-positive or non-finite weight {}",
                    b.weight
                )));
            }
        }
        Ok(Algebra { blocks: Arc::new(blocks) })
    }

    /// Single full block `M_d` with the plain matrix trace (weight 1).
    pub fn full(d: usize) -> Self {
        Algebra::new(vec![Block { dim: d, weight: 1.0 }]).expect("full block is valid")
    }

    /// Commutative algebra `ℂ^n`: n one-dimensional blocks of weight 1.
    pub fn classical(n: usize) -> Self {
        Algebra::new(vec![Block { dim: 1, weight: 1.0 }; n]).expect("classical algebra is valid")
    }

    /// The scalars `ℂ` with a chosen trace of the unit.
    pub fn scalar(weight: f64) -> Self {
        Algebra::new(vec![Block { dim: 1, weight }]).expect("scalar algebra is valid")
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Total coordinate dimension `Σ_k d_k²`.
    pub fn vec_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim * b.dim).sum()
    }

    /// Trace of the identity, `Σ_k w_k d_k`.
    pub fn trace_of_identity(&self) -> f64 {
        self.blocks.iter().map(|b| b.weight * b.dim as f64).sum()
    }

    /// Hilbert-space dimension `Σ_k d_k` of the defining representation.
    pub fn rep_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn is_single_full_block(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn is_commutative(&self) -> bool {
        self.blocks.iter().all(|b| b.dim == 1)
    }

    /// Coordinate offset of block `k` in the vec layout.
    pub fn block_offset(&self, k: usize) -> usize {
        self.blocks[..k].iter().map(|b| b.dim * b.dim).sum()
    }

    /// Tensor product of two single-full-block algebras, weights multiplying.
    pub fn tensor(&self, other: &Algebra) -> Result<Algebra> {
        if !self.is_single_full_block() || !other.is_single_full_block() {
            return Err(Error::Unsupported(
                "tensor products are defined for single full blocks only".into(),
            ));
        }
        let a = &self.blocks[0];
        let b = &other.blocks[0];
        Algebra::new(vec![Block { dim: a.dim * b.dim, weight: a.weight * b.weight }])
    }

    pub fn zero(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.blocks.iter().map(|b| CMat::zeros(b.dim, b.dim)).collect(),
        }
    }

    pub fn identity(&self) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            blocks: self.blocks.iter().map(|b| linalg::eye(b.dim)).collect(),
        }
    }

    /// Matrix unit `e_ij` in block `k`, zero elsewhere.
    pub fn matrix_unit(&self, k: usize, i: usize, j: usize) -> AlgElement {
        let mut x = self.zero();
        x.blocks[k][(i, j)] = C64::from(1.0);
        x
    }

    /// Enumerates the matrix-unit basis in vec order as `(block, row, col)`.
    pub fn basis_indices(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.blocks.iter().enumerate().flat_map(|(k, b)| {
            (0..b.dim).flat_map(move |i| (0..b.dim).map(move |j| (k, i, j)))
        })
    }

    /// Orthonormal Hermitian basis (Frobenius inner product, unweighted).
    ///
    /// Per block of dimension d: the d diagonal units, then for each i < j the
    /// real pair `(e_ij + e_ji)/√2` and the imaginary pair `i(e_ij − e_ji)/√2`.
    /// Used as the real coordinate system of barrier solvers and optimizers.
    pub fn herm_basis(&self) -> Vec<AlgElement> {
        let mut out = Vec::with_capacity(self.vec_dim());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (k, b) in self.blocks.iter().enumerate() {
            for i in 0..b.dim {
                out.push(self.matrix_unit(k, i, i));
            }
            for i in 0..b.dim {
                for j in (i + 1)..b.dim {
                    let mut re = self.zero();
                    re.blocks[k][(i, j)] = C64::from(s);
                    re.blocks[k][(j, i)] = C64::from(s);
                    out.push(re);
                    let mut im = self.zero();
                    im.blocks[k][(i, j)] = Complex::new(0.0, s);
                    im.blocks[k][(j, i)] = Complex::new(0.0, -s);
                    out.push(im);
                }
            }
        }
        out
    }

    /// Rebuilds an element from its vec coordinates.
    pub fn from_vec(&self, v: &CVec) -> Result<AlgElement> {
        if v.len() != self.vec_dim() {
            return Err(Error::shape(format!(
                "coordinate vector has length {}, algebra needs {}",
                v.len(),
                self.vec_dim()
            )));
        }
        let mut blocks = Vec::with_capacity(self.num_blocks());
        let mut off = 0;
        for b in self.blocks.iter() {
            let mut m = CMat::zeros(b.dim, b.dim);
            for i in 0..b.dim {
                for j in 0..b.dim {
                    m[(i, j)] = v[off + i * b.dim + j];
                }
            }
            blocks.push(m);
            off += b.dim * b.dim;
        }
        Ok(AlgElement { algebra: self.clone(), blocks })
    }

    /// Builds an element from per-block matrices, validating shapes.
    pub fn element(&self, blocks: Vec<CMat>) -> Result<AlgElement> {
        if blocks.len() != self.num_blocks() {
            return Err(Error::shape(format!(
                "{} block matrices supplied, algebra has {}",
                blocks.len(),
                self.num_blocks()
            )));
        }
        for (k, (m, b)) in blocks.iter().zip(self.blocks.iter()).enumerate() {
            if m.nrows() != b.dim || m.ncols() != b.dim {
                return Err(Error::shape(format!(
                    "block {k} is {}x{}, algebra block has dimension {}",
                    m.nrows(),
                    m.ncols(),
                    b.dim
                )));
            }
        }
        Ok(AlgElement { algebra: self.clone(), blocks })
    }

    /// Single-block convenience constructor.
    pub fn element_from_matrix(&self, m: CMat) -> Result<AlgElement> {
        self.element(vec![m])
    }
}

/// An element of an [`Algebra`], stored blockwise.
#[derive(Clone, PartialEq)]
pub struct AlgElement {
    algebra: Algebra,
    blocks: Vec<CMat>,
}

impl fmt::Debug for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgElement({:?}, blocks: {:?})", self.algebra, self.blocks)
    }
}

impl AlgElement {
    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut CMat {
        &mut self.blocks[k]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    /// The single block of a one-block algebra.
    pub fn as_single_block(&self) -> Result<&CMat> {
        if self.blocks.len() == 1 {
            Ok(&self.blocks[0])
        } else {
            Err(Error::Unsupported("expected a single-block element".into()))
        }
    }

    fn same_algebra(&self, other: &AlgElement) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::shape(format!(
                "elements live in different algebras: {:?} vs {:?}",
                self.algebra, other.algebra
            )))
        }
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        self.same_algebra(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn sub(&self, other: &AlgElement) -> Result<AlgElement> {
        self.same_algebra(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn scale(&self, s: C64) -> AlgElement {
        let blocks = self.blocks.iter().map(|b| b.map(|e| e * s)).collect();
        AlgElement { algebra: self.algebra.clone(), blocks }
    }

    pub fn scale_re(&self, s: f64) -> AlgElement {
        self.scale(C64::from(s))
    }

    /// Blockwise operator product.
    pub fn mul(&self, other: &AlgElement) -> Result<AlgElement> {
        self.same_algebra(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a * b).collect();
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn adjoint(&self) -> AlgElement {
        let blocks = self.blocks.iter().map(|b| b.adjoint()).collect();
        AlgElement { algebra: self.algebra.clone(), blocks }
    }

    /// Weighted trace `Σ_k w_k tr(x_k)`.
    pub fn trace(&self) -> C64 {
        let mut t = C64::from(0.0);
        for (m, b) in self.blocks.iter().zip(self.algebra.blocks.iter()) {
            let tr: C64 = (0..b.dim).map(|i| m[(i, i)]).sum();
            t += tr * C64::from(b.weight);
        }
        t
    }

    pub fn trace_re(&self) -> f64 {
        self.trace().re
    }

    /// Trace pairing `τ(x y)` (bilinear, no adjoint).
    pub fn pair(&self, other: &AlgElement) -> Result<C64> {
        Ok(self.mul(other)?.trace())
    }

    /// Sesquilinear inner product `τ(x* y)`.
    pub fn inner(&self, other: &AlgElement) -> Result<C64> {
        Ok(self.adjoint().mul(other)?.trace())
    }

    pub fn herm_defect(&self) -> f64 {
        self.blocks.iter().map(linalg::herm_defect).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_defect() <= tol
    }

    pub fn hermitize(&self) -> AlgElement {
        let blocks = self.blocks.iter().map(linalg::hermitize).collect();
        AlgElement { algebra: self.algebra.clone(), blocks }
    }

    /// Smallest eigenvalue across blocks (element must be Hermitian).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut m = f64::INFINITY;
        for b in &self.blocks {
            m = m.min(linalg::lambda_min(b)?);
        }
        Ok(m)
    }

    /// Largest eigenvalue across blocks (element must be Hermitian).
    pub fn max_eigenvalue(&self) -> Result<f64> {
        let mut m = f64::NEG_INFINITY;
        for b in &self.blocks {
            m = m.max(linalg::lambda_max(b)?);
        }
        Ok(m)
    }

    /// Operator norm for Hermitian elements.
    pub fn op_norm_herm(&self) -> Result<f64> {
        let mut m: f64 = 0.0;
        for b in &self.blocks {
            m = m.max(linalg::op_norm_herm(b)?);
        }
        Ok(m)
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(self.is_hermitian(tol) && self.min_eigenvalue()? >= -tol)
    }

    /// Eigenvalues of all blocks with their trace weights, `(eigenvalue, weight)`.
    pub fn weighted_spectrum(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.algebra.rep_dim());
        for (m, b) in self.blocks.iter().zip(self.algebra.blocks.iter()) {
            let (vals, _) = linalg::herm_eigen(m)?;
            out.extend(vals.into_iter().map(|v| (v, b.weight)));
        }
        Ok(out)
    }

    /// Blockwise `x^z` on the support, see [`linalg::herm_power`].
    pub fn herm_power(&self, z: C64, support_tol: f64) -> Result<AlgElement> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| linalg::herm_power(b, z, support_tol))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    /// Blockwise spectral function for Hermitian elements.
    pub fn herm_fn(&self, f: impl Fn(f64) -> C64 + Copy) -> Result<AlgElement> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| linalg::herm_fn(b, f))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgElement { algebra: self.algebra.clone(), blocks })
    }

    pub fn support_projection(&self, support_tol: f64) -> Result<AlgElement> {
        self.herm_power(C64::from(0.0), support_tol)
    }

    /// Matrix exponential of a Hermitian element.
    pub fn herm_exp(&self) -> Result<AlgElement> {
        self.herm_fn(|v| C64::from(v.exp()))
    }

    /// Matrix logarithm of a strictly positive element.
    pub fn herm_ln(&self) -> Result<AlgElement> {
        let min = self.min_eigenvalue()?;
        if min <= 0.0 {
            return Err(Error::NotPositive { min_eig: min });
        }
        self.herm_fn(|v| C64::from(v.ln()))
    }

    /// Coordinates: blocks in order, each row-major.
    pub fn to_vec(&self) -> CVec {
        let mut v = CVec::zeros(self.algebra.vec_dim());
        let mut off = 0;
        for (m, b) in self.blocks.iter().zip(self.algebra.blocks.iter()) {
            for i in 0..b.dim {
                for j in 0..b.dim {
                    v[off + i * b.dim + j] = m[(i, j)];
                }
            }
            off += b.dim * b.dim;
        }
        v
    }

    /// Normalizes a positive element to unit weighted trace.
    pub fn normalized_state(&self) -> Result<AlgElement> {
        let t = self.trace_re();
        if t <= 0.0 {
            return Err(Error::NotPositive { min_eig: t });
        }
        Ok(self.scale_re(1.0 / t))
    }

    /// Tensor product of single-block elements.
    pub fn tensor(&self, other: &AlgElement) -> Result<AlgElement> {
        let alg = self.algebra.tensor(&other.algebra)?;
        let m = linalg::kron(self.as_single_block()?, other.as_single_block()?);
        alg.element(vec![m])
    }

    /// Max entrywise distance, for test assertions.
    pub fn max_abs_diff(&self, other: &AlgElement) -> Result<f64> {
        self.same_algebra(other)?;
        let mut m: f64 = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            m = m.max((a - b).iter().map(|e| e.norm()).fold(0.0, f64::max));
        }
        Ok(m)
    }
}
