//! Linear maps between algebras, with quantum channels as the validated case.
//!
//! A [`Channel`] stores the dense coordinate matrix of a linear map with
//! respect to the matrix-unit bases of its input and output algebras. Kraus
//! families, POVMs, partial traces, and embeddings are constructors only;
//! everything downstream (composition, adjoints, Choi matrices) works on the
//! coordinate matrix. Complete positivity, trace compatibility, and unitality
//! are computed once at construction and exposed as flags.
//!
//! The adjoint is always the trace-pairing adjoint
//! `τ_out(Φ(x) b) = τ_in(x Φ†(b))`, which accounts for the block weights of
//! both algebras. Adjoints of channels with respect to weighted traces are
//! how conditional expectations and the constants of the uncertainty
//! inequalities enter.


use crate::algebra::{AlgElement, Algebra};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, CMat, CVec};

/// Validation tolerance for channel structure flags (CP, trace, unitality).
pub const CHANNEL_TOL: f64 = 1e-10;

/// Structure flags computed at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChannelFlags {
    /// Choi matrices of all block-pair components are PSD.
    pub cp: bool,
    /// `τ_out(Φ(x)) = τ_in(x)` on a basis.
    pub trace_preserving: bool,
    /// `Φ(1) = 1`.
    pub unital: bool,
    /// `Φ(x*) = Φ(x)*` on a basis.
    pub herm_preserving: bool,
}

/// A linear map between two algebras in matrix-unit coordinates.
#[derive(Clone, Debug)]
pub struct Channel {
    input: Algebra,
    output: Algebra,
    coord: CMat,
    flags: ChannelFlags,
}

impl Channel {
    /// Wraps a coordinate matrix (rows: output coordinates, columns: input).
    pub fn from_coord(input: Algebra, output: Algebra, coord: CMat) -> Result<Self> {
        if coord.nrows() != output.vec_dim() || coord.ncols() != input.vec_dim() {
            return Err(Error::shape(format!(
                "coordinate matrix is {}x{}, expected {}x{}",
                coord.nrows(),
                coord.ncols(),
                output.vec_dim(),
                input.vec_dim()
            )));
        }
        let flags = compute_flags(&input, &output, &coord)?;
        Ok(Channel { input, output, coord, flags })
    }

    /// Builds the coordinate matrix by applying `f` to every matrix unit.
    pub fn from_fn(
        input: Algebra,
        output: Algebra,
        f: impl Fn(&AlgElement) -> Result<AlgElement>,
    ) -> Result<Self> {
        let mut coord = CMat::zeros(output.vec_dim(), input.vec_dim());
        for (col, (k, i, j)) in input.basis_indices().enumerate() {
            let y = f(&input.matrix_unit(k, i, j))?;
            if y.algebra() != &output {
                return Err(Error::shape("map produced an element of the wrong algebra"));
            }
            coord.set_column(col, &y.to_vec());
        }
        Channel::from_coord(input, output, coord)
    }

    /// Kraus-form channel `x ↦ Σ_i K_i x K_i*` between single full blocks.
    pub fn from_kraus(input: Algebra, output: Algebra, kraus: &[CMat]) -> Result<Self> {
        if !input.is_single_full_block() || !output.is_single_full_block() {
            return Err(Error::Unsupported("Kraus form needs single full blocks".into()));
        }
        let din = input.blocks()[0].dim;
        let dout = output.blocks()[0].dim;
        if kraus.is_empty() {
            return Err(Error::InvalidChannel("empty Kraus family".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != dout || k.ncols() != din {
                return Err(Error::shape(format!(
                    "Kraus operator {i} is {}x{}, expected {dout}x{din}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let out_alg = output.clone();
        Channel::from_fn(input, output, move |x| {
            let xm = x.as_single_block()?;
            let mut acc = CMat::zeros(dout, dout);
            for k in kraus {
                acc += k * xm * k.adjoint();
            }
            out_alg.element(vec![acc])
        })
    }

    /// Identity map on an algebra.
    pub fn identity(alg: &Algebra) -> Self {
        let n = alg.vec_dim();
        let flags = ChannelFlags {
            cp: true,
            trace_preserving: true,
            unital: true,
            herm_preserving: true,
        };
        Channel { input: alg.clone(), output: alg.clone(), coord: CMat::identity(n, n), flags }
    }

    /// The weighted trace as a channel into `ℂ` with `τ(1) = 1`.
    pub fn trace_channel(alg: &Algebra) -> Result<Self> {
        let out = Algebra::scalar(1.0);
        Channel::from_fn(alg.clone(), out.clone(), |x| {
            let mut y = out.zero();
            y.block_mut(0)[(0, 0)] = x.trace();
            Ok(y)
        })
    }

    pub fn input(&self) -> &Algebra {
        &self.input
    }

    pub fn output(&self) -> &Algebra {
        &self.output
    }

    pub fn coord(&self) -> &CMat {
        &self.coord
    }

    pub fn flags(&self) -> ChannelFlags {
        self.flags
    }

    pub fn is_cptp(&self) -> bool {
        self.flags.cp && self.flags.trace_preserving
    }

    pub fn apply(&self, x: &AlgElement) -> Result<AlgElement> {
        if x.algebra() != &self.input {
            return Err(Error::shape("element is not in the channel input algebra"));
        }
        let v: CVec = &self.coord * x.to_vec();
        self.output.from_vec(&v)
    }

    /// `self ∘ inner`, applying `inner` first.
    pub fn compose(&self, inner: &Channel) -> Result<Channel> {
        if inner.output != self.input {
            return Err(Error::shape(
                "composition mismatch: inner output differs from outer input",
            ));
        }
        Channel::from_coord(inner.input.clone(), self.output.clone(), &self.coord * &inner.coord)
    }

    /// Trace-pairing adjoint `Φ†` with `τ_out(Φ(x) b) = τ_in(x Φ†(b))`.
    pub fn adjoint(&self) -> Channel {
        let p_in = transpose_perm(&self.input);
        let p_out = transpose_perm(&self.output);
        let d_in_inv = weight_diag(&self.input, true);
        let d_out = weight_diag(&self.output, false);
        let coord = &p_in * d_in_inv * self.coord.transpose() * d_out * &p_out;
        let flags = compute_flags(&self.output, &self.input, &coord)
            .expect("adjoint coordinate matrix has valid shape");
        Channel { input: self.output.clone(), output: self.input.clone(), coord, flags }
    }

    /// Tensor product of maps between single full blocks.
    pub fn tensor(&self, other: &Channel) -> Result<Channel> {
        let input = self.input.tensor(&other.input)?;
        let output = self.output.tensor(&other.output)?;
        let d1 = self.input.blocks()[0].dim;
        let d2 = other.input.blocks()[0].dim;
        let mut coord = CMat::zeros(output.vec_dim(), input.vec_dim());
        // Input basis in vec order: e_{(i d2 + k),(j d2 + l)} = e_ij ⊗ e_kl.
        let mut col = 0;
        for i in 0..d1 {
            for k in 0..d2 {
                for j in 0..d1 {
                    for l in 0..d2 {
                        let y1 = self.apply(&self.input.matrix_unit(0, i, j))?;
                        let y2 = other.apply(&other.input.matrix_unit(0, k, l))?;
                        let m = linalg::kron(y1.as_single_block()?, y2.as_single_block()?);
                        coord.set_column(col, &output.element(vec![m])?.to_vec());
                        col += 1;
                    }
                }
            }
        }
        Channel::from_coord(input, output, coord)
    }

    /// `Φ ⊗ id_C` for a side factor of dimension `c_dim`.
    pub fn tensor_id_right(&self, c_dim: usize) -> Result<Channel> {
        self.tensor(&Channel::identity(&Algebra::full(c_dim)))
    }

    /// Choi matrix `Σ_ij e_ij ⊗ Φ(e_ij)` for single-full-block input/output.
    pub fn choi_matrix(&self) -> Result<CMat> {
        if !self.input.is_single_full_block() || !self.output.is_single_full_block() {
            return Err(Error::Unsupported(
                "Choi matrix needs single full blocks on both sides".into(),
            ));
        }
        let din = self.input.blocks()[0].dim;
        let dout = self.output.blocks()[0].dim;
        let mut choi = CMat::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let y = self.apply(&self.input.matrix_unit(0, i, j))?;
                let mut e = CMat::zeros(din, din);
                e[(i, j)] = C64::from(1.0);
                choi += linalg::kron(&e, y.as_single_block()?);
            }
        }
        let _ = dout;
        Ok(choi)
    }
}

/// Permutation matrix sending `vec(x)` to `vec(xᵀ)`.
fn transpose_perm(alg: &Algebra) -> CMat {
    let n = alg.vec_dim();
    let mut p = CMat::zeros(n, n);
    for (k, b) in alg.blocks().iter().enumerate() {
        let off = alg.block_offset(k);
        for i in 0..b.dim {
            for j in 0..b.dim {
                p[(off + i * b.dim + j, off + j * b.dim + i)] = C64::from(1.0);
            }
        }
    }
    p
}

/// Diagonal of block weights on coordinates, optionally inverted.
fn weight_diag(alg: &Algebra, invert: bool) -> CMat {
    let n = alg.vec_dim();
    let mut d = CMat::zeros(n, n);
    for (k, b) in alg.blocks().iter().enumerate() {
        let off = alg.block_offset(k);
        let w = if invert { 1.0 / b.weight } else { b.weight };
        for t in 0..b.dim * b.dim {
            d[(off + t, off + t)] = C64::from(w);
        }
    }
    d
}

fn compute_flags(input: &Algebra, output: &Algebra, coord: &CMat) -> Result<ChannelFlags> {
    let apply = |x: &AlgElement| -> Result<AlgElement> {
        let v: CVec = coord * x.to_vec();
        output.from_vec(&v)
    };

    // Hermiticity preservation and trace compatibility on the basis.
    let mut herm = true;
    let mut tp = true;
    for (k, i, j) in input.basis_indices() {
        let e = input.matrix_unit(k, i, j);
        let y = apply(&e)?;
        let y_star = apply(&e.adjoint())?;
        if y.adjoint().max_abs_diff(&y_star)? > CHANNEL_TOL {
            herm = false;
        }
        if (y.trace() - e.trace()).norm() > CHANNEL_TOL * (1.0 + e.trace().norm()) {
            tp = false;
        }
        if !herm && !tp {
            break;
        }
    }

    let unital = apply(&input.identity())?.max_abs_diff(&output.identity())? <= CHANNEL_TOL;

    // Complete positivity: the Choi matrix of every block-pair component of
    // the map must be PSD. For multi-block algebras positivity of each
    // component is equivalent to positivity of the whole amplified map.
    let mut cp = true;
    'outer: for (kin, bin) in input.blocks().iter().enumerate() {
        for (kout, bout) in output.blocks().iter().enumerate() {
            let d = bin.dim;
            let c = bout.dim;
            let mut choi = CMat::zeros(d * c, d * c);
            for i in 0..d {
                for j in 0..d {
                    let y = apply(&input.matrix_unit(kin, i, j))?;
                    let mut e = CMat::zeros(d, d);
                    e[(i, j)] = C64::from(1.0);
                    choi += linalg::kron(&e, y.block(kout));
                }
            }
            if linalg::herm_defect(&choi) > CHANNEL_TOL * 10.0 {
                cp = false;
                break 'outer;
            }
            let scale = linalg::op_norm_herm(&choi)?.max(1.0);
            if linalg::lambda_min(&choi)? < -CHANNEL_TOL * scale {
                cp = false;
                break 'outer;
            }
        }
    }

    Ok(ChannelFlags { cp, trace_preserving: tp, unital, herm_preserving: herm })
}

/// A positive operator-valued measure on `M_d`.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    effects: Vec<CMat>,
}

impl Povm {
    /// Validates positivity of each effect and completeness `Σ E_x = 1`.
    pub fn new(effects: Vec<CMat>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::input("POVM needs at least one effect"));
        }
        let dim = effects[0].nrows();
        let mut sum = CMat::zeros(dim, dim);
        for (x, e) in effects.iter().enumerate() {
            if e.nrows() != dim || e.ncols() != dim {
                return Err(Error::shape(format!("effect {x} has mismatched shape")));
            }
            if linalg::herm_defect(e) > 1e-12 {
                return Err(Error::NotHermitian { defect: linalg::herm_defect(e) });
            }
            let min = linalg::lambda_min(e)?;
            if min < -1e-12 {
                return Err(Error::NotPositive { min_eig: min });
            }
            sum += e;
        }
        let defect = (&sum - linalg::eye(dim)).iter().map(|e| e.norm()).fold(0.0, f64::max);
        if defect > CHANNEL_TOL {
            return Err(Error::InvalidChannel(format!(
                "POVM effects sum to identity with defect {defect:.3e}"
            )));
        }
        Ok(Povm { dim, effects })
    }

    /// Projective measurement in an orthonormal basis given by unitary columns.
    pub fn from_basis(u: &CMat) -> Result<Self> {
        let d = u.nrows();
        let effects = (0..d)
            .map(|i| {
                let col = u.column(i);
                let mut e = CMat::zeros(d, d);
                for r in 0..d {
                    for c in 0..d {
                        e[(r, c)] = col[r] * col[c].conj();
                    }
                }
                e
            })
            .collect();
        Povm::new(effects)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn effects(&self) -> &[CMat] {
        &self.effects
    }

    pub fn num_outcomes(&self) -> usize {
        self.effects.len()
    }
}

/// Measurement channel `ρ ↦ (tr(E_x ρ))_x` into the commutative algebra `ℂ^X`.
pub fn povm_channel(povm: &Povm) -> Result<Channel> {
    let input = Algebra::full(povm.dim());
    let output = Algebra::classical(povm.num_outcomes());
    let effects = povm.effects().to_vec();
    Channel::from_fn(input, output.clone(), move |x| {
        let xm = x.as_single_block()?;
        let mut y = output.zero();
        for (i, e) in effects.iter().enumerate() {
            y.block_mut(i)[(0, 0)] = (e * xm).trace();
        }
        Ok(y)
    })
}

/// Dephasing in the measurement bases: `ρ ↦ Σ_x E_x ρ E_x` for projective POVMs.
pub fn dephasing_channel(povm: &Povm) -> Result<Channel> {
    let alg = Algebra::full(povm.dim());
    Channel::from_kraus(alg.clone(), alg, povm.effects())
}

/// Partial trace over the right factor, `M_{da·db} → M_da`.
pub fn partial_trace_right_channel(da: usize, db: usize) -> Result<Channel> {
    let input = Algebra::full(da * db);
    let output = Algebra::full(da);
    Channel::from_fn(input, output.clone(), move |x| {
        let m = ptrace_right(x.as_single_block()?, da, db);
        output.element(vec![m])
    })
}

/// Partial trace over the left factor, `M_{da·db} → M_db`.
pub fn partial_trace_left_channel(da: usize, db: usize) -> Result<Channel> {
    let input = Algebra::full(da * db);
    let output = Algebra::full(db);
    Channel::from_fn(input, output.clone(), move |x| {
        let m = ptrace_left(x.as_single_block()?, da, db);
        output.element(vec![m])
    })
}

/// Traces out the right factor of a `da·db` square matrix.
pub fn ptrace_right(x: &CMat, da: usize, db: usize) -> CMat {
    let mut y = CMat::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut s = C64::from(0.0);
            for k in 0..db {
                s += x[(i * db + k, j * db + k)];
            }
            y[(i, j)] = s;
        }
    }
    y
}

/// Traces out the left factor of a `da·db` square matrix.
pub fn ptrace_left(x: &CMat, da: usize, db: usize) -> CMat {
    let mut y = CMat::zeros(db, db);
    for k in 0..db {
        for l in 0..db {
            let mut s = C64::from(0.0);
            for i in 0..da {
                s += x[(i * db + k, i * db + l)];
            }
            y[(k, l)] = s;
        }
    }
    y
}

/// Lifts classical (commutative) legs of a map to full matrix algebras.
///
/// A commutative input `ℂ^n` is precomposed with the diagonal compression
/// `M_n → ℂ^n`; a commutative output is postcomposed with the diagonal
/// embedding `ℂ^n → M_n`. Both are completely positive trace-compatible
/// maps, and the completely bounded norm of the lifted map equals that of
/// the original, so Choi-norm computations on the lift are faithful.
pub fn classical_lift(ch: &Channel) -> Result<Channel> {
    let mut lifted = ch.clone();
    if lifted.input().is_commutative() && lifted.input().num_blocks() > 1 {
        let n = lifted.input().num_blocks();
        let full = Algebra::full(n);
        let classical = lifted.input().clone();
        let compress = Channel::from_fn(full, classical.clone(), move |x| {
            let m = x.as_single_block()?;
            let mut y = classical.zero();
            for i in 0..classical.num_blocks() {
                y.block_mut(i)[(0, 0)] = m[(i, i)];
            }
            Ok(y)
        })?;
        lifted = lifted.compose(&compress)?;
    }
    if lifted.output().is_commutative() && lifted.output().num_blocks() > 1 {
        let n = lifted.output().num_blocks();
        let full = Algebra::full(n);
        let classical = lifted.output().clone();
        let embed = Channel::from_fn(classical, full.clone(), move |x| {
            let mut m = CMat::zeros(n, n);
            for i in 0..x.algebra().num_blocks() {
                m[(i, i)] = x.block(i)[(0, 0)];
            }
            full.element(vec![m])
        })?;
        lifted = embed.compose(&lifted)?;
    }
    Ok(lifted)
}
