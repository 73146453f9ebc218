//! Subalgebra inclusions `N ⊂ M` and their conditional expectations.
//!
//! An [`Inclusion`] owns a validated unital *-homomorphism `ι: N → M` and the
//! trace-pairing adjoint `E_N: M → N`, fixed by
//! `τ_M(ι(y) x) = τ_N(y E_N(x))` for all `y ∈ N`. `E_N` is completely
//! positive and satisfies `τ_N(E_N(x)) = τ_M(x)` for arbitrary block weights
//! on either side. The projection property `E_N ∘ ι = id` holds exactly when
//! the sub-trace is the induced one `τ_N = τ_M ∘ ι`; [`Inclusion::has_induced_trace`]
//! reports which case an instance is in, and callers that require a genuine
//! conditional expectation (commuting-square detection, for one) check it.
//!
//! The weight element `σ_tr = E_N(1_M)` is the density of `τ_M ∘ ι` with
//! respect to `τ_N`; it is central in `N` and equals the identity exactly in
//! the induced-trace case.

use crate::algebra::{AlgElement, Algebra};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Validation tolerance for the homomorphism and adjoint identities.
pub const INCLUSION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Inclusion {
    sub: Algebra,
    ambient: Algebra,
    embed: Channel,
    cond_exp: Channel,
    weight: AlgElement,
}

impl Inclusion {
    /// Validates `embed` as a unital injective *-homomorphism and derives the
    /// conditional expectation and weight.
    pub fn from_embed(embed: Channel) -> Result<Self> {
        let sub = embed.input().clone();
        let ambient = embed.output().clone();

        let flags = embed.flags();
        if !flags.unital {
            return Err(Error::InvalidInclusion("embedding is not unital".into()));
        }
        if !flags.herm_preserving {
            return Err(Error::InvalidInclusion("embedding is not *-preserving".into()));
        }

        // Multiplicativity on all basis pairs.
        let basis: Vec<AlgElement> =
            sub.basis_indices().map(|(k, i, j)| sub.matrix_unit(k, i, j)).collect();
        for x in &basis {
            let ix = embed.apply(x)?;
            for y in &basis {
                let lhs = embed.apply(&x.mul(y)?)?;
                let rhs = ix.mul(&embed.apply(y)?)?;
                if lhs.max_abs_diff(&rhs)? > INCLUSION_TOL {
                    return Err(Error::InvalidInclusion(
                        "embedding is not multiplicative".into(),
                    ));
                }
            }
        }

        // Injectivity: the coordinate matrix must have full column rank. For
        // a *-homomorphism the Gram matrix J*J is PSD; a vanishing eigenvalue
        // means a killed central summand.
        let j = embed.coord();
        let gram = j.adjoint() * j;
        if linalg::lambda_min(&gram)? < INCLUSION_TOL {
            return Err(Error::InvalidInclusion("embedding kills part of the subalgebra".into()));
        }

        let cond_exp = embed.adjoint();
        let weight = cond_exp.apply(&ambient.identity())?;
        Ok(Inclusion { sub, ambient, embed, cond_exp, weight })
    }

    /// The scalars `ℂ` with `τ_R(1) = unit_trace`, embedded as multiples of `1_M`.
    pub fn trivial(ambient: &Algebra, unit_trace: f64) -> Result<Self> {
        let sub = Algebra::scalar(unit_trace);
        let amb = ambient.clone();
        let embed = Channel::from_fn(sub, ambient.clone(), move |x| {
            Ok(amb.identity().scale(x.block(0)[(0, 0)]))
        })?;
        Inclusion::from_embed(embed)
    }

    /// The scalars with the induced trace `τ_R(1) = τ_M(1)`.
    pub fn trivial_induced(ambient: &Algebra) -> Result<Self> {
        Inclusion::trivial(ambient, ambient.trace_of_identity())
    }

    /// Diagonal matrices `ℂ^d ⊂ M_d` (weights 1 on both sides, induced).
    pub fn diagonal(d: usize) -> Result<Self> {
        let sub = Algebra::classical(d);
        let ambient = Algebra::full(d);
        let amb = ambient.clone();
        let embed = Channel::from_fn(sub, ambient.clone(), move |x| {
            let mut m = CMat::zeros(d, d);
            for i in 0..d {
                m[(i, i)] = x.block(i)[(0, 0)];
            }
            amb.element(vec![m])
        })?;
        Inclusion::from_embed(embed)
    }

    /// Left tensor factor `M_da ⊗ 1 ⊂ M_{da·db}` with a chosen sub-trace weight.
    ///
    /// `weight = db` gives the induced trace; `weight = 1` gives the plain
    /// matrix trace on the factor.
    pub fn factor_left(da: usize, db: usize, weight: f64) -> Result<Self> {
        let sub = Algebra::new(vec![crate::algebra::Block { dim: da, weight }])?;
        let ambient = Algebra::full(da * db);
        let amb = ambient.clone();
        let embed = Channel::from_fn(sub, ambient.clone(), move |x| {
            let m = linalg::kron(x.as_single_block()?, &linalg::eye(db));
            amb.element(vec![m])
        })?;
        Inclusion::from_embed(embed)
    }

    /// Right tensor factor `1 ⊗ M_db ⊂ M_{da·db}` with a chosen sub-trace weight.
    pub fn factor_right(da: usize, db: usize, weight: f64) -> Result<Self> {
        let sub = Algebra::new(vec![crate::algebra::Block { dim: db, weight }])?;
        let ambient = Algebra::full(da * db);
        let amb = ambient.clone();
        let embed = Channel::from_fn(sub, ambient.clone(), move |x| {
            let m = linalg::kron(&linalg::eye(da), x.as_single_block()?);
            amb.element(vec![m])
        })?;
        Inclusion::from_embed(embed)
    }

    /// Conjugates the embedding by a unitary of the (single-block) ambient.
    pub fn conjugate(&self, u: &CMat) -> Result<Self> {
        if !self.ambient.is_single_full_block() {
            return Err(Error::Unsupported("conjugation needs a single-block ambient".into()));
        }
        let d = self.ambient.blocks()[0].dim;
        if u.nrows() != d || u.ncols() != d {
            return Err(Error::shape(format!("unitary is {}x{}, ambient is {d}", u.nrows(), u.ncols())));
        }
        let udag = u.adjoint();
        let defect = (&udag * u - linalg::eye(d)).iter().map(|e| e.norm()).fold(0.0, f64::max);
        if defect > 1e-8 {
            return Err(Error::input(format!("conjugator is not unitary, defect {defect:.3e}")));
        }
        let base = self.embed.clone();
        let amb = self.ambient.clone();
        let u = u.clone();
        let embed = Channel::from_fn(self.sub.clone(), self.ambient.clone(), move |x| {
            let m = base.apply(x)?;
            amb.element(vec![&u * m.as_single_block()? * u.adjoint()])
        })?;
        Inclusion::from_embed(embed)
    }

    /// Composes `R ⊂ A` (self) with `A ⊂ M` (outer) into `R ⊂ M`.
    pub fn compose(&self, outer: &Inclusion) -> Result<Self> {
        if self.ambient != *outer.sub() {
            return Err(Error::shape(
                "inner inclusion's ambient differs from outer inclusion's subalgebra",
            ));
        }
        Inclusion::from_embed(outer.embed.compose(&self.embed)?)
    }

    pub fn sub(&self) -> &Algebra {
        &self.sub
    }

    pub fn ambient(&self) -> &Algebra {
        &self.ambient
    }

    pub fn embed(&self) -> &Channel {
        &self.embed
    }

    /// The trace-pairing conditional expectation `E_N: M → N`.
    pub fn cond_exp(&self) -> &Channel {
        &self.cond_exp
    }

    /// `σ_tr = E_N(1_M)`, the density of `τ_M ∘ ι` with respect to `τ_N`.
    pub fn weight(&self) -> &AlgElement {
        &self.weight
    }

    /// Whether `τ_N = τ_M ∘ ι` on a basis of the subalgebra.
    pub fn has_induced_trace(&self) -> bool {
        self.weight.max_abs_diff(&self.sub.identity()).unwrap_or(f64::INFINITY) <= INCLUSION_TOL
    }

    /// `ι ∘ E_N` as an idempotent map on the ambient algebra.
    pub fn projection_channel(&self) -> Result<Channel> {
        self.embed.compose(&self.cond_exp)
    }
}
