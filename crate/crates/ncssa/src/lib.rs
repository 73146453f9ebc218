//! Finite-dimensional von Neumann algebras, quantum channels, and the
//! entropic constants that govern uncertainty-type inequalities between them.
//!
//! The crate works with direct sums of full matrix blocks `⊕_k M_{d_k}`
//! carrying weighted traces `τ(x) = Σ_k w_k tr(x_k)`. On top of that sit
//! quantum channels (stored as coordinate matrices with completely-positive /
//! trace-preserving validation), trace-adjoint conditional expectations for
//! subalgebra inclusions, entropy and noncommutative L_p machinery, and the
//! overlap constants that appear on the right-hand side of sum-of-entropies
//! inequalities.
//!
//! Everything is sized for desk-scale experiments (total dimensions in the
//! tens), favouring dense linear algebra and Hermitian eigendecompositions
//! over sparse or structured shortcuts.

pub mod algebra;
pub mod channel;
pub mod constants;
pub mod entropy;
pub mod error;
pub mod inclusion;
pub mod linalg;
pub mod norms;
pub mod quad;
pub mod random;
pub mod schema;
pub mod sdp;
pub mod verify;

pub use algebra::{AlgElement, Algebra, Block};
pub use channel::{Channel, ChannelFlags, Povm};
pub use error::{Error, Result};
pub use inclusion::Inclusion;
