//! Truncated-window numerics for loop Hodge structures.
//!
//! The library models, at finite Laurent-window scale, the objects that
//! tie harmonic bundles to loop-group geometry:
//!
//! - [`laurent`] — matrix-valued finite Laurent series: the loop algebra
//!   Λ𝔤 and loop group ΛG, the twisted involution σ̂, the Λ_σ + Λ⁺
//!   splitting, Sobolev norms, the complex structure J and the horizontal
//!   band of the period domain's tangent space.
//! - [`krein`] — the truncated Krein-space model of L²(S¹, ℂⁿ): the
//!   indefinite form B, the right shift T, outgoing-subspace axioms, the
//!   canonical isomorphism, the classical (graded) Hodge embedding, and
//!   the shift-commutant / B-isometry characterizations.
//! - [`harmonic`] — discrete harmonic bundles on lattice patches and
//!   tori: Hitchin residuals, the circle of connections D_λ, Hitchin
//!   energy, the circle action, non-polarized pairs, Higgs kernel maps.
//! - [`transport`] — parallel transport of the λ-dependent flat
//!   connection, monodromy, period cosets, differentials of the period
//!   map and coefficient-decay diagnostics.
//! - [`cocycle`] — the fundamental 2-cocycle, its identities and reality,
//!   the determinant-line curvature, horizontal definiteness and the
//!   energy–curvature relation.
//! - [`report`] — named residuals with tolerances and verdicts, plus the
//!   convention ledger all signed quantities refer to.
//!
//! All values are immutable after construction and all operations are
//! pure, so everything here is safe to share across threads.

pub mod cocycle;
pub mod error;
pub mod harmonic;
pub mod krein;
pub mod laurent;
pub mod mat;
pub mod report;
pub mod sample;
pub mod transport;

pub use error::{Error, Result};
pub use laurent::{LaurentMatrix, DEFAULT_TOL};
pub use report::Report;
