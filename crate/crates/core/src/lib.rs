//! Jacob's ladders for the Riemann zeta function.
//!
//! The crate evaluates Hardy's Z-function, integrates Z² with a checkpointed
//! cache, solves the ladder equation K(φ(T)) = ∫₀ᵀ Z² for φ, and checks the
//! substitution identity and the asymptotic formulas built on the iterates φ₁ᵏ.

pub mod ladder;
pub mod quad;
pub mod roots;
pub mod verify;
pub mod zeta;

pub use quad::{CumulativeCache, Estimate, QuadConfig, QuadError};
pub use zeta::{EvalConfig, SignalSample, ZetaError};
