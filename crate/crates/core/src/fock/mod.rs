//! Exact second quantization on small truncated mode sets.
//!
//! Modes are the holes `B_F` followed by the particles
//! `{p : k_F² < |p|² ≤ Λ²}`, each block in the global mode order. A
//! configuration is a `u64` bitset over that list; bit `i` set means mode `i`
//! is occupied (a hole is present, or a particle is present). Signs follow
//! the convention `a*_i |c⟩ = (−1)^{#occupied j < i} |c ∪ {i}⟩`.

mod modes;
mod ops;
mod state;
mod verify;


pub use modes::{ModeSet, MAX_MODES};
pub use ops::{
    apply_annihilate, apply_c_annihilate, apply_c_create, apply_create, apply_h0, apply_number,
    apply_pair_annihilate, apply_pair_create, Normalization,
};
pub use state::{Config, SectorState};
pub use verify::{
    random_state, verify_almost_ccr, verify_c_commutator, verify_quadratic_interaction,
    ModeSetSummary, QuadraticInteraction, SinglePairExpectation, VerificationReport, Violation,
};
