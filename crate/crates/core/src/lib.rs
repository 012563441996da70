//! Correlation energy of the spinless three-dimensional Fermi gas in the
//! mean-field scaling limit, computed from completely delocalized
//! quasi-bosonic particle-hole pairs.
//!
//! The crate covers:
//!
//! * exact lattice quantities of the closed-shell Fermi ball ([`lattice`]),
//! * the interaction in Fourier space ([`potential`]),
//! * the Hartree–Fock energy of the plane-wave state ([`hf`]),
//! * the closed-form Bogoliubov minimizer over delocalized kernels
//!   ([`rpa_delocalized`]) and the optimal ring-diagram energy it is compared
//!   against ([`rpa_optimal`]),
//! * explicit error-constant budgets ([`error_budget`]),
//! * an exact second-quantization engine on small truncated mode sets that
//!   checks the pair-operator algebra by brute force ([`fock`]).
//!
//! Energies are dimensionless, with `hbar = N^{-1/3}` and coupling `1/N`.

pub mod config;
pub mod error;
pub mod error_budget;
pub mod fock;
pub mod hf;
pub mod lattice;
pub mod momentum;
pub mod potential;
pub mod quadrature;
pub mod report;
pub mod rpa_delocalized;
pub mod rpa_optimal;
pub mod sum;

pub use error::{Error, Result};
pub use lattice::{FermiBall, KineticCoefficient, LuneCount, ModelParams};
pub use momentum::Momentum;
pub use potential::Potential;
pub use rpa_delocalized::{Backend, BogoliubovKernel, QuadraticCoefficients};
