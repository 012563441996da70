//! Hartree–Fock energy of the plane-wave Slater determinant.
//!
//! With `V(x) = Σ_k V̂(k) e^{ikx}` on the torus `[0, 2π]³` the functional
//! evaluated on the Fermi ball reduces to lattice sums:
//!
//! * kinetic  `ħ² Σ_{h ∈ B_F} |h|²`
//! * direct   `(1/N) ∫∫ V(x−y) ρ(x) ρ(y) = N V̂(0)`, since `ρ = N/(2π)³`
//! * exchange `(1/N) ∫∫ V(x−y) |ω(x;y)|² = (1/N) Σ_{h,h' ∈ B_F} V̂(h−h')`
//!
//! and the total is kinetic + direct − exchange. Both interaction terms carry
//! the prefactor `1/N` as written in the functional; `half_prefactor` switches
//! to the `1/(2N)` that a pair sum over `i < j` would give.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{FermiBall, ModelParams};
use crate::potential::Potential;
use crate::sum::{ordered_sum, par_ordered_sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HFEnergy {
    pub kinetic: f64,
    pub direct: f64,
    pub exchange: f64,
    pub total: f64,
}

pub fn hf_energy(ball: &FermiBall, v: &Potential, params: &ModelParams) -> Result<HFEnergy> {
    hf_energy_with(ball, v, params, false)
}

pub fn hf_energy_with(
    ball: &FermiBall,
    v: &Potential,
    params: &ModelParams,
    half_prefactor: bool,
) -> Result<HFEnergy> {
    if ball.n() != params.n() {
        return Err(Error::ShapeMismatch {
            ball: ball.n(),
            params: params.n(),
        });
    }
    let n = params.n() as f64;
    let hbar = params.hbar();
    let norm_sum: i64 = ball.modes().iter().map(|h| h.norm_sq()).sum();
    let kinetic = hbar * hbar * norm_sum as f64;

    let prefactor = if half_prefactor { 0.5 } else { 1.0 };
    let direct = prefactor * n * v.get(&crate::Momentum::ZERO);
    let exchange = prefactor * exchange_sum(ball, v) / n;
    Ok(HFEnergy {
        kinetic,
        direct,
        exchange,
        total: kinetic + direct - exchange,
    })
}

/// `Σ_{h,h' ∈ B_F} V̂(h − h')`, iterating `h ∈ B_F` and `k` over the support.
pub fn exchange_sum(ball: &FermiBall, v: &Potential) -> f64 {
    let support: Vec<_> = v.iter().collect();
    let per_hole: Vec<f64> = ball
        .modes()
        .par_iter()
        .map(|h| {
            ordered_sum(
                support
                    .iter()
                    .filter(|(k, _)| ball.contains(&(*h + *k)))
                    .map(|&(_, c)| c),
            )
        })
        .collect();
    par_ordered_sum(&per_hole)
}

/// `‖X‖ <= (1/N) (2π)^{−3/2} Σ_k |V̂(k)|` for the exchange operator.
pub fn exchange_norm_bound(v: &Potential, n: u64) -> f64 {
    v.l1_norm() * (2.0 * std::f64::consts::PI).powf(-1.5) / n as f64
}

/// Continuum limit of `kinetic / N`: `(4π/5)(3/(4π))^{5/3}`.
pub fn kinetic_density_limit() -> f64 {
    use std::f64::consts::PI;
    4.0 * PI / 5.0 * (3.0 / (4.0 * PI)).powf(5.0 / 3.0)
}
