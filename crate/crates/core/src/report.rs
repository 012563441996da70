//! Assembled energy comparison for one particle number.

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::error_budget::{epsilon_bounds, ln_crossover, optimal_kernel_magnitudes};
use crate::hf::{hf_energy_with, HFEnergy};
use crate::lattice::build_fermi_ball;
use crate::potential::Potential;
use crate::rpa_delocalized::{coefficients_for, minimum_energy, second_order_delocalized, Backend};
use crate::rpa_optimal::{gmb_correlation, second_order_optimal};

/// Log-space error bounds for the asymptotic backend.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorSummary {
    pub c3: f64,
    pub ln_eps1: f64,
    pub ln_eps2: f64,
    pub ln_quartic: f64,
    pub ln_total: f64,
    pub ln_total_times_n: f64,
    /// `log |corr_delocalized_exact|`.
    pub ln_signal: f64,
    /// Whether the certified bound is below the signal at this `N`.
    pub certified: bool,
    pub ln_n0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub n: u64,
    pub hbar: f64,
    pub potential_digest: String,
    pub hf: HFEnergy,
    pub corr_delocalized_exact: f64,
    pub corr_delocalized_asymptotic: f64,
    pub corr_optimal: f64,
    /// Asymptotic second-order delocalized energy.
    pub so_delocalized: f64,
    pub so_delocalized_exact: f64,
    pub so_optimal: f64,
    /// `so_delocalized / so_optimal`, absent when either vanishes.
    pub so_ratio: Option<f64>,
    pub error_budget: ErrorSummary,
}

pub fn energy_report(n: u64, v: &Potential, cfg: &RunConfig) -> Result<EnergyReport> {
    let ball = build_fermi_ball(n)?;
    let params = ball.params();
    let exact = Backend::Exact(&ball);
    let asym = Backend::Asymptotic(params);

    let hf = hf_energy_with(&ball, v, &params, cfg.hf_half_prefactor)?;
    let corr_delocalized_exact = minimum_energy(&coefficients_for(exact, v)?)?;
    let corr_delocalized_asymptotic = minimum_energy(&coefficients_for(asym, v)?)?;
    let corr_optimal = gmb_correlation(v, &params, cfg.tol)?.total;
    let so_delocalized = second_order_delocalized(asym, v)?;
    let so_delocalized_exact = second_order_delocalized(exact, v)?;
    let so_optimal = second_order_optimal(v, &params);
    let so_ratio =
        (so_delocalized != 0.0 && so_optimal != 0.0).then(|| so_delocalized / so_optimal);

    let xi = optimal_kernel_magnitudes(v, asym)?;
    let b = epsilon_bounds(asym, v, &xi)?;
    let ln_signal = corr_delocalized_exact.abs().ln();
    let error_budget = ErrorSummary {
        c3: b.c3,
        ln_eps1: b.ln_eps1,
        ln_eps2: b.ln_eps2,
        ln_quartic: b.lines.ln_quartic,
        ln_total: b.ln_total,
        ln_total_times_n: b.ln_total_times_n,
        ln_signal,
        certified: b.ln_total < ln_signal,
        ln_n0: ln_crossover(&b, corr_delocalized_exact),
    };

    Ok(EnergyReport {
        n,
        hbar: params.hbar(),
        potential_digest: v.digest(),
        hf,
        corr_delocalized_exact,
        corr_delocalized_asymptotic,
        corr_optimal,
        so_delocalized,
        so_delocalized_exact,
        so_optimal,
        so_ratio,
        error_budget,
    })
}

/// Seventeen significant digits; parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
