//! Optimal correlation energy in the Gell-Mann–Brueckner form and its
//! second-order expansion.
//!
//! `E = ħκ Σ_k |k| [ (1/π)∫₀^∞ log(1 + 2πκV̂(k) G(λ)) dλ − (π/2)κV̂(k) ]`
//! with `G(λ) = 1 − λ arctan(1/λ)` and `κ = (3/(4π))^{1/3}`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ModelParams;
use crate::momentum::Momentum;
use crate::potential::Potential;
use crate::quadrature::{integrate_dyadic, Estimate};
use crate::rpa_delocalized::delocalized_second_order_prefactor;
use crate::sum::ordered_sum;

const MAX_PANELS: usize = 4000;

/// `(3/(4π))^{1/3}`.
pub fn kappa() -> f64 {
    (3.0 / (4.0 * PI)).cbrt()
}

/// `G(λ) = 1 − λ arctan(1/λ)`, valued in `[0, 1]`.
pub fn pair_response(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        return 1.0 - lambda * (FRAC_PI_2 - lambda.atan());
    }
    let x = 1.0 / lambda;
    if x < 0.1 {
        // Σ_{n≥1} (−1)^{n+1} x^{2n} / (2n+1)
        let x2 = x * x;
        let mut acc = 0.0;
        for n in (1..=9).rev() {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            acc = x2 * (sign / (2 * n + 1) as f64 + acc);
        }
        acc
    } else {
        1.0 - x.atan() / x
    }
}

/// `log(1 + a G(λ))`.
pub fn gmb_integrand(a: f64, lambda: f64) -> Result<f64> {
    let y = a * pair_response(lambda);
    if !(1.0 + y > 0.0) {
        return Err(Error::Domain(format!(
            "1 + a G(λ) = {} is not positive (a = {a}, λ = {lambda})",
            1.0 + y
        )));
    }
    Ok(y.ln_1p())
}

/// `log(1 + y) − y`, accurate for small `|y|`.
fn log1p_minus_id(y: f64) -> f64 {
    if y.abs() < 0.01 {
        let mut acc = 0.0;
        for n in (2..=10).rev() {
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            acc = y * (sign / n as f64 + acc);
        }
        y * acc
    } else {
        y.ln_1p() - y
    }
}

fn check_coupling(a: f64) -> Result<()> {
    if !(a > -1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("coupling a = {a} must be finite and > −1")));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::Value(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

/// Bound on `(1/π)∫_Λ^∞ |log(1 + aG)| dλ`, using `G(λ) ≤ 1/(3λ²)` for `λ ≥ 1`.
pub fn gmb_tail_bound(a: f64, cutoff: f64) -> f64 {
    a.abs() / (3.0 * PI * cutoff * (1.0 + a.min(0.0)))
}

/// Bound on `(1/π)∫_Λ^∞ |log(1 + aG) − aG| dλ`.
pub fn gmb_subtracted_tail_bound(a: f64, cutoff: f64) -> f64 {
    a * a / (54.0 * PI * cutoff.powi(3) * (1.0 + a.min(0.0)))
}

// Smallest power of two ≥ 1 at which `bound` drops below `target`.
fn cutoff_for(bound: impl Fn(f64) -> f64, target: f64) -> f64 {
    let mut cutoff = 1.0f64;
    while bound(cutoff) >= target {
        cutoff *= 2.0;
    }
    cutoff
}

/// `(1/π)∫₀^∞ log(1 + aG(λ)) dλ` with a total error estimate (quadrature
/// plus analytic tail) at most `tol`.
pub fn gmb_integral(a: f64, tol: f64) -> Result<Estimate> {
    check_coupling(a)?;
    check_tol(tol)?;
    if a == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let cutoff = cutoff_for(|c| gmb_tail_bound(a, c), tol / 2.0);
    let tail = gmb_tail_bound(a, cutoff);
    let q = integrate_dyadic(
        |l| (a * pair_response(l)).ln_1p(),
        cutoff,
        PI * tol / 2.0,
        MAX_PANELS,
    )?;
    Ok(Estimate {
        value: q.value / PI,
        error: q.error / PI + tail,
    })
}

/// `(1/π)∫₀^∞ [log(1 + aG) − aG] dλ = gmb_integral(a) − a/4`, integrated in
/// subtracted form so that nothing cancels at small `a`.
pub fn gmb_subtracted_integral(a: f64, tol: f64) -> Result<Estimate> {
    check_coupling(a)?;
    check_tol(tol)?;
    if a == 0.0 {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    let cutoff = cutoff_for(|c| gmb_subtracted_tail_bound(a, c), tol / 2.0);
    let tail = gmb_subtracted_tail_bound(a, cutoff);
    let q = integrate_dyadic(
        |l| log1p_minus_id(a * pair_response(l)),
        cutoff,
        PI * tol / 2.0,
        MAX_PANELS,
    )?;
    Ok(Estimate {
        value: q.value / PI,
        error: q.error / PI + tail,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ModeContribution {
    pub k: Momentum,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GMBResult {
    /// Bracketed per-mode term, in mode order.
    pub per_k: Vec<ModeContribution>,
    pub total: f64,
    pub kappa: f64,
}

impl GMBResult {
    pub fn get(&self, k: &Momentum) -> Option<f64> {
        self.per_k.iter().find(|c| c.k == *k).map(|c| c.value)
    }
}

/// Optimal correlation energy over the nonzero support of `v`.
pub fn gmb_correlation(v: &Potential, params: &ModelParams, tol: f64) -> Result<GMBResult> {
    check_tol(tol)?;
    let kappa = kappa();
    let modes: Vec<(Momentum, f64)> = v.nonzero_modes().collect();
    let per_k = modes
        .par_iter()
        .map(|&(k, vk)| {
            let e = gmb_subtracted_integral(2.0 * PI * kappa * vk, tol)?;
            Ok(ModeContribution {
                k,
                value: e.value,
                error: e.error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total =
        params.hbar() * kappa * ordered_sum(per_k.iter().map(|c| c.k.norm() * c.value));
    Ok(GMBResult { per_k, total, kappa })
}

/// `(π/2)(1 − log 2)`.
pub fn optimal_second_order_prefactor() -> f64 {
    FRAC_PI_2 * (1.0 - LN_2)
}

/// `−ħ (π/2)(1 − log 2) Σ_{k≠0} |k| V̂(k)²`.
pub fn second_order_optimal(v: &Potential, params: &ModelParams) -> f64 {
    let s = ordered_sum(v.nonzero_modes().map(|(k, vk)| k.norm() * vk * vk));
    -params.hbar() * optimal_second_order_prefactor() * s
}

/// `(9/32)/(1 − log 2)`.
pub fn second_order_ratio() -> f64 {
    delocalized_second_order_prefactor() / optimal_second_order_prefactor()
}
