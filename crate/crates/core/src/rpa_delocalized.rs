//! Optimal energy among completely delocalized quasi-bosonic Bogoliubov
//! trial states.
//!
//! For each transfer momentum `k ≠ 0` the bosonized energy is
//! `α_k sinh²Ξ + β_k sinh Ξ cosh Ξ`, minimized in closed form by
//! `Ξ₀ = −½ artanh(β/α)` with value `½(√(α² − β²) − α)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    kinetic_coefficient, kinetic_coefficient_asymptotic, kinetic_constant, lune_constant,
    lune_count, FermiBall, ModelParams,
};
use crate::momentum::Momentum;
use crate::potential::Potential;
use crate::sum::ordered_sum;

/// Where `n_k²` and `k·f(k)` come from.
#[derive(Debug, Clone, Copy)]
pub enum Backend<'a> {
    /// Exact lattice sums over the Fermi ball.
    Exact(&'a FermiBall),
    /// Leading-order closed forms `n_k² = |k| N ħ (3√π/4)^{2/3}` and
    /// `k·f(k) = |k| N^{1/3} (4/(3√π))^{2/3}`.
    Asymptotic(ModelParams),
}

impl Backend<'_> {
    pub fn params(&self) -> ModelParams {
        match self {
            Backend::Exact(ball) => ball.params(),
            Backend::Asymptotic(p) => *p,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact(_) => "exact",
            Backend::Asymptotic(_) => "asymptotic",
        }
    }

    pub fn nk_sq(&self, k: Momentum) -> Result<f64> {
        if k.is_zero() {
            return Err(Error::Domain("n_k is only used for k ≠ 0".into()));
        }
        match self {
            Backend::Exact(ball) => {
                let c = lune_count(ball, k, false).count;
                if c == 0 {
                    return Err(Error::EmptyLune { k });
                }
                Ok(c as f64)
            }
            Backend::Asymptotic(p) => Ok(k.norm() * p.n() as f64 * p.hbar() * lune_constant()),
        }
    }

    pub fn kdotf(&self, k: Momentum) -> Result<f64> {
        if k.is_zero() {
            return Err(Error::Domain("k·f(k) is undefined at k = 0".into()));
        }
        match self {
            Backend::Exact(ball) => Ok(kinetic_coefficient(ball, k)?.kdotf()),
            Backend::Asymptotic(p) => kinetic_coefficient_asymptotic(p, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticCoefficients {
    pub k: Momentum,
    pub alpha: f64,
    pub beta: f64,
}

pub fn quadratic_coefficients(
    backend: Backend<'_>,
    v: &Potential,
    k: Momentum,
) -> Result<QuadraticCoefficients> {
    if k.is_zero() {
        return Err(Error::Domain("quadratic coefficients need k ≠ 0".into()));
    }
    let p = backend.params();
    let hbar = p.hbar();
    let vk = v.get(&k);
    let (kinetic, beta) = match backend {
        Backend::Exact(_) => {
            let nk_sq = backend.nk_sq(k)?;
            (hbar * hbar * backend.kdotf(k)?, vk * nk_sq / p.n() as f64)
        }
        Backend::Asymptotic(_) => {
            let kn = k.norm();
            (hbar * kn * kinetic_constant(), hbar * lune_constant() * vk * kn)
        }
    };
    Ok(QuadraticCoefficients {
        k,
        alpha: kinetic + beta,
        beta,
    })
}

/// Coefficients for every `k ≠ 0` stored in the potential, in mode order.
pub fn coefficients_for(backend: Backend<'_>, v: &Potential) -> Result<Vec<QuadraticCoefficients>> {
    let modes: Vec<Momentum> = v.nonzero_modes().map(|(k, _)| k).collect();
    modes
        .par_iter()
        .map(|&k| quadratic_coefficients(backend, v, k))
        .collect()
}

fn check_regime(c: &QuadraticCoefficients) -> Result<()> {
    if c.beta.abs() < c.alpha && c.alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateCoefficients {
            k: c.k,
            alpha: c.alpha,
            beta: c.beta,
        })
    }
}

/// `Ξ₀(k) = −½ artanh(β/α)`.
pub fn optimal_kernel(c: &QuadraticCoefficients) -> Result<f64> {
    check_regime(c)?;
    let r = c.beta / c.alpha;
    Ok(-0.25 * (r.ln_1p() - (-r).ln_1p()))
}

/// A real, even Bogoliubov kernel `k ↦ Ξ(k)` supported away from `k = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BogoliubovKernel {
    values: BTreeMap<Momentum, f64>,
}

impl BogoliubovKernel {
    pub fn new(values: BTreeMap<Momentum, f64>) -> Result<Self> {
        for (&k, &x) in &values {
            if k.is_zero() {
                return Err(Error::Value("kernel must vanish at k = 0".into()));
            }
            if !x.is_finite() {
                return Err(Error::Value(format!("kernel value at {k} is not finite")));
            }
            if values.get(&-k) != Some(&x) {
                return Err(Error::Value(format!("kernel is not even at k = {k}")));
            }
        }
        Ok(BogoliubovKernel { values })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, k: &Momentum) -> Option<f64> {
        self.values.get(k).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Momentum, f64)> + '_ {
        self.values.iter().map(|(&k, &x)| (k, x))
    }

    /// `Σ_k |Ξ(k)|`.
    pub fn l1_norm(&self) -> f64 {
        ordered_sum(self.values.values().map(|x| x.abs()))
    }
}

/// The minimizing kernel `Ξ₀` for a coefficient list.
pub fn optimal_kernels(coeffs: &[QuadraticCoefficients]) -> Result<BogoliubovKernel> {
    let values = coeffs
        .iter()
        .map(|c| Ok((c.k, optimal_kernel(c)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    BogoliubovKernel::new(values)
}

/// `Σ_k [α_k sinh²Ξ(k) + β_k sinh Ξ(k) cosh Ξ(k)]` over the coefficient list.
/// Momenta missing from the kernel are an error, not an implicit `Ξ = 0`.
pub fn bosonized_functional(coeffs: &[QuadraticCoefficients], xi: &BogoliubovKernel) -> Result<f64> {
    let terms = coeffs
        .iter()
        .map(|c| {
            let x = xi.get(&c.k).ok_or(Error::MissingCoefficient { k: c.k })?;
            let (s, ch) = (x.sinh(), x.cosh());
            Ok(c.alpha * s * s + c.beta * s * ch)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ordered_sum(terms))
}

/// `½(√(α² − β²) − α)` in the cancellation-free form `−½β²/(√((α−β)(α+β)) + α)`.
pub fn minimum_term(c: &QuadraticCoefficients) -> Result<f64> {
    check_regime(c)?;
    let root = ((c.alpha - c.beta) * (c.alpha + c.beta)).sqrt();
    Ok(-0.5 * c.beta * c.beta / (root + c.alpha))
}

/// `Σ_k ½(√(α_k² − β_k²) − α_k)`.
pub fn minimum_energy(coeffs: &[QuadraticCoefficients]) -> Result<f64> {
    let terms = coeffs.iter().map(minimum_term).collect::<Result<Vec<f64>>>()?;
    Ok(ordered_sum(terms))
}

/// Second-order expansion of [`minimum_energy`] in `V̂`:
/// `−(1/(2ħ²N²)) Σ V̂² n_k⁴ / (2 k·f(k))` (exact) or `−ħ (π/2)(9/32) Σ V̂² |k|`
/// (asymptotic).
pub fn second_order_delocalized(backend: Backend<'_>, v: &Potential) -> Result<f64> {
    let p = backend.params();
    match backend {
        Backend::Exact(_) => {
            let n = p.n() as f64;
            let hbar_sq = p.hbar() * p.hbar();
            let modes: Vec<(Momentum, f64)> = v.nonzero_modes().collect();
            let terms = modes
                .par_iter()
                .map(|&(k, vk)| {
                    let nk_sq = backend.nk_sq(k)?;
                    let kf = backend.kdotf(k)?;
                    Ok(vk * vk * nk_sq * nk_sq / (2.0 * kf))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(-ordered_sum(terms) / (2.0 * hbar_sq * n * n))
        }
        Backend::Asymptotic(_) => {
            let s = ordered_sum(v.nonzero_modes().map(|(k, vk)| vk * vk * k.norm()));
            Ok(-p.hbar() * delocalized_second_order_prefactor() * s)
        }
    }
}

/// `(π/2)(9/32) = 9π/64`.
pub fn delocalized_second_order_prefactor() -> f64 {
    PI / 2.0 * 9.0 / 32.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_fermi_ball;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const E1: Momentum = Momentum::new(1, 0, 0);

    fn qc(alpha: f64, beta: f64) -> QuadraticCoefficients {
        QuadraticCoefficients { k: E1, alpha, beta }
    }

    fn single_kernel(x: f64) -> BogoliubovKernel {
        BogoliubovKernel::new([(E1, x), (-E1, x)].into_iter().collect()).unwrap()
    }

    #[test]
    fn non_interacting_coefficients() {
        let b = build_fermi_ball(33).unwrap();
        let c = quadratic_coefficients(Backend::Exact(&b), &Potential::zero(1), E1).unwrap();
        assert_eq!(c.beta, 0.0);
        assert!(c.alpha > 0.0);
        assert_eq!(optimal_kernel(&c).unwrap(), 0.0);
    }

    #[test]
    fn exact_coefficients_n7() {
        let b = build_fermi_ball(7).unwrap();
        let v = Potential::from_entries(1, [(E1, 1.0)]).unwrap();
        let c = quadratic_coefficients(Backend::Exact(&b), &v, E1).unwrap();
        assert_relative_eq!(c.beta, 5.0 / 7.0, max_relative = 1e-15);
        assert_relative_eq!(c.alpha, 7f64.powf(-2.0 / 3.0) * 1.4 + 5.0 / 7.0, max_relative = 1e-14);
        assert!(matches!(
            quadratic_coefficients(Backend::Exact(&b), &v, Momentum::ZERO),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn asymptotic_gap_is_potential_independent() {
        let p = ModelParams::new(1000).unwrap();
        let k = Momentum::new(1, 1, 0);
        let gap = p.hbar() * k.norm() * kinetic_constant();
        for s in [0.0, 0.3, 2.0] {
            let v = Potential::from_entries(2, [(k, s)]).unwrap();
            let c = quadratic_coefficients(Backend::Asymptotic(p), &v, k).unwrap();
            assert_relative_eq!(c.alpha - c.beta, gap, max_relative = 1e-12);
        }
    }

    #[test]
    fn optimal_kernel_examples() {
        assert_eq!(optimal_kernel(&qc(2.0, 0.0)).unwrap(), 0.0);
        let r = 0.2f64.tanh();
        assert_relative_eq!(optimal_kernel(&qc(3.0, 3.0 * r)).unwrap(), -0.1, max_relative = 1e-14);
        assert!(matches!(
            optimal_kernel(&qc(1.0, 1.0)),
            Err(Error::DegenerateCoefficients { .. })
        ));
        assert!(optimal_kernel(&qc(1.0, 1.0 - 1e-15)).unwrap() < -8.0);
        assert!(optimal_kernel(&qc(1.0, 0.5)).unwrap() < 0.0);
    }

    #[test]
    fn minimum_energy_examples() {
        assert_eq!(minimum_energy(&[qc(1.0, 0.0), qc(2.0, 0.0)]).unwrap(), 0.0);
        assert_relative_eq!(minimum_energy(&[qc(5.0, 3.0)]).unwrap(), -0.5, max_relative = 1e-15);
        assert!(minimum_energy(&[qc(1.0, 2.0)]).is_err());
    }

    #[test]
    fn functional_examples() {
        let c = [qc(5.0, 3.0)];
        assert_eq!(bosonized_functional(&c, &single_kernel(0.0)).unwrap(), 0.0);
        let x = -0.37;
        let g = |y: f64| 5.0 * y.sinh().powi(2) - 3.0 * y.sinh() * y.cosh();
        assert_relative_eq!(bosonized_functional(&c, &single_kernel(x)).unwrap(), g(-x), max_relative = 1e-14);
        assert!(matches!(
            bosonized_functional(&c, &BogoliubovKernel::zero()),
            Err(Error::MissingCoefficient { .. })
        ));
    }

    #[test]
    fn kernel_validation() {
        assert!(BogoliubovKernel::new([(E1, 0.1)].into_iter().collect()).is_err());
        assert!(BogoliubovKernel::new([(Momentum::ZERO, 0.1)].into_iter().collect()).is_err());
        assert_eq!(single_kernel(-0.5).l1_norm(), 1.0);
    }

    #[test]
    fn minimizer_beats_random_kernels() {
        use rand::{Rng, SeedableRng};
        let b = build_fermi_ball(257).unwrap();
        let v = Potential::from_entries(
            3,
            [(E1, 0.8), (Momentum::new(1, 1, 0), 0.4), (Momentum::new(1, 1, 1), 0.1)],
        )
        .unwrap();
        let coeffs = coefficients_for(Backend::Exact(&b), &v).unwrap();
        let xi0 = optimal_kernels(&coeffs).unwrap();
        let emin = minimum_energy(&coeffs).unwrap();
        assert!(emin < 0.0);
        assert_relative_eq!(bosonized_functional(&coeffs, &xi0).unwrap(), emin, epsilon = 1e-12);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..64 {
            let mut values = BTreeMap::new();
            for (k, x) in xi0.iter() {
                if values.contains_key(&k) {
                    continue;
                }
                let y = x + rng.gen_range(-0.2..0.2);
                values.insert(k, y);
                values.insert(-k, y);
            }
            let xi = BogoliubovKernel::new(values).unwrap();
            assert!(bosonized_functional(&coeffs, &xi).unwrap() >= emin);
        }
    }

    #[test]
    fn second_order_examples() {
        let p = ModelParams::new(2109).unwrap();
        let b = build_fermi_ball(2109).unwrap();
        let zero = Potential::zero(2);
        assert_eq!(second_order_delocalized(Backend::Asymptotic(p), &zero).unwrap(), 0.0);
        assert_eq!(second_order_delocalized(Backend::Exact(&b), &zero).unwrap(), 0.0);
        assert_relative_eq!(delocalized_second_order_prefactor(), 9.0 * PI / 64.0, max_relative = 1e-15);
        let v = Potential::from_entries(2, [(E1, 0.5), (Momentum::new(1, 1, 0), 0.25)]).unwrap();
        let s: f64 = v.nonzero_modes().map(|(k, c)| c * c * k.norm()).sum();
        let so = second_order_delocalized(Backend::Asymptotic(p), &v).unwrap();
        assert_relative_eq!(so / (-p.hbar() * s), 9.0 * PI / 64.0, max_relative = 1e-14);
    }

    #[test]
    fn exact_second_order_is_small_coupling_limit() {
        let b = build_fermi_ball(257).unwrap();
        let v = Potential::from_entries(1, [(E1, 1.0)]).unwrap();
        let so = second_order_delocalized(Backend::Exact(&b), &v).unwrap();
        let mut last = f64::INFINITY;
        for j in 3..=8 {
            let s = 2f64.powi(-j);
            let w = v.scale_coupling(s);
            let e = minimum_energy(&coefficients_for(Backend::Exact(&b), &w).unwrap()).unwrap();
            let dev = (e / (s * s) / so - 1.0).abs();
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn summand_decreases_with_coupling() {
        // α(s) = K + sβ₁, β(s) = sβ₁, K > 0: d/ds of ½(√(α²−β²)−α) <= 0
        for kin in [0.1, 1.0, 7.0] {
            for b1 in [0.05, 0.5, 3.0] {
                let f = |s: f64| minimum_term(&qc(kin + s * b1, s * b1)).unwrap();
                let mut prev = f(0.0);
                for i in 1..=200 {
                    let cur = f(i as f64 * 0.05);
                    assert!(cur <= prev);
                    prev = cur;
                }
            }
        }
    }

    proptest! {
        #[test]
        fn stationarity_at_closed_form(alpha in 1e-3f64..1e3, frac in 0.0f64..0.999) {
            let beta = alpha * frac;
            let x = -optimal_kernel(&qc(alpha, beta)).unwrap();
            let dg = alpha * (2.0 * x).sinh() - beta * (2.0 * x).cosh();
            prop_assert!(dg.abs() < 1e-10 * alpha);
        }

        #[test]
        fn negativity(alpha in 1e-3f64..1e3, frac in 1e-6f64..0.999) {
            prop_assert!(minimum_term(&qc(alpha, alpha * frac)).unwrap() < 0.0);
        }
    }
}
