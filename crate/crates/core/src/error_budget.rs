//! Rigorous error constants and the certified `C/N` bound on the error terms
//! of the bosonized energy.
//!
//! The constants contain factors like `e^{750 A₁}`, so every bound is carried
//! as a natural logarithm. A bound that vanishes is `−∞`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::kinetic_constant;
use crate::momentum::Momentum;
use crate::potential::Potential;
use crate::rpa_delocalized::{coefficients_for, optimal_kernels, Backend, BogoliubovKernel};
use crate::sum::ordered_sum;

/// `c = 4 (9π/16)^{2/3}`.
pub fn c_small() -> f64 {
    4.0 * (9.0 * PI / 16.0).powf(2.0 / 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AConstants {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
}

fn one_plus_cv(k: Momentum, vk: f64) -> Result<f64> {
    let x = 1.0 + c_small() * vk;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("1 + c V({k}) = {x} is not positive")));
    }
    Ok(x)
}

/// `A₁ … A₅` over the nonzero support of `v`.
pub fn a_constants(v: &Potential) -> Result<AConstants> {
    let mut terms: [Vec<f64>; 5] = Default::default();
    for (k, vk) in v.nonzero_modes() {
        let x = one_plus_cv(k, vk)?;
        let log = (c_small() * vk).ln_1p().abs();
        let root_k = k.norm().sqrt();
        terms[0].push(log);
        terms[1].push(vk.abs() * x.sqrt());
        terms[2].push(vk.abs() * x.sqrt() * root_k);
        terms[3].push(log * x.sqrt() * root_k);
        terms[4].push(x.powf(0.25) * root_k);
    }
    let [a1, a2, a3, a4, a5] = terms.map(ordered_sum);
    Ok(AConstants { a1, a2, a3, a4, a5 })
}

/// `Ξ₀` as used in the error analysis: `−¼ log(1 + cV̂)` for the asymptotic
/// backend, `−½ artanh(β/α)` from the lattice coefficients otherwise.
pub fn optimal_kernel_magnitudes(v: &Potential, backend: Backend<'_>) -> Result<BogoliubovKernel> {
    match backend {
        Backend::Asymptotic(_) => {
            let values = v
                .nonzero_modes()
                .map(|(k, vk)| {
                    one_plus_cv(k, vk)?;
                    Ok((k, -0.25 * (c_small() * vk).ln_1p()))
                })
                .collect::<Result<BTreeMap<_, _>>>()?;
            BogoliubovKernel::new(values)
        }
        Backend::Exact(_) => optimal_kernels(&coefficients_for(backend, v)?),
    }
}

/// `C_n(Ξ) = 8n·5ⁿ Σ_k |Ξ(k)|`.
pub fn particle_number_constant(xi: &BogoliubovKernel, n_power: u32) -> Result<f64> {
    if n_power == 0 {
        return Err(Error::Value("particle number power must be at least 1".into()));
    }
    Ok(8.0 * n_power as f64 * 5f64.powi(n_power as i32) * xi.l1_norm())
}

/// `log Σ exp(xᵢ)`, with `−∞` for an empty or all-zero sum.
pub fn ln_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ordered_sum(logs.iter().map(|&x| (x - m).exp())).ln()
}

fn ln(x: f64) -> f64 {
    if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        x.ln()
    }
}

/// Logs of the four displayed bound lines and of the quartic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundLines {
    pub ln_eps1_first: f64,
    pub ln_eps1_second: f64,
    pub ln_eps2_first: f64,
    pub ln_eps2_second: f64,
    pub ln_quartic: f64,
}

impl BoundLines {
    pub fn ln_eps1(&self) -> f64 {
        ln_sum_exp(&[self.ln_eps1_first, self.ln_eps1_second])
    }

    pub fn ln_eps2(&self) -> f64 {
        ln_sum_exp(&[self.ln_eps2_first, self.ln_eps2_second])
    }

    /// `log(ε₁ + 2ε₂ + quartic)`.
    pub fn ln_total(&self) -> f64 {
        ln_sum_exp(&[self.ln_eps1(), 2f64.ln() + self.ln_eps2(), self.ln_quartic])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ErrorBudget {
    pub n: u64,
    pub backend: &'static str,
    pub constants: AConstants,
    pub c_small: f64,
    /// `C₂(Ξ)` and `C₃(Ξ)`.
    pub c2: f64,
    pub c3: f64,
    pub lines: BoundLines,
    pub ln_eps1: f64,
    pub ln_eps2: f64,
    pub ln_total: f64,
    /// `log(total · N)`, the log of the constant `C`.
    pub ln_total_times_n: f64,
}

/// Evaluates the bound lines for kernel `xi` with the backend's `n_k` and
/// `k·f(k)`.
pub fn epsilon_bounds(backend: Backend<'_>, v: &Potential, xi: &BogoliubovKernel) -> Result<ErrorBudget> {
    let p = backend.params();
    let n = p.n() as f64;
    let hbar_sq = p.hbar() * p.hbar();
    let constants = a_constants(v)?;
    let c2 = particle_number_constant(xi, 2)?;
    let c3 = particle_number_constant(xi, 3)?;

    let modes: Vec<(Momentum, f64)> = v.nonzero_modes().collect();
    let mut rows = Vec::with_capacity(modes.len());
    for &(k, vk) in &modes {
        let x = xi.get(&k).ok_or(Error::MissingCoefficient { k })?.abs();
        let nk = backend.nk_sq(k)?.sqrt();
        rows.push((k, vk, x, nk));
    }
    // T = Σ_m |Ξ(m)| / n_m, so that Σ_m |Ξ(m)|/(n_m n_k) = T / n_k.
    let t = ordered_sum(rows.iter().map(|&(_, _, x, nk)| x / nk));
    let ln_t = ln(t);

    let s11 = ordered_sum(rows.iter().map(|&(_, vk, x, _)| vk * (2.0 * x).exp())).abs();
    let ln_eps1_first = 32f64.ln() + c3 + ln(s11) + 2.0 * ln_t - n.ln();

    let s12 = ordered_sum(
        rows.iter()
            .map(|&(_, vk, x, nk)| vk * nk * (4.0 * x.sinh() + 2.0 * x.cosh()) * x.exp()),
    )
    .abs();
    let ln_eps1_second = 8f64.sqrt().ln() + 0.5 * c3 + ln_t + ln(s12) - n.ln();

    let mut s21 = Vec::with_capacity(rows.len());
    for &(k, _, x, nk) in &rows {
        let kf = backend.kdotf(k)?.abs();
        s21.push(2.0 * x * kf * x.sinh() * x.exp() * 2.0 / nk);
    }
    let ln_prefactor = (2.0 * hbar_sq * 8f64.sqrt()).ln() + 0.5 * c3;
    let ln_eps2_first = ln_prefactor + ln(ordered_sum(s21)) + ln_t;

    let s22 = ordered_sum(
        rows.iter()
            .map(|&(k, _, x, nk)| k.norm() / nk * (x.sinh() + x.exp() * t / nk)),
    );
    let ln_eps2_second =
        ln_prefactor + (6.0 / PI).cbrt().ln() + n.cbrt().ln() + ln_t + ln(s22);

    let ln_quartic = 2f64.ln() - n.ln() + ln(v.l1_norm()) + c2;

    let lines = BoundLines {
        ln_eps1_first,
        ln_eps1_second,
        ln_eps2_first,
        ln_eps2_second,
        ln_quartic,
    };
    let ln_total = lines.ln_total();
    Ok(ErrorBudget {
        n: p.n(),
        backend: backend.name(),
        constants,
        c_small: c_small(),
        c2,
        c3,
        lines,
        ln_eps1: lines.ln_eps1(),
        ln_eps2: lines.ln_eps2(),
        ln_total,
        ln_total_times_n: ln_total + n.ln(),
    })
}

/// The closed forms in `A₁ … A₅` that bound the four lines when `Ξ` is the
/// asymptotic optimal kernel and `V̂ ≥ 0`.
pub fn closed_form_lines(a: &AConstants, n: u64) -> BoundLines {
    let n = n as f64;
    let c2 = kinetic_constant();
    let e375 = 375.0 * a.a1;
    BoundLines {
        ln_eps1_first: -5.0 / 3.0 * n.ln()
            + c2.ln()
            + 2f64.ln()
            + 2.0 * e375
            + ln(a.a2)
            + 2.0 * ln(a.a1),
        ln_eps1_second: -n.ln() + (3.0 * 2f64.sqrt()).ln() + e375 + ln(a.a3) + ln(a.a1),
        ln_eps2_first: -n.ln() + 2f64.sqrt().ln() + e375 + 2.0 * c2.ln() + ln(a.a4) + ln(a.a1),
        ln_eps2_second: -n.ln()
            + (6.0 / PI).cbrt().ln()
            + 2f64.sqrt().ln()
            + e375
            + c2.ln()
            + ln(a.a1)
            + ln(a.a5)
            + (c2 * a.a1 / 4.0).ln_1p(),
        ln_quartic: f64::NEG_INFINITY,
    }
}

/// Estimate of `log N₀`, the particle number beyond which the certified bound
/// drops below `|signal|`, extrapolated from `N` assuming `total ∝ 1/N` and
/// `signal ∝ N^{−1/3}`. Returns `−∞` when the bound is already smaller at
/// every `N`.
pub fn ln_crossover(budget: &ErrorBudget, signal: f64) -> f64 {
    let n = budget.n as f64;
    let ln_signal_scaled = ln(signal.abs()) + n.cbrt().ln();
    let ln_ratio = budget.ln_total_times_n - ln_signal_scaled;
    if ln_ratio == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    1.5 * ln_ratio
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_fermi_ball, ModelParams};
    use crate::rpa_delocalized::optimal_kernel;
    use crate::rpa_delocalized::quadratic_coefficients;

    const E1: Momentum = Momentum::new(1, 0, 0);

    fn demo(s: f64) -> Potential {
        let entries = Momentum::ball(3)
            .into_iter()
            .filter(|k| !k.is_zero())
            .map(|k| (k, s * 0.5 / k.norm_sq() as f64));
        Potential::from_entries(3, entries).unwrap()
    }

    fn pair(v: f64) -> Potential {
        Potential::from_entries(1, [(E1, v)]).unwrap()
    }

    #[test]
    fn c_value() {
        let expected = 4.0 * (9.0 * PI / 16.0f64).cbrt().powi(2);
        assert!((c_small() - expected).abs() < 1e-14);
        assert!((c_small() - 5.846_665_634_581_131).abs() < 1e-13);
    }

    #[test]
    fn a_constant_examples() {
        let a = a_constants(&pair(0.0)).unwrap();
        assert_eq!((a.a1, a.a2, a.a3, a.a4), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(a.a5, 2.0);
        let a = a_constants(&pair(1.0)).unwrap();
        assert!((a.a1 - 2.0 * (1.0 + c_small()).ln()).abs() < 1e-14);
        assert!(matches!(a_constants(&pair(-1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn a_constants_monotone() {
        let mut prev = a_constants(&demo(0.0)).unwrap();
        for j in 1..=20 {
            let a = a_constants(&demo(j as f64 * 0.1)).unwrap();
            assert!(a.a1 >= prev.a1 && a.a2 >= prev.a2 && a.a3 >= prev.a3);
            assert!(a.a4 >= prev.a4 && a.a5 >= prev.a5);
            prev = a;
        }
    }

    #[test]
    fn asymptotic_kernel() {
        let p = ModelParams::new(257).unwrap();
        let xi = optimal_kernel_magnitudes(&pair(0.0), Backend::Asymptotic(p)).unwrap();
        assert_eq!(xi.get(&E1), Some(0.0));
        let v = demo(0.7);
        let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
        for (k, vk) in v.nonzero_modes() {
            let x = xi.get(&k).unwrap();
            assert!(((2.0 * x.abs()).exp() - (1.0 + c_small() * vk).sqrt()).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_kernel_shares_code_path() {
        let ball = build_fermi_ball(7).unwrap();
        let v = demo(0.4);
        let xi = optimal_kernel_magnitudes(&v, Backend::Exact(&ball)).unwrap();
        let c = quadratic_coefficients(Backend::Exact(&ball), &v, E1).unwrap();
        assert_eq!(xi.get(&E1).unwrap(), optimal_kernel(&c).unwrap());
    }

    #[test]
    fn particle_number_examples() {
        assert_eq!(particle_number_constant(&BogoliubovKernel::zero(), 3).unwrap(), 0.0);
        let xi = BogoliubovKernel::new([(E1, 0.5), (-E1, 0.5)].into_iter().collect()).unwrap();
        assert_eq!(particle_number_constant(&xi, 3).unwrap(), 3000.0);
        assert!(particle_number_constant(&xi, 0).is_err());
        let p = ModelParams::new(257).unwrap();
        let v = demo(1.3);
        let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
        let a1 = a_constants(&v).unwrap().a1;
        assert!((particle_number_constant(&xi, 3).unwrap() / (750.0 * a1) - 1.0).abs() < 1e-14);
        assert!((particle_number_constant(&xi, 2).unwrap() / (100.0 * a1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_potential_has_zero_bounds() {
        let p = ModelParams::new(33).unwrap();
        let v = demo(0.0);
        let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
        let b = epsilon_bounds(Backend::Asymptotic(p), &v, &xi).unwrap();
        assert_eq!(b.ln_total, f64::NEG_INFINITY);
        assert_eq!(b.lines.ln_quartic, f64::NEG_INFINITY);
    }

    #[test]
    fn lines_below_closed_forms() {
        for &n in &[33u64, 2109, 137_065] {
            let p = ModelParams::new(n).unwrap();
            for &s in &[0.01, 0.3, 2.0] {
                let v = demo(s);
                let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
                let b = epsilon_bounds(Backend::Asymptotic(p), &v, &xi).unwrap();
                let cf = closed_form_lines(&b.constants, n);
                let tol = 1e-12 * b.c3.max(1.0);
                assert!(b.lines.ln_eps1_first <= cf.ln_eps1_first + tol);
                assert!(b.lines.ln_eps1_second <= cf.ln_eps1_second + tol);
                assert!(b.lines.ln_eps2_first <= cf.ln_eps2_first + tol);
                assert!(b.lines.ln_eps2_second <= cf.ln_eps2_second + tol);
            }
        }
    }

    #[test]
    fn assembly_is_sum_of_parts() {
        let p = ModelParams::new(2109).unwrap();
        let v = demo(0.01);
        let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
        let b = epsilon_bounds(Backend::Asymptotic(p), &v, &xi).unwrap();
        let l = b.lines;
        let direct = l.ln_eps1_first.exp()
            + l.ln_eps1_second.exp()
            + 2.0 * (l.ln_eps2_first.exp() + l.ln_eps2_second.exp())
            + l.ln_quartic.exp();
        assert!((direct.ln() - b.ln_total).abs() < 1e-13);
    }

    #[test]
    fn bounds_monotone_in_coupling() {
        let p = ModelParams::new(2109).unwrap();
        let mut prev: Option<BoundLines> = None;
        for j in 1..=12 {
            let v = demo(j as f64 * 0.05);
            let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
            let l = epsilon_bounds(Backend::Asymptotic(p), &v, &xi).unwrap().lines;
            if let Some(q) = prev {
                assert!(l.ln_eps1_first >= q.ln_eps1_first);
                assert!(l.ln_eps1_second >= q.ln_eps1_second);
                assert!(l.ln_eps2_first >= q.ln_eps2_first);
                assert!(l.ln_eps2_second >= q.ln_eps2_second);
                assert!(l.ln_quartic >= q.ln_quartic);
            }
            prev = Some(l);
        }
    }

    #[test]
    fn constant_is_stable_in_n() {
        // Weak enough that e^{C₃} ≈ 1; otherwise the N^{-5/3} line dominates
        // at every reachable N.
        let v = demo(1e-5);
        let logs: Vec<f64> = [33u64, 257, 2109, 17077, 137_065]
            .iter()
            .map(|&n| {
                let ball = build_fermi_ball(n).unwrap();
                let xi = optimal_kernel_magnitudes(&v, Backend::Exact(&ball)).unwrap();
                epsilon_bounds(Backend::Exact(&ball), &v, &xi).unwrap().ln_total_times_n
            })
            .collect();
        let spread = logs.iter().cloned().fold(f64::MIN, f64::max)
            - logs.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.2, "{logs:?}");
    }

    #[test]
    fn first_line_decays_faster() {
        let v = demo(0.3);
        let line = |n: u64| {
            let p = ModelParams::new(n).unwrap();
            let xi = optimal_kernel_magnitudes(&v, Backend::Asymptotic(p)).unwrap();
            epsilon_bounds(Backend::Asymptotic(p), &v, &xi).unwrap().lines
        };
        let (a, b) = (line(1000), line(8000));
        let slope = (b.ln_eps1_first - a.ln_eps1_first) / 8f64.ln();
        assert!((slope + 5.0 / 3.0).abs() < 1e-9, "{slope}");
        let slope = (b.ln_eps1_second - a.ln_eps1_second) / 8f64.ln();
        assert!((slope + 1.0).abs() < 1e-9, "{slope}");
    }

    #[test]
    fn log_sum_exp() {
        assert_eq!(ln_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(ln_sum_exp(&[f64::NEG_INFINITY, 0.0]), 0.0);
        assert!((ln_sum_exp(&[1e4, 1e4]) - (1e4 + 2f64.ln())).abs() < 1e-10);
    }
}
