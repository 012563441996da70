use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::modes::ModeSet;
use super::ops::{
    apply_c_create, apply_number, apply_pair_annihilate, apply_pair_create,
    Normalization,
};
use super::state::SectorState;
use crate::error::{Error, Result};
use crate::momentum::Momentum;
use crate::potential::Potential;

const RATIO_SLACK: f64 = 1e-12;
const EXACT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSetSummary {
    pub holes_n: u64,
    pub lambda_sq: i64,
    pub particles: usize,
}

impl From<&ModeSet> for ModeSetSummary {
    fn from(m: &ModeSet) -> Self {
        ModeSetSummary {
            holes_n: m.holes().len() as u64,
            lambda_sq: m.lambda_sq(),
            particles: m.particles().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// `None` for checks that are not tied to a random trial.
    pub trial: Option<u64>,
    pub value: f64,
    pub message: String,
}

/// `max_ratio` is the worst observed quantity divided by its allowed bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub modeset: ModeSetSummary,
    pub seed: u64,
    pub trials: u64,
    pub max_ratio: f64,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn ensure(&self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::BoundViolation {
                check: format!("{}: {}", self.check, v.message),
                ratio: v.value,
            }),
        }
    }
}

/// Uniform complex amplitudes on every configuration with at most `pairs`
/// pairs, normalized.
pub fn random_state<R: Rng>(
    modes: &ModeSet,
    pairs: usize,
    max_pairs: usize,
    rng: &mut R,
) -> SectorState {
    let amps: BTreeMap<_, _> = modes
        .sector_basis(pairs)
        .into_iter()
        .map(|c| (c, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let s = SectorState::from_amplitudes(amps, max_pairs);
    let n = s.norm();
    s.scale(Complex64::new(1.0 / n, 0.0))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn require_lune(modes: &ModeSet, k: Momentum) -> Result<f64> {
    match modes.nk_sq(k) {
        0 => Err(Error::EmptyLune { k }),
        n => Ok((n as f64).sqrt()),
    }
}

fn require_pairs(max_pairs: usize, needed: usize) -> Result<()> {
    if max_pairs < needed {
        return Err(Error::Value(format!(
            "check needs max_pairs ≥ {needed}, got {max_pairs}"
        )));
    }
    Ok(())
}

// `value / bound`, with 0/0 = 0 (both sides vanish exactly on the vacuum).
fn bound_ratio(value: f64, bound: f64) -> f64 {
    if bound == 0.0 && value <= EXACT_TOL {
        0.0
    } else {
        value / bound
    }
}

fn merge(
    check: String,
    modes: &ModeSet,
    seed: u64,
    trials: u64,
    results: Vec<(f64, Vec<Violation>)>,
    extra: Vec<Violation>,
) -> VerificationReport {
    let max_ratio = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let violations = extra
        .into_iter()
        .chain(results.into_iter().flat_map(|r| r.1))
        .collect();
    VerificationReport {
        check,
        modeset: modes.into(),
        seed,
        trials,
        max_ratio,
        violations,
    }
}

/// `‖𝓔(k,l)ξ‖ n_k n_l / ‖𝓝ξ‖ ≤ 1` with `𝓔 = [b_k, b*_l] − δ_{k,l}`, and
/// `[b_k, b_l] = [b*_k, b*_l] = 0`, on random states.
pub fn verify_almost_ccr(
    modes: &ModeSet,
    k: Momentum,
    l: Momentum,
    trials: u64,
    seed: u64,
    max_pairs: usize,
) -> Result<VerificationReport> {
    require_pairs(max_pairs, 1)?;
    let nk = require_lune(modes, k)?;
    let nl = require_lune(modes, l)?;
    let norm = Normalization::Normalized;
    let delta = if k == l { 1.0 } else { 0.0 };
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let xi = random_state(modes, max_pairs - 1, max_pairs, &mut rng);
            let mut violations = Vec::new();

            let left = apply_pair_annihilate(&apply_pair_create(&xi, l, modes, norm)?, k, modes, norm)?;
            let right = apply_pair_create(&apply_pair_annihilate(&xi, k, modes, norm)?, l, modes, norm)?;
            let err = &(&left - &right) - &(&xi * delta);
            let n_xi = apply_number(&xi).norm();
            let ratio = bound_ratio(err.norm() * nk * nl, n_xi);
            if !(ratio <= 1.0 + RATIO_SLACK) {
                violations.push(Violation {
                    trial: Some(t),
                    value: ratio,
                    message: "‖𝓔(k,l)ξ‖ n_k n_l / ‖𝓝ξ‖ > 1".into(),
                });
            }

            let bb = &apply_pair_annihilate(&apply_pair_annihilate(&xi, l, modes, norm)?, k, modes, norm)?
                - &apply_pair_annihilate(&apply_pair_annihilate(&xi, k, modes, norm)?, l, modes, norm)?;
            if bb.max_abs() > EXACT_TOL {
                violations.push(Violation {
                    trial: Some(t),
                    value: bb.max_abs(),
                    message: "[b_k, b_l] ≠ 0".into(),
                });
            }
            if max_pairs >= 2 {
                let low = random_state(modes, max_pairs - 2, max_pairs, &mut rng);
                let cc = &apply_pair_create(&apply_pair_create(&low, l, modes, norm)?, k, modes, norm)?
                    - &apply_pair_create(&apply_pair_create(&low, k, modes, norm)?, l, modes, norm)?;
                if cc.max_abs() > EXACT_TOL {
                    violations.push(Violation {
                        trial: Some(t),
                        value: cc.max_abs(),
                        message: "[b*_k, b*_l] ≠ 0".into(),
                    });
                }
            }
            Ok((ratio, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(format!("almost_ccr k={k} l={l}"), modes, seed, trials, results, Vec::new()))
}

/// Components of `𝓔_c(k,l)ψ = [c*_k, b_l]ψ + δ_{k,l} f(k)ψ`.
fn c_error(
    psi: &SectorState,
    k: Momentum,
    l: Momentum,
    modes: &ModeSet,
    f: [f64; 3],
) -> Result<[SectorState; 3]> {
    let norm = Normalization::Normalized;
    let cb = apply_c_create(&apply_pair_annihilate(psi, l, modes, norm)?, k, modes)?;
    let c_psi = apply_c_create(psi, k, modes)?;
    let mut out: [SectorState; 3] = Default::default();
    for j in 0..3 {
        let bc = apply_pair_annihilate(&c_psi[j], l, modes, norm)?;
        let mut e = &cb[j] - &bc;
        if k == l {
            e = &e + &(psi * f[j]);
        }
        out[j] = e;
    }
    Ok(out)
}

/// Largest eigenvalue of a symmetric 3×3 matrix.
fn max_eigenvalue(a: [[f64; 3]; 3]) -> f64 {
    let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
    if p1 == 0.0 {
        return a[0][0].max(a[1][1]).max(a[2][2]);
    }
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = a;
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = (*x - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

/// `sup_{|m|=1} ‖m·E‖` for a vector of states.
fn vector_norm(e: &[SectorState; 3]) -> f64 {
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = e[i].inner(&e[j]).re;
        }
    }
    max_eigenvalue(g).max(0.0).sqrt()
}

/// `f(k)` on the truncated mode set.
pub(crate) fn f_trunc_vec(modes: &ModeSet, k: Momentum) -> [f64; 3] {
    let (s, n) = modes.f_trunc(k);
    [s[0] as f64 / n as f64, s[1] as f64 / n as f64, s[2] as f64 / n as f64]
}

/// `‖m·𝓔_c(k,l)ψ‖ ≤ |m| (6/π)^{1/3} N^{1/3} ‖𝓝ψ‖ / (n_k n_l)` and
/// `[𝓔_c, 𝓝] = 0` on random states; for `k = l` also `[c*_k, b_k]Ω = −f(k)Ω`.
pub fn verify_c_commutator(
    modes: &ModeSet,
    k: Momentum,
    l: Momentum,
    trials: u64,
    seed: u64,
    max_pairs: usize,
) -> Result<VerificationReport> {
    require_pairs(max_pairs, 1)?;
    let nk = require_lune(modes, k)?;
    let nl = require_lune(modes, l)?;
    let f = f_trunc_vec(modes, k);
    let n = modes.holes().len() as f64;
    let constant = (6.0 / PI).cbrt() * n.cbrt() / (nk * nl);

    let mut extra = Vec::new();
    if k == l {
        let omega = SectorState::vacuum(max_pairs);
        let c = apply_c_create(&omega, k, modes)?;
        for j in 0..3 {
            let comm = &SectorState::zero(max_pairs)
                - &apply_pair_annihilate(&c[j], k, modes, Normalization::Normalized)?;
            let residual = (&comm + &(&omega * f[j])).max_abs();
            if residual > EXACT_TOL {
                extra.push(Violation {
                    trial: None,
                    value: residual,
                    message: format!("[c*_k, b_k]Ω ≠ −f(k)Ω in component {j}"),
                });
            }
        }
    }

    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let psi = random_state(modes, max_pairs - 1, max_pairs, &mut rng);
            let mut violations = Vec::new();
            let e = c_error(&psi, k, l, modes, f)?;
            let n_psi = apply_number(&psi);
            let ratio = bound_ratio(vector_norm(&e), constant * n_psi.norm());
            if !(ratio <= 1.0 + RATIO_SLACK) {
                violations.push(Violation {
                    trial: Some(t),
                    value: ratio,
                    message: "‖m·𝓔_c(k,l)ψ‖ above bound".into(),
                });
            }
            let e_n = c_error(&n_psi, k, l, modes, f)?;
            for j in 0..3 {
                let r = (&e_n[j] - &apply_number(&e[j])).max_abs();
                if r > EXACT_TOL * (1.0 + e_n[j].max_abs()) {
                    violations.push(Violation {
                        trial: Some(t),
                        value: r,
                        message: format!("[𝓔_c, 𝓝] ≠ 0 in component {j}"),
                    });
                }
            }
            Ok((ratio, violations))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(format!("c_commutator k={k} l={l}"), modes, seed, trials, results, extra))
}

#[derive(Debug, Clone, Serialize)]
pub struct SinglePairExpectation {
    pub k: Momentum,
    /// `⟨b*_kΩ, Q b*_kΩ⟩` from the assembled matrix.
    pub matrix: f64,
    /// Same, by direct sparse application of all three terms.
    pub direct: f64,
    /// `V̂(k) n_k² / N`.
    pub formula: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadraticInteraction {
    pub report: VerificationReport,
    pub dimension: usize,
    pub nonzeros: usize,
    pub hermiticity_residual: f64,
    pub vacuum_expectation: f64,
    pub single_pair: Vec<SinglePairExpectation>,
}

type Sparse = BTreeMap<(usize, usize), Complex64>;

/// `Q = (1/2N) Σ_k V̂(k) (2 b̃*_k b̃_k + b̃*_k b̃*_{−k} + b̃_{−k} b̃_k)` compressed
/// to the sector with at most `max_pairs` pairs. The `b̃*b̃*` block is the
/// adjoint of the `b̃b̃` block, so it is taken from there.
pub fn verify_quadratic_interaction(
    modes: &ModeSet,
    v: &Potential,
    max_pairs: usize,
) -> Result<QuadraticInteraction> {
    let un = Normalization::Unnormalized;
    let basis = modes.sector_basis(max_pairs);
    let index: BTreeMap<u64, usize> = basis.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = modes.holes().len() as f64;
    let ks: Vec<(Momentum, f64)> = v
        .nonzero_modes()
        .filter(|(k, vk)| *vk != 0.0 && modes.nk_sq(*k) > 0)
        .collect();

    let columns = basis
        .par_iter()
        .enumerate()
        .map(|(j, &c)| {
            let e = SectorState::basis(c, max_pairs);
            let mut col: Vec<(usize, usize, Complex64)> = Vec::new();
            for &(k, vk) in &ks {
                let bk = apply_pair_annihilate(&e, k, modes, un)?;
                let a = apply_pair_create(&bk, k, modes, un)?;
                for (ci, amp) in a.iter() {
                    col.push((index[&ci], j, amp * (vk / n)));
                }
                let b = apply_pair_annihilate(&bk, -k, modes, un)?;
                for (ci, amp) in b.iter() {
                    let w = amp * (vk / (2.0 * n));
                    col.push((index[&ci], j, w));
                    col.push((j, index[&ci], w.conj()));
                }
            }
            Ok(col)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m: Sparse = BTreeMap::new();
    for col in columns {
        for (i, j, z) in col {
            *m.entry((i, j)).or_default() += z;
        }
    }
    m.retain(|_, z| *z != Complex64::default());

    let mut herm = 0.0f64;
    for (&(i, j), z) in &m {
        let t = m.get(&(j, i)).copied().unwrap_or_default();
        herm = herm.max((z - t.conj()).norm());
    }
    let vacuum_expectation = m.get(&(0, 0)).map(|z| z.re).unwrap_or(0.0);

    let mut single_pair = Vec::new();
    let mut extra = Vec::new();
    // Direct application needs room for the two extra pairs of b̃*b̃*.
    let room = max_pairs + 2;
    for &(k, vk) in &ks {
        if max_pairs < 1 {
            break;
        }
        let psi = apply_pair_create(&SectorState::vacuum(room), k, modes, Normalization::Normalized)?;
        let mut matrix = Complex64::default();
        for (ci, a) in psi.iter() {
            for (cj, b) in psi.iter() {
                if let Some(z) = m.get(&(index[&ci], index[&cj])) {
                    matrix += a.conj() * z * b;
                }
            }
        }
        let mut q_psi = SectorState::zero(room);
        for &(l, vl) in &ks {
            let bl = apply_pair_annihilate(&psi, l, modes, un)?;
            let t1 = apply_pair_create(&bl, l, modes, un)?;
            let t2 = apply_pair_create(&apply_pair_create(&psi, -l, modes, un)?, l, modes, un)?;
            let t3 = apply_pair_annihilate(&bl, -l, modes, un)?;
            let sum = &(&(&t1 * 2.0) + &t2) + &t3;
            q_psi = &q_psi + &(&sum * (vl / (2.0 * n)));
        }
        let direct = psi.inner(&q_psi).re;
        let formula = vk * modes.nk_sq(k) as f64 / n;
        for (what, x) in [("matrix", matrix.re), ("direct", direct)] {
            let r = (x - formula).abs();
            if r > 1e-12 * (1.0 + formula.abs()) {
                extra.push(Violation {
                    trial: None,
                    value: r,
                    message: format!("⟨b*_kΩ, Q b*_kΩ⟩ ({what}) ≠ V(k) n_k²/N at k = {k}"),
                });
            }
        }
        single_pair.push(SinglePairExpectation {
            k,
            matrix: matrix.re,
            direct,
            formula,
        });
    }
    if herm > EXACT_TOL {
        extra.push(Violation {
            trial: None,
            value: herm,
            message: "assembled matrix is not Hermitian".into(),
        });
    }
    if vacuum_expectation != 0.0 {
        extra.push(Violation {
            trial: None,
            value: vacuum_expectation,
            message: "⟨Ω, Q Ω⟩ ≠ 0".into(),
        });
    }
    let worst = single_pair
        .iter()
        .map(|s| (s.matrix - s.formula).abs().max((s.direct - s.formula).abs()) / 1e-12)
        .fold(herm / EXACT_TOL, f64::max);
    let report = VerificationReport {
        check: "quadratic_interaction".into(),
        modeset: modes.into(),
        seed: 0,
        trials: single_pair.len() as u64,
        max_ratio: worst,
        violations: extra,
    };
    Ok(QuadraticInteraction {
        report,
        dimension: basis.len(),
        nonzeros: m.len(),
        hermiticity_residual: herm,
        vacuum_expectation,
        single_pair,
    })
}
