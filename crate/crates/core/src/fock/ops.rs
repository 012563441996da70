use super::modes::ModeSet;
use super::state::{Config, SectorState};
use crate::error::{Error, Result};
use crate::lattice::ModelParams;
use crate::momentum::Momentum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// `b̃*_k = Σ a*_p a*_h`.
    Unnormalized,
    /// `b*_k = b̃*_k / n_k` with the truncated `n_k`.
    Normalized,
}

fn parity(c: Config, i: usize) -> f64 {
    if (c & ((1u64 << i) - 1)).count_ones() % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn create_one(c: Config, i: usize) -> Option<(Config, f64)> {
    if c >> i & 1 == 1 {
        None
    } else {
        Some((c | 1 << i, parity(c, i)))
    }
}

fn annihilate_one(c: Config, i: usize) -> Option<(Config, f64)> {
    if c >> i & 1 == 0 {
        None
    } else {
        Some((c & !(1 << i), parity(c, i)))
    }
}

/// `a*_i s` on the mode with global index `i`.
pub fn apply_create(s: &SectorState, i: usize) -> SectorState {
    let mut out = SectorState::zero(s.max_pairs());
    for (c, a) in s.iter() {
        if let Some((c2, sg)) = create_one(c, i) {
            out.accumulate(c2, a * sg);
        }
    }
    out
}

/// `a_i s`.
pub fn apply_annihilate(s: &SectorState, i: usize) -> SectorState {
    let mut out = SectorState::zero(s.max_pairs());
    for (c, a) in s.iter() {
        if let Some((c2, sg)) = annihilate_one(c, i) {
            out.accumulate(c2, a * sg);
        }
    }
    out
}

// Σ w a*_p a*_h (create) or Σ w a_h a_p (annihilate) over (p, h, w).
fn pair_sum(
    s: &SectorState,
    terms: &[(usize, usize, f64)],
    create: bool,
    hole_mask: u64,
) -> Result<SectorState> {
    let mut out = SectorState::zero(s.max_pairs());
    for (c, a) in s.iter() {
        for &(p, h, w) in terms {
            let step = if create {
                create_one(c, h).and_then(|(c1, s1)| create_one(c1, p).map(|(c2, s2)| (c2, s1 * s2)))
            } else {
                annihilate_one(c, p)
                    .and_then(|(c1, s1)| annihilate_one(c1, h).map(|(c2, s2)| (c2, s1 * s2)))
            };
            if let Some((c2, sg)) = step {
                let pairs = (c2 & hole_mask).count_ones() as usize;
                if pairs > s.max_pairs() {
                    return Err(Error::TruncationOverflow {
                        needed: pairs,
                        max_pairs: s.max_pairs(),
                    });
                }
                out.accumulate(c2, a * (sg * w));
            }
        }
    }
    Ok(out)
}

fn pair_terms(modes: &ModeSet, k: Momentum, norm: Normalization) -> Vec<(usize, usize, f64)> {
    let pairs = modes.pairs(k);
    let w = match norm {
        Normalization::Unnormalized => 1.0,
        Normalization::Normalized if pairs.is_empty() => 0.0,
        Normalization::Normalized => 1.0 / (pairs.len() as f64).sqrt(),
    };
    pairs.into_iter().map(|(p, h)| (p, h, w)).collect()
}

/// `b̃*_k s` or `b*_k s`; `b*_0 = 0`.
pub fn apply_pair_create(
    s: &SectorState,
    k: Momentum,
    modes: &ModeSet,
    norm: Normalization,
) -> Result<SectorState> {
    pair_sum(s, &pair_terms(modes, k, norm), true, modes.hole_mask())
}

/// `b̃_k s` or `b_k s`, the adjoint of [`apply_pair_create`].
pub fn apply_pair_annihilate(
    s: &SectorState,
    k: Momentum,
    modes: &ModeSet,
    norm: Normalization,
) -> Result<SectorState> {
    pair_sum(s, &pair_terms(modes, k, norm), false, modes.hole_mask())
}

/// `𝓝 s`.
pub fn apply_number(s: &SectorState) -> SectorState {
    let mut out = SectorState::zero(s.max_pairs());
    for (c, a) in s.iter() {
        out.accumulate(c, a * c.count_ones() as f64);
    }
    out
}

/// `ℍ₀ s`: each configuration times `ħ²(Σ_p |p|² − Σ_h |h|²)`.
pub fn apply_h0(s: &SectorState, modes: &ModeSet, params: &ModelParams) -> SectorState {
    let hbar_sq = params.hbar() * params.hbar();
    let mut out = SectorState::zero(s.max_pairs());
    for (c, a) in s.iter() {
        let mut e: i64 = 0;
        for i in 0..modes.len() {
            if c >> i & 1 == 1 {
                let sq = modes.mode(i).norm_sq();
                e += if modes.is_hole(i) { -sq } else { sq };
            }
        }
        out.accumulate(c, a * (hbar_sq * e as f64));
    }
    out
}

/// The three components of `c*_k s = n_k^{-1} Σ (p + h) a*_p a*_h s`.
pub fn apply_c_create(s: &SectorState, k: Momentum, modes: &ModeSet) -> Result<[SectorState; 3]> {
    let base = pair_terms(modes, k, Normalization::Normalized);
    let mut out: [SectorState; 3] = Default::default();
    for (j, slot) in out.iter_mut().enumerate() {
        let terms: Vec<(usize, usize, f64)> = base
            .iter()
            .map(|&(p, h, w)| {
                let v = (modes.mode(p) + modes.mode(h)).components()[j];
                (p, h, w * v as f64)
            })
            .collect();
        *slot = pair_sum(s, &terms, true, modes.hole_mask())?;
    }
    Ok(out)
}

/// Adjoint components `c_k s`.
pub fn apply_c_annihilate(
    s: &SectorState,
    k: Momentum,
    modes: &ModeSet,
) -> Result<[SectorState; 3]> {
    let base = pair_terms(modes, k, Normalization::Normalized);
    let mut out: [SectorState; 3] = Default::default();
    for (j, slot) in out.iter_mut().enumerate() {
        let terms: Vec<(usize, usize, f64)> = base
            .iter()
            .map(|&(p, h, w)| {
                let v = (modes.mode(p) + modes.mode(h)).components()[j];
                (p, h, w * v as f64)
            })
            .collect();
        *slot = pair_sum(s, &terms, false, modes.hole_mask())?;
    }
    Ok(out)
}

impl Default for SectorState {
    fn default() -> Self {
        SectorState::zero(0)
    }
}
