use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{build_fermi_ball, ModelParams};
use crate::momentum::Momentum;

/// Tractability cap on `|holes| + |particles|`.
pub const MAX_MODES: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSet {
    holes: Vec<Momentum>,
    particles: Vec<Momentum>,
    lambda_sq: i64,
    #[serde(skip)]
    index: BTreeMap<Momentum, usize>,
}

impl ModeSet {
    /// Holes from the closed-shell ball of `holes_n` modes, particles up to
    /// `|p|² ≤ lambda_sq`.
    pub fn new(holes_n: u64, lambda_sq: i64) -> Result<Self> {
        let ball = build_fermi_ball(holes_n)?;
        let holes = ball.modes().to_vec();
        let particles: Vec<Momentum> = Momentum::ball(lambda_sq)
            .into_iter()
            .filter(|p| p.norm_sq() > ball.shell_radius_sq())
            .collect();
        if particles.is_empty() {
            return Err(Error::Value(format!(
                "cutoff Λ² = {lambda_sq} leaves no particle modes outside |h|² ≤ {}",
                ball.shell_radius_sq()
            )));
        }
        let total = holes.len() + particles.len();
        if total > MAX_MODES {
            return Err(Error::Value(format!(
                "mode set has {total} modes, cap is {MAX_MODES}"
            )));
        }
        let index = holes
            .iter()
            .chain(particles.iter())
            .enumerate()
            .map(|(i, &m)| (m, i))
            .collect();
        Ok(ModeSet {
            holes,
            particles,
            lambda_sq,
            index,
        })
    }

    pub fn holes(&self) -> &[Momentum] {
        &self.holes
    }

    pub fn particles(&self) -> &[Momentum] {
        &self.particles
    }

    pub fn lambda_sq(&self) -> i64 {
        self.lambda_sq
    }

    pub fn len(&self) -> usize {
        self.holes.len() + self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.holes.len() as u64).expect("hole count is positive")
    }

    pub fn mode(&self, i: usize) -> Momentum {
        if i < self.holes.len() {
            self.holes[i]
        } else {
            self.particles[i - self.holes.len()]
        }
    }

    pub fn is_hole(&self, i: usize) -> bool {
        i < self.holes.len()
    }

    pub fn hole_index(&self, h: &Momentum) -> Option<usize> {
        self.index.get(h).copied().filter(|&i| self.is_hole(i))
    }

    pub fn particle_index(&self, p: &Momentum) -> Option<usize> {
        self.index.get(p).copied().filter(|&i| !self.is_hole(i))
    }

    pub fn hole_mask(&self) -> u64 {
        (1u64 << self.holes.len()) - 1
    }

    /// Index pairs `(p, h)` with `h + k = p`, in hole order.
    pub fn pairs(&self, k: Momentum) -> Vec<(usize, usize)> {
        self.holes
            .iter()
            .enumerate()
            .filter_map(|(hi, &h)| self.particle_index(&(h + k)).map(|pi| (pi, hi)))
            .collect()
    }

    /// Truncated `n_k² = |{h : h + k ∈ particles}|`.
    pub fn nk_sq(&self, k: Momentum) -> u64 {
        self.pairs(k).len() as u64
    }

    /// Truncated `f(k) = n_k^{-2} Σ (p + h)`, as integer sum and count.
    pub fn f_trunc(&self, k: Momentum) -> ([i64; 3], u64) {
        let mut s = [0i64; 3];
        let pairs = self.pairs(k);
        for &(p, h) in &pairs {
            let v = self.mode(p) + self.mode(h);
            s[0] += v.x;
            s[1] += v.y;
            s[2] += v.z;
        }
        (s, pairs.len() as u64)
    }

    /// Transfers `k ≠ 0` with a nonempty truncated lune.
    pub fn transfers(&self) -> Vec<Momentum> {
        let mut ks: Vec<Momentum> = self
            .particles
            .iter()
            .flat_map(|&p| self.holes.iter().map(move |&h| p - h))
            .collect();
        ks.sort();
        ks.dedup();
        ks
    }

    /// All configurations with `j` holes and `j` particles, `j ≤ max_pairs`,
    /// sorted.
    pub fn sector_basis(&self, max_pairs: usize) -> Vec<u64> {
        let nh = self.holes.len();
        let np = self.particles.len();
        let mut out = Vec::new();
        for j in 0..=max_pairs.min(nh).min(np) {
            let hs = subsets(nh, j);
            let ps = subsets(np, j);
            for &h in &hs {
                for &p in &ps {
                    out.push(h | (p << nh));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Bitmasks over `n` items with exactly `size` bits set, increasing.
fn subsets(n: usize, size: usize) -> Vec<u64> {
    if size == 0 {
        return vec![0];
    }
    if size > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut m: u64 = (1u64 << size) - 1;
    let limit = 1u64 << n;
    while m < limit {
        out.push(m);
        // Gosper's hack: next integer with the same popcount.
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}
