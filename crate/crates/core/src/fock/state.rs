use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::sum::CompensatedSum;

/// Occupation bitset over holes then particles.
pub type Config = u64;

/// Finite superposition of configurations with at most `max_pairs` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    amps: BTreeMap<Config, Complex64>,
    max_pairs: usize,
}

impl SectorState {
    pub fn zero(max_pairs: usize) -> Self {
        SectorState {
            amps: BTreeMap::new(),
            max_pairs,
        }
    }

    pub fn vacuum(max_pairs: usize) -> Self {
        let mut s = SectorState::zero(max_pairs);
        s.amps.insert(0, Complex64::new(1.0, 0.0));
        s
    }

    pub fn basis(config: Config, max_pairs: usize) -> Self {
        let mut s = SectorState::zero(max_pairs);
        s.amps.insert(config, Complex64::new(1.0, 0.0));
        s
    }

    pub fn from_amplitudes(amps: BTreeMap<Config, Complex64>, max_pairs: usize) -> Self {
        SectorState { amps, max_pairs }
    }

    pub fn max_pairs(&self) -> usize {
        self.max_pairs
    }

    pub fn amplitude(&self, c: Config) -> Complex64 {
        self.amps.get(&c).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Config, Complex64)> + '_ {
        self.amps.iter().map(|(&c, &a)| (c, a))
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub(crate) fn accumulate(&mut self, c: Config, a: Complex64) {
        *self.amps.entry(c).or_default() += a;
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).collect::<CompensatedSum>().value()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &SectorState) -> Complex64 {
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        for (c, a) in &self.amps {
            if let Some(b) = other.amps.get(c) {
                let z = a.conj() * b;
                re.add(z.re);
                im.add(z.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// Largest amplitude modulus.
    pub fn max_abs(&self) -> f64 {
        self.amps.values().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, z: Complex64) -> SectorState {
        SectorState {
            amps: self.amps.iter().map(|(&c, &a)| (c, a * z)).collect(),
            max_pairs: self.max_pairs,
        }
    }

    /// Every configuration has as many holes as particles.
    pub fn is_pair_balanced(&self, hole_mask: u64) -> bool {
        self.amps
            .keys()
            .all(|c| (c & hole_mask).count_ones() == (c & !hole_mask).count_ones())
    }

    fn combine(&self, other: &SectorState, sign: f64) -> SectorState {
        let mut out = self.clone();
        out.max_pairs = self.max_pairs.max(other.max_pairs);
        for (c, a) in &other.amps {
            out.accumulate(*c, a * sign);
        }
        out
    }
}

impl Add for &SectorState {
    type Output = SectorState;
    fn add(self, rhs: &SectorState) -> SectorState {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &SectorState {
    type Output = SectorState;
    fn sub(self, rhs: &SectorState) -> SectorState {
        self.combine(rhs, -1.0)
    }
}

impl Mul<f64> for &SectorState {
    type Output = SectorState;
    fn mul(self, rhs: f64) -> SectorState {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_unit() {
        let v = SectorState::vacuum(2);
        assert_eq!(v.norm_sq(), 1.0);
        assert_eq!(v.amplitude(0), Complex64::new(1.0, 0.0));
        assert!(SectorState::zero(2).is_empty());
    }

    #[test]
    fn arithmetic() {
        let a = SectorState::basis(0b11, 2);
        let b = SectorState::basis(0b101, 2).scale(Complex64::new(0.0, 2.0));
        let s = &a + &b;
        assert_eq!(s.norm_sq(), 5.0);
        assert_eq!(a.inner(&s), Complex64::new(1.0, 0.0));
        assert_eq!(b.inner(&s), Complex64::new(4.0, 0.0));
        let d = &s - &s;
        assert_eq!(d.max_abs(), 0.0);
        assert_eq!((&a * 3.0).norm_sq(), 9.0);
    }
}
