//! The closed-shell Fermi ball and its exact lattice sums.
//!
//! `n_k²` (the lune count) and `k·f(k)` are computed with integer arithmetic;
//! only the final division produces a float.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::momentum::{isqrt, Momentum};

/// Particle number and the semiclassical parameter `hbar = N^{-1/3}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    n: u64,
    hbar: f64,
}

impl ModelParams {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Value("particle number must be positive".into()));
        }
        Ok(ModelParams {
            n,
            hbar: (n as f64).powf(-1.0 / 3.0),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Continuum Fermi momentum `(3N/4π)^{1/3}`.
    pub fn kf_continuum(&self) -> f64 {
        (3.0 * self.n as f64 / (4.0 * PI)).cbrt()
    }
}

/// The set of the `N` lowest plane-wave modes, which must fill a lattice
/// ball exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiBall {
    n: u64,
    shell_radius_sq: i64,
    modes: Vec<Momentum>,
    kf_continuum: f64,
}

impl FermiBall {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn shell_radius_sq(&self) -> i64 {
        self.shell_radius_sq
    }

    /// Modes in the global order `(|h|², lex)`.
    pub fn modes(&self) -> &[Momentum] {
        &self.modes
    }

    pub fn kf_continuum(&self) -> f64 {
        self.kf_continuum
    }

    #[inline]
    pub fn contains(&self, h: &Momentum) -> bool {
        h.norm_sq() <= self.shell_radius_sq
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.n).expect("a Fermi ball is never empty")
    }
}

/// Number of lattice points on each sphere `|h|² = s` for `s <= max_radius_sq`.
fn shell_multiplicities(max_radius_sq: i64) -> Vec<u64> {
    let max = max_radius_sq.max(0);
    let r = isqrt(max as u64) as i64;
    let mut counts = vec![0u64; max as usize + 1];
    for x in -r..=r {
        let rx = x * x;
        for y in -r..=r {
            let ry = rx + y * y;
            if ry > max {
                continue;
            }
            for z in -r..=r {
                let s = ry + z * z;
                if s <= max {
                    counts[s as usize] += 1;
                }
            }
        }
    }
    counts
}

/// Every closed-shell size `(s, N(s))` with `N(s) = |{h : |h|² <= s}|`, for
/// the radii `s <= max_radius_sq` that are sums of three squares.
pub fn closed_shell_sizes(max_radius_sq: i64) -> Vec<(i64, u64)> {
    if max_radius_sq < 0 {
        return Vec::new();
    }
    let mut total = 0u64;
    shell_multiplicities(max_radius_sq)
        .into_iter()
        .enumerate()
        .filter_map(|(s, c)| {
            if c == 0 {
                return None;
            }
            total += c;
            Some((s as i64, total))
        })
        .collect()
}

/// The closed-shell Fermi ball with exactly `n` modes.
pub fn build_fermi_ball(n: u64) -> Result<FermiBall> {
    if n == 0 {
        return Err(Error::Value("particle number must be positive".into()));
    }
    let estimate = (3.0 * n as f64 / (4.0 * PI)).cbrt();
    let mut max_sq = ((estimate + 2.0) * (estimate + 2.0)).ceil() as i64;
    let shells = loop {
        let shells = closed_shell_sizes(max_sq);
        if shells.last().is_some_and(|&(_, c)| c >= n) {
            break shells;
        }
        max_sq *= 2;
    };
    let shell_radius_sq = shells
        .iter()
        .find(|&&(_, c)| c == n)
        .map(|&(s, _)| s)
        .ok_or(Error::NotClosedShell { n })?;
    let modes = Momentum::ball(shell_radius_sq);
    debug_assert_eq!(modes.len() as u64, n);
    Ok(FermiBall {
        n,
        shell_radius_sq,
        modes,
        kf_continuum: ModelParams::new(n)?.kf_continuum(),
    })
}

/// `n_k² = |{h ∈ B_F : h + k ∉ B_F}|`, optionally with the pairs `(p, h)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuneCount {
    pub k: Momentum,
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(Momentum, Momentum)>>,
}

impl LuneCount {
    pub fn nk(&self) -> f64 {
        (self.count as f64).sqrt()
    }
}

pub fn lune_count(ball: &FermiBall, k: Momentum, with_pairs: bool) -> LuneCount {
    if with_pairs {
        let pairs: Vec<(Momentum, Momentum)> = ball
            .modes()
            .iter()
            .filter(|h| !ball.contains(&(**h + k)))
            .map(|&h| (h + k, h))
            .collect();
        return LuneCount {
            k,
            count: pairs.len() as u64,
            pairs: Some(pairs),
        };
    }
    let count = ball
        .modes()
        .par_iter()
        .filter(|h| !ball.contains(&(**h + k)))
        .count() as u64;
    LuneCount {
        k,
        count,
        pairs: None,
    }
}

/// Continuum lens formula `n_k = sqrt(π k_F² |k| − (π/12)|k|³)`.
pub fn nk_asymptotic(params: &ModelParams, k: Momentum) -> Result<f64> {
    let kf = params.kf_continuum();
    let kn = k.norm();
    if kn > 2.0 * kf {
        return Err(Error::Domain(format!(
            "|k| = {kn} exceeds the ball diameter 2 k_F = {}",
            2.0 * kf
        )));
    }
    Ok((PI * kf * kf * kn - PI / 12.0 * kn.powi(3)).max(0.0).sqrt())
}

/// `k·f(k)` as the exact ratio of two integers, plus the vector `f(k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticCoefficient {
    pub k: Momentum,
    /// `Σ k·(p + h)` over the lune pairs.
    pub numerator: i64,
    /// `n_k²`.
    pub denominator: u64,
    pub f_vec: [f64; 3],
}

impl KineticCoefficient {
    pub fn kdotf(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

pub fn kinetic_coefficient(ball: &FermiBall, k: Momentum) -> Result<KineticCoefficient> {
    let (count, vsum) = ball
        .modes()
        .par_iter()
        .filter(|h| !ball.contains(&(**h + k)))
        .map(|h| {
            let s = *h + *h + k;
            (1u64, [s.x, s.y, s.z])
        })
        .reduce(
            || (0u64, [0i64; 3]),
            |a, b| (a.0 + b.0, [a.1[0] + b.1[0], a.1[1] + b.1[1], a.1[2] + b.1[2]]),
        );
    if count == 0 {
        return Err(Error::EmptyLune { k });
    }
    let numerator = k.x * vsum[0] + k.y * vsum[1] + k.z * vsum[2];
    let c = count as f64;
    Ok(KineticCoefficient {
        k,
        numerator,
        denominator: count,
        f_vec: [vsum[0] as f64 / c, vsum[1] as f64 / c, vsum[2] as f64 / c],
    })
}

/// Leading-order `k·f(k) = |k| N^{1/3} (4/(3√π))^{2/3}`.
pub fn kinetic_coefficient_asymptotic(params: &ModelParams, k: Momentum) -> Result<f64> {
    if k.is_zero() {
        return Err(Error::Domain("k·f(k) is undefined at k = 0".into()));
    }
    Ok(k.norm() * (params.n() as f64).cbrt() * kinetic_constant())
}

/// `(4/(3√π))^{2/3}`.
pub fn kinetic_constant() -> f64 {
    (4.0 / (3.0 * PI.sqrt())).powf(2.0 / 3.0)
}

/// `(3√π/4)^{2/3}`, the reciprocal of [`kinetic_constant`].
pub fn lune_constant() -> f64 {
    (0.75 * PI.sqrt()).powf(2.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e1() -> Momentum {
        Momentum::new(1, 0, 0)
    }

    #[test]
    fn closed_shell_examples() {
        assert_eq!(closed_shell_sizes(0), vec![(0, 1)]);
        assert_eq!(closed_shell_sizes(1), vec![(0, 1), (1, 7)]);
        let s4 = closed_shell_sizes(4);
        for want in [(2, 19), (3, 27), (4, 33)] {
            assert!(s4.contains(&want), "{want:?} missing from {s4:?}");
        }
        // 7 = 4 + 2 + 1 is not a sum of three squares
        assert!(closed_shell_sizes(8).iter().all(|&(s, _)| s != 7));
    }

    #[test]
    fn closed_shell_sizes_strictly_increase() {
        let s = closed_shell_sizes(200);
        assert!(s.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1));
    }

    #[test]
    fn ball_examples() {
        let b1 = build_fermi_ball(1).unwrap();
        assert_eq!(b1.modes(), &[Momentum::ZERO]);
        assert_eq!(b1.shell_radius_sq(), 0);

        let b7 = build_fermi_ball(7).unwrap();
        assert_eq!(b7.shell_radius_sq(), 1);
        assert_eq!(b7.modes()[0], Momentum::ZERO);
        assert!(b7.modes()[1..].iter().all(|h| h.norm_sq() == 1));

        assert_eq!(build_fermi_ball(2), Err(Error::NotClosedShell { n: 2 }));
        assert_eq!(build_fermi_ball(34), Err(Error::NotClosedShell { n: 34 }));
    }

    #[test]
    fn large_shells_match_enumeration() {
        for (s, n) in [(64, 2109), (256, 17077)] {
            let b = build_fermi_ball(n).unwrap();
            assert_eq!(b.shell_radius_sq(), s);
            assert!(b.modes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn lune_examples() {
        let b7 = build_fermi_ball(7).unwrap();
        assert_eq!(lune_count(&b7, Momentum::ZERO, false).count, 0);
        let l = lune_count(&b7, e1(), true);
        assert_eq!(l.count, 5);
        let pairs = l.pairs.unwrap();
        let holes: Vec<Momentum> = pairs.iter().map(|&(_, h)| h).collect();
        let mut want = vec![
            Momentum::new(1, 0, 0),
            Momentum::new(0, 1, 0),
            Momentum::new(0, -1, 0),
            Momentum::new(0, 0, 1),
            Momentum::new(0, 0, -1),
        ];
        want.sort();
        assert_eq!(holes, want);
        for (p, h) in pairs {
            assert_eq!(p, h + e1());
            assert!(b7.contains(&h) && !b7.contains(&p));
        }
    }

    #[test]
    fn lune_is_even_on_n33() {
        let b = build_fermi_ball(33).unwrap();
        for k in Momentum::ball(9) {
            assert_eq!(
                lune_count(&b, k, false).count,
                lune_count(&b, -k, false).count,
                "k = {k}"
            );
        }
    }

    #[test]
    fn pairs_and_count_agree() {
        let b = build_fermi_ball(123).unwrap();
        for k in Momentum::ball(6) {
            let with = lune_count(&b, k, true);
            let without = lune_count(&b, k, false);
            assert_eq!(with.count, without.count);
            assert_eq!(with.pairs.unwrap().len() as u64, with.count);
        }
    }

    #[test]
    fn nk_asymptotic_examples() {
        let p7 = ModelParams::new(7).unwrap();
        assert_eq!(nk_asymptotic(&p7, Momentum::ZERO).unwrap(), 0.0);
        let want = (PI * (21.0 / (4.0 * PI)).powf(2.0 / 3.0) - PI / 12.0).sqrt();
        assert_relative_eq!(nk_asymptotic(&p7, e1()).unwrap(), want, max_relative = 1e-14);
        assert!(matches!(
            nk_asymptotic(&p7, Momentum::new(4, 0, 0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn nk_asymptotic_matches_semiclassical_form() {
        // π k_F² |k| = |k| (3√π/4)^{2/3} N ħ
        for n in [33u64, 2109, 17077] {
            let p = ModelParams::new(n).unwrap();
            for k in [e1(), Momentum::new(1, 1, 0), Momentum::new(2, 1, 1)] {
                let kn = k.norm();
                let alt = (kn * lune_constant() * n as f64 * p.hbar() - PI / 12.0 * kn.powi(3)).sqrt();
                assert_relative_eq!(nk_asymptotic(&p, k).unwrap(), alt, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn kinetic_coefficient_n7() {
        let b7 = build_fermi_ball(7).unwrap();
        let c = kinetic_coefficient(&b7, e1()).unwrap();
        assert_eq!((c.numerator, c.denominator), (7, 5));
        assert_relative_eq!(c.kdotf(), 1.4);
        assert_relative_eq!(c.f_vec[0], 7.0 / 5.0);
        assert_eq!(c.f_vec[1], 0.0);
        assert_eq!(
            kinetic_coefficient(&b7, Momentum::ZERO),
            Err(Error::EmptyLune { k: Momentum::ZERO })
        );
    }

    #[test]
    fn kinetic_coefficient_is_positive_and_even() {
        let b = build_fermi_ball(33).unwrap();
        for k in Momentum::ball(9).into_iter().filter(|k| !k.is_zero()) {
            let c = kinetic_coefficient(&b, k).unwrap();
            let m = kinetic_coefficient(&b, -k).unwrap();
            assert!(c.numerator > 0, "k = {k}");
            assert_eq!((c.numerator, c.denominator), (m.numerator, m.denominator));
        }
    }

    #[test]
    fn unit_transfer_sum_equals_particle_number() {
        // Along a unit direction each lattice row contributes 2m+1 = its length.
        for n in [7u64, 33, 257, 2109] {
            let b = build_fermi_ball(n).unwrap();
            assert_eq!(kinetic_coefficient(&b, e1()).unwrap().numerator, n as i64);
        }
    }

    #[test]
    fn kinetic_asymptotic_examples() {
        let p1 = ModelParams::new(1).unwrap();
        let v = kinetic_coefficient_asymptotic(&p1, e1()).unwrap();
        assert_relative_eq!(v, 0.827_133_987_865_866_7, max_relative = 1e-14);
        let p = ModelParams::new(1000).unwrap();
        let p8 = ModelParams::new(8000).unwrap();
        let k = Momentum::new(1, 2, 0);
        assert_relative_eq!(
            kinetic_coefficient_asymptotic(&p8, k).unwrap() / kinetic_coefficient_asymptotic(&p, k).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert!(kinetic_coefficient_asymptotic(&p, Momentum::ZERO).is_err());
        assert_relative_eq!(kinetic_constant() * lune_constant(), 1.0, max_relative = 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn membership_agrees_with_mode_set(x in -8i64..=8, y in -8i64..=8, z in -8i64..=8) {
            let b = build_fermi_ball(257).unwrap();
            let k = Momentum::new(x, y, z);
            prop_assert_eq!(b.contains(&k), b.modes().binary_search(&k).is_ok());
        }
    }
}
