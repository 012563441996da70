//! Adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Value with an absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Estimate {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive integration of `f` over `[a, b]`: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// `abs_tol` or `max_panels` is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    if !(abs_tol > 0.0) {
        return Err(Error::Value(format!("tolerance must be positive, got {abs_tol}")));
    }
    let first = gk15(&f, a, b);
    if !first.value.is_finite() {
        return Err(Error::ConvergenceFailure(format!(
            "integrand not finite on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, est: first });
    let mut panels = 1;
    loop {
        let error: f64 = heap.iter().map(|p| p.est.error).sum();
        if error <= abs_tol {
            break;
        }
        if panels >= max_panels {
            return Err(Error::ConvergenceFailure(format!(
                "error estimate {error:.3e} above tolerance {abs_tol:.3e} after {panels} panels"
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::ConvergenceFailure(format!(
                "panel [{}, {}] cannot be bisected further",
                worst.a, worst.b
            )));
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let est = gk15(&f, lo, hi);
            if !est.value.is_finite() {
                return Err(Error::ConvergenceFailure(format!(
                    "integrand not finite on [{lo}, {hi}]"
                )));
            }
            heap.push(Panel { a: lo, b: hi, est });
        }
        panels += 1;
    }
    // Sum small panels first.
    let mut parts: Vec<Panel> = heap.into_vec();
    parts.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = crate::sum::ordered_sum(parts.iter().map(|p| p.est.value));
    let error = parts.iter().map(|p| p.est.error).sum();
    Ok(Estimate { value, error })
}

/// Integral over `[0, cutoff]` split into the dyadic panels
/// `[0, 1], [1, 2], [2, 4], …`, each integrated adaptively. Suited to
/// integrands concentrated near the origin with algebraic decay.
pub fn integrate_dyadic<F: Fn(f64) -> f64>(
    f: F,
    cutoff: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<Estimate> {
    let mut edges = vec![0.0];
    let mut x = 1.0f64;
    while x < cutoff {
        edges.push(x);
        x *= 2.0;
    }
    edges.push(cutoff.max(1.0));
    let share = abs_tol / (edges.len() - 1) as f64;
    let mut value = crate::sum::CompensatedSum::new();
    let mut error = 0.0;
    for w in edges.windows(2) {
        let e = integrate(&f, w[0], w[1], share, max_panels)?;
        value.add(e.value);
        error += e.error;
    }
    Ok(Estimate {
        value: value.value(),
        error,
    })
}
