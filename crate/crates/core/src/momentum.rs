use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A plane-wave mode `k ∈ Z³`.
///
/// Ordering is the global mode order used everywhere in the crate: first by
/// `|k|²`, then lexicographically by `(x, y, z)`. Fermionic signs in the Fock
/// engine and the order of every floating-point reduction follow it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 3]", into = "[i64; 3]")]
pub struct Momentum {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl Momentum {
    pub const ZERO: Momentum = Momentum { x: 0, y: 0, z: 0 };

    pub const fn new(x: i64, y: i64, z: i64) -> Self {
        Momentum { x, y, z }
    }

    pub const fn norm_sq(&self) -> i64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub const fn dot(&self, other: &Momentum) -> i64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub const fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0 && self.z == 0
    }

    pub fn components(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    /// All lattice points with `|k|² <= radius_sq`, in mode order.
    pub fn ball(radius_sq: i64) -> Vec<Momentum> {
        if radius_sq < 0 {
            return Vec::new();
        }
        let r = isqrt(radius_sq as u64) as i64;
        let mut out = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                for z in -r..=r {
                    let k = Momentum::new(x, y, z);
                    if k.norm_sq() <= radius_sq {
                        out.push(k);
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Integer square root, `floor(sqrt(n))`.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl Ord for Momentum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.norm_sq()
            .cmp(&other.norm_sq())
            .then_with(|| self.components().cmp(&other.components()))
    }
}

impl PartialOrd for Momentum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Momentum {
    type Output = Momentum;
    fn add(self, rhs: Momentum) -> Momentum {
        Momentum::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Momentum {
    type Output = Momentum;
    fn sub(self, rhs: Momentum) -> Momentum {
        Momentum::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Momentum {
    type Output = Momentum;
    fn neg(self) -> Momentum {
        Momentum::new(-self.x, -self.y, -self.z)
    }
}

impl From<[i64; 3]> for Momentum {
    fn from(c: [i64; 3]) -> Self {
        Momentum::new(c[0], c[1], c[2])
    }
}

impl From<Momentum> for [i64; 3] {
    fn from(k: Momentum) -> Self {
        k.components()
    }
}

impl fmt::Display for Momentum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}
