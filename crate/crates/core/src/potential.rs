//! The interaction through its Fourier coefficients `V̂(k)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::momentum::Momentum;
use crate::sum::ordered_sum;

/// Finitely supported, even, real Fourier coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Potential {
    coeffs: BTreeMap<Momentum, f64>,
    support_radius_sq: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    support_radius_sq: i64,
    coeffs: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    k: Momentum,
    v: f64,
}

impl Potential {
    /// Builds a potential from explicit entries, completing `−k` by evenness.
    pub fn from_entries<I>(support_radius_sq: i64, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Momentum, f64)>,
    {
        if support_radius_sq < 0 {
            return Err(Error::Value(format!(
                "support_radius_sq must be non-negative, got {support_radius_sq}"
            )));
        }
        let mut explicit: BTreeMap<Momentum, f64> = BTreeMap::new();
        for (k, v) in entries {
            if !v.is_finite() {
                return Err(Error::Value(format!("coefficient at {k} is not finite")));
            }
            if k.norm_sq() > support_radius_sq {
                return Err(Error::Value(format!(
                    "coefficient at {k} lies outside |k|² <= {support_radius_sq}"
                )));
            }
            if explicit.insert(k, v).is_some() {
                return Err(Error::Parse(format!("duplicate coefficient for k = {k}")));
            }
        }
        let mut coeffs = explicit.clone();
        for (&k, &v) in &explicit {
            match explicit.get(&-k) {
                Some(&w) if w != v => {
                    return Err(Error::Symmetry {
                        k,
                        value: v,
                        neg: -k,
                        neg_value: w,
                    })
                }
                Some(_) => {}
                None => {
                    coeffs.insert(-k, v);
                }
            }
        }
        Ok(Potential {
            coeffs,
            support_radius_sq,
        })
    }

    /// Parses a potential document (UTF-8 JSON).
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: Document =
            serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_entries(doc.support_radius_sq, doc.coeffs.into_iter().map(|e| (e.k, e.v)))
    }

    /// Serializes every stored coefficient (both `k` and `−k`) in mode order.
    pub fn to_json(&self) -> String {
        let doc = Document {
            support_radius_sq: self.support_radius_sq,
            coeffs: self.coeffs.iter().map(|(&k, &v)| Entry { k, v }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("finite coefficients always serialize")
    }

    pub fn zero(support_radius_sq: i64) -> Self {
        Potential {
            coeffs: BTreeMap::new(),
            support_radius_sq: support_radius_sq.max(0),
        }
    }

    pub fn support_radius_sq(&self) -> i64 {
        self.support_radius_sq
    }

    pub fn get(&self, k: &Momentum) -> f64 {
        self.coeffs.get(k).copied().unwrap_or(0.0)
    }

    /// All stored coefficients, including zeros, in mode order.
    pub fn iter(&self) -> impl Iterator<Item = (Momentum, f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    /// Stored momenta with `k ≠ 0`; correlation sums run over exactly these.
    pub fn nonzero_modes(&self) -> impl Iterator<Item = (Momentum, f64)> + '_ {
        self.iter().filter(|(k, _)| !k.is_zero())
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale_coupling(&self, s: f64) -> Potential {
        Potential {
            coeffs: self.coeffs.iter().map(|(&k, &v)| (k, v * s)).collect(),
            support_radius_sq: self.support_radius_sq,
        }
    }

    /// `Σ_k |V̂(k)|`, including `k = 0`.
    pub fn l1_norm(&self) -> f64 {
        ordered_sum(self.coeffs.values().map(|v| v.abs()))
    }

    /// Checks `V̂(k) >= 0` for every stored `k`.
    pub fn require_non_negative(&self) -> Result<()> {
        match self.coeffs.iter().find(|(_, &v)| v < 0.0) {
            Some((k, v)) => Err(Error::Value(format!(
                "positivity required but V({k}) = {v} < 0"
            ))),
            None => Ok(()),
        }
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}
