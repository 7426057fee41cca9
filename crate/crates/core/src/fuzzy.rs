//! Piecewise-linear membership functions mapping raw quantities into [0, 1].

use serde::{Deserialize, Serialize};

/// Rising ramp: 0 at or below `lo`, 1 at or above `hi`, linear between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub lo: f64,
    pub hi: f64,
}

impl Ramp {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }

    pub fn rising(&self, v: f64) -> f64 {
        if v.is_nan() {
            return 0.0;
        }
        clamp01((v - self.lo) / (self.hi - self.lo))
    }

    /// Mirror image: 1 at or below `lo`, 0 at or above `hi`.
    pub fn falling(&self, v: f64) -> f64 {
        if v.is_nan() {
            return 0.0;
        }
        1.0 - self.rising(v)
    }
}

pub fn clamp01(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

pub fn in_unit(v: f64) -> bool {
    (0.0..=1.0).contains(&v)
}

/// Dot product of weights and terms.
pub fn weighted_sum(weights: &[f64], terms: &[f64]) -> f64 {
    debug_assert_eq!(weights.len(), terms.len());
    weights.iter().zip(terms).map(|(w, t)| w * t).sum()
}
