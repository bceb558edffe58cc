use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RatVector;
use crate::rational::Rational;

/// A weakly decreasing, sum-zero weighting vector (a member of the closed cone W̄).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct WeightVector(RatVector);

impl WeightVector {
    pub fn new(w: RatVector) -> Result<Self> {
        if w.dim() == 0 {
            return Err(Error::InvalidWeights("empty weight vector".into()));
        }
        if !is_weakly_decreasing(&w) {
            return Err(Error::InvalidWeights(format!("{w:?} is not weakly decreasing")));
        }
        if !w.sum().is_zero() {
            return Err(Error::InvalidWeights(format!("{w:?} does not sum to zero")));
        }
        Ok(WeightVector(w))
    }

    /// Like [`WeightVector::new`] but additionally requires strictly decreasing entries (W).
    pub fn new_strict(w: RatVector) -> Result<Self> {
        let w = Self::new(w)?;
        if !w.is_strict() {
            return Err(Error::InvalidWeights(format!("{:?} is not strictly decreasing", w.0)));
        }
        Ok(w)
    }

    pub fn is_strict(&self) -> bool {
        self.0.windows(2).all(|p| p[0] > p[1])
    }

    pub fn as_vector(&self) -> &RatVector {
        &self.0
    }

    pub fn into_vector(self) -> RatVector {
        self.0
    }

    /// Smallest successive gap `w_k − w_{k+1}`.
    pub fn min_gap(&self) -> Option<Rational> {
        self.0.windows(2).map(|p| &p[0] - &p[1]).min()
    }
}

impl Deref for WeightVector {
    type Target = RatVector;
    fn deref(&self) -> &RatVector {
        &self.0
    }
}

impl<'de> Deserialize<'de> for WeightVector {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = RatVector::deserialize(deserializer)?;
        WeightVector::new(v).map_err(serde::de::Error::custom)
    }
}

pub fn is_weakly_decreasing(v: &RatVector) -> bool {
    v.windows(2).all(|p| p[0] >= p[1])
}

/// Subtracts the mean of a weakly decreasing `y`, landing in W̄ without
/// changing the face of any tally.
pub fn project_sum_zero(y: &RatVector) -> Result<WeightVector> {
    if y.dim() == 0 {
        return Err(Error::InvalidWeights("empty weight vector".into()));
    }
    if !is_weakly_decreasing(y) {
        return Err(Error::InvalidWeights(format!("{y:?} is not weakly decreasing")));
    }
    let mean = y.sum() / Rational::from_integer(y.dim() as i64);
    WeightVector::new(y.shift(&-mean))
}
