//! Permutations in one-line notation and their lexicographic indexing.
//!
//! `sigma.one_line()[k]` is the candidate in place `k + 1`; candidates are
//! 1-based. Indices returned by [`perm_rank`] are 1-based as well, so the
//! identity has rank 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, RatVector};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(one_line: Vec<usize>) -> Result<Self> {
        let n = one_line.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty word".into()));
        }
        let mut seen = vec![false; n];
        for &c in &one_line {
            if c == 0 || c > n || seen[c - 1] {
                return Err(Error::InvalidPermutation(format!("{one_line:?} is not a permutation of 1..={n}")));
            }
            seen[c - 1] = true;
        }
        Ok(Permutation(one_line))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((1..=n).collect())
    }

    /// The cyclic shift `j ↦ j + k (mod n)`; the `n` shifts partition `J`.
    pub fn cyclic_shift(n: usize, k: usize) -> Self {
        Permutation((0..n).map(|j| (j + k) % n + 1).collect())
    }

    /// Builds a permutation from cycle notation, e.g. `[[1, 2, 4]]` maps 1→2→4→1.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut image: Vec<usize> = (1..=n).collect();
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n {
                    return Err(Error::InvalidPermutation(format!("cycle {cycle:?} out of range")));
                }
                image[a - 1] = b;
            }
        }
        Permutation::new(image)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn one_line(&self) -> &[usize] {
        &self.0
    }

    /// Candidate in place `k` (1-based).
    pub fn at(&self, k: usize) -> usize {
        self.0[k - 1]
    }

    /// Place held by candidate `c` (1-based), i.e. `σ⁻¹(c)`.
    pub fn position_of(&self, c: usize) -> usize {
        self.0.iter().position(|&x| x == c).expect("candidate in range") + 1
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (k, &c) in self.0.iter().enumerate() {
            inv[c - 1] = k + 1;
        }
        Permutation(inv)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        Permutation::new(v).map_err(serde::de::Error::custom)
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn perm_rank(sigma: &Permutation) -> u64 {
    let n = sigma.n();
    let mut used = vec![false; n + 1];
    let mut rank = 0;
    for (k, &c) in sigma.0.iter().enumerate() {
        let smaller_unused = (1..c).filter(|&d| !used[d]).count() as u64;
        rank += smaller_unused * factorial(n - 1 - k);
        used[c] = true;
    }
    rank + 1
}

pub fn perm_unrank(n: usize, index: u64) -> Result<Permutation> {
    let max = factorial(n);
    if n == 0 || index == 0 || index > max {
        return Err(Error::IndexOutOfRange { index, max });
    }
    let mut remaining: Vec<usize> = (1..=n).collect();
    let mut r = index - 1;
    let mut word = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let f = factorial(k);
        let q = (r / f) as usize;
        r %= f;
        word.push(remaining.remove(q));
    }
    Ok(Permutation(word))
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    let mut next = Some((1..=n).collect::<Vec<_>>());
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut w = current.clone();
        // Standard next-lexicographic-permutation step.
        if let Some(i) = (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1]) {
            let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).expect("successor exists");
            w.swap(i, j);
            w[i + 1..].reverse();
            next = Some(w);
        }
        Some(Permutation(current))
    })
}

/// `R_σ` with `R_σ(i, j) = 1` iff `σ(j) = i`.
pub fn permutation_matrix(sigma: &Permutation) -> RatMatrix {
    let n = sigma.n();
    let mut m = RatMatrix::zeros(n, n);
    for (j, &c) in sigma.0.iter().enumerate() {
        m[(c - 1, j)] = Rational::one();
    }
    m
}

/// `σw = R_σ w`: entry `i` is `w[σ⁻¹(i)]`, the points candidate `i` gets from one `σ` ballot.
pub fn permute_weight(sigma: &Permutation, w: &RatVector) -> Result<RatVector> {
    if sigma.n() != w.dim() {
        return Err(Error::DimensionMismatch { expected: sigma.n(), found: w.dim() });
    }
    let mut out = RatVector::zeros(w.dim());
    for (k, &c) in sigma.0.iter().enumerate() {
        out[c - 1] = w[k].clone();
    }
    Ok(out)
}
