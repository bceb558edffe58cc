//! Which rankings can a fixed profile produce as the weights range over W̄?
//!
//! With `v_k = (k/n)·1 − (e_{n−k+1} + … + e_n)` every `w ∈ W̄` is a conical
//! combination `Σ b_k v_{n−k}`, and `Q_p v_{n−k} = t_k − (kN/n)·1` where `t_k`
//! is the sum of the first `k` columns of `Q_p`. Up to a multiple of `1` the
//! results vector is therefore `Σ b_k t_k`, and a face is reachable iff it
//! meets the convex hull of the `t_k`. Each face test is a small exact LP.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::RatVector;
use crate::rational::Rational;
use crate::simplex::{simplex_max, LpProblem, LpStatus, Relation, VarBound};
use crate::voting::{
    all_permutations, all_rankings, face_of, factorial, tally, Ranking, TallyMatrix, WeightVector, MAX_DENSE_CANDIDATES,
};

/// Largest `n` for which tied faces are enumerated.
pub const MAX_FACE_CANDIDATES: usize = 5;

/// `v_1, …, v_{n−1}`.
pub fn weight_basis(n: usize) -> Result<Vec<WeightVector>> {
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: usize::MAX });
    }
    (1..n)
        .map(|k| {
            let mut v = RatVector::ones(n).scale(&Rational::new(k as i64, n as i64));
            for j in n - k..n {
                v[j] -= Rational::one();
            }
            WeightVector::new(v)
        })
        .collect()
}

/// `t_k = q_1 + … + q_k` for `k = 1..n−1`.
pub fn prefix_sums(q: &TallyMatrix) -> Vec<RatVector> {
    let m = q.matrix();
    let n = q.n();
    let mut acc = RatVector::zeros(n);
    (0..n.saturating_sub(1))
        .map(|k| {
            acc = acc.add(&m.column(k)).expect("same dim");
            acc.clone()
        })
        .collect()
}

/// `Σ b_k v_{n−k}`.
pub fn weight_from_coefficients(n: usize, b: &RatVector) -> Result<WeightVector> {
    if b.dim() + 1 != n {
        return Err(Error::DimensionMismatch { expected: n.saturating_sub(1), found: b.dim() });
    }
    if b.iter().any(Rational::is_negative) {
        return Err(Error::InvalidCoefficients(format!("{b:?} has a negative entry")));
    }
    if b.is_zero() {
        return Err(Error::InvalidCoefficients("all coefficients are zero".into()));
    }
    let basis = weight_basis(n)?;
    let terms: Vec<(Rational, &RatVector)> =
        b.iter().enumerate().map(|(k, bk)| (bk.clone(), basis[n - 2 - k].as_vector())).collect();
    WeightVector::new(RatVector::linear_combination(n, &terms)?)
}

/// `Σ b_k t_k`.
pub fn hull_point(t: &[RatVector], b: &RatVector) -> Result<RatVector> {
    let n = t.first().map_or(0, RatVector::dim);
    let terms: Vec<(Rational, &RatVector)> = b.iter().cloned().zip(t.iter()).collect();
    RatVector::linear_combination(n, &terms)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceTest {
    pub reachable: bool,
    /// A probability vector with `Σ b_k t_k` in the face, when reachable.
    pub witness: Option<RatVector>,
    /// Optimal gap between consecutive blocks (`None` for the all-tie face).
    pub margin: Option<Rational>,
}

/// Maximizes the smallest gap `ε` between consecutive blocks over the convex
/// hull of `t`, holding tied candidates equal. Reachable iff `ε > 0`.
pub fn is_face_reachable(t: &[RatVector], target: &Ranking) -> Result<FaceTest> {
    let n = target.num_candidates();
    if n < 2 {
        return Err(Error::InvalidRanking("need at least two candidates".into()));
    }
    if t.len() != n - 1 {
        return Err(Error::DimensionMismatch { expected: n - 1, found: t.len() });
    }
    if let Some(bad) = t.iter().find(|v| v.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
    }
    let m = n - 1;
    let blocks = target.blocks();
    let has_gap = blocks.len() > 1;
    let vars = if has_gap { m + 1 } else { m };

    let mut objective = RatVector::zeros(vars);
    let mut bounds = vec![VarBound::NonNegative; m];
    if has_gap {
        objective[m] = Rational::one();
        bounds.push(VarBound::Free);
    }
    let mut lp = LpProblem::new(objective, bounds)?;
    let diff = |a: usize, c: usize| -> Vec<Rational> {
        let mut row: Vec<Rational> = t.iter().map(|tk| &tk[a - 1] - &tk[c - 1]).collect();
        row.resize(vars, Rational::zero());
        row
    };

    let mut sum = vec![Rational::one(); m];
    sum.resize(vars, Rational::zero());
    lp.add_constraint(sum, Relation::Eq, Rational::one())?;
    for block in blocks {
        for pair in block.windows(2) {
            lp.add_constraint(diff(pair[0], pair[1]), Relation::Eq, Rational::zero())?;
        }
    }
    for pair in blocks.windows(2) {
        let mut row = diff(pair[0][0], pair[1][0]);
        row[m] = -Rational::one();
        lp.add_constraint(row, Relation::Ge, Rational::zero())?;
    }

    let sol = simplex_max(&lp);
    let (reachable, margin) = match sol.status {
        LpStatus::Optimal if has_gap => (sol.objective_value.is_positive(), Some(sol.objective_value.clone())),
        LpStatus::Optimal => (true, None),
        LpStatus::Infeasible => (false, None),
        LpStatus::Unbounded => return Err(Error::Internal("face LP unbounded over a simplex".into())),
    };
    let witness = if reachable {
        let b: RatVector = sol.x.iter().take(m).cloned().collect();
        if face_of(&hull_point(t, &b)?) != *target {
            return Err(Error::Internal(format!("LP witness misses face {target}")));
        }
        Some(b)
    } else {
        None
    };
    Ok(FaceTest { reachable, witness, margin })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ranking: Ranking,
    pub b: RatVector,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bound {
    /// `n! − (n−1)!`.
    pub max: u64,
    pub attained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachabilityReport {
    pub n: usize,
    pub t: Vec<RatVector>,
    pub reachable: Vec<Witness>,
    /// Tested rankings that no weight in W̄ produces.
    pub unreachable: usize,
    pub strict_count: u64,
    pub bound: Bound,
    /// The profile has total 0, where the hull argument degenerates; the
    /// witnesses are still checked by exact tally.
    pub degenerate_total: bool,
}

impl ReachabilityReport {
    pub fn strict_rankings(&self) -> impl Iterator<Item = &Ranking> {
        self.reachable.iter().map(|w| &w.ranking).filter(|r| r.is_strict())
    }
}

/// Tests every strict ranking (and every tied face too when `strict_only` is
/// off and `n ≤ 5`), attaching a verified witness weight to each reachable one.
pub fn enumerate_reachable(q: &TallyMatrix, strict_only: bool) -> Result<ReachabilityReport> {
    let n = q.n();
    if !(2..=MAX_DENSE_CANDIDATES).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: 2, max: MAX_DENSE_CANDIDATES });
    }
    if !strict_only && n > MAX_FACE_CANDIDATES {
        return Err(Error::UnsupportedSize { n, min: 2, max: MAX_FACE_CANDIDATES });
    }
    let t = prefix_sums(q);
    let targets: Vec<Ranking> = if strict_only {
        all_permutations(n).map(|p| Ranking::from_permutation(&p)).collect()
    } else {
        all_rankings(n)
    };

    let outcomes = targets
        .par_iter()
        .map(|target| {
            let test = is_face_reachable(&t, target)?;
            let Some(b) = test.witness else { return Ok(None) };
            let weights = weight_from_coefficients(n, &b)?;
            if face_of(&tally(q, &weights)?) != *target {
                return Err(Error::Internal(format!("witness weight misses {target}")));
            }
            Ok(Some(Witness { ranking: target.clone(), b, weights }))
        })
        .collect::<Result<Vec<_>>>()?;

    let tested = outcomes.len();
    let reachable: Vec<Witness> = outcomes.into_iter().flatten().collect();
    let strict_count = reachable.iter().filter(|w| w.ranking.is_strict()).count() as u64;
    let max = factorial(n) - factorial(n - 1);
    let degenerate_total = q.total().is_zero();
    if strict_count > max && !degenerate_total {
        return Err(Error::Internal(format!("{strict_count} strict rankings exceed n! - (n-1)! = {max}")));
    }
    Ok(ReachabilityReport {
        n,
        t,
        unreachable: tested - reachable.len(),
        reachable,
        strict_count,
        bound: Bound { max, attained: strict_count == max },
        degenerate_total,
    })
}

/// Faces hit by `Σ b_k t_k` for random probability vectors `b` with entries
/// drawn as integers in `[0, 10⁶]` and normalized, so every test stays exact.
pub fn random_explore(q: &TallyMatrix, trials: usize, seed: u64) -> Result<BTreeSet<Ranking>> {
    if trials == 0 {
        return Err(Error::InvalidCoefficients("trials must be at least 1".into()));
    }
    let n = q.n();
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: MAX_DENSE_CANDIDATES });
    }
    let t = prefix_sums(q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    for _ in 0..trials {
        let draw: Vec<i64> = loop {
            let d: Vec<i64> = (0..n - 1).map(|_| rng.random_range(0..=1_000_000)).collect();
            if d.iter().any(|&x| x != 0) {
                break d;
            }
        };
        let total: i64 = draw.iter().sum();
        let b: RatVector = draw.iter().map(|&x| Rational::new(x, total)).collect();
        seen.insert(face_of(&hull_point(&t, &b)?));
    }
    Ok(seen)
}
