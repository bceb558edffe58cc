//! Profiles realizing prescribed outcomes under prescribed weights.
//!
//! Given independent `w_1..w_{n−1}` and sum-zero `r_1..r_{n−1}`, the matrix
//! `Q = R F⁻¹` (with `F = [1 w_1 … w_{n−1}]`, `R = [1 r_1 … r_{n−1}]`) has
//! unit line sums and sends each `w_k` to `r_k`; expanding `Q` in permutation
//! matrices turns it into a profile. The same machinery with `r_k = e_k − e_{k+1}`
//! yields one profile realizing `n! − (n−1)!` strict rankings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::birkhoff::{common_line_sum, expand_in_permutations, PermCombination};
use crate::error::{Error, Result};
use crate::linalg::{mat_inverse, mat_vec, rank, RatMatrix, RatVector};
use crate::rational::Rational;
use crate::reachability::weight_basis;
use crate::voting::{
    all_permutations, build_tally_matrix, face_of, factorial, tally, tally_by_ballots, Permutation, Profile, Ranking,
    WeightVector,
};

/// `n − 1` independent weights in W̄ and the sum-zero results they should produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTargets")]
pub struct TargetSpec {
    weights: Vec<WeightVector>,
    results: Vec<RatVector>,
}

#[derive(Deserialize)]
struct RawTargets {
    weights: Vec<WeightVector>,
    results: Vec<RatVector>,
}

impl TryFrom<RawTargets> for TargetSpec {
    type Error = Error;
    fn try_from(raw: RawTargets) -> Result<Self> {
        TargetSpec::new(raw.weights, raw.results)
    }
}

impl TargetSpec {
    pub fn new(weights: Vec<WeightVector>, results: Vec<RatVector>) -> Result<Self> {
        let n = weights.len() + 1;
        if n < 2 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if results.len() != weights.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), found: results.len() });
        }
        for v in weights.iter().map(|w| w.as_vector()).chain(results.iter()) {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.dim() });
            }
        }
        if results.iter().any(|r| !r.sum().is_zero()) {
            return Err(Error::ResultNotSumZero);
        }
        let cols: Vec<RatVector> = weights.iter().map(|w| w.as_vector().clone()).collect();
        if rank(&RatMatrix::from_columns(&cols)?) != n - 1 {
            return Err(Error::DependentWeights);
        }
        Ok(TargetSpec { weights, results })
    }

    pub fn n(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn weights(&self) -> &[WeightVector] {
        &self.weights
    }

    pub fn results(&self) -> &[RatVector] {
        &self.results
    }
}

/// `Q = R F⁻¹`; checks `Q w_k = r_k` and unit line sums before returning.
pub fn construct_q(spec: &TargetSpec) -> Result<RatMatrix> {
    let n = spec.n();
    let mut f_cols = vec![RatVector::ones(n)];
    f_cols.extend(spec.weights.iter().map(|w| w.as_vector().clone()));
    let mut r_cols = vec![RatVector::ones(n)];
    r_cols.extend(spec.results.iter().cloned());
    let f_inv = mat_inverse(&RatMatrix::from_columns(&f_cols)?).map_err(|e| match e {
        Error::Singular => Error::DependentWeights,
        e => e,
    })?;
    let q = RatMatrix::from_columns(&r_cols)?.mul(&f_inv)?;

    for (w, r) in spec.weights.iter().zip(&spec.results) {
        if mat_vec(&q, w.as_vector())? != *r {
            return Err(Error::Internal("Q w_k != r_k".into()));
        }
    }
    if common_line_sum(&q)? != Rational::one() {
        return Err(Error::Internal("Q line sums differ from 1".into()));
    }
    Ok(q)
}

/// One tally equation of a synthesized profile, recomputed ballot by ballot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TallyCheck {
    pub weights: WeightVector,
    pub expected: RatVector,
    pub actual: RatVector,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Synthesis {
    pub q: RatMatrix,
    pub combination: PermCombination,
    pub profile: Profile,
    pub verification: Vec<TallyCheck>,
}

impl Synthesis {
    pub fn verified(&self) -> bool {
        self.verification.iter().all(|c| c.ok)
    }
}

/// Builds `Q`, expands it and re-tallies the resulting profile against every target.
pub fn synthesize(spec: &TargetSpec) -> Result<Synthesis> {
    let q = construct_q(spec)?;
    let combination = expand_in_permutations(&q)?;
    let profile = combination.to_profile()?;
    let verification = verify_targets(spec, &profile)?;
    Ok(Synthesis { q, combination, profile, verification })
}

pub fn verify_targets(spec: &TargetSpec, profile: &Profile) -> Result<Vec<TallyCheck>> {
    spec.weights
        .iter()
        .zip(&spec.results)
        .map(|(w, r)| {
            let actual = tally_by_ballots(profile, w.as_vector())?;
            Ok(TallyCheck { weights: w.clone(), expected: r.clone(), ok: actual == *r, actual })
        })
        .collect()
}

pub fn synthesize_profile(spec: &TargetSpec) -> Result<Profile> {
    let s = synthesize(spec)?;
    if !s.verified() {
        return Err(Error::Internal("synthesized profile misses a target".into()));
    }
    Ok(s.profile)
}

/// A nonzero profile with zero tally matrix: `x − expand(Q_x)` for a seeded
/// random integer profile `x`. Adding it to a solution gives another one.
pub fn kernel_element(n: usize, seed: u64) -> Result<Profile> {
    if factorial(n) <= ((n - 1) * (n - 1) + 1) as u64 {
        return Err(Error::UnsupportedSize { n, min: 3, max: usize::MAX });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let x = Profile::from_counts(
            n,
            (0..factorial(n)).map(|_| Rational::from_integer(rng.random_range(-5..=5))).collect(),
        )?;
        let expanded = expand_in_permutations(build_tally_matrix(&x).matrix())?.to_profile()?;
        let k = Profile::from_counts(n, x.counts().sub(expanded.counts())?)?;
        if !k.counts().is_zero() {
            return Ok(k);
        }
    }
}

/// A second solution of the same targets, offset by a kernel element.
pub fn alternative_profile(spec: &TargetSpec, seed: u64) -> Result<Profile> {
    let base = synthesize_profile(spec)?;
    let k = kernel_element(spec.n(), seed)?;
    let alt = Profile::from_counts(spec.n(), base.counts().add(k.counts())?)?;
    if verify_targets(spec, &alt)?.iter().any(|c| !c.ok) {
        return Err(Error::Internal("kernel offset changed a tally".into()));
    }
    Ok(alt)
}

/// `η₀ = 3M/m` with `m` the smallest gap of `w` and `M = max |x_k|`, so that
/// `ηw + x` is strictly decreasing for every `η ≥ η₀`. Returns 0 when `x = 0`,
/// where any positive `η` works.
pub fn scale_to_dominate(w: &WeightVector, x: &RatVector) -> Result<Rational> {
    if !w.is_strict() {
        return Err(Error::InvalidWeights(format!("{:?} is not strictly decreasing", w.as_vector())));
    }
    if x.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), found: x.dim() });
    }
    if !x.sum().is_zero() {
        return Err(Error::ResultNotSumZero);
    }
    let m = w.min_gap().expect("strict weights have a gap");
    let big_m = x.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero);
    let eta = Rational::from_integer(3) * big_m / m;
    if !x.is_zero() {
        for factor in [1, 2] {
            let v = w.scale(&(&eta * Rational::from_integer(factor))).add(x)?;
            if !WeightVector::new(v)?.is_strict() {
                return Err(Error::Internal("scaled weight not strictly decreasing".into()));
            }
        }
    }
    Ok(eta)
}

/// Smallest `m` maximizing the prefix sums `s_m = h_{π(1)} + … + h_{π(m)}`
/// (with `s_0 = 0`). Rotating `π` to start at `π(m+1)` makes every proper
/// prefix sum nonpositive.
pub fn nonpositive_prefix_shift(h: &RatVector, pi: &Permutation) -> Result<usize> {
    if pi.n() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), found: pi.n() });
    }
    if !h.sum().is_zero() {
        return Err(Error::ResultNotSumZero);
    }
    let mut best = (Rational::zero(), 0);
    let mut s = Rational::zero();
    for m in 1..h.dim() {
        s += &h[pi.at(m) - 1];
        if s > best.0 {
            best = (s.clone(), m);
        }
    }
    Ok(best.1)
}

/// `(h_{π(m+1)}, …, h_{π(n)}, h_{π(1)}, …, h_{π(m)})`.
pub fn rotated_sequence(h: &RatVector, pi: &Permutation, m: usize) -> RatVector {
    let n = h.dim();
    (0..n).map(|k| h[pi.at((m + k) % n + 1) - 1].clone()).collect()
}

pub const SAARI_MIN: usize = 3;
pub const SAARI_MAX: usize = 5;

/// The scaled weight family and profile behind a [`SaariCertificate`].
#[derive(Debug, Clone)]
pub struct SaariConstruction {
    n: usize,
    weights: Vec<WeightVector>,
    profile: Profile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaariEntry {
    pub ranking: Ranking,
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SaariCertificate {
    pub profile: Profile,
    pub entries: Vec<SaariEntry>,
}

/// `w_k = v_k + (centered Borda)`: strict, sum-zero and independent.
pub fn default_saari_weights(n: usize) -> Result<Vec<WeightVector>> {
    let half = Rational::new(n as i64 - 1, 2);
    let borda: RatVector = (0..n).map(|i| &half - Rational::from_integer(i as i64)).collect();
    weight_basis(n)?.into_iter().map(|v| WeightVector::new_strict(v.as_vector().add(&borda)?)).collect()
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

impl SaariConstruction {
    pub fn new(n: usize, base: &[WeightVector]) -> Result<Self> {
        if !(SAARI_MIN..=SAARI_MAX).contains(&n) {
            return Err(Error::UnsupportedSize { n, min: SAARI_MIN, max: SAARI_MAX });
        }
        if base.len() != n - 1 {
            return Err(Error::DimensionMismatch { expected: n - 1, found: base.len() });
        }
        if let Some(w) = base.iter().find(|w| !w.is_strict()) {
            return Err(Error::InvalidWeights(format!("{:?} is not strictly decreasing", w.as_vector())));
        }

        // Scale w_1 until w_1 − K·w_k is strictly decreasing for every k ≥ 2.
        let big_k = Rational::from_integer(n as i64 * binomial(n + 1, 2));
        let mut eta = Rational::zero();
        for w in &base[1..] {
            eta = eta.max(scale_to_dominate(&base[0], &w.scale(&-&big_k))?);
        }
        let mut weights = base.to_vec();
        weights[0] = WeightVector::new_strict(base[0].scale(&eta))?;
        for w in &weights[1..] {
            WeightVector::new_strict(weights[0].sub(&w.scale(&big_k))?)
                .map_err(|_| Error::Internal("scaled w_1 does not dominate".into()))?;
        }

        let results: Vec<RatVector> =
            (0..n - 1).map(|k| RatVector::unit(n, k).sub(&RatVector::unit(n, k + 1)).expect("same dim")).collect();
        let spec = TargetSpec::new(weights.clone(), results)?;
        let profile = synthesize_profile(&spec)?;
        Ok(SaariConstruction { n, weights, profile })
    }

    pub fn with_default_weights(n: usize) -> Result<Self> {
        if !(SAARI_MIN..=SAARI_MAX).contains(&n) {
            return Err(Error::UnsupportedSize { n, min: SAARI_MIN, max: SAARI_MAX });
        }
        Self::new(n, &default_saari_weights(n)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The base weights after scaling `w_1`; `T_{w_k} p = e_k − e_{k+1}`.
    pub fn weights(&self) -> &[WeightVector] {
        &self.weights
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    fn combine(&self, alpha: &[Rational]) -> Result<RatVector> {
        let terms: Vec<(Rational, &RatVector)> =
            alpha.iter().cloned().zip(self.weights.iter().map(|w| w.as_vector())).collect();
        RatVector::linear_combination(self.n, &terms)
    }

    /// Cumulative coefficients `α_k = Σ_{i≤k} (n − π⁻¹(i))` for `π(n) = n`.
    /// Under `T_w p = Σ α_k f_k` candidate `k` scores `n − π⁻¹(k)`.
    fn alpha(&self, pi: &Permutation) -> Vec<Rational> {
        let n = self.n;
        let mut acc = 0i64;
        (1..n)
            .map(|i| {
                acc += (n - pi.position_of(i)) as i64;
                Rational::from_integer(acc)
            })
            .collect()
    }

    /// A strictly decreasing weight whose tally on the profile lies in `C_π`.
    pub fn weight_for_ranking(&self, pi: &Permutation) -> Result<WeightVector> {
        let n = self.n;
        if pi.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: pi.n() });
        }
        let b = pi.at(n);
        let w = if b == 1 {
            return Err(Error::ExcludedRanking);
        } else if b == n {
            self.combine(&self.alpha(pi))?
        } else {
            // Move n to the end, then push b below everyone by subtracting
            // γ·(w_b + … + w_{n−1}), whose tally is γ·(e_b − e_n).
            let mut moved: Vec<usize> = pi.one_line().iter().copied().filter(|&c| c != n).collect();
            moved.push(n);
            let tilde = Permutation::new(moved)?;
            let gamma = Rational::from_integer(binomial(n, 2) + (n - pi.position_of(n)) as i64) + Rational::new(1, 2);
            let mut alpha = self.alpha(&tilde);
            for a in &mut alpha[b - 1..] {
                *a -= &gamma;
            }
            self.combine(&alpha)?
        };
        WeightVector::new_strict(w).map_err(|e| Error::Internal(format!("constructed weight left W: {e}")))
    }

    /// Every `π` with `π(n) ≠ 1`, each with its weight re-verified by exact tally.
    pub fn certificate(&self) -> Result<SaariCertificate> {
        let q = build_tally_matrix(&self.profile);
        let perms: Vec<Permutation> = all_permutations(self.n).filter(|p| p.at(self.n) != 1).collect();
        let entries = perms
            .par_iter()
            .map(|pi| {
                let weights = self.weight_for_ranking(pi)?;
                let ranking = Ranking::from_permutation(pi);
                if face_of(&tally(&q, &weights)?) != ranking {
                    return Err(Error::Internal(format!("weight for {ranking} misses its chamber")));
                }
                Ok(SaariEntry { ranking, weights })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SaariCertificate { profile: self.profile.clone(), entries })
    }
}

/// Profile realizing all `n! − (n−1)!` strict rankings with `π(n) ≠ 1`.
pub fn saari_profile(n: usize, base: Option<&[WeightVector]>) -> Result<SaariCertificate> {
    match base {
        Some(base) => SaariConstruction::new(n, base)?,
        None => SaariConstruction::with_default_weights(n)?,
    }
    .certificate()
}
