//! Profiles, tally matrices and the results-vector map `r = T_w p = Q_p w`.

use crate::birkhoff;
use crate::error::{Error, Result};
use crate::linalg::{mat_vec, RatMatrix, RatVector};
use crate::rational::Rational;
use crate::voting::perm::{all_permutations, factorial, perm_rank, perm_unrank, permute_weight, Permutation};
use crate::voting::weights::WeightVector;

/// Largest candidate count for which dense `n!`-length profiles are built.
pub const MAX_DENSE_CANDIDATES: usize = 8;
pub const MIN_CANDIDATES: usize = 3;

pub type ResultsVector = RatVector;

/// Vote counts indexed by lexicographic rank of the ballot permutation.
/// Counts may be negative or fractional.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    n: usize,
    counts: RatVector,
}

impl Profile {
    pub fn zeros(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Profile { n, counts: RatVector::zeros(factorial(n) as usize) })
    }

    pub fn from_counts(n: usize, counts: RatVector) -> Result<Self> {
        check_size(n)?;
        let expected = factorial(n) as usize;
        if counts.dim() != expected {
            return Err(Error::DimensionMismatch { expected, found: counts.dim() });
        }
        Ok(Profile { n, counts })
    }

    /// Sparse construction; repeated ballots accumulate.
    pub fn from_ballots<'a, I>(n: usize, ballots: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a Permutation, &'a Rational)>,
    {
        let mut p = Profile::zeros(n)?;
        for (sigma, count) in ballots {
            p.add(sigma, count)?;
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &RatVector {
        &self.counts
    }

    pub fn count(&self, sigma: &Permutation) -> &Rational {
        &self.counts[perm_rank(sigma) as usize - 1]
    }

    pub fn add(&mut self, sigma: &Permutation, count: &Rational) -> Result<()> {
        if sigma.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: sigma.n() });
        }
        self.counts[perm_rank(sigma) as usize - 1] += count;
        Ok(())
    }

    /// Nonzero ballots in lexicographic order.
    pub fn ballots(&self) -> impl Iterator<Item = (Permutation, &Rational)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (perm_unrank(self.n, i as u64 + 1).expect("index within n!"), c))
    }

    pub fn total(&self) -> Rational {
        self.counts.sum()
    }
}

fn check_size(n: usize) -> Result<()> {
    if !(MIN_CANDIDATES..=MAX_DENSE_CANDIDATES).contains(&n) {
        return Err(Error::UnsupportedSize { n, min: MIN_CANDIDATES, max: MAX_DENSE_CANDIDATES });
    }
    Ok(())
}

/// `Q_p`: entry `(i, j)` counts voters placing candidate `i + 1` in place `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TallyMatrix {
    m: RatMatrix,
    total: Rational,
}

impl TallyMatrix {
    /// Accepts any square matrix whose row and column sums all agree.
    pub fn from_matrix(m: RatMatrix) -> Result<Self> {
        let total = birkhoff::common_line_sum(&m)?;
        Ok(TallyMatrix { m, total })
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn total(&self) -> &Rational {
        &self.total
    }
}

pub fn build_tally_matrix(p: &Profile) -> TallyMatrix {
    let n = p.n();
    let mut m = RatMatrix::zeros(n, n);
    for (sigma, count) in all_permutations(n).zip(p.counts().iter()) {
        if count.is_zero() {
            continue;
        }
        for (j, &c) in sigma.one_line().iter().enumerate() {
            m[(c - 1, j)] += count;
        }
    }
    TallyMatrix { m, total: p.total() }
}

/// `r = Q_p w`.
pub fn tally(q: &TallyMatrix, w: &WeightVector) -> Result<ResultsVector> {
    mat_vec(&q.m, w.as_vector())
}

/// `r = T_w p = Σ_ℓ p_ℓ σ_ℓ w`, computed ballot by ballot without forming `Q_p`.
pub fn tally_by_ballots(p: &Profile, w: &RatVector) -> Result<ResultsVector> {
    let mut r = RatVector::zeros(p.n());
    for (sigma, count) in all_permutations(p.n()).zip(p.counts().iter()) {
        if count.is_zero() {
            continue;
        }
        let column = permute_weight(&sigma, w)?;
        for i in 0..r.dim() {
            r[i] += count * &column[i];
        }
    }
    Ok(r)
}

/// `p̂ = d(p − x·1)` with `x = min p` and `d` the common denominator: a
/// nonnegative integer profile with the same face for every `w ∈ W̄`.
pub fn to_nonneg_integer_profile(p: &Profile) -> Profile {
    let min = p.counts().iter().min().cloned().unwrap_or_else(Rational::zero);
    let d = Rational::from(Rational::common_denominator(p.counts().iter()));
    let counts = p.counts().iter().map(|c| (c - &min) * &d).collect();
    Profile { n: p.n(), counts }
}

/// A nonnegative profile summing to 1 whose tally matrix is `c(Q_p − mJ)`
/// (or `J/n` when `Q_p` is constant), found by Birkhoff decomposition.
pub fn to_stochastic_profile(p: &Profile) -> Result<Profile> {
    let q = build_tally_matrix(p);
    let (_, stochastic) = birkhoff::shift_scale_to_stochastic(q.matrix())?;
    let combination = birkhoff::bvn_decompose(&stochastic)?;
    combination.to_profile()
}
