//! Doubly stochastic normalization, Birkhoff–von Neumann decomposition and
//! expansion of equal-line-sum matrices in permutation matrices.
//!
//! Every square matrix `S` with all row and column sums equal to `t` is
//! `S = (t − mn)·P + m·J` for its minimum entry `m` and a doubly stochastic
//! `P`. Decomposing `P` greedily (perfect matching on the positive support,
//! subtract the smallest matched entry, repeat) and writing `J` as the sum of
//! the `n` cyclic shifts expresses `S` as a rational combination of
//! permutation matrices.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::RatMatrix;
use crate::rational::Rational;
use crate::voting::perm::{permutation_matrix, Permutation};
use crate::voting::profile::Profile;

/// The common row/column sum of a square matrix.
pub fn common_line_sum(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.rows() == 0 {
        return Err(Error::DimensionMismatch { expected: 1, found: 0 });
    }
    let rows = m.row_sums();
    let t = rows[0].clone();
    if rows.iter().chain(m.col_sums().iter()).any(|s| *s != t) {
        return Err(Error::UnequalLineSums);
    }
    Ok(t)
}

pub fn is_doubly_stochastic(m: &RatMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    if m.entries().iter().any(Rational::is_negative) {
        return Ok(false);
    }
    let one = Rational::one();
    Ok(m.row_sums().iter().chain(m.col_sums().iter()).all(|s| *s == one))
}

/// Parameters of `P = scale·(S − m_min·J)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftScale {
    pub m_min: Rational,
    /// Common row/column sum of `S`.
    pub t: Rational,
    /// `(t − m_min·n)⁻¹`; `None` when every entry of `S` is equal, in which
    /// case the normalized matrix is `J/n`.
    pub scale: Option<Rational>,
}

impl ShiftScale {
    pub fn is_constant_matrix(&self) -> bool {
        self.scale.is_none()
    }

    /// Undoes the normalization: `S = P/scale + m_min·J`, or `t·P` in the constant case.
    pub fn recover(&self, p: &RatMatrix) -> RatMatrix {
        match &self.scale {
            Some(scale) => {
                let inv = scale.checked_recip().expect("scale is never zero");
                p.scale(&inv).shift(&self.m_min)
            }
            None => p.scale(&self.t),
        }
    }
}

pub fn shift_scale_to_stochastic(s: &RatMatrix) -> Result<(ShiftScale, RatMatrix)> {
    let t = common_line_sum(s)?;
    let n = s.rows();
    let m_min = s.min_entry().expect("nonempty").clone();
    if s.entries().iter().all(|x| *x == m_min) {
        let uniform = RatMatrix::ones(n, n).scale(&Rational::new(1, n as i64));
        return Ok((ShiftScale { m_min, t, scale: None }, uniform));
    }
    // Some row holds an entry above the minimum, so t > n·m_min.
    let denom = &t - &m_min * Rational::from_integer(n as i64);
    let scale = denom.checked_recip().ok_or_else(|| Error::Internal("t - mn vanished".into()))?;
    let p = s.shift(&-&m_min).scale(&scale);
    Ok((ShiftScale { m_min, t, scale: Some(scale) }, p))
}

/// A rational combination `Σ coeff·R_σ` over distinct permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermCombination {
    n: usize,
    terms: Vec<(Permutation, Rational)>,
}

impl PermCombination {
    pub fn from_terms(n: usize, terms: Vec<(Permutation, Rational)>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for (sigma, _) in &terms {
            if sigma.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: sigma.n() });
            }
            if !seen.insert(sigma.clone()) {
                return Err(Error::InvalidPermutation(format!("{sigma:?} repeated in combination")));
            }
        }
        Ok(PermCombination { n, terms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(Permutation, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Σ coeff·R_σ`.
    pub fn evaluate(&self) -> RatMatrix {
        let mut m = RatMatrix::zeros(self.n, self.n);
        for (sigma, c) in &self.terms {
            for (j, &i) in sigma.one_line().iter().enumerate() {
                m[(i - 1, j)] += c;
            }
        }
        m
    }

    /// Reads the coefficients as ballot counts.
    pub fn to_profile(&self) -> Result<Profile> {
        Profile::from_ballots(self.n, self.terms.iter().map(|(s, c)| (s, c)))
    }
}

impl Serialize for PermCombination {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            perm: &'a Permutation,
            coeff: &'a Rational,
        }
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (perm, coeff) in &self.terms {
            seq.serialize_element(&Term { perm, coeff })?;
        }
        seq.end()
    }
}

/// Perfect matching on the positive entries of a square matrix, as
/// `row_of[column]`. Columns are matched in index order, trying the
/// lowest-index row first.
fn perfect_matching(m: &RatMatrix) -> Option<Vec<usize>> {
    let n = m.rows();
    let adj: Vec<Vec<usize>> = (0..n).map(|j| (0..n).filter(|&i| m[(i, j)].is_positive()).collect()).collect();
    let mut col_of_row: Vec<Option<usize>> = vec![None; n];

    fn augment(j: usize, adj: &[Vec<usize>], visited: &mut [bool], col_of_row: &mut [Option<usize>]) -> bool {
        for &i in &adj[j] {
            if visited[i] {
                continue;
            }
            visited[i] = true;
            let free = match col_of_row[i] {
                None => true,
                Some(k) => augment(k, adj, visited, col_of_row),
            };
            if free {
                col_of_row[i] = Some(j);
                return true;
            }
        }
        false
    }

    for j in 0..n {
        let mut visited = vec![false; n];
        if !augment(j, &adj, &mut visited, &mut col_of_row) {
            return None;
        }
    }
    let mut row_of = vec![0; n];
    for (i, j) in col_of_row.iter().enumerate() {
        row_of[j.expect("perfect matching covers every row")] = i;
    }
    Some(row_of)
}

/// Greedy Birkhoff–von Neumann decomposition of a doubly stochastic matrix.
///
/// Coefficients are positive and sum to one. The greedy step always moves to
/// a strictly lower-dimensional face of the Birkhoff polytope, so at most
/// `(n−1)² + 1` terms are produced.
pub fn bvn_decompose(p: &RatMatrix) -> Result<PermCombination> {
    if !is_doubly_stochastic(p)? {
        return Err(Error::NotDoublyStochastic);
    }
    let n = p.rows();
    let max_terms = (n - 1) * (n - 1) + 1;
    let mut rest = p.clone();
    let mut support = rest.entries().iter().filter(|x| x.is_positive()).count();
    let mut terms = Vec::new();
    while support > 0 {
        let row_of = perfect_matching(&rest)
            .ok_or_else(|| Error::Internal("no perfect matching on doubly stochastic support".into()))?;
        let coeff = (0..n).map(|j| &rest[(row_of[j], j)]).min().expect("n >= 1").clone();
        for (j, &i) in row_of.iter().enumerate() {
            rest[(i, j)] -= &coeff;
        }
        let next_support = rest.entries().iter().filter(|x| x.is_positive()).count();
        if next_support >= support {
            return Err(Error::Internal("matching step did not shrink the support".into()));
        }
        support = next_support;
        let sigma = Permutation::new(row_of.iter().map(|i| i + 1).collect()).expect("matching is a bijection");
        terms.push((sigma, coeff));
        if terms.len() > max_terms {
            return Err(Error::Internal(format!("more than {max_terms} terms")));
        }
    }
    Ok(PermCombination { n, terms })
}

/// Writes any equal-line-sum matrix as a rational combination of permutation
/// matrices via `S = (t − mn)·P + m·J`.
pub fn expand_in_permutations(s: &RatMatrix) -> Result<PermCombination> {
    let (ss, p) = shift_scale_to_stochastic(s)?;
    let n = s.rows();
    let mut acc: BTreeMap<Permutation, Rational> = BTreeMap::new();
    let shifts = |acc: &mut BTreeMap<Permutation, Rational>, c: &Rational| {
        for k in 0..n {
            *acc.entry(Permutation::cyclic_shift(n, k)).or_default() += c;
        }
    };
    match &ss.scale {
        None => shifts(&mut acc, &(&ss.t / Rational::from_integer(n as i64))),
        Some(scale) => {
            let weight = scale.checked_recip().expect("scale is never zero");
            for (sigma, lambda) in bvn_decompose(&p)?.terms {
                *acc.entry(sigma).or_default() += &weight * lambda;
            }
            if !ss.m_min.is_zero() {
                shifts(&mut acc, &ss.m_min);
            }
        }
    }
    let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    Ok(PermCombination { n, terms })
}

/// The permutations `(i, j, n)` (distinct `i, j < n`), `(i, n)` (`i < n`) and
/// the identity, in that order; their matrices form a basis of the
/// equal-line-sum matrices.
pub fn mn_basis_permutations(n: usize) -> Result<Vec<Permutation>> {
    if n < 2 {
        return Err(Error::UnsupportedSize { n, min: 2, max: usize::MAX });
    }
    let mut out = Vec::with_capacity((n - 1) * (n - 1) + 1);
    for i in 1..n {
        for j in 1..n {
            if i != j {
                out.push(Permutation::from_cycles(n, &[&[i, j, n]])?);
            }
        }
    }
    for i in 1..n {
        out.push(Permutation::from_cycles(n, &[&[i, n]])?);
    }
    out.push(Permutation::identity(n));
    Ok(out)
}

pub fn mn_basis(n: usize) -> Result<Vec<RatMatrix>> {
    Ok(mn_basis_permutations(n)?.iter().map(permutation_matrix).collect())
}

/// `B_{i,j}`: `+1` at `(i,j)` and `(n,n)`, `−1` at `(i,n)` and `(n,j)` (1-based).
pub fn b_matrix(n: usize, i: usize, j: usize) -> Result<RatMatrix> {
    if n < 2 || !(1..n).contains(&i) || !(1..n).contains(&j) {
        return Err(Error::IndexOutOfRange { index: i.max(j) as u64, max: n.saturating_sub(1) as u64 });
    }
    let mut b = RatMatrix::zeros(n, n);
    b[(i - 1, j - 1)] = Rational::one();
    b[(n - 1, n - 1)] = Rational::one();
    b[(i - 1, n - 1)] = -Rational::one();
    b[(n - 1, j - 1)] = -Rational::one();
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rank, solve_linear, RatVector};
    use crate::rational::rat;
    use crate::voting::perm::all_permutations;
    use proptest::prelude::*;

    fn synthesis_q() -> RatMatrix {
        RatMatrix::from_integer_rows(&[
            &[27, -64, 51, -6],
            &[49, -146, 113, -8],
            &[-17, 50, -21, -4],
            &[-51, 168, -135, 26],
        ])
        .scale(&rat(1, 8))
    }

    fn synthesis_p() -> RatMatrix {
        RatMatrix::from_integer_rows(&[
            &[173, 82, 197, 140],
            &[195, 0, 259, 138],
            &[129, 196, 125, 142],
            &[95, 314, 11, 172],
        ])
        .scale(&rat(1, 592))
    }

    #[test]
    fn doubly_stochastic_checks() {
        assert!(is_doubly_stochastic(&RatMatrix::identity(3)).unwrap());
        assert!(is_doubly_stochastic(&synthesis_p()).unwrap());
        assert!(!is_doubly_stochastic(&RatMatrix::from_integer_rows(&[&[1, 0], &[1, 0]])).unwrap());
        assert!(is_doubly_stochastic(&RatMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn shift_scale_of_synthesis_matrix() {
        let (ss, p) = shift_scale_to_stochastic(&synthesis_q()).unwrap();
        assert_eq!(ss.m_min, rat(-146, 8));
        assert_eq!(ss.scale, Some(rat(1, 74)));
        assert_eq!(p, synthesis_p());
        assert_eq!(ss.recover(&p), synthesis_q());
    }

    #[test]
    fn shift_scale_special_cases() {
        let (ss, p) = shift_scale_to_stochastic(&synthesis_p()).unwrap();
        assert!(ss.m_min.is_zero());
        assert_eq!(ss.scale, Some(Rational::one()));
        assert_eq!(p, synthesis_p());

        let s = RatMatrix::ones(4, 4).scale(&rat(5, 2));
        let (ss, p) = shift_scale_to_stochastic(&s).unwrap();
        assert!(ss.is_constant_matrix());
        assert_eq!(p, RatMatrix::ones(4, 4).scale(&rat(1, 4)));
        assert_eq!(ss.recover(&p), s);

        let bad = RatMatrix::from_integer_rows(&[&[1, 2], &[3, 4]]);
        assert_eq!(shift_scale_to_stochastic(&bad), Err(Error::UnequalLineSums));
    }

    #[test]
    fn decompose_identity_and_uniform() {
        let c = bvn_decompose(&RatMatrix::identity(3)).unwrap();
        assert_eq!(c.terms(), &[(Permutation::identity(3), Rational::one())]);

        let uniform = RatMatrix::ones(4, 4).scale(&rat(1, 4));
        let c = bvn_decompose(&uniform).unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.terms().iter().all(|(_, x)| *x == rat(1, 4)));
        assert_eq!(c.evaluate(), uniform);
    }

    #[test]
    fn decompose_synthesis_p() {
        let c = bvn_decompose(&synthesis_p()).unwrap();
        assert_eq!(c.evaluate(), synthesis_p());
        // P has a zero entry, so the decomposition fits in (n-1)^2 terms.
        assert!(c.len() <= 9, "{} terms", c.len());
        assert!(c.terms().iter().all(|(_, x)| x.is_positive()));
        assert_eq!(c.terms().iter().map(|(_, x)| x).sum::<Rational>(), Rational::one());
    }

    #[test]
    fn decompose_rejects_non_stochastic() {
        let m = RatMatrix::from_integer_rows(&[&[2, -1], &[-1, 2]]);
        assert_eq!(bvn_decompose(&m), Err(Error::NotDoublyStochastic));
    }

    #[test]
    fn expand_synthesis_q() {
        let c = expand_in_permutations(&synthesis_q()).unwrap();
        assert_eq!(c.evaluate(), synthesis_q());
        assert!(c.terms().iter().any(|(_, x)| x.is_negative()));
        // The identity only enters through the J term here: -73/4.
        let id = c.terms().iter().find(|(s, _)| *s == Permutation::identity(4)).unwrap();
        assert_eq!(id.1, rat(-73, 4));
    }

    #[test]
    fn expand_trivial_matrices() {
        assert!(expand_in_permutations(&RatMatrix::zeros(3, 3)).unwrap().is_empty());
        for sigma in all_permutations(4) {
            let c = expand_in_permutations(&permutation_matrix(&sigma)).unwrap();
            assert_eq!(c.terms(), &[(sigma, Rational::one())]);
        }
    }

    #[test]
    fn serializes_as_term_list() {
        let c = PermCombination::from_terms(3, vec![(Permutation::identity(3), rat(-73, 4))]).unwrap();
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"[{"perm":[1,2,3],"coeff":"-73/4"}]"#);
        assert!(PermCombination::from_terms(
            3,
            vec![(Permutation::identity(3), rat(1, 1)), (Permutation::identity(3), rat(1, 1))]
        )
        .is_err());
    }

    fn flattened_rank(ms: &[RatMatrix]) -> usize {
        let rows: Vec<Vec<Rational>> = ms.iter().map(|m| m.entries().to_vec()).collect();
        rank(&RatMatrix::from_rows(rows).unwrap())
    }

    #[test]
    fn basis_sizes_and_independence() {
        let b2 = mn_basis_permutations(2).unwrap();
        assert_eq!(b2, vec![Permutation::new(vec![2, 1]).unwrap(), Permutation::identity(2)]);
        for (n, size) in [(2, 2), (3, 5), (4, 10), (5, 17)] {
            let basis = mn_basis(n).unwrap();
            assert_eq!(basis.len(), size);
            assert_eq!(flattened_rank(&basis), size);
        }
    }

    #[test]
    fn b_matrix_definition_and_identities() {
        let b = b_matrix(3, 1, 1).unwrap();
        assert_eq!(b, RatMatrix::from_integer_rows(&[&[1, 0, -1], &[0, 0, 0], &[-1, 0, 1]]));
        assert!(b_matrix(3, 3, 1).is_err());
        assert!(b_matrix(3, 0, 1).is_err());

        for n in 3..=5 {
            let id = RatMatrix::identity(n);
            let r = |c: &[usize]| permutation_matrix(&Permutation::from_cycles(n, &[c]).unwrap());
            for i in 1..n {
                for j in 1..n {
                    let expected = if i == j {
                        id.sub(&r(&[i, n])).unwrap()
                    } else {
                        id.sub(&r(&[i, n])).unwrap().sub(&r(&[j, n])).unwrap().add(&r(&[j, i, n])).unwrap()
                    };
                    assert_eq!(b_matrix(n, i, j).unwrap(), expected, "n={n} i={i} j={j}");
                }
            }
        }
    }

    fn random_zero_sum(n: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec((-9i64..10, 1i64..4), (n - 1) * (n - 1)).prop_map(move |v| {
            let mut z = RatMatrix::zeros(n, n);
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    let (a, b) = v[i * (n - 1) + j];
                    z[(i, j)] = rat(a, b);
                }
            }
            for i in 0..n - 1 {
                let s: Rational = z.row(i).iter().sum();
                z[(i, n - 1)] = -s;
            }
            for j in 0..n {
                let s: Rational = (0..n - 1).map(|i| &z[(i, j)]).sum();
                z[(n - 1, j)] = -s;
            }
            z
        })
    }

    fn random_stochastic(n: usize) -> impl Strategy<Value = RatMatrix> {
        proptest::collection::vec((1u64..=720, 1i64..6), 1..=2 * n).prop_map(move |picks| {
            let total: i64 = picks.iter().map(|p| p.1).sum();
            let mut m = RatMatrix::zeros(n, n);
            let count = crate::voting::perm::factorial(n);
            for (idx, w) in picks {
                let sigma = crate::voting::perm::perm_unrank(n, (idx - 1) % count + 1).unwrap();
                m.add_scaled(&rat(w, total), &permutation_matrix(&sigma)).unwrap();
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn zero_sum_matrices_expand_in_b(z in random_zero_sum(3)) {
            let mut acc = RatMatrix::zeros(3, 3);
            for i in 1..3 {
                for j in 1..3 {
                    acc.add_scaled(&z[(i - 1, j - 1)], &b_matrix(3, i, j).unwrap()).unwrap();
                }
            }
            prop_assert_eq!(acc, z);
        }

        #[test]
        fn decomposition_reconstructs(p in (3usize..=6).prop_flat_map(random_stochastic)) {
            let n = p.rows();
            let c = bvn_decompose(&p).unwrap();
            prop_assert_eq!(c.evaluate(), p.clone());
            prop_assert!(c.len() <= (n - 1) * (n - 1) + 1);
            if p.entries().iter().any(Rational::is_zero) {
                prop_assert!(c.len() <= (n - 1) * (n - 1));
            }
        }

        #[test]
        fn expansion_inverts_evaluation(z in (3usize..=5).prop_flat_map(random_zero_sum), t in -5i64..6) {
            let n = z.rows();
            let s = z.add(&RatMatrix::identity(n).scale(&Rational::from_integer(t))).unwrap();
            let c = expand_in_permutations(&s).unwrap();
            prop_assert_eq!(c.evaluate(), s.clone());
            // The same matrix also solves exactly in the fixed basis.
            let basis = mn_basis(n).unwrap();
            let cols: Vec<RatVector> = basis.iter().map(RatMatrix::flatten).collect();
            let a = RatMatrix::from_columns(&cols).unwrap();
            let coeffs = solve_linear(&a, &s.flatten()).unwrap();
            let mut rebuilt = RatMatrix::zeros(n, n);
            for (m, c) in basis.iter().zip(coeffs.iter()) {
                rebuilt.add_scaled(c, m).unwrap();
            }
            prop_assert_eq!(rebuilt, s);
        }
    }
}
