//! Societal rankings as ordered set partitions (faces of the braid arrangement).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::RatVector;
use crate::rational::Rational;
use crate::voting::perm::Permutation;

/// Ordered blocks of tied candidates, best block first. Candidates inside a
/// block are kept ascending so every face has one canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Ranking(Vec<Vec<usize>>);

impl Ranking {
    pub fn new(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::InvalidRanking("empty block".into()));
            }
            for &c in block {
                if c == 0 || c > n || seen[c - 1] {
                    return Err(Error::InvalidRanking(format!("{blocks:?} is not an ordered partition of 1..={n}")));
                }
                seen[c - 1] = true;
            }
        }
        if n == 0 {
            return Err(Error::InvalidRanking("no candidates".into()));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Ranking(blocks))
    }

    pub fn from_permutation(sigma: &Permutation) -> Self {
        Ranking(sigma.one_line().iter().map(|&c| vec![c]).collect())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.0
    }

    pub fn num_candidates(&self) -> usize {
        self.0.iter().map(Vec::len).sum()
    }

    pub fn is_strict(&self) -> bool {
        self.0.iter().all(|b| b.len() == 1)
    }

    pub fn to_permutation(&self) -> Option<Permutation> {
        if !self.is_strict() {
            return None;
        }
        Permutation::new(self.0.iter().map(|b| b[0]).collect()).ok()
    }

    /// True when `r` lies in this face.
    pub fn contains(&self, r: &RatVector) -> bool {
        r.dim() == self.num_candidates() && face_of(r) == *self
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Shell notation: `2,4,3,1` is strict; `2;4,3;1` ties 4 and 3 in second place.
/// A trailing `;` marks a single block, so `1,2,3;` is the total tie.
impl fmt::Display for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strict = self.is_strict();
        for (i, block) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(if strict { "," } else { ";" })?;
            }
            for (k, c) in block.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
        }
        if !strict && self.0.len() == 1 {
            f.write_str(";")?;
        }
        Ok(())
    }
}

impl FromStr for Ranking {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_c = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad candidate {t:?} in ranking {s:?}")))
        };
        let blocks = if s.contains(';') {
            s.strip_suffix(';')
                .unwrap_or(s)
                .split(';')
                .map(|b| b.split(',').map(parse_c).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?
        } else {
            s.split(',').map(|c| parse_c(c).map(|c| vec![c])).collect::<Result<Vec<_>>>()?
        };
        Ranking::new(blocks)
    }
}

impl<'de> Deserialize<'de> for Ranking {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let blocks = Vec::<Vec<usize>>::deserialize(deserializer)?;
        Ranking::new(blocks).map_err(serde::de::Error::custom)
    }
}

/// The face containing `r`: blocks by strictly decreasing score, exact ties grouped.
pub fn face_of(r: &RatVector) -> Ranking {
    let mut order: Vec<usize> = (0..r.dim()).collect();
    order.sort_by(|&a, &b| r[b].cmp(&r[a]).then(a.cmp(&b)));
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut last: Option<&Rational> = None;
    for i in order {
        match last {
            Some(v) if *v == r[i] => blocks.last_mut().expect("open block").push(i + 1),
            _ => blocks.push(vec![i + 1]),
        }
        last = Some(&r[i]);
    }
    Ranking(blocks)
}

/// Every ordered set partition of `1..=n` (Fubini-many of them).
pub fn all_rankings(n: usize) -> Vec<Ranking> {
    // Assign each candidate a block label; keep labelings whose used labels are 0..m.
    fn rec(n: usize, c: usize, labels: &mut Vec<usize>, out: &mut Vec<Ranking>) {
        if c == n {
            let m = labels.iter().max().map_or(0, |&x| x + 1);
            let mut blocks = vec![Vec::new(); m];
            for (i, &l) in labels.iter().enumerate() {
                blocks[l].push(i + 1);
            }
            if blocks.iter().all(|b| !b.is_empty()) {
                out.push(Ranking(blocks));
            }
            return;
        }
        for l in 0..n {
            labels.push(l);
            rec(n, c + 1, labels, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, 0, &mut Vec::with_capacity(n), &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn strict(v: &[usize]) -> Ranking {
        Ranking::from_permutation(&Permutation::new(v.to_vec()).unwrap())
    }

    #[test]
    fn borda_outcome_face() {
        let r = RatVector::from_integers(&[-20, 6, 12, 2]);
        assert_eq!(face_of(&r), strict(&[3, 2, 4, 1]));
    }

    #[test]
    fn total_tie() {
        let r = RatVector::zeros(4);
        assert_eq!(face_of(&r), Ranking::new(vec![vec![1, 2, 3, 4]]).unwrap());
    }

    #[test]
    fn fractional_scores() {
        let r = RatVector::new(vec![rat(47, 5), rat(19, 1), rat(69, 5), rat(93, 5)]);
        assert_eq!(face_of(&r), strict(&[2, 4, 3, 1]));
    }

    #[test]
    fn ties_are_grouped_ascending() {
        let r = RatVector::from_integers(&[1, 5, 1, -7]);
        assert_eq!(face_of(&r).blocks(), &[vec![2], vec![1, 3], vec![4]]);
    }

    #[test]
    fn parse_shell_notation() {
        assert_eq!("2,4,3,1".parse::<Ranking>().unwrap(), strict(&[2, 4, 3, 1]));
        let tied: Ranking = "2;4,3;1".parse().unwrap();
        assert_eq!(tied.blocks(), &[vec![2], vec![3, 4], vec![1]]);
        assert_eq!(tied.to_string(), "2;3,4;1");
        assert_eq!(strict(&[2, 4, 3, 1]).to_string(), "2,4,3,1");
        assert!("2,2,1".parse::<Ranking>().is_err());
        assert!("1;;2".parse::<Ranking>().is_err());
        assert!("1,x".parse::<Ranking>().is_err());
        let all: Ranking = "1,2,3;".parse().unwrap();
        assert_eq!(all.blocks(), &[vec![1, 2, 3]]);
        assert_eq!(all.to_string(), "1,2,3;");
        assert_eq!("1;2,3;".parse::<Ranking>().unwrap().blocks(), &[vec![1], vec![2, 3]]);
    }

    #[test]
    fn ordered_partition_counts() {
        // Fubini numbers.
        assert_eq!(all_rankings(1).len(), 1);
        assert_eq!(all_rankings(2).len(), 3);
        assert_eq!(all_rankings(3).len(), 13);
        assert_eq!(all_rankings(4).len(), 75);
        assert_eq!(all_rankings(5).len(), 541);
    }

    proptest! {
        #[test]
        fn face_is_scale_and_shift_invariant(
            v in proptest::collection::vec(-5i64..6, 4),
            (cn, cd) in (1i64..20, 1i64..7),
            (sn, sd) in (-20i64..20, 1i64..7),
        ) {
            let r = RatVector::from_integers(&v);
            let f = face_of(&r);
            prop_assert_eq!(face_of(&r.scale(&rat(cn, cd))), f.clone());
            prop_assert_eq!(face_of(&r.shift(&rat(sn, sd))), f.clone());
            prop_assert!(f.contains(&r));
        }
    }
}
