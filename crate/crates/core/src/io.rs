//! JSON file formats shared by the library and the command line.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{RatMatrix, RatVector};
use crate::paradox::TargetSpec;
use crate::rational::Rational;
use crate::voting::{Permutation, Profile, WeightVector};

#[derive(Serialize, Deserialize)]
struct Ballot {
    ranking: Permutation,
    count: Rational,
}

#[derive(Serialize, Deserialize)]
struct ProfileFile {
    n: usize,
    ballots: Vec<Ballot>,
}

/// `{"n": 4, "ballots": [{"ranking": [1,2,3,4], "count": "8"}, ...]}`; only
/// nonzero ballots are written, in lexicographic order. Repeated ballots add up.
impl Serialize for Profile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let ballots = self.ballots().map(|(ranking, count)| Ballot { ranking, count: count.clone() }).collect();
        ProfileFile { n: self.n(), ballots }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Profile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let file = ProfileFile::deserialize(deserializer)?;
        Profile::from_ballots(file.n, file.ballots.iter().map(|b| (&b.ranking, &b.count)))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightsFile {
    pub weights: WeightVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub matrix: Vec<Vec<Rational>>,
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<RatMatrix> {
        RatMatrix::from_rows(self.matrix.clone())
    }
}

/// Targets as written on disk; [`TargetsFile::to_spec`] applies the
/// independence and sum-zero checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetsFile {
    pub weights: Vec<WeightVector>,
    pub results: Vec<RatVector>,
}

impl TargetsFile {
    pub fn to_spec(&self) -> Result<TargetSpec> {
        TargetSpec::new(self.weights.clone(), self.results.clone())
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voting::build_tally_matrix;

    const ELECTION: &str = r#"{"n": 4, "ballots": [
        {"ranking": [2,3,4,1], "count": "8"}, {"ranking": [1,3,2,4], "count": 5},
        {"ranking": [4,3,2,1], "count": "10"}, {"ranking": [2,3,1,4], "count": "8"},
        {"ranking": [4,1,3,2], "count": "7"}]}"#;

    #[test]
    fn profile_round_trip() {
        let p: Profile = from_json(ELECTION).unwrap();
        assert_eq!(p.total(), Rational::from_integer(38));
        let text = to_json(&p);
        let again: Profile = from_json(&text).unwrap();
        assert_eq!(again, p);
        assert_eq!(to_json(&again), text);
        assert!(text.contains(r#""count": "5""#));
        assert_eq!(build_tally_matrix(&p).matrix()[(2, 1)], Rational::from_integer(31));
    }

    #[test]
    fn repeated_ballots_accumulate() {
        let p: Profile = from_json(
            r#"{"n": 3, "ballots": [{"ranking": [1,2,3], "count": "1/2"}, {"ranking": [1,2,3], "count": "1/2"}]}"#,
        )
        .unwrap();
        assert_eq!(p.count(&Permutation::identity(3)), &Rational::one());
        assert_eq!(build_tally_matrix(&p).matrix(), &RatMatrix::identity(3));
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(
            from_json::<Profile>(r#"{"n": 3, "ballots": [{"ranking": [1,1,3], "count": "1"}]}"#),
            Err(Error::Parse(_))
        ));
        assert!(from_json::<Profile>(r#"{"n": 3, "ballots": [{"ranking": [1,2,3,4], "count": "1"}]}"#).is_err());
        assert!(from_json::<Profile>(r#"{"n": 2, "ballots": []}"#).is_err());
        assert!(from_json::<WeightsFile>(r#"{"weights": ["0", "1", "-1"]}"#).is_err());
        let m: MatrixFile = from_json(r#"{"matrix": [["1/2", "1/2"], ["1/2", "1/2"]]}"#).unwrap();
        assert_eq!(m.to_matrix().unwrap().rows(), 2);
        assert!(from_json::<MatrixFile>(r#"{"matrix": [["1/0"]]}"#).is_err());
    }
}
