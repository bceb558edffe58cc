//! Exact positional-voting tools: tallies, profile synthesis, permutation
//! expansions and reachability of societal rankings.

pub mod birkhoff;
pub mod error;
pub mod io;
pub mod linalg;
pub mod paradox;
pub mod rational;
pub mod reachability;
pub mod simplex;
pub mod voting;

pub use birkhoff::{PermCombination, ShiftScale};
pub use error::{Error, Result};
pub use linalg::{RatMatrix, RatVector};
pub use paradox::{SaariCertificate, TargetSpec};
pub use rational::Rational;
pub use reachability::ReachabilityReport;
pub use voting::{Permutation, Profile, Ranking, ResultsVector, TallyMatrix, WeightVector};
