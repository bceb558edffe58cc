//! Ballots, profiles, tallies and rankings.

pub mod perm;
pub mod profile;
pub mod ranking;
pub mod weights;

pub use perm::{all_permutations, factorial, perm_rank, perm_unrank, permutation_matrix, permute_weight, Permutation};
pub use profile::{
    build_tally_matrix, tally, tally_by_ballots, to_nonneg_integer_profile, to_stochastic_profile, Profile,
    ResultsVector, TallyMatrix, MAX_DENSE_CANDIDATES,
};
pub use ranking::{all_rankings, face_of, Ranking};
pub use weights::{is_weakly_decreasing, project_sum_zero, WeightVector};
