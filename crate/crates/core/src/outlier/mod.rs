//! Bi-criteria Dynamic k-Supplier with outliers for two steps: guess the
//! top facilities, reduce, solve the coverage LP, filter greedily, split
//! into a budgeted bipartite matching and round it by decomposition and
//! patching.

pub mod filter;
pub mod guess;
pub mod lp;
pub mod matching;
pub mod solve;
pub mod split;

pub use filter::{greedy_filter, GreedyFilter};
pub use guess::{enumerate_guesses, guess_size, reduce_instance, GuessList, GuessTuple, ReducedProblem};
pub use lp::{build_outlier_lp, OutlierLp, OutlierLpSolution};
pub use matching::{decompose_basic, min_cardinality_lp, patch_matchings, Decomposition, PatchResult, Route};
pub use solve::{solve_dks_outlier, CoverageCertificate, OutlierError, OutlierOutcome, OutlierParams};
pub use split::{split, BudgetedMatchingProblem, MatchEdge, MatchNode};

/// Relative slack on the `3R` coverage test.
pub const COVER_TOL: f64 = 1e-9;

pub(crate) fn within(d: f64, r: f64) -> bool {
    d <= r * (1.0 + COVER_TOL) + COVER_TOL
}
