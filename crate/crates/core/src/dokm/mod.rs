//! Dynamic Ordered k-Median: reduced-cost guessing, the surrogate LP,
//! duplication and filtering, flow embedding, dependent rounding and
//! rerouting. The facility-weighted mobile facility location solver reuses
//! the same pipeline.

pub mod filter;
pub mod guess;
pub mod lp;
pub mod network;
pub mod solution;
pub mod solve;
pub mod tmmfl;

pub use filter::{oblivious_filter, FilterOutput, FilteredClient, Pairing, StepFilter};
pub use guess::{round_weights, GuessSpace, ReducedCostGuess};
pub use lp::build_reduced_lp;
pub use network::{build_dokm_network, reroute, DokmNetwork, Rerouted};
pub use solution::{duplicate_facilities, FractionalSolution, StepSolution};
pub use solve::{base_factor, solve_dokm, DokmError, DokmOutcome, DokmParams};
pub use tmmfl::{solve_tm_mfl, TmMflOutcome, TmMflParams};
