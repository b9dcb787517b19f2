//! Local-search laboratory for Max-Cut and SAT.
//!
//! Classical heuristics (greedy cut ascent, tabu search, WalkSAT, DPLL) next to
//! a deliberately tiny learned policy: linear Q-learning over two features per
//! action, the marginal gain of flipping and the staleness of the last flip.
//! Generators, benchmark protocols and report emission live in [`bench`] and
//! are driven by the `lslab` binary.

pub mod bench;
pub mod config;
pub mod graphs;
pub mod maxcut;
pub mod qlearn;
pub mod sat;
pub mod satsearch;
pub mod search;
pub mod seeds;
pub mod softtabu;
pub(crate) mod util;

pub use util::fmt_num;

/// How argmax selections resolve ties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Deterministic: the smallest index among the maxima.
    #[default]
    LowestIndex,
    /// Uniform draw among the maxima.
    Random,
}

impl TieBreak {
    pub fn parse(s: &str) -> Option<TieBreak> {
        match s {
            "lowest_index" => Some(TieBreak::LowestIndex),
            "random" => Some(TieBreak::Random),
            _ => None,
        }
    }
}

/// One recorded step of a search or rollout.
///
/// `objective` is the value after the flip was applied. `greedy_max` marks
/// whether the chosen action's gain equalled the maximum gain over all
/// actions at selection time; ties count as greedy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStep {
    pub step: u64,
    pub action: u32,
    pub gain: f64,
    pub objective: f64,
    pub greedy_max: bool,
}
