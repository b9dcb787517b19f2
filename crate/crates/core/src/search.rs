//! Classical Max-Cut agents: greedy ascent (MCA) and tabu search.

use crate::graphs::Graph;
use crate::maxcut::CutState;
use crate::util::{argmax_ties, pick};
use crate::{TieBreak, TrajectoryStep};

/// Tabu search parameters.
///
/// A vertex flipped at step `s` is tabu while `step - s <= tenure`, i.e. it
/// stays excluded for `tenure` steps after the flip. With `aspiration` a tabu
/// move is admissible anyway when it would beat the best value seen so far.
#[derive(Debug, Clone)]
pub struct TabuConfig {
    pub tenure: u64,
    pub max_steps: u64,
    pub aspiration: bool,
    pub tie_break: TieBreak,
}

impl TabuConfig {
    /// Default tenure 20, aspiration on, deterministic tie break.
    pub fn with_steps(max_steps: u64) -> TabuConfig {
        TabuConfig {
            tenure: 20,
            max_steps,
            aspiration: true,
            tie_break: TieBreak::LowestIndex,
        }
    }
}

/// Result of one search run. `best_value` is the maximum over every state
/// visited, the start state included.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_value: f64,
    pub best_side: Vec<bool>,
    pub steps: u64,
    pub trajectory: Vec<TrajectoryStep>,
}

/// Greedy ascent: repeatedly flips the maximum-gain vertex while some gain is
/// positive, then halts at the local optimum. Ties go to the lowest index.
pub fn mca(g: &Graph, start: Vec<bool>) -> SearchOutcome {
    let mut st = CutState::new(g, start);
    let mut trajectory = Vec::new();
    let mut steps = 0u64;
    loop {
        let cands = argmax_ties(st.gains());
        let Some(&v) = cands.first() else { break };
        if st.gain(v) <= 0.0 {
            break;
        }
        let gain = st.flip(v);
        trajectory.push(TrajectoryStep {
            step: steps,
            action: v as u32,
            gain,
            objective: st.cut_value(),
            greedy_max: true,
        });
        steps += 1;
    }
    SearchOutcome {
        best_value: st.best_value(),
        best_side: st.best_side().to_vec(),
        steps,
        trajectory,
    }
}

/// Tabu search for exactly `cfg.max_steps` flips.
///
/// Each step picks the maximum-gain vertex among admissible ones: non-tabu
/// vertices, plus (with aspiration) tabu vertices whose flip would exceed the
/// best value so far. When nothing is admissible the step falls back to the
/// argmax over all vertices.
pub fn tabu(g: &Graph, start: Vec<bool>, cfg: &TabuConfig, seed: u64) -> SearchOutcome {
    let mut st = CutState::new(g, start);
    let mut rng = crate::seeds::rng(seed, "tabu", 0);
    let mut trajectory = Vec::with_capacity(cfg.max_steps as usize);
    let n = g.n();
    for t in 0..cfg.max_steps {
        if n == 0 {
            break;
        }
        let max_all = st.max_gain();
        let mut cands: Vec<usize> = Vec::new();
        let mut best_gain = f64::NEG_INFINITY;
        for v in 0..n {
            let tabu_now = match st.last_flip(v) {
                Some(s) => st.step() - s <= cfg.tenure,
                None => false,
            };
            let admissible = if tabu_now {
                cfg.aspiration && st.cut_value() + st.gain(v) > st.best_value()
            } else {
                true
            };
            if !admissible {
                continue;
            }
            let gain = st.gain(v);
            if gain > best_gain {
                best_gain = gain;
                cands.clear();
                cands.push(v);
            } else if gain == best_gain {
                cands.push(v);
            }
        }
        if cands.is_empty() {
            // Everything is tabu and nothing aspires: take the global argmax.
            cands = argmax_ties(st.gains());
        }
        let v = pick(cfg.tie_break, &cands, &mut rng);
        let greedy_max = st.gain(v) == max_all;
        let gain = st.flip(v);
        trajectory.push(TrajectoryStep {
            step: t,
            action: v as u32,
            gain,
            objective: st.cut_value(),
            greedy_max,
        });
    }
    SearchOutcome {
        best_value: st.best_value(),
        best_side: st.best_side().to_vec(),
        steps: trajectory.len() as u64,
        trajectory,
    }
}
