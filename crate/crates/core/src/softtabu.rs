//! Max-Cut episode environment for the learned policy.
//!
//! Each vertex contributes one feature row: its flip gain and the staleness
//! of its last flip. The reward is the normalized improvement over the best
//! value seen earlier in the episode, plus a small bonus the first time each
//! local optimum is reached. Flipping the argmax-gain vertex forever is the
//! degenerate policy with weights (1, 0); the second feature is what lets a
//! trained model soften the tabu rule instead of hard-coding it.

use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::graphs::{GenSpec, Graph, GraphError};
use crate::maxcut::CutState;
use crate::qlearn::{
    self, Environment, FeatureMatrix, LinearQ, Rollout, TrainConfig, TrainError,
};
use crate::seeds;

pub const N_FEATURES: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainScale {
    /// Divide by max(1, max |gain|) measured at episode start.
    MaxAbsAtInit,
    /// Divide by max(1, total absolute edge weight). For SAT episodes the
    /// analog is the clause count.
    TotalWeight,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeScale {
    /// Steps since last flip divided by the horizon, in [0, 1].
    HorizonFraction,
    /// Raw step count.
    Raw,
}

/// How raw (gain, staleness) pairs become feature rows.
#[derive(Debug, Clone)]
pub struct FeatureSpec {
    pub gain_scale: GainScale,
    pub time_scale: TimeScale,
    /// Staleness feature for vertices that have never flipped.
    pub never_flipped_value: f64,
}

impl Default for FeatureSpec {
    fn default() -> FeatureSpec {
        FeatureSpec {
            gain_scale: GainScale::MaxAbsAtInit,
            time_scale: TimeScale::HorizonFraction,
            never_flipped_value: 1.0,
        }
    }
}

impl GainScale {
    pub fn parse(s: &str) -> Option<GainScale> {
        match s {
            "max_abs_gain_at_init" => Some(GainScale::MaxAbsAtInit),
            "graph_weight_sum" => Some(GainScale::TotalWeight),
            "none" => Some(GainScale::None),
            _ => None,
        }
    }
}

impl TimeScale {
    pub fn parse(s: &str) -> Option<TimeScale> {
        match s {
            "horizon_fraction" => Some(TimeScale::HorizonFraction),
            "raw" => Some(TimeScale::Raw),
            _ => None,
        }
    }
}

pub(crate) fn feature_row(
    spec: &FeatureSpec,
    gain: f64,
    steps_since: Option<u64>,
    gain_denom: f64,
    horizon: u64,
) -> [f64; 2] {
    let g = gain / gain_denom;
    let t = match steps_since {
        None => spec.never_flipped_value,
        Some(s) => match spec.time_scale {
            TimeScale::Raw => s as f64,
            TimeScale::HorizonFraction => s as f64 / horizon.max(1) as f64,
        },
    };
    [g, t]
}

pub(crate) fn gain_denom_for(spec: &FeatureSpec, init_gains: &[f64], total_weight: f64) -> f64 {
    match spec.gain_scale {
        GainScale::None => 1.0,
        GainScale::MaxAbsAtInit => init_gains
            .iter()
            .fold(1.0f64, |acc, &g| acc.max(g.abs())),
        GainScale::TotalWeight => total_weight.max(1.0),
    }
}

/// One Max-Cut episode over a fixed graph and horizon.
#[derive(Debug, Clone)]
pub struct MaxcutEpisode<'g> {
    cut: CutState<'g>,
    horizon: u64,
    t: u64,
    spec: FeatureSpec,
    gain_denom: f64,
    seen_optima: HashSet<u64>,
}

impl<'g> MaxcutEpisode<'g> {
    pub fn new(graph: &'g Graph, start: Vec<bool>, horizon: u64, spec: FeatureSpec) -> Self {
        let cut = CutState::new(graph, start);
        let gain_denom = gain_denom_for(&spec, cut.gains(), graph.total_abs_weight());
        MaxcutEpisode {
            cut,
            horizon,
            t: 0,
            spec,
            gain_denom,
            seen_optima: HashSet::new(),
        }
    }

    pub fn random_start<R: Rng + ?Sized>(
        graph: &'g Graph,
        horizon: u64,
        spec: FeatureSpec,
        rng: &mut R,
    ) -> Self {
        let side = (0..graph.n()).map(|_| rng.random_bool(0.5)).collect();
        MaxcutEpisode::new(graph, side, horizon, spec)
    }

    pub fn cut(&self) -> &CutState<'g> {
        &self.cut
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn elapsed(&self) -> u64 {
        self.t
    }

    /// Reward for arriving at objective `f_now` when the pre-step best was
    /// `f_best_before`: the clamped normalized improvement, plus `1/n` the
    /// first time this state is seen as a local optimum.
    pub fn reward(&mut self, f_now: f64, f_best_before: f64, at_local_opt: bool) -> f64 {
        let n = self.cut.n().max(1) as f64;
        let mut r = ((f_now - f_best_before) / n).max(0.0);
        if at_local_opt && self.seen_optima.insert(self.cut.fingerprint()) {
            r += 1.0 / n;
        }
        r
    }
}

impl Environment for MaxcutEpisode<'_> {
    fn n_actions(&self) -> usize {
        self.cut.n()
    }

    fn observe(&self) -> FeatureMatrix {
        let mut m = FeatureMatrix::with_capacity(N_FEATURES, self.cut.n());
        for v in 0..self.cut.n() {
            let row = feature_row(
                &self.spec,
                self.cut.gain(v),
                self.cut.steps_since_flip(v),
                self.gain_denom,
                self.horizon,
            );
            m.push_row(&row);
        }
        m
    }

    fn raw_gains(&self) -> Vec<f64> {
        self.cut.gains().to_vec()
    }

    fn objective(&self) -> f64 {
        self.cut.cut_value()
    }

    fn step(&mut self, action: usize) -> (f64, bool) {
        let best_before = self.cut.best_value();
        self.cut.flip(action);
        self.t += 1;
        let at_local_opt = self.cut.is_local_opt();
        let r = self.reward(self.cut.cut_value(), best_before, at_local_opt);
        (r, self.t >= self.horizon)
    }
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Trains a policy on freshly sampled graphs from `dist` (one per episode,
/// seeded from `cfg.seed`). The `seed` field of `dist` is ignored.
pub fn train(dist: &GenSpec, cfg: &TrainConfig, spec: &FeatureSpec) -> Result<LinearQ, EnvError> {
    dist.validate()?;
    let graphs: Vec<Graph> = (0..cfg.episodes)
        .map(|ep| {
            Graph::generate(&GenSpec {
                seed: seeds::derive(cfg.seed, "train-graph", ep),
                ..dist.clone()
            })
            .expect("validated spec")
        })
        .collect();
    let q = qlearn::train_policy(
        |ep| {
            let g = &graphs[ep as usize];
            let mut rng = seeds::rng(cfg.seed, "train-start", ep);
            let horizon = u64::from(cfg.horizon_mult) * g.n() as u64;
            MaxcutEpisode::random_start(g, horizon, spec.clone(), &mut rng)
        },
        N_FEATURES,
        cfg,
    )?;
    Ok(q)
}

/// Evaluation outcome: best value over all greedy episodes plus the
/// per-episode trajectories.
#[derive(Debug, Clone)]
pub struct EvalOutcome {
    pub best_value: f64,
    pub episodes: Vec<Rollout>,
}

/// Greedy rollouts from `episodes` random starts, horizon `horizon_mult * n`.
pub fn evaluate(
    q: &LinearQ,
    g: &Graph,
    episodes: u32,
    horizon_mult: u32,
    spec: &FeatureSpec,
    seed: u64,
) -> EvalOutcome {
    let mut out = EvalOutcome {
        best_value: f64::NEG_INFINITY,
        episodes: Vec::with_capacity(episodes as usize),
    };
    let horizon = u64::from(horizon_mult) * g.n() as u64;
    for ep in 0..episodes {
        let mut rng = seeds::rng(seed, "eval-start", u64::from(ep));
        let mut env = MaxcutEpisode::random_start(g, horizon, spec.clone(), &mut rng);
        let rollout = qlearn::greedy_rollout(&mut env, q);
        out.best_value = out.best_value.max(rollout.best_objective);
        out.episodes.push(rollout);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{GraphFamily, WeightScheme};
    use crate::maxcut::gains_of;
    use crate::TieBreak;

    fn single_edge(w: f64) -> Graph {
        Graph::new(2, vec![(0, 1, w)]).unwrap()
    }

    fn raw_spec() -> FeatureSpec {
        FeatureSpec {
            gain_scale: GainScale::None,
            time_scale: TimeScale::Raw,
            never_flipped_value: 1.0,
        }
    }

    #[test]
    fn observe_unscaled_fresh_state() {
        let g = single_edge(5.0);
        let env = MaxcutEpisode::new(&g, vec![false, false], 4, raw_spec());
        let m = env.observe();
        assert_eq!(m.row(0), &[5.0, 1.0]);
        assert_eq!(m.row(1), &[5.0, 1.0]);
    }

    #[test]
    fn observe_raw_time_after_flip() {
        let g = single_edge(5.0);
        let mut env = MaxcutEpisode::new(&g, vec![false, false], 4, raw_spec());
        env.step(0);
        let m = env.observe();
        // Vertex 0 flipped one step ago; vertex 1 never flipped.
        assert_eq!(m.row(0), &[-5.0, 1.0]);
        assert_eq!(m.row(1), &[-5.0, 1.0]);
        env.step(1);
        let m = env.observe();
        assert_eq!(m.row(0), &[5.0, 2.0]);
        assert_eq!(m.row(1), &[5.0, 1.0]);
    }

    #[test]
    fn observe_scaled_defaults() {
        let g = single_edge(5.0);
        let env = MaxcutEpisode::new(&g, vec![false, false], 4, FeatureSpec::default());
        let m = env.observe();
        // Gains 5 scale by max(1, 5); unflipped staleness is 1.0.
        assert_eq!(m.row(0), &[1.0, 1.0]);
        assert_eq!(m.row(1), &[1.0, 1.0]);
    }

    #[test]
    fn observe_horizon_fraction_time() {
        let g = single_edge(5.0);
        let spec = FeatureSpec {
            gain_scale: GainScale::None,
            time_scale: TimeScale::HorizonFraction,
            never_flipped_value: 1.0,
        };
        let mut env = MaxcutEpisode::new(&g, vec![false, false], 10, spec);
        env.step(0);
        env.step(1);
        let m = env.observe();
        assert_eq!(m.row(0), &[5.0, 0.2]);
        assert_eq!(m.row(1), &[5.0, 0.1]);
    }

    #[test]
    fn gain_denominator_never_vanishes() {
        let g = Graph::new(3, vec![]).unwrap();
        let env = MaxcutEpisode::new(&g, vec![false; 3], 6, FeatureSpec::default());
        let m = env.observe();
        assert_eq!(m.row(0), &[0.0, 1.0]);
    }

    #[test]
    fn reward_improvement_is_normalized_and_clamped() {
        let g = Graph::new(4, vec![(0, 1, 1.0)]).unwrap();
        let mut env = MaxcutEpisode::new(&g, vec![false; 4], 8, FeatureSpec::default());
        assert_eq!(env.reward(13.0, 12.0, false), 0.25);
        assert_eq!(env.reward(10.0, 12.0, false), 0.0);
    }

    #[test]
    fn local_optimum_bonus_fires_once_per_state() {
        let g = Graph::new(4, vec![(0, 1, 1.0)]).unwrap();
        let mut env = MaxcutEpisode::new(&g, vec![false; 4], 8, FeatureSpec::default());
        assert_eq!(env.reward(12.0, 12.0, true), 0.25);
        assert_eq!(env.reward(12.0, 12.0, true), 0.0);
    }

    #[test]
    fn step_hand_trace_matches() {
        // Single edge w=5, same-side start, script [0, 0, 1, 0, 1].
        // Worked by hand: improvements (5-0)/2 at the first step only, local
        // optimum bonus 1/2 at the two distinct cut states with value 5.
        let g = single_edge(5.0);
        let mut env = MaxcutEpisode::new(&g, vec![false, false], 5, FeatureSpec::default());
        let script = [0usize, 0, 1, 0, 1];
        let want_rewards = [3.0, 0.0, 0.5, 0.0, 0.0];
        let want_done = [false, false, false, false, true];
        for (i, &a) in script.iter().enumerate() {
            let (r, done) = env.step(a);
            assert_eq!(r, want_rewards[i], "step {i}");
            assert_eq!(done, want_done[i], "step {i}");
        }
    }

    #[test]
    fn weights_one_zero_match_pure_greedy_agent() {
        // Scripted oracle: argmax over scratch gains, lowest index on ties.
        let q = LinearQ {
            weights: vec![1.0, 0.0],
            bias: 0.0,
        };
        for (seed, scale) in [(0u64, GainScale::None), (1, GainScale::MaxAbsAtInit), (2, GainScale::TotalWeight)] {
            let g = Graph::generate(&GenSpec {
                family: GraphFamily::Er,
                n: 18,
                param: 0.3,
                weights: WeightScheme::SignedUnit,
                seed,
            })
            .unwrap();
            let mut rng = crate::seeds::rng(seed, "greedy-eq", 0);
            let start: Vec<bool> = (0..g.n()).map(|_| rng.random_bool(0.5)).collect();
            let spec = FeatureSpec {
                gain_scale: scale,
                ..FeatureSpec::default()
            };
            let mut env = MaxcutEpisode::new(&g, start.clone(), 36, spec);
            let rollout = qlearn::greedy_rollout(&mut env, &q);

            let mut side = start;
            for stp in &rollout.trajectory {
                let gains = gains_of(&g, &side);
                let mut best = 0usize;
                for v in 1..g.n() {
                    if gains[v] > gains[best] {
                        best = v;
                    }
                }
                assert_eq!(stp.action as usize, best);
                side[best] = !side[best];
            }
        }
    }

    #[test]
    fn evaluate_finds_single_edge_cut() {
        let g = single_edge(5.0);
        let q = LinearQ::zeros(2);
        let out = evaluate(&q, &g, 2, 2, &FeatureSpec::default(), 3);
        assert_eq!(out.best_value, 5.0);
        assert_eq!(out.episodes.len(), 2);
    }

    #[test]
    fn evaluate_is_deterministic() {
        let g = Graph::generate(&GenSpec {
            family: GraphFamily::Er,
            n: 14,
            param: 0.4,
            weights: WeightScheme::SignedUnit,
            seed: 5,
        })
        .unwrap();
        let q = LinearQ {
            weights: vec![0.8, 0.3],
            bias: -0.1,
        };
        let a = evaluate(&q, &g, 4, 2, &FeatureSpec::default(), 9);
        let b = evaluate(&q, &g, 4, 2, &FeatureSpec::default(), 9);
        assert_eq!(a.best_value, b.best_value);
        for (ra, rb) in a.episodes.iter().zip(&b.episodes) {
            assert_eq!(ra.trajectory, rb.trajectory);
        }
    }

    #[test]
    fn train_zero_episodes_returns_zero_model() {
        let dist = GenSpec {
            family: GraphFamily::Er,
            n: 8,
            param: 0.4,
            weights: WeightScheme::SignedUnit,
            seed: 0,
        };
        let cfg = TrainConfig {
            episodes: 0,
            ..TrainConfig::default()
        };
        let q = train(&dist, &cfg, &FeatureSpec::default()).unwrap();
        assert_eq!(q.weights, vec![0.0, 0.0]);
        assert_eq!(q.bias, 0.0);
    }

    #[test]
    fn train_smoke_produces_finite_model() {
        let dist = GenSpec {
            family: GraphFamily::Er,
            n: 8,
            param: 0.4,
            weights: WeightScheme::SignedUnit,
            seed: 0,
        };
        let cfg = TrainConfig {
            episodes: 30,
            epsilon_decay_steps: 200,
            batch_size: 16,
            replay_capacity: 500,
            target_sync_interval: 50,
            seed: 4,
            ..TrainConfig::default()
        };
        let q = train(&dist, &cfg, &FeatureSpec::default()).unwrap();
        assert!(q.weights.iter().all(|w| w.is_finite()));
        assert!(q.bias.is_finite());
    }

    #[test]
    fn greedy_rollout_uses_lowest_index_ties() {
        let g = Graph::new(2, vec![(0, 1, 1.0)]).unwrap();
        let q = LinearQ::zeros(2);
        let mut env = MaxcutEpisode::new(&g, vec![false, false], 1, FeatureSpec::default());
        let mut rng = crate::seeds::rng(0, "x", 0);
        let a = qlearn::greedy_action(&q, &env.observe(), TieBreak::LowestIndex, &mut rng);
        assert_eq!(a, 0);
        let rollout = qlearn::greedy_rollout(&mut env, &q);
        assert_eq!(rollout.trajectory[0].action, 0);
    }
}
