//! Linear Q-learning over per-action feature rows.
//!
//! The function class is deliberately small: one shared weight vector and a
//! bias, scoring each action's feature row by an affine map. Problem-specific
//! environments implement [`Environment`] and the training loop here stays
//! agnostic to what an action means.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use rand::Rng;
use thiserror::Error;

use crate::util::{argmax_ties, pick};
use crate::{seeds, TieBreak, TrajectoryStep};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("feature width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("empty batch")]
    EmptyBatch,
    #[error("non-finite TD target (reward {reward}, bootstrap {bootstrap})")]
    NonFiniteTarget { reward: f64, bootstrap: f64 },
    #[error("model line {line}: {msg}")]
    ModelFormat { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Row-major matrix of per-action feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    width: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(width: usize) -> FeatureMatrix {
        FeatureMatrix { width, data: Vec::new() }
    }

    pub fn with_capacity(width: usize, rows: usize) -> FeatureMatrix {
        FeatureMatrix {
            width,
            data: Vec::with_capacity(width * rows),
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> FeatureMatrix {
        let width = rows.first().map_or(0, |r| r.len());
        let mut m = FeatureMatrix::with_capacity(width, rows.len());
        for r in rows {
            m.push_row(r);
        }
        m
    }

    /// # Panics
    /// If the row width differs from the matrix width.
    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.width, "feature row width mismatch");
        self.data.extend_from_slice(row);
    }

    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }
}

/// Affine scorer: `score(x) = w . x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearQ {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearQ {
    pub fn zeros(n_features: usize) -> LinearQ {
        LinearQ {
            weights: vec![0.0; n_features],
            bias: 0.0,
        }
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// # Panics
    /// If `row.len()` differs from the weight count.
    pub fn score(&self, row: &[f64]) -> f64 {
        assert_eq!(row.len(), self.weights.len(), "feature width mismatch");
        let mut s = self.bias;
        for (w, x) in self.weights.iter().zip(row) {
            s += w * x;
        }
        s
    }

    /// Scores every row.
    pub fn q_values(&self, feats: &FeatureMatrix) -> Vec<f64> {
        (0..feats.rows()).map(|i| self.score(feats.row(i))).collect()
    }

    fn max_score(&self, feats: &FeatureMatrix) -> f64 {
        (0..feats.rows())
            .map(|i| self.score(feats.row(i)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Greedy argmax over action scores.
///
/// # Panics
/// If there are no actions.
pub fn greedy_action<R: Rng + ?Sized>(
    q: &LinearQ,
    feats: &FeatureMatrix,
    tie: TieBreak,
    rng: &mut R,
) -> usize {
    assert!(feats.rows() > 0, "empty action set");
    let scores = q.q_values(feats);
    let cands = argmax_ties(&scores);
    pick(tie, &cands, rng)
}

/// With probability `epsilon` a uniform action, otherwise greedy.
pub fn epsilon_greedy<R: Rng + ?Sized>(
    q: &LinearQ,
    feats: &FeatureMatrix,
    epsilon: f64,
    tie: TieBreak,
    rng: &mut R,
) -> usize {
    assert!(feats.rows() > 0, "empty action set");
    if rng.random::<f64>() < epsilon {
        rng.random_range(0..feats.rows())
    } else {
        greedy_action(q, feats, tie, rng)
    }
}

/// One stored step: features of every action before and after, the action
/// taken, the reward, and whether the episode ended there.
#[derive(Debug, Clone)]
pub struct Transition {
    pub before: FeatureMatrix,
    pub action: usize,
    pub reward: f64,
    pub after: FeatureMatrix,
    pub terminal: bool,
}

/// Fixed-capacity FIFO replay buffer with uniform sampling.
#[derive(Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    buf: VecDeque<Transition>,
}

impl ReplayBuffer {
    /// # Panics
    /// If `capacity` is zero.
    pub fn new(capacity: usize) -> ReplayBuffer {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            capacity,
            buf: VecDeque::with_capacity(capacity),
        }
    }

    pub fn push(&mut self, t: Transition) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(t);
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    /// Uniform sample with replacement.
    pub fn sample<R: Rng + ?Sized>(&self, batch: usize, rng: &mut R) -> Vec<&Transition> {
        assert!(!self.buf.is_empty(), "cannot sample from empty replay");
        (0..batch)
            .map(|_| &self.buf[rng.random_range(0..self.buf.len())])
            .collect()
    }
}

/// Training hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub episodes: u64,
    /// Episode horizon as a multiple of the action count.
    pub horizon_mult: u32,
    pub discount: f64,
    pub learning_rate: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_steps: u64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    /// Updates between target-network copies; 0 bootstraps from the live
    /// weights.
    pub target_sync_interval: u64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            episodes: 4000,
            horizon_mult: 2,
            discount: 0.95,
            learning_rate: 1e-3,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_steps: 50_000,
            replay_capacity: 5000,
            batch_size: 64,
            target_sync_interval: 1000,
            seed: 0,
        }
    }
}

/// Linear schedule from `epsilon_start` to `epsilon_end`.
pub fn epsilon_at(cfg: &TrainConfig, global_step: u64) -> f64 {
    if cfg.epsilon_decay_steps == 0 {
        return cfg.epsilon_end;
    }
    let frac = (global_step as f64 / cfg.epsilon_decay_steps as f64).min(1.0);
    cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac
}

/// One averaged gradient step on the squared TD error of a batch.
///
/// Targets are `r` for terminal transitions and `r + discount * max_a'
/// target.score(after[a'])` otherwise. The delta rule applies: each weight
/// moves by `lr * err * x`, the bias by `lr * err`, averaged over the batch.
pub fn td_update(
    q: &mut LinearQ,
    target: &LinearQ,
    batch: &[&Transition],
    discount: f64,
    learning_rate: f64,
) -> Result<(), TrainError> {
    if batch.is_empty() {
        return Err(TrainError::EmptyBatch);
    }
    let width = q.n_features();
    let mut grad_w = vec![0.0f64; width];
    let mut grad_b = 0.0f64;
    for t in batch {
        if t.before.width() != width {
            return Err(TrainError::WidthMismatch {
                expected: width,
                got: t.before.width(),
            });
        }
        let bootstrap = if t.terminal || t.after.rows() == 0 {
            0.0
        } else {
            discount * target.max_score(&t.after)
        };
        let y = t.reward + bootstrap;
        if !y.is_finite() {
            return Err(TrainError::NonFiniteTarget {
                reward: t.reward,
                bootstrap,
            });
        }
        let row = t.before.row(t.action);
        let err = y - q.score(row);
        for (g, x) in grad_w.iter_mut().zip(row) {
            *g += err * x;
        }
        grad_b += err;
    }
    let scale = learning_rate / batch.len() as f64;
    for (w, g) in q.weights.iter_mut().zip(&grad_w) {
        *w += scale * g;
    }
    q.bias += scale * grad_b;
    Ok(())
}

/// An episodic task exposing per-action features and scalar rewards.
pub trait Environment {
    fn n_actions(&self) -> usize;
    /// Current feature row per action.
    fn observe(&self) -> FeatureMatrix;
    /// Unscaled per-action objective gains, for trajectory bookkeeping.
    fn raw_gains(&self) -> Vec<f64>;
    /// Current objective value.
    fn objective(&self) -> f64;
    /// Applies the action; returns (reward, done).
    fn step(&mut self, action: usize) -> (f64, bool);
}

/// Trains a fresh linear Q with epsilon-greedy exploration and replay.
/// `make_env` is called once per episode.
pub fn train_policy<E, F>(
    mut make_env: F,
    n_features: usize,
    cfg: &TrainConfig,
) -> Result<LinearQ, TrainError>
where
    E: Environment,
    F: FnMut(u64) -> E,
{
    let mut rng = seeds::rng(cfg.seed, "train-policy", 0);
    let mut q = LinearQ::zeros(n_features);
    let mut target = q.clone();
    let mut replay = ReplayBuffer::new(cfg.replay_capacity);
    let mut global_step = 0u64;
    let mut updates = 0u64;
    for ep in 0..cfg.episodes {
        let mut env = make_env(ep);
        if env.n_actions() == 0 {
            continue;
        }
        let mut obs = env.observe();
        loop {
            let eps = epsilon_at(cfg, global_step);
            let a = epsilon_greedy(&q, &obs, eps, TieBreak::LowestIndex, &mut rng);
            let (reward, done) = env.step(a);
            let after = env.observe();
            replay.push(Transition {
                before: obs,
                action: a,
                reward,
                after: after.clone(),
                terminal: done,
            });
            obs = after;
            global_step += 1;
            if replay.len() >= cfg.batch_size {
                let batch = replay.sample(cfg.batch_size, &mut rng);
                if cfg.target_sync_interval == 0 {
                    let live = q.clone();
                    td_update(&mut q, &live, &batch, cfg.discount, cfg.learning_rate)?;
                } else {
                    td_update(&mut q, &target, &batch, cfg.discount, cfg.learning_rate)?;
                }
                updates += 1;
                if cfg.target_sync_interval > 0 && updates.is_multiple_of(cfg.target_sync_interval) {
                    target = q.clone();
                }
            }
            if done {
                break;
            }
        }
    }
    Ok(q)
}

/// A full greedy episode under `q`. Ties break to the lowest index so runs
/// are reproducible.
#[derive(Debug, Clone)]
pub struct Rollout {
    pub trajectory: Vec<TrajectoryStep>,
    /// Max objective over the episode, the start state included.
    pub best_objective: f64,
    pub final_objective: f64,
}

pub fn greedy_rollout<E: Environment>(env: &mut E, q: &LinearQ) -> Rollout {
    let mut rng = seeds::rng(0, "rollout-unused", 0);
    let mut trajectory = Vec::new();
    let mut best = env.objective();
    let mut t = 0u64;
    loop {
        let obs = env.observe();
        if obs.rows() == 0 {
            break;
        }
        let gains = env.raw_gains();
        let a = greedy_action(q, &obs, TieBreak::LowestIndex, &mut rng);
        let max_gain = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let greedy_max = gains[a] == max_gain;
        let (_, done) = env.step(a);
        let objective = env.objective();
        best = best.max(objective);
        trajectory.push(TrajectoryStep {
            step: t,
            action: a as u32,
            gain: gains[a],
            objective,
            greedy_max,
        });
        t += 1;
        if done {
            break;
        }
    }
    Rollout {
        trajectory,
        best_objective: best,
        final_objective: env.objective(),
    }
}

const MODEL_MAGIC: &str = "linq v1";

/// Serializes a model as three lines: magic + width, weights, bias.
pub fn model_to_string(q: &LinearQ) -> String {
    let ws: Vec<String> = q.weights.iter().map(|w| format!("{w}")).collect();
    format!("{MODEL_MAGIC} {}\n{}\n{}\n", q.weights.len(), ws.join(" "), q.bias)
}

pub fn model_from_str(text: &str) -> Result<LinearQ, TrainError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(TrainError::ModelFormat {
        line: 1,
        msg: "empty model file".into(),
    })?;
    let rest = header.strip_prefix(MODEL_MAGIC).ok_or_else(|| TrainError::ModelFormat {
        line: 1,
        msg: format!("expected `{MODEL_MAGIC} <n>` header, got {header:?}"),
    })?;
    let n: usize = rest.trim().parse().map_err(|_| TrainError::ModelFormat {
        line: 1,
        msg: format!("bad feature count {rest:?}"),
    })?;
    let wline = lines.next().ok_or(TrainError::ModelFormat {
        line: 2,
        msg: "missing weights line".into(),
    })?;
    let weights: Vec<f64> = wline
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>().map_err(|_| TrainError::ModelFormat {
                line: 2,
                msg: format!("bad weight {t:?}"),
            })
        })
        .collect::<Result<_, _>>()?;
    if weights.len() != n {
        return Err(TrainError::ModelFormat {
            line: 2,
            msg: format!("expected {n} weights, found {}", weights.len()),
        });
    }
    let bline = lines.next().ok_or(TrainError::ModelFormat {
        line: 3,
        msg: "missing bias line".into(),
    })?;
    let bias: f64 = bline.trim().parse().map_err(|_| TrainError::ModelFormat {
        line: 3,
        msg: format!("bad bias {bline:?}"),
    })?;
    if !weights.iter().all(|w| w.is_finite()) || !bias.is_finite() {
        return Err(TrainError::ModelFormat {
            line: 2,
            msg: "non-finite parameter".into(),
        });
    }
    Ok(LinearQ { weights, bias })
}

pub fn save_model(q: &LinearQ, path: &Path) -> Result<(), TrainError> {
    fs::write(path, model_to_string(q))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<LinearQ, TrainError> {
    model_from_str(&fs::read_to_string(path)?)
}
