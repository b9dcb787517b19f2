//! Flip-based SAT search: WalkSAT and the learned-policy episode loop.

use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::qlearn::{
    self, Environment, FeatureMatrix, LinearQ, TrainConfig, TrainError,
};
use crate::sat::{gen_filtered, CnfDist, CnfError, CnfFormula, SatState};
use crate::seeds;
use crate::softtabu::{feature_row, gain_denom_for, FeatureSpec, N_FEATURES};
use crate::TieBreak;

#[derive(Debug, Clone)]
pub struct WalksatConfig {
    /// Probability of a random walk move when no freebie exists.
    pub p: f64,
    pub max_steps: u64,
    /// Take a zero-break flip whenever one exists.
    pub freebie: bool,
}

impl Default for WalksatConfig {
    fn default() -> WalksatConfig {
        WalksatConfig {
            p: 0.5,
            max_steps: 5000,
            freebie: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub solved: bool,
    /// Flips performed before success or cutoff.
    pub steps: u64,
    pub assignment: Vec<bool>,
}

/// Classic WalkSAT from a random assignment: pick a random unsatisfied
/// clause; flip a zero-break variable if any, otherwise a random clause
/// variable with probability `p`, otherwise a minimum-break one. All ties
/// are uniform draws.
pub fn walksat(f: &CnfFormula, cfg: &WalksatConfig, seed: u64) -> TrialOutcome {
    let mut rng = seeds::rng(seed, "walksat", 0);
    let mut s = SatState::random_start(f, &mut rng);
    let mut steps = 0u64;
    while steps < cfg.max_steps && !s.is_satisfied() {
        let ci = s.unsat_clauses()[rng.random_range(0..s.unsat_clauses().len())];
        let mut vars: Vec<usize> = f
            .clause(ci as usize)
            .iter()
            .map(|l| l.unsigned_abs() as usize - 1)
            .collect();
        vars.sort_unstable();
        vars.dedup();
        let zero: Vec<usize> = vars
            .iter()
            .copied()
            .filter(|&v| s.break_count(v) == 0)
            .collect();
        let v = if cfg.freebie && !zero.is_empty() {
            zero[rng.random_range(0..zero.len())]
        } else if rng.random_bool(cfg.p) {
            vars[rng.random_range(0..vars.len())]
        } else {
            let min_break = vars.iter().map(|&v| s.break_count(v)).min().unwrap();
            let best: Vec<usize> = vars
                .iter()
                .copied()
                .filter(|&v| s.break_count(v) == min_break)
                .collect();
            best[rng.random_range(0..best.len())]
        };
        s.flip(v);
        steps += 1;
    }
    TrialOutcome {
        solved: s.is_satisfied(),
        steps,
        assignment: s.assignment().to_vec(),
    }
}

/// One SAT episode over a fixed formula and horizon: actions are variable
/// flips, the objective is the satisfied-clause count, features and reward
/// mirror the Max-Cut episode with make-break as the gain.
#[derive(Debug, Clone)]
pub struct SatEpisode<'f> {
    s: SatState<'f>,
    horizon: u64,
    t: u64,
    spec: FeatureSpec,
    gain_denom: f64,
    seen_optima: HashSet<u64>,
}

impl<'f> SatEpisode<'f> {
    pub fn new(f: &'f CnfFormula, start: Vec<bool>, horizon: u64, spec: FeatureSpec) -> Self {
        let s = SatState::new(f, start);
        let gain_denom = gain_denom_for(&spec, &s.gains(), f.n_clauses() as f64);
        SatEpisode {
            s,
            horizon,
            t: 0,
            spec,
            gain_denom,
            seen_optima: HashSet::new(),
        }
    }

    pub fn random_start<R: Rng + ?Sized>(
        f: &'f CnfFormula,
        horizon: u64,
        spec: FeatureSpec,
        rng: &mut R,
    ) -> Self {
        let start = (0..f.n_vars()).map(|_| rng.random_bool(0.5)).collect();
        SatEpisode::new(f, start, horizon, spec)
    }

    pub fn state(&self) -> &SatState<'f> {
        &self.s
    }

    pub fn elapsed(&self) -> u64 {
        self.t
    }

    pub fn reward(&mut self, now: f64, best_before: f64, at_local_opt: bool) -> f64 {
        let n = self.s.n_vars().max(1) as f64;
        let mut r = ((now - best_before) / n).max(0.0);
        if at_local_opt && self.seen_optima.insert(self.s.fingerprint()) {
            r += 1.0 / n;
        }
        r
    }
}

impl Environment for SatEpisode<'_> {
    fn n_actions(&self) -> usize {
        self.s.n_vars()
    }

    fn observe(&self) -> FeatureMatrix {
        let mut m = FeatureMatrix::with_capacity(N_FEATURES, self.s.n_vars());
        for v in 0..self.s.n_vars() {
            let row = feature_row(
                &self.spec,
                self.s.delta_if_flip(v) as f64,
                self.s.steps_since_flip(v),
                self.gain_denom,
                self.horizon,
            );
            m.push_row(&row);
        }
        m
    }

    fn raw_gains(&self) -> Vec<f64> {
        self.s.gains()
    }

    fn objective(&self) -> f64 {
        self.s.sat_count() as f64
    }

    fn step(&mut self, action: usize) -> (f64, bool) {
        let best_before = self.s.best_sat() as f64;
        self.s.flip(action);
        self.t += 1;
        let at_local_opt = self.s.is_local_opt();
        let r = self.reward(self.s.sat_count() as f64, best_before, at_local_opt);
        (r, self.s.is_satisfied() || self.t >= self.horizon)
    }
}

#[derive(Debug, Error)]
pub enum SatEnvError {
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Train(#[from] TrainError),
}

/// Trains a policy on instances sampled from `dist`, one per episode.
/// With `filtered` set, only satisfiable instances are used.
pub fn train_sat(
    dist: &CnfDist,
    filtered: bool,
    cfg: &TrainConfig,
    spec: &FeatureSpec,
) -> Result<LinearQ, SatEnvError> {
    dist.validate()?;
    let instances: Vec<CnfFormula> = if filtered {
        gen_filtered(
            dist,
            cfg.episodes as usize,
            seeds::derive(cfg.seed, "train-cnf", 0),
        )?
    } else {
        (0..cfg.episodes)
            .map(|ep| dist.generate(seeds::derive(cfg.seed, "train-cnf", ep)))
            .collect::<Result<_, _>>()?
    };
    let q = qlearn::train_policy(
        |ep| {
            let f = &instances[ep as usize];
            let mut rng = seeds::rng(cfg.seed, "train-sat-start", ep);
            let horizon = u64::from(cfg.horizon_mult) * f.n_vars() as u64;
            SatEpisode::random_start(f, horizon, spec.clone(), &mut rng)
        },
        N_FEATURES,
        cfg,
    )?;
    Ok(q)
}

/// Repeated greedy episodes under a trained policy, stopping early on
/// success. Mirrors the WalkSAT trial interface for benchmarking.
pub fn softtabu_sat_solve(
    q: &LinearQ,
    f: &CnfFormula,
    trials: u32,
    max_steps: u64,
    spec: &FeatureSpec,
    seed: u64,
) -> Vec<TrialOutcome> {
    (0..trials)
        .map(|trial| {
            let mut rng = seeds::rng(seed, "softtabu-trial", u64::from(trial));
            let mut env = SatEpisode::random_start(f, max_steps, spec.clone(), &mut rng);
            let mut steps = 0u64;
            while steps < max_steps && !env.state().is_satisfied() && env.n_actions() > 0 {
                let a = qlearn::greedy_action(q, &env.observe(), TieBreak::LowestIndex, &mut rng);
                env.step(a);
                steps += 1;
            }
            TrialOutcome {
                solved: env.state().is_satisfied(),
                steps,
                assignment: env.state().assignment().to_vec(),
            }
        })
        .collect()
}
