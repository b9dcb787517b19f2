//! Benchmark protocols: run agents over instance suites under fixed seeds
//! and summarize into reports. Runs fan out over a thread pool; every
//! stochastic choice is keyed by (seed, instance, agent, episode), so
//! reports are byte-identical across reruns regardless of scheduling.

pub mod report;
pub mod stats;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::graphs::{Graph, GraphError};
use crate::maxcut::{brute_force_optimum, BRUTE_FORCE_CAP};
use crate::qlearn::{self, LinearQ, TrainError};
use crate::sat::{CnfError, CnfFormula};
use crate::satsearch::{softtabu_sat_solve, walksat, TrialOutcome, WalksatConfig};
use crate::search::{self, TabuConfig};
use crate::seeds;
use crate::softtabu::{FeatureSpec, MaxcutEpisode};
use crate::{TieBreak, TrajectoryStep};

use report::{MaxcutReport, MaxcutRow, SatReport, SatSummaryRow, SatTrialRow};
use stats::TrajectoryRecord;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AgentKind {
    Mca,
    Tabu,
    SoftTabu,
}

impl AgentKind {
    pub fn parse(s: &str) -> Option<AgentKind> {
        match s {
            "mca" => Some(AgentKind::Mca),
            "tabu" => Some(AgentKind::Tabu),
            "softtabu" => Some(AgentKind::SoftTabu),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AgentKind::Mca => "mca",
            AgentKind::Tabu => "tabu",
            AgentKind::SoftTabu => "softtabu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SatAgentKind {
    Walksat,
    SoftTabu,
}

impl SatAgentKind {
    pub fn parse(s: &str) -> Option<SatAgentKind> {
        match s {
            "walksat" => Some(SatAgentKind::Walksat),
            "softtabu" => Some(SatAgentKind::SoftTabu),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SatAgentKind::Walksat => "walksat",
            SatAgentKind::SoftTabu => "softtabu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxcutProtocol {
    pub episodes: u32,
    /// Episode horizon as a multiple of the vertex count.
    pub horizon_mult: u32,
}

impl Default for MaxcutProtocol {
    fn default() -> MaxcutProtocol {
        MaxcutProtocol { episodes: 50, horizon_mult: 2 }
    }
}

impl MaxcutProtocol {
    /// Fewer but longer episodes, for large instances.
    pub fn large_instance() -> MaxcutProtocol {
        MaxcutProtocol { episodes: 5, horizon_mult: 4 }
    }
}

#[derive(Debug, Clone)]
pub struct MaxcutSuiteConfig {
    pub agents: Vec<AgentKind>,
    pub protocol: MaxcutProtocol,
    pub tenure: u64,
    pub aspiration: bool,
    pub tie_break: TieBreak,
    pub model: Option<LinearQ>,
    pub features: FeatureSpec,
    /// Reference best-known values by instance name.
    pub reference: BTreeMap<String, f64>,
    pub seed: u64,
    pub collect_trajectories: bool,
}

impl MaxcutSuiteConfig {
    pub fn new(seed: u64) -> MaxcutSuiteConfig {
        MaxcutSuiteConfig {
            agents: vec![AgentKind::Mca, AgentKind::Tabu],
            protocol: MaxcutProtocol::default(),
            tenure: 20,
            aspiration: true,
            tie_break: TieBreak::LowestIndex,
            model: None,
            features: FeatureSpec::default(),
            reference: BTreeMap::new(),
            seed,
            collect_trajectories: false,
        }
    }
}

/// Wall-clock seconds per (instance, agent) run. Reported separately from
/// the data files so those stay reproducible.
#[derive(Debug, Clone)]
pub struct SuiteTiming {
    pub instance: String,
    pub agent: String,
    pub seconds: f64,
}

fn sorted_agent_list<T: Copy + Ord>(agents: &[T]) -> Vec<T> {
    let mut a = agents.to_vec();
    a.sort_unstable();
    a.dedup();
    a
}

fn random_side<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

/// When the denominator is a usable optimum, the plain quotient clamped
/// below at zero; degenerate non-positive denominators compare directly.
fn safe_ratio(value: f64, best_known: f64) -> f64 {
    if best_known > 0.0 {
        (value / best_known).max(0.0)
    } else if value == best_known {
        1.0
    } else {
        0.0
    }
}

struct MaxcutRun {
    instance: usize,
    agent: AgentKind,
    best_value: f64,
    episodes: Vec<Vec<TrajectoryStep>>,
    seconds: f64,
}

pub fn run_maxcut_suite(
    instances: &[(String, Graph)],
    cfg: &MaxcutSuiteConfig,
) -> Result<(MaxcutReport, Vec<TrajectoryRecord>, Vec<SuiteTiming>), BenchError> {
    if instances.is_empty() {
        return Err(BenchError::Invalid("no instances given".into()));
    }
    if cfg.protocol.episodes == 0 {
        return Err(BenchError::Invalid("episodes must be at least 1".into()));
    }
    let agents = sorted_agent_list(&cfg.agents);
    if agents.is_empty() {
        return Err(BenchError::Invalid("no agents enabled".into()));
    }
    let model = if agents.contains(&AgentKind::SoftTabu) {
        let q = cfg
            .model
            .as_ref()
            .ok_or_else(|| BenchError::Invalid("softtabu agent needs a model".into()))?;
        if q.n_features() != crate::softtabu::N_FEATURES {
            return Err(BenchError::Invalid(format!(
                "model has {} features, expected {}",
                q.n_features(),
                crate::softtabu::N_FEATURES
            )));
        }
        Some(q)
    } else {
        None
    };

    let brute: Vec<Option<f64>> = instances
        .par_iter()
        .map(|(_, g)| (g.n() <= BRUTE_FORCE_CAP).then(|| brute_force_optimum(g).0))
        .collect();

    let pairs: Vec<(usize, AgentKind)> = (0..instances.len())
        .flat_map(|i| agents.iter().map(move |&a| (i, a)))
        .collect();
    let runs: Vec<MaxcutRun> = pairs
        .par_iter()
        .map(|&(i, agent)| {
            let (name, g) = &instances[i];
            let t0 = Instant::now();
            let stream = format!("bench/{}/{}", agent.label(), name);
            let horizon = u64::from(cfg.protocol.horizon_mult) * g.n() as u64;
            let mut best = f64::NEG_INFINITY;
            let mut episodes = Vec::new();
            for ep in 0..u64::from(cfg.protocol.episodes) {
                let ep_seed = seeds::derive(cfg.seed, &stream, ep);
                let start = random_side(g.n(), &mut seeds::rng(ep_seed, "start", 0));
                let (ep_best, traj) = match agent {
                    AgentKind::Mca => {
                        let out = search::mca(g, start);
                        (out.best_value, out.trajectory)
                    }
                    AgentKind::Tabu => {
                        let tc = TabuConfig {
                            tenure: cfg.tenure,
                            max_steps: horizon,
                            aspiration: cfg.aspiration,
                            tie_break: cfg.tie_break,
                        };
                        let out = search::tabu(g, start, &tc, seeds::derive(ep_seed, "tabu", 0));
                        (out.best_value, out.trajectory)
                    }
                    AgentKind::SoftTabu => {
                        let mut env =
                            MaxcutEpisode::new(g, start, horizon, cfg.features.clone());
                        let out = qlearn::greedy_rollout(&mut env, model.unwrap());
                        (out.best_objective, out.trajectory)
                    }
                };
                best = best.max(ep_best);
                if cfg.collect_trajectories {
                    episodes.push(traj);
                }
            }
            MaxcutRun {
                instance: i,
                agent,
                best_value: best,
                episodes,
                seconds: t0.elapsed().as_secs_f64(),
            }
        })
        .collect();

    let mut best_known: Vec<f64> = instances
        .iter()
        .enumerate()
        .map(|(i, (name, _))| {
            let reference = cfg.reference.get(name).copied();
            reference.unwrap_or(f64::NEG_INFINITY).max(brute[i].unwrap_or(f64::NEG_INFINITY))
        })
        .collect();
    for r in &runs {
        best_known[r.instance] = best_known[r.instance].max(r.best_value);
    }

    let mut rows: Vec<MaxcutRow> = Vec::with_capacity(runs.len());
    let mut records: Vec<TrajectoryRecord> = Vec::new();
    let mut timings: Vec<SuiteTiming> = Vec::with_capacity(runs.len());
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by_key(|&k| (&instances[runs[k].instance].0, runs[k].agent.label()));
    for k in order {
        let r = &runs[k];
        let name = &instances[r.instance].0;
        let known = best_known[r.instance];
        rows.push(MaxcutRow {
            instance: name.clone(),
            agent: r.agent.label().to_string(),
            episodes: cfg.protocol.episodes,
            horizon_mult: cfg.protocol.horizon_mult,
            best_value: r.best_value,
            best_known: known,
            ratio: safe_ratio(r.best_value, known),
            beats_reference: cfg
                .reference
                .get(name)
                .is_some_and(|&refv| r.best_value > refv),
        });
        for (ep, steps) in r.episodes.iter().enumerate() {
            records.push(TrajectoryRecord {
                instance: name.clone(),
                agent: r.agent.label().to_string(),
                episode: ep as u32,
                steps: steps.clone(),
            });
        }
        timings.push(SuiteTiming {
            instance: name.clone(),
            agent: r.agent.label().to_string(),
            seconds: r.seconds,
        });
    }
    let report = MaxcutReport { seed: cfg.seed, rows };
    Ok((report, records, timings))
}

#[derive(Debug, Clone)]
pub struct SatSuiteConfig {
    pub agents: Vec<SatAgentKind>,
    pub trials: u32,
    pub max_steps: u64,
    pub walksat_p: f64,
    pub freebie: bool,
    pub model: Option<LinearQ>,
    pub features: FeatureSpec,
    pub seed: u64,
}

impl SatSuiteConfig {
    pub fn new(seed: u64) -> SatSuiteConfig {
        SatSuiteConfig {
            agents: vec![SatAgentKind::Walksat],
            trials: 25,
            max_steps: 5000,
            walksat_p: 0.5,
            freebie: true,
            model: None,
            features: FeatureSpec::default(),
            seed,
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

pub(crate) fn summarize_sat(
    agent: &str,
    per_instance: &[Vec<TrialOutcome>],
    trials: u32,
    max_steps: u64,
) -> SatSummaryRow {
    let all_steps: Vec<f64> = per_instance
        .iter()
        .flat_map(|ts| ts.iter().map(|t| t.steps as f64))
        .collect();
    let mean_steps = all_steps.iter().sum::<f64>() / all_steps.len() as f64;
    let mut medians: Vec<f64> = per_instance
        .iter()
        .map(|ts| {
            let mut steps: Vec<f64> = ts.iter().map(|t| t.steps as f64).collect();
            median(&mut steps)
        })
        .collect();
    let solved = medians.iter().filter(|&&m| m < max_steps as f64).count();
    SatSummaryRow {
        agent: agent.to_string(),
        instances: per_instance.len() as u32,
        trials_per_instance: trials,
        mean_steps,
        median_of_medians: median(&mut medians),
        percent_solved: 100.0 * solved as f64 / per_instance.len() as f64,
    }
}

pub fn run_sat_suite(
    instances: &[(String, CnfFormula)],
    cfg: &SatSuiteConfig,
) -> Result<(SatReport, Vec<SuiteTiming>), BenchError> {
    if instances.is_empty() {
        return Err(BenchError::Invalid("no instances given".into()));
    }
    if cfg.trials == 0 {
        return Err(BenchError::Invalid("trials must be at least 1".into()));
    }
    if cfg.max_steps == 0 {
        return Err(BenchError::Invalid("max_steps must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.walksat_p) {
        return Err(BenchError::Invalid(format!(
            "walk probability {} outside [0, 1]",
            cfg.walksat_p
        )));
    }
    let agents = sorted_agent_list(&cfg.agents);
    if agents.is_empty() {
        return Err(BenchError::Invalid("no agents enabled".into()));
    }
    let model = if agents.contains(&SatAgentKind::SoftTabu) {
        let q = cfg
            .model
            .as_ref()
            .ok_or_else(|| BenchError::Invalid("softtabu agent needs a model".into()))?;
        if q.n_features() != crate::softtabu::N_FEATURES {
            return Err(BenchError::Invalid(format!(
                "model has {} features, expected {}",
                q.n_features(),
                crate::softtabu::N_FEATURES
            )));
        }
        Some(q)
    } else {
        None
    };

    let pairs: Vec<(usize, SatAgentKind)> = (0..instances.len())
        .flat_map(|i| agents.iter().map(move |&a| (i, a)))
        .collect();
    let runs: Vec<(usize, SatAgentKind, Vec<TrialOutcome>, f64)> = pairs
        .par_iter()
        .map(|&(i, agent)| {
            let (name, f) = &instances[i];
            let t0 = Instant::now();
            let stream = format!("sat/{}/{}", agent.label(), name);
            let outcomes = match agent {
                SatAgentKind::Walksat => {
                    let wc = WalksatConfig {
                        p: cfg.walksat_p,
                        max_steps: cfg.max_steps,
                        freebie: cfg.freebie,
                    };
                    (0..cfg.trials)
                        .map(|t| walksat(f, &wc, seeds::derive(cfg.seed, &stream, u64::from(t))))
                        .collect()
                }
                SatAgentKind::SoftTabu => softtabu_sat_solve(
                    model.unwrap(),
                    f,
                    cfg.trials,
                    cfg.max_steps,
                    &cfg.features,
                    seeds::derive(cfg.seed, &stream, 0),
                ),
            };
            (i, agent, outcomes, t0.elapsed().as_secs_f64())
        })
        .collect();

    let mut trials_rows: Vec<SatTrialRow> = Vec::new();
    let mut timings: Vec<SuiteTiming> = Vec::new();
    let mut order: Vec<usize> = (0..runs.len()).collect();
    order.sort_by_key(|&k| (&instances[runs[k].0].0, runs[k].1.label()));
    for &k in &order {
        let (i, agent, ref outcomes, seconds) = runs[k];
        let name = &instances[i].0;
        for (t, o) in outcomes.iter().enumerate() {
            trials_rows.push(SatTrialRow {
                instance: name.clone(),
                agent: agent.label().to_string(),
                trial: t as u32,
                solved: o.solved,
                steps: o.steps,
            });
        }
        timings.push(SuiteTiming {
            instance: name.clone(),
            agent: agent.label().to_string(),
            seconds,
        });
    }
    let summary: Vec<SatSummaryRow> = agents
        .iter()
        .map(|&a| {
            let per_instance: Vec<Vec<TrialOutcome>> = runs
                .iter()
                .filter(|r| r.1 == a)
                .map(|r| r.2.clone())
                .collect();
            summarize_sat(a.label(), &per_instance, cfg.trials, cfg.max_steps)
        })
        .collect();
    let mut summary = summary;
    summary.sort_by(|a, b| a.agent.cmp(&b.agent));
    let report = SatReport {
        seed: cfg.seed,
        max_steps: cfg.max_steps,
        trials: trials_rows,
        summary,
    };
    Ok((report, timings))
}
