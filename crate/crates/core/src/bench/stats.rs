//! Behavioral statistics over recorded trajectories: per-step greedy
//! fractions and per-vertex flip counts, plus the trajectory CSV format.

use std::collections::BTreeMap;

use super::BenchError;
use crate::util::fmt_num;
use crate::TrajectoryStep;

/// All steps of one episode, tagged with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub instance: String,
    pub agent: String,
    pub episode: u32,
    pub steps: Vec<TrajectoryStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntraStep {
    pub step: u64,
    /// Fraction of episodes whose chosen action had the maximum gain at
    /// this step; ties count as greedy.
    pub frac_greedy_max: f64,
    pub frac_gain_positive: f64,
}

/// Per-step aggregates across episodes, aligned on the shortest episode.
pub fn intra_episode_stats(episodes: &[&[TrajectoryStep]]) -> Result<Vec<IntraStep>, BenchError> {
    if episodes.is_empty() {
        return Err(BenchError::Invalid("no trajectories given".into()));
    }
    let len = episodes.iter().map(|e| e.len()).min().unwrap();
    let total = episodes.len() as f64;
    Ok((0..len)
        .map(|t| {
            let greedy = episodes.iter().filter(|e| e[t].greedy_max).count();
            let positive = episodes.iter().filter(|e| e[t].gain > 0.0).count();
            IntraStep {
                step: t as u64,
                frac_greedy_max: greedy as f64 / total,
                frac_gain_positive: positive as f64 / total,
            }
        })
        .collect())
}

/// Flip counts per vertex, most-flipped first (ties by vertex id), truncated
/// to `top_k`. Counts over the full, untruncated list sum to the episode
/// length.
pub fn flip_distribution(traj: &[TrajectoryStep], top_k: usize) -> Vec<(u32, u64)> {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for s in traj {
        *counts.entry(s.action).or_insert(0) += 1;
    }
    let mut out: Vec<(u32, u64)> = counts.into_iter().collect();
    out.sort_by_key(|&(v, c)| (std::cmp::Reverse(c), v));
    out.truncate(top_k);
    out
}

pub const TRAJECTORY_HEADER: &str =
    "instance,agent,episode,step,chosen_vertex,gain_of_chosen,objective,is_greedy";

pub fn trajectories_to_csv(records: &[TrajectoryRecord]) -> String {
    let mut out = String::from(TRAJECTORY_HEADER);
    out.push('\n');
    for r in records {
        for s in &r.steps {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.instance,
                r.agent,
                r.episode,
                s.step,
                s.action,
                fmt_num(s.gain),
                fmt_num(s.objective),
                s.greedy_max
            ));
        }
    }
    out
}

pub fn trajectories_from_csv(text: &str) -> Result<Vec<TrajectoryRecord>, BenchError> {
    let err = |line: usize, msg: String| BenchError::Parse { line, msg };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRAJECTORY_HEADER => {}
        other => {
            return Err(err(
                1,
                format!("expected header '{TRAJECTORY_HEADER}', got {other:?}"),
            ))
        }
    }
    let mut records: Vec<TrajectoryRecord> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(err(lineno, format!("expected 8 fields, got {}", f.len())));
        }
        let episode: u32 = f[2]
            .parse()
            .map_err(|_| err(lineno, format!("bad episode '{}'", f[2])))?;
        let step = TrajectoryStep {
            step: f[3]
                .parse()
                .map_err(|_| err(lineno, format!("bad step '{}'", f[3])))?,
            action: f[4]
                .parse()
                .map_err(|_| err(lineno, format!("bad vertex '{}'", f[4])))?,
            gain: f[5]
                .parse()
                .map_err(|_| err(lineno, format!("bad gain '{}'", f[5])))?,
            objective: f[6]
                .parse()
                .map_err(|_| err(lineno, format!("bad objective '{}'", f[6])))?,
            greedy_max: match f[7] {
                "true" => true,
                "false" => false,
                other => return Err(err(lineno, format!("bad is_greedy '{other}'"))),
            },
        };
        let same_record = records.last().map(|r: &TrajectoryRecord| {
            r.instance == f[0] && r.agent == f[1] && r.episode == episode
        });
        if same_record == Some(true) {
            records.last_mut().unwrap().steps.push(step);
        } else {
            records.push(TrajectoryRecord {
                instance: f[0].to_string(),
                agent: f[1].to_string(),
                episode,
                steps: vec![step],
            });
        }
    }
    Ok(records)
}

/// Groups episodes by (instance, agent) in sorted key order.
pub fn group_records(
    records: &[TrajectoryRecord],
) -> BTreeMap<(&str, &str), Vec<&[TrajectoryStep]>> {
    let mut map: BTreeMap<(&str, &str), Vec<&[TrajectoryStep]>> = BTreeMap::new();
    for r in records {
        map.entry((r.instance.as_str(), r.agent.as_str()))
            .or_default()
            .push(&r.steps);
    }
    map
}
