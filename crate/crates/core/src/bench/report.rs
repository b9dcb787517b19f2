//! Report types and their CSV/JSON renderings. Emission is deterministic:
//! field order is fixed and floats print in shortest round-trip form, so a
//! rerun with the same seed produces byte-identical files.

use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::util::fmt_num;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxcutRow {
    pub instance: String,
    pub agent: String,
    pub episodes: u32,
    pub horizon_mult: u32,
    pub best_value: f64,
    /// Max of the supplied reference, exact enumeration when feasible, and
    /// the best value any agent found in this suite.
    pub best_known: f64,
    pub ratio: f64,
    /// True when this run beat the supplied reference value.
    pub beats_reference: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxcutReport {
    pub seed: u64,
    pub rows: Vec<MaxcutRow>,
}

impl MaxcutReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "instance,agent,episodes,horizon_mult,best_value,best_known,ratio,beats_reference\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.instance,
                r.agent,
                r.episodes,
                r.horizon_mult,
                fmt_num(r.best_value),
                fmt_num(r.best_known),
                fmt_num(r.ratio),
                r.beats_reference
            ));
        }
        out
    }

    /// Aggregate view: one row per instance, one ratio column per agent.
    pub fn pivot_csv(&self) -> String {
        let mut agents: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !agents.contains(&r.agent.as_str()) {
                agents.push(&r.agent);
            }
        }
        agents.sort_unstable();
        let mut instances: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !instances.contains(&r.instance.as_str()) {
                instances.push(&r.instance);
            }
        }
        let mut out = String::from("instance");
        for a in &agents {
            out.push(',');
            out.push_str(a);
        }
        out.push('\n');
        for inst in instances {
            out.push_str(inst);
            for a in &agents {
                out.push(',');
                if let Some(r) = self
                    .rows
                    .iter()
                    .find(|r| r.instance == inst && r.agent == *a)
                {
                    out.push_str(&fmt_num(r.ratio));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<MaxcutReport, BenchError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatTrialRow {
    pub instance: String,
    pub agent: String,
    pub trial: u32,
    pub solved: bool,
    pub steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatSummaryRow {
    pub agent: String,
    pub instances: u32,
    pub trials_per_instance: u32,
    /// Mean steps over all trials, capped trials included.
    pub mean_steps: f64,
    /// Median over instances of the per-instance median trial steps.
    pub median_of_medians: f64,
    /// Percentage of instances whose median steps beat the cutoff.
    pub percent_solved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatReport {
    pub seed: u64,
    pub max_steps: u64,
    pub trials: Vec<SatTrialRow>,
    pub summary: Vec<SatSummaryRow>,
}

impl SatReport {
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("instance,agent,trial,solved,steps\n");
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                t.instance, t.agent, t.trial, t.solved, t.steps
            ));
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from(
            "agent,instances,trials_per_instance,mean_steps,median_of_medians,percent_solved\n",
        );
        for s in &self.summary {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.agent,
                s.instances,
                s.trials_per_instance,
                fmt_num(s.mean_steps),
                fmt_num(s.median_of_medians),
                fmt_num(s.percent_solved)
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<SatReport, BenchError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_maxcut() -> MaxcutReport {
        MaxcutReport {
            seed: 7,
            rows: vec![
                MaxcutRow {
                    instance: "er20-0".into(),
                    agent: "mca".into(),
                    episodes: 50,
                    horizon_mult: 2,
                    best_value: 41.0,
                    best_known: 43.0,
                    ratio: 41.0 / 43.0,
                    beats_reference: false,
                },
                MaxcutRow {
                    instance: "er20-0".into(),
                    agent: "tabu".into(),
                    episodes: 50,
                    horizon_mult: 2,
                    best_value: 43.0,
                    best_known: 43.0,
                    ratio: 1.0,
                    beats_reference: true,
                },
            ],
        }
    }

    #[test]
    fn maxcut_csv_layout() {
        let csv = sample_maxcut().to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "instance,agent,episodes,horizon_mult,best_value,best_known,ratio,beats_reference"
        );
        assert_eq!(
            lines.next().unwrap(),
            format!("er20-0,mca,50,2,41,43,{},false", 41.0 / 43.0)
        );
        assert_eq!(lines.next().unwrap(), "er20-0,tabu,50,2,43,43,1,true");
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn maxcut_pivot_layout() {
        let csv = sample_maxcut().pivot_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "instance,mca,tabu");
        assert_eq!(
            lines.next().unwrap(),
            format!("er20-0,{},1", 41.0 / 43.0)
        );
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn empty_reports_are_header_only() {
        let r = MaxcutReport { seed: 0, rows: vec![] };
        assert_eq!(r.to_csv().lines().count(), 1);
        assert_eq!(r.pivot_csv(), "instance\n");
        let s = SatReport { seed: 0, max_steps: 100, trials: vec![], summary: vec![] };
        assert_eq!(s.trials_csv().lines().count(), 1);
        assert_eq!(s.summary_csv().lines().count(), 1);
    }

    #[test]
    fn maxcut_json_round_trip_is_byte_identical() {
        let r = sample_maxcut();
        let json = r.to_json();
        let back = MaxcutReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert_eq!(back.to_csv(), r.to_csv());
    }

    fn sample_sat() -> SatReport {
        SatReport {
            seed: 3,
            max_steps: 5000,
            trials: vec![
                SatTrialRow { instance: "i0".into(), agent: "walksat".into(), trial: 0, solved: true, steps: 12 },
                SatTrialRow { instance: "i0".into(), agent: "walksat".into(), trial: 1, solved: false, steps: 5000 },
            ],
            summary: vec![SatSummaryRow {
                agent: "walksat".into(),
                instances: 1,
                trials_per_instance: 2,
                mean_steps: 2506.0,
                median_of_medians: 2506.0,
                percent_solved: 100.0,
            }],
        }
    }

    #[test]
    fn sat_csv_layout() {
        let r = sample_sat();
        let trials = r.trials_csv();
        assert!(trials.starts_with("instance,agent,trial,solved,steps\n"));
        assert!(trials.contains("i0,walksat,0,true,12\n"));
        assert!(trials.contains("i0,walksat,1,false,5000\n"));
        let summary = r.summary_csv();
        assert!(summary.contains("walksat,1,2,2506,2506,100\n"));
    }

    #[test]
    fn sat_json_round_trip_is_byte_identical() {
        let r = sample_sat();
        let json = r.to_json();
        let back = SatReport::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), json);
        assert_eq!(back.trials_csv(), r.trials_csv());
        assert_eq!(back.summary_csv(), r.summary_csv());
    }

    #[test]
    fn from_json_rejects_junk() {
        assert!(MaxcutReport::from_json("{").is_err());
        assert!(SatReport::from_json("[]").is_err());
    }
}
