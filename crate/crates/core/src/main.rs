//! lslab command line: generate instances, train the linear policy, run
//! benchmark suites, and post-process trajectory logs.
//!
//! Every subcommand takes `--seed`, `--config <file>` and `--out <dir>`;
//! the remaining parameters come from the flat key = value config file.
//! Data files (reports, instances, models) are written deterministically;
//! anything timing-related goes to stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use lslab::bench::stats::{
    flip_distribution, group_records, intra_episode_stats, trajectories_from_csv,
    trajectories_to_csv,
};
use lslab::bench::{
    run_maxcut_suite, run_sat_suite, AgentKind, BenchError, MaxcutSuiteConfig, SatAgentKind,
    SatSuiteConfig, SuiteTiming,
};
use lslab::config::{Config, ConfigError};
use lslab::graphs::{GenSpec, Graph, GraphFamily, WeightScheme};
use lslab::qlearn::{load_model, save_model, LinearQ, TrainConfig};
use lslab::sat::{gen_filtered, CnfDist, CnfError, CnfFormula};
use lslab::satsearch::train_sat;
use lslab::softtabu::{train, FeatureSpec, GainScale, TimeScale};
use lslab::{seeds, TieBreak, TrajectoryStep};

#[derive(Parser)]
#[command(name = "lslab", version, about = "Local-search lab for Max-Cut and SAT")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate Max-Cut instances as edge-list files.
    GenGraphs(RunArgs),
    /// Generate CNF instances as DIMACS files.
    GenCnf(RunArgs),
    /// Train the two-feature policy on Max-Cut episodes.
    TrainMaxcut(RunArgs),
    /// Train the two-feature policy on SAT episodes.
    TrainSat(RunArgs),
    /// Run Max-Cut agents over an instance directory.
    BenchMaxcut(RunArgs),
    /// Run SAT agents over an instance directory.
    BenchSat(RunArgs),
    /// Summarize a trajectory log into curve and distribution tables.
    Stats(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration file (flat key = value lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config file's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match &cli.cmd {
        Cmd::GenGraphs(a) => cmd_gen_graphs(a),
        Cmd::GenCnf(a) => cmd_gen_cnf(a),
        Cmd::TrainMaxcut(a) => cmd_train_maxcut(a),
        Cmd::TrainSat(a) => cmd_train_sat(a),
        Cmd::BenchMaxcut(a) => cmd_bench_maxcut(a),
        Cmd::BenchSat(a) => cmd_bench_sat(a),
        Cmd::Stats(a) => cmd_stats(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

struct Run {
    cfg: Config,
    out: PathBuf,
    seed: u64,
}

fn prepare(args: &RunArgs) -> Result<Run, CliError> {
    let cfg = match &args.config {
        Some(p) => Config::load(p)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?,
        None => Config::default(),
    };
    let seed = match args.seed {
        Some(s) => s,
        None => cfg.get_u64("seed")?.unwrap_or(0),
    };
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Internal(format!("create {}: {e}", args.out.display())))?;
    Ok(Run { cfg, out: args.out.clone(), seed })
}

fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("config key '{key}' is required")))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn print_timings(timings: &[SuiteTiming], total: f64) {
    for t in timings {
        eprintln!("# {:.3}s  {} on {}", t.seconds, t.agent, t.instance);
    }
    eprintln!("# {total:.3}s total");
}

const FEATURE_KEYS: &[&str] = &["gain_scale", "time_scale", "never_flipped_value"];

fn feature_spec_from(cfg: &Config) -> Result<FeatureSpec, CliError> {
    let mut spec = FeatureSpec::default();
    if let Some(v) = cfg.get("gain_scale") {
        spec.gain_scale = GainScale::parse(v)
            .ok_or_else(|| CliError::Usage(format!("unknown gain_scale '{v}'")))?;
    }
    if let Some(v) = cfg.get("time_scale") {
        spec.time_scale = TimeScale::parse(v)
            .ok_or_else(|| CliError::Usage(format!("unknown time_scale '{v}'")))?;
    }
    if let Some(v) = cfg.get_f64("never_flipped_value")? {
        spec.never_flipped_value = v;
    }
    Ok(spec)
}

const TRAIN_KEYS: &[&str] = &[
    "episodes",
    "horizon_mult",
    "discount",
    "learning_rate",
    "epsilon_start",
    "epsilon_end",
    "epsilon_decay_steps",
    "replay_capacity",
    "batch_size",
    "target_sync_interval",
];

fn train_config_from(cfg: &Config, seed: u64) -> Result<TrainConfig, CliError> {
    let mut t = TrainConfig::default();
    if let Some(v) = cfg.get_u64("episodes")? {
        t.episodes = v;
    }
    if let Some(v) = cfg.get_u32("horizon_mult")? {
        t.horizon_mult = v;
    }
    if let Some(v) = cfg.get_f64("discount")? {
        t.discount = v;
    }
    if let Some(v) = cfg.get_f64("learning_rate")? {
        t.learning_rate = v;
    }
    if let Some(v) = cfg.get_f64("epsilon_start")? {
        t.epsilon_start = v;
    }
    if let Some(v) = cfg.get_f64("epsilon_end")? {
        t.epsilon_end = v;
    }
    if let Some(v) = cfg.get_u64("epsilon_decay_steps")? {
        t.epsilon_decay_steps = v;
    }
    if let Some(v) = cfg.get_usize("replay_capacity")? {
        t.replay_capacity = v;
    }
    if let Some(v) = cfg.get_usize("batch_size")? {
        t.batch_size = v;
    }
    if let Some(v) = cfg.get_u64("target_sync_interval")? {
        t.target_sync_interval = v;
    }
    t.seed = seed;
    Ok(t)
}

fn graph_spec_from(cfg: &Config, seed: u64) -> Result<GenSpec, CliError> {
    let family_s = cfg.require("family")?;
    let family = GraphFamily::parse(family_s)
        .ok_or_else(|| CliError::Usage(format!("unknown family '{family_s}'")))?;
    let n = require(cfg.get_usize("n")?, "n")?;
    let param = require(cfg.get_f64("param")?, "param")?;
    let weights = match cfg.get("weights") {
        None => WeightScheme::Unit,
        Some(v) => WeightScheme::parse(v)
            .ok_or_else(|| CliError::Usage(format!("unknown weights '{v}'")))?,
    };
    let spec = GenSpec { family, n, param, weights, seed };
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(spec)
}

fn cmd_gen_graphs(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    run.cfg
        .check_known(&["seed", "family", "n", "param", "weights", "count", "prefix"])?;
    let base = graph_spec_from(&run.cfg, 0)?;
    let count = run.cfg.get_u64("count")?.unwrap_or(1);
    let default_prefix = format!("{}{}", base.family.label(), base.n);
    let prefix = run.cfg.get("prefix").unwrap_or(&default_prefix).to_string();
    for i in 0..count {
        let spec = GenSpec { seed: seeds::derive(run.seed, "gen-graphs", i), ..base.clone() };
        let g = Graph::generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
        let path = run.out.join(format!("{prefix}-{i:03}.txt"));
        g.save_gset(&path)
            .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_gen_cnf(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    run.cfg.check_known(&["seed", "dist", "count", "filtered", "prefix"])?;
    let dist_s = run.cfg.require("dist")?;
    let dist = CnfDist::parse(dist_s).map_err(|e| CliError::Usage(e.to_string()))?;
    let count = run.cfg.get_usize("count")?.unwrap_or(1);
    let filtered = run.cfg.get_bool("filtered")?.unwrap_or(true);
    let default_prefix = dist.label().replace(':', "-");
    let prefix = run.cfg.get("prefix").unwrap_or(&default_prefix).to_string();
    let formulas: Vec<CnfFormula> = if filtered {
        gen_filtered(&dist, count, run.seed).map_err(|e| match e {
            CnfError::RejectionBudget { .. } => CliError::Data(e.to_string()),
            other => CliError::Usage(other.to_string()),
        })?
    } else {
        (0..count)
            .map(|i| dist.generate(seeds::derive(run.seed, "gen-cnf", i as u64)))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(e.to_string()))?
    };
    for (i, f) in formulas.iter().enumerate() {
        let path = run.out.join(format!("{prefix}-{i:03}.cnf"));
        f.save_dimacs(&path)
            .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_train_maxcut(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let mut allowed = vec!["seed", "family", "n", "param", "weights", "model_out"];
    allowed.extend_from_slice(TRAIN_KEYS);
    allowed.extend_from_slice(FEATURE_KEYS);
    run.cfg.check_known(&allowed)?;
    let dist = graph_spec_from(&run.cfg, 0)?;
    let tc = train_config_from(&run.cfg, run.seed)?;
    let fs_spec = feature_spec_from(&run.cfg)?;
    let t0 = Instant::now();
    let q = train(&dist, &tc, &fs_spec).map_err(|e| CliError::Internal(e.to_string()))?;
    eprintln!("# trained {} episodes in {:.3}s", tc.episodes, t0.elapsed().as_secs_f64());
    let path = run.out.join(run.cfg.get("model_out").unwrap_or("model.txt"));
    save_model(&q, &path)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_train_sat(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let mut allowed = vec!["seed", "dist", "filtered", "model_out"];
    allowed.extend_from_slice(TRAIN_KEYS);
    allowed.extend_from_slice(FEATURE_KEYS);
    run.cfg.check_known(&allowed)?;
    let dist_s = run.cfg.require("dist")?;
    let dist = CnfDist::parse(dist_s).map_err(|e| CliError::Usage(e.to_string()))?;
    let filtered = run.cfg.get_bool("filtered")?.unwrap_or(true);
    let tc = train_config_from(&run.cfg, run.seed)?;
    let fs_spec = feature_spec_from(&run.cfg)?;
    let t0 = Instant::now();
    let q = train_sat(&dist, filtered, &tc, &fs_spec).map_err(|e| match e {
        lslab::satsearch::SatEnvError::Cnf(c) => CliError::Data(c.to_string()),
        lslab::satsearch::SatEnvError::Train(t) => CliError::Internal(t.to_string()),
    })?;
    eprintln!("# trained {} episodes in {:.3}s", tc.episodes, t0.elapsed().as_secs_f64());
    let path = run.out.join(run.cfg.get("model_out").unwrap_or("model.txt"));
    save_model(&q, &path)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn instance_files(dir: &str, ext: &str) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("instance directory {dir}: {e}")))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().and_then(|x| x.to_str()) == Some(ext))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Data(format!("no .{ext} instances in {dir}")));
    }
    Ok(files)
}

fn stem_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn model_from(cfg: &Config, needed: bool) -> Result<Option<LinearQ>, CliError> {
    match cfg.get("model") {
        Some(p) => {
            let q = load_model(Path::new(p))
                .map_err(|e| CliError::Data(format!("model {p}: {e}")))?;
            Ok(Some(q))
        }
        None if needed => Err(CliError::Usage(
            "config key 'model' is required when the softtabu agent is enabled".into(),
        )),
        None => Ok(None),
    }
}

fn reference_from(cfg: &Config) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    let Some(path) = cfg.get("best_known") else {
        return Ok(map);
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("best_known {path}: {e}")))?;
    for (i, raw) in text.lines().enumerate() {
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut parts = t.split_whitespace();
        let (Some(name), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CliError::Data(format!(
                "best_known {path} line {}: expected 'name value'",
                i + 1
            )));
        };
        let value: f64 = value.parse().map_err(|_| {
            CliError::Data(format!("best_known {path} line {}: bad value '{value}'", i + 1))
        })?;
        map.insert(name.to_string(), value);
    }
    Ok(map)
}

fn parse_agent_list<T: Copy>(
    cfg: &Config,
    default: &str,
    parse: fn(&str) -> Option<T>,
) -> Result<Vec<T>, CliError> {
    let list = cfg.get("agents").unwrap_or(default);
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(s).ok_or_else(|| CliError::Usage(format!("unknown agent '{s}'"))))
        .collect()
}

fn map_bench_err(e: BenchError) -> CliError {
    match e {
        BenchError::Invalid(m) => CliError::Usage(m),
        other => CliError::Internal(other.to_string()),
    }
}

fn cmd_bench_maxcut(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let mut allowed = vec![
        "seed",
        "instances",
        "agents",
        "episodes",
        "horizon_mult",
        "tenure",
        "aspiration",
        "tie_break",
        "model",
        "best_known",
        "trajectories",
    ];
    allowed.extend_from_slice(FEATURE_KEYS);
    run.cfg.check_known(&allowed)?;

    let agents = parse_agent_list(&run.cfg, "mca,tabu", AgentKind::parse)?;
    let mut cfg = MaxcutSuiteConfig::new(run.seed);
    cfg.agents = agents;
    if let Some(v) = run.cfg.get_u32("episodes")? {
        cfg.protocol.episodes = v;
    }
    if let Some(v) = run.cfg.get_u32("horizon_mult")? {
        cfg.protocol.horizon_mult = v;
    }
    if let Some(v) = run.cfg.get_u64("tenure")? {
        cfg.tenure = v;
    }
    if let Some(v) = run.cfg.get_bool("aspiration")? {
        cfg.aspiration = v;
    }
    if let Some(v) = run.cfg.get("tie_break") {
        cfg.tie_break = TieBreak::parse(v)
            .ok_or_else(|| CliError::Usage(format!("unknown tie_break '{v}'")))?;
    }
    cfg.features = feature_spec_from(&run.cfg)?;
    cfg.model = model_from(&run.cfg, cfg.agents.contains(&AgentKind::SoftTabu))?;
    cfg.reference = reference_from(&run.cfg)?;
    cfg.collect_trajectories = run.cfg.get_bool("trajectories")?.unwrap_or(false);

    let dir = run.cfg.require("instances")?;
    let mut instances = Vec::new();
    for path in instance_files(dir, "txt")? {
        let g = Graph::load_gset(&path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        instances.push((stem_of(&path), g));
    }

    let t0 = Instant::now();
    let (report, records, timings) =
        run_maxcut_suite(&instances, &cfg).map_err(map_bench_err)?;
    print_timings(&timings, t0.elapsed().as_secs_f64());

    write_file(&run.out.join("report.csv"), &report.to_csv())?;
    write_file(&run.out.join("report.json"), &report.to_json())?;
    write_file(&run.out.join("summary.csv"), &report.pivot_csv())?;
    if cfg.collect_trajectories {
        write_file(&run.out.join("trajectories.csv"), &trajectories_to_csv(&records))?;
    }
    Ok(())
}

fn cmd_bench_sat(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    let mut allowed = vec![
        "seed",
        "instances",
        "agents",
        "trials",
        "max_steps",
        "p",
        "freebie",
        "model",
    ];
    allowed.extend_from_slice(FEATURE_KEYS);
    run.cfg.check_known(&allowed)?;

    let agents = parse_agent_list(&run.cfg, "walksat", SatAgentKind::parse)?;
    let mut cfg = SatSuiteConfig::new(run.seed);
    cfg.agents = agents;
    if let Some(v) = run.cfg.get_u32("trials")? {
        cfg.trials = v;
    }
    if let Some(v) = run.cfg.get_u64("max_steps")? {
        cfg.max_steps = v;
    }
    if let Some(v) = run.cfg.get_f64("p")? {
        cfg.walksat_p = v;
    }
    if let Some(v) = run.cfg.get_bool("freebie")? {
        cfg.freebie = v;
    }
    cfg.features = feature_spec_from(&run.cfg)?;
    cfg.model = model_from(&run.cfg, cfg.agents.contains(&SatAgentKind::SoftTabu))?;

    let dir = run.cfg.require("instances")?;
    let mut instances = Vec::new();
    for path in instance_files(dir, "cnf")? {
        let f = CnfFormula::load_dimacs(&path)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        instances.push((stem_of(&path), f));
    }

    let t0 = Instant::now();
    let (report, timings) = run_sat_suite(&instances, &cfg).map_err(map_bench_err)?;
    print_timings(&timings, t0.elapsed().as_secs_f64());

    write_file(&run.out.join("trials.csv"), &report.trials_csv())?;
    write_file(&run.out.join("summary.csv"), &report.summary_csv())?;
    write_file(&run.out.join("report.json"), &report.to_json())?;
    Ok(())
}

fn cmd_stats(args: &RunArgs) -> Result<(), CliError> {
    let run = prepare(args)?;
    run.cfg.check_known(&["seed", "input", "top_k"])?;
    let input = run.cfg.require("input")?;
    let top_k = run.cfg.get_usize("top_k")?.unwrap_or(25);
    let text = fs::read_to_string(input)
        .map_err(|e| CliError::Data(format!("input {input}: {e}")))?;
    let records = trajectories_from_csv(&text)
        .map_err(|e| CliError::Data(format!("input {input}: {e}")))?;
    let groups = group_records(&records);

    let mut intra = String::from("instance,agent,step,frac_greedy_max,frac_gain_positive\n");
    let mut flips = String::from("instance,agent,vertex,count\n");
    for ((instance, agent), episodes) in &groups {
        let curve =
            intra_episode_stats(episodes).map_err(|e| CliError::Data(e.to_string()))?;
        for s in curve {
            intra.push_str(&format!(
                "{instance},{agent},{},{},{}\n",
                s.step,
                lslab::fmt_num(s.frac_greedy_max),
                lslab::fmt_num(s.frac_gain_positive)
            ));
        }
        let all_steps: Vec<TrajectoryStep> =
            episodes.iter().flat_map(|e| e.iter().cloned()).collect();
        for (vertex, count) in flip_distribution(&all_steps, top_k) {
            flips.push_str(&format!("{instance},{agent},{vertex},{count}\n"));
        }
    }
    write_file(&run.out.join("intra_episode.csv"), &intra)?;
    write_file(&run.out.join("flip_distribution.csv"), &flips)?;
    Ok(())
}
