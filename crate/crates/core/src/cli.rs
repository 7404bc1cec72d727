//! The `ooscam` command line.
//!
//! Exit codes: 0 on success, 2 for usage, configuration or input errors,
//! 3 when a numerical solver fails.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::astro::{CentralBody, Epoch, KeplerOrbit};
use crate::environment::{
    read_table, run_episode, table_to_json, ActionTable, EpisodeConfig, EpisodeOutcome,
};
use crate::output::{csv_comments, json_provenance, write_file, write_json, BUILD_ID};
use crate::scenario::{
    case_study_conjunction_scenario, case_study_scenario, make_collision_scenario, random_scenario,
    read_scenario, scenario_to_json, ConjunctionSpec, Scenario,
};
use crate::training::{
    init_lambert, init_random, train, CeConfig, InitBounds, InitMode, TrainingLog, LOG_COLUMNS,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

/// Environment variable capping the worker threads used for training.
pub const THREADS_VAR: &str = "OOSCAM_THREADS";

/// Gap between the Lambert departure and arrival burns of the published
/// Lambert-initialized table, days.
pub const DEFAULT_LAMBERT_DT_DAYS: f64 = 0.0704;

#[derive(Parser, Debug)]
#[command(name = "ooscam", version = BUILD_ID, about = "On-orbit servicing collision avoidance planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a scenario file.
    GenScenario(GenArgs),
    /// Train an action table with the Cross-Entropy method.
    Train(TrainArgs),
    /// Fly one action table through a scenario and write its trace.
    Simulate(SimulateArgs),
    /// Merge several training logs into one comparison CSV.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    /// The published case study, verbatim.
    CaseStudy,
    /// The case study with a debris object that actually hits the target.
    CaseStudyConjunction,
    /// Random target and conjunction geometry from `--seed`.
    Random,
    /// The case-study target with an explicit conjunction geometry.
    Conjunction,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: ScenarioKind,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Window start for `random` (UTC `YYYY-MM-DDTHH:MM:SS` or mjd2000 days).
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub dt_tca_s: Option<f64>,
    #[arg(long)]
    pub approach_angle_deg: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub vel_ratio: f64,
    #[arg(long, default_value_t = 12.0)]
    pub phase_offset_deg: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Args, Debug, Clone, Default)]
pub struct EpisodeArgs {
    /// JSON file with a complete episode configuration; flags below override it.
    #[arg(long)]
    pub episode_config: Option<PathBuf>,
    #[arg(long)]
    pub fine_step_s: Option<f64>,
    #[arg(long)]
    pub coarse_step_s: Option<f64>,
    #[arg(long)]
    pub fine_window_s: Option<f64>,
    #[arg(long)]
    pub skip_step_s: Option<f64>,
    #[arg(long)]
    pub p_t: Option<f64>,
    #[arg(long)]
    pub fuel_threshold: Option<f64>,
    #[arg(long)]
    pub dock_pos_m: Option<f64>,
    #[arg(long)]
    pub dock_vel_mps: Option<f64>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    /// Scenario file, or `case-study` / `case-study-conjunction`.
    #[arg(long)]
    pub scenario: String,
    #[arg(long, value_enum)]
    pub init: InitArg,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub sessions: Option<usize>,
    #[arg(long)]
    pub sigma_decay: Option<f64>,
    #[arg(long)]
    pub learning_decay: Option<f64>,
    #[arg(long)]
    pub percentile_growth: Option<f64>,
    #[arg(long)]
    pub initial_percentile: Option<f64>,
    #[arg(long)]
    pub initial_lr: Option<f64>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub dv_bound_mps: Option<f64>,
    /// Bound on the random ΔV components of the starting table, m/s.
    #[arg(long, default_value_t = 2.0)]
    pub init_dv_max_mps: f64,
    /// Lambert departure epoch, mjd2000 (default: scenario start).
    #[arg(long)]
    pub lambert_t1: Option<f64>,
    /// Lambert time of flight, days.
    #[arg(long, default_value_t = DEFAULT_LAMBERT_DT_DAYS)]
    pub lambert_dt_days: f64,
    #[command(flatten)]
    pub episode: EpisodeArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Random,
    Lambert,
}

impl From<InitArg> for InitMode {
    fn from(a: InitArg) -> Self {
        match a {
            InitArg::Random => InitMode::Random,
            InitArg::Lambert => InitMode::Lambert,
        }
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: String,
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub episode: EpisodeArgs,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Training-log CSV files.
    #[arg(required = true)]
    pub logs: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match configure_threads().and_then(|()| dispatch(&cli.command)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_SOLVER
    } else {
        EXIT_CONFIG
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Error::InvalidInput(format!(
            "{THREADS_VAR} must be a positive integer, got {raw:?}"
        ))
    })?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<()> {
    match cmd {
        Command::GenScenario(a) => gen_scenario(a),
        Command::Train(a) => cmd_train(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Resolves `case-study`, `case-study-conjunction` or a scenario file path.
pub fn load_scenario(source: &str) -> Result<Scenario> {
    match source {
        "case-study" => Ok(case_study_scenario()),
        "case-study-conjunction" => case_study_conjunction_scenario(),
        path => read_scenario(Path::new(path)),
    }
}

fn parse_epoch(text: &str) -> Result<Epoch> {
    match text.trim().parse::<f64>() {
        Ok(days) => Epoch::from_mjd2000(days),
        Err(_) => Epoch::parse_utc(text),
    }
}

fn gen_scenario(a: &GenArgs) -> Result<()> {
    let missing = |flag: &str| Error::InvalidInput(format!("--kind {:?} needs --{flag}", a.kind));
    let scenario = match a.kind {
        ScenarioKind::CaseStudy => case_study_scenario(),
        ScenarioKind::CaseStudyConjunction => case_study_conjunction_scenario()?,
        ScenarioKind::Random => {
            let seed = a.seed.ok_or_else(|| missing("seed"))?;
            let start = match &a.start {
                Some(s) => parse_epoch(s)?,
                None => case_study_scenario().start,
            };
            random_scenario(seed, start, &CentralBody::EARTH)?
        }
        ScenarioKind::Conjunction => {
            let base = case_study_scenario();
            let spec = ConjunctionSpec {
                dt_tca: a.dt_tca_s.ok_or_else(|| missing("dt-tca-s"))?,
                approach_angle: a
                    .approach_angle_deg
                    .ok_or_else(|| missing("approach-angle-deg"))?
                    .to_radians(),
                vel_ratio: a.vel_ratio,
                phase_offset: a.phase_offset_deg.to_radians(),
            };
            make_collision_scenario(&base.target, &spec, base.start, &base.body)?
        }
    };
    let meta = serde_json::json!({ "build": BUILD_ID, "generated_by": format!("gen-scenario --kind {}", kind_name(a.kind)) });
    write_file(
        &a.output,
        scenario_to_json(&scenario, Some(meta)).as_bytes(),
    )?;
    println!(
        "wrote {} (window {} to {}, tca hint {})",
        a.output.display(),
        scenario.start,
        scenario.end,
        scenario.tca_hint
    );
    Ok(())
}

fn kind_name(k: ScenarioKind) -> String {
    k.to_possible_value()
        .map(|v| v.get_name().to_string())
        .unwrap_or_default()
}

fn resolve_episode(a: &EpisodeArgs) -> Result<EpisodeConfig> {
    let mut cfg = match &a.episode_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&text).map_err(|e| Error::Schema {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => EpisodeConfig::default(),
    };
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut cfg.grid.fine_step, a.fine_step_s);
    set(&mut cfg.grid.coarse_step, a.coarse_step_s);
    set(&mut cfg.grid.fine_window, a.fine_window_s);
    set(&mut cfg.grid.skip_step, a.skip_step_s);
    set(&mut cfg.thresholds.p_t, a.p_t);
    set(&mut cfg.thresholds.fuel, a.fuel_threshold);
    set(&mut cfg.thresholds.dock_pos, a.dock_pos_m);
    set(&mut cfg.thresholds.dock_vel, a.dock_vel_mps);
    cfg.validate()?;
    Ok(cfg)
}

/// Fully resolved configuration of a `train` run, embedded in every output.
#[derive(Clone, Debug, Serialize)]
pub struct TrainConfig {
    pub command: &'static str,
    pub scenario: String,
    pub init: InitMode,
    pub seed: u64,
    pub ce: CeConfig,
    pub init_bounds: InitBounds,
    /// Lambert departure and arrival epochs, mjd2000.
    pub lambert_window: Option<(Epoch, Epoch)>,
    pub episode: EpisodeConfig,
}

fn resolve_train(a: &TrainArgs, scenario: &Scenario) -> Result<TrainConfig> {
    let init: InitMode = a.init.into();
    let mut ce = CeConfig::for_init(init);
    let s = &mut ce.schedule;
    s.seed = a.seed;
    if let Some(v) = a.iterations {
        s.iterations = v;
    }
    if let Some(v) = a.sessions {
        s.sessions = v;
    }
    if let Some(v) = a.sigma_decay {
        s.sigma_decay = v;
    }
    if let Some(v) = a.learning_decay {
        s.learning_decay = v;
    }
    if let Some(v) = a.percentile_growth {
        s.percentile_growth = v;
    }
    if let Some(v) = a.initial_percentile {
        s.initial_percentile = v;
    }
    if let Some(v) = a.initial_lr {
        s.initial_lr = v;
    }
    if let Some(v) = a.patience {
        s.patience = v;
    }
    if let Some(v) = a.dv_bound_mps {
        ce.dv_bound_mps = v;
    }
    ce.validate()?;
    let init_bounds = InitBounds {
        dv_max: a.init_dv_max_mps,
    };
    init_bounds.validate()?;
    let lambert_window = match init {
        InitMode::Random => None,
        InitMode::Lambert => {
            let t1 = match a.lambert_t1 {
                Some(d) => Epoch::from_mjd2000(d)?,
                None => scenario.start,
            };
            if !(a.lambert_dt_days > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "--lambert-dt-days must be positive, got {}",
                    a.lambert_dt_days
                )));
            }
            Some((t1, t1.add_days(a.lambert_dt_days)))
        }
    };
    Ok(TrainConfig {
        command: "train",
        scenario: a.scenario.clone(),
        init,
        seed: a.seed,
        ce,
        init_bounds,
        lambert_window,
        episode: resolve_episode(&a.episode)?,
    })
}

/// Scalar results printed after `train` and `simulate`.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub reward: crate::environment::RewardBreakdown,
    pub final_pc: f64,
    pub fuel_used_units: f64,
    pub docked: bool,
    pub t_dock_mjd2000: Option<Epoch>,
    /// Time from the first burn to docking, target orbital periods.
    pub t_dock_periods: Option<f64>,
    pub docking_dv_mps: f64,
    pub cam_dv_mps: f64,
    pub deviation: crate::environment::Deviation,
    pub failure: Option<String>,
}

pub fn summarize(
    scenario: &Scenario,
    table: &ActionTable,
    out: &EpisodeOutcome,
) -> Result<RunSummary> {
    let period = target_period(scenario)?;
    let s = &out.summary;
    Ok(RunSummary {
        reward: s.breakdown,
        final_pc: s.metrics.pc,
        fuel_used_units: s.metrics.fuel_used,
        docked: s.docked,
        t_dock_mjd2000: s.t_dock,
        t_dock_periods: s.t_dock.map(|t| t.seconds_since(table.rows[0].t) / period),
        docking_dv_mps: table.docking_rows().iter().map(|m| m.magnitude()).sum(),
        cam_dv_mps: table.cam_rows().iter().map(|m| m.magnitude()).sum(),
        deviation: s.metrics.deviation,
        failure: out.trace.failure.clone(),
    })
}

fn target_period(scenario: &Scenario) -> Result<f64> {
    Ok(KeplerOrbit::from_elements(&scenario.target, &scenario.body)?.period())
}

fn print_summary(s: &RunSummary) {
    println!("total reward     {:.6}", s.reward.total);
    println!("final Pc         {:.6e}", s.final_pc);
    println!("fuel used        {:.6} units", s.fuel_used_units);
    match (s.t_dock_mjd2000, s.t_dock_periods) {
        (Some(t), Some(p)) => {
            println!("docked           at {t} ({p:.4} orbital periods after burn 1)")
        }
        _ => println!("docked           no"),
    }
    println!("docking dV       {:.6} m/s", s.docking_dv_mps);
    println!("CAM dV           {:.6} m/s", s.cam_dv_mps);
    let d = &s.deviation;
    println!(
        "deviation        a {:.3} m, e {:.3e}, i {:.3e} rad, raan {:.3e} rad, argp {:.3e} rad",
        d.a, d.e, d.i, d.raan, d.argp
    );
    if let Some(f) = &s.failure {
        println!("episode failed   {f}");
    }
}

fn write_trace(
    path: &Path,
    scenario: &Scenario,
    out: &EpisodeOutcome,
    comments: &[String],
) -> Result<()> {
    let mut buf = Vec::new();
    out.trace
        .write_csv(&mut buf, comments, target_period(scenario)?)
        .map_err(|e| Error::io(path, e))?;
    write_file(path, &buf)
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    // everything is validated before the output directory is touched
    let scenario = load_scenario(&a.scenario)?;
    let cfg = resolve_train(a, &scenario)?;
    let init = match cfg.lambert_window {
        None => init_random(&scenario, &cfg.init_bounds, cfg.seed)?,
        Some((t1, t2)) => init_lambert(&scenario, t1, t2, &cfg.init_bounds, cfg.seed)?,
    };
    init.validate(Some(&scenario))?;

    let log = train(&scenario, &cfg.ce, &cfg.episode, &init)?;
    let best = log.best_table;
    let outcome = run_episode(&scenario, &best, &cfg.episode)?;
    let summary = summarize(&scenario, &best, &outcome)?;

    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let comments = csv_comments(&cfg);
    let meta = Value::Object(json_provenance(&cfg));
    write_file(
        &a.out.join("scenario.json"),
        scenario_to_json(&scenario, Some(meta)).as_bytes(),
    )?;
    write_training_log(&a.out.join("training_log.csv"), &log, &comments)?;
    let mut extra = json_provenance(&cfg);
    extra.insert(
        "reward".into(),
        serde_json::to_value(log.best_reward).expect("f64"),
    );
    extra.insert(
        "initial_table".into(),
        serde_json::to_value(init).expect("table"),
    );
    extra.insert(
        "summary".into(),
        serde_json::to_value(&summary).expect("summary"),
    );
    write_file(
        &a.out.join("best_table.json"),
        table_to_json(&best, extra).as_bytes(),
    )?;
    write_trace(&a.out.join("trace.csv"), &scenario, &outcome, &comments)?;

    println!("{BUILD_ID}");
    println!("iterations run   {}", log.iterations.len());
    print_summary(&summary);
    println!("outputs in       {}", a.out.display());
    Ok(())
}

fn write_training_log(path: &Path, log: &TrainingLog, comments: &[String]) -> Result<()> {
    let mut buf = Vec::new();
    log.write_csv(&mut buf, comments)
        .map_err(|e| Error::io(path, e))?;
    write_file(path, &buf)
}

#[derive(Clone, Debug, Serialize)]
struct SimulateConfig {
    command: &'static str,
    scenario: String,
    table: ActionTable,
    episode: EpisodeConfig,
}

fn cmd_simulate(a: &SimulateArgs) -> Result<()> {
    let scenario = load_scenario(&a.scenario)?;
    let table = read_table(&a.table)?;
    table.validate(Some(&scenario))?;
    let cfg = SimulateConfig {
        command: "simulate",
        scenario: a.scenario.clone(),
        table,
        episode: resolve_episode(&a.episode)?,
    };

    let outcome = run_episode(&scenario, &table, &cfg.episode)?;
    let summary = summarize(&scenario, &table, &outcome)?;

    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    write_trace(
        &a.out.join("trace.csv"),
        &scenario,
        &outcome,
        &csv_comments(&cfg),
    )?;
    let mut doc = json_provenance(&cfg);
    doc.insert(
        "summary".into(),
        serde_json::to_value(&summary).expect("summary"),
    );
    write_json(&a.out.join("summary.json"), &doc)?;
    print_summary(&summary);
    Ok(())
}

#[derive(Serialize)]
struct ReportConfig {
    command: &'static str,
    logs: Vec<String>,
}

/// Reads a training log written by `train`, returning its data rows.
pub fn read_training_log(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let schema = |message: String| Error::Schema {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                _ => unreachable!(),
            },
            _ => schema(e.to_string()),
        })?;
    let header = reader.headers().map_err(|e| schema(e.to_string()))?.clone();
    if header.iter().ne(LOG_COLUMNS.iter().copied()) {
        return Err(schema(format!(
            "expected training-log columns {}",
            LOG_COLUMNS.join(",")
        )));
    }
    reader
        .records()
        .map(|r| r.map_err(|e| schema(e.to_string())))
        .collect()
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let runs: Vec<(String, Vec<csv::StringRecord>)> = a
        .logs
        .iter()
        .map(|p| Ok((p.display().to_string(), read_training_log(p)?)))
        .collect::<Result<_>>()?;
    let cfg = ReportConfig {
        command: "report",
        logs: runs.iter().map(|(n, _)| n.clone()).collect(),
    };
    let mut out = String::new();
    for c in csv_comments(&cfg) {
        out.push_str(&format!("# {c}\n"));
    }
    out.push_str(&format!("run,{}\n", LOG_COLUMNS.join(",")));
    for (name, rows) in &runs {
        for r in rows {
            out.push_str(&format!(
                "{},{}\n",
                csv_field(name),
                r.iter().collect::<Vec<_>>().join(",")
            ));
        }
    }
    write_file(&a.output, out.as_bytes())?;
    println!("wrote {} ({} runs)", a.output.display(), runs.len());
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
