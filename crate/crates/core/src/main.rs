use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use biteplan::llm::{LiveClient, LlmTransport, Recorder, ReplayTransport};
use biteplan::planner::{plan_with_trace, PlannerConfig};
use biteplan::plate::{load_fixture, FoodCategory, PlateState};
use biteplan::portions::item_portions;
use biteplan::render::{draw_command, draw_plan, draw_plate, item_heatmap, Canvas};
use biteplan::sim::{
    aggregate_curves, curve_at, curve_csv_rows, default_step_cap, dominates, pickup_curve, run_episode, EpisodeLog,
    Planner, SkillEffectConfig, TerminationReason, CURVE_HEADER,
};

#[derive(Parser)]
#[command(
    name = "biteplan",
    version,
    about = "Plan and simulate bite acquisition on plate fixtures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlannerArg {
    Flair,
    Pref,
    Eff,
}

impl PlannerArg {
    const ALL: [PlannerArg; 3] = [PlannerArg::Eff, PlannerArg::Flair, PlannerArg::Pref];

    fn name(self) -> &'static str {
        match self {
            PlannerArg::Flair => "flair",
            PlannerArg::Pref => "pref",
            PlannerArg::Eff => "eff",
        }
    }
}

#[derive(clap::Args)]
struct ConfigArgs {
    /// key=value overrides file for planner thresholds.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single override, applied after --config. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(clap::Args)]
struct LlmArgs {
    /// Replay cassette(s). Repeatable.
    #[arg(long)]
    cassette: Vec<PathBuf>,
    /// Fail on any prompt missing from the cassettes.
    #[arg(long)]
    strict_replay: bool,
    /// Live endpoint; defaults to FLAIR_LLM_ENDPOINT.
    #[arg(long)]
    endpoint: Option<String>,
    /// Live model name; defaults to FLAIR_LLM_MODEL.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value_t = 60)]
    timeout_s: u64,
}

#[derive(clap::Args)]
struct SimArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Action budget; defaults to four per initial portion.
    #[arg(long)]
    step_cap: Option<usize>,
    /// Overrides the fixture's preference line.
    #[arg(long)]
    preference: Option<String>,
    /// Per-skill success probability, e.g. skewer=0.8. Repeatable.
    #[arg(long = "success", value_name = "KIND=P")]
    success: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the skill sequence and efficiency of every item.
    Plan {
        #[arg(long)]
        fixture: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run one episode and write its log, curve and an overlay of the executed commands.
    Simulate {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long, value_enum)]
        planner: PlannerArg,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Run all three planners over a fixture set and compare pickup curves.
    Compare {
        /// Fixture files or directories of `.txt` fixtures. Repeatable.
        #[arg(long)]
        fixture: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        llm: LlmArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Render plan overlays and density heatmaps as PNG files.
    Geometry {
        #[arg(long)]
        fixture: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Plan { fixture, config } => cmd_plan(&fixture, &config),
        Command::Simulate {
            fixture,
            planner,
            out,
            config,
            llm,
            sim,
        } => cmd_simulate(&fixture, planner, &out, &config, &llm, &sim),
        Command::Compare {
            fixture,
            out,
            jobs,
            config,
            llm,
            sim,
        } => cmd_compare(&fixture, &out, jobs, &config, &llm, &sim),
        Command::Geometry { fixture, out, config } => cmd_geometry(&fixture, &out, &config),
    }
}

fn load_config(args: &ConfigArgs) -> CliResult<PlannerConfig> {
    let mut cfg = PlannerConfig::default();
    if let Some(path) = &args.config {
        if !path.is_file() {
            return Err(Failure::Usage(format!("config file `{}` not found", path.display())));
        }
        cfg.apply_overrides(&fs::read_to_string(path)?)?;
    }
    for kv in &args.set {
        cfg.apply_overrides(kv).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn load_plate(path: &Path) -> CliResult<PlateState> {
    if !path.is_file() {
        return Err(Failure::Usage(format!("fixture `{}` not found", path.display())));
    }
    Ok(load_fixture(path)?)
}

fn fixture_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "fixture".into())
}

fn cmd_plan(fixture: &Path, config: &ConfigArgs) -> CliResult<()> {
    let cfg = load_config(config)?;
    let state = load_plate(fixture)?;
    let width = state.items().iter().map(|i| i.label.len()).max().unwrap_or(0);
    let mut machine = Vec::new();
    for item in state.items() {
        let (seq, trace) = plan_with_trace(item, &state.others(item.instance_id), &cfg)?;
        let mut notes = vec![format!("area={}", item.mask.area())];
        if let Some(n) = item_portions(item, &cfg) {
            notes.push(format!("portions={n}"));
        }
        if let Some(d) = trace.peak_density {
            notes.push(format!("density={d:.3}"));
        }
        if let Some(e) = trace.entropy {
            notes.push(format!("entropy={e:.3}"));
        }
        if let Some(a) = trace.axis_length {
            notes.push(format!("axis={a:.1}"));
        }
        if let Some(t) = trace.pushed {
            notes.push(format!("push_item={t}"));
        }
        println!(
            "{:>3}  {:<width$}  {:<13}  eff={}  {:<18} {}",
            item.instance_id,
            item.label,
            item.category.as_str(),
            seq.efficiency(),
            seq.kinds_string(),
            notes.join(" ")
        );
        machine.push(format!(
            "plan {} eff={} seq={} item={}",
            item.label.replace(' ', "_"),
            seq.efficiency(),
            seq.kinds_string(),
            item.instance_id
        ));
    }
    for line in machine {
        println!("{line}");
    }
    Ok(())
}

fn effect_config(sim: &SimArgs) -> CliResult<SkillEffectConfig> {
    let mut fx = SkillEffectConfig {
        rng_seed: sim.seed,
        ..SkillEffectConfig::default()
    };
    for kv in &sim.success {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected KIND=P, got `{kv}`")))?;
        let kind: biteplan::SkillKind = k.trim().parse().map_err(Failure::Usage)?;
        let p: f64 = v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad probability `{v}`")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Failure::Usage(format!("probability `{v}` outside [0, 1]")));
        }
        fx.set_success_prob(kind, p);
    }
    Ok(fx)
}

/// Cassette replay, optionally falling back to a recording live client.
fn transport(llm: &LlmArgs) -> CliResult<Box<dyn LlmTransport>> {
    let timeout = Duration::from_secs(llm.timeout_s);
    let live = || LiveClient::from_env(llm.endpoint.clone(), llm.model.clone(), timeout);
    if llm.cassette.is_empty() {
        return Ok(Box::new(live()?));
    }
    for c in &llm.cassette {
        if !c.is_file() {
            return Err(Failure::Usage(format!("cassette `{}` not found", c.display())));
        }
    }
    let replay = ReplayTransport::from_files(&llm.cassette, llm.strict_replay)?;
    if llm.strict_replay {
        return Ok(Box::new(replay));
    }
    match live() {
        Ok(client) => {
            let recorder = Recorder::open(client, llm.cassette[0].clone())?;
            Ok(Box::new(replay.with_fallback(Box::new(recorder))))
        }
        Err(_) => Ok(Box::new(replay)),
    }
}

fn prepare(state: &mut PlateState, sim: &SimArgs) {
    if let Some(p) = &sim.preference {
        state.preference = Some(p.clone());
    }
}

fn episode(
    state: &PlateState,
    which: PlannerArg,
    llm: Option<&dyn LlmTransport>,
    cfg: &PlannerConfig,
    fx: &SkillEffectConfig,
    cap: Option<usize>,
) -> EpisodeLog {
    let planner = match (which, llm) {
        (PlannerArg::Flair, Some(t)) => Planner::Flair(t),
        (PlannerArg::Pref, Some(t)) => Planner::PreferenceOnly(t),
        _ => Planner::EfficiencyOnly,
    };
    let cap = cap.unwrap_or_else(|| default_step_cap(state, cfg));
    run_episode(state, planner, cfg, fx, cap)
}

fn cmd_simulate(
    fixture: &Path,
    which: PlannerArg,
    out: &Path,
    config: &ConfigArgs,
    llm: &LlmArgs,
    sim: &SimArgs,
) -> CliResult<()> {
    let cfg = load_config(config)?;
    let fx = effect_config(sim)?;
    let mut state = load_plate(fixture)?;
    prepare(&mut state, sim);
    let transport = if which == PlannerArg::Eff {
        None
    } else {
        Some(transport(llm)?)
    };
    let log = episode(&state, which, transport.as_deref(), &cfg, &fx, sim.step_cap);
    fs::create_dir_all(out)?;
    let name = fixture_name(fixture);
    fs::write(out.join("episode.log"), log.to_text())?;
    let curve = pickup_curve(&log);
    fs::write(
        out.join("curve.csv"),
        format!("{CURVE_HEADER}\n{}", curve_csv_rows(&curve, which.name(), &name)),
    )?;
    fs::write(out.join("episode.png"), episode_canvas(&state, &log).to_png()?)?;
    println!(
        "simulate {name} planner={} actions={} bites={} reason={}",
        which.name(),
        log.actions(),
        log.bites_fed(),
        log.terminated_reason.as_str()
    );
    if let Some(err) = &log.error {
        return Err(Failure::Run(err.clone()));
    }
    Ok(())
}

/// Initial plate with the episode's executed commands drawn on top.
fn episode_canvas(state: &PlateState, log: &EpisodeLog) -> Canvas {
    let mut canvas = draw_plate(state);
    for step in &log.steps {
        draw_command(&mut canvas, &step.command);
    }
    canvas
}

fn collect_fixtures(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "txt"))
                .collect();
            found.sort();
            out.extend(found);
        } else if p.is_file() {
            out.push(p.clone());
        } else {
            return Err(Failure::Usage(format!("fixture `{}` not found", p.display())));
        }
    }
    Ok(out)
}

fn cmd_compare(
    fixtures: &[PathBuf],
    out: &Path,
    jobs: usize,
    config: &ConfigArgs,
    llm: &LlmArgs,
    sim: &SimArgs,
) -> CliResult<()> {
    let files = collect_fixtures(fixtures)?;
    if files.is_empty() {
        return Err(Failure::Usage("empty fixture set".into()));
    }
    let cfg = load_config(config)?;
    let fx = effect_config(sim)?;
    let transport = transport(llm)?;
    let mut plates = Vec::new();
    for f in &files {
        let mut s = load_plate(f)?;
        prepare(&mut s, sim);
        plates.push((fixture_name(f), s));
    }
    let tasks: Vec<(usize, PlannerArg)> = (0..plates.len())
        .flat_map(|i| PlannerArg::ALL.into_iter().map(move |p| (i, p)))
        .collect();
    let jobs = jobs.max(1);
    let mut logs: Vec<Option<EpisodeLog>> = vec![None; tasks.len()];
    std::thread::scope(|scope| {
        let chunks: Vec<Vec<usize>> = (0..jobs).map(|j| (j..tasks.len()).step_by(jobs).collect()).collect();
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|idxs| {
                let (tasks, plates, cfg, fx, t) = (&tasks, &plates, &cfg, &fx, transport.as_ref());
                scope.spawn(move || {
                    idxs.into_iter()
                        .map(|k| {
                            let (i, p) = tasks[k];
                            (k, episode(&plates[i].1, p, Some(t), cfg, fx, sim.step_cap))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (k, log) in h.join().expect("episode worker panicked") {
                logs[k] = Some(log);
            }
        }
    });
    let logs: Vec<EpisodeLog> = logs.into_iter().map(|l| l.expect("every task ran")).collect();

    fs::create_dir_all(out)?;
    let mut long = format!("{CURVE_HEADER}\n");
    let mut wide = String::from("fixture,action_index,eff,flair,pref\n");
    let mut per_planner: [Vec<Vec<(usize, usize)>>; 3] = Default::default();
    let mut failures = Vec::new();
    for (i, (name, _)) in plates.iter().enumerate() {
        let curves: Vec<Vec<(usize, usize)>> = (0..3).map(|j| pickup_curve(&logs[i * 3 + j])).collect();
        for (j, p) in PlannerArg::ALL.iter().enumerate() {
            let log = &logs[i * 3 + j];
            long.push_str(&curve_csv_rows(&curves[j], p.name(), name));
            fs::write(out.join(format!("{name}_{}.log", p.name())), log.to_text())?;
            if log.terminated_reason == TerminationReason::Aborted {
                failures.push(format!(
                    "{name}/{}: {}",
                    p.name(),
                    log.error.clone().unwrap_or_default()
                ));
            }
            per_planner[j].push(curves[j].clone());
        }
        let len = curves.iter().map(|c| c.last().map_or(0, |p| p.0)).max().unwrap_or(0);
        for a in 1..=len {
            wide.push_str(&format!(
                "{name},{a},{},{},{}\n",
                curve_at(&curves[0], a),
                curve_at(&curves[1], a),
                curve_at(&curves[2], a)
            ));
        }
        let holds = dominates(&curves[0], &curves[1]) && dominates(&curves[1], &curves[2]);
        println!(
            "compare {name} eff={} flair={} pref={} ordering={}",
            logs[i * 3].actions(),
            logs[i * 3 + 1].actions(),
            logs[i * 3 + 2].actions(),
            if holds { "holds" } else { "violated" }
        );
    }
    fs::write(out.join("curves.csv"), long)?;
    fs::write(out.join("compare.csv"), wide)?;
    let agg: Vec<Vec<(usize, usize)>> = per_planner.iter().map(|c| aggregate_curves(c)).collect();
    let holds = dominates(&agg[0], &agg[1]) && dominates(&agg[1], &agg[2]);
    println!(
        "ordering aggregate eff>=flair>=pref {}",
        if holds { "holds" } else { "violated" }
    );
    if !failures.is_empty() {
        return Err(Failure::Run(failures.join("; ")));
    }
    Ok(())
}

fn cmd_geometry(fixture: &Path, out: &Path, config: &ConfigArgs) -> CliResult<()> {
    let cfg = load_config(config)?;
    let state = load_plate(fixture)?;
    fs::create_dir_all(out)?;
    let name = fixture_name(fixture);
    let mut canvas = draw_plate(&state);
    for item in state.items() {
        let (seq, _) = plan_with_trace(item, &state.others(item.instance_id), &cfg)?;
        draw_plan(&mut canvas, &seq);
    }
    let overlay = out.join(format!("{name}_plan.png"));
    fs::write(&overlay, canvas.to_png()?)?;
    println!("wrote {}", overlay.display());
    for item in state.items() {
        if matches!(item.category, FoodCategory::Noodles | FoodCategory::Semisolid) {
            let path = out.join(format!("{name}_density_{}.png", item.instance_id));
            fs::write(&path, item_heatmap(item, cfg.sigma)?.to_png()?)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
