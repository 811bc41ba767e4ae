use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dynopt_core::bench::Suite;
use dynopt_core::navsim::Scenario;
use dynopt_core::policy::PolicyParams;
use dynopt_core::ppo::Variant;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};
use crate::experiment::{self, Contender};
use crate::files::{self, Manifest, BUILD_ID};
use crate::records::{CurveRow, FrameRow, NavRow, ResultRow};
use crate::report::{assign_ranks, rank_report};

#[derive(Debug, Parser)]
#[command(name = "dynopt", version = BUILD_ID, about = "Learned PSO control on dynamic optimization problems")]
struct Cli {
    /// TOML run configuration; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Replaces the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Baseline {
    /// NBNC-PSO with w = 0.7298, c1 = c2 = 1.49618.
    FixedPso,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Policy checkpoint to evaluate.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the benchmark suite and the six navigation scenarios.
    Gen,
    /// Meta-train a policy on the training split.
    Train {
        /// Suite file written by `gen`; generated from the config when omitted
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Where to write the trained parameters (default `<out>/policy.mdo`).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Evaluate a checkpoint or a baseline on the test split.
    Eval {
        #[command(flatten)]
        source: Source,
        /// Suite file written by `gen`; generated from the config when omitted
        #[arg(long)]
        suite: Option<PathBuf>,
        /// Independent runs per instance; overrides the config
        #[arg(long)]
        runs: Option<usize>,
        /// Algorithm name for a checkpoint.
        #[arg(long, default_value = "meta")]
        name: String,
    },
    /// Train and evaluate the full system and its degraded variants.
    Ablate {
        /// Variants to run (repeatable); all seven when omitted.
        #[arg(long = "variant")]
        variants: Vec<String>,
        /// Suite file written by `gen`; generated from the config when omitted
        #[arg(long)]
        suite: Option<PathBuf>,
    },
    /// Path planning among moving obstacles.
    Navsim {
        #[command(flatten)]
        source: Source,
        /// Cases 1-6, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [1u8, 2, 3, 4, 5, 6])]
        cases: Vec<u8>,
        /// Scenario files; replace `--cases` when given.
        #[arg(long)]
        scenario: Vec<PathBuf>,
        /// Episodes per scenario; overrides the config
        #[arg(long)]
        episodes: Option<usize>,
        /// Also write a per-frame CSV for every episode.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value = "meta")]
        name: String,
    },
    /// Aggregate result CSVs into a mean/std/rank table.
    Report {
        /// Result CSVs from `eval` or `ablate`
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Default `<out>/report.csv`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen => "gen",
            Command::Train { .. } => "train",
            Command::Eval { .. } => "eval",
            Command::Ablate { .. } => "ablate",
            Command::Navsim { .. } => "navsim",
            Command::Report { .. } => "report",
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, argv: &[String]) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let out = cfg.resolved_out_dir();
    files::ensure_dir(&out)?;
    let mut manifest = Manifest::new(cli.command.name(), argv, &cfg);
    manifest.outputs = match cli.command {
        Command::Gen => gen(&cfg, &out)?,
        Command::Train { suite, checkpoint } => train(&cfg, &out, suite.as_deref(), checkpoint)?,
        Command::Eval {
            source,
            suite,
            runs,
            name,
        } => {
            if let Some(r) = runs {
                cfg.runs = r;
                cfg.validate()?;
                manifest.config = cfg.clone();
            }
            eval(&cfg, &out, &source, suite.as_deref(), &name)?
        }
        Command::Ablate { variants, suite } => ablate(&cfg, &out, &variants, suite.as_deref())?,
        Command::Navsim {
            source,
            cases,
            scenario,
            episodes,
            trace,
            name,
        } => {
            if let Some(e) = episodes {
                cfg.episodes = e;
                cfg.validate()?;
                manifest.config = cfg.clone();
            }
            navsim(&cfg, &out, &source, &cases, &scenario, trace, &name)?
        }
        Command::Report { inputs, output } => report(&out, &inputs, output)?,
    };
    let path = manifest.write(&out)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn load_or_make_suite(cfg: &RunConfig, path: Option<&Path>) -> Result<Suite> {
    match path {
        Some(p) => files::load_suite(p),
        None => Ok(experiment::suite_for(cfg)),
    }
}

fn gen(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let suite_path = out.join("suite.json");
    files::save_suite(&experiment::suite_for(cfg), &suite_path)?;
    written.push(suite_path);
    for case in 1..=6u8 {
        let p = out.join("scenarios").join(format!("case{case}.json"));
        files::save_scenario(&experiment::scenario_for(cfg, case)?, &p)?;
        written.push(p);
    }
    Ok(written)
}

fn train(cfg: &RunConfig, out: &Path, suite: Option<&Path>, checkpoint: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let suite = load_or_make_suite(cfg, suite)?;
    let wiring = cfg.wiring()?;
    let outcome = experiment::train(cfg, &suite.train, wiring, cfg.seed, |p| {
        eprintln!("epoch {:>3}  {:<24} return {:>9.4}  e_off {:.4e}", p.epoch, p.instance_id, p.ret, p.e_off);
    })?;
    let ckpt = checkpoint.unwrap_or_else(|| out.join("policy.mdo"));
    files::save_checkpoint(&outcome.params, &ckpt)?;
    let curve = out.join("curve.csv");
    files::write_csv(&curve, &outcome.curve.iter().map(CurveRow::from).collect::<Vec<_>>())?;
    eprintln!("{} updates ({} skipped for non-finite loss)", outcome.updates, outcome.aborted_updates);
    Ok(vec![ckpt, curve])
}

/// Loads the checkpoint named by `source`, if any.
fn load_source(source: &Source) -> Result<Option<PolicyParams<f32>>> {
    source.checkpoint.as_deref().map(files::load_checkpoint).transpose()
}

fn contender<'a>(cfg: &RunConfig, params: &'a Option<PolicyParams<f32>>, name: &'a str) -> Result<Contender<'a>> {
    Ok(match params {
        Some(p) => Contender::policy(name, p, cfg.wiring()?),
        None => Contender::fixed(),
    })
}

fn eval(cfg: &RunConfig, out: &Path, source: &Source, suite: Option<&Path>, name: &str) -> Result<Vec<PathBuf>> {
    let suite = load_or_make_suite(cfg, suite)?;
    let params = load_source(source)?;
    let who = contender(cfg, &params, name)?;
    let mut rows = experiment::evaluate(&who, &suite.test, cfg)?;
    let table = assign_ranks(&mut rows)?;
    let path = out.join(format!("eval-{}.csv", who.name));
    files::write_csv(&path, &rows)?;
    print!("{}", table.render());
    Ok(vec![path])
}

fn ablate(cfg: &RunConfig, out: &Path, names: &[String], suite: Option<&Path>) -> Result<Vec<PathBuf>> {
    let variants: Vec<Variant> = if names.is_empty() {
        Variant::ALL.to_vec()
    } else {
        names
            .iter()
            .map(|n| {
                Variant::from_name(n).ok_or_else(|| {
                    let known: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                    HarnessError::Usage(format!("unknown variant `{n}` (expected one of {})", known.join(", ")))
                })
            })
            .collect::<Result<_>>()?
    };
    let suite = load_or_make_suite(cfg, suite)?;
    let runs = experiment::ablate(cfg, &suite, &variants, |v, p| {
        eprintln!("{:<20} epoch {:>3}  {:<24} return {:>9.4}", v.name(), p.epoch, p.instance_id, p.ret);
    })?;
    let dir = out.join("ablation");
    let mut written = Vec::new();
    let mut rows: Vec<ResultRow> = Vec::new();
    for r in runs {
        let ckpt = dir.join(format!("{}.mdo", r.variant.name()));
        files::save_checkpoint(&r.outcome.params, &ckpt)?;
        let curve = dir.join(format!("curve-{}.csv", r.variant.name()));
        files::write_csv(&curve, &r.outcome.curve.iter().map(CurveRow::from).collect::<Vec<_>>())?;
        written.extend([ckpt, curve]);
        rows.extend(r.rows);
    }
    let table = assign_ranks(&mut rows)?;
    let results = dir.join("results.csv");
    let report = dir.join("report.csv");
    files::write_csv(&results, &rows)?;
    files::write_csv(&report, &table.rows())?;
    print!("{}", table.render());
    written.extend([results, report]);
    Ok(written)
}

fn navsim(
    cfg: &RunConfig,
    out: &Path,
    source: &Source,
    cases: &[u8],
    scenario_files: &[PathBuf],
    trace: bool,
    name: &str,
) -> Result<Vec<PathBuf>> {
    let scenarios: Vec<Scenario> = if scenario_files.is_empty() {
        cases.iter().map(|&c| experiment::scenario_for(cfg, c)).collect::<Result<_>>()?
    } else {
        scenario_files.iter().map(|p| files::load_scenario(p)).collect::<Result<_>>()?
    };
    let params = load_source(source)?;
    let who = contender(cfg, &params, name)?;
    let episodes = experiment::navigate(&who, &scenarios, cfg)?;
    let mut written = Vec::new();
    if trace {
        for e in &episodes {
            let p = out
                .join("nav-trace")
                .join(who.name)
                .join(format!("case{}-ep{}.csv", e.row.case, e.row.episode));
            files::write_csv(&p, &e.trace.iter().map(FrameRow::from).collect::<Vec<_>>())?;
            written.push(p);
        }
    }
    let rows: Vec<NavRow> = episodes.iter().map(|e| e.row.clone()).collect();
    let summary = experiment::summarize_navigation(&episodes)?;
    let rows_path = out.join(format!("navsim-{}.csv", who.name));
    let summary_path = out.join(format!("navsim-{}-summary.csv", who.name));
    files::write_csv(&rows_path, &rows)?;
    files::write_csv(&summary_path, &summary)?;
    for s in &summary {
        println!(
            "case {}  SR {:.2}  D_target {:>8.2}  T_step {:>6.1}",
            s.case, s.sr, s.mean_d_target, s.mean_t_step
        );
    }
    written.extend([rows_path, summary_path]);
    Ok(written)
}

fn report(out: &Path, inputs: &[PathBuf], output: Option<PathBuf>) -> Result<Vec<PathBuf>> {
    let mut rows: Vec<ResultRow> = Vec::new();
    for p in inputs {
        rows.extend(files::read_csv::<ResultRow>(p)?);
    }
    let table = rank_report(&rows)?;
    let path = output.unwrap_or_else(|| out.join("report.csv"));
    files::write_csv(&path, &table.rows())?;
    print!("{}", table.render());
    Ok(vec![path])
}
