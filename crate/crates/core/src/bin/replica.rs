//! Command-line entry point: serve the simulation, generate study plans, run
//! scripted sessions headlessly, analyze session logs and verify archives.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use replica::gateway::{replay, run_headless_with, serve, ScriptedAgent, ServeConfig};
use replica::metrics::{
    log_file_name, parse_ndjson, render_csv, render_plot_data, render_table, summarize_study,
    LogEvent, Questionnaire, SessionRecord,
};
use replica::orchestrator::StudyPlan;
use replica::sim::Scene;

#[derive(Parser)]
#[command(
    name = "replica",
    version,
    about = "Warehouse robot simulation and study pipeline"
)]
struct Cli {
    /// Scene file (TOML). Defaults to the built-in warehouse.
    #[arg(long, global = true, value_name = "PATH")]
    scene: Option<PathBuf>,
    /// Service configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simulation service for operator consoles.
    Serve {
        #[command(flatten)]
        plan: PlanSource,
        /// Overrides the configured port.
        #[arg(long)]
        port: Option<u16>,
        /// Overrides the configured log directory.
        #[arg(long, value_name = "DIR")]
        data_dir: Option<PathBuf>,
    },
    /// Print a counterbalanced study plan.
    Plan {
        #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
        subjects: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the plan here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run every subject with the scripted agent and archive the sessions.
    Headless {
        #[command(flatten)]
        plan: PlanSource,
        /// Standard deviation of the agent's reaction jitter, in seconds.
        #[arg(long, default_value_t = 2.0)]
        jitter: f64,
        #[arg(long, value_name = "DIR", default_value = "headless-out")]
        out: PathBuf,
    },
    /// Summarize session logs and questionnaires into a study report.
    Analyze {
        /// Session logs (.ndjson), questionnaires (.toml) or directories
        /// containing them.
        #[arg(required = true, value_name = "PATH")]
        inputs: Vec<PathBuf>,
        #[arg(long, value_name = "DIR", default_value = ".")]
        out: PathBuf,
        /// Skip logs of sessions that did not finish instead of failing.
        #[arg(long)]
        skip_incomplete: bool,
    },
    /// Re-run archived sessions and check they reproduce byte for byte.
    Replay {
        #[arg(required = true, value_name = "ARCHIVE")]
        archives: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct PlanSource {
    /// Study plan file (TOML). Takes precedence over --subjects/--seed.
    #[arg(long, value_name = "PATH")]
    plan: Option<PathBuf>,
    #[arg(long, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
    subjects: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl PlanSource {
    fn load(&self) -> Result<StudyPlan> {
        match &self.plan {
            Some(p) => StudyPlan::load(p).with_context(|| format!("plan {}", p.display())),
            None => Ok(StudyPlan::generate(self.subjects as usize, self.seed)),
        }
    }
}

fn load_scene(path: Option<&Path>) -> Result<Scene> {
    match path {
        Some(p) => Scene::load(p).with_context(|| format!("scene {}", p.display())),
        None => Ok(Scene::default_scene()),
    }
}

fn load_config(path: Option<&Path>) -> Result<ServeConfig> {
    match path {
        Some(p) => ServeConfig::load(p).with_context(|| format!("config {}", p.display())),
        None => Ok(ServeConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    let scene_path = cli.scene.as_deref();
    let config_path = cli.config.as_deref();
    match cli.command {
        Command::Serve {
            plan,
            port,
            data_dir,
        } => {
            let mut config = load_config(config_path)?;
            config.apply_env()?;
            if let Some(port) = port {
                config.port = port;
            }
            if let Some(dir) = data_dir {
                config.data_dir = dir;
            }
            let handle = serve(&config, load_scene(scene_path)?, plan.load()?)?;
            eprintln!("listening on {}", handle.addr());
            handle.wait();
        }
        Command::Plan {
            subjects,
            seed,
            out,
        } => {
            let text = StudyPlan::generate(subjects as usize, seed).to_toml_string();
            match out {
                Some(p) => fs::write(&p, text).with_context(|| format!("{}", p.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Headless { plan, jitter, out } => {
            if !(jitter.is_finite() && jitter >= 0.0) {
                bail!("--jitter must be a non-negative number");
            }
            let config = load_config(config_path)?;
            let scene = load_scene(scene_path)?;
            let plan = plan.load()?;
            let agent = ScriptedAgent::jittered(jitter);
            fs::create_dir_all(&out).with_context(|| format!("{}", out.display()))?;
            for subject in &plan.subjects {
                let archive =
                    run_headless_with(subject, &scene, &agent, plan.seed, &config.session)?;
                archive.save(out.join(format!("{}.archive.json", subject.subject_id)))?;
                for s in &archive.sessions {
                    let name = log_file_name(&subject.subject_id, s.which, s.modality);
                    fs::write(out.join(name), &s.log)?;
                }
                fs::write(
                    out.join(format!("{}.questionnaire.toml", subject.subject_id)),
                    &archive.questionnaire,
                )?;
                for r in archive.records()? {
                    println!(
                        "{} {:<6} {:<10} total {:>8.2} s  mean reaction {:>6.2} s",
                        r.subject,
                        format!("{:?}", r.session).to_lowercase(),
                        r.modality.label(),
                        r.timings.total_time,
                        r.mean_reaction()
                    );
                }
            }
            eprintln!(
                "wrote {} subjects to {}",
                plan.subjects.len(),
                out.display()
            );
        }
        Command::Analyze {
            inputs,
            out,
            skip_incomplete,
        } => analyze(&inputs, &out, skip_incomplete)?,
        Command::Replay { archives } => {
            let mut diverged = 0;
            for path in &archives {
                let archive = replica::gateway::SessionArchive::load(path)
                    .with_context(|| format!("{}", path.display()))?;
                match replay(&archive) {
                    Ok(report) => println!(
                        "ok {}: {} sessions reproduced",
                        path.display(),
                        report.records.len()
                    ),
                    Err(e) => {
                        println!("FAILED {}: {e}", path.display());
                        diverged += 1;
                    }
                }
            }
            if diverged > 0 {
                bail!("{diverged} of {} archives did not replay", archives.len());
            }
        }
    }
    Ok(())
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<(Vec<PathBuf>, Vec<PathBuf>)> {
    let mut files = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("{}", p.display()))?
                .map(|e| e.map(|e| e.path()))
                .collect::<Result<_, _>>()?;
            entries.sort();
            files.extend(entries.into_iter().filter(|e| e.is_file()));
        } else {
            files.push(p.clone());
        }
    }
    let ext = |p: &Path, e: &str| p.extension().is_some_and(|x| x == e);
    let logs = files.iter().filter(|p| ext(p, "ndjson")).cloned().collect();
    let forms = files.iter().filter(|p| ext(p, "toml")).cloned().collect();
    Ok((logs, forms))
}

fn analyze(inputs: &[PathBuf], out: &Path, skip_incomplete: bool) -> Result<()> {
    let (log_paths, form_paths) = collect_inputs(inputs)?;
    if log_paths.is_empty() {
        bail!("no session logs (.ndjson) among the inputs");
    }
    let mut records: Vec<SessionRecord> = Vec::new();
    let mut logs_by_subject: BTreeMap<String, Vec<Vec<LogEvent>>> = BTreeMap::new();
    for path in &log_paths {
        let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
        let log = parse_ndjson(&text).with_context(|| format!("{}", path.display()))?;
        match SessionRecord::from_log(&log) {
            Ok(r) => {
                logs_by_subject
                    .entry(r.subject.clone())
                    .or_default()
                    .push(log);
                records.push(r);
            }
            Err(e) if skip_incomplete => eprintln!("skipping {}: {e}", path.display()),
            Err(e) => return Err(e).with_context(|| format!("{}", path.display())),
        }
    }

    let mut questionnaires: BTreeMap<String, Questionnaire> = BTreeMap::new();
    for path in &form_paths {
        let q = Questionnaire::load(path).with_context(|| format!("{}", path.display()))?;
        questionnaires.insert(q.subject.clone(), q);
    }
    for (subject, logs) in &logs_by_subject {
        if questionnaires.contains_key(subject) {
            continue;
        }
        let views: Vec<&[LogEvent]> = logs.iter().map(|l| l.as_slice()).collect();
        if let Ok(q) = Questionnaire::from_logs(&views) {
            questionnaires.insert(subject.clone(), q);
        }
    }
    let questionnaires: Vec<Questionnaire> = questionnaires
        .into_values()
        .filter(|q| logs_by_subject.contains_key(&q.subject))
        .collect();

    let report = summarize_study(&records, &questionnaires)?;
    fs::create_dir_all(out).with_context(|| format!("{}", out.display()))?;
    fs::write(out.join("report.csv"), render_csv(&report))?;
    fs::write(out.join("plot.csv"), render_plot_data(&report))?;
    print!("{}", render_table(&report));
    eprintln!(
        "{} sessions, {} questionnaires; wrote report.csv and plot.csv to {}",
        records.len(),
        questionnaires.len(),
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
