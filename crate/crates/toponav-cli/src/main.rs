use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use toponav_cli::config::ScenarioConfig;
use toponav_cli::render::{render_to_file, RenderInputs};
use toponav_cli::scenario::{run_baseline, run_greedy, run_scenario, write_artifacts, RunResult};
use toponav_cli::snapshot::load_json;
use toponav_cli::{store_io, world_io};

/// Submap-roadmap navigation benchmark harness.
#[derive(Parser)]
#[command(name = "toponav", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// World file (ASCII grid or JSON).
    #[arg(long)]
    world: PathBuf,
    /// Scenario config JSON; defaults require --start/--goal.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for metrics and artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Override the frame budget.
    #[arg(long)]
    frames: Option<u64>,
    /// Override the cost weights, e.g. `0.8,0.2`.
    #[arg(long)]
    weights: Option<String>,
    /// Start pose `x,y[,theta]` (required without --config).
    #[arg(long)]
    start: Option<String>,
    /// Goal position `x,y` (required without --config).
    #[arg(long)]
    goal: Option<String>,
    /// Accept loop candidates without the connectivity check.
    #[arg(long)]
    disable_loop_validation: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the submap-roadmap pipeline on a scenario.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Replace the planner with a straight-at-the-goal follower.
        #[arg(long)]
        greedy: bool,
    },
    /// Run the growing-global-grid baseline on the same scenario shape.
    Baseline {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Re-render `snapshot.png` from a previous run's artifacts.
    Render {
        /// Artifact directory of a previous run.
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
        /// World file the run used.
        #[arg(long)]
        world: PathBuf,
        /// Output image path (defaults to `<out-dir>/snapshot.png`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run pipeline and baseline back to back and summarize.
    Compare {
        #[command(flatten)]
        args: RunArgs,
    },
}

fn parse_pair(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("expected `x,y`, got {text:?}");
    }
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?))
}

fn parse_pose(text: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 && parts.len() != 3 {
        bail!("expected `x,y[,theta]`, got {text:?}");
    }
    let theta = if parts.len() == 3 {
        parts[2].trim().parse()?
    } else {
        0.0
    };
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?, theta))
}

fn build_config(args: &RunArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => {
            let start = args
                .start
                .as_deref()
                .context("--start x,y[,theta] required without --config")?;
            let goal = args
                .goal
                .as_deref()
                .context("--goal x,y required without --config")?;
            ScenarioConfig::minimal(parse_pose(start)?, parse_pair(goal)?)
        }
    };
    if let Some(start) = &args.start {
        let (x, y, theta) = parse_pose(start)?;
        cfg.start = toponav_cli::config::PoseConfig { x, y, theta };
    }
    if let Some(goal) = &args.goal {
        let (x, y) = parse_pair(goal)?;
        cfg.goal = toponav_cli::config::PoseConfig { x, y, theta: 0.0 };
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(frames) = args.frames {
        cfg.frame_budget = frames;
    }
    if let Some(weights) = &args.weights {
        let (w_d, w_l) = parse_pair(weights)?;
        cfg.weights = toponav_core::planner::CostWeights { w_d, w_l };
    }
    if args.disable_loop_validation {
        cfg.disable_loop_validation = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(kind: &str, result: &RunResult) {
    let (slope, mean) = result.memory_slope_final_half(true);
    println!(
        "{kind}: {:?} after {} frames | final distance {:.2} m | corrections {} | reintegration writes {} | active-mem slope {:.3} B/frame (mean {:.0} B)",
        result.outcome,
        result.frames.len(),
        result
            .frames
            .last()
            .map(|f| f.distance_to_goal)
            .unwrap_or(f64::NAN),
        result.corrections.len(),
        result.total_reintegration_writes(),
        slope,
        mean,
    );
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { args, greedy } => {
            let cfg = build_config(&args)?;
            let world = world_io::load_world(&args.world)?;
            let result = if greedy {
                run_greedy(&world, &cfg)?
            } else {
                run_scenario(&world, &cfg)?
            };
            write_artifacts(&args.out_dir, &world, &cfg, &result)?;
            report(if greedy { "greedy" } else { "run" }, &result);
            Ok(ExitCode::from(result.outcome.exit_code() as u8))
        }
        Command::Baseline { args } => {
            let cfg = build_config(&args)?;
            let world = world_io::load_world(&args.world)?;
            let result = run_baseline(&world, &cfg)?;
            write_artifacts(&args.out_dir, &world, &cfg, &result)?;
            report("baseline", &result);
            Ok(ExitCode::from(result.outcome.exit_code() as u8))
        }
        Command::Render {
            out_dir,
            world,
            output,
        } => {
            let world = world_io::load_world(&world)?;
            let store = store_io::load_store(&out_dir).ok();
            let topology = store_io::load_topology(&out_dir).ok().map(|(t, _)| t);
            let frame = load_json(&out_dir.join("frame.json")).ok();
            let plan = load_json(&out_dir.join("plan.json")).ok();
            let target = output.unwrap_or_else(|| out_dir.join("snapshot.png"));
            render_to_file(
                &target,
                &RenderInputs {
                    world: &world,
                    store: store.as_ref(),
                    topology: topology.as_ref(),
                    frame: frame.as_ref(),
                    plan: plan.as_ref(),
                },
                4,
            )?;
            println!("wrote {}", target.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { args } => {
            let cfg = build_config(&args)?;
            let world = world_io::load_world(&args.world)?;
            let ours = run_scenario(&world, &cfg)?;
            let baseline = run_baseline(&world, &cfg)?;
            write_artifacts(&args.out_dir.join("hitmap"), &world, &cfg, &ours)?;
            write_artifacts(&args.out_dir.join("baseline"), &world, &cfg, &baseline)?;
            report("run", &ours);
            report("baseline", &baseline);
            let (ours_slope, ours_mean) = ours.memory_slope_final_half(true);
            let (base_slope, base_mean) = baseline.memory_slope_final_half(false);
            let comparison = serde_json::json!({
                "run": {
                    "outcome": ours.outcome,
                    "frames": ours.frames.len(),
                    "active_memory_slope_bytes_per_frame": ours_slope,
                    "active_memory_mean_bytes": ours_mean,
                    "reintegration_cell_writes": ours.total_reintegration_writes(),
                    "corrections": ours.corrections.len(),
                },
                "baseline": {
                    "outcome": baseline.outcome,
                    "frames": baseline.frames.len(),
                    "total_memory_slope_bytes_per_frame": base_slope,
                    "total_memory_mean_bytes": base_mean,
                    "reintegration_cell_writes": baseline.total_reintegration_writes(),
                    "corrections": baseline.corrections.len(),
                },
            });
            std::fs::create_dir_all(&args.out_dir)?;
            std::fs::write(
                args.out_dir.join("comparison.json"),
                serde_json::to_string_pretty(&comparison)?,
            )?;
            println!(
                "comparison written to {}",
                args.out_dir.join("comparison.json").display()
            );
            let worst = ours.outcome.exit_code().max(baseline.outcome.exit_code());
            Ok(ExitCode::from(worst as u8))
        }
    }
}
