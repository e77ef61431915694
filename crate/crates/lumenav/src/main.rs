//! Command-line front end: environment generation, dataset export,
//! degradation calibration, training, evaluation, baselines, metrics, and
//! plots.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lumenav::config::{config_hash_of, RunConfig};
use lumenav::env::RewardTerms;
use lumenav::geometry::{generate_environment, ProfileTag, TubeEnvironment, TubeEnvironmentFile};
use lumenav::metrics::{
    aggregate, evaluate, scripted_lumen_follower, scripted_oracle, MetricsReport, PathPenaltyMode,
    TrajectoryLog,
};
use lumenav::perception::{calibrate_profile, measure_profile, CalibrationOptions};
use lumenav::render::{export_dataset, DatasetOptions};
use lumenav::rl::{run_policy_episode, train, write_curve_csv, Checkpoint, SimEnv};

#[derive(Parser)]
#[command(
    name = "lumenav",
    about = "Follow-the-leader endoscopic lumen navigation simulator and RL harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Simple,
    Complex,
}

impl From<ProfileArg> for ProfileTag {
    fn from(p: ProfileArg) -> ProfileTag {
        match p {
            ProfileArg::Simple => ProfileTag::Simple,
            ProfileArg::Complex => ProfileTag::Complex,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Excess,
    Literal,
}

impl From<ModeArg> for PathPenaltyMode {
    fn from(m: ModeArg) -> PathPenaltyMode {
        match m {
            ModeArg::Excess => PathPenaltyMode::Excess,
            ModeArg::Literal => PathPenaltyMode::Literal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Oracle,
    LumenFollower,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a procedural tube environment and write it as JSON.
    GenEnv {
        #[arg(long, value_enum)]
        profile: ProfileArg,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a synthetic (RGB, depth) dataset with randomized pose,
    /// lighting, and field of view.
    Dataset {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
    },
    /// Search degradation parameters hitting target depth statistics.
    Calibrate {
        #[arg(long)]
        env: PathBuf,
        #[arg(long, value_name = "ABS_REL")]
        abs_rel: f64,
        #[arg(long)]
        delta1: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        frames: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also report held-out statistics on a fresh environment seed.
        #[arg(long)]
        holdout_seed: Option<u64>,
    },
    /// Train a PPO policy on one or more environments.
    Train {
        /// Environment JSON files; repeatable.
        #[arg(long = "env", required = true)]
        envs: Vec<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Evaluate a trained policy, writing trajectory logs and metrics.
    Eval {
        #[arg(long = "env", required = true)]
        envs: Vec<PathBuf>,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 1)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        log_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "excess")]
        mode: ModeArg,
    },
    /// Run a scripted baseline controller.
    Baseline {
        #[arg(long = "env", required = true)]
        envs: Vec<PathBuf>,
        #[arg(long, value_enum)]
        kind: BaselineKind,
        #[arg(long, default_value_t = 1)]
        episodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        log_out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "excess")]
        mode: ModeArg,
    },
    /// Compute metrics for existing trajectory logs.
    Metrics {
        /// A .jsonl log file or a directory of them.
        #[arg(long)]
        log: PathBuf,
        /// Environment override; defaults to the one inlined in each log.
        #[arg(long)]
        env: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "excess")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render top-down and side SVG projections of a trajectory.
    Plot {
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        env: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reward-term ablation: trains the cumulative reward ladder and
    /// compares the variants.
    Ablate {
        #[arg(long = "train-env", required = true)]
        train_envs: Vec<PathBuf>,
        #[arg(long = "eval-env", required = true)]
        eval_envs: Vec<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        eval_episodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(3);
    }
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit
        .or_else(|| std::env::var_os("LUMENAV_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_env(path: &Path) -> Result<Arc<TubeEnvironment>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("file not found or unreadable: {}", path.display()))?;
    let file: TubeEnvironmentFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed environment JSON: {}", path.display()))?;
    Ok(Arc::new(TubeEnvironment::from_file(&file)?))
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("file not found or unreadable: {}", p.display()))?;
            RunConfig::from_json(&text)
                .with_context(|| format!("malformed config JSON: {}", p.display()))?
        }
        None => RunConfig::desk_training(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenEnv { profile, seed, out } => {
            let dir = out_dir(None);
            let out = out.unwrap_or_else(|| dir.join(format!("env_{seed}.json")));
            let env = generate_environment(profile.into(), seed)?;
            let json = serde_json::to_string_pretty(&env.to_file())?;
            std::fs::write(&out, json)
                .with_context(|| format!("cannot write {}", out.display()))?;
            println!(
                "wrote {} ({} control points, {:.0} mm)",
                out.display(),
                env.centerline.control_points().len(),
                env.centerline.total_length()
            );
        }

        Command::Dataset {
            env,
            count,
            seed,
            out,
            resolution,
        } => {
            let environment = load_env(&env)?;
            let out = out_dir(out).join(format!("dataset_{seed}"));
            let opts = DatasetOptions {
                width: resolution,
                height: resolution,
                config_hash: config_hash_of(&format!("dataset:{resolution}:{seed}")),
                ..Default::default()
            };
            let manifest = export_dataset(&environment, count, seed, &out, &opts)?;
            println!(
                "wrote {} image pairs and manifest to {}",
                manifest.entries.len(),
                out.display()
            );
        }

        Command::Calibrate {
            env,
            abs_rel,
            delta1,
            seed,
            frames,
            out,
            holdout_seed,
        } => {
            let environment = load_env(&env)?;
            let cfg = RunConfig::desk_training();
            let opts = CalibrationOptions {
                n_frames: frames,
                ..Default::default()
            };
            let outcome = calibrate_profile(
                &environment,
                &cfg.episode.camera,
                abs_rel,
                delta1,
                seed,
                &opts,
            )?;
            println!(
                "calibrated: Abs.Rel {:.3} (target {abs_rel}), delta1 {:.3} (target {delta1}), converged: {}",
                outcome.achieved_abs_rel, outcome.achieved_delta1, outcome.converged
            );
            if let Some(hseed) = holdout_seed {
                let fresh = generate_environment(environment.profile_tag, hseed)?;
                let (ar, d1) = measure_profile(
                    &fresh,
                    &cfg.episode.camera,
                    &outcome.profile,
                    frames,
                    lumenav::util::mix_seeds(seed, 0x40DD),
                    &opts.render,
                )?;
                println!("held-out (env seed {hseed}): Abs.Rel {ar:.3}, delta1 {d1:.3}");
            }
            let out = out_dir(out).join("degradation_profile.json");
            std::fs::write(&out, serde_json::to_string_pretty(&outcome)?)?;
            println!("wrote {}", out.display());
        }

        Command::Train {
            envs,
            config,
            seed,
            out,
            steps,
            workers,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            if let Some(s) = steps {
                cfg.ppo.total_steps = s;
            }
            if let Some(w) = workers {
                cfg.ppo.workers = w;
            }
            let pool: Vec<Arc<TubeEnvironment>> = envs
                .iter()
                .map(|p| load_env(p))
                .collect::<Result<_>>()?;
            let out = out_dir(out);
            std::fs::create_dir_all(&out)?;
            let hash = cfg.hash();
            println!("training for {} steps (config {hash})", cfg.ppo.total_steps);

            let episode_cfg = cfg.episode.clone();
            let profile = cfg.degradation;
            let pool_for_factory = pool.clone();
            let result = train(
                &move |w| {
                    Box::new(SimEnv::new(
                        pool_for_factory.clone(),
                        profile,
                        episode_cfg.clone(),
                        lumenav::util::mix_seeds(seed, w as u64),
                    ))
                },
                &cfg.ppo,
                seed,
                |p, _| {
                    println!(
                        "update {:>4} steps {:>8} ep_reward {:>10.1} ep_len {:>6.0} goal {:.2} collision {:.2}",
                        p.update, p.steps, p.mean_ep_reward, p.mean_ep_len, p.goal_rate, p.collision_rate
                    );
                },
            )?;

            let checkpoint = Checkpoint {
                version: lumenav::rl::CHECKPOINT_VERSION,
                config_hash: hash.clone(),
                ppo: cfg.ppo.clone(),
                policy: result.policy,
                value: result.value,
                optimizer: result.optimizer,
                seed,
                steps_done: result.steps_done,
                updates_done: result.updates_done,
            };
            checkpoint.save(&out.join("checkpoint.json"))?;
            write_curve_csv(&out.join("curve.csv"), &result.curve)?;
            std::fs::write(out.join("config.json"), cfg.to_json_pretty())?;
            println!("wrote checkpoint.json, curve.csv, config.json to {}", out.display());
        }

        Command::Eval {
            envs,
            policy,
            episodes,
            seed,
            config,
            log_out,
            mode,
        } => {
            let checkpoint = Checkpoint::load(&policy)?;
            let cfg = load_config(config.as_deref())?;
            let hash = cfg.hash();
            let out = out_dir(log_out);
            std::fs::create_dir_all(&out)?;
            let mut reports = Vec::new();
            for (ei, env_path) in envs.iter().enumerate() {
                let environment = load_env(env_path)?;
                for ep in 0..episodes {
                    let ep_seed = lumenav::util::mix_seeds(seed, (ei * episodes + ep) as u64);
                    let log = run_policy_episode(
                        environment.clone(),
                        cfg.degradation,
                        cfg.episode.clone(),
                        &checkpoint.policy,
                        ep_seed,
                        &hash,
                    )?;
                    let path = out.join(format!("eval_{ei:02}_{ep:03}.jsonl"));
                    log.write_jsonl(&path)?;
                    let report = evaluate(&log, &environment, mode.into())?;
                    println!(
                        "{}: completion {:.3} collisions {} s_nav {:.3} jerk {:.3} d_geo {:.3}",
                        path.display(),
                        report.completion_fraction,
                        report.n_collisions,
                        report.s_nav,
                        report.jerk_index,
                        report.d_geo
                    );
                    reports.push(report);
                }
            }
            let summary = aggregate(&reports)?;
            let summary_path = out.join("metrics_summary.json");
            std::fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)?;
            println!("wrote {}", summary_path.display());
        }

        Command::Baseline {
            envs,
            kind,
            episodes,
            seed,
            config,
            log_out,
            mode,
        } => {
            let cfg = load_config(config.as_deref())?;
            let hash = cfg.hash();
            let out = out_dir(log_out);
            std::fs::create_dir_all(&out)?;
            let mut reports = Vec::new();
            for (ei, env_path) in envs.iter().enumerate() {
                let environment = load_env(env_path)?;
                for ep in 0..episodes {
                    let ep_seed = lumenav::util::mix_seeds(seed, (ei * episodes + ep) as u64);
                    let log = match kind {
                        BaselineKind::Oracle => scripted_oracle(
                            environment.clone(),
                            cfg.degradation,
                            cfg.episode.clone(),
                            ep_seed,
                            &hash,
                        )?,
                        BaselineKind::LumenFollower => scripted_lumen_follower(
                            environment.clone(),
                            cfg.degradation,
                            cfg.episode.clone(),
                            ep_seed,
                            &hash,
                        )?,
                    };
                    let name = match kind {
                        BaselineKind::Oracle => "oracle",
                        BaselineKind::LumenFollower => "lumen",
                    };
                    let path = out.join(format!("{name}_{ei:02}_{ep:03}.jsonl"));
                    log.write_jsonl(&path)?;
                    let report = evaluate(&log, &environment, mode.into())?;
                    println!(
                        "{}: completion {:.3} collisions {} s_nav {:.3} jerk {:.3} d_geo {:.3}",
                        path.display(),
                        report.completion_fraction,
                        report.n_collisions,
                        report.s_nav,
                        report.jerk_index,
                        report.d_geo
                    );
                    reports.push(report);
                }
            }
            let summary = aggregate(&reports)?;
            std::fs::write(
                out.join("metrics_summary.json"),
                serde_json::to_string_pretty(&summary)?,
            )?;
        }

        Command::Metrics { log, env, mode, out } => {
            let logs = collect_logs(&log)?;
            if logs.is_empty() {
                bail!("no .jsonl logs found under {}", log.display());
            }
            let mut reports = Vec::new();
            for path in &logs {
                let trajectory = TrajectoryLog::read_jsonl(path)?;
                let environment = match &env {
                    Some(p) => load_env(p)?,
                    None => Arc::new(TubeEnvironment::from_file(&trajectory.header.env)?),
                };
                let report = evaluate(&trajectory, &environment, mode.into())?;
                println!("{}", path.display());
                println!("{}", serde_json::to_string_pretty(&report)?);
                reports.push(report);
            }
            if let Some(out) = out {
                write_metrics_csv(&out, &logs, &reports)?;
                println!("wrote {}", out.display());
            }
        }

        Command::Plot { log, env, out } => {
            let trajectory = TrajectoryLog::read_jsonl(&log)?;
            let environment = match &env {
                Some(p) => load_env(p)?,
                None => Arc::new(TubeEnvironment::from_file(&trajectory.header.env)?),
            };
            let out = out.unwrap_or_else(|| log.with_extension("svg"));
            let svg = render_trajectory_svg(&trajectory, &environment);
            std::fs::write(&out, svg)?;
            println!("wrote {}", out.display());
        }

        Command::Ablate {
            train_envs,
            eval_envs,
            steps,
            seed,
            config,
            eval_episodes,
            out,
            workers,
        } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.ppo.total_steps = steps;
            if let Some(w) = workers {
                cfg.ppo.workers = w;
            }
            let out = out_dir(out);
            std::fs::create_dir_all(&out)?;
            let rows = run_ablation(&cfg, &train_envs, &eval_envs, seed, eval_episodes, &out)?;
            let table = out.join("ablation.csv");
            let mut text = String::from(
                "variant,d_geo_mean,d_geo_std,s_nav_mean,s_nav_std,jerk_mean,jerk_std,completion_mean,config_hash,seed\n",
            );
            for (name, summary, hash) in &rows {
                text.push_str(&format!(
                    "{name},{},{},{},{},{},{},{},{hash},{seed}\n",
                    summary.d_geo_mean,
                    summary.d_geo_std,
                    summary.s_nav_mean,
                    summary.s_nav_std,
                    summary.jerk_mean,
                    summary.jerk_std,
                    summary.completion_mean,
                ));
            }
            std::fs::write(&table, &text)?;
            println!("wrote {}", table.display());
        }
    }
    Ok(())
}

type AblationRow = (String, lumenav::metrics::MetricsSummary, String);

fn run_ablation(
    base: &RunConfig,
    train_envs: &[PathBuf],
    eval_envs: &[PathBuf],
    seed: u64,
    eval_episodes: usize,
    out: &Path,
) -> Result<Vec<AblationRow>> {
    let pool: Vec<Arc<TubeEnvironment>> = train_envs
        .iter()
        .map(|p| load_env(p))
        .collect::<Result<_>>()?;
    let eval_pool: Vec<Arc<TubeEnvironment>> = eval_envs
        .iter()
        .map(|p| load_env(p))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (name, terms) in RewardTerms::ablation_ladder() {
        let mut cfg = base.clone();
        cfg.episode.reward_terms = terms;
        let hash = cfg.hash();
        println!("== ablation variant {name} (config {hash}) ==");

        let episode_cfg = cfg.episode.clone();
        let profile = cfg.degradation;
        let pool_for_factory = pool.clone();
        let result = train(
            &move |w| {
                Box::new(SimEnv::new(
                    pool_for_factory.clone(),
                    profile,
                    episode_cfg.clone(),
                    lumenav::util::mix_seeds(seed, w as u64),
                ))
            },
            &cfg.ppo,
            seed,
            |p, _| {
                if p.update % 10 == 0 {
                    println!(
                        "  update {:>4} steps {:>8} goal {:.2} collision {:.2}",
                        p.update, p.steps, p.goal_rate, p.collision_rate
                    );
                }
            },
        )?;

        let mut reports = Vec::new();
        for (ei, environment) in eval_pool.iter().enumerate() {
            for ep in 0..eval_episodes {
                let ep_seed = lumenav::util::mix_seeds(seed, 0xE7A1 + (ei * eval_episodes + ep) as u64);
                let log = run_policy_episode(
                    environment.clone(),
                    cfg.degradation,
                    cfg.episode.clone(),
                    &result.policy,
                    ep_seed,
                    &hash,
                )?;
                log.write_jsonl(&out.join(format!("ablate_{name}_{ei:02}_{ep:02}.jsonl")))?;
                reports.push(evaluate(&log, environment, PathPenaltyMode::Excess)?);
            }
        }
        let summary = aggregate(&reports)?;
        println!(
            "  {name}: d_geo {:.3} s_nav {:.3} jerk {:.3}",
            summary.d_geo_mean, summary.s_nav_mean, summary.jerk_mean
        );
        write_curve_csv(&out.join(format!("curve_{name}.csv")), &result.curve)?;
        rows.push((name.to_string(), summary, hash));
    }
    Ok(rows)
}

fn collect_logs(path: &Path) -> Result<Vec<PathBuf>> {
    if path.is_dir() {
        let mut logs: Vec<PathBuf> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        logs.sort();
        Ok(logs)
    } else if path.exists() {
        Ok(vec![path.to_path_buf()])
    } else {
        bail!("file not found: {}", path.display());
    }
}

fn write_metrics_csv(out: &Path, logs: &[PathBuf], reports: &[MetricsReport]) -> Result<()> {
    let mut text = String::from(
        "log,d_geo,s_nav,jerk_index,n_collisions,n_steps,path_length_mm,completion_fraction\n",
    );
    for (path, r) in logs.iter().zip(reports) {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            path.display(),
            r.d_geo,
            r.s_nav,
            r.jerk_index,
            r.n_collisions,
            r.n_steps,
            r.path_length_mm,
            r.completion_fraction
        ));
    }
    std::fs::write(out, text)?;
    Ok(())
}

/// Two-panel SVG: top-down (x-z) and side (z-y) projections of the
/// centerline and the flown trajectory.
fn render_trajectory_svg(log: &TrajectoryLog, env: &TubeEnvironment) -> String {
    let n = 400;
    let centerline: Vec<[f64; 3]> = (0..=n)
        .map(|i| {
            let s = env.centerline.total_length() * i as f64 / n as f64;
            let p = env.centerline.point_at(s).expect("s in range");
            [p.x, p.y, p.z]
        })
        .collect();
    let trajectory: Vec<[f64; 3]> = log.steps.iter().map(|s| s.tip_position).collect();

    let panel = |proj: &dyn Fn(&[f64; 3]) -> (f64, f64), x0: f64, label: &str| {
        let pts: Vec<(f64, f64)> = centerline.iter().map(proj).collect();
        let traj: Vec<(f64, f64)> = trajectory.iter().map(proj).collect();
        let all: Vec<&(f64, f64)> = pts.iter().chain(traj.iter()).collect();
        let (mut min_x, mut max_x, mut min_y, mut max_y) =
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in all.iter() {
            min_x = min_x.min(*x);
            max_x = max_x.max(*x);
            min_y = min_y.min(*y);
            max_y = max_y.max(*y);
        }
        let span = (max_x - min_x).max(max_y - min_y).max(1.0);
        let scale = 360.0 / span;
        let map = |(x, y): (f64, f64)| {
            (
                x0 + 20.0 + (x - min_x) * scale,
                380.0 - (y - min_y) * scale,
            )
        };
        let polyline = |pts: &[(f64, f64)], color: &str, width: f64| {
            let coords: Vec<String> = pts
                .iter()
                .map(|p| {
                    let (x, y) = map(*p);
                    format!("{x:.1},{y:.1}")
                })
                .collect();
            format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{width}\" points=\"{}\"/>",
                coords.join(" ")
            )
        };
        format!(
            "<g>{}{}<text x=\"{}\" y=\"398\" font-size=\"12\" font-family=\"sans-serif\">{label}</text></g>",
            polyline(&pts, "#888888", 3.0),
            polyline(&traj, "#c0392b", 1.5),
            x0 + 20.0
        )
    };

    let top = panel(&|p: &[f64; 3]| (p[0], p[2]), 0.0, "top-down (x vs z)");
    let side = panel(&|p: &[f64; 3]| (p[2], p[1]), 420.0, "side (z vs y)");
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"410\" viewBox=\"0 0 840 410\">\
         <rect width=\"840\" height=\"410\" fill=\"white\"/>{top}{side}\
         <!-- config {} seed {} -->\
         </svg>",
        log.header.config_hash, log.header.seed
    )
}
