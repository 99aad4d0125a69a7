//! `qas` — run circuit-search experiments, count network parameters,
//! aggregate seeds and replay logged circuits.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qas_core::harness::{
    aggregate_files, parse_gate_list, read_summary, replay, resolve_path, run_experiment, Problem,
    ReplayTarget, RunConfig,
};
use qas_core::nets::{kan_param_count, mlp_param_count};
use qas_core::qsim::NoiseSpec;

#[derive(Parser)]
#[command(name = "qas", version, about = "Quantum architecture search engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded experiment from a JSON config.
    Run(RunArgs),
    /// Print the trainable-parameter count of a network spec.
    CountParams(CountParamsArgs),
    /// Merge several summary.json files into per-interval mean/min/max.
    Aggregate(AggregateArgs),
    /// Re-simulate a logged circuit and print its metrics.
    Replay(ReplayArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
    /// Override the config's episode count (must stay divisible by intervals).
    #[arg(long)]
    episodes: Option<u64>,
}

#[derive(Args)]
struct CountParamsArgs {
    /// `kan` or `mlp`.
    #[arg(long)]
    kind: String,
    /// Comma-separated layer sizes, e.g. `84,2,12`.
    #[arg(long)]
    shape: String,
    /// Spline segment count G (KAN only).
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Spline order k (KAN only).
    #[arg(long, default_value_t = 3)]
    spline_order: usize,
}

#[derive(Args)]
struct AggregateArgs {
    /// summary.json files, one per seed.
    #[arg(required = true)]
    summaries: Vec<PathBuf>,
    /// Also write the aggregate as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReplayArgs {
    /// Take the best circuit from a run's summary.json.
    #[arg(long, conflicts_with = "gates")]
    summary: Option<PathBuf>,
    /// Inline `;`-separated gate list, e.g. `"H(0); CX(0,1)"`.
    #[arg(long, requires = "qubits")]
    gates: Option<String>,
    /// Register size for `--gates`.
    #[arg(long)]
    qubits: Option<usize>,
    /// Noisy replay: `p_x,p_dep`.
    #[arg(long)]
    noise: Option<String>,
    /// `bell`, `ghz`, or a Hamiltonian file path. Defaults from the summary
    /// when replaying one.
    #[arg(long)]
    target: Option<String>,
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::CountParams(args) => cmd_count_params(args),
        Command::Aggregate(args) => cmd_aggregate(args),
        Command::Replay(args) => cmd_replay(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = RunConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(dir) = args.output_dir {
        config.output_dir = Some(dir);
    }
    if let Some(episodes) = args.episodes {
        config.num_episodes = episodes;
    }
    if config.output_dir.is_none() {
        bail!("no output directory: set output_dir in the config or pass --output-dir");
    }
    let base = args.config.parent().map(PathBuf::from);
    let summary = run_experiment(&config, base.as_deref())?.summary;
    println!(
        "run complete: {} episodes, {} admissible ({} optimal), mean {:.4}s/episode",
        config.num_episodes,
        summary.total_admissible,
        summary.total_optimal,
        summary.mean_seconds_per_episode
    );
    for iv in &summary.intervals {
        println!(
            "interval {}: {}/{} admissible (p = {:.4}), {} optimal",
            iv.interval, iv.successes, iv.episodes, iv.success_probability, iv.optimal_successes
        );
    }
    if let Some(best) = &summary.best {
        println!("best circuit (episode {}): {} -> {}", best.episode, best.gates.join(" "), best.value);
    }
    Ok(())
}

fn cmd_count_params(args: CountParamsArgs) -> Result<()> {
    let shape: Vec<usize> = args
        .shape
        .split(',')
        .map(|t| t.trim().parse::<usize>().context("shape entries must be positive integers"))
        .collect::<Result<_>>()?;
    if shape.len() < 2 || shape.contains(&0) {
        bail!("shape must list at least two positive layer sizes");
    }
    let count = match args.kind.to_ascii_lowercase().as_str() {
        "kan" => {
            if args.grid == 0 || args.spline_order == 0 {
                bail!("grid and spline order must be positive");
            }
            kan_param_count(&shape, args.grid, args.spline_order)
        }
        "mlp" => mlp_param_count(&shape),
        other => bail!("unknown network kind `{other}` (use kan or mlp)"),
    };
    println!("{count}");
    Ok(())
}

fn cmd_aggregate(args: AggregateArgs) -> Result<()> {
    let aggregate = aggregate_files(&args.summaries)?;
    print!("{aggregate}");
    if let Some(out) = args.out {
        std::fs::write(&out, serde_json::to_string_pretty(&aggregate)?)
            .with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

fn cmd_replay(args: ReplayArgs) -> Result<()> {
    let noise = args
        .noise
        .as_deref()
        .map(|text| -> Result<NoiseSpec> {
            let (px, pdep) = text
                .split_once(',')
                .context("--noise expects `p_x,p_dep`")?;
            Ok(NoiseSpec::new(px.trim().parse()?, pdep.trim().parse()?)?)
        })
        .transpose()?;

    let (gates, qubits, default_target) = if let Some(path) = &args.summary {
        let summary = read_summary(path)?;
        let best = summary
            .best
            .as_ref()
            .context("summary has no best circuit to replay")?;
        let gates = parse_gate_list(&best.gates.join(";"))?;
        let qubits = summary.problem.num_qubits();
        let target = match summary.problem {
            Problem::Bell => Some(ReplayTarget::Bell),
            Problem::Ghz => Some(ReplayTarget::Ghz),
            Problem::Chem => summary.config.chem.as_ref().map(|c| {
                let base = path.parent();
                ReplayTarget::Hamiltonian(resolve_path(&c.hamiltonian_path, base))
            }),
        };
        (gates, qubits, target)
    } else if let (Some(text), Some(qubits)) = (&args.gates, args.qubits) {
        (parse_gate_list(text)?, qubits, None)
    } else {
        bail!("pass either --summary FILE or --gates LIST --qubits N");
    };

    let target = match args.target.as_deref() {
        Some("bell") => ReplayTarget::Bell,
        Some("ghz") => ReplayTarget::Ghz,
        Some(path) => ReplayTarget::Hamiltonian(PathBuf::from(path)),
        None => default_target.context("no target: pass --target bell|ghz|<hamiltonian file>")?,
    };

    let report = replay(gates, qubits, noise, target)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
