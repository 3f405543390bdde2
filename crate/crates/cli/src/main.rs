//! `circtrack`: track detections, benchmark solvers, check graph dumps.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;
use std::process::ExitCode;

use circtrack::pipeline::{
    bench_network, benchmark, run_tracking, BenchConfig, InputFormat, SolverKind, TrackConfig,
};
use circtrack::{validate_network, CirculationNetwork, PipelineError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "circtrack", version, about = "Min-cost circulation tracker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Link detections into trajectories.
    Track(TrackArgs),
    /// Time solvers on synthetic tracking networks.
    Bench(BenchArgs),
    /// Check the structural invariants of a graph dump.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct TrackArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    format: Option<InputFormat>,
    #[arg(long)]
    solver: Option<SolverKind>,
    /// Number of cost-refinement iterations (at least 1).
    #[arg(long = "iters")]
    iterations: Option<usize>,
    /// `key = value` configuration file; command-line flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Disable arc fixing in the cost-scaling solver.
    #[arg(long)]
    no_arc_fixing: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_values_t = SolverKind::ALL.to_vec())]
    solvers: Vec<SolverKind>,
    /// Approximate detection counts.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1_000usize, 10_000])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the largest network as a graph dump instead of timing.
    #[arg(long)]
    dump: Option<PathBuf>,
}

fn track(args: TrackArgs) -> Result<(), PipelineError> {
    let mut config = match &args.config {
        Some(path) => TrackConfig::from_file(path)?,
        None => TrackConfig::default(),
    };
    if let Some(v) = args.input {
        config.input = Some(v);
    }
    if let Some(v) = args.format {
        config.format = v;
    }
    if let Some(v) = args.solver {
        config.solver = v;
    }
    if let Some(v) = args.iterations {
        config.iterations = v;
    }
    if let Some(v) = args.output {
        config.output = Some(v);
    }
    if let Some(v) = args.report {
        config.report = Some(v);
    }
    if args.no_arc_fixing {
        config.arc_fixing = false;
    }
    let (set, report) = run_tracking(&config)?;
    if config.output.is_none() {
        println!("{} trajectories, cost {}", set.len(), report.final_cost());
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), PipelineError> {
    let cfg = BenchConfig {
        solvers: args.solvers,
        sizes: args.sizes,
        seed: args.seed,
        ..BenchConfig::default()
    };
    if let Some(path) = args.dump {
        let size = cfg.sizes.iter().copied().max().unwrap_or(0);
        let net = bench_network(&cfg, size)?;
        let io = |source| PipelineError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = File::create(&path).map_err(io)?;
        net.write_dump(std::io::BufWriter::new(file)).map_err(io)?;
        return Ok(());
    }
    print!("{}", benchmark(&cfg)?);
    Ok(())
}

fn validate(input: PathBuf) -> ExitCode {
    let label = input.display().to_string();
    let net = File::open(&input)
        .map_err(|e| format!("{label}: {e}"))
        .and_then(|f| {
            CirculationNetwork::read_dump(BufReader::new(f)).map_err(|e| format!("{label}: {e}"))
        });
    match net {
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(net) => {
            let report = validate_network(&net);
            println!(
                "nodes = {}, arcs = {}, max_abs_cost = {}",
                net.node_count(),
                net.arc_count(),
                net.max_abs_cost()
            );
            print!("{report}");
            if report.is_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Track(args) => track(args),
        Command::Bench(args) => bench(args),
        Command::Validate { input } => return validate(input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
