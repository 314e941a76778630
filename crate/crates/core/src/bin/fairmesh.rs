use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairmesh::assignment::AssignmentFile;
use fairmesh::ga::{self, history_csv, Algorithm, FitnessKind, GaConfig, Instance};
use fairmesh::harness::{self, brute_force_optimum, records_to_csv, MetricsRecord, SweepConfig};
use fairmesh::ranking::{rank_links, score_nodes_weighted};
use fairmesh::topology::{build_conflict_graph, generate_topology, Topology};
use fairmesh::{Error, Result, ScenarioConfig};

#[derive(Parser, Debug)]
#[command(
    name = "fairmesh",
    version,
    about = "Channel assignment experiments for wireless mesh networks"
)]
struct Cli {
    /// Seed for topology generation (gen), the GA (assign) or every scenario (sweep).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config: a scenario for gen, a GA config for assign, a sweep for sweep.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Also write link-rank tables.
    #[arg(long, global = true)]
    dump_ranks: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random topology and write it to <out>/topology.json.
    Gen,
    /// Run one algorithm on one topology.
    Assign {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, default_value = "FA_SCGA")]
        algorithm: String,
    },
    /// Run a full scenario sweep.
    Sweep {
        /// Override the number of topologies per scenario.
        #[arg(long)]
        replicates: Option<usize>,
        /// Write wall_ms = 0 so the results CSV is byte-reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Recompute metrics for an assignment file.
    Eval {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long)]
        assignment: PathBuf,
    },
    /// Exhaustive optimum for a small topology.
    Oracle {
        #[arg(long)]
        topology: PathBuf,
        #[arg(long, value_enum, default_value_t = FitnessArg::Fairness)]
        fitness: FitnessArg,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FitnessArg {
    Fairness,
    Interference,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn ensure_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn execute(cli: Cli) -> Result<()> {
    ensure_dir(&cli.out)?;
    match cli.command {
        Command::Gen => {
            let cfg: ScenarioConfig = match &cli.config {
                Some(p) => read_json(p)?,
                None => ScenarioConfig::default(),
            };
            let seed = cli.seed.unwrap_or(cfg.master_seed);
            let topology = generate_topology(&cfg, seed)?;
            let path = cli.out.join("topology.json");
            topology.save(&path)?;
            if cli.dump_ranks {
                dump_ranks(&topology, &GaConfig::default(), &cli.out)?;
            }
            println!(
                "wrote {} ({} nodes, {} links)",
                path.display(),
                topology.node_count(),
                topology.link_count()
            );
        }
        Command::Assign {
            topology,
            algorithm,
        } => {
            let algorithm: Algorithm = algorithm.parse()?;
            let ga_cfg: GaConfig = match &cli.config {
                Some(p) => read_json(p)?,
                None => GaConfig::default(),
            };
            let topology = Topology::load(&topology)?;
            let conflicts = build_conflict_graph(&topology);
            let overlap = topology.params.overlap_matrix();
            let instance = Instance::new(&topology, &conflicts, &overlap, &topology.params.radio);
            let seed = cli.seed.unwrap_or(0);
            let started = std::time::Instant::now();
            let outcome = ga::run(algorithm, &instance, &ga_cfg, seed)?;
            let wall_ms = started.elapsed().as_millis() as u64;

            let file = AssignmentFile {
                algorithm: algorithm.name().to_string(),
                seed,
                assignment: outcome.best.assignment.clone(),
            };
            file.save(&cli.out.join("assignment.csv"))?;
            write(&cli.out.join("history.csv"), &history_csv(&outcome.history))?;
            if cli.dump_ranks {
                dump_ranks(&topology, &ga_cfg, &cli.out)?;
            }
            let record = MetricsRecord::compute(
                &topology.params.name,
                seed,
                algorithm.name(),
                &instance,
                &outcome.best.assignment,
                outcome.iterations,
                wall_ms,
            )?;
            print!("{}", records_to_csv(&[record])?);
        }
        Command::Sweep {
            replicates,
            no_timing,
        } => {
            let mut cfg: SweepConfig = match &cli.config {
                Some(p) => read_json(p)?,
                None => SweepConfig::reference(cli.seed.unwrap_or(0))?,
            };
            for s in &mut cfg.scenarios {
                if let Some(seed) = cli.seed {
                    s.master_seed = seed;
                }
                if let Some(r) = replicates {
                    s.topologies_per_scenario = r;
                }
            }
            cfg.record_timing &= !no_timing;
            cfg.dump_ranks |= cli.dump_ranks;
            let output = harness::run_sweep(&cfg, &cli.out)?;
            if output.radio_violations > 0 {
                log::warn!("{} radio-constraint violations", output.radio_violations);
            }
            println!(
                "{} rows written to {}",
                output.records.len(),
                cli.out.join("results.csv").display()
            );
        }
        Command::Eval {
            topology,
            assignment,
        } => {
            let record = harness::evaluate_file(&topology, &assignment)?;
            print!("{}", records_to_csv(&[record])?);
        }
        Command::Oracle { topology, fitness } => {
            let kind = match fitness {
                FitnessArg::Fairness => FitnessKind::Fairness,
                FitnessArg::Interference => FitnessKind::Interference,
            };
            let topology = Topology::load(&topology)?;
            let conflicts = build_conflict_graph(&topology);
            let overlap = topology.params.overlap_matrix();
            let instance = Instance::new(&topology, &conflicts, &overlap, &topology.params.radio);
            let result = brute_force_optimum(&instance, kind)?;
            let file = AssignmentFile {
                algorithm: "ORACLE".into(),
                seed: 0,
                assignment: result.assignment,
            };
            file.save(&cli.out.join("oracle_assignment.csv"))?;
            println!(
                "optimum fitness {} over {} feasible assignments",
                result.fitness, result.evaluated
            );
        }
    }
    Ok(())
}

fn dump_ranks(topology: &Topology, cfg: &GaConfig, out: &Path) -> Result<()> {
    let scores = score_nodes_weighted(topology, &cfg.weights)?;
    write(
        &out.join("ranks.csv"),
        &rank_links(topology, &scores).to_csv(topology),
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
