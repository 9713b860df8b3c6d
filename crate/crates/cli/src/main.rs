use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dbs_cli::commands::{self, DEFAULT_PNG_SCALE};
use dbs_cli::service::{self, DEFAULT_PORT};
use dbs_core::clustering::ClusterMode;
use dbs_core::data::FcpsName;
use dbs_core::pswarm::PswarmParams;

#[derive(Parser)]
#[command(name = "dbs", version, about = "Databionic swarm projection, topographic maps and clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated FCPS-style dataset as CSV.
    Generate {
        name: FcpsName,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Number of points; defaults to the dataset's usual size.
        #[arg(short, long)]
        n: Option<usize>,
    },
    /// Project a dataset or dissimilarity matrix CSV onto the toroidal grid.
    Project {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Grid cells per object.
        #[arg(long)]
        alpha: Option<usize>,
        /// Minimum aspect ratio lines/columns.
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Rerun a projection from its manifest and compare bytes.
    Reproduce {
        projection_dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cut the geodesic hierarchy of a projection into k clusters.
    Cluster {
        projection_dir: PathBuf,
        #[arg(short, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long, default_value = "connected")]
        mode: ClusterMode,
        /// Defaults to clusters.json in the projection directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the topographic map as JSON and PNG.
    Map {
        projection_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PNG_SCALE)]
        scale: usize,
    },
    /// Run a benchmark suite, resuming any previous results in the output directory.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Start the local HTTP service.
    Serve {
        #[arg(long, env = service::PORT_ENV, default_value_t = DEFAULT_PORT)]
        port: u16,
    },
}

fn run(cmd: Command) -> dbs_cli::Result<()> {
    match cmd {
        Command::Generate { name, seed, out, n } => {
            let n = commands::generate(name, seed, n, &out)?;
            println!("wrote {n} points to {}", out.display());
        }
        Command::Project {
            input,
            seed,
            out,
            alpha,
            beta,
        } => {
            let mut params = PswarmParams::default();
            params.alpha = alpha.unwrap_or(params.alpha);
            params.beta = beta.unwrap_or(params.beta);
            let m = commands::project(&input, seed, &params, &out)?;
            println!(
                "projected {} objects onto a {}x{} grid, wrote {}",
                m.input.n,
                m.grid.lines,
                m.grid.columns,
                out.display()
            );
        }
        Command::Reproduce { projection_dir, out } => {
            if commands::reproduce(&projection_dir, &out)? {
                println!("reproduced: projection.json is byte-identical");
            } else {
                return Err(dbs_cli::CliError::Artifact {
                    path: out.join("projection.json"),
                    message: "differs from the original projection".into(),
                });
            }
        }
        Command::Cluster {
            projection_dir,
            k,
            mode,
            out,
        } => {
            let r = commands::cluster(&projection_dir, k as usize, mode, out.as_deref())?;
            let acc = r.accuracy.map(|a| format!(" accuracy={a:.4}")).unwrap_or_default();
            println!(
                "k={} mode={} clusters={} volcano_outliers={}{acc}, wrote {}",
                r.result.k,
                r.result.mode,
                r.result.n_clusters(),
                r.result.outliers.len(),
                r.path.display()
            );
        }
        Command::Map { projection_dir, scale } => {
            let (json, png) = commands::map(&projection_dir, scale)?;
            println!("wrote {} and {}", json.display(), png.display());
        }
        Command::Bench { suite, trials, out } => {
            let o = commands::bench(&suite, trials, &out)?;
            println!("ran {} trials ({} recorded), wrote {}", o.executed, o.reports.len(), out.display());
            for row in &o.summary {
                println!(
                    "{:<12} {:<15} median error {:.3}",
                    row.dataset,
                    row.algorithm.as_str(),
                    row.median_error
                );
            }
        }
        Command::Serve { port } => {
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(service::serve(port))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dbs: error: {e}");
            ExitCode::FAILURE
        }
    }
}
