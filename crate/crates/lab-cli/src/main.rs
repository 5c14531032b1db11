use clap::{Parser, Subcommand};
use lab_cli::commands::{self, NormKind, OmegaKind};
use lab_cli::output::{to_json, Sink};
use lab_cli::{ExperimentConfig, Format, LabError};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "qnslab", version, about = "Numerical lab for Q-type spaces and fractional Navier-Stokes")]
struct Cli {
    /// Experiment configuration (sectioned key = value).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suite name, criterion number or `all`; overrides suite.name.
    #[arg(long, global = true)]
    suite: Option<String>,
    /// Family seed; overrides family.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true, env = "QNSLAB_THREADS")]
    threads: Option<usize>,
    /// Output formats; overrides output.formats.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write the configured test family as QNSF files.
    Gen,
    /// Evaluate a norm of a QNSF field.
    Norm {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "q")]
        which: NormKind,
    },
    /// Run Picard iteration on the configured data.
    Solve,
    /// Run verification suites.
    Verify,
    /// Atomic decomposition of the heat-gradient extension of a QNSF field.
    Decompose {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "maximal")]
        omega: OmegaKind,
        /// Localize to a cone of this radius around the torus center.
        #[arg(long)]
        width: Option<f64>,
    },
    /// Hausdorff capacity bounds of a set: `all`, `cube:LEVEL:i,j` or `ball:x,y:r`, joined by `;`.
    Capacity {
        setspec: String,
        /// Capacity dimension; defaults to the one set by alpha and beta.
        #[arg(long)]
        dim: Option<f64>,
    },
    /// Re-render CSV and SVG from the JSON in the output directory.
    Report,
}

fn run(cli: Cli) -> lab_cli::Result<bool> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(o) = cli.out {
        cfg.output.dir = Some(o);
    }
    if let Some(s) = cli.suite {
        cfg.suite.name = s;
    }
    if let Some(s) = cli.seed {
        cfg.family.seed = s;
    }
    if !cli.format.is_empty() {
        cfg.output.formats = cli.format;
    }
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| LabError::Usage(format!("thread pool: {e}")))?;
    }
    let sink = Sink { dir: cfg.output.dir.clone(), formats: cfg.output.formats.clone() };
    match cli.cmd {
        Cmd::Gen => {
            let m = commands::gen(&cfg, &sink)?;
            println!("wrote {} fields", m.fields.len());
        }
        Cmd::Norm { file, which } => print!("{}", to_json(&commands::norm(&file, which, &cfg, &sink)?)?),
        Cmd::Solve => {
            let m = commands::solve(&cfg, &sink)?;
            println!("{}", m.regime);
            for r in &m.regime_reasons {
                println!("  {r}");
            }
            println!("iterations {} converged {}", m.iterations, m.converged);
        }
        Cmd::Verify => return Ok(commands::verify(&cfg, &sink)?.pass),
        Cmd::Decompose { file, omega, width } => {
            let d = commands::decompose(&file, omega, width, &cfg, &sink)?;
            println!("atoms {} l1 {:e} residual {:e} disjoint {}", d.atoms.len(), d.l1, d.residual, d.disjoint);
        }
        Cmd::Capacity { setspec, dim } => print!("{}", to_json(&commands::capacity(&setspec, dim, &cfg, &sink)?)?),
        Cmd::Report => {
            let dir = cfg.output.dir.clone().ok_or_else(|| LabError::Usage("report needs --out or output.dir".into()))?;
            for p in commands::report(&dir, &cfg.output.formats)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
