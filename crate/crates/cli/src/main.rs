use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use dimred_cli::cache::CACHE_ENV;
use dimred_cli::config::parse_list;
use dimred_cli::report::OutFormat;
use dimred_cli::{run, Command, JobSpec, EXIT_CONFIG};

#[derive(Parser, Debug)]
#[command(
    name = "dimred",
    version,
    about = "Exact computations for preprojective algebras of quivers"
)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Quiver configuration (TOML).
    #[arg(long)]
    quiver: Option<PathBuf>,
    /// Height bound on dimension vectors.
    #[arg(long)]
    bound: Option<u32>,
    /// Primes for finite-field counts, e.g. `2,3,5`.
    #[arg(long)]
    primes: Option<String>,
    /// Dimension vector, e.g. `1,1`.
    #[arg(long)]
    gamma: Option<String>,
    /// Field size for `count`.
    #[arg(long)]
    q: Option<u64>,
    /// Central charge `re1,im1;re2,im2;...`; give twice for a stability check.
    #[arg(long, allow_hyphen_values = true)]
    charge: Vec<String>,
    /// Also count seminilpotent points (`count`).
    #[arg(long)]
    seminilpotent: bool,
    #[arg(long, value_enum, default_value = "text")]
    out: OutFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cache directory (also read from DIMRED_CACHE).
    #[arg(long)]
    cache: Option<PathBuf>,
}

fn job(cli: &Cli) -> Result<JobSpec, dimred_cli::CliError> {
    Ok(JobSpec {
        command: cli.command,
        quiver: cli.quiver.clone(),
        bound: cli.bound,
        primes: cli
            .primes
            .as_deref()
            .map(parse_list)
            .transpose()?
            .unwrap_or_default(),
        gamma: cli.gamma.as_deref().map(parse_list).transpose()?,
        q: cli.q,
        charges: cli.charge.clone(),
        seminilpotent: cli.seminilpotent,
        format: cli.out,
        cache: cli
            .cache
            .clone()
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)),
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = job(&cli).and_then(|j| run(&j));
    match result {
        Ok(outcome) => {
            let text = outcome.report.render(cli.out);
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(EXIT_CONFIG as u8);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(outcome.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
