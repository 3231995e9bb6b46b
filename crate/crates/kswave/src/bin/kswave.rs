//! Command-line driver: flag parsing and exit-code mapping only; all real
//! work lives in the library's `cli` module.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use kswave::cli::{self, CliError, CommandReport, FileConfig, SweepSpec};

#[derive(Parser)]
#[command(
    name = "kswave",
    version,
    about = "Traveling-wave laboratory for a chemotaxis-growth model",
    long_about = "Computes minimum wave speeds, shoots heteroclinic orbits, certifies \
                  trap regions and crossing surfaces, and runs the reaction-diffusion \
                  solver. Exit codes: 0 success, 2 configuration error, 3 failed \
                  certification, 4 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every single-run command. Values given here override
/// the JSON config file field by field.
#[derive(Args, Default)]
struct CommonArgs {
    /// JSON config file providing defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Logistic growth rate.
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Chemical production rate.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Chemical diffusivity.
    #[arg(long = "D", allow_negative_numbers = true)]
    diff: Option<f64>,
    /// Sensitivity: const:<k>, affine:<a>,<b>, or table:<path>.
    #[arg(long)]
    chi: Option<String>,
    /// Output root for run directories (default: $KSWAVE_OUT or runs/).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    /// Layers defaults, the config file, then these flags.
    fn resolve(&self, extra: FileConfig) -> Result<FileConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::from_file(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            mu: self.mu,
            beta: self.beta,
            diff: self.diff,
            chi: self.chi.clone(),
            out: self.out.clone(),
            ..FileConfig::default()
        };
        Ok(file.merge(flags).merge(extra))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form minimum wave speed and general bounds.
    Speed {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Shoot one orbit at speed c and classify it; extract the profile if
    /// it converges.
    Shoot {
        #[command(flatten)]
        common: CommonArgs,
        /// Wave speed (default: closed-form minimum + 0.5).
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
    },
    /// Bisect the empirical existence threshold and compare with the
    /// closed form.
    Minspeed {
        #[command(flatten)]
        common: CommonArgs,
        /// Bisection tolerance on the speed (default 1e-3).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Certify the trap region's boundary faces by sampled inward flux.
    Trapcheck {
        #[command(flatten)]
        common: CommonArgs,
        /// Wave speed (default: closed-form minimum).
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// Minimum number of face samples (default 10000).
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Verify the one-way crossing surface W = eta U.
    Surface {
        #[command(flatten)]
        common: CommonArgs,
        /// Wave speed (default: closed-form minimum).
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        /// Slope preset (half, five-eighths) or a number (default half).
        #[arg(long)]
        eta: Option<String>,
    },
    /// Run the reaction-diffusion solver in the lab or co-moving frame.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Frame speed for co-moving runs; also seeds the wave profile.
        #[arg(long)]
        c: Option<f64>,
        /// Domain length (lab frame; default 300).
        #[arg(long)]
        length: Option<f64>,
        /// Number of grid cells.
        #[arg(long)]
        cells: Option<usize>,
        /// Simulation horizon (default 60 lab, 10 co-moving).
        #[arg(long = "t-end")]
        t_end: Option<f64>,
        /// Solve in the frame moving at c, seeded with the shot profile.
        #[arg(long)]
        comoving: bool,
        /// Initial front location (lab frame; default length / 15).
        #[arg(long = "front-x")]
        front_x: Option<f64>,
    },
    /// Sweep the parameter cross product and tabulate threshold errors.
    Sweep {
        /// JSON sweep spec; inline axis flags override its fields.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// mu axis (comma-separated).
        #[arg(long, value_delimiter = ',')]
        mu: Vec<f64>,
        /// beta axis (comma-separated).
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
        /// D axis (comma-separated; default 0).
        #[arg(long = "D", value_delimiter = ',')]
        diff: Vec<f64>,
        /// Sensitivity axis; repeat the flag for each entry.
        #[arg(long)]
        chi: Vec<String>,
        /// Bisection tolerance (default 1e-3).
        #[arg(long)]
        tol: Option<f64>,
        /// Cell-count ceiling (default 10000).
        #[arg(long)]
        cap: Option<usize>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        threads: Option<usize>,
        /// Output root for the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(command: Command) -> Result<(CommandReport, bool), CliError> {
    match command {
        Command::Speed { common } => {
            let cfg = common.resolve(FileConfig::default())?;
            Ok((cli::cmd_speed(&cfg)?, true))
        }
        Command::Shoot { common, c } => {
            let cfg = common.resolve(FileConfig { c, ..FileConfig::default() })?;
            Ok((cli::cmd_shoot(&cfg)?, false))
        }
        Command::Minspeed { common, tol } => {
            let cfg = common.resolve(FileConfig { tol, ..FileConfig::default() })?;
            Ok((cli::cmd_minspeed(&cfg)?, false))
        }
        Command::Trapcheck { common, c, samples } => {
            let cfg = common.resolve(FileConfig { c, samples, ..FileConfig::default() })?;
            Ok((cli::cmd_trapcheck(&cfg)?, false))
        }
        Command::Surface { common, c, eta } => {
            let cfg = common.resolve(FileConfig { c, eta, ..FileConfig::default() })?;
            Ok((cli::cmd_surface(&cfg)?, false))
        }
        Command::Simulate { common, c, length, cells, t_end, comoving, front_x } => {
            let extra = FileConfig {
                c,
                length,
                cells,
                t_end,
                comoving: if comoving { Some(true) } else { None },
                front_x,
                ..FileConfig::default()
            };
            let cfg = common.resolve(extra)?;
            Ok((cli::cmd_simulate(&cfg)?, false))
        }
        Command::Sweep { spec, mu, beta, diff, chi, tol, cap, threads, out } => {
            let mut s = match &spec {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| {
                        CliError::Config(format!("cannot read {}: {e}", path.display()))
                    })?;
                    serde_json::from_str::<SweepSpec>(&text).map_err(|e| {
                        CliError::Config(format!("bad sweep spec {}: {e}", path.display()))
                    })?
                }
                None => SweepSpec {
                    mu: vec![],
                    beta: vec![],
                    diff: vec![0.0],
                    chi: vec![],
                    tol: 1e-3,
                    cap: 10_000,
                    threads: 0,
                },
            };
            if !mu.is_empty() {
                s.mu = mu;
            }
            if !beta.is_empty() {
                s.beta = beta;
            }
            if !diff.is_empty() {
                s.diff = diff;
            }
            if !chi.is_empty() {
                s.chi = chi;
            }
            if let Some(t) = tol {
                s.tol = t;
            }
            if let Some(c) = cap {
                s.cap = c;
            }
            if let Some(t) = threads {
                s.threads = t;
            }
            let root = FileConfig { out, ..FileConfig::default() }.out_root();
            Ok((cli::cmd_sweep(&s, &root)?, false))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((report, print_json)) => {
            println!("{}", report.summary);
            if print_json {
                println!("{}", report.json);
            }
            println!("run directory: {}", report.run_dir.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
