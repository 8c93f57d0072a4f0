use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hodgepar::extcalc::{Corruption, Egl3Template};
use hodgepar::filphi::sample::random_scalar;
use hodgepar_cli::suite::{cmd_selfcheck, Depth, SuiteConfig};
use hodgepar_cli::{
    cmd_dims, cmd_inspect, cmd_kertd, cmd_sweep, load_module, parse_scalars, parse_shape, CliError, CliResult, Format,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Hodge parameters, extension dimensions and the kernel of the comparison
/// map for generic non-critical filtered φ-modules.
#[derive(Parser, Debug)]
#[command(name = "hodgepar", version, about)]
struct Cli {
    /// The prime p.
    #[arg(long, global = true, default_value_t = 5)]
    prime: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized oracles and generated samples.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genericity, admissibility, criticality and Hodge parameters of a module.
    Inspect {
        /// Module JSON file (`-` for standard input).
        path: String,
    },
    /// Dimension formulas and exact-sequence identities at (n, d_K).
    Dims {
        /// Rank.
        n: usize,
        /// Degree of K over Q_p.
        d_k: usize,
        /// Parabolic shape such as `2,1` (repeatable; default: all).
        #[arg(long = "shape")]
        shapes: Vec<String>,
    },
    /// The kernel of the comparison map for a module.
    Kertd {
        /// Module JSON file (`-` for standard input).
        path: String,
    },
    /// Hodge recovery sweep over the rank-3 family.
    Sweep {
        /// Eigenvalues of φ (three scalars; default 1, 2/p, 3/p²).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Option<Vec<String>>,
        /// Hodge–Tate weights h₁ > h₂ > h₃ (default 2,1,0).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Option<Vec<i64>>,
        /// Hodge parameters to sweep; when omitted, `--count` random ones.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        samples: Vec<String>,
        /// Number of random samples when `--samples` is omitted.
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Process samples concurrently (output order is unchanged).
        #[arg(long)]
        parallel: bool,
    },
    /// Runs the invariant suite.
    Selfcheck {
        /// Suite depth.
        #[arg(long, value_enum, default_value_t = Depth::Quick)]
        depth: Depth,
        /// Process sweep samples concurrently.
        #[arg(long)]
        parallel: bool,
        /// Damage the pairing (negative control).
        #[arg(long, value_enum, hide = true)]
        corrupt_surrogate: Option<CorruptArg>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CorruptArg {
    CollapseIminus,
    KillIplus,
}

fn run(cli: Cli) -> CliResult {
    if cli.prime < 2 || !(2..cli.prime).take_while(|k| k * k <= cli.prime).all(|k| cli.prime % k != 0) {
        return Err(CliError::input(format!("--prime {} is not a prime", cli.prime)));
    }
    match cli.command {
        Command::Inspect { path } => cmd_inspect(&load_module(&path)?),
        Command::Dims { n, d_k, shapes } => {
            let shapes = shapes.iter().map(|s| parse_shape(s)).collect::<Result<Vec<_>, _>>()?;
            cmd_dims(n, d_k, &shapes)
        }
        Command::Kertd { path } => cmd_kertd(&load_module(&path)?),
        Command::Sweep { alphas, weights, samples, count, parallel } => {
            let mut template = Egl3Template::standard(cli.prime);
            if let Some(a) = alphas {
                template.alphas = parse_scalars(&a)?;
            }
            if let Some(h) = weights {
                template.weights = h;
            }
            if template.alphas.len() != 3 || template.weights.len() != 3 {
                return Err(CliError::input("the sweep family has rank 3: give three eigenvalues and three weights"));
            }
            let samples = if samples.is_empty() {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                let mut out = Vec::new();
                while out.len() < count {
                    let a = random_scalar(&mut rng);
                    if !out.contains(&a) {
                        out.push(a);
                    }
                }
                out
            } else {
                parse_scalars(&samples)?
            };
            cmd_sweep(&template, &samples, parallel)
        }
        Command::Selfcheck { depth, parallel, corrupt_surrogate } => cmd_selfcheck(&SuiteConfig {
            depth,
            prime: cli.prime,
            seed: cli.seed,
            corruption: corrupt_surrogate.map(|c| match c {
                CorruptArg::CollapseIminus => Corruption::CollapseIminus,
                CorruptArg::KillIplus => Corruption::KillIplus,
            }),
            parallel,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { hodgepar_cli::EXIT_INPUT as u8 } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let mut out = std::io::stdout().lock();
            let mut body = report.render(format);
            if format == Format::Json {
                body.push('\n');
            }
            // A closed pipe (e.g. `| head`) is not an error of the computation.
            let _ = out.write_all(body.as_bytes()).and_then(|()| out.flush());
            ExitCode::from(report.code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
