use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use surfdist_cli::commands::{
    cmd_oracle, cmd_perturb, cmd_sample, cmd_solve, cmd_verify, parse_overrides, Format, Sink,
    EXIT_INPUT,
};

/// Minimal distance between an ellipsoidal surface and a non-convex quartic
/// surface, solved by canonical duality with a global-optimality certificate.
#[derive(Parser)]
#[command(name = "surfdist", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the instance JSON file.
    #[arg(long)]
    instance: PathBuf,
    /// Configuration override, repeatable (e.g. --config grad_tol=1e-12).
    #[arg(long = "config", value_name = "KEY=VALUE")]
    config: Vec<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format (default: json, except `sample` which defaults to csv).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Seed for the randomized direction fallback (n > 3).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance and report the optimality certificate.
    Solve(CommonArgs),
    /// Solve, then cross-check the certificate against independent checks.
    Verify(CommonArgs),
    /// Solve a schedule of linearly perturbed instances (f + e/k).
    Perturb {
        #[command(flatten)]
        common: CommonArgs,
        /// Perturbation direction e as comma-separated numbers
        /// (default: unit vector along the last coordinate).
        #[arg(long)]
        direction: Option<String>,
        /// Perturbation divisors k as comma-separated numbers
        /// (default: 64,1000,10000,100000).
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Brute-force the minimal distance over direction grids.
    Oracle(CommonArgs),
    /// Export point clouds of both surfaces for plotting.
    Sample(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => with_common(&args, Format::Json, |cfg, fmt, sink| {
            cmd_solve(&args.instance, cfg, fmt, sink)
        }),
        Command::Verify(args) => with_common(&args, Format::Json, |cfg, fmt, sink| {
            cmd_verify(&args.instance, cfg, fmt, sink)
        }),
        Command::Perturb { ref common, ref direction, ref schedule } => {
            with_common(common, Format::Json, |cfg, fmt, sink| {
                cmd_perturb(&common.instance, cfg, direction.as_deref(), schedule.as_deref(), fmt, sink)
            })
        }
        Command::Oracle(args) => with_common(&args, Format::Json, |cfg, fmt, sink| {
            cmd_oracle(&args.instance, cfg, args.seed, fmt, sink)
        }),
        Command::Sample(args) => with_common(&args, Format::Csv, |cfg, fmt, sink| {
            cmd_sample(&args.instance, cfg, args.seed, fmt, sink)
        }),
    };
    ExitCode::from(code)
}

fn with_common(
    args: &CommonArgs,
    default_format: Format,
    run: impl FnOnce(&surfdist_cli::commands::RunConfig, Format, &Sink) -> u8,
) -> u8 {
    let cfg = match parse_overrides(&args.config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let format = args.format.map(Format::from).unwrap_or(default_format);
    let sink = Sink::new(args.out.clone());
    run(&cfg, format, &sink)
}
