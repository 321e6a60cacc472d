use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attnrat::report::{self, Context, Outcome};
use attnrat::{Error, Result};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "attnrat", version, about = "Exact lowering of attention layers to rational functions on the Boolean cube")]
struct Cli {
    /// Largest n checked exhaustively.
    #[arg(long, global = true, default_value_t = 20)]
    cap: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 10_000)]
    trials: u64,
    /// Grid size for approximation certificates.
    #[arg(long, global = true, default_value_t = 100_000)]
    grid: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a layer with rational post-processing to P~/Q~.
    Compile {
        spec: PathBuf,
        /// Accept a non-constant denominator above the cap without checking it.
        #[arg(long)]
        assume_nonvanishing: bool,
    },
    /// Compare a layer with its compiled form on every input.
    Verify {
        spec: PathBuf,
        /// Previously compiled output to check instead of compiling afresh.
        #[arg(long)]
        compiled: Option<PathBuf>,
    },
    /// Check whether a layer sign-represents parity, or run a randomized campaign.
    ParityCheck {
        spec: Option<PathBuf>,
        #[arg(long)]
        campaign: bool,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_d: usize,
    },
    /// Average sensitivity and parity correlation.
    Sensitivity {
        spec: Option<PathBuf>,
        #[arg(long)]
        parity: Option<usize>,
        #[arg(long)]
        tau: Option<String>,
    },
    /// Rational approximation of a ReLU network.
    ApproxRelu {
        net: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 128)]
        k_cap: usize,
    },
    /// Margin pipeline for a layer with ReLU post-processing.
    Theorem2 {
        spec: PathBuf,
        #[arg(long)]
        tau: Option<String>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long, default_value_t = 128)]
        k_cap: usize,
    },
    /// Parameter sweep from a JSON config, written as CSV.
    Sweep { config: PathBuf },
    /// Emit a built-in layer or network as JSON.
    MakeFixture {
        kind: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        h: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let ctx = Context {
        cap: cli.cap,
        seed: cli.seed,
        trials: cli.trials,
        grid: cli.grid,
    };
    match &cli.command {
        Command::Compile { spec, assume_nonvanishing } => {
            report::compile_command(&read(spec)?, &ctx, *assume_nonvanishing)
        }
        Command::Verify { spec, compiled } => {
            let compiled = compiled.as_deref().map(read).transpose()?;
            report::verify_command(&read(spec)?, compiled.as_deref(), &ctx)
        }
        Command::ParityCheck { spec, campaign, n, max_d } => match (spec, campaign, n) {
            (None, true, Some(n)) => report::campaign_command(*n, *max_d, &ctx),
            (Some(spec), false, None) => report::parity_check_command(&read(spec)?, &ctx),
            _ => Err(Error::InvalidParameter(
                "use either `parity-check SPEC` or `parity-check --campaign --n N`".into(),
            )),
        },
        Command::Sensitivity { spec, parity, tau } => {
            let text = spec.as_deref().map(read).transpose()?;
            report::sensitivity_command(text.as_deref(), *parity, tau.as_deref(), &ctx)
        }
        Command::ApproxRelu { net, epsilon, k_cap } => {
            report::approx_relu_command(&read(net)?, epsilon, *k_cap, &ctx)
        }
        Command::Theorem2 { spec, tau, gamma, k_cap } => {
            report::theorem2_command(&read(spec)?, tau.as_deref(), gamma.as_deref(), *k_cap, &ctx)
        }
        Command::Sweep { config } => report::sweep_command(&read(config)?, &ctx),
        Command::MakeFixture { kind, n, h } => report::make_fixture_command(kind, *n, *h),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = dispatch(&cli).and_then(|outcome| {
        match &cli.out {
            Some(path) => std::fs::write(path, &outcome.text)?,
            None => print!("{}", outcome.text),
        }
        Ok(outcome.status)
    });
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
