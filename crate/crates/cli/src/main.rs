use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use darlington_cli::{
    cmd_check, cmd_eval, cmd_lift, cmd_realize1d, cmd_stable, cmd_verify, resolve_seed, CliError, Outcome, RunOptions,
    StableArgs,
};

#[derive(Parser)]
#[command(name = "darlington", version, about = "Darlington lifts of rational Nevanlinna functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Sampling {
    /// Sampling seed; 0 draws one from entropy. Defaults to $DARLINGTON_SEED or 0xDA71.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per checker.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Also sample near the boundary of the box.
    #[arg(long)]
    edges: bool,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

impl Sampling {
    fn options(&self) -> Result<RunOptions, CliError> {
        Ok(RunOptions { seed: resolve_seed(self.seed)?, samples: self.samples, edges: self.edges })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Lift f(z) to a Cayley inner g(z, z_{d+1}) with g(z, i) = f(z).
    Lift { input: PathBuf, output: PathBuf },
    /// Check g(z, i) = f(z), f Nevanlinna and g Cayley inner.
    Verify {
        f: PathBuf,
        g: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run a sampled class checker.
    Check {
        input: PathBuf,
        /// nevanlinna, cayley-inner, positive-real or positive-real-cayley-inner.
        #[arg(long, default_value = "nevanlinna")]
        class: String,
        /// Also probe numerator and denominator for a common factor.
        #[arg(long)]
        coprime: bool,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Stability falsifiers for a scalar polynomial p.
    Stable {
        input: PathBuf,
        /// Require real coefficients.
        #[arg(long)]
        real: bool,
        /// Check every member of the pencil αp + βq.
        #[arg(long, value_name = "Q")]
        pencil: Option<PathBuf>,
        /// Compare p + iq, p + z_{d+1}q and the pencil.
        #[arg(long, value_name = "Q")]
        lemma11: Option<PathBuf>,
        /// Test whether Im(p/q) keeps one sign.
        #[arg(long, value_name = "Q")]
        lemma12: Option<PathBuf>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Two-port realization of a scalar positive real function of one variable.
    Realize1d {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Evaluate at a point, e.g. --at "1+2i,0.5i".
    Eval {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), CliError> {
    Ok(match cli.command {
        Command::Lift { input, output } => (cmd_lift(&input, &output)?, None),
        Command::Verify { f, g, sampling } => (cmd_verify(&f, &g, &sampling.options()?)?, sampling.report),
        Command::Check { input, class, coprime, sampling } => {
            (cmd_check(&input, &class, coprime, &sampling.options()?)?, sampling.report)
        }
        Command::Stable { input, real, pencil, lemma11, lemma12, sampling } => {
            let args = StableArgs { real, pencil, lemma11, lemma12 };
            (cmd_stable(&input, &args, &sampling.options()?)?, sampling.report)
        }
        Command::Realize1d { input, out_dir } => (cmd_realize1d(&input, &out_dir)?, None),
        Command::Eval { input, at } => (cmd_eval(&input, &at)?, None),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, report_path)) => {
            print!("{}", outcome.stdout);
            if let (Some(path), Some(report)) = (report_path, &outcome.report) {
                if let Err(e) = report.write(&path) {
                    eprintln!("darlington: {e}");
                    return ExitCode::from(e.exit_code());
                }
            }
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("darlington: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
