use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tlbounds::bounds::TheoremId;
use tlbounds::harness::output::load_config;
use tlbounds::harness::{run_command, Command, OutputFormat, Overrides};

#[derive(Parser)]
#[command(name = "tlbounds", version, about = "Exact evaluation of domain-adaptation and transfer bounds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// H∆H divergence, discrepancies and the key inequality for each domain pair
    Divergence(Common),
    /// Exact minimizers of the configured objectives and the ideal joint risks
    Erm(Common),
    /// Evaluate one bound on a single draw (or every class member for lemma1/4)
    Bound(Common),
    /// Empirical violation rate of a bound over repeated draws
    Verify(Common),
    /// Compare the two multi-source bounds on identical draws
    Compare(Common),
    /// Leave-one-out stability grid for hypothesis transfer
    Htl(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_parser = parse_theorem)]
    theorem: Option<TheoremId>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads; defaults to all cores
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_theorem(s: &str) -> Result<TheoremId, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Divergence(a) => (Command::Divergence, a),
        Cmd::Erm(a) => (Command::Erm, a),
        Cmd::Bound(a) => (Command::Bound, a),
        Cmd::Verify(a) => (Command::Verify, a),
        Cmd::Compare(a) => (Command::Compare, a),
        Cmd::Htl(a) => (Command::Htl, a),
    };
    let overrides = Overrides {
        theorem: args.theorem,
        trials: args.trials,
        delta: args.delta,
        seed: args.seed,
    };
    let format = args.format.map(|f| match f {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    });
    let result = load_config(&args.config)
        .and_then(|cfg| run_command(command, cfg, &overrides, args.workers))
        .and_then(|out| out.write(&args.output, format));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tlbounds: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
