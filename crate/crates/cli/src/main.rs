use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pingpong_cli::grid::RangeSpec;
use pingpong_cli::{
    emit, load_channel_spec, run_sweep, ChannelFamily, CliError, Grid, OutputFormat, SweepConfig,
};

/// Security figures of the ping-pong protocol over noisy channels.
#[derive(Debug, Parser)]
#[command(name = "pingpong", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the channel reliability and emit r, P_EC, QBER and QLOSS.
    Sweep(SweepArgs),
    /// Check that a channel-spec file describes a trace-preserving channel.
    ValidateChannel { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Builtin {
    Depolarizing,
    Identity,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Built-in channel family.
    #[arg(
        long,
        value_enum,
        default_value = "depolarizing",
        conflicts_with = "channel_spec"
    )]
    channel: Builtin,

    /// JSON channel spec `N`; the sweep uses r·id + (1-r)·N.
    #[arg(long, value_name = "FILE")]
    channel_spec: Option<PathBuf>,

    /// Reliability grid start:stop:count (default 0:1:101).
    #[arg(long, value_name = "START:STOP:COUNT", conflicts_with = "pec_grid")]
    r_grid: Option<RangeSpec>,

    /// Control-mode error grid start:stop:count (depolarizing only).
    #[arg(long, value_name = "START:STOP:COUNT")]
    pec_grid: Option<RangeSpec>,

    #[arg(long, value_enum, default_value = "csv")]
    format: Format,

    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let channel = match &args.channel_spec {
        Some(path) => ChannelFamily::Custom(load_channel_spec(path)?),
        None => match args.channel {
            Builtin::Depolarizing => ChannelFamily::Depolarizing,
            Builtin::Identity => ChannelFamily::Identity,
        },
    };
    let grid = match (args.r_grid, args.pec_grid) {
        (_, Some(p)) => Grid::ControlError(p.values()),
        (Some(r), None) => Grid::Reliability(r.values()),
        (None, None) => Grid::default(),
    };
    let cfg = SweepConfig {
        channel,
        grid,
        output_path: args.out,
        format: match args.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        },
    };
    let rows = run_sweep(&cfg)?;
    emit(&rows, &cfg)
}

fn validate_channel(file: PathBuf) -> Result<(), CliError> {
    let ch = load_channel_spec(&file)?;
    println!(
        "{}: valid {}-dimensional channel, {} Kraus operator(s), ||ΣK†K - I||_max = {:.3e}, unital: {}",
        file.display(),
        ch.dim(),
        ch.len(),
        ch.completeness_deviation(),
        ch.is_unital(pingpong_core::DEFAULT_TOL)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => sweep(args),
        Command::ValidateChannel { file } => validate_channel(file),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
