use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use peapod::commands;
use peapod::protocol::BellLabel;
use peapod::{Error, RunConfig};

#[derive(Parser)]
#[command(name = "peapod", version, about = "Peapod spin entanglement simulator")]
struct Cli {
    /// JSON run configuration; defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "PEAPOD_OUT_DIR")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels, transition table and physical estimates of one pair.
    Spectrum {
        /// Coupling override in MHz.
        #[arg(long, allow_negative_numbers = true)]
        j: Option<f64>,
    },
    /// Transition table of one pair.
    Transitions {
        #[arg(long, allow_negative_numbers = true)]
        j: Option<f64>,
    },
    /// Unwanted-flip probability against drive strength.
    Selectivity {
        #[arg(long, allow_negative_numbers = true)]
        j: Option<f64>,
    },
    /// Two-pair Bell protocol with analyzer readout.
    Bell {
        /// psi+, psi-, phi+ or phi-.
        #[arg(long)]
        force_outcome: Option<String>,
    },
    /// GHZ chain on n caged spins.
    Ghz {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        force_pe: Option<u8>,
    },
    /// Closed-form Bell fidelity surface over K1, K2.
    FidelityMap {
        /// Also compare against the simulated register.
        #[arg(long)]
        check: bool,
    },
    /// Protocol duration against T1 and T2.
    Budget,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::Json(_) | Error::UnknownSite(_) | Error::Layout(_) => 2,
        Error::Invariant(_) | Error::NotHermitian { .. } | Error::StepTooLarge { .. } => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> peapod::Result<commands::CommandOutput> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::from_path(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Command::Spectrum { j: Some(j) } | Command::Transitions { j: Some(j) } | Command::Selectivity { j: Some(j) } =
        &cli.command
    {
        config.coupling.j_mhz = Some(*j);
    }
    config.validate()?;
    let out = cli
        .out
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    match cli.command {
        Command::Spectrum { .. } => commands::cmd_spectrum(&config, &out),
        Command::Transitions { .. } => commands::cmd_transitions(&config, &out),
        Command::Selectivity { .. } => commands::cmd_selectivity(&config, &out),
        Command::Bell { force_outcome } => {
            let forced = force_outcome.map(|s| s.parse::<BellLabel>()).transpose()?;
            commands::cmd_bell(&config, forced, &out)
        }
        Command::Ghz { n, force_pe } => commands::cmd_ghz(&config, n, force_pe, &out),
        Command::FidelityMap { check } => commands::cmd_fidelity_map(&config, check, &out),
        Command::Budget => commands::cmd_budget(&config, &out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{}", out.summary);
            for a in &out.artifacts {
                println!("wrote {}", a.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
