use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nearfocus::radiator::FocusStrategy;
use nearfocus_cli::commands::{self, Report};
use nearfocus_cli::config::RunConfig;
use nearfocus_cli::error::CliResult;
use nearfocus_cli::seed;

const DEFAULTS: &str = "\
Config defaults:
  frequency                 6e9 Hz
  spacing                   half a wavelength
  output_dir                current directory (overridden by --out)
  *.strategy                ex
  fieldmap.normalize        true (peak within 2 wavelengths of the focus = 1)
  fieldmap.ground.rx_height same as tx_height
  fieldmap.ground.polarization   horizontal
  fieldmap.ground.grazing_angle  element_ratio
  profile.span / step       2 / 0.01 wavelengths
  converge.n_min / n_step   1 / 1
  converge.threshold_fraction    0.9
  axial_ratio.n_min / n_step     1 / 1

Lengths are metres, or {\"wavelengths\": x}. See config.schema.json.

Exit status: 0 success, 2 invalid config, 3 numerical tolerance not met, 1 other.";

#[derive(Parser)]
#[command(name = "nearfocus", version, about = "Near-field focusing of linear dipole arrays", after_help = DEFAULTS)]
struct Cli {
    /// Write one config per standard plot, plus commands.txt, into DIR and exit.
    #[arg(long, value_name = "DIR", exclusive = true)]
    seed_figures: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long, short)]
    config: PathBuf,

    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Ex,
    Ez,
}

#[derive(Subcommand)]
enum Command {
    /// Conjugate element phases (phases.csv). Uses the `phases` block.
    Phases {
        #[command(flatten)]
        common: Common,
        /// Override `phases.strategy`.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
    },
    /// Field over a 2-D grid (fieldmap.csv + fieldmap.json). Uses the `fieldmap` block.
    Fieldmap {
        #[command(flatten)]
        common: Common,
        /// Add the ground reflection described by `fieldmap.ground`.
        #[arg(long)]
        ground: bool,
    },
    /// Width and depth cuts through the focus with closed-form overlay. Uses `profile`.
    Profile {
        #[command(flatten)]
        common: Common,
    },
    /// Focal peak against element count and threshold counts. Uses `converge`.
    Converge {
        #[command(flatten)]
        common: Common,
    },
    /// Axial ratio against element count and the minimum count for CP. Uses `axial_ratio`.
    AxialRatio {
        #[command(flatten)]
        common: Common,
    },
    /// Mutual impedance of two half-wave dipoles against separation. Uses `coupling`.
    Coupling {
        #[command(flatten)]
        common: Common,
    },
}

fn execute(common: &Common, f: impl FnOnce(&RunConfig) -> CliResult<Report>) -> CliResult<()> {
    let cfg = RunConfig::from_path(&common.config)?;
    let report = f(&cfg)?;
    let dir = common.out.clone().unwrap_or_else(|| cfg.output_dir());
    let written = report.outputs.commit(&dir)?;
    // a closed pipe on stdout is not a failure: the files are already in place
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", report.summary.trim_end());
    for p in written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(dir) = cli.seed_figures {
        let written = seed::render()?.commit(&dir)?;
        println!("wrote {} files to {}", written.len(), dir.display());
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(nearfocus_cli::error::CliError::config(
            "<command>",
            "no subcommand given; see --help",
        ));
    };
    match command {
        Command::Phases { common, strategy } => {
            let strategy = strategy.map(|s| match s {
                StrategyArg::Ex => FocusStrategy::Ex,
                StrategyArg::Ez => FocusStrategy::Ez,
            });
            execute(&common, |c| commands::phases(c, strategy))
        }
        Command::Fieldmap { common, ground } => execute(&common, |c| commands::fieldmap(c, ground)),
        Command::Profile { common } => execute(&common, commands::profile),
        Command::Converge { common } => execute(&common, commands::converge),
        Command::AxialRatio { common } => execute(&common, commands::axial_ratio),
        Command::Coupling { common } => execute(&common, commands::coupling),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
