//! `blockade`: spectra, quenches, state preparation and spin-model envelopes
//! for fully blockaded ensembles of three-level atoms.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;

#[derive(Parser)]
#[command(name = "blockade", version, about)]
struct Cli {
    /// TOML run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct SystemArgs {
    /// Number of atoms.
    #[arg(short = 'n', long)]
    n: Option<usize>,
    /// Output file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Seed for randomized parameters.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Default)]
struct DriveArgs {
    #[arg(long, allow_hyphen_values = true)]
    omega1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    omega2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Phase of the first drive in radians.
    #[arg(long, allow_hyphen_values = true)]
    phase1: Option<f64>,
    /// Phase of the second drive in radians.
    #[arg(long, allow_hyphen_values = true)]
    phase2: Option<f64>,
    /// Draw the drive from the seeded generator.
    #[arg(long)]
    random_drive: bool,
}

#[derive(Args, Default)]
struct TimeArgs {
    /// Final time in units of 1/Omega.
    #[arg(long)]
    t_max: Option<f64>,
    /// Sampling step in units of 1/Omega.
    #[arg(long, conflicts_with = "samples")]
    dt: Option<f64>,
    /// Number of equally spaced samples including both ends.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Default)]
struct InitialArgs {
    /// Atoms initially in |0>.
    #[arg(long)]
    n0: Option<usize>,
    /// Atoms initially in |1>.
    #[arg(long)]
    n1: Option<usize>,
    /// Observable: n0, n1 or nr.
    #[arg(long)]
    observable: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of every sector with their multiplicities.
    Spectrum {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        drive: DriveArgs,
    },
    /// Time series of an occupation after a quench from a product state.
    Quench {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        drive: DriveArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        initial: InitialArgs,
        /// Detect the first revival and record it in the metadata file.
        #[arg(long)]
        revival: bool,
    },
    /// Pulse schedule preparing a symmetric state from |0...0>.
    Prepare {
        #[command(flatten)]
        system: SystemArgs,
        /// GHZ target.
        #[arg(long, conflicts_with_all = ["w", "target"])]
        ghz: bool,
        /// W target.
        #[arg(long, conflicts_with = "target")]
        w: bool,
        /// JSON list of Dicke amplitudes indexed by the number of atoms in |0>.
        #[arg(long)]
        target: Option<String>,
        /// Shorten rotations above pi by flipping the drive phase.
        #[arg(long)]
        shorten: bool,
    },
    /// Spin-model envelope (pm) or coupled spin-model dynamics (zero).
    Spinmodel {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        drive: DriveArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Brute-force reference runs in the full tensor space (small n).
    Oracle {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        drive: DriveArgs,
        #[command(flatten)]
        time: TimeArgs,
        #[command(flatten)]
        initial: InitialArgs,
        /// spectrum, quench or hamiltonian.
        #[arg(long)]
        mode: Option<String>,
    },
    /// First-revival time and strength over several atom numbers.
    RevivalScan {
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        drive: DriveArgs,
        /// all-one, all-zero or half-half.
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        t_max_per_sqrt_n: Option<f64>,
        #[arg(long)]
        jump_factor: Option<f64>,
        #[arg(long)]
        exclusion_time: Option<f64>,
    },
}

impl SystemArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.n = self.n;
        c.output = self.output.clone();
        c.seed = self.seed;
    }
}

impl DriveArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.drive.omega1 = self.omega1;
        c.drive.omega2 = self.omega2;
        c.drive.delta1 = self.delta1;
        c.drive.delta2 = self.delta2;
        c.drive.phase1 = self.phase1;
        c.drive.phase2 = self.phase2;
        c.drive.random = self.random_drive.then_some(true);
    }
}

impl TimeArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.time.t_max = self.t_max;
        c.time.dt = self.dt;
        c.time.samples = self.samples;
    }
}

impl InitialArgs {
    fn apply(&self, c: &mut RunConfig) {
        c.initial.n0 = self.n0;
        c.initial.n1 = self.n1;
        c.observable = self.observable.clone();
    }
}

fn flags(command: &Command) -> RunConfig {
    let mut c = RunConfig::default();
    match command {
        Command::Spectrum { system, drive } => {
            system.apply(&mut c);
            drive.apply(&mut c);
        }
        Command::Quench { system, drive, time, initial, revival } => {
            system.apply(&mut c);
            drive.apply(&mut c);
            time.apply(&mut c);
            initial.apply(&mut c);
            c.revival = revival.then_some(true);
        }
        Command::Prepare { system, ghz, w, target, shorten } => {
            system.apply(&mut c);
            c.prepare.target = if *ghz {
                Some("ghz".into())
            } else if *w {
                Some("w".into())
            } else {
                target.clone()
            };
            c.prepare.shorten = shorten.then_some(true);
        }
        Command::Spinmodel { system, drive, time, variant } => {
            system.apply(&mut c);
            drive.apply(&mut c);
            time.apply(&mut c);
            c.variant = variant.clone();
        }
        Command::Oracle { system, drive, time, initial, mode } => {
            system.apply(&mut c);
            drive.apply(&mut c);
            time.apply(&mut c);
            initial.apply(&mut c);
            c.mode = mode.clone();
        }
        Command::RevivalScan { system, drive, family, n_list, t_max_per_sqrt_n, jump_factor, exclusion_time } => {
            system.apply(&mut c);
            drive.apply(&mut c);
            c.scan.family = family.clone();
            c.scan.n_list = n_list.clone();
            c.scan.t_max_per_sqrt_n = *t_max_per_sqrt_n;
            c.scan.jump_factor = *jump_factor;
            c.scan.exclusion_time = *exclusion_time;
        }
    }
    c
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let base = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = base.overlay(&flags(&cli.command));
    match &cli.command {
        Command::Spectrum { .. } => commands::spectrum(&cfg),
        Command::Quench { .. } => commands::quench(&cfg),
        Command::Prepare { .. } => commands::prepare(&cfg),
        Command::Spinmodel { .. } => commands::spinmodel(&cfg),
        Command::Oracle { .. } => commands::oracle(&cfg),
        Command::RevivalScan { .. } => commands::revival_scan_cmd(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
