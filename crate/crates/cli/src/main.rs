mod commands;
mod fail;
mod input;
mod manifest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fail::Failure;
use std::path::PathBuf;
use std::process::ExitCode;

/// Homological classification of symplectic configurations: enumerate
/// assignments, eliminate them by area, transform and compare types.
#[derive(Parser, Debug)]
#[command(name = "sympconfig", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Configuration JSON, optionally with a `vectors` list.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Use a built-in scenario instead of --config.
    #[arg(long, global = true)]
    scenario: Option<String>,
    /// Directory for reports, the manifest and checkpoints.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism; 1 is deterministic).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Cap on candidate bases in the vertex-enumeration fallback.
    #[arg(long, global = true, env = "SYMPCONFIG_BASIS_CAP")]
    basis_cap: Option<u64>,
}

#[derive(Args, Debug, Clone)]
pub struct CapArgs {
    /// Comma-separated per-component caps (rationals); may only tighten.
    #[arg(long, value_name = "LIST")]
    caps_override: Option<String>,
    /// Allow overrides that loosen the proven caps.
    #[arg(long = "unsafe")]
    unsafe_caps: bool,
    #[arg(long, value_enum, default_value_t = Variant::I0)]
    variant: Variant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    I0,
    I1,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConeChoice {
    /// C* ∩ C_δ (needs condition (*) asserted).
    Star,
    /// C_δ alone.
    Delta,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate canonical assignments within the caps, as JSONL.
    Enumerate {
        #[command(flatten)]
        caps: CapArgs,
        /// Continue from the checkpoint in --out.
        #[arg(long)]
        resume: bool,
    },
    /// Test an area vector, or search for one that eliminates.
    Eliminate {
        #[arg(long, value_name = "LIST", conflicts_with = "search", required_unless_present = "search")]
        delta: Option<String>,
        #[arg(long)]
        search: bool,
        /// Cone to search in (default: star when (*) is asserted).
        #[arg(long, value_enum)]
        cone: Option<ConeChoice>,
        /// Enumerate output to search over instead of the config's vectors.
        #[arg(long, value_name = "JSONL")]
        assignments: Option<PathBuf>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Area-robustness via a null-space vector.
    Robust {
        #[arg(long, value_name = "LIST")]
        certificate: Option<String>,
    },
    /// Reflect in H - E_r - E_s - E_t and rebuild the type.
    Cremona {
        #[arg(long, value_name = "R,S,T")]
        gamma: String,
        /// Blow up this many extra points first.
        #[arg(long, default_value_t = 0)]
        extend: usize,
        /// Reflect even outside the three admissible positions.
        #[arg(long = "unsafe")]
        unsafe_reflect: bool,
    },
    /// Nearness forest, combinatorial type and blow-down checks.
    Type {
        /// Also run the primed blow-down check (with Σ_0).
        #[arg(long)]
        primed: bool,
    },
    /// Show or check a built-in scenario.
    Scenario {
        /// fano7, fanoExtended8, d2conic7, d2Extended8, def110, nineNeg3N12 or sevenNeg2Config.
        name: String,
        /// Run the scenario's consistency checks instead of printing it.
        #[arg(long)]
        check: bool,
    },
    /// enumerate, eliminate, then blow-down feasibility and types of the survivors.
    Pipeline {
        #[command(flatten)]
        caps: CapArgs,
        #[arg(long)]
        resume: bool,
        #[arg(long, value_name = "LIST")]
        delta: Option<String>,
        #[arg(long, value_enum)]
        cone: Option<ConeChoice>,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(w) = cli.common.workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::usage(e.to_string()))?;
    }
    let c = &cli.common;
    match cli.command {
        Command::Enumerate { caps, resume } => commands::enumerate(c, &caps, resume),
        Command::Eliminate { delta, search, cone, assignments, seed } => match delta {
            Some(d) => commands::eliminate_delta(c, &d),
            None => {
                debug_assert!(search);
                commands::eliminate_search(c, cone, assignments.as_deref(), seed)
            }
        },
        Command::Robust { certificate } => commands::robust(c, certificate.as_deref()),
        Command::Cremona { gamma, extend, unsafe_reflect } => commands::cremona(c, &gamma, extend, unsafe_reflect),
        Command::Type { primed } => commands::type_report(c, primed),
        Command::Scenario { name, check } => commands::scenario(c, &name, check),
        Command::Pipeline { caps, resume, delta, cone, seed } => {
            commands::pipeline(c, &caps, resume, delta.as_deref(), cone, seed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { fail::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
