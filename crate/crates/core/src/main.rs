use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use k3bn::bn::DecompositionProfile;
use k3bn::cases::FiltrationProfile;
use k3bn::cli::{self, BoxOverrides, CliError, Command, RunReport, SurfaceSpec, DEFAULT_DEGREE_BOUND, THREADS_ENV};

#[derive(Parser)]
#[command(name = "k3bn", version, about = "Brill-Noether certificates for K3 Picard lattices")]
struct Cli {
    /// Print a short human-readable summary instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for a decomposition H = D1 + D2 with h0 bounds multiplying past g.
    BnCheck {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree_bound: i64,
    },
    /// List decompositions H = D1 + D2 into certified effective classes.
    Decompose {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEGREE_BOUND)]
        degree_bound: i64,
    },
    /// Match a decomposition profile against the forcing cases.
    Classify {
        /// JSON `{"sq": [...], "x": [[...]]}`, or `@path` to read it from a file.
        #[arg(long)]
        profile: String,
        /// Comma-separated h0 >= 2 flags; all true when omitted.
        #[arg(long, value_delimiter = ',')]
        h0_flags: Option<Vec<bool>>,
    },
    /// Exhaustive partition-certificate check over a bounded box.
    VerifyCases(VerifyArgs),
    /// List the triples with a1 a2 a3 - a1 - a2 - a3 - 2 < 0.
    Triples {
        #[arg(long)]
        a_max: i64,
    },
    /// Absorb fixed curves into the parts of a decomposition of H.
    ReduceFixed {
        #[arg(long)]
        spec: PathBuf,
        /// JSON list of coordinate vectors, or `@path`.
        #[arg(long)]
        parts: String,
        /// JSON list of coordinate vectors, or `@path`.
        #[arg(long)]
        delta: String,
    },
    /// Check the feasibility constraints of a filtration profile.
    ProfileCheck {
        /// JSON list of `{"r", "s", "eps"}` entries, or `@path`.
        #[arg(long)]
        filtration: String,
        /// Optional decomposition profile to test for a partition certificate.
        #[arg(long)]
        decomposition: Option<String>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    n: usize,
    /// Use the default box (the default when no bound is overridden).
    #[arg(long)]
    default_box: bool,
    #[arg(long)]
    r_max: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    s_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    s_max: Option<i64>,
    #[arg(long)]
    eps_max: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<i64>,
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn inline_json<T: DeserializeOwned>(arg: &str) -> Result<T, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => read_text(Path::new(path))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(e.to_string()))
}

fn load_spec(path: &Path) -> Result<SurfaceSpec, CliError> {
    cli::parse_surface_spec(&read_text(path)?)
}

fn build(cmd: Cmd) -> Result<Command, CliError> {
    Ok(match cmd {
        Cmd::BnCheck { spec, degree_bound } => Command::BnCheck { spec: load_spec(&spec)?, degree_bound },
        Cmd::Decompose { spec, degree_bound } => Command::Decompose { spec: load_spec(&spec)?, degree_bound },
        Cmd::Classify { profile, h0_flags } => Command::Classify { profile: inline_json::<DecompositionProfile>(&profile)?, h0_flags },
        Cmd::VerifyCases(a) => Command::VerifyCases {
            n: a.n,
            overrides: BoxOverrides { r_max: a.r_max, s_min: a.s_min, s_max: a.s_max, eps_max: a.eps_max, x_min: a.x_min, x_max: a.x_max },
        },
        Cmd::Triples { a_max } => Command::Triples { a_max },
        Cmd::ReduceFixed { spec, parts, delta } => {
            Command::ReduceFixed { spec: load_spec(&spec)?, parts: inline_json(&parts)?, delta: inline_json(&delta)? }
        }
        Cmd::ProfileCheck { filtration, decomposition } => Command::ProfileCheck {
            filtration: inline_json::<FiltrationProfile>(&filtration)?,
            decomposition: decomposition.as_deref().map(inline_json::<DecompositionProfile>).transpose()?,
        },
    })
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| format!("{THREADS_ENV}={value} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let name = command_name(&args.command);
    let report = match configure_threads().map_err(CliError::Malformed).and_then(|()| build(args.command)) {
        Ok(command) => cli::run(&command),
        Err(e) => RunReport::input_error(name, &e),
    };
    if args.human {
        print!("{}", report.render_human());
    } else {
        println!("{}", report.to_json());
    }
    ExitCode::from(report.exit_code as u8)
}

fn command_name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::BnCheck { .. } => "bn-check",
        Cmd::Decompose { .. } => "decompose",
        Cmd::Classify { .. } => "classify",
        Cmd::VerifyCases(_) => "verify-cases",
        Cmd::Triples { .. } => "triples",
        Cmd::ReduceFixed { .. } => "reduce-fixed",
        Cmd::ProfileCheck { .. } => "profile-check",
    }
}
