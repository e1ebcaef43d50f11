use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod manifest;

pub type Result<T> = std::result::Result<T, Box<dyn std::error::Error + Send + Sync>>;

#[derive(Parser, Debug)]
#[command(name = "multicascade", version, about = "Binomial cascades, switched environments and their bivariate spectra")]
struct Cli {
    /// Worker threads; defaults to every available core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a switching environment and write it as JSON
    Env(EnvArgs),
    /// Scaling function surface over a q grid
    Tau(TauArgs),
    /// Spectra, Legendre transforms and support regions
    Spectrum(SpectrumArgs),
    /// Run a validation suite and write a pass/fail report
    Validate(ValidateArgs),
    /// Rerun a manifest into a fresh directory and compare digests
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct EnvArgs {
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub jmax: usize,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize, Clone, Copy)]
pub struct PairParams {
    #[arg(long, default_value_t = 0.27)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.8)]
    pub p2: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pair {
    /// (μ_{p1}, μ_{p2})
    Binomial,
    /// (μ_{p1}, ν_η) over a sampled environment
    Switched,
    /// the two measures of the counterexample construction
    Counterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Mode {
    #[value(name = "tilde-exact")]
    #[serde(rename = "tilde-exact")]
    TildeExact,
    #[value(name = "threeI-dp")]
    #[serde(rename = "threeI-dp")]
    ThreeIDp,
    #[value(name = "threeI-enum")]
    #[serde(rename = "threeI-enum")]
    ThreeIEnum,
    #[value(name = "closed")]
    #[serde(rename = "closed")]
    Closed,
}

#[derive(Args, Debug, Serialize)]
pub struct TauArgs {
    #[arg(long, value_enum, default_value_t = Pair::Switched)]
    pub pair: Pair,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub params: PairParams,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Generation (binary digits); even for the counterexample.
    #[arg(long, default_value_t = 12)]
    pub j: u64,
    /// Environment depth; defaults to `--j`.
    #[arg(long)]
    pub jmax: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub nmax: u32,
    #[arg(long, default_value_t = -5.0, allow_negative_numbers = true)]
    pub qmin: f64,
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub qmax: f64,
    #[arg(long, default_value_t = 0.5)]
    pub qstep: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Which {
    Legendre,
    Multifractal,
    NuEta,
    Regions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseArg {
    SameSide,
    Mixed,
}

#[derive(Args, Debug, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub which: Which,
    #[command(flatten)]
    pub params: PairParams,
    /// Refuse to run unless the parameters fall in this case.
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// H grid, applied to both axes; defaults to the bounding box of the support.
    #[arg(long, allow_negative_numbers = true)]
    pub hmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub hmax: Option<f64>,
    /// Defaults to a hundredth of the H range.
    #[arg(long)]
    pub hstep: Option<f64>,
    /// q box of the Legendre transform.
    #[arg(long, default_value_t = -40.0, allow_negative_numbers = true)]
    pub qmin: f64,
    #[arg(long, default_value_t = 40.0, allow_negative_numbers = true)]
    pub qmax: f64,
    #[arg(long, default_value_t = 0.05)]
    pub qstep: f64,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Counterexample,
    Formalism,
    Environment,
    All,
}

#[derive(Args, Debug, Serialize)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// What a command reports back to `main`.
pub enum Outcome {
    Done,
    ValidationFailed,
}

fn run(cli: Cli, argv: &[String]) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Env(a) => commands::env(&a, argv),
        Command::Tau(a) => commands::tau(&a, argv),
        Command::Spectrum(a) => commands::spectrum(&a, argv),
        Command::Validate(a) => commands::validate(&a, argv),
        Command::Replay(a) => replay(&a),
    }
}

fn replay(a: &ReplayArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&a.manifest)?;
    let old: manifest::RunManifest = serde_json::from_str(&text)?;
    let mut argv = old.args.clone();
    argv.push("--out".into());
    argv.push(a.out.to_string_lossy().into_owned());
    let cli = Cli::try_parse_from(std::iter::once("multicascade".to_string()).chain(argv.iter().cloned()))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err("a manifest cannot replay another replay".into());
    }
    run(cli, &argv)?;
    let new: manifest::RunManifest =
        serde_json::from_str(&std::fs::read_to_string(a.out.join(manifest::MANIFEST_FILE))?)?;
    if new.outputs == old.outputs {
        println!("replay reproduced {} output(s)", new.outputs.len());
        Ok(Outcome::Done)
    } else {
        for (o, n) in old.outputs.iter().zip(&new.outputs) {
            if o != n {
                eprintln!("{}: {} != {}", o.file, o.sha256, n.sha256);
            }
        }
        Ok(Outcome::ValidationFailed)
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli, &argv) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ValidationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
