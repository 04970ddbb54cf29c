//! `nn-adv`: generate hard nearest-neighbor instances, certify adversarial
//! tours, sweep start cities and draw tours.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nn_adversary::instance::MAX_K;
use nn_adversary::{MetricKind, PerturbScheme, ValidationMode};

#[derive(Parser, Debug)]
#[command(name = "nn-adv", version, about = "Hard instances for the nearest neighbor rule")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write G_k as a TSPLIB or JSON instance.
    Generate(GenerateArgs),
    /// Certify the adversarial tour of G_k for a range of k and metrics.
    Certify(CertifyArgs),
    /// Run NNR from every (or one) start city under several policies.
    Sweep(SweepArgs),
    /// Render G_k and a tour as SVG.
    Draw(DrawArgs),
    /// Check a tour file against an instance.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
    k: u32,
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: MetricKind,
    #[arg(long, value_enum, default_value_t = InstanceFormat::Tsplib)]
    format: InstanceFormat,
    #[arg(long, default_value = "none", value_parser = parse_scheme)]
    perturb: PerturbScheme,
    /// Lattice refinement for perturbation; defaults to a power of two of
    /// at least 256·n.
    #[arg(long)]
    scale: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// A single k or an inclusive range such as `0..8`.
    #[arg(long, value_parser = parse_k_range, allow_hyphen_values = true)]
    k: KRange,
    #[arg(long, value_delimiter = ',', default_value = "l2", value_parser = parse_metric)]
    metrics: Vec<MetricKind>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Swap the cities at tour positions `i,j` before certifying.
    #[arg(long, value_parser = parse_pair)]
    inject_swap: Option<(usize, usize)>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
    k: u32,
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: MetricKind,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "lexicographic")]
    policy: Vec<PolicyName>,
    /// `all` or a city index.
    #[arg(long, default_value = "all", value_parser = parse_start)]
    start: StartChoice,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DrawArgs {
    #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
    k: u32,
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: MetricKind,
    /// `adversarial`, `perimeter`, `nnr`, `none` or a tour file.
    #[arg(long, default_value = "adversarial")]
    tour: String,
    /// Start city for `--tour nnr`.
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// TSPLIB instance file; alternatively give `--k`.
    #[arg(long, conflicts_with = "k", required_unless_present = "k")]
    instance: Option<PathBuf>,
    #[arg(long, value_parser = parse_k, allow_hyphen_values = true)]
    k: Option<u32>,
    #[arg(long, default_value = "l2", value_parser = parse_metric)]
    metric: MetricKind,
    /// `adversarial`, `perimeter`, `nnr` or a tour file.
    #[arg(long)]
    tour: String,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long, value_parser = parse_mode, default_value = "weak")]
    mode: ValidationMode,
    /// Print the verdict as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum InstanceFormat {
    Tsplib,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    Lexicographic,
    Index,
    Adversarial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct KRange {
    first: u32,
    last: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum StartChoice {
    All,
    City(usize),
}

fn parse_k(s: &str) -> Result<u32, String> {
    let k: i64 = s.trim().parse().map_err(|_| format!("`{s}` is not an integer"))?;
    if !(0..=i64::from(MAX_K)).contains(&k) {
        return Err(format!("k must lie in 0..={MAX_K}, got {k}"));
    }
    Ok(k as u32)
}

fn parse_k_range(s: &str) -> Result<KRange, String> {
    let (first, last) = match s.split_once("..") {
        Some((a, b)) => (parse_k(a)?, parse_k(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let k = parse_k(s)?;
            (k, k)
        }
    };
    if first > last {
        return Err(format!("empty range {s}"));
    }
    Ok(KRange { first, last })
}

fn parse_metric(s: &str) -> Result<MetricKind, String> {
    s.parse().map_err(|e: nn_adversary::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<PerturbScheme, String> {
    s.parse().map_err(|_| format!("expected `none` or `strictify`, got `{s}`"))
}

fn parse_mode(s: &str) -> Result<ValidationMode, String> {
    match s {
        "weak" => Ok(ValidationMode::Weak),
        "strict" => Ok(ValidationMode::Strict),
        _ => Err(format!("expected `weak` or `strict`, got `{s}`")),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not an index"));
    Ok((num(a)?, num(b)?))
}

fn parse_start(s: &str) -> Result<StartChoice, String> {
    if s == "all" {
        return Ok(StartChoice::All);
    }
    s.parse()
        .map(StartChoice::City)
        .map_err(|_| format!("expected `all` or a city index, got `{s}`"))
}

/// Sizes the global thread pool from `NN_ADV_THREADS` when it is set.
fn configure_threads() {
    let Ok(value) = std::env::var("NN_ADV_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                eprintln!("warning: could not size thread pool: {e}");
            }
        }
        _ => eprintln!("warning: ignoring NN_ADV_THREADS={value:?}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match cli.command {
        Command::Generate(args) => commands::generate(args),
        Command::Certify(args) => commands::certify(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Draw(args) => commands::draw(args),
        Command::Validate(args) => commands::validate(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_ranges() {
        assert_eq!(parse_k_range("0..8"), Ok(KRange { first: 0, last: 8 }));
        assert_eq!(parse_k_range("2..=3"), Ok(KRange { first: 2, last: 3 }));
        assert_eq!(parse_k_range("5"), Ok(KRange { first: 5, last: 5 }));
        assert!(parse_k_range("4..2").is_err());
        assert!(parse_k_range("-1..2").is_err());
        assert!(parse_k("25").is_err());
    }

    #[test]
    fn small_parsers() {
        assert_eq!(parse_pair("3, 5"), Ok((3, 5)));
        assert!(parse_pair("3").is_err());
        assert_eq!(parse_start("all"), Ok(StartChoice::All));
        assert_eq!(parse_start("7"), Ok(StartChoice::City(7)));
        assert!(parse_metric("l0.5").is_err());
        assert_eq!(parse_metric("graphic"), Ok(MetricKind::Graphic));
    }

    #[test]
    fn command_line_is_well_formed() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
