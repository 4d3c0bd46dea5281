use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use topo_regress::{KernelFamily, Scenario, ScenarioKind};
use topo_regress_cli::{
    cmd_analyze, cmd_barcode_svg, cmd_consistency, cmd_distance, cmd_simulate, configure_threads, AnalysisConfig,
    BandwidthRule, CliError, ConsistencyConfig, CriticalPoint, Structure,
};

#[derive(Debug, Parser)]
#[command(
    name = "topo-regress",
    version,
    about = "Shape inference for regression curves via persistent homology"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KernelArg {
    Gaussian,
    Cauchy,
}

impl From<KernelArg> for KernelFamily {
    fn from(k: KernelArg) -> Self {
        match k {
            KernelArg::Gaussian => KernelFamily::TruncatedGaussian,
            KernelArg::Cauchy => KernelFamily::TruncatedCauchy,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum StructureArg {
    Monotonicity,
    Convexity,
    Modality,
}

impl From<StructureArg> for Structure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::Monotonicity => Structure::Monotonicity,
            StructureArg::Convexity => Structure::Convexity,
            StructureArg::Modality => Structure::Modality,
        }
    }
}

#[derive(Debug, clap::Args)]
struct AnalysisArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    kernel: KernelArg,
    /// Fixed bandwidth; overrides --bandwidth-exponent.
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Use h = n^(-1/e) with e in {3, 5, 7}.
    #[arg(long, default_value_t = 3)]
    bandwidth_exponent: u32,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Number of evaluation grid points.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Cap on the number of filtration levels; 0 disables the cap.
    #[arg(long, default_value_t = 20)]
    grid_bound: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl AnalysisArgs {
    fn config(&self, delta: f64) -> AnalysisConfig {
        AnalysisConfig {
            kernel_family: self.kernel.into(),
            bandwidth_rule: match self.bandwidth {
                Some(h) => BandwidthRule::Fixed(h),
                None => BandwidthRule::PowerLaw(self.bandwidth_exponent),
            },
            epsilon: self.epsilon,
            grid_points: self.grid,
            alpha: self.alpha,
            modality_delta: delta,
            grid_bound: (self.grid_bound > 0).then_some(self.grid_bound),
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a sample from a built-in scenario and write it as `x,y` CSV.
    Simulate {
        /// exp_monotone, ratio_non_convex or bimodal_mixture.
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to sqrt(0.1).
        #[arg(long)]
        noise_sd: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the shape test on a CSV sample and print a JSON report.
    Analyze {
        csv: PathBuf,
        #[arg(long, value_enum)]
        structure: StructureArg,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Candidate mode location, or `auto` to test every candidate.
        #[arg(long)]
        critical_point: Option<String>,
        /// Half-width of the neighbourhood around the candidate mode.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall-clock time in the report (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Bottleneck distance between two diagram JSON files.
    Distance { a: PathBuf, b: PathBuf },
    /// Monte Carlo bottleneck distance between estimated and true diagrams.
    Consistency {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[arg(long)]
        noise_sd: Option<f64>,
        #[command(flatten)]
        analysis: AnalysisArgs,
    },
    /// Render a diagram JSON file as an SVG barcode.
    BarcodeSvg {
        diagram: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_critical_point(raw: &str) -> Result<CriticalPoint, CliError> {
    if raw.eq_ignore_ascii_case("auto") {
        return Ok(CriticalPoint::Auto);
    }
    raw.parse::<f64>()
        .ok()
        .filter(|c| c.is_finite())
        .map(CriticalPoint::At)
        .ok_or_else(|| CliError::Usage(format!("--critical-point must be a number or `auto`, got `{raw}`")))
}

fn scenario_kind(name: &str) -> Result<ScenarioKind, CliError> {
    ScenarioKind::from_name(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<Option<String>, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Simulate {
            scenario,
            n,
            seed,
            noise_sd,
            out,
        } => {
            let mut sc = Scenario::new(scenario_kind(&scenario)?, n, seed);
            if let Some(sd) = noise_sd {
                sc = sc.with_noise_sd(sd);
            }
            cmd_simulate(&sc, &out).map(Some)
        }
        Command::Analyze {
            csv,
            structure,
            analysis,
            critical_point,
            delta,
            out,
            timing,
        } => {
            let cp = critical_point.as_deref().map(parse_critical_point).transpose()?;
            let report = cmd_analyze(&csv, &analysis.config(delta), structure.into(), cp, timing)?;
            match out {
                Some(path) => std::fs::write(&path, report + "\n")
                    .map(|_| None)
                    .map_err(|source| CliError::Io {
                        path: path.display().to_string(),
                        source,
                    }),
                None => Ok(Some(report)),
            }
        }
        Command::Distance { a, b } => cmd_distance(&a, &b).map(Some),
        Command::Consistency {
            scenario,
            n,
            reps,
            noise_sd,
            analysis,
        } => {
            let config = ConsistencyConfig {
                scenario: scenario_kind(&scenario)?,
                n,
                reps,
                noise_sd: noise_sd.unwrap_or(topo_regress::datagen::DEFAULT_NOISE_SD),
                analysis: analysis.config(0.1),
            };
            cmd_consistency(&config).map(Some)
        }
        Command::BarcodeSvg { diagram, out } => cmd_barcode_svg(&diagram, &out).map(|_| None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Some(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
