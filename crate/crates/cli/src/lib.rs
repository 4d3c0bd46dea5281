//! Pipeline orchestration behind the `topo-regress` binary.
//!
//! Every command is a plain function returning its output as a string (or
//! writing a file) so it can be driven from tests without spawning a
//! process.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use topo_regress::datagen::{derive_seed, generate, true_diagram, Scenario, ScenarioKind};
use topo_regress::persistence::{build_discrete_filtration_bounded, estimated_persistence, TheoremInputs};
use topo_regress::regress::{linspace, Sample};
use topo_regress::structures::{
    analyze_window, convexity, estimate_curve, modality, mode_candidates, monotonicity, StructureConfig,
    StructureVerdict,
};
use topo_regress::{bottleneck_distance, KernelFamily, KernelSpec, PersistenceDiagram};

pub mod svg;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("{0}")]
    Pipeline(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Parse { .. } => 3,
            CliError::Pipeline(_) | CliError::Io { .. } => 4,
        }
    }

    fn pipeline(e: impl std::fmt::Display) -> Self {
        CliError::Pipeline(e.to_string())
    }

    fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    Fixed(f64),
    /// `h = n^(-1/e)`.
    PowerLaw(u32),
}

impl BandwidthRule {
    pub fn resolve(self, n: usize) -> Result<f64> {
        match self {
            BandwidthRule::Fixed(h) => Ok(h),
            BandwidthRule::PowerLaw(e @ (3 | 5 | 7)) => Ok((n as f64).powf(-1.0 / e as f64)),
            BandwidthRule::PowerLaw(e) => Err(CliError::Usage(format!(
                "bandwidth exponent must be 3, 5 or 7, got {e}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Monotonicity,
    Convexity,
    Modality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPoint {
    Auto,
    At(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub kernel_family: KernelFamily,
    pub bandwidth_rule: BandwidthRule,
    pub epsilon: f64,
    pub grid_points: usize,
    pub alpha: f64,
    pub modality_delta: f64,
    pub grid_bound: Option<usize>,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let s = StructureConfig::<f64>::default();
        Self {
            kernel_family: KernelFamily::TruncatedGaussian,
            bandwidth_rule: BandwidthRule::PowerLaw(3),
            epsilon: s.epsilon,
            grid_points: s.grid_points,
            alpha: s.alpha,
            modality_delta: s.modality_delta,
            grid_bound: s.grid_bound,
            seed: 0,
        }
    }
}

impl AnalysisConfig {
    pub fn kernel(&self, n: usize) -> Result<KernelSpec<f64>> {
        KernelSpec::new(self.kernel_family, self.bandwidth_rule.resolve(n)?).map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn structure_config(&self) -> StructureConfig<f64> {
        StructureConfig {
            epsilon: self.epsilon,
            alpha: self.alpha,
            grid_points: self.grid_points,
            region: None,
            grid_bound: self.grid_bound,
            modality_delta: self.modality_delta,
        }
    }
}

/// Reads a two-column `x,y` CSV with a mandatory header.
pub fn read_csv(path: &Path) -> Result<Sample<f64>> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_csv(file)
}

pub fn parse_csv<R: std::io::Read>(reader: R) -> Result<Sample<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header_err = |message: String| CliError::Parse { line: 1, message };
    let headers = rdr.headers().map_err(|e| header_err(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(header_err(format!(
            "expected header `x,y`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for record in rdr.records() {
        let record = record.map_err(|e| CliError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = &record[i];
            let v: f64 = raw.parse().map_err(|_| CliError::Parse {
                line,
                message: format!("`{raw}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(CliError::Parse {
                    line,
                    message: format!("`{raw}` is not finite"),
                });
            }
            Ok(v)
        };
        xs.push(field(0)?);
        ys.push(field(1)?);
    }
    if xs.len() < 2 {
        return Err(CliError::Parse {
            line: xs.len() as u64 + 1,
            message: format!("need at least 2 data rows, found {}", xs.len()),
        });
    }
    Sample::new(xs, ys).map_err(CliError::pipeline)
}

pub fn write_csv(sample: &Sample<f64>) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in sample.points() {
        // `{:?}` is the shortest representation that round-trips.
        let _ = writeln!(out, "{x:?},{y:?}");
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report types serialize")
}

#[derive(Debug, Serialize)]
struct SimulateMeta<'a> {
    scenario: &'a Scenario,
    rows: usize,
    out: String,
}

/// Writes the CSV and returns the scenario metadata as JSON.
pub fn cmd_simulate(scenario: &Scenario, out: &Path) -> Result<String> {
    let sample = generate::<f64>(scenario).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(out, &write_csv(&sample))?;
    Ok(to_json(&SimulateMeta {
        scenario,
        rows: sample.len(),
        out: out.display().to_string(),
    }))
}

#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub epsilon: f64,
    pub n_eps: i64,
    pub t_max: f64,
    pub levels: usize,
    pub lowest: f64,
    pub truncated: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub config: AnalysisConfig,
    pub structure: Structure,
    pub critical_point: Option<CriticalPoint>,
    pub n: usize,
    pub bandwidth: f64,
    pub plan: PlanSummary,
    /// Diagram of the discrete union-of-balls filtration.
    pub estimated_diagram: PersistenceDiagram<f64>,
    /// Grid barcode of the derivative estimate, bars shorter than 2ε dropped.
    pub diagram: PersistenceDiagram<f64>,
    pub significance: Vec<topo_regress::significance::SignificanceRow<f64>>,
    pub verdicts: Vec<StructureVerdict<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

pub fn analyze(
    sample: &Sample<f64>,
    config: &AnalysisConfig,
    structure: Structure,
    critical_point: Option<CriticalPoint>,
) -> Result<AnalyzeReport> {
    let kernel = config.kernel(sample.len())?;
    let scfg = config.structure_config();
    scfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    if structure == Structure::Modality && critical_point.is_none() {
        return Err(CliError::Usage(
            "modality needs --critical-point <c> or --critical-point auto".into(),
        ));
    }

    let filtration = build_discrete_filtration_bounded(sample, &kernel, config.epsilon, config.grid_bound)
        .map_err(CliError::pipeline)?;
    let estimated_diagram = estimated_persistence(&filtration).map_err(CliError::pipeline)?;
    let plan = &filtration.plan;
    let plan = PlanSummary {
        epsilon: plan.epsilon,
        n_eps: plan.n_eps,
        t_max: plan.t_max,
        levels: plan.levels.len(),
        lowest: plan.lowest(),
        truncated: plan.truncated,
    };

    let estimate = estimate_curve(sample, &kernel, &scfg).map_err(CliError::pipeline)?;
    let window = analyze_window(&estimate, config.epsilon).map_err(CliError::pipeline)?;
    let significance = window
        .diagram
        .features()
        .iter()
        .map(|f| {
            topo_regress::assess_feature(sample, &kernel, &window.estimate, f, config.alpha)
                .map(|s| s.row())
                .map_err(CliError::pipeline)
        })
        .collect::<Result<Vec<_>>>()?;

    let verdicts = match structure {
        Structure::Monotonicity => vec![monotonicity(sample, &kernel, &scfg).map_err(CliError::pipeline)?],
        Structure::Convexity => vec![convexity(sample, &kernel, &scfg).map_err(CliError::pipeline)?],
        Structure::Modality => {
            let candidates = match critical_point.expect("checked above") {
                CriticalPoint::At(c) => vec![c],
                CriticalPoint::Auto => auto_candidates(sample, &window.estimate, config.modality_delta),
            };
            candidates
                .into_iter()
                .map(|c| modality(sample, &kernel, c, config.modality_delta, &scfg).map_err(CliError::pipeline))
                .collect::<Result<Vec<_>>>()?
        }
    };

    Ok(AnalyzeReport {
        config: config.clone(),
        structure,
        critical_point,
        n: sample.len(),
        bandwidth: kernel.bandwidth,
        plan,
        estimated_diagram,
        diagram: window.diagram,
        significance,
        verdicts,
        timing_ms: None,
    })
}

/// Candidate modes (`m̂₁` crossing from positive to negative) whose
/// `±delta` window lies inside the data.
pub fn auto_candidates(sample: &Sample<f64>, estimate: &topo_regress::CurveEstimate<f64>, delta: f64) -> Vec<f64> {
    let (lo, hi) = sample.x_range();
    mode_candidates(estimate)
        .into_iter()
        .filter(|&c| c - delta >= lo && c + delta <= hi)
        .collect()
}

pub fn cmd_analyze(
    csv: &Path,
    config: &AnalysisConfig,
    structure: Structure,
    critical_point: Option<CriticalPoint>,
    timing: bool,
) -> Result<String> {
    let start = Instant::now();
    let sample = read_csv(csv)?;
    let mut report = analyze(&sample, config, structure, critical_point)?;
    if timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(to_json(&report))
}

pub fn read_diagram(path: &Path) -> Result<PersistenceDiagram<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        line: e.line() as u64,
        message: format!("{}: {e}", path.display()),
    })
}

/// `%.{digits}g`-style formatting.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if exp < -4 || exp >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        let (mant, e) = s.split_once('e').expect("exponent form");
        format!("{}e{}", trim(mant.to_string()), e)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    }
}

pub fn cmd_distance(a: &Path, b: &Path) -> Result<String> {
    let (da, db) = (read_diagram(a)?, read_diagram(b)?);
    let d = bottleneck_distance(&da, &db).map_err(CliError::pipeline)?;
    Ok(format_significant(d, 12))
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyConfig {
    pub scenario: ScenarioKind,
    pub n: usize,
    pub reps: usize,
    pub noise_sd: f64,
    pub analysis: AnalysisConfig,
}

#[derive(Debug, Serialize)]
pub struct TheoremSummary {
    /// `C_{ε/2}` from population bounds of the scenario.
    pub constant_half_epsilon: f64,
    pub n_eps: i64,
    pub probability_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct ConsistencyReport {
    pub config: ConsistencyConfig,
    pub bandwidth: f64,
    pub true_diagram: PersistenceDiagram<f64>,
    pub threshold: f64,
    pub fraction_within_threshold: f64,
    pub mean_distance: f64,
    pub theorem: TheoremSummary,
    pub seeds: Vec<u64>,
    pub distances: Vec<f64>,
}

pub fn consistency(config: &ConsistencyConfig) -> Result<ConsistencyReport> {
    if config.reps == 0 {
        return Err(CliError::Usage("reps must be at least 1".into()));
    }
    if let ScenarioKind::Custom { .. } = config.scenario {
        return Err(CliError::Usage(
            "consistency needs a built-in scenario with a known truth".into(),
        ));
    }
    let a = &config.analysis;
    let kernel = a.kernel(config.n)?;
    let base = Scenario::new(config.scenario.clone(), config.n, a.seed).with_noise_sd(config.noise_sd);
    base.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let grid = linspace(base.domain.0, base.domain.1, a.grid_points);
    let truth = true_diagram(&config.scenario, &grid);

    let seeds: Vec<u64> = (0..config.reps as u64).map(|r| derive_seed(a.seed, r)).collect();
    let distances = seeds
        .par_iter()
        .map(|&seed| {
            let sample = generate::<f64>(&base.clone().with_seed(seed)).map_err(CliError::pipeline)?;
            let f = build_discrete_filtration_bounded(&sample, &kernel, a.epsilon, a.grid_bound)
                .map_err(CliError::pipeline)?;
            let est = estimated_persistence(&f).map_err(CliError::pipeline)?;
            bottleneck_distance(&est, &truth).map_err(CliError::pipeline)
        })
        .collect::<Result<Vec<f64>>>()?;

    let threshold = 5.0 * a.epsilon;
    let within = distances.iter().filter(|&&d| d <= threshold).count();
    let mean = distances.iter().sum::<f64>() / distances.len() as f64;

    let (m, m1) = topo_regress::true_curves(&config.scenario, &grid);
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let m1_max = m1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inputs = TheoremInputs {
        epsilon: a.epsilon,
        delta: kernel.delta,
        p_min: 1.0 / (base.domain.1 - base.domain.0),
        tau: kernel.tau,
        // Truncated noise keeps |Y| within sup|m| + 1.
        y_max: sup(&m) + 1.0,
        m_bound: sup(&m),
        m1_bound: sup(&m1),
    };
    let half = TheoremInputs {
        epsilon: a.epsilon / 2.0,
        ..inputs
    };
    let n_eps = (m1_max / (2.0 * a.epsilon)).ceil() as i64;
    let theorem = TheoremSummary {
        constant_half_epsilon: half.constant().map_err(CliError::pipeline)?,
        n_eps,
        probability_bound: inputs
            .probability_bound(n_eps, config.n, kernel.bandwidth)
            .map_err(CliError::pipeline)?,
    };

    Ok(ConsistencyReport {
        config: config.clone(),
        bandwidth: kernel.bandwidth,
        true_diagram: truth,
        threshold,
        fraction_within_threshold: within as f64 / distances.len() as f64,
        mean_distance: mean,
        theorem,
        seeds,
        distances,
    })
}

pub fn cmd_consistency(config: &ConsistencyConfig) -> Result<String> {
    Ok(to_json(&consistency(config)?))
}

pub fn cmd_barcode_svg(diagram: &Path, out: &Path) -> Result<()> {
    let d = read_diagram(diagram)?;
    write_file(out, &svg::render(&d))
}

/// Applies `TOPO_REGRESS_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TOPO_REGRESS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("TOPO_REGRESS_THREADS must be a positive integer, got `{raw}`")))?;
    // A pool may already exist when called twice in one process; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.0, 12), "0");
        assert_eq!(format_significant(1.0, 12), "1");
        assert_eq!(format_significant(0.2, 12), "0.2");
        assert_eq!(format_significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_significant(123456.789, 12), "123456.789");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(2.0e15, 12), "2e15");
    }

    #[test]
    fn csv_requires_header_and_numbers() {
        assert!(matches!(
            parse_csv("a,b\n1,2\n3,4\n".as_bytes()),
            Err(CliError::Parse { line: 1, .. })
        ));
        match parse_csv("x,y\n1,2\n3,oops\n".as_bytes()) {
            Err(CliError::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("oops"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_csv("x,y\n1,2\n".as_bytes()),
            Err(CliError::Parse { .. })
        ));
        let s = parse_csv("x, y\n0, 1\n1, 3\n".as_bytes()).unwrap();
        assert_eq!(s.ys(), &[1.0, 3.0]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let sc = Scenario::new(ScenarioKind::ExpMonotone, 25, 5);
        let s = generate::<f64>(&sc).unwrap();
        let back = parse_csv(write_csv(&s).as_bytes()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn bandwidth_rules() {
        assert_eq!(
            BandwidthRule::PowerLaw(3).resolve(1000).unwrap(),
            1000f64.powf(-1.0 / 3.0)
        );
        assert_eq!(BandwidthRule::Fixed(0.4).resolve(10).unwrap(), 0.4);
        assert!(matches!(
            BandwidthRule::PowerLaw(4).resolve(10),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn modality_without_candidate_is_a_usage_error() {
        let s = generate::<f64>(&Scenario::new(ScenarioKind::BimodalMixture, 50, 1)).unwrap();
        let r = analyze(&s, &AnalysisConfig::default(), Structure::Modality, None);
        assert!(matches!(r, Err(CliError::Usage(_))));
    }

    #[test]
    fn noiseless_consistency_is_perfect_for_large_epsilon() {
        let cfg = ConsistencyConfig {
            scenario: ScenarioKind::ExpMonotone,
            n: 50,
            reps: 4,
            noise_sd: 0.0,
            analysis: AnalysisConfig {
                epsilon: 1.0,
                ..AnalysisConfig::default()
            },
        };
        let r = consistency(&cfg).unwrap();
        assert_eq!(r.fraction_within_threshold, 1.0);
        assert_eq!(r.seeds.len(), 4);
    }

    #[test]
    fn consistency_refuses_custom_truth() {
        let cfg = ConsistencyConfig {
            scenario: ScenarioKind::Custom {
                coefficients: vec![0.0, 1.0],
            },
            n: 50,
            reps: 1,
            noise_sd: 0.1,
            analysis: AnalysisConfig::default(),
        };
        assert!(matches!(consistency(&cfg), Err(CliError::Usage(_))));
    }
}
