//! Seeded synthetic regression scenarios.
//!
//! `y_i = m(x_i) + u_i` with `u_i` drawn from a normal truncated to `[-1, 1]`
//! by rejection. All randomness comes from a `ChaCha8Rng` seeded with the
//! scenario seed, so a scenario reproduces bit-for-bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::DatagenError;
use crate::persistence::{superlevel_barcode_0d, PersistenceDiagram};
use crate::regress::Sample;
use crate::scalar::Scalar;

/// Standard deviation of the parent normal for noise variance 0.1.
pub const DEFAULT_NOISE_SD: f64 = 0.316_227_766_016_837_94;

/// Bimodal curve: component standard deviation and means.
const MIX_SD: f64 = 0.316_227_766_016_837_94;
const MIX_MEANS: [f64; 2] = [-0.5, 0.5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScenarioKind {
    /// `m(x) = e^x`.
    ExpMonotone,
    /// `m(x) = x² / (1 + x² + x|x|)`.
    RatioNonConvex,
    /// Two-bump curve: the equal mixture of `N(∓0.5, 0.1)` densities,
    /// rescaled to a maximum of 1 on `[-1, 1]`.
    BimodalMixture,
    /// Polynomial `Σ c_k x^k`.
    Custom { coefficients: Vec<f64> },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::ExpMonotone => "exp_monotone",
            ScenarioKind::RatioNonConvex => "ratio_non_convex",
            ScenarioKind::BimodalMixture => "bimodal_mixture",
            ScenarioKind::Custom { .. } => "custom",
        }
    }

    /// Parses a built-in scenario name (snake_case or CamelCase).
    pub fn from_name(name: &str) -> Result<Self, DatagenError> {
        match name.to_ascii_lowercase().replace(['_', '-'], "").as_str() {
            "expmonotone" => Ok(ScenarioKind::ExpMonotone),
            "rationonconvex" => Ok(ScenarioKind::RatioNonConvex),
            "bimodalmixture" => Ok(ScenarioKind::BimodalMixture),
            _ => Err(DatagenError::InvalidScenario(format!("unknown scenario `{name}`"))),
        }
    }

    /// `(m(x), m₁(x))`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        match self {
            ScenarioKind::ExpMonotone => (x.exp(), x.exp()),
            ScenarioKind::RatioNonConvex => {
                if x >= 0.0 {
                    let d = 1.0 + 2.0 * x * x;
                    (x * x / d, 2.0 * x / (d * d))
                } else {
                    // x|x| = -x² cancels the x² in the denominator.
                    (x * x, 2.0 * x)
                }
            }
            ScenarioKind::BimodalMixture => {
                let scale = bimodal_peak();
                let (s, ds) = bimodal_shape(x);
                (s / scale, ds / scale)
            }
            ScenarioKind::Custom { coefficients } => {
                let m = coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c);
                let m1 = coefficients
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c);
                (m, m1)
            }
        }
    }
}

fn bimodal_shape(x: f64) -> (f64, f64) {
    let mut s = 0.0;
    let mut ds = 0.0;
    for mu in MIX_MEANS {
        let z = (x - mu) / MIX_SD;
        let phi = (-0.5 * z * z).exp();
        s += phi;
        ds += -z / MIX_SD * phi;
    }
    (s, ds)
}

/// Maximum of the unscaled bimodal shape on `[0, 1]` (it is even).
fn bimodal_peak() -> f64 {
    let f = |x: f64| bimodal_shape(x).0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let c = b - r * (b - a);
        let d = a + r * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub kind: ScenarioKind,
    pub n: usize,
    /// Standard deviation of the normal before truncation to `[-1, 1]`.
    pub noise_sd: f64,
    pub domain: (f64, f64),
    pub seed: u64,
}

impl Scenario {
    /// Default design: `x ~ U(-1, 1)`, noise variance 0.1.
    pub fn new(kind: ScenarioKind, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            noise_sd: DEFAULT_NOISE_SD,
            domain: (-1.0, 1.0),
            seed,
        }
    }

    pub fn with_noise_sd(self, noise_sd: f64) -> Self {
        Self { noise_sd, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<(), DatagenError> {
        if self.n < 2 {
            return Err(DatagenError::InvalidScenario(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if !(self.noise_sd >= 0.0) || !self.noise_sd.is_finite() {
            return Err(DatagenError::InvalidScenario(format!(
                "noise_sd must be non-negative, got {}",
                self.noise_sd
            )));
        }
        let (lo, hi) = self.domain;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(DatagenError::InvalidScenario(format!("bad domain [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// splitmix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for replication `rep` of a Monte Carlo run based at `base`.
pub fn derive_seed(base: u64, rep: u64) -> u64 {
    splitmix64(splitmix64(base) ^ rep)
}

/// Draws from `N(0, sd²)` conditioned on `[-1, 1]`.
pub struct TruncatedNormal {
    normal: Option<Normal<f64>>,
}

impl TruncatedNormal {
    pub fn new(sd: f64) -> Result<Self, DatagenError> {
        if sd == 0.0 {
            return Ok(Self { normal: None });
        }
        let normal = Normal::new(0.0, sd).map_err(|e| DatagenError::InvalidScenario(e.to_string()))?;
        Ok(Self { normal: Some(normal) })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.normal {
            None => 0.0,
            Some(n) => loop {
                let u = n.sample(rng);
                if (-1.0..=1.0).contains(&u) {
                    break u;
                }
            },
        }
    }
}

/// Draws the sample. Each point consumes one uniform for `x` followed by
/// the noise draws.
pub fn generate<T: Scalar>(scenario: &Scenario) -> Result<Sample<T>, DatagenError> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let noise = TruncatedNormal::new(scenario.noise_sd)?;
    let (lo, hi) = scenario.domain;
    let mut xs = Vec::with_capacity(scenario.n);
    let mut ys = Vec::with_capacity(scenario.n);
    for _ in 0..scenario.n {
        let x = lo + (hi - lo) * rng.random::<f64>();
        let y = scenario.kind.eval(x).0 + noise.sample(&mut rng);
        xs.push(T::lit(x));
        ys.push(T::lit(y));
    }
    Ok(Sample::new(xs, ys)?)
}

/// Analytic `m` and `m₁` on the grid.
pub fn true_curves<T: Scalar>(kind: &ScenarioKind, grid: &[T]) -> (Vec<T>, Vec<T>) {
    grid.iter()
        .map(|&x| {
            let (m, m1) = kind.eval(x.to_f64_lossy());
            (T::lit(m), T::lit(m1))
        })
        .unzip()
}

/// Super-level barcode of the true derivative on the grid.
pub fn true_diagram<T: Scalar>(kind: &ScenarioKind, grid: &[T]) -> PersistenceDiagram<T> {
    let (_, m1) = true_curves(kind, grid);
    superlevel_barcode_0d(grid, &m1).expect("analytic curve on a valid grid")
}
