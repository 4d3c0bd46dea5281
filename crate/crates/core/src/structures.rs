//! Shape verdicts built from the barcode of `m̂₁` and endpoint significance.
//!
//! The diagram used throughout is the grid barcode of the derivative estimate
//! on the (restricted) defined grid, with bars shorter than one level step
//! `2ε` dropped. Its endpoints are values `m̂₁` actually attains, so each
//! one has a critical point at which the slope test can be run.

use serde::{Deserialize, Serialize};

use crate::error::StructureError;
use crate::kernels::KernelSpec;
use crate::persistence::{superlevel_barcode_0d, Feature, PersistenceDiagram};
use crate::regress::{default_grid, evaluate_on_grid, CurveEstimate, Sample, DEFAULT_GRID_POINTS};
use crate::scalar::Scalar;
use crate::significance::{assess_feature, FeatureSignificance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Monotonicity,
    Convexity,
    Modality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conclusion {
    NonDecreasing,
    NonIncreasing,
    NotMonotone,
    Convex,
    Concave,
    NotConvex,
    IsMode,
    NotMode,
    Inconclusive,
}

impl Conclusion {
    /// The verdict for the same design with negated responses.
    pub fn mirrored(self) -> Self {
        match self {
            Conclusion::NonDecreasing => Conclusion::NonIncreasing,
            Conclusion::NonIncreasing => Conclusion::NonDecreasing,
            Conclusion::Convex => Conclusion::Concave,
            Conclusion::Concave => Conclusion::Convex,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StructureConfig<T> {
    pub epsilon: T,
    pub alpha: T,
    pub grid_points: usize,
    /// Analysis window; `None` uses the whole defined grid.
    pub region: Option<(T, T)>,
    /// Cap on the level index of the discrete filtration.
    pub grid_bound: Option<usize>,
    pub modality_delta: T,
}

impl<T: Scalar> Default for StructureConfig<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(0.1),
            alpha: T::lit(0.05),
            grid_points: DEFAULT_GRID_POINTS,
            region: None,
            grid_bound: Some(20),
            modality_delta: T::lit(0.1),
        }
    }
}

impl<T: Scalar> StructureConfig<T> {
    pub fn validate(&self) -> Result<(), StructureError> {
        if !(self.epsilon > T::zero()) || !self.epsilon.is_finite() {
            return Err(StructureError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(self.alpha > T::zero() && self.alpha < T::one()) {
            return Err(StructureError::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.grid_points < 2 {
            return Err(StructureError::InvalidConfig(format!(
                "grid needs at least 2 points, got {}",
                self.grid_points
            )));
        }
        if !(self.modality_delta > T::zero()) {
            return Err(StructureError::InvalidConfig(format!(
                "modality delta must be positive, got {}",
                self.modality_delta
            )));
        }
        if let Some((lo, hi)) = self.region {
            if !(lo < hi) {
                return Err(StructureError::InvalidConfig(format!("empty region [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// Barcode evidence for one window of the derivative estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct CurveAnalysis<T> {
    pub estimate: CurveEstimate<T>,
    /// Bars of `m̂₁` with persistence at least `2ε` (the dominant bar is
    /// always kept).
    pub diagram: PersistenceDiagram<T>,
    /// Number of bars before the `2ε` filter.
    pub raw_feature_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct StructureVerdict<T> {
    pub kind: StructureKind,
    pub conclusion: Conclusion,
    pub supporting_features: Vec<FeatureSignificance<T>>,
    pub region: (T, T),
    pub diagram: PersistenceDiagram<T>,
    /// Only for convexity: the diagram of `−m̂₁`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub negated_diagram: Option<PersistenceDiagram<T>>,
    /// Convexity step (i): significant bars of `m̂₁` and of `−m̂₁`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub significant_counts: Option<(usize, usize)>,
    /// Convexity step (i): all bars of `m̂₁` and of `−m̂₁`, unfiltered.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raw_counts: Option<(usize, usize)>,
    /// Convexity zero crossing or modality candidate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub critical_point: Option<T>,
    /// Verdicts on sub-windows (convexity step (ii), modality sides).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sub_verdicts: Vec<StructureVerdict<T>>,
}

impl<T: Scalar> StructureVerdict<T> {
    fn new(kind: StructureKind, conclusion: Conclusion, region: (T, T), diagram: PersistenceDiagram<T>) -> Self {
        Self {
            kind,
            conclusion,
            supporting_features: Vec::new(),
            region,
            diagram,
            negated_diagram: None,
            significant_counts: None,
            raw_counts: None,
            critical_point: None,
            sub_verdicts: Vec::new(),
        }
    }
}

/// Evaluates `m̂` and `m̂₁` on the configured grid and restricts to the
/// configured region.
pub fn estimate_curve<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    config: &StructureConfig<T>,
) -> Result<CurveEstimate<T>, StructureError> {
    config.validate()?;
    let grid = default_grid(sample, config.grid_points);
    let est = evaluate_on_grid(sample, kernel, &grid)?;
    Ok(match config.region {
        Some((lo, hi)) => est.restrict(lo, hi),
        None => est,
    })
}

/// Barcode of `m̂₁` on the longest defined run of `estimate`.
pub fn analyze_window<T: Scalar>(estimate: &CurveEstimate<T>, epsilon: T) -> Result<CurveAnalysis<T>, StructureError> {
    let part = estimate.defined_part().ok_or(StructureError::EmptyDiagram)?;
    let full = superlevel_barcode_0d(&part.grid, &part.deriv_values)?;
    let min_persistence = (epsilon + epsilon) * (T::one() - T::lit(1e-9));
    Ok(CurveAnalysis {
        raw_feature_count: full.len(),
        diagram: full.filtered(min_persistence),
        estimate: part,
    })
}

/// Monotonicity rule on a dominant bar `[a, b]` with its endpoint tests.
///
/// * `a ≥ 0`: non-decreasing when the death slope is negative and
///   significant, otherwise inconclusive;
/// * `b ≤ 0`: non-increasing when the birth slope is positive and
///   significant (the previous rule applied to `−Y`), otherwise inconclusive;
/// * `a < 0 < b`: not monotone when both slopes are significant with a
///   common sign, otherwise inconclusive.
pub fn monotonicity_rule<T: Scalar>(sig: &FeatureSignificance<T>) -> Conclusion {
    let (a, b) = (sig.feature.death, sig.feature.birth);
    if a >= T::zero() {
        if sig.death_fit.negative_at(sig.alpha) {
            Conclusion::NonDecreasing
        } else {
            Conclusion::Inconclusive
        }
    } else if b <= T::zero() {
        if sig.birth_fit.positive_at(sig.alpha) {
            Conclusion::NonIncreasing
        } else {
            Conclusion::Inconclusive
        }
    } else if sig.supported() {
        Conclusion::NotMonotone
    } else {
        Conclusion::Inconclusive
    }
}

fn region_of<T: Scalar>(e: &CurveEstimate<T>) -> (T, T) {
    (e.grid[0], *e.grid.last().expect("non-empty"))
}

/// Monotonicity verdict for an already evaluated window.
pub fn monotonicity_on<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    estimate: &CurveEstimate<T>,
    config: &StructureConfig<T>,
) -> Result<StructureVerdict<T>, StructureError> {
    let analysis = analyze_window(estimate, config.epsilon)?;
    let dominant = *analysis.diagram.dominant().ok_or(StructureError::EmptyDiagram)?;
    let sig = assess_feature(sample, kernel, &analysis.estimate, &dominant, config.alpha)?;
    let mut v = StructureVerdict::new(
        StructureKind::Monotonicity,
        monotonicity_rule(&sig),
        region_of(&analysis.estimate),
        analysis.diagram,
    );
    v.supporting_features.push(sig);
    Ok(v)
}

pub fn monotonicity<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    config: &StructureConfig<T>,
) -> Result<StructureVerdict<T>, StructureError> {
    let estimate = estimate_curve(sample, kernel, config)?;
    monotonicity_on(sample, kernel, &estimate, config)
}

/// Grid locations where `m̂₁` changes sign, linearly interpolated between the
/// bracketing grid points. A run of exact zeros between opposite signs
/// reports its midpoint. Undefined grid points break the scan.
pub fn zero_crossings<T: Scalar>(estimate: &CurveEstimate<T>) -> Vec<T> {
    let g = &estimate.grid;
    let v = &estimate.deriv_values;
    let mut out = Vec::new();
    // Last nonzero defined point seen in the current defined run.
    let mut last: Option<usize> = None;
    for j in 0..g.len() {
        if !estimate.defined_mask[j] {
            last = None;
            continue;
        }
        if v[j] == T::zero() {
            continue;
        }
        if let Some(i) = last {
            if (v[i] < T::zero()) != (v[j] < T::zero()) {
                if j == i + 1 {
                    out.push(g[i] + (g[j] - g[i]) * v[i] / (v[i] - v[j]));
                } else {
                    out.push((g[i + 1] + g[j - 1]) / T::lit(2.0));
                }
            }
        }
        last = Some(j);
    }
    out
}

/// Step (i) rule: more than one significant bar on either side is not
/// convex; an unsupported dominant bar on either side is inconclusive.
pub fn convexity_step_one<T: Scalar>(
    positive: &[FeatureSignificance<T>],
    negative: &[FeatureSignificance<T>],
) -> Option<Conclusion> {
    let count = |s: &[FeatureSignificance<T>]| s.iter().filter(|f| f.supported()).count();
    if count(positive) > 1 || count(negative) > 1 {
        return Some(Conclusion::NotConvex);
    }
    let dominant_ok = |s: &[FeatureSignificance<T>]| s.first().is_some_and(|f| f.supported());
    if !dominant_ok(positive) || !dominant_ok(negative) {
        return Some(Conclusion::Inconclusive);
    }
    None
}

/// Step (ii) rule on the monotonicity verdicts left and right of the
/// critical point.
pub fn convexity_step_two(left: Conclusion, right: Conclusion) -> Conclusion {
    use Conclusion::*;
    match (left, right) {
        (NonIncreasing, NonDecreasing) => Convex,
        (NonDecreasing, NonIncreasing) => Concave,
        (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
        _ => NotConvex,
    }
}

fn assess_all<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    analysis: &CurveAnalysis<T>,
    alpha: T,
) -> Result<Vec<FeatureSignificance<T>>, StructureError> {
    analysis
        .diagram
        .features()
        .iter()
        .map(|f| assess_feature(sample, kernel, &analysis.estimate, f, alpha).map_err(StructureError::from))
        .collect()
}

pub fn convexity<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    config: &StructureConfig<T>,
) -> Result<StructureVerdict<T>, StructureError> {
    let estimate = estimate_curve(sample, kernel, config)?;
    let pos = analyze_window(&estimate, config.epsilon)?;
    let neg = analyze_window(&estimate.negated(), config.epsilon)?;
    let flipped = sample.negated();
    let pos_sig = assess_all(sample, kernel, &pos, config.alpha)?;
    let neg_sig = assess_all(&flipped, kernel, &neg, config.alpha)?;

    let count = |s: &[FeatureSignificance<T>]| s.iter().filter(|f| f.supported()).count();
    let mut v = StructureVerdict::new(
        StructureKind::Convexity,
        Conclusion::Inconclusive,
        region_of(&pos.estimate),
        pos.diagram.clone(),
    );
    v.negated_diagram = Some(neg.diagram.clone());
    v.significant_counts = Some((count(&pos_sig), count(&neg_sig)));
    v.raw_counts = Some((pos.raw_feature_count, neg.raw_feature_count));
    v.supporting_features = pos_sig.clone();
    v.supporting_features.extend(neg_sig.iter().cloned());

    if let Some(c) = convexity_step_one(&pos_sig, &neg_sig) {
        v.conclusion = c;
        return Ok(v);
    }

    let c = *zero_crossings(&pos.estimate)
        .first()
        .ok_or(StructureError::NoZeroCrossing)?;
    v.critical_point = Some(c);
    let (lo, hi) = v.region;
    let left = monotonicity_on(sample, kernel, &pos.estimate.restrict(lo, c), config)?;
    let right = monotonicity_on(sample, kernel, &pos.estimate.restrict(c, hi), config)?;
    v.conclusion = convexity_step_two(left.conclusion, right.conclusion);
    v.sub_verdicts = vec![left, right];
    Ok(v)
}

/// Modality rule from the dominant bars of the two half-windows.
///
/// `m̂₁ ≥ 0` left of `c` (left death `≥ 0`) and `m̂₁ ≤ 0` right of `c`
/// (right birth `≤ 0`) is the concave shape around a mode; then both
/// governing slopes must pass in their orientation for `IsMode`. Anything
/// else is `NotMode`.
pub fn modality_rule<T: Scalar>(left: &FeatureSignificance<T>, right: &FeatureSignificance<T>) -> Conclusion {
    let shape = left.feature.death >= T::zero() && right.feature.birth <= T::zero();
    if !shape {
        return Conclusion::NotMode;
    }
    if left.death_fit.negative_at(left.alpha) && right.birth_fit.positive_at(right.alpha) {
        Conclusion::IsMode
    } else {
        Conclusion::Inconclusive
    }
}

pub fn modality<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    c: T,
    delta_nb: T,
    config: &StructureConfig<T>,
) -> Result<StructureVerdict<T>, StructureError> {
    let (lo, hi) = (c - delta_nb, c + delta_nb);
    let (xmin, xmax) = sample.x_range();
    if !(delta_nb > T::zero()) || lo < xmin || hi > xmax {
        return Err(StructureError::RegionOutsideData(lo.to_f64_lossy(), hi.to_f64_lossy()));
    }
    let config = StructureConfig {
        region: None,
        ..config.clone()
    };
    let estimate = estimate_curve(sample, kernel, &config)?;
    let left = monotonicity_on(sample, kernel, &estimate.restrict(lo, c), &config)?;
    let right = monotonicity_on(sample, kernel, &estimate.restrict(c, hi), &config)?;
    let conclusion = modality_rule(&left.supporting_features[0], &right.supporting_features[0]);
    let mut v = StructureVerdict::new(
        StructureKind::Modality,
        conclusion,
        (lo, hi),
        PersistenceDiagram::empty(),
    );
    v.diagram = PersistenceDiagram::new(
        left.diagram
            .features()
            .iter()
            .chain(right.diagram.features())
            .copied()
            .collect::<Vec<Feature<T>>>(),
    );
    v.supporting_features = vec![
        left.supporting_features[0].clone(),
        right.supporting_features[0].clone(),
    ];
    v.critical_point = Some(c);
    v.sub_verdicts = vec![left, right];
    Ok(v)
}

/// Interior zero crossings of `m̂₁` where `m̂₁` goes from positive to
/// negative (candidate modes).
pub fn mode_candidates<T: Scalar>(estimate: &CurveEstimate<T>) -> Vec<T> {
    zero_crossings(estimate)
        .into_iter()
        .filter(|&c| {
            let j = estimate.grid.partition_point(|&g| g < c);
            j > 0 && j < estimate.grid.len() && estimate.deriv_values[j - 1] > T::zero()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::linspace;
    use crate::significance::SlopeFit;

    fn fit(beta1: f64, p: f64) -> SlopeFit<f64> {
        SlopeFit {
            beta0_hat: 0.0,
            beta1_hat: beta1,
            std_err_beta1: 1.0,
            t_stat: beta1,
            p_value: p,
            n_used: 10,
        }
    }

    fn sig(death: f64, birth: f64, bd: f64, pd: f64, bb: f64, pb: f64) -> FeatureSignificance<f64> {
        let (death_fit, birth_fit) = (fit(bd, pd), fit(bb, pb));
        FeatureSignificance {
            feature: Feature::new(death, birth),
            death_critical_x: 0.0,
            birth_critical_x: 1.0,
            significant: death_fit.negative_at(0.05) && birth_fit.negative_at(0.05),
            death_fit,
            birth_fit,
            alpha: 0.05,
        }
    }

    fn sample(f: impl Fn(f64) -> f64, n: usize) -> Sample<f64> {
        let xs = linspace(-1.0, 1.0, n);
        let ys = xs.iter().map(|&x| f(x)).collect();
        Sample::new(xs, ys).unwrap()
    }

    #[test]
    fn monotonicity_rule_table() {
        use Conclusion::*;
        assert_eq!(monotonicity_rule(&sig(0.1, 1.0, -2.0, 0.01, 5.0, 0.9)), NonDecreasing);
        assert_eq!(monotonicity_rule(&sig(0.1, 1.0, -2.0, 0.2, -5.0, 0.0)), Inconclusive);
        assert_eq!(monotonicity_rule(&sig(0.1, 1.0, 2.0, 0.01, -5.0, 0.0)), Inconclusive);
        assert_eq!(monotonicity_rule(&sig(-1.0, -0.1, 0.0, 1.0, 2.0, 0.01)), NonIncreasing);
        assert_eq!(monotonicity_rule(&sig(-1.0, -0.1, 0.0, 1.0, -2.0, 0.01)), Inconclusive);
        assert_eq!(monotonicity_rule(&sig(-1.0, 1.0, -1.0, 0.01, -2.0, 0.01)), NotMonotone);
        assert_eq!(monotonicity_rule(&sig(-1.0, 1.0, 1.0, 0.01, 2.0, 0.01)), NotMonotone);
        assert_eq!(monotonicity_rule(&sig(-1.0, 1.0, -1.0, 0.01, 2.0, 0.01)), Inconclusive);
        assert_eq!(monotonicity_rule(&sig(0.0, 0.0, 0.0, 1.0, 0.0, 1.0)), Inconclusive);
    }

    #[test]
    fn rule_is_mirror_symmetric() {
        let cases = [
            sig(0.1, 1.0, -2.0, 0.01, 5.0, 0.9),
            sig(-1.0, 1.0, -1.0, 0.01, -2.0, 0.01),
            sig(-1.0, -0.1, 0.0, 1.0, 2.0, 0.01),
            sig(0.2, 0.5, 1.0, 0.5, 1.0, 0.5),
        ];
        for s in cases {
            let mirrored = FeatureSignificance {
                feature: s.feature.negated(),
                death_fit: fit(-s.birth_fit.beta1_hat, s.birth_fit.p_value),
                birth_fit: fit(-s.death_fit.beta1_hat, s.death_fit.p_value),
                ..s.clone()
            };
            assert_eq!(monotonicity_rule(&mirrored), monotonicity_rule(&s).mirrored());
        }
    }

    #[test]
    fn convexity_rule_tables() {
        use Conclusion::*;
        let good = sig(0.1, 1.0, -2.0, 0.01, -5.0, 0.01);
        let weak = sig(0.1, 1.0, -2.0, 0.5, -5.0, 0.5);
        assert_eq!(
            convexity_step_one(std::slice::from_ref(&good), std::slice::from_ref(&good)),
            None
        );
        assert_eq!(
            convexity_step_one(&[good.clone(), good.clone()], std::slice::from_ref(&good)),
            Some(NotConvex)
        );
        assert_eq!(
            convexity_step_one(std::slice::from_ref(&weak), std::slice::from_ref(&good)),
            Some(Inconclusive)
        );
        assert_eq!(convexity_step_one(&[good.clone(), weak.clone()], &[good]), None);
        assert_eq!(convexity_step_two(NonIncreasing, NonDecreasing), Convex);
        assert_eq!(convexity_step_two(NonDecreasing, NonIncreasing), Concave);
        assert_eq!(convexity_step_two(NonDecreasing, NonDecreasing), NotConvex);
        assert_eq!(convexity_step_two(Inconclusive, NonDecreasing), Inconclusive);
    }

    #[test]
    fn modality_rule_table() {
        use Conclusion::*;
        let up = sig(0.1, 1.0, -2.0, 0.01, 1.0, 0.5);
        let down = sig(-1.0, -0.1, 1.0, 0.5, 2.0, 0.01);
        assert_eq!(modality_rule(&up, &down), IsMode);
        assert_eq!(modality_rule(&down, &up), NotMode);
        let weak_down = sig(-1.0, -0.1, 1.0, 0.5, 2.0, 0.3);
        assert_eq!(modality_rule(&up, &weak_down), Inconclusive);
    }

    #[test]
    fn zero_crossing_examples() {
        let e = |grid: Vec<f64>, d: Vec<f64>| {
            let n = grid.len();
            CurveEstimate {
                grid,
                values: vec![0.0; n],
                deriv_values: d,
                kernel: KernelSpec::gaussian(1.0).unwrap(),
                defined_mask: vec![true; n],
            }
        };
        assert!(zero_crossings(&e(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0])).is_empty());
        assert_eq!(zero_crossings(&e(vec![0.0, 1.0], vec![-1.0, 1.0])), vec![0.5]);
        assert_eq!(
            zero_crossings(&e(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, 0.0, 0.0, -1.0])),
            vec![1.5]
        );
        // Touching zero without a sign change is not a crossing.
        assert!(zero_crossings(&e(vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0])).is_empty());
        let two = e(vec![0.0, 1.0, 2.0, 3.0], vec![1.0, -1.0, -1.0, 3.0]);
        assert_eq!(zero_crossings(&two), vec![0.5, 2.25]);
        assert_eq!(mode_candidates(&two), vec![0.5]);
    }

    #[test]
    fn noiseless_decreasing_line() {
        let s = sample(|x| -x, 60);
        let k = KernelSpec::gaussian(60f64.powf(-1.0 / 3.0)).unwrap();
        let v = monotonicity(&s, &k, &StructureConfig::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::NonIncreasing);
        assert!(v.diagram.features().iter().all(|f| f.birth < 0.0));
    }

    #[test]
    fn constant_data_is_inconclusive() {
        let s = sample(|_| 3.0, 40);
        let k = KernelSpec::gaussian(0.3).unwrap();
        let v = monotonicity(&s, &k, &StructureConfig::default()).unwrap();
        assert_eq!(v.conclusion, Conclusion::Inconclusive);
        assert_eq!(v.diagram.pairs(), vec![(0.0, 0.0)]);
    }

    #[test]
    fn negation_duality_on_fixed_data() {
        let s = sample(|x| x.exp() + 0.05 * (13.0 * x).sin(), 50);
        let k = KernelSpec::gaussian(0.3).unwrap();
        let cfg = StructureConfig::default();
        let a = monotonicity(&s, &k, &cfg).unwrap();
        let b = monotonicity(&s.negated(), &k, &cfg).unwrap();
        assert_eq!(b.conclusion, a.conclusion.mirrored());
    }

    #[test]
    fn monotone_data_has_no_zero_crossing() {
        let s = sample(|x| 2.0 * x + 0.3 * x * x * x, 50);
        let k = KernelSpec::gaussian(0.3).unwrap();
        match convexity(&s, &k, &StructureConfig::default()) {
            Err(StructureError::NoZeroCrossing) => {}
            Ok(v) => assert_ne!(v.conclusion, Conclusion::Convex, "{v:?}"),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn modality_region_must_fit_in_data() {
        let s = sample(|x| -x * x, 50);
        let k = KernelSpec::gaussian(0.3).unwrap();
        let r = modality(&s, &k, 0.95, 0.1, &StructureConfig::default());
        assert!(matches!(r, Err(StructureError::RegionOutsideData(_, _))));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let s = sample(|x| x, 20);
        let k = KernelSpec::gaussian(0.3).unwrap();
        let cfg = StructureConfig {
            alpha: 1.5,
            ..StructureConfig::default()
        };
        assert!(matches!(
            monotonicity(&s, &k, &cfg),
            Err(StructureError::InvalidConfig(_))
        ));
    }

    #[test]
    fn verdict_serializes_with_evidence() {
        let s = sample(|x| x, 40);
        let k = KernelSpec::gaussian(0.3).unwrap();
        let v = monotonicity(&s, &k, &StructureConfig::default()).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["kind"], "monotonicity");
        assert!(json["diagram"].is_array());
        assert!(json["supporting_features"][0]["death_fit"]["p_value"].is_number());
    }
}
