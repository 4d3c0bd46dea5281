//! Significance of barcode endpoints.
//!
//! At a critical point `x0` of `m̂₁` the derivative estimate is the weighted
//! residual sum `Σ ω_i(x0) r_i(x0)`. Regressing the residuals on the weights
//! by ordinary least squares gives a slope `β̂₁` whose t-test measures how
//! strongly the residual pattern, rather than noise, drives that value.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::SignificanceError;
use crate::kernels::KernelSpec;
use crate::persistence::Feature;
use crate::regress::{weights_and_residuals, CurveEstimate, Sample};
use crate::scalar::Scalar;

/// Matching tolerance when locating a level on the grid.
pub const LEVEL_TOLERANCE: f64 = 1e-9;

/// OLS fit of `r_i = β₀ + β₁ ω_i + η_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit<T> {
    pub beta0_hat: T,
    pub beta1_hat: T,
    pub std_err_beta1: T,
    pub t_stat: T,
    /// Two-sided p-value for `β₁ = 0` on `n_used − 2` degrees of freedom.
    pub p_value: T,
    pub n_used: usize,
}

impl<T: Scalar> SlopeFit<T> {
    /// `β̂₁ < 0` and `p ≤ α`.
    pub fn negative_at(&self, alpha: T) -> bool {
        self.beta1_hat < T::zero() && self.p_value <= alpha
    }

    /// `β̂₁ > 0` and `p ≤ α`: the same test after negating the responses.
    pub fn positive_at(&self, alpha: T) -> bool {
        self.beta1_hat > T::zero() && self.p_value <= alpha
    }
}

pub fn fit_slope<T: Scalar>(residuals: &[T], weights: &[T]) -> Result<SlopeFit<T>, SignificanceError> {
    if residuals.len() != weights.len() {
        return Err(SignificanceError::LengthMismatch(residuals.len(), weights.len()));
    }
    let n = residuals.len();
    if n < 3 {
        return Err(SignificanceError::TooFewPoints(n));
    }
    if weights.iter().all(|&w| w == weights[0]) {
        return Err(SignificanceError::DegenerateRegressor);
    }
    let nt = T::from_usize(n).expect("usize fits");
    // Center on the first observation before averaging so a constant column
    // yields exact zeros rather than rounding noise.
    let (r0, w0) = (residuals[0], weights[0]);
    let r_bar = residuals.iter().fold(T::zero(), |s, &r| s + (r - r0)) / nt;
    let w_bar = weights.iter().fold(T::zero(), |s, &w| s + (w - w0)) / nt;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&r, &w) in residuals.iter().zip(weights) {
        let dw = w - w0 - w_bar;
        sxx = sxx + dw * dw;
        sxy = sxy + dw * (r - r0 - r_bar);
    }
    let beta1 = sxy / sxx;
    let beta0 = (r0 + r_bar) - beta1 * (w0 + w_bar);
    let sse = residuals.iter().zip(weights).fold(T::zero(), |s, (&r, &w)| {
        let e = (r - r0 - r_bar) - beta1 * (w - w0 - w_bar);
        s + e * e
    });
    let dof = n - 2;
    let sigma2 = sse / T::from_usize(dof).expect("usize fits");
    let se = (sigma2 / sxx).sqrt();
    let (t_stat, p_value) = if se > T::zero() {
        let t = beta1 / se;
        (t, T::lit(two_sided_p(t.to_f64_lossy(), dof)))
    } else if beta1 == T::zero() {
        (T::zero(), T::one())
    } else {
        (beta1.signum() * T::infinity(), T::zero())
    };
    Ok(SlopeFit {
        beta0_hat: beta0,
        beta1_hat: beta1,
        std_err_beta1: se,
        t_stat,
        p_value,
        n_used: n,
    })
}

fn two_sided_p(t: f64, dof: usize) -> f64 {
    let dist = StudentsT::new(0.0, 1.0, dof as f64).expect("dof >= 1");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Indices of grid points that are local extrema of `m̂₁` (plateaus and
/// endpoints included) and whose value is within tolerance of `level`.
fn critical_indices<T: Scalar>(estimate: &CurveEstimate<T>, level: T) -> Result<Vec<usize>, SignificanceError> {
    let v = &estimate.deriv_values;
    let defined = estimate.defined_mask.iter().filter(|&&d| d).count();
    if defined < 2 {
        return Err(SignificanceError::TooFewGridPoints);
    }
    let tol = T::lit(LEVEL_TOLERANCE) * (T::one() + level.abs());
    let neighbour = |j: Option<usize>| j.filter(|&j| j < v.len() && estimate.defined_mask[j]).map(|j| v[j]);
    let hits: Vec<usize> = (0..v.len())
        .filter(|&j| estimate.defined_mask[j] && (v[j] - level).abs() <= tol)
        .filter(|&j| {
            let nb = [neighbour(j.checked_sub(1)), neighbour(Some(j + 1))];
            let is_max = nb.iter().flatten().all(|&u| u <= v[j]);
            let is_min = nb.iter().flatten().all(|&u| u >= v[j]);
            is_max || is_min
        })
        .collect();
    if hits.is_empty() {
        return Err(SignificanceError::LevelNotAttained(level.to_f64_lossy()));
    }
    Ok(hits)
}

/// Grid locations where `m̂₁` attains `level` at a local extremum, ascending.
pub fn locate_critical_points<T: Scalar>(estimate: &CurveEstimate<T>, level: T) -> Result<Vec<T>, SignificanceError> {
    Ok(critical_indices(estimate, level)?
        .into_iter()
        .map(|j| estimate.grid[j])
        .collect())
}

/// A single critical point for `level`: the candidate with the largest
/// `|second difference|` of `m̂₁`, leftmost on ties. Endpoints score zero.
pub fn select_critical_point<T: Scalar>(estimate: &CurveEstimate<T>, level: T) -> Result<T, SignificanceError> {
    let v = &estimate.deriv_values;
    let m = &estimate.defined_mask;
    let sharpness = |j: usize| {
        if j == 0 || j + 1 >= v.len() || !m[j - 1] || !m[j + 1] {
            T::zero()
        } else {
            (v[j - 1] - v[j] - v[j] + v[j + 1]).abs()
        }
    };
    let mut best: Option<(usize, T)> = None;
    for j in critical_indices(estimate, level)? {
        let s = sharpness(j);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((j, s));
        }
    }
    Ok(estimate.grid[best.expect("non-empty").0])
}

/// Slope tests at both endpoints of one bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSignificance<T> {
    pub feature: Feature<T>,
    pub death_critical_x: T,
    pub birth_critical_x: T,
    pub death_fit: SlopeFit<T>,
    pub birth_fit: SlopeFit<T>,
    /// Both slopes negative and significant at `alpha`.
    pub significant: bool,
    pub alpha: T,
}

impl<T: Scalar> FeatureSignificance<T> {
    /// Both slopes positive and significant: the rule applied to `−Y`.
    pub fn mirrored_significant(&self) -> bool {
        self.death_fit.positive_at(self.alpha) && self.birth_fit.positive_at(self.alpha)
    }

    /// Significant in either orientation.
    pub fn supported(&self) -> bool {
        self.significant || self.mirrored_significant()
    }

    pub fn row(&self) -> SignificanceRow<T> {
        SignificanceRow {
            death: self.feature.death,
            birth: self.feature.birth,
            death_x: self.death_critical_x,
            birth_x: self.birth_critical_x,
            beta1_death: self.death_fit.beta1_hat,
            p_death: self.death_fit.p_value,
            beta1_birth: self.birth_fit.beta1_hat,
            p_birth: self.birth_fit.p_value,
            significant: self.significant,
        }
    }
}

/// Flat per-feature row for significance tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignificanceRow<T> {
    pub death: T,
    pub birth: T,
    pub death_x: T,
    pub birth_x: T,
    pub beta1_death: T,
    pub p_death: T,
    pub beta1_birth: T,
    pub p_birth: T,
    pub significant: bool,
}

/// Slope fit of the residuals on the weights at `x0`.
pub fn fit_at<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>, x0: T) -> Result<SlopeFit<T>, SignificanceError> {
    let (w, r) = weights_and_residuals(sample, kernel, x0)?;
    fit_slope(&r, &w)
}

pub fn assess_feature<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    estimate: &CurveEstimate<T>,
    feature: &Feature<T>,
    alpha: T,
) -> Result<FeatureSignificance<T>, SignificanceError> {
    let death_x = select_critical_point(estimate, feature.death)?;
    let birth_x = select_critical_point(estimate, feature.birth)?;
    let death_fit = fit_at(sample, kernel, death_x)?;
    let birth_fit = fit_at(sample, kernel, birth_x)?;
    Ok(FeatureSignificance {
        feature: *feature,
        death_critical_x: death_x,
        birth_critical_x: birth_x,
        significant: death_fit.negative_at(alpha) && birth_fit.negative_at(alpha),
        death_fit,
        birth_fit,
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ols_slope_golden;
    use crate::regress::{evaluate_on_grid, linspace};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn curve(grid: Vec<f64>, d: Vec<f64>) -> CurveEstimate<f64> {
        let n = grid.len();
        CurveEstimate {
            grid,
            values: vec![0.0; n],
            deriv_values: d,
            kernel: KernelSpec::gaussian(1.0).unwrap(),
            defined_mask: vec![true; n],
        }
    }

    #[test]
    fn perfect_line_is_highly_significant() {
        let w = [0.1, -0.3, 0.5, 0.9, -1.2];
        let r: Vec<f64> = w.iter().map(|x| -2.0 * x + 1.0).collect();
        let f = fit_slope(&r, &w).unwrap();
        assert_relative_eq!(f.beta1_hat, -2.0, epsilon = 1e-12);
        assert_relative_eq!(f.beta0_hat, 1.0, epsilon = 1e-12);
        assert!(f.p_value < 1e-10);
        assert_eq!(f.n_used, 5);
    }

    #[test]
    fn constant_residuals_give_zero_slope() {
        let w = [0.1, -0.3, 0.5, 0.9];
        let f = fit_slope(&[0.7; 4], &w).unwrap();
        assert_eq!(f.beta1_hat, 0.0);
        assert_eq!(f.p_value, 1.0);
        let f = fit_slope(&[0.0; 4], &w).unwrap();
        assert_eq!((f.beta1_hat, f.p_value), (0.0, 1.0));
    }

    #[test]
    fn fit_errors() {
        assert_eq!(
            fit_slope(&[1.0, 2.0], &[0.0, 1.0]),
            Err(SignificanceError::TooFewPoints(2))
        );
        assert_eq!(
            fit_slope(&[1.0, 2.0, 3.0], &[0.5; 3]),
            Err(SignificanceError::DegenerateRegressor)
        );
        assert_eq!(
            fit_slope(&[1.0, 2.0, 3.0], &[0.5; 4]),
            Err(SignificanceError::LengthMismatch(3, 4))
        );
    }

    #[test]
    fn p_value_matches_reference_t_distribution() {
        // t = 2.0 on 10 dof: two-sided p = 0.0733880...
        assert_relative_eq!(two_sided_p(2.0, 10), 0.07338803477074, epsilon = 1e-10);
        assert_relative_eq!(two_sided_p(0.0, 5), 1.0, epsilon = 1e-15);
        assert!(two_sided_p(80.0, 48) > 0.0);
    }

    #[test]
    fn critical_points_of_monotone_curve() {
        let grid = linspace(0.0, 1.0, 11);
        let d: Vec<f64> = grid.iter().map(|x| 2.0 * x - 0.5).collect();
        let e = curve(grid, d);
        assert_eq!(locate_critical_points(&e, 1.5).unwrap(), vec![1.0]);
        assert_eq!(locate_critical_points(&e, -0.5).unwrap(), vec![0.0]);
        // Attained, but not at an extremum.
        assert!(matches!(
            locate_critical_points(&e, 0.5),
            Err(SignificanceError::LevelNotAttained(_))
        ));
        assert!(matches!(
            locate_critical_points(&e, 3.0),
            Err(SignificanceError::LevelNotAttained(_))
        ));
    }

    #[test]
    fn symmetric_double_peak_has_two_births() {
        let grid = linspace(0.0, 6.0, 7);
        let e = curve(grid, vec![0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
        assert_eq!(locate_critical_points(&e, 1.0).unwrap(), vec![1.0, 5.0]);
        assert_eq!(select_critical_point(&e, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn sharper_extremum_is_preferred() {
        let grid = linspace(0.0, 6.0, 7);
        let e = curve(grid, vec![0.0, 0.8, 1.0, 0.8, -1.0, 1.0, -1.0]);
        assert_eq!(locate_critical_points(&e, 1.0).unwrap(), vec![2.0, 5.0]);
        assert_eq!(select_critical_point(&e, 1.0).unwrap(), 5.0);
    }

    #[test]
    fn too_few_grid_points() {
        let e = curve(vec![0.0], vec![1.0]);
        assert_eq!(
            locate_critical_points(&e, 1.0),
            Err(SignificanceError::TooFewGridPoints)
        );
    }

    #[test]
    fn constant_sample_is_not_significant() {
        let xs = linspace(-1.0, 1.0, 30);
        let s = Sample::new(xs.clone(), vec![2.0; 30]).unwrap();
        let k = KernelSpec::gaussian(0.3).unwrap();
        let e = evaluate_on_grid(&s, &k, &linspace(-1.0, 1.0, 41)).unwrap();
        let fsig = assess_feature(&s, &k, &e, &Feature::new(0.0, 0.0), 0.05).unwrap();
        assert_eq!(fsig.death_fit.beta1_hat, 0.0);
        assert!(!fsig.significant && !fsig.supported());
    }

    #[test]
    fn engineered_negative_slope_is_significant() {
        // A single design point at each location keeps weights informative.
        let w: Vec<f64> = (0..20).map(|i| (i as f64 - 9.5) / 10.0).collect();
        let r: Vec<f64> = w
            .iter()
            .enumerate()
            .map(|(i, w)| -w + 1e-3 * ((i * 7 % 5) as f64))
            .collect();
        let f = fit_slope(&r, &w).unwrap();
        assert!(f.negative_at(0.05) && !f.positive_at(0.05));
    }

    #[test]
    fn assessment_is_deterministic() {
        let xs = linspace(-1.0, 1.0, 40);
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.exp() + 0.05 * (17.0 * x).sin()).collect();
        let s = Sample::new(xs, ys).unwrap();
        let k = KernelSpec::gaussian(0.3).unwrap();
        let e = evaluate_on_grid(&s, &k, &linspace(-1.0, 1.0, 101)).unwrap();
        let lo = e.deriv_values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = e.deriv_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let a = assess_feature(&s, &k, &e, &Feature::new(lo, hi), 0.05).unwrap();
        let b = assess_feature(&s, &k, &e, &Feature::new(lo, hi), 0.05).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn row_mirrors_fits() {
        let xs = linspace(-1.0, 1.0, 40);
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let s = Sample::new(xs, ys).unwrap();
        let k = KernelSpec::gaussian(0.3).unwrap();
        let e = evaluate_on_grid(&s, &k, &linspace(-1.0, 1.0, 101)).unwrap();
        let lo = e.deriv_values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = e.deriv_values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let a = assess_feature(&s, &k, &e, &Feature::new(lo, hi), 0.05).unwrap();
        let row = a.row();
        assert_eq!(row.p_death, a.death_fit.p_value);
        assert_eq!(row.beta1_birth, a.birth_fit.beta1_hat);
        let json = serde_json::to_value(row).unwrap();
        for key in [
            "death",
            "birth",
            "death_x",
            "birth_x",
            "beta1_death",
            "p_death",
            "beta1_birth",
            "p_birth",
            "significant",
        ] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn slope_matches_normal_equations_and_golden_section(
            pts in prop::collection::vec((-2.0f64..2.0, -3.0f64..3.0), 5..40)
        ) {
            let w: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let r: Vec<f64> = pts.iter().map(|p| p.1).collect();
            prop_assume!(w.iter().any(|&x| (x - w[0]).abs() > 1e-3));
            let f = fit_slope(&r, &w).unwrap();
            let n = w.len() as f64;
            let (wb, rb) = (w.iter().sum::<f64>() / n, r.iter().sum::<f64>() / n);
            let sxy: f64 = w.iter().zip(&r).map(|(a, b)| (a - wb) * (b - rb)).sum();
            let sxx: f64 = w.iter().map(|a| (a - wb) * (a - wb)).sum();
            prop_assert!((f.beta1_hat - sxy / sxx).abs() <= 1e-10 * (1.0 + f.beta1_hat.abs()));
            prop_assert!((f.beta1_hat - ols_slope_golden(&r, &w)).abs() <= 1e-6);
            prop_assert!((0.0..=1.0).contains(&f.p_value));
        }

        #[test]
        fn scaling_residuals_scales_slope_only(
            pts in prop::collection::vec((-2.0f64..2.0, -3.0f64..3.0), 5..40),
            c in 0.01f64..100.0,
        ) {
            let w: Vec<f64> = pts.iter().map(|p| p.0).collect();
            let r: Vec<f64> = pts.iter().map(|p| p.1).collect();
            prop_assume!(w.iter().any(|&x| (x - w[0]).abs() > 1e-3));
            let rs: Vec<f64> = r.iter().map(|v| v * c).collect();
            let (a, b) = (fit_slope(&r, &w).unwrap(), fit_slope(&rs, &w).unwrap());
            prop_assert!((b.beta1_hat - c * a.beta1_hat).abs() <= 1e-9 * (1.0 + (c * a.beta1_hat).abs()));
            prop_assert!((b.t_stat - a.t_stat).abs() <= 1e-9 * (1.0 + a.t_stat.abs()));
            prop_assert!((b.p_value - a.p_value).abs() <= 1e-9);
        }
    }
}
