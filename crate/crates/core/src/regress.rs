//! Nadaraya–Watson regression, its analytic first derivative, and the
//! weight/residual decomposition of that derivative.

use serde::{Deserialize, Serialize};

use crate::error::RegressError;
use crate::kernels::KernelSpec;
use crate::scalar::Scalar;

/// Observed `(x, y)` pairs with a cached ordering by `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    xs: Vec<T>,
    ys: Vec<T>,
    /// Indices into `xs` sorted by ascending x (stable for ties).
    order: Vec<usize>,
    sorted_xs: Vec<T>,
}

impl<T: Scalar> Sample<T> {
    pub fn new(xs: Vec<T>, ys: Vec<T>) -> Result<Self, RegressError> {
        if xs.len() != ys.len() {
            return Err(RegressError::TooFewPoints(xs.len().min(ys.len())));
        }
        if xs.len() < 2 {
            return Err(RegressError::TooFewPoints(xs.len()));
        }
        if let Some(i) = xs.iter().zip(&ys).position(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(RegressError::NonFinite(i));
        }
        let mut order: Vec<usize> = (0..xs.len()).collect();
        order.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("finite"));
        let sorted_xs = order.iter().map(|&i| xs[i]).collect();
        Ok(Self {
            xs,
            ys,
            order,
            sorted_xs,
        })
    }

    pub fn from_points(points: &[(T, T)]) -> Result<Self, RegressError> {
        let (xs, ys) = points.iter().copied().unzip();
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[T] {
        &self.xs
    }

    pub fn ys(&self) -> &[T] {
        &self.ys
    }

    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn x_range(&self) -> (T, T) {
        (self.sorted_xs[0], *self.sorted_xs.last().expect("n >= 2"))
    }

    /// `max |y_i|`, recorded for the consistency-bound diagnostic.
    pub fn y_max(&self) -> T {
        self.ys.iter().fold(T::zero(), |m, y| m.max(y.abs()))
    }

    /// The same design points with every response negated.
    pub fn negated(&self) -> Self {
        Self {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|&y| -y).collect(),
            order: self.order.clone(),
            sorted_xs: self.sorted_xs.clone(),
        }
    }

    /// Original indices of points with `|x - xi| <= h`.
    fn window(&self, x: T, h: T) -> impl Iterator<Item = usize> + '_ {
        let lo = self.sorted_xs.partition_point(|&v| v < x - h);
        let hi = self.sorted_xs.partition_point(|&v| v <= x + h);
        self.order[lo..hi].iter().copied()
    }
}

/// Kernel sums at one evaluation point.
#[derive(Debug, Clone, Copy)]
struct KernelSums<T> {
    /// Σ K_h
    k: T,
    /// Responses are summed relative to this value (the first response in
    /// the window) so constant data cancels exactly.
    y_ref: T,
    /// Σ K_h · (Y − y_ref)
    ky: T,
    /// Σ K_{1,h}
    k1: T,
    /// Σ K_{1,h} · (Y − y_ref)
    k1y: T,
}

fn kernel_sums<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>, x: T) -> Option<KernelSums<T>> {
    let mut s = KernelSums {
        k: T::zero(),
        y_ref: T::zero(),
        ky: T::zero(),
        k1: T::zero(),
        k1y: T::zero(),
    };
    // Widen the window slightly so rounding in (x - xi) / h never drops a point
    // the kernel itself would keep; the kernel zeroes anything outside.
    let h = kernel.bandwidth * (T::one() + T::lit(1e-12));
    for (j, i) in sample.window(x, h).enumerate() {
        if j == 0 {
            s.y_ref = sample.ys[i];
        }
        let (k, k1) = kernel.scaled(x, sample.xs[i]);
        let y = sample.ys[i] - s.y_ref;
        s.k = s.k + k;
        s.ky = s.ky + k * y;
        s.k1 = s.k1 + k1;
        s.k1y = s.k1y + k1 * y;
    }
    if s.k <= T::division_guard() {
        None
    } else {
        Some(s)
    }
}

impl<T: Scalar> KernelSums<T> {
    fn estimate(&self) -> T {
        self.y_ref + self.ky / self.k
    }

    fn derivative(&self) -> T {
        self.k1y / self.k - self.ky * self.k1 / (self.k * self.k)
    }
}

/// `m̂(x) = Σ K_h(x - X_i) Y_i / Σ K_h(x - X_i)`; `None` when no sample point
/// lies within the kernel window.
pub fn nw_estimate<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>, x: T) -> Option<T> {
    kernel_sums(sample, kernel, x).map(|s| s.estimate())
}

/// Analytic derivative of [`nw_estimate`]:
/// `Σ Y K_{1,h} / Σ K_h − (Σ Y K_h)(Σ K_{1,h}) / (Σ K_h)^2`, evaluated with
/// responses centered on the first one in the window (the expression is
/// shift-invariant).
pub fn nw_derivative<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>, x: T) -> Option<T> {
    kernel_sums(sample, kernel, x).map(|s| s.derivative())
}

/// Both the estimate and its derivative from one pass over the window.
pub fn nw_estimate_and_derivative<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>, x: T) -> Option<(T, T)> {
    kernel_sums(sample, kernel, x).map(|s| (s.estimate(), s.derivative()))
}

/// Weights `ω_i(x0) = K_{1,h}(x0 − X_i) / Σ_j K_h(x0 − X_j)` and residuals
/// `r_i(x0) = Y_i − m̂(x0)` for every sample point, in sample order.
///
/// `Σ ω_i r_i` reproduces [`nw_derivative`] at `x0`.
pub fn weights_and_residuals<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    x0: T,
) -> Result<(Vec<T>, Vec<T>), RegressError> {
    let sums = kernel_sums(sample, kernel, x0).ok_or_else(|| RegressError::UndefinedAtPoint(x0.to_f64_lossy()))?;
    let m_hat = sums.estimate();
    let weights = sample.xs.iter().map(|&xi| kernel.scaled(x0, xi).1 / sums.k).collect();
    let residuals = sample.ys.iter().map(|&y| y - m_hat).collect();
    Ok((weights, residuals))
}

/// `m̂` and `m̂₁` tabulated on an evaluation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate<T> {
    pub grid: Vec<T>,
    pub values: Vec<T>,
    pub deriv_values: Vec<T>,
    pub kernel: KernelSpec<T>,
    /// False where the kernel window was empty; `values`/`deriv_values` hold
    /// NaN there.
    pub defined_mask: Vec<bool>,
}

impl<T: Scalar> CurveEstimate<T> {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index range of the longest run of defined grid points (leftmost on ties).
    pub fn defined_segment(&self) -> Option<std::ops::Range<usize>> {
        let mut best: Option<std::ops::Range<usize>> = None;
        let mut start = None;
        for (i, &ok) in self.defined_mask.iter().chain(std::iter::once(&false)).enumerate() {
            match (ok, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    if best.as_ref().is_none_or(|b| i - s > b.len()) {
                        best = Some(s..i);
                    }
                    start = None;
                }
                _ => {}
            }
        }
        best
    }

    /// Copy restricted to `range` of grid indices.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            grid: self.grid[range.clone()].to_vec(),
            values: self.values[range.clone()].to_vec(),
            deriv_values: self.deriv_values[range.clone()].to_vec(),
            kernel: self.kernel,
            defined_mask: self.defined_mask[range].to_vec(),
        }
    }

    /// Restriction to the longest defined run.
    pub fn defined_part(&self) -> Option<Self> {
        self.defined_segment().map(|r| self.slice(r))
    }

    /// Restriction to grid points inside `[lo, hi]`.
    pub fn restrict(&self, lo: T, hi: T) -> Self {
        let a = self.grid.partition_point(|&g| g < lo);
        let b = self.grid.partition_point(|&g| g <= hi);
        self.slice(a..b.max(a))
    }

    /// Copy with the derivative curve negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = -*v);
        out.deriv_values.iter_mut().for_each(|v| *v = -*v);
        out
    }
}

/// `points` equispaced values spanning `[lo, hi]` inclusive.
pub fn linspace<T: Scalar>(lo: T, hi: T, points: usize) -> Vec<T> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / T::from_usize(points - 1).expect("usize fits");
            let mut v: Vec<T> = (0..points)
                .map(|i| lo + step * T::from_usize(i).expect("usize fits"))
                .collect();
            v[points - 1] = hi;
            v
        }
    }
}

/// Default evaluation grid: equispaced over the sample's x range.
pub fn default_grid<T: Scalar>(sample: &Sample<T>, points: usize) -> Vec<T> {
    let (lo, hi) = sample.x_range();
    if hi > lo {
        linspace(lo, hi, points)
    } else {
        vec![lo]
    }
}

pub const DEFAULT_GRID_POINTS: usize = 512;

pub fn evaluate_on_grid<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    grid: &[T],
) -> Result<CurveEstimate<T>, RegressError> {
    if grid.is_empty() {
        return Err(RegressError::EmptyGrid);
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(RegressError::NonMonotoneGrid(i + 1));
    }
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    let mut deriv_values = Vec::with_capacity(n);
    let mut defined_mask = Vec::with_capacity(n);
    for &x in grid {
        match nw_estimate_and_derivative(sample, kernel, x) {
            Some((m, d)) => {
                values.push(m);
                deriv_values.push(d);
                defined_mask.push(true);
            }
            None => {
                values.push(T::nan());
                deriv_values.push(T::nan());
                defined_mask.push(false);
            }
        }
    }
    Ok(CurveEstimate {
        grid: grid.to_vec(),
        values,
        deriv_values,
        kernel: *kernel,
        defined_mask,
    })
}
