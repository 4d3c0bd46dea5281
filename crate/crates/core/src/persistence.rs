//! Zero-dimensional super-level persistence.
//!
//! Two routes live here:
//!
//! * [`superlevel_barcode_0d`] sweeps a sampled function from its maximum
//!   down with a union-find over grid adjacency and pairs components by the
//!   elder rule;
//! * the discrete estimator ([`build_discrete_filtration`] +
//!   [`estimated_persistence`]) thresholds the derivative estimate at the data
//!   points on a lattice of levels `t_i = t_max − 2iε`, thickens the surviving
//!   points into radius-`h` intervals and tracks the resulting components
//!   across levels.
//!
//! Bars use the super-level convention `death ≤ birth`. The component that
//! never dies is closed off at the lowest level of the sweep so every bar is
//! finite.

use std::cmp::Ordering;

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::PersistenceError;
use crate::kernels::KernelSpec;
use crate::regress::{nw_derivative, Sample};
use crate::scalar::Scalar;

/// One bar `[death, birth]` of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature<T> {
    pub death: T,
    pub birth: T,
    pub degree: usize,
}

impl<T: Scalar> Feature<T> {
    pub fn new(death: T, birth: T) -> Self {
        Self {
            death,
            birth,
            degree: 0,
        }
    }

    pub fn persistence(&self) -> T {
        self.birth - self.death
    }

    /// Negation maps a super-level bar of `f` to the matching value range of
    /// `-f` with the endpoints swapped.
    pub fn negated(&self) -> Self {
        Self {
            death: -self.birth,
            birth: -self.death,
            degree: self.degree,
        }
    }
}

/// Multiset of features, kept in canonical order: descending persistence,
/// then descending birth, then descending death.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram<T> {
    features: Vec<Feature<T>>,
}

fn canonical_order<T: Scalar>(a: &Feature<T>, b: &Feature<T>) -> Ordering {
    let by = |x: T, y: T| y.partial_cmp(&x).unwrap_or(Ordering::Equal);
    by(a.persistence(), b.persistence())
        .then_with(|| by(a.birth, b.birth))
        .then_with(|| by(a.death, b.death))
        .then_with(|| a.degree.cmp(&b.degree))
}

impl<T: Scalar> PersistenceDiagram<T> {
    pub fn new(mut features: Vec<Feature<T>>) -> Self {
        features.sort_by(canonical_order);
        Self { features }
    }

    pub fn empty() -> Self {
        Self { features: Vec::new() }
    }

    pub fn from_pairs(pairs: &[(T, T)]) -> Self {
        Self::new(pairs.iter().map(|&(d, b)| Feature::new(d, b)).collect())
    }

    /// Features in canonical order (largest persistence first).
    pub fn features(&self) -> &[Feature<T>] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Largest-persistence feature.
    pub fn dominant(&self) -> Option<&Feature<T>> {
        self.features.first()
    }

    /// Common degree of the features, `None` when empty.
    pub fn degree(&self) -> Option<usize> {
        self.features.first().map(|f| f.degree)
    }

    /// `(death, birth)` pairs in canonical order.
    pub fn pairs(&self) -> Vec<(T, T)> {
        self.features.iter().map(|f| (f.death, f.birth)).collect()
    }

    /// Drops features shorter than `min_persistence`, always keeping the
    /// dominant one.
    pub fn filtered(&self, min_persistence: T) -> Self {
        let features = self
            .features
            .iter()
            .enumerate()
            .filter(|(i, f)| *i == 0 || f.persistence() >= min_persistence)
            .map(|(_, f)| *f)
            .collect();
        Self { features }
    }
}

impl<T: Scalar> Serialize for PersistenceDiagram<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.features.serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for PersistenceDiagram<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let features = Vec::<Feature<T>>::deserialize(deserializer)?;
        Ok(Self::new(features))
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Links two roots and returns the new root.
    fn link(&mut self, a: usize, b: usize) -> usize {
        match self.rank[a].cmp(&self.rank[b]) {
            Ordering::Less => {
                self.parent[a] = b;
                b
            }
            Ordering::Greater => {
                self.parent[b] = a;
                a
            }
            Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
                a
            }
        }
    }
}

fn validate_curve<T: Scalar>(grid: &[T], values: &[T]) -> Result<(), PersistenceError> {
    if grid.len() != values.len() {
        return Err(PersistenceError::LengthMismatch {
            grid: grid.len(),
            values: values.len(),
        });
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(PersistenceError::NonMonotoneGrid(i + 1));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(PersistenceError::NonFinite(i));
    }
    Ok(())
}

/// 0-dimensional super-level barcode of the piecewise-linear interpolant of
/// `(grid, values)`.
///
/// Vertices enter in decreasing value order (ties: ascending index). A vertex
/// with no processed neighbour starts a component; a vertex joining two
/// components kills the younger one (lower birth value, later birth index on
/// ties) at its own value. Zero-length pairs are not reported.
pub fn superlevel_barcode_0d<T: Scalar>(grid: &[T], values: &[T]) -> Result<PersistenceDiagram<T>, PersistenceError> {
    validate_curve(grid, values)?;
    let n = values.len();
    if n == 0 {
        return Ok(PersistenceDiagram::empty());
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite").then(a.cmp(&b)));

    let mut uf = UnionFind::new(n);
    let mut processed = vec![false; n];
    // Birth vertex of the component rooted at each root.
    let mut birth_of = vec![usize::MAX; n];
    let mut features = Vec::new();
    // (rank in processing order) decides elder on equal birth values
    let mut position = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        position[i] = p;
    }

    for &i in &order {
        processed[i] = true;
        birth_of[i] = i;
        let mut root = i;
        for j in [i.wrapping_sub(1), i + 1] {
            if j >= n || !processed[j] {
                continue;
            }
            let other = uf.find(j);
            let mine = uf.find(root);
            if other == mine {
                continue;
            }
            let (bo, bm) = (birth_of[other], birth_of[mine]);
            // Elder: processed earlier in the sweep.
            let (elder, younger) = if position[bo] < position[bm] {
                (bo, bm)
            } else {
                (bm, bo)
            };
            if values[younger] > values[i] {
                features.push(Feature::new(values[i], values[younger]));
            }
            root = uf.link(other, mine);
            birth_of[root] = elder;
        }
    }
    let root = uf.find(0);
    let global_min = values.iter().copied().fold(T::infinity(), T::min);
    features.push(Feature::new(global_min, values[birth_of[root]]));
    Ok(PersistenceDiagram::new(features))
}

/// x-values of sample points whose derivative estimate is at least `t`.
/// `None` entries (undefined estimates) never pass.
pub fn filtered_points<T: Scalar>(sample: &Sample<T>, deriv_at_data: &[Option<T>], t: T) -> Vec<T> {
    sample
        .xs()
        .iter()
        .zip(deriv_at_data)
        .filter_map(|(&x, d)| d.filter(|&d| d >= t).map(|_| x))
        .collect()
}

/// The level lattice `t_i = t_max − 2iε` with `t_max = 2εN_ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltrationPlan<T> {
    pub epsilon: T,
    pub n_eps: i64,
    pub t_max: T,
    /// Descending levels, `levels[i] = t_max − 2iε`.
    pub levels: Vec<T>,
    pub radius: T,
    /// True when a grid bound stopped the descent before the lowest value.
    pub truncated: bool,
}

impl<T: Scalar> FiltrationPlan<T> {
    pub fn step(&self) -> T {
        self.epsilon + self.epsilon
    }

    pub fn lowest(&self) -> T {
        *self.levels.last().expect("plan has at least one level")
    }
}

/// Builds the level lattice for the given derivative values.
///
/// `N_ε = ⌈max / 2ε⌉`; levels descend from `t_max` in steps of `2ε` and stop
/// at the first level at or below the minimum value.
pub fn build_plan<T: Scalar>(deriv_values: &[T], epsilon: T, h: T) -> Result<FiltrationPlan<T>, PersistenceError> {
    build_plan_bounded(deriv_values, epsilon, h, None)
}

/// [`build_plan`] with an optional cap `g` on the level index (`i ≤ g`).
pub fn build_plan_bounded<T: Scalar>(
    deriv_values: &[T],
    epsilon: T,
    h: T,
    grid_bound: Option<usize>,
) -> Result<FiltrationPlan<T>, PersistenceError> {
    if !(epsilon > T::zero()) || !epsilon.is_finite() {
        return Err(PersistenceError::NonPositiveEpsilon(epsilon.to_f64_lossy()));
    }
    if deriv_values.is_empty() {
        return Err(PersistenceError::EmptyValues);
    }
    if let Some(i) = deriv_values.iter().position(|v| !v.is_finite()) {
        return Err(PersistenceError::NonFinite(i));
    }
    let max = deriv_values.iter().copied().fold(T::neg_infinity(), T::max);
    let min = deriv_values.iter().copied().fold(T::infinity(), T::min);
    let step = epsilon + epsilon;
    let n_eps_f = (max / step).ceil();
    let n_eps = n_eps_f.to_i64().ok_or(PersistenceError::NonFinite(0))?;
    let t_max = step * n_eps_f;
    let mut levels = Vec::new();
    let mut truncated = false;
    let mut i = 0usize;
    loop {
        let t = t_max - step * T::from_usize(i).expect("usize fits");
        levels.push(t);
        if t <= min {
            break;
        }
        if grid_bound.is_some_and(|g| i >= g) {
            truncated = true;
            break;
        }
        i += 1;
    }
    Ok(FiltrationPlan {
        epsilon,
        n_eps,
        t_max,
        levels,
        radius: h,
        truncated,
    })
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Interval<T> {
    pub fn contains(&self, other: &Interval<T>) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Union of `[c − r, c + r]` over the centers as sorted disjoint intervals.
/// Intervals that touch are merged.
pub fn union_of_balls<T: Scalar>(centers: &[T], radius: T) -> Vec<Interval<T>> {
    let mut sorted = centers.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut out: Vec<Interval<T>> = Vec::new();
    for c in sorted {
        let (lo, hi) = (c - radius, c + radius);
        match out.last_mut() {
            Some(last) if lo <= last.hi => last.hi = last.hi.max(hi),
            _ => out.push(Interval { lo, hi }),
        }
    }
    out
}

/// Nested sequence of interval unions, one per plan level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFiltration<T> {
    pub plan: FiltrationPlan<T>,
    pub sets_per_level: Vec<Vec<Interval<T>>>,
    /// Filtered point sets per level, kept for component-count audits.
    pub points_per_level: Vec<Vec<T>>,
}

impl<T: Scalar> DiscreteFiltration<T> {
    /// Checks `set(t_i) ⊆ set(t_{i+1})` for every consecutive pair.
    pub fn check_nested(&self) -> Result<(), PersistenceError> {
        for (i, pair) in self.sets_per_level.windows(2).enumerate() {
            let (upper, lower) = (&pair[0], &pair[1]);
            if upper.iter().any(|iv| container_index(lower, iv).is_none()) {
                return Err(PersistenceError::NotNested(i, i + 1));
            }
        }
        Ok(())
    }
}

fn container_index<T: Scalar>(sets: &[Interval<T>], iv: &Interval<T>) -> Option<usize> {
    let p = sets.partition_point(|s| s.lo <= iv.lo);
    p.checked_sub(1).filter(|&j| sets[j].contains(iv))
}

/// Derivative estimate at each data point (`None` where undefined).
pub fn derivative_at_data<T: Scalar>(sample: &Sample<T>, kernel: &KernelSpec<T>) -> Vec<Option<T>> {
    sample.xs().iter().map(|&x| nw_derivative(sample, kernel, x)).collect()
}

/// Thresholds `m̂₁` at the data points on the level lattice and thickens each
/// filtered point set by the kernel bandwidth.
pub fn build_discrete_filtration<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    epsilon: T,
) -> Result<DiscreteFiltration<T>, PersistenceError> {
    build_discrete_filtration_bounded(sample, kernel, epsilon, None)
}

pub fn build_discrete_filtration_bounded<T: Scalar>(
    sample: &Sample<T>,
    kernel: &KernelSpec<T>,
    epsilon: T,
    grid_bound: Option<usize>,
) -> Result<DiscreteFiltration<T>, PersistenceError> {
    let deriv = derivative_at_data(sample, kernel);
    let defined: Vec<T> = deriv.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(PersistenceError::AllPointsUndefined);
    }
    let plan = build_plan_bounded(&defined, epsilon, kernel.bandwidth, grid_bound)?;
    let points_per_level: Vec<Vec<T>> = plan
        .levels
        .iter()
        .map(|&t| filtered_points(sample, &deriv, t))
        .collect();
    let sets_per_level = points_per_level
        .iter()
        .map(|pts| union_of_balls(pts, plan.radius))
        .collect();
    Ok(DiscreteFiltration {
        plan,
        sets_per_level,
        points_per_level,
    })
}

/// Component bookkeeping for the level sweep.
#[derive(Debug, Clone, Copy)]
struct Component {
    birth_level: usize,
    /// Interval position at birth; breaks ties among same-level births.
    birth_slot: usize,
}

impl Component {
    fn elder_key(&self) -> (usize, usize) {
        (self.birth_level, self.birth_slot)
    }
}

/// Persistence of a discrete filtration plus the number of live components
/// at each level.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedPersistence<T> {
    pub diagram: PersistenceDiagram<T>,
    pub live_components: Vec<usize>,
}

/// 0-dimensional persistence of the nested interval unions.
///
/// Each interval at level `i + 1` absorbs the intervals of level `i` it
/// contains; the elder (earliest-born, then leftmost) survives and the rest
/// die at `t_{i+1}`. An interval containing nothing from the level above is a
/// new component. Survivors at the last level are closed off there. Features
/// are reported only if they outlive one level step (`birth − death ≥ 2ε`),
/// which is what the image of `H₀(D̂_{t+ε}) → H₀(D̂_{t−ε})` keeps; survivors
/// are always reported.
pub fn estimated_persistence<T: Scalar>(
    filtration: &DiscreteFiltration<T>,
) -> Result<PersistenceDiagram<T>, PersistenceError> {
    estimated_persistence_traced(filtration).map(|e| e.diagram)
}

pub fn estimated_persistence_traced<T: Scalar>(
    filtration: &DiscreteFiltration<T>,
) -> Result<EstimatedPersistence<T>, PersistenceError> {
    filtration.check_nested()?;
    let levels = &filtration.plan.levels;
    let step = filtration.plan.step();
    // Tolerate rounding in t_i − t_j against the nominal step.
    let min_persistence = step * (T::one() - T::lit(1e-9));
    let mut features = Vec::new();
    let mut live: Vec<Option<Component>> = Vec::new();
    let mut live_counts = Vec::with_capacity(levels.len());

    for (li, sets) in filtration.sets_per_level.iter().enumerate() {
        let mut next: Vec<Vec<Component>> = vec![Vec::new(); sets.len()];
        if li > 0 {
            let prev = &filtration.sets_per_level[li - 1];
            for (pi, iv) in prev.iter().enumerate() {
                let target = container_index(sets, iv).ok_or(PersistenceError::NotNested(li - 1, li))?;
                if let Some(c) = live[pi] {
                    next[target].push(c);
                }
            }
        }
        live = next
            .into_iter()
            .enumerate()
            .map(|(slot, mut comps)| {
                if comps.is_empty() {
                    return Some(Component {
                        birth_level: li,
                        birth_slot: slot,
                    });
                }
                comps.sort_by_key(Component::elder_key);
                for young in &comps[1..] {
                    let birth = levels[young.birth_level];
                    let death = levels[li];
                    if birth - death >= min_persistence {
                        features.push(Feature::new(death, birth));
                    }
                }
                Some(comps[0])
            })
            .collect();
        live_counts.push(live.len());
    }

    let lowest = *levels.last().expect("plan has at least one level");
    for c in live.into_iter().flatten() {
        features.push(Feature::new(lowest, levels[c.birth_level]));
    }
    Ok(EstimatedPersistence {
        diagram: PersistenceDiagram::new(features),
        live_components: live_counts,
    })
}

/// Population and kernel constants entering the consistency bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremInputs<T> {
    pub epsilon: T,
    /// Kernel infimum on its support.
    pub delta: T,
    /// Infimum of the design density on its support.
    pub p_min: T,
    /// Bound on `|K'|`.
    pub tau: T,
    pub y_max: T,
    /// Bound on `|m|`.
    pub m_bound: T,
    /// Bound on `|m₁|`.
    pub m1_bound: T,
}

impl<T: Scalar> TheoremInputs<T> {
    pub fn constant(&self) -> Result<T, PersistenceError> {
        theorem_constant(
            self.epsilon,
            self.delta,
            self.p_min,
            self.tau,
            self.y_max,
            self.m_bound,
            self.m1_bound,
        )
    }

    /// `1 − 3 N_ε n exp(−C_{ε/2} n h²)`; may be negative (vacuous) at small n.
    pub fn probability_bound(&self, n_eps: i64, n: usize, h: T) -> Result<T, PersistenceError> {
        let half = Self {
            epsilon: self.epsilon / T::lit(2.0),
            ..*self
        };
        let c = half.constant()?;
        let n_t = T::from_usize(n).expect("usize fits");
        let n_eps_t = T::from_i64(n_eps).expect("i64 fits");
        Ok(T::one() - T::lit(3.0) * n_eps_t * n_t * (-(c * n_t * h * h)).exp())
    }
}

/// `C_ε = 2ε²δ²p_min² / [τ(Y_max + M) + (M₁ + ε)]²`.
pub fn theorem_constant<T: Scalar>(
    epsilon: T,
    delta: T,
    p_min: T,
    tau: T,
    y_max: T,
    m_bound: T,
    m1_bound: T,
) -> Result<T, PersistenceError> {
    let denom = tau * (y_max + m_bound) + (m1_bound + epsilon);
    if denom == T::zero() {
        return Err(PersistenceError::ZeroDenominator);
    }
    let two = T::lit(2.0);
    Ok(two * epsilon * epsilon * delta * delta * p_min * p_min / (denom * denom))
}
