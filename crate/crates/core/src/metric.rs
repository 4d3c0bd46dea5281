//! Bottleneck distance between persistence diagrams.
//!
//! Diagrams are padded with diagonal proxies so the matching is square: each
//! point of `A` may go to its own proxy on `B`'s side (cost: distance to the
//! diagonal) and vice versa, and proxy-to-proxy edges are free. The optimum
//! is one of finitely many candidate costs, so a binary search over the
//! sorted candidates with a bipartite perfect-matching test is exact.

use crate::error::MetricError;
use crate::persistence::{superlevel_barcode_0d, PersistenceDiagram};
use crate::scalar::Scalar;

/// `‖p − q‖_∞` on `(death, birth)` coordinates.
#[inline]
pub fn linf<T: Scalar>(p: (T, T), q: (T, T)) -> T {
    (p.0 - q.0).abs().max((p.1 - q.1).abs())
}

/// ∞-distance from `(death, birth)` to the diagonal.
#[inline]
pub fn diagonal_distance<T: Scalar>(p: (T, T)) -> T {
    (p.1 - p.0) / T::lit(2.0)
}

/// Square bipartite threshold-matching instance for two diagrams.
#[derive(Debug, Clone)]
pub struct MatchingProblem<T> {
    pub points_a: Vec<(T, T)>,
    pub points_b: Vec<(T, T)>,
    /// Every achievable edge cost, ascending and deduplicated.
    pub candidate_distances: Vec<T>,
}

impl<T: Scalar> MatchingProblem<T> {
    pub fn new(points_a: Vec<(T, T)>, points_b: Vec<(T, T)>) -> Self {
        let mut c = vec![T::zero()];
        for &p in &points_a {
            c.push(diagonal_distance(p));
            for &q in &points_b {
                c.push(linf(p, q));
            }
        }
        c.extend(points_b.iter().map(|&q| diagonal_distance(q)));
        c.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        c.dedup();
        Self {
            points_a,
            points_b,
            candidate_distances: c,
        }
    }

    /// Left side: `A` then one proxy per point of `B`. Right side: `B` then
    /// one proxy per point of `A`.
    fn adjacency(&self, r: T) -> Vec<Vec<usize>> {
        let (n, m) = (self.points_a.len(), self.points_b.len());
        let mut adj = vec![Vec::new(); n + m];
        for (i, &p) in self.points_a.iter().enumerate() {
            for (j, &q) in self.points_b.iter().enumerate() {
                if linf(p, q) <= r {
                    adj[i].push(j);
                }
            }
            if diagonal_distance(p) <= r {
                adj[i].push(m + i);
            }
        }
        for (j, &q) in self.points_b.iter().enumerate() {
            if diagonal_distance(q) <= r {
                adj[n + j].push(j);
            }
            adj[n + j].extend((0..n).map(|i| m + i));
        }
        adj
    }

    /// Whether a perfect matching exists using edges of cost `≤ r`.
    pub fn feasible(&self, r: T) -> bool {
        let adj = self.adjacency(r);
        let size = adj.len();
        let mut match_right = vec![usize::MAX; size];
        for u in 0..size {
            let mut seen = vec![false; size];
            if !augment(u, &adj, &mut seen, &mut match_right) {
                return false;
            }
        }
        true
    }

    pub fn solve(&self) -> T {
        let c = &self.candidate_distances;
        let (mut lo, mut hi) = (0usize, c.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.feasible(c[mid]) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        c[lo]
    }
}

fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [usize]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if match_right[v] == usize::MAX || augment(match_right[v], adj, seen, match_right) {
            match_right[v] = u;
            return true;
        }
    }
    false
}

/// Exact bottleneck distance `inf_γ sup_p ‖p − γ(p)‖_∞`.
pub fn bottleneck_distance<T: Scalar>(a: &PersistenceDiagram<T>, b: &PersistenceDiagram<T>) -> Result<T, MetricError> {
    if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
        if da != db {
            return Err(MetricError::DegreeMismatch(da, db));
        }
    }
    let finite = |d: &PersistenceDiagram<T>| d.pairs().iter().all(|p| p.0.is_finite() && p.1.is_finite());
    if !finite(a) || !finite(b) {
        return Err(MetricError::NonFinite);
    }
    Ok(MatchingProblem::new(a.pairs(), b.pairs()).solve())
}

/// Result of comparing `δ_B(PH(f), PH(g))` with `‖f − g‖_∞` on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

pub fn stability_check<T: Scalar>(f: &[T], g: &[T], grid: &[T]) -> Result<StabilityCheck<T>, MetricError> {
    if f.len() != g.len() {
        return Err(MetricError::LengthMismatch(f.len(), g.len()));
    }
    let df = superlevel_barcode_0d(grid, f)?;
    let dg = superlevel_barcode_0d(grid, g)?;
    let lhs = bottleneck_distance(&df, &dg)?;
    let rhs = f.iter().zip(g).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()));
    Ok(StabilityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + T::lit(1e-9),
    })
}
