//! Slow, independent reference implementations used by the test suites.
//!
//! None of these share code paths with the production routines they check.

use std::collections::VecDeque;

use crate::scalar::Scalar;
use crate::simplicial::SimplicialComplex;

/// Super-level barcode by sweeping every distinct value from the top and
/// recomputing the runs of grid points at or above it.
///
/// A run inherits the identity of the oldest run it swallowed (highest
/// birth, then earliest argmax index); swallowed runs die at the current
/// value. The surviving run is closed off at the global minimum.
pub fn superlevel_sweep<T: Scalar>(values: &[T]) -> Vec<(T, T)> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut levels: Vec<T> = values.to_vec();
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap());
    levels.dedup();

    // (start, end inclusive, birth value, birth index)
    let mut runs: Vec<(usize, usize, T, usize)> = Vec::new();
    let mut pairs = Vec::new();
    for &t in &levels {
        let mut next = Vec::new();
        let mut i = 0;
        while i < values.len() {
            if values[i] < t {
                i += 1;
                continue;
            }
            let start = i;
            while i < values.len() && values[i] >= t {
                i += 1;
            }
            let end = i - 1;
            let mut inside: Vec<(T, usize)> = runs
                .iter()
                .filter(|r| r.0 >= start && r.1 <= end)
                .map(|r| (r.2, r.3))
                .collect();
            if inside.is_empty() {
                let arg = (start..=end).find(|&j| values[j] == t).unwrap();
                next.push((start, end, t, arg));
                continue;
            }
            inside.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            for young in &inside[1..] {
                pairs.push((t, young.0));
            }
            next.push((start, end, inside[0].0, inside[0].1));
        }
        runs = next;
    }
    let min = *levels.last().unwrap();
    for r in runs {
        pairs.push((min, r.2));
    }
    pairs
}

/// Connected components of the 1-skeleton by breadth-first search.
pub fn graph_components(complex: &SimplicialComplex) -> usize {
    let verts: Vec<usize> = complex.vertices().iter().copied().collect();
    let idx = |v: usize| verts.binary_search(&v).unwrap();
    let mut adj = vec![Vec::new(); verts.len()];
    for e in complex.simplices(1) {
        adj[idx(e[0])].push(idx(e[1]));
        adj[idx(e[1])].push(idx(e[0]));
    }
    let mut seen = vec![false; verts.len()];
    let mut components = 0;
    for start in 0..verts.len() {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    components
}

/// Bottleneck distance by enumerating every partial injection of `a` into
/// `b`; unmatched points on either side go to the diagonal.
pub fn bottleneck_exhaustive(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn diag(p: (f64, f64)) -> f64 {
        (p.1 - p.0) / 2.0
    }
    fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
        (p.0 - q.0).abs().max((p.1 - q.1).abs())
    }
    fn go(i: usize, a: &[(f64, f64)], b: &[(f64, f64)], used: &mut Vec<bool>, cur: f64, best: &mut f64) {
        if cur >= *best {
            return;
        }
        if i == a.len() {
            let rest = b
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .fold(cur, |m, (q, _)| m.max(diag(*q)));
            if rest < *best {
                *best = rest;
            }
            return;
        }
        go(i + 1, a, b, used, cur.max(diag(a[i])), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, a, b, used, cur.max(linf(a[i], b[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Least-squares slope by golden-section search on the profiled residual
/// sum of squares (the intercept is solved exactly for each slope).
pub fn ols_slope_golden(residuals: &[f64], weights: &[f64]) -> f64 {
    let n = residuals.len() as f64;
    let sse = |b1: f64| {
        let b0 = residuals.iter().zip(weights).map(|(r, w)| r - b1 * w).sum::<f64>() / n;
        residuals
            .iter()
            .zip(weights)
            .map(|(r, w)| {
                let e = r - b0 - b1 * w;
                e * e
            })
            .sum::<f64>()
    };
    // Bracket generously: the slope is bounded by range(r) / min spacing scale.
    let spread_r = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let spread_w = {
        let lo = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    };
    let reach = 10.0 * (1.0 + spread_r) / spread_w.max(1e-12) * (1.0 + n);
    let (mut a, mut b) = (-reach, reach);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (sse(c), sse(d));
    for _ in 0..400 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = sse(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = sse(d);
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
    }
    0.5 * (a + b)
}

/// Standard deviation of `N(0, sd²)` conditioned on `[-bound, bound]`.
pub fn truncated_normal_sd(sd: f64, bound: f64) -> f64 {
    use statrs::distribution::{Continuous, ContinuousCDF, Normal};
    let std = Normal::new(0.0, 1.0).unwrap();
    let a = bound / sd;
    let mass = std.cdf(a) - std.cdf(-a);
    let var = sd * sd * (1.0 - 2.0 * a * std.pdf(a) / mass);
    var.sqrt()
}
