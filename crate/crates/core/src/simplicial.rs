//! Abstract simplicial complexes, boundary matrices and Betti numbers over an
//! exact field.
//!
//! This is the brute-force homology oracle: everything here is exact
//! (GF(2) or rationals) and nothing is tuned for speed.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::SimplicialError;
use crate::scalar::Scalar;

/// A field with exact arithmetic.
pub trait ExactField:
    Copy + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    /// Multiplicative inverse; only called on nonzero elements.
    fn inv(&self) -> Self;
    /// Image of a sign `(-1)^parity`.
    fn sign(odd: bool) -> Self {
        if odd {
            -Self::one()
        } else {
            Self::one()
        }
    }
}

/// The two-element field; addition is XOR and multiplication is AND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf2(pub bool);

impl Add for Gf2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Self) -> Self {
        Gf2(self.0 ^ rhs.0)
    }
}

impl Sub for Gf2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        Gf2(self.0 ^ rhs.0)
    }
}

impl Mul for Gf2 {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Self {
        Gf2(self.0 & rhs.0)
    }
}

impl Neg for Gf2 {
    type Output = Self;
    fn neg(self) -> Self {
        self
    }
}

impl ExactField for Gf2 {
    fn zero() -> Self {
        Gf2(false)
    }
    fn one() -> Self {
        Gf2(true)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn inv(&self) -> Self {
        *self
    }
}

pub type Rational = Ratio<i64>;

impl ExactField for Rational {
    fn zero() -> Self {
        Ratio::from_integer(0)
    }
    fn one() -> Self {
        Ratio::from_integer(1)
    }
    fn is_zero(&self) -> bool {
        *self.numer() == 0
    }
    fn inv(&self) -> Self {
        self.recip()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    #[default]
    Gf2,
    Rational,
}

/// Finite abstract simplicial complex. Simplices are stored as ascending
/// vertex lists, which also fixes the reference orientation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    vertices: BTreeSet<usize>,
    /// `simplices[k]` holds the k-simplices.
    simplices: Vec<BTreeSet<Vec<usize>>>,
}

fn normalize(s: &[usize]) -> Vec<usize> {
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// All nonempty proper faces obtained by deleting one vertex.
fn codim_one_faces(s: &[usize]) -> impl Iterator<Item = (usize, Vec<usize>)> + '_ {
    (0..s.len()).filter(move |_| s.len() > 1).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Downward closure of the given simplices.
    pub fn from_maximal<S: AsRef<[usize]>>(simplices: &[S]) -> Self {
        let mut c = Self::new();
        for s in simplices {
            c.insert_closed(&normalize(s.as_ref()));
        }
        c
    }

    /// Builds from an explicit list and checks face-closure.
    pub fn from_simplices<S: AsRef<[usize]>>(simplices: &[S]) -> Result<Self, SimplicialError> {
        let mut c = Self::new();
        for s in simplices {
            let s = normalize(s.as_ref());
            if s.is_empty() {
                continue;
            }
            c.insert_raw(s);
        }
        c.validate()?;
        Ok(c)
    }

    fn insert_raw(&mut self, s: Vec<usize>) {
        let k = s.len() - 1;
        if self.simplices.len() <= k {
            self.simplices.resize_with(k + 1, BTreeSet::new);
        }
        if k == 0 {
            self.vertices.insert(s[0]);
        }
        self.simplices[k].insert(s);
    }

    fn insert_closed(&mut self, s: &[usize]) {
        if s.is_empty() || self.contains(s) {
            return;
        }
        self.insert_raw(s.to_vec());
        for (_, f) in codim_one_faces(s) {
            self.insert_closed(&f);
        }
    }

    pub fn add_vertex(&mut self, v: usize) {
        self.insert_closed(&[v]);
    }

    pub fn add_simplex(&mut self, s: &[usize]) {
        self.insert_closed(&normalize(s));
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        let s = normalize(s);
        !s.is_empty() && self.simplices.get(s.len() - 1).is_some_and(|set| set.contains(&s))
    }

    pub fn validate(&self) -> Result<(), SimplicialError> {
        for level in self.simplices.iter().skip(1) {
            for s in level {
                for (_, f) in codim_one_faces(s) {
                    if !self.contains(&f) {
                        return Err(SimplicialError::InvalidComplex(f));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<usize> {
        &self.vertices
    }

    /// The k-simplices in ascending lexicographic order.
    pub fn simplices(&self, k: usize) -> Vec<&[usize]> {
        self.simplices
            .get(k)
            .map(|s| s.iter().map(Vec::as_slice).collect())
            .unwrap_or_default()
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, BTreeSet::len)
    }

    /// Highest dimension present, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().rposition(|s| !s.is_empty())
    }
}

/// Matrix of `∂_k : C_k → C_{k-1}` in the simplex bases.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix<F> {
    pub k: usize,
    pub rows: Vec<Vec<usize>>,
    pub cols: Vec<Vec<usize>>,
    /// Row-major dense entries, `rows.len() x cols.len()`.
    pub entries: Vec<Vec<F>>,
}

impl<F: ExactField> BoundaryMatrix<F> {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn rank(&self) -> usize {
        rank(self.entries.clone())
    }

    /// `self · rhs` (compose `∂_k ∘ ∂_{k+1}`).
    pub fn compose(&self, rhs: &BoundaryMatrix<F>) -> Vec<Vec<F>> {
        assert_eq!(self.n_cols(), rhs.n_rows(), "inner dimensions");
        (0..self.n_rows())
            .map(|i| {
                (0..rhs.n_cols())
                    .map(|j| (0..self.n_cols()).fold(F::zero(), |acc, t| acc + self.entries[i][t] * rhs.entries[t][j]))
                    .collect()
            })
            .collect()
    }
}

/// Boundary matrix of degree `k ≥ 1`. The face deleting the i-th vertex of
/// `[v0 < … < vk]` carries sign `(-1)^i`.
pub fn boundary_matrix<F: ExactField>(
    complex: &SimplicialComplex,
    k: usize,
) -> Result<BoundaryMatrix<F>, SimplicialError> {
    if k == 0 {
        return Err(SimplicialError::ZeroDegree);
    }
    complex.validate()?;
    let rows: Vec<Vec<usize>> = complex.simplices(k - 1).into_iter().map(<[usize]>::to_vec).collect();
    let cols: Vec<Vec<usize>> = complex.simplices(k).into_iter().map(<[usize]>::to_vec).collect();
    let mut entries = vec![vec![F::zero(); cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for (i, face) in codim_one_faces(s) {
            let r = rows.binary_search(&face).expect("closed complex");
            entries[r][j] = F::sign(i % 2 == 1);
        }
    }
    Ok(BoundaryMatrix { k, rows, cols, entries })
}

/// Rank by Gaussian elimination.
pub fn rank<F: ExactField>(mut m: Vec<Vec<F>>) -> usize {
    let n_rows = m.len();
    let n_cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..n_cols {
        let Some(p) = (r..n_rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for i in 0..n_rows {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c] * inv;
                let (pivot, row) = if i < r {
                    let (top, bottom) = m.split_at_mut(r);
                    (&bottom[0], &mut top[i])
                } else {
                    let (top, bottom) = m.split_at_mut(i);
                    (&top[r], &mut bottom[0])
                };
                for (x, &v) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x = *x - factor * v;
                }
            }
        }
        r += 1;
        if r == n_rows {
            break;
        }
    }
    r
}

fn betti_in<F: ExactField>(complex: &SimplicialComplex, k: usize) -> usize {
    let n_k = complex.count(k);
    let rank_k = if k == 0 {
        0
    } else {
        boundary_matrix::<F>(complex, k).map_or(0, |m| m.rank())
    };
    let rank_k1 = boundary_matrix::<F>(complex, k + 1).map_or(0, |m| m.rank());
    n_k - rank_k - rank_k1
}

/// `β_k = dim ker ∂_k − rank ∂_{k+1}`.
pub fn betti(complex: &SimplicialComplex, k: usize, field: FieldKind) -> usize {
    match field {
        FieldKind::Gf2 => betti_in::<Gf2>(complex, k),
        FieldKind::Rational => betti_in::<Rational>(complex, k),
    }
}

/// One-skeleton of the nerve of the closed intervals `[c - r, c + r]`:
/// vertex `i` per center, edge `{i, j}` iff `|c_i - c_j| <= 2r`.
pub fn nerve_of_intervals<T: Scalar>(centers: &[T], radius: T) -> SimplicialComplex {
    let mut c = SimplicialComplex::new();
    let reach = radius + radius;
    for i in 0..centers.len() {
        c.add_vertex(i);
    }
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            if (centers[i] - centers[j]).abs() <= reach {
                c.add_simplex(&[i, j]);
            }
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Ratio::from_integer(n)
    }

    #[test]
    fn hollow_triangle_boundary_columns_sum_to_zero() {
        let c = SimplicialComplex::from_maximal(&[[0, 1], [1, 2], [0, 2]]);
        let d1 = boundary_matrix::<Rational>(&c, 1).unwrap();
        assert_eq!((d1.n_rows(), d1.n_cols()), (3, 3));
        for j in 0..3 {
            let s = (0..3).fold(r(0), |a, i| a + d1.entries[i][j]);
            assert_eq!(s, r(0));
        }
        // edge [0,1]: deleting v0 leaves [1] with +, deleting v1 leaves [0] with -.
        assert_eq!(d1.entries[0][0], r(-1));
        assert_eq!(d1.entries[1][0], r(1));
    }

    #[test]
    fn single_edge_over_gf2() {
        let c = SimplicialComplex::from_maximal(&[[3, 7]]);
        let d1 = boundary_matrix::<Gf2>(&c, 1).unwrap();
        assert_eq!(d1.entries, vec![vec![Gf2(true)], vec![Gf2(true)]]);
    }

    #[test]
    fn filled_triangle_boundary_of_boundary_vanishes() {
        let c = SimplicialComplex::from_maximal(&[[0, 1, 2]]);
        let d1 = boundary_matrix::<Rational>(&c, 1).unwrap();
        let d2 = boundary_matrix::<Rational>(&c, 2).unwrap();
        let prod = d1.compose(&d2);
        assert!(prod.iter().flatten().all(|v| *v == r(0)));
    }

    #[test]
    fn betti_numbers_of_small_complexes() {
        let two_points = SimplicialComplex::from_maximal(&[[0], [1]]);
        assert_eq!(betti(&two_points, 0, FieldKind::Gf2), 2);

        let hollow = SimplicialComplex::from_maximal(&[[0, 1], [1, 2], [0, 2]]);
        for f in [FieldKind::Gf2, FieldKind::Rational] {
            assert_eq!(betti(&hollow, 0, f), 1);
            assert_eq!(betti(&hollow, 1, f), 1);
        }

        let filled = SimplicialComplex::from_maximal(&[[0, 1, 2]]);
        for f in [FieldKind::Gf2, FieldKind::Rational] {
            assert_eq!(betti(&filled, 0, f), 1);
            assert_eq!(betti(&filled, 1, f), 0);
        }
    }

    #[test]
    fn closure_is_validated() {
        let err = SimplicialComplex::from_simplices(&[vec![0], vec![0, 1]]).unwrap_err();
        assert_eq!(err, SimplicialError::InvalidComplex(vec![1]));
        assert!(SimplicialComplex::from_simplices(&[vec![0], vec![1], vec![0, 1]]).is_ok());
        let c = SimplicialComplex::from_maximal(&[[0, 1, 2]]);
        assert_eq!(c.dim(), Some(2));
        assert_eq!(c.count(1), 3);
        assert_eq!(SimplicialComplex::new().dim(), None);
        assert_eq!(boundary_matrix::<Gf2>(&c, 0), Err(SimplicialError::ZeroDegree));
    }

    #[test]
    fn nerve_component_counts() {
        let a = nerve_of_intervals(&[0.0, 1.0], 0.4);
        assert_eq!(betti(&a, 0, FieldKind::Gf2), 2);
        let b = nerve_of_intervals(&[0.0, 0.5, 1.0], 0.3);
        assert_eq!(betti(&b, 0, FieldKind::Gf2), 1);
        let e = nerve_of_intervals::<f64>(&[], 0.3);
        assert_eq!(betti(&e, 0, FieldKind::Gf2), 0);
        // touching intervals share an endpoint
        let t = nerve_of_intervals(&[0.0, 1.0], 0.5);
        assert_eq!(betti(&t, 0, FieldKind::Gf2), 1);
    }

    #[test]
    fn rational_rank_handles_fractions() {
        let m = vec![vec![r(2), r(4)], vec![r(1), r(2)], vec![r(3), r(1)]];
        assert_eq!(rank(m), 2);
        assert_eq!(rank::<Gf2>(vec![]), 0);
    }
}
