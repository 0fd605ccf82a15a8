//! Finite metric spaces with exact rational distances.
//!
//! A [`MetricSpace`] can only be obtained through [`validate_metric`] (or the
//! constructions in this crate that go through it), so every instance
//! satisfies the metric axioms. Whether the strong triangle inequality
//! `d(x,z) <= max(d(x,y), d(y,z))` also holds is recorded at validation time.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::perm::Permutations;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty space")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("{labels} labels for {points} points")]
    LabelCountMismatch { labels: usize, points: usize },
    #[error("NonzeroDiagonal({0})")]
    NonzeroDiagonal(usize),
    #[error("SymmetryViolation({0},{1})")]
    SymmetryViolation(usize, usize),
    #[error("ZeroOffDiagonal({0},{1})")]
    ZeroOffDiagonal(usize, usize),
    #[error("NegativeDistance({0},{1})")]
    NegativeDistance(usize, usize),
    /// `d(i,k) > d(i,j) + d(j,k)`.
    #[error("TriangleViolation({0},{1},{2})")]
    TriangleViolation(usize, usize, usize),
}

impl MetricError {
    pub fn name(&self) -> &'static str {
        match self {
            MetricError::Empty => "Empty",
            MetricError::NotSquare { .. } => "NotSquare",
            MetricError::LabelCountMismatch { .. } => "LabelCountMismatch",
            MetricError::NonzeroDiagonal(_) => "NonzeroDiagonal",
            MetricError::SymmetryViolation(..) => "SymmetryViolation",
            MetricError::ZeroOffDiagonal(..) => "ZeroOffDiagonal",
            MetricError::NegativeDistance(..) => "NegativeDistance",
            MetricError::TriangleViolation(..) => "TriangleViolation",
        }
    }
}

/// Spaces of different cardinality cannot be isometric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("SizeMismatch({left},{right})")]
pub struct SizeMismatch {
    pub left: usize,
    pub right: usize,
}

/// A bijection between index ranges `0..n`, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bijection {
    forward: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("image {image} of {index} is out of range 0..{len}")]
    OutOfRange {
        index: usize,
        image: usize,
        len: usize,
    },
    #[error("indices {first} and {second} share image {image}")]
    NotInjective {
        first: usize,
        second: usize,
        image: usize,
    },
}

impl Bijection {
    pub fn new(forward: Vec<usize>) -> Result<Self, BijectionError> {
        let len = forward.len();
        let mut seen = vec![None; len];
        for (index, &image) in forward.iter().enumerate() {
            if image >= len {
                return Err(BijectionError::OutOfRange { index, image, len });
            }
            if let Some(first) = seen[image] {
                return Err(BijectionError::NotInjective {
                    first,
                    second: index,
                    image,
                });
            }
            seen[image] = Some(index);
        }
        Ok(Bijection { forward })
    }

    pub fn identity(n: usize) -> Self {
        Bijection {
            forward: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.forward[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.forward
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.forward
    }

    pub fn inverse(&self) -> Bijection {
        let mut back = vec![0; self.forward.len()];
        for (i, &j) in self.forward.iter().enumerate() {
            back[j] = i;
        }
        Bijection { forward: back }
    }

    /// `self` after `first`: `i -> self(first(i))`.
    pub fn compose(&self, first: &Bijection) -> Bijection {
        Bijection {
            forward: first.forward.iter().map(|&i| self.forward[i]).collect(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.forward.iter().copied().enumerate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricSpace {
    labels: Vec<String>,
    n: usize,
    dist: Vec<Rational>,
    ultrametric: bool,
}

/// Checks the metric axioms on a labelled square matrix.
///
/// Checks run in a fixed order (shape, diagonal, symmetry, positivity,
/// triangle inequality) and the first failure is reported with its witness
/// indices.
pub fn validate_metric(
    labels: Vec<String>,
    matrix: Vec<Vec<Rational>>,
) -> Result<MetricSpace, MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    if labels.len() != n {
        return Err(MetricError::LabelCountMismatch {
            labels: labels.len(),
            points: n,
        });
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NotSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    let d = |i: usize, j: usize| matrix[i][j];
    for i in 0..n {
        if !d(i, i).is_zero() {
            return Err(MetricError::NonzeroDiagonal(i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if d(i, j) != d(j, i) {
                return Err(MetricError::SymmetryViolation(i, j));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if d(i, j).is_zero() {
                return Err(MetricError::ZeroOffDiagonal(i, j));
            }
            if !d(i, j).is_positive() {
                return Err(MetricError::NegativeDistance(i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d(i, k) > d(i, j) + d(j, k) {
                    return Err(MetricError::TriangleViolation(i, j, k));
                }
            }
        }
    }
    let dist: Vec<Rational> = matrix.into_iter().flatten().collect();
    let ultrametric = strong_triangle_holds(n, &dist);
    Ok(MetricSpace {
        labels,
        n,
        dist,
        ultrametric,
    })
}

fn strong_triangle_holds(n: usize, dist: &[Rational]) -> bool {
    (0..n).all(|i| {
        (0..n).all(|j| (0..n).all(|k| dist[i * n + k] <= dist[i * n + j].max(dist[j * n + k])))
    })
}

/// Default labels `0, 1, ..., n-1`.
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl MetricSpace {
    /// Validates a matrix with default index labels.
    pub fn from_matrix(matrix: Vec<Vec<Rational>>) -> Result<Self, MetricError> {
        let n = matrix.len();
        validate_metric(index_labels(n), matrix)
    }

    pub fn singleton(label: impl Into<String>) -> Self {
        MetricSpace {
            labels: vec![label.into()],
            n: 1,
            dist: vec![Rational::ZERO],
            ultrametric: true,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> Rational {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> Vec<Vec<Rational>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_ultrametric(&self) -> bool {
        self.ultrametric
    }

    pub fn diameter(&self) -> Rational {
        self.dist.iter().copied().max().unwrap_or(Rational::ZERO)
    }

    /// `R(X)`: every nonzero distance realized between two points.
    pub fn distance_spectrum(&self) -> BTreeSet<Rational> {
        self.dist.iter().copied().filter(|r| !r.is_zero()).collect()
    }

    /// `R_X(y)`: the nonzero distances realized from point `i`.
    pub fn realized_by(&self, i: usize) -> BTreeSet<Rational> {
        self.row(i)
            .iter()
            .copied()
            .filter(|r| !r.is_zero())
            .collect()
    }

    /// The subspace induced on `points`, in the given order.
    pub fn subspace(&self, points: &[usize]) -> MetricSpace {
        let n = points.len();
        let mut dist = Vec::with_capacity(n * n);
        for &i in points {
            for &j in points {
                dist.push(self.d(i, j));
            }
        }
        let labels = points.iter().map(|&i| self.labels[i].clone()).collect();
        let ultrametric = self.ultrametric || strong_triangle_holds(n, &dist);
        MetricSpace {
            labels,
            n,
            dist,
            ultrametric,
        }
    }

    /// Moves point `i` to position `perm(i)`; `perm` is then an isometry
    /// from `self` onto the result.
    pub fn permuted(&self, perm: &Bijection) -> MetricSpace {
        assert_eq!(perm.len(), self.n, "permutation size mismatch");
        let inv = perm.inverse();
        let order: Vec<usize> = (0..self.n).map(|k| inv.apply(k)).collect();
        self.subspace(&order)
    }

    /// Applies `f` to every distance; the caller guarantees the result is a metric.
    pub(crate) fn map_distances_unchecked(&self, f: impl Fn(Rational) -> Rational) -> MetricSpace {
        let dist: Vec<Rational> = self
            .dist
            .iter()
            .map(|&r| if r.is_zero() { r } else { f(r) })
            .collect();
        let ultrametric = strong_triangle_holds(self.n, &dist);
        MetricSpace {
            labels: self.labels.clone(),
            n: self.n,
            dist,
            ultrametric,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> MetricSpace {
        assert_eq!(labels.len(), self.n, "label count mismatch");
        self.labels = labels;
        self
    }
}

/// Independent certificate check: `d_X(i,j) = d_Y(f(i),f(j))` for every pair.
pub fn is_isometry(x: &MetricSpace, y: &MetricSpace, f: &Bijection) -> bool {
    if x.len() != y.len() || f.len() != x.len() {
        return false;
    }
    (0..x.len()).all(|i| (0..x.len()).all(|j| x.d(i, j) == y.d(f.apply(i), f.apply(j))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Backtracking restricted to candidates with equal sorted distance rows.
    #[default]
    Pruned,
    /// Every one of the `n!` bijections, in lexicographic order.
    Exhaustive,
}

/// Distances of both spaces replaced by their rank in the joint value set.
fn ranked(x: &MetricSpace, y: &MetricSpace) -> (Vec<u32>, Vec<u32>) {
    let values: BTreeMap<Rational, u32> = x
        .dist
        .iter()
        .chain(y.dist.iter())
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .zip(0u32..)
        .collect();
    let rx = x.dist.iter().map(|r| values[r]).collect();
    let ry = y.dist.iter().map(|r| values[r]).collect();
    (rx, ry)
}

/// Searches for a distance-preserving bijection `X -> Y`.
///
/// Both modes return the lexicographically least certificate.
pub fn find_isometry(
    x: &MetricSpace,
    y: &MetricSpace,
    mode: SearchMode,
) -> Result<Option<Bijection>, SizeMismatch> {
    if x.len() != y.len() {
        return Err(SizeMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (dx, dy) = ranked(x, y);
    let found = match mode {
        SearchMode::Exhaustive => exhaustive_search(x.len(), &dx, &dy),
        SearchMode::Pruned => pruned_search(x.len(), &dx, &dy),
    };
    Ok(found.map(|forward| Bijection { forward }))
}

/// `find_isometry` in pruned mode, with size mismatch read as "not isometric".
pub fn isometric(x: &MetricSpace, y: &MetricSpace) -> bool {
    matches!(find_isometry(x, y, SearchMode::Pruned), Ok(Some(_)))
}

/// Exhaustive oracle verdict.
pub fn isometric_exhaustive(x: &MetricSpace, y: &MetricSpace) -> bool {
    matches!(find_isometry(x, y, SearchMode::Exhaustive), Ok(Some(_)))
}

fn preserves(n: usize, dx: &[u32], dy: &[u32], p: &[usize]) -> bool {
    for i in 0..n {
        let xi = &dx[i * n..(i + 1) * n];
        let yi = &dy[p[i] * n..(p[i] + 1) * n];
        for j in i + 1..n {
            if xi[j] != yi[p[j]] {
                return false;
            }
        }
    }
    true
}

fn exhaustive_search(n: usize, dx: &[u32], dy: &[u32]) -> Option<Vec<usize>> {
    Permutations::new(n).find(|p| preserves(n, dx, dy, p))
}

/// Every isometry `X -> Y`, by exhaustive enumeration.
pub fn all_isometries(x: &MetricSpace, y: &MetricSpace) -> Vec<Bijection> {
    if x.len() != y.len() {
        return Vec::new();
    }
    let n = x.len();
    let (dx, dy) = ranked(x, y);
    Permutations::new(n)
        .filter(|p| preserves(n, &dx, &dy, p))
        .map(|forward| Bijection { forward })
        .collect()
}

fn pruned_search(n: usize, dx: &[u32], dy: &[u32]) -> Option<Vec<usize>> {
    let sorted_rows = |d: &[u32]| -> Vec<Vec<u32>> {
        (0..n)
            .map(|i| {
                let mut r = d[i * n..(i + 1) * n].to_vec();
                r.sort_unstable();
                r
            })
            .collect()
    };
    let rows_x = sorted_rows(dx);
    let rows_y = sorted_rows(dy);
    let mut profile_x: Vec<&Vec<u32>> = rows_x.iter().collect();
    let mut profile_y: Vec<&Vec<u32>> = rows_y.iter().collect();
    profile_x.sort();
    profile_y.sort();
    if profile_x != profile_y {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| rows_x[i] == rows_y[j]).collect())
        .collect();

    struct Search<'a> {
        n: usize,
        dx: &'a [u32],
        dy: &'a [u32],
        candidates: &'a [Vec<usize>],
        map: Vec<usize>,
        used: Vec<bool>,
    }

    impl Search<'_> {
        fn extend(&mut self, i: usize) -> bool {
            if i == self.n {
                return true;
            }
            for idx in 0..self.candidates[i].len() {
                let j = self.candidates[i][idx];
                if self.used[j] {
                    continue;
                }
                let n = self.n;
                let consistent = (0..i).all(|k| self.dx[i * n + k] == self.dy[j * n + self.map[k]]);
                if !consistent {
                    continue;
                }
                self.map[i] = j;
                self.used[j] = true;
                if self.extend(i + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            false
        }
    }

    let mut search = Search {
        n,
        dx,
        dy,
        candidates: &candidates,
        map: vec![0; n],
        used: vec![false; n],
    };
    search.extend(0).then_some(search.map)
}
