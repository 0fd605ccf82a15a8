use std::collections::BTreeSet;

use crate::metric::MetricSpace;
use crate::rational::Rational;

/// A square matrix of distances, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GromovMatrix {
    pub dim: usize,
    pub entries: Vec<Rational>,
}

impl GromovMatrix {
    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries[i * self.dim + j]
    }

    /// The principal submatrix on the listed rows and columns.
    pub fn principal(&self, keep: &[usize]) -> GromovMatrix {
        let entries = keep
            .iter()
            .flat_map(|&i| keep.iter().map(move |&j| self.get(i, j)))
            .collect();
        GromovMatrix {
            dim: keep.len(),
            entries,
        }
    }
}

/// `{ (d(x_i, x_j))_{i,j ≤ n} : (x_0, ..., x_n) ∈ X^{n+1} }`, repetitions allowed.
pub fn gromov_invariant(x: &MetricSpace, n: usize) -> BTreeSet<GromovMatrix> {
    let dim = n + 1;
    let mut out = BTreeSet::new();
    let mut tuple = vec![0usize; dim];
    loop {
        let entries = tuple
            .iter()
            .flat_map(|&a| tuple.iter().map(move |&b| x.d(a, b)))
            .collect();
        out.insert(GromovMatrix { dim, entries });
        // odometer step
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < x.len() {
                break;
            }
            tuple[k] = 0;
        }
    }
}

/// [`gromov_invariant`] for `n = 0..|X|`.
pub fn gromov_full(x: &MetricSpace) -> Vec<BTreeSet<GromovMatrix>> {
    (0..x.len()).map(|n| gromov_invariant(x, n)).collect()
}
