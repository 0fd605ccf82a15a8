use std::collections::BTreeSet;

use super::ReductionError;
use crate::graph::Graph;
use crate::metric::{index_labels, validate_metric, MetricSpace};
use crate::rational::Rational;
use crate::structures::RelationalStructure;
use crate::ultrametric::UltrametricSpace;

/// Adjacent vertices at distance 1, other distinct vertices at distance 2.
pub fn graph_to_space(g: &Graph) -> MetricSpace {
    let n = g.vertex_count();
    let matrix = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| match (a == b, g.adjacent(a, b)) {
                    (true, _) => Rational::ZERO,
                    (false, true) => Rational::ONE,
                    (false, false) => Rational::integer(2),
                })
                .collect()
        })
        .collect();
    validate_metric(index_labels(n), matrix).expect("distances in {1,2} always form a metric")
}

/// Name of the binary relation `d(n,m) < q`.
pub fn threshold_relation_name(q: Rational) -> String {
    format!("P_{q}")
}

/// `R(X_1) ∪ ... ∪ R(X_k) ∪ {max + 1}`; separates the distances of every listed space.
pub fn default_thresholds(spaces: &[&MetricSpace]) -> BTreeSet<Rational> {
    let mut q: BTreeSet<Rational> = spaces.iter().flat_map(|x| x.distance_spectrum()).collect();
    let top = q.iter().next_back().copied().unwrap_or(Rational::ZERO);
    q.insert(top + Rational::ONE);
    q
}

/// Checks that `{ q ∈ Q : δ < q }` determines `δ ∈ {0} ∪ R(X)`, and that
/// some threshold exceeds every realized distance.
fn check_separation(
    x: &MetricSpace,
    thresholds: &BTreeSet<Rational>,
) -> Result<(), ReductionError> {
    let mut levels: Vec<Rational> = vec![Rational::ZERO];
    levels.extend(x.distance_spectrum());
    for w in levels.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if !thresholds.iter().any(|&q| lo < q && q <= hi) {
            return Err(ReductionError::InsufficientThresholds {
                below: lo,
                above: Some(hi),
            });
        }
    }
    let top = *levels.last().expect("contains zero");
    if !thresholds.iter().any(|&q| q > top) {
        return Err(ReductionError::InsufficientThresholds {
            below: top,
            above: None,
        });
    }
    Ok(())
}

/// Universe = points of `X`, one binary relation `P_q = { (n,m) : d(n,m) < q }`
/// per threshold.
///
/// Two spaces have isomorphic encodings iff they are isometric, provided the
/// same `Q` separates the distances of both (see [`default_thresholds`]).
pub fn discrete_to_structure(
    x: &MetricSpace,
    thresholds: &BTreeSet<Rational>,
) -> Result<RelationalStructure, ReductionError> {
    check_separation(x, thresholds)?;
    let n = x.len();
    let mut s = RelationalStructure::new(n);
    for &q in thresholds {
        let pairs = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| x.d(a, b) < q)
            .map(|(a, b)| vec![a, b]);
        s = s
            .with_relation(threshold_relation_name(q), 2, pairs)
            .expect("indices in range");
    }
    Ok(s)
}

/// Disjoint union of the parts, with every cross-part distance equal to `r`.
///
/// Points of part `i` come in order after those of parts `0..i`; labels are
/// prefixed with the part index.
pub fn sum_space(
    parts: &[UltrametricSpace],
    r: Rational,
) -> Result<UltrametricSpace, ReductionError> {
    if parts.is_empty() {
        return Err(ReductionError::NoParts);
    }
    if let Some(part) = parts.iter().position(|p| p.diameter() >= r) {
        return Err(ReductionError::RadiusTooSmall { part });
    }
    let owner: Vec<(usize, usize)> = parts
        .iter()
        .enumerate()
        .flat_map(|(k, p)| (0..p.len()).map(move |i| (k, i)))
        .collect();
    let matrix = owner
        .iter()
        .map(|&(ka, ia)| {
            owner
                .iter()
                .map(|&(kb, ib)| if ka == kb { parts[ka].d(ia, ib) } else { r })
                .collect()
        })
        .collect();
    let labels = owner
        .iter()
        .map(|&(k, i)| format!("{k}.{}", parts[k].labels()[i]))
        .collect();
    let space = validate_metric(labels, matrix)?;
    Ok(UltrametricSpace::try_from(space).expect("sum of ultrametric parts below r is ultrametric"))
}
