//! Trees as ultrametric spaces, and turning isometries of those spaces back
//! into tree isomorphisms.

use super::ReductionError;
use crate::metric::{is_isometry, validate_metric, Bijection};
use crate::rational::Rational;
use crate::trees::{is_tree_isomorphism, meet, node_label, preserves_lengths, Tree};
use crate::ultrametric::UltrametricSpace;

/// A strictly decreasing sequence of positive radii `r_0 > r_1 > ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusSequence(Vec<Rational>);

impl RadiusSequence {
    pub fn new(radii: Vec<Rational>) -> Result<Self, ReductionError> {
        if radii.is_empty() {
            return Err(ReductionError::InvalidRadii("empty sequence".into()));
        }
        if let Some(r) = radii.iter().find(|r| !r.is_positive()) {
            return Err(ReductionError::InvalidRadii(format!(
                "non-positive radius {r}"
            )));
        }
        if let Some(w) = radii.windows(2).find(|w| w[0] <= w[1]) {
            return Err(ReductionError::InvalidRadii(format!(
                "{} is not above {}",
                w[0], w[1]
            )));
        }
        Ok(RadiusSequence(radii))
    }

    /// `r_β = 1 + 1/(β+1)`, bounded away from zero.
    pub fn harmonic(len: usize) -> Self {
        RadiusSequence(
            (0..len as i64)
                .map(|b| Rational::ONE + Rational::new(1, b + 1))
                .collect(),
        )
    }

    /// `r_β = 2^{-β}`.
    pub fn dyadic(len: usize) -> Self {
        RadiusSequence(
            (0..len as u32)
                .map(|b| Rational::new(1, 1i64 << b))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, beta: usize) -> Rational {
        self.0[beta]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }
}

/// The space on the nodes of `t` with `d(u,v) = r_{lh(u ⊓ v)}` for `u ≠ v`.
///
/// Point `i` is node `i` of `t` (lexicographic order). A meet of distinct
/// nodes is a proper prefix of one of them, so `depth(t)` radii suffice.
pub fn tree_to_space(t: &Tree, r: &RadiusSequence) -> Result<UltrametricSpace, ReductionError> {
    let needed = t.depth();
    if r.len() < needed {
        return Err(ReductionError::SequenceTooShort {
            needed,
            got: r.len(),
        });
    }
    let n = t.len();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::ZERO
                    } else {
                        r.get(meet(t.node(i), t.node(j)).len())
                    }
                })
                .collect()
        })
        .collect();
    let labels = t.nodes().iter().map(|u| node_label(u)).collect();
    let space = validate_metric(labels, matrix)?;
    Ok(UltrametricSpace::try_from(space).expect("meet distances are ultrametric"))
}

/// All `φ`-switching pairs `(v0, v1)`: `v1` terminal in `t` with immediate
/// predecessor `v0`, `φ(v0)` terminal in `s` with immediate predecessor
/// `φ(v1)`, and `lh(v_i) = lh(φ(v_{1-i}))`.
pub fn switching_pairs(t: &Tree, s: &Tree, phi: &Bijection) -> Vec<(usize, usize)> {
    (0..t.len())
        .filter(|&v1| t.is_terminal(v1))
        .filter_map(|v1| t.parent(v1).map(|v0| (v0, v1)))
        .filter(|&(v0, v1)| {
            let (w0, w1) = (phi.apply(v0), phi.apply(v1));
            s.is_terminal(w0)
                && s.parent(w0) == Some(w1)
                && t.lh(v0) == s.lh(w1)
                && t.lh(v1) == s.lh(w0)
        })
        .collect()
}

/// Turns an isometry `X_T -> X_S` into a tree isomorphism `T -> S` by
/// swapping the images on every switching pair.
pub fn repair_isometry_to_tree_iso(
    t: &Tree,
    s: &Tree,
    r: &RadiusSequence,
    phi: &Bijection,
) -> Result<Bijection, ReductionError> {
    let xt = tree_to_space(t, r)?;
    let xs = tree_to_space(s, r)?;
    if !is_isometry(&xt, &xs, phi) {
        return Err(ReductionError::NotAnIsometry);
    }
    let mut forward = phi.as_slice().to_vec();
    for (v0, v1) in switching_pairs(t, s, phi) {
        forward[v0] = phi.apply(v1);
        forward[v1] = phi.apply(v0);
    }
    let repaired = Bijection::new(forward).map_err(|_| ReductionError::RepairFailed)?;
    if is_tree_isomorphism(t, s, &repaired) && preserves_lengths(t, s, &repaired) {
        Ok(repaired)
    } else {
        Err(ReductionError::RepairFailed)
    }
}
