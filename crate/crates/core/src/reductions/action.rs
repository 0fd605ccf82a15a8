//! Finite group actions by permutations and the orbit encoding into metric spaces.

use std::collections::{BTreeSet, HashMap};

use super::ReductionError;
use crate::metric::{validate_metric, MetricSpace};
use crate::rational::Rational;

/// Raw input for [`adjust_group_metric`]: `table[g][y] = g.y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionCandidate {
    pub group_metric: Vec<Vec<Rational>>,
    pub space_metric: Vec<Vec<Rational>>,
    pub table: Vec<Vec<usize>>,
}

/// A faithful action of a finite group `G` on a finite metric space `Y`.
///
/// The group is the set of table rows under composition; `d_G` is left
/// invariant, both metrics are bounded by 1, and
/// `d_G(g,h) ≥ ½ d_Y(g⁻¹.y, h⁻¹.y)` for all `g, h, y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    group: MetricSpace,
    space: MetricSpace,
    table: Vec<Vec<usize>>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
}

/// Multiplication table `mul[h][g] = hg` (apply `g` first) and inverses.
fn group_law(
    table: &[Vec<usize>],
    k: usize,
) -> Result<(Vec<Vec<usize>>, Vec<usize>), ReductionError> {
    let mut index: HashMap<&[usize], usize> = HashMap::new();
    for (g, row) in table.iter().enumerate() {
        if row.len() != k {
            return Err(ReductionError::NotAnAction(format!(
                "row {g} has {} entries, expected {k}",
                row.len()
            )));
        }
        let image: BTreeSet<usize> = row.iter().copied().collect();
        if image.len() != k || row.iter().any(|&y| y >= k) {
            return Err(ReductionError::NotAnAction(format!(
                "row {g} is not a permutation"
            )));
        }
        if let Some(h) = index.insert(row, g) {
            return Err(ReductionError::NotAnAction(format!(
                "rows {h} and {g} coincide"
            )));
        }
    }
    let identity: Vec<usize> = (0..k).collect();
    if !index.contains_key(identity.as_slice()) {
        return Err(ReductionError::NotAnAction("no identity row".into()));
    }
    let mut mul = vec![vec![0; table.len()]; table.len()];
    for (h, rh) in table.iter().enumerate() {
        for (g, rg) in table.iter().enumerate() {
            let prod: Vec<usize> = rg.iter().map(|&y| rh[y]).collect();
            mul[h][g] = *index.get(prod.as_slice()).ok_or_else(|| {
                ReductionError::NotAnAction(format!("row {h} after row {g} is not a row"))
            })?;
        }
    }
    let e = index[identity.as_slice()];
    let inv = (0..table.len())
        .map(|g| {
            (0..table.len())
                .find(|&h| mul[g][h] == e)
                .expect("finite closed set of permutations")
        })
        .collect();
    Ok((mul, inv))
}

fn check_left_invariant(dg: &MetricSpace, mul: &[Vec<usize>]) -> Result<(), ReductionError> {
    let m = dg.len();
    for (h, row) in mul.iter().enumerate() {
        for g in 0..m {
            for g2 in 0..m {
                if dg.d(row[g], row[g2]) != dg.d(g, g2) {
                    return Err(ReductionError::NotLeftInvariant(h, g, g2));
                }
            }
        }
    }
    Ok(())
}

fn labelled(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn scaled(x: &MetricSpace) -> MetricSpace {
    let diam = x.diameter();
    if diam <= Rational::ONE {
        x.clone()
    } else {
        x.map_distances_unchecked(|r| r / diam)
    }
}

impl GroupAction {
    /// Checks every invariant; a failure of the bounds or of the condition
    /// relating `d_G` to `d_Y` is reported as `PreconditionViolated`.
    pub fn new(candidate: ActionCandidate) -> Result<Self, ReductionError> {
        let (dg, dy, mul, inv) = validate_candidate(
            candidate.group_metric,
            candidate.space_metric,
            &candidate.table,
        )?;
        let one = Rational::ONE;
        if dg.diameter() > one || dy.diameter() > one {
            return Err(ReductionError::PreconditionViolated(
                "metrics must be bounded by 1".into(),
            ));
        }
        let action = GroupAction {
            group: dg,
            space: dy,
            table: candidate.table,
            mul,
            inv,
        };
        action.check_condition_b()?;
        Ok(action)
    }

    fn check_condition_b(&self) -> Result<(), ReductionError> {
        for g in 0..self.order() {
            for h in 0..self.order() {
                for y in 0..self.space.len() {
                    let rhs = self
                        .space
                        .d(self.act(self.inv[g], y), self.act(self.inv[h], y))
                        .half();
                    if self.group.d(g, h) < rhs {
                        return Err(ReductionError::PreconditionViolated(format!(
                            "d_G(g{g},g{h}) < ½ d_Y at y{y}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn group_metric(&self) -> &MetricSpace {
        &self.group
    }

    pub fn space_metric(&self) -> &MetricSpace {
        &self.space
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// `g.y`
    pub fn act(&self, g: usize, y: usize) -> usize {
        self.table[g][y]
    }

    /// `hg`
    pub fn multiply(&self, h: usize, g: usize) -> usize {
        self.mul[h][g]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inv[g]
    }

    pub fn to_candidate(&self) -> ActionCandidate {
        ActionCandidate {
            group_metric: self.group.matrix(),
            space_metric: self.space.matrix(),
            table: self.table.clone(),
        }
    }
}

type Validated = (MetricSpace, MetricSpace, Vec<Vec<usize>>, Vec<usize>);

fn validate_candidate(
    group_metric: Vec<Vec<Rational>>,
    space_metric: Vec<Vec<Rational>>,
    table: &[Vec<usize>],
) -> Result<Validated, ReductionError> {
    let dy = validate_metric(labelled("y", space_metric.len()), space_metric)?;
    let dg = validate_metric(labelled("g", group_metric.len()), group_metric)?;
    if table.len() != dg.len() {
        return Err(ReductionError::NotAnAction(format!(
            "{} table rows for {} group elements",
            table.len(),
            dg.len()
        )));
    }
    let (mul, inv) = group_law(table, dy.len())?;
    check_left_invariant(&dg, &mul)?;
    Ok((dg, dy, mul, inv))
}

/// Rescales both metrics into `[0,1]`, then replaces `d_G` by
/// `d′_G(g,h) = ½ d_G(g,h) + ½ max_y d_Y(g⁻¹.y, h⁻¹.y)`.
pub fn adjust_group_metric(candidate: ActionCandidate) -> Result<GroupAction, ReductionError> {
    let (dg, dy, mul, inv) = validate_candidate(
        candidate.group_metric,
        candidate.space_metric,
        &candidate.table,
    )?;
    let (dg, dy) = (scaled(&dg), scaled(&dy));
    let table = candidate.table;
    let m = dg.len();
    let matrix = (0..m)
        .map(|g| {
            (0..m)
                .map(|h| {
                    let sup = (0..dy.len())
                        .map(|y| dy.d(table[inv[g]][y], table[inv[h]][y]))
                        .max()
                        .unwrap_or(Rational::ZERO);
                    dg.d(g, h).half() + sup.half()
                })
                .collect()
        })
        .collect();
    let group = validate_metric(labelled("g", m), matrix)?;
    let action = GroupAction {
        group,
        space: dy,
        table,
        mul,
        inv,
    };
    action.check_condition_b()?;
    Ok(action)
}

/// The `G`-orbit of `z`, sorted.
pub fn orbit(action: &GroupAction, z: usize) -> Result<BTreeSet<usize>, ReductionError> {
    if z >= action.space.len() {
        return Err(ReductionError::PointOutOfRange(z));
    }
    Ok((0..action.order()).map(|g| action.act(g, z)).collect())
}

/// Points `g0..` (the group) followed by stars `x*0..` (one per point of `Y`):
/// `d(g,h) = d_G(g,h)`, `d(x*n, x*m) = max(n+2, m+2)`,
/// `d(x*n, g) = (n+2) + ½ d_Y(y_n, g⁻¹.z)`.
pub fn orbit_encode(action: &GroupAction, z: usize) -> Result<MetricSpace, ReductionError> {
    let k = action.space.len();
    if z >= k {
        return Err(ReductionError::PointOutOfRange(z));
    }
    let m = action.order();
    let star = |n: usize| Rational::integer(n as i64 + 2);
    let d = |a: usize, b: usize| -> Rational {
        match (a < m, b < m) {
            (true, true) => action.group.d(a, b),
            (false, false) if a == b => Rational::ZERO,
            (false, false) => star(a - m).max(star(b - m)),
            (true, false) => {
                star(b - m) + action.space.d(b - m, action.act(action.inv[a], z)).half()
            }
            (false, true) => {
                star(a - m) + action.space.d(a - m, action.act(action.inv[b], z)).half()
            }
        }
    };
    let matrix = (0..m + k)
        .map(|a| (0..m + k).map(|b| d(a, b)).collect())
        .collect();
    let mut labels = labelled("g", m);
    labels.extend(labelled("x*", k));
    Ok(validate_metric(labels, matrix)?)
}
