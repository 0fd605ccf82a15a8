//! Structure theory of finite ultrametric spaces.
//!
//! In an ultrametric space any two open balls are nested or disjoint, so the
//! open balls of a fixed radius partition the space. Everything here is built
//! on that fact: the dendrogram code recurses through the partition at the
//! diameter, the ball structure exports the whole ball lattice as a relational
//! structure, and the anchored check compares spheres around a fixed point.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::Deref;

use thiserror::Error;

use crate::code::CanonicalCode;
use crate::metric::{validate_metric, MetricSpace};
use crate::rational::Rational;
use crate::structures::RelationalStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UltraError {
    #[error("NotUltrametric")]
    NotUltrametric,
    #[error("NonPositiveRadius({0})")]
    NonPositiveRadius(Rational),
    #[error("PointOutOfRange({0})")]
    PointOutOfRange(usize),
    /// `rho(a) >= rho(b)` although `a < b`.
    #[error("NotMonotone({0},{1})")]
    NotMonotone(Rational, Rational),
    #[error("NonPositiveImage({0})")]
    NonPositiveImage(Rational),
    #[error("DomainGap({0})")]
    DomainGap(Rational),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(&'static str),
}

impl UltraError {
    pub fn name(&self) -> &'static str {
        match self {
            UltraError::NotUltrametric => "NotUltrametric",
            UltraError::NonPositiveRadius(_) => "NonPositiveRadius",
            UltraError::PointOutOfRange(_) => "PointOutOfRange",
            UltraError::NotMonotone(..) => "NotMonotone",
            UltraError::NonPositiveImage(_) => "NonPositiveImage",
            UltraError::DomainGap(_) => "DomainGap",
            UltraError::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

/// A metric space whose ultrametric flag is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltrametricSpace(MetricSpace);

impl TryFrom<MetricSpace> for UltrametricSpace {
    type Error = UltraError;

    fn try_from(space: MetricSpace) -> Result<Self, UltraError> {
        if space.is_ultrametric() {
            Ok(UltrametricSpace(space))
        } else {
            Err(UltraError::NotUltrametric)
        }
    }
}

impl Deref for UltrametricSpace {
    type Target = MetricSpace;
    fn deref(&self) -> &MetricSpace {
        &self.0
    }
}

impl UltrametricSpace {
    pub fn as_metric(&self) -> &MetricSpace {
        &self.0
    }

    pub fn into_metric(self) -> MetricSpace {
        self.0
    }

    pub fn subspace(&self, points: &[usize]) -> UltrametricSpace {
        UltrametricSpace(self.0.subspace(points))
    }
}

/// `B_q(x) = { y : d(x,y) < q }`, in index order.
pub fn open_ball(x: &MetricSpace, center: usize, q: Rational) -> Vec<usize> {
    (0..x.len()).filter(|&y| x.d(center, y) < q).collect()
}

/// Open balls of radius `r`, i.e. the classes of `d(x,y) < r`.
///
/// Blocks are listed by their smallest point.
pub fn ball_partition(x: &UltrametricSpace, r: Rational) -> Result<Vec<Vec<usize>>, UltraError> {
    if !r.is_positive() {
        return Err(UltraError::NonPositiveRadius(r));
    }
    Ok(partition_points(x, &(0..x.len()).collect::<Vec<_>>(), r))
}

fn partition_points(x: &MetricSpace, points: &[usize], r: Rational) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for &p in points {
        match blocks.iter_mut().find(|b| x.d(b[0], p) < r) {
            Some(b) => b.push(p),
            None => blocks.push(vec![p]),
        }
    }
    blocks
}

/// Dendrogram code: a leaf for a point, otherwise the diameter together with
/// the codes of the balls of radius equal to the diameter.
pub fn canonical_code(x: &UltrametricSpace) -> CanonicalCode {
    code_of(x, &(0..x.len()).collect::<Vec<_>>())
}

fn code_of(x: &MetricSpace, points: &[usize]) -> CanonicalCode {
    if points.len() == 1 {
        return CanonicalCode::Leaf;
    }
    let diam = points
        .iter()
        .flat_map(|&i| points.iter().map(move |&j| (i, j)))
        .map(|(i, j)| x.d(i, j))
        .max()
        .expect("nonempty");
    let children = partition_points(x, points, diam)
        .iter()
        .map(|b| code_of(x, b))
        .collect();
    CanonicalCode::node(Some(diam), children)
}

/// The ball lattice of a space: distinct open balls with rational radius from
/// a finite threshold set, ordered by inclusion, with diameter predicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallStructure {
    /// Distinct balls, each sorted, in lexicographic order.
    pub balls: Vec<Vec<usize>>,
    pub thresholds: Vec<Rational>,
}

/// Relation name of the unary predicate `diam(B) < q`.
pub fn diameter_predicate_name(q: Rational) -> String {
    format!("S_{q}")
}

/// The threshold set `R(X) ∪ {diam(X) + 1}`.
pub fn default_ball_thresholds(x: &MetricSpace) -> BTreeSet<Rational> {
    let mut q = x.distance_spectrum();
    q.insert(x.diameter() + Rational::ONE);
    q
}

pub fn ball_structure(x: &UltrametricSpace) -> BallStructure {
    ball_structure_with_thresholds(x, &default_ball_thresholds(x))
        .expect("default thresholds are positive")
}

/// Ball structure over an explicit threshold set (all entries must be positive).
pub fn ball_structure_with_thresholds(
    x: &UltrametricSpace,
    thresholds: &BTreeSet<Rational>,
) -> Result<BallStructure, UltraError> {
    if let Some(q) = thresholds.iter().find(|q| !q.is_positive()) {
        return Err(UltraError::NonPositiveRadius(*q));
    }
    let balls: BTreeSet<Vec<usize>> = thresholds
        .iter()
        .flat_map(|&q| (0..x.len()).map(move |c| open_ball(x, c, q)))
        .collect();
    Ok(BallStructure {
        balls: balls.into_iter().collect(),
        thresholds: thresholds.iter().copied().collect(),
    })
}

impl BallStructure {
    pub fn diameter_of(x: &MetricSpace, ball: &[usize]) -> Rational {
        ball.iter()
            .flat_map(|&i| ball.iter().map(move |&j| x.d(i, j)))
            .max()
            .unwrap_or(Rational::ZERO)
    }

    /// Relation `R` (inclusion) and one unary `S_q` per threshold.
    pub fn to_structure(&self, x: &MetricSpace) -> RelationalStructure {
        let n = self.balls.len();
        let sets: Vec<BTreeSet<usize>> = self
            .balls
            .iter()
            .map(|b| b.iter().copied().collect())
            .collect();
        let inclusion = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| sets[i].is_subset(&sets[j]))
            .map(|(i, j)| vec![i, j]);
        let mut s = RelationalStructure::new(n)
            .with_relation("R", 2, inclusion)
            .expect("indices in range");
        let diameters: Vec<Rational> = self.balls.iter().map(|b| Self::diameter_of(x, b)).collect();
        for &q in &self.thresholds {
            let members = (0..n).filter(|&i| diameters[i] < q).map(|i| vec![i]);
            s = s
                .with_relation(diameter_predicate_name(q), 1, members)
                .expect("indices in range");
        }
        s
    }
}

/// Spheres `C_r(x) = { y : d(x,y) = r }` for every realized `r`, increasing.
pub fn sphere_decompose(
    x: &MetricSpace,
    center: usize,
) -> Result<Vec<(Rational, Vec<usize>)>, UltraError> {
    if center >= x.len() {
        return Err(UltraError::PointOutOfRange(center));
    }
    Ok(spheres_within(x, &(0..x.len()).collect::<Vec<_>>(), center))
}

fn spheres_within(x: &MetricSpace, points: &[usize], center: usize) -> Vec<(Rational, Vec<usize>)> {
    let mut by_radius: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    for &p in points {
        if p != center {
            by_radius.entry(x.d(center, p)).or_default().push(p);
        }
    }
    by_radius.into_iter().collect()
}

/// Isometry test through spheres around an anchor: fix the first point of
/// `X`, and look for a point of `Y` whose spheres match radius by radius with
/// recursively isometric spheres.
///
/// Sub-verdicts are memoized on the pair of point sets.
pub fn anchored_isometry_check(x: &UltrametricSpace, y: &UltrametricSpace) -> bool {
    let mut memo = HashMap::new();
    anchored(
        x,
        y,
        &(0..x.len()).collect::<Vec<_>>(),
        &(0..y.len()).collect::<Vec<_>>(),
        &mut memo,
    )
}

type Memo = HashMap<(Vec<usize>, Vec<usize>), bool>;

fn anchored(x: &MetricSpace, y: &MetricSpace, a: &[usize], b: &[usize], memo: &mut Memo) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.len() <= 1 {
        return true;
    }
    let key = (a.to_vec(), b.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let anchor = a[0];
    let spheres_x = spheres_within(x, a, anchor);
    let verdict = b.iter().any(|&cand| {
        let spheres_y = spheres_within(y, b, cand);
        spheres_x.len() == spheres_y.len()
            && spheres_x
                .iter()
                .zip(&spheres_y)
                .all(|((rx, sx), (ry, sy))| rx == ry && sx.len() == sy.len())
            && spheres_x
                .iter()
                .zip(&spheres_y)
                .all(|((_, sx), (_, sy))| anchored(x, y, sx, sy, memo))
    });
    memo.insert(key, verdict);
    verdict
}

/// Replaces every distance `r` by `rho(r)`.
///
/// `rho` must be strictly increasing with positive values and defined on all
/// of `R(X)`.
pub fn transfer(
    x: &UltrametricSpace,
    rho: &BTreeMap<Rational, Rational>,
) -> Result<UltrametricSpace, UltraError> {
    let mut prev: Option<(Rational, Rational)> = None;
    for (&k, &v) in rho {
        if !v.is_positive() {
            return Err(UltraError::NonPositiveImage(k));
        }
        if let Some((pk, pv)) = prev {
            if pv >= v {
                return Err(UltraError::NotMonotone(pk, k));
            }
        }
        prev = Some((k, v));
    }
    if let Some(gap) = x
        .distance_spectrum()
        .into_iter()
        .find(|r| !rho.contains_key(r))
    {
        return Err(UltraError::DomainGap(gap));
    }
    let out = x.map_distances_unchecked(|r| rho[&r]);
    debug_assert!(out.is_ultrametric());
    UltrametricSpace::try_from(out)
}

/// `U_D` restricted to `k` copies: points `D × {0..k-1}` with
/// `d((r,a),(q,b)) = max(r,q)` for distinct points.
///
/// Points are ordered by distance value, then copy index; labels read `r:a`.
pub fn universal_discrete(
    distances: &BTreeSet<Rational>,
    k: usize,
) -> Result<UltrametricSpace, UltraError> {
    if distances.is_empty() {
        return Err(UltraError::InvalidParameter(
            "distance set must be nonempty",
        ));
    }
    if k < 2 {
        return Err(UltraError::InvalidParameter("k must be at least 2"));
    }
    if let Some(r) = distances.iter().find(|r| !r.is_positive()) {
        return Err(UltraError::NonPositiveRadius(*r));
    }
    let points: Vec<(Rational, usize)> = distances
        .iter()
        .flat_map(|&r| (0..k).map(move |a| (r, a)))
        .collect();
    let labels = points.iter().map(|(r, a)| format!("{r}:{a}")).collect();
    let matrix = points
        .iter()
        .map(|p| {
            points
                .iter()
                .map(|q| if p == q { Rational::ZERO } else { p.0.max(q.0) })
                .collect()
        })
        .collect();
    let space = validate_metric(labels, matrix).expect("max construction is a metric");
    UltrametricSpace::try_from(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{isometric_exhaustive, Bijection};
    use crate::rational::rat;
    use proptest::prelude::*;

    fn ultra(rows: &[&[i64]]) -> UltrametricSpace {
        let mat = rows
            .iter()
            .map(|r| r.iter().map(|&v| Rational::integer(v)).collect())
            .collect();
        UltrametricSpace::try_from(MetricSpace::from_matrix(mat).unwrap()).unwrap()
    }

    fn abc() -> UltrametricSpace {
        // d(a,b)=1, d(a,c)=d(b,c)=2
        ultra(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]])
    }

    fn all_two() -> UltrametricSpace {
        ultra(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]])
    }

    #[test]
    fn rejects_plain_metric() {
        let x = MetricSpace::from_matrix(vec![
            vec![rat(0, 1), rat(1, 1), rat(2, 1)],
            vec![rat(1, 1), rat(0, 1), rat(1, 1)],
            vec![rat(2, 1), rat(1, 1), rat(0, 1)],
        ])
        .unwrap();
        assert_eq!(
            UltrametricSpace::try_from(x),
            Err(UltraError::NotUltrametric)
        );
    }

    #[test]
    fn partitions() {
        let x = abc();
        assert_eq!(
            ball_partition(&x, rat(2, 1)).unwrap(),
            vec![vec![0, 1], vec![2]]
        );
        assert_eq!(ball_partition(&x, rat(3, 1)).unwrap(), vec![vec![0, 1, 2]]);
        let s = UltrametricSpace::try_from(MetricSpace::singleton("a")).unwrap();
        assert_eq!(ball_partition(&s, rat(5, 1)).unwrap(), vec![vec![0]]);
        assert!(ball_partition(&x, Rational::ZERO).is_err());
    }

    #[test]
    fn codes() {
        let s = UltrametricSpace::try_from(MetricSpace::singleton("a")).unwrap();
        assert_eq!(canonical_code(&s), CanonicalCode::Leaf);
        assert_eq!(canonical_code(&all_two()).to_string(), "(2 * * *)");
        assert_eq!(canonical_code(&abc()).to_string(), "(2 * (1 * *))");
        assert_ne!(canonical_code(&abc()), canonical_code(&all_two()));
        let relabeled =
            UltrametricSpace::try_from(abc().permuted(&Bijection::new(vec![2, 0, 1]).unwrap()))
                .unwrap();
        assert_eq!(canonical_code(&relabeled), canonical_code(&abc()));
    }

    #[test]
    fn ball_structure_examples() {
        let s = UltrametricSpace::try_from(MetricSpace::singleton("a")).unwrap();
        let bs = ball_structure(&s);
        assert_eq!(bs.balls, vec![vec![0]]);
        let st = bs.to_structure(&s);
        assert_eq!(st.relation("R").unwrap().tuples, [vec![0, 0]].into());

        let two = ultra(&[&[0, 1], &[1, 0]]);
        let bs = ball_structure(&two);
        assert_eq!(bs.thresholds, vec![rat(1, 1), rat(2, 1)]);
        assert_eq!(bs.balls, vec![vec![0], vec![0, 1], vec![1]]);
        let st = bs.to_structure(&two);
        assert_eq!(
            st.relation("S_1").unwrap().tuples,
            [vec![0], vec![2]].into()
        );
        assert_eq!(
            st.relation("S_2").unwrap().tuples,
            [vec![0], vec![1], vec![2]].into()
        );
        assert_eq!(
            st.relation("R").unwrap().tuples,
            [vec![0, 0], vec![0, 1], vec![1, 1], vec![2, 1], vec![2, 2]].into()
        );
    }

    #[test]
    fn spheres() {
        let x = abc();
        assert_eq!(
            sphere_decompose(&x, 0).unwrap(),
            vec![(rat(1, 1), vec![1]), (rat(2, 1), vec![2])]
        );
        assert_eq!(
            sphere_decompose(&x, 2).unwrap(),
            vec![(rat(2, 1), vec![0, 1])]
        );
        assert!(sphere_decompose(&MetricSpace::singleton("a"), 0)
            .unwrap()
            .is_empty());
        assert!(sphere_decompose(&x, 3).is_err());
    }

    #[test]
    fn anchored_examples() {
        let s = UltrametricSpace::try_from(MetricSpace::singleton("a")).unwrap();
        assert!(anchored_isometry_check(&s, &s));
        let relabeled =
            UltrametricSpace::try_from(abc().permuted(&Bijection::new(vec![1, 2, 0]).unwrap()))
                .unwrap();
        assert!(anchored_isometry_check(&abc(), &relabeled));
        assert!(isometric_exhaustive(&abc(), &relabeled));
        assert!(!anchored_isometry_check(&abc(), &all_two()));
        assert!(!isometric_exhaustive(&abc(), &all_two()));
    }

    #[test]
    fn transfer_examples() {
        let x = abc();
        let identity: BTreeMap<_, _> = [(rat(1, 1), rat(1, 1)), (rat(2, 1), rat(2, 1))].into();
        assert_eq!(transfer(&x, &identity).unwrap(), x);

        let doubling: BTreeMap<_, _> = [(rat(1, 1), rat(2, 1)), (rat(2, 1), rat(4, 1))].into();
        let tx = transfer(&x, &doubling).unwrap();
        assert_eq!(tx.distance_spectrum(), [rat(2, 1), rat(4, 1)].into());
        let partner =
            UltrametricSpace::try_from(x.permuted(&Bijection::new(vec![2, 1, 0]).unwrap()))
                .unwrap();
        let tp = transfer(&partner, &doubling).unwrap();
        assert!(isometric_exhaustive(&x, &partner));
        assert!(isometric_exhaustive(&tx, &tp));

        let bad: BTreeMap<_, _> = [(rat(1, 1), rat(3, 1)), (rat(2, 1), rat(2, 1))].into();
        assert_eq!(
            transfer(&x, &bad),
            Err(UltraError::NotMonotone(rat(1, 1), rat(2, 1)))
        );
        let short: BTreeMap<_, _> = [(rat(1, 1), rat(3, 1))].into();
        assert_eq!(transfer(&x, &short), Err(UltraError::DomainGap(rat(2, 1))));
    }

    #[test]
    fn universal_examples() {
        let u = universal_discrete(&[rat(1, 1)].into(), 2).unwrap();
        assert_eq!(u.len(), 2);
        assert_eq!(u.d(0, 1), rat(1, 1));

        let u = universal_discrete(&[rat(1, 1), rat(2, 1)].into(), 2).unwrap();
        assert_eq!(u.len(), 4);
        assert_eq!(u.d(0, 1), rat(1, 1));
        for i in 0..4 {
            for j in 0..4 {
                if i != j && (i >= 2 || j >= 2) {
                    assert_eq!(u.d(i, j), rat(2, 1));
                }
            }
        }
        let d: BTreeSet<_> = [rat(1, 1), rat(2, 1), rat(3, 1)].into();
        let u = universal_discrete(&d, 3).unwrap();
        assert_eq!(u.distance_spectrum(), d);
        assert!(universal_discrete(&d, 1).is_err());
        assert!(universal_discrete(&BTreeSet::new(), 2).is_err());
    }

    /// Random ultrametric from a random dendrogram: merge clusters at increasing heights.
    fn arb_ultra(max: usize) -> impl Strategy<Value = UltrametricSpace> {
        (1..=max)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    proptest::collection::vec(
                        (0usize..64, 0usize..64, 1i64..4),
                        n.saturating_sub(1),
                    ),
                )
            })
            .prop_map(|(n, merges)| {
                let mut cluster: Vec<usize> = (0..n).collect();
                let mut mat = vec![vec![Rational::ZERO; n]; n];
                let mut height = 0i64;
                for (a, b, step) in merges {
                    let ids: BTreeSet<usize> = cluster.iter().copied().collect();
                    let ids: Vec<usize> = ids.into_iter().collect();
                    if ids.len() < 2 {
                        break;
                    }
                    let ca = ids[a % ids.len()];
                    let mut cb = ids[b % ids.len()];
                    if ca == cb {
                        cb = ids[(b + 1) % ids.len()];
                        if ca == cb {
                            cb = ids[(a + 1) % ids.len()];
                        }
                    }
                    height += step;
                    for i in 0..n {
                        for j in 0..n {
                            if cluster[i] == ca && cluster[j] == cb {
                                mat[i][j] = Rational::integer(height);
                                mat[j][i] = Rational::integer(height);
                            }
                        }
                    }
                    for c in cluster.iter_mut() {
                        if *c == cb {
                            *c = ca;
                        }
                    }
                }
                UltrametricSpace::try_from(MetricSpace::from_matrix(mat).unwrap()).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn balls_nested_or_disjoint(x in arb_ultra(7)) {
            let radii: Vec<Rational> = x.distance_spectrum().into_iter().chain([rat(1, 2), x.diameter() + Rational::ONE]).collect();
            for &q in &radii {
                let blocks = ball_partition(&x, q).unwrap();
                let mut seen = vec![0usize; x.len()];
                for b in &blocks { for &p in b { seen[p] += 1; } }
                prop_assert!(seen.iter().all(|&c| c == 1));
            }
            for c1 in 0..x.len() { for c2 in 0..x.len() { for &q1 in &radii { for &q2 in &radii {
                let b1: BTreeSet<usize> = open_ball(&x, c1, q1).into_iter().collect();
                let b2: BTreeSet<usize> = open_ball(&x, c2, q2).into_iter().collect();
                prop_assert!(b1.is_disjoint(&b2) || b1.is_subset(&b2) || b2.is_subset(&b1));
            }}}}
        }

        #[test]
        fn code_anchored_exhaustive_agree(x in arb_ultra(6), y in arb_ultra(6)) {
            let e = isometric_exhaustive(&x, &y);
            prop_assert_eq!(canonical_code(&x) == canonical_code(&y), e);
            prop_assert_eq!(anchored_isometry_check(&x, &y), e);
        }

        #[test]
        fn code_is_relabeling_invariant((x, perm) in arb_ultra(7).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })) {
            let y = UltrametricSpace::try_from(x.permuted(&Bijection::new(perm).unwrap())).unwrap();
            prop_assert_eq!(canonical_code(&x), canonical_code(&y));
            prop_assert!(anchored_isometry_check(&x, &y));
        }

        #[test]
        fn dense_subset_realizes_all_distances(x in arb_ultra(7), pick in proptest::collection::vec(0usize..64, 1..40)) {
            // Y hits every ball of every realized radius, so R(Y) = R(X).
            let mut chosen = BTreeSet::new();
            for &r in &x.distance_spectrum() {
                for (bi, block) in ball_partition(&x, r).unwrap().iter().enumerate() {
                    chosen.insert(block[pick[bi % pick.len()] % block.len()]);
                }
            }
            if chosen.is_empty() {
                chosen.insert(0);
            }
            let y = x.subspace(&chosen.into_iter().collect::<Vec<_>>());
            prop_assert_eq!(y.distance_spectrum(), x.distance_spectrum());
        }
    }
}
