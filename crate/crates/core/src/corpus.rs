//! Seeded random inputs for corpus-level checks.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::{Bijection, MetricSpace};
use crate::rational::Rational;
use crate::reductions::{tree_to_space, RadiusSequence};
use crate::trees::{validate_tree, Sequence, Tree};
use crate::ultrametric::{transfer, UltrametricSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A tree with between 1 and `max_nodes` nodes, entries below `branching`
/// and length at most `depth`. Entries are drawn at random, so the children of
/// a node need not be numbered contiguously.
pub fn random_tree<R: Rng>(rng: &mut R, max_nodes: usize, branching: u32, depth: usize) -> Tree {
    let target = rng.gen_range(1..=max_nodes.max(1));
    let mut nodes: Vec<Sequence> = vec![Vec::new()];
    while nodes.len() < target {
        let open: Vec<(usize, Vec<u32>)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, u)| u.len() < depth)
            .filter_map(|(i, u)| {
                let free: Vec<u32> = (0..branching)
                    .filter(|&c| {
                        !nodes
                            .iter()
                            .any(|v| v.len() == u.len() + 1 && v.starts_with(u) && v[u.len()] == c)
                    })
                    .collect();
                (!free.is_empty()).then_some((i, free))
            })
            .collect();
        let Some((i, free)) = open.choose(rng) else {
            break;
        };
        let mut child = nodes[*i].clone();
        child.push(*free.choose(rng).expect("nonempty"));
        nodes.push(child);
    }
    validate_tree(nodes).expect("grown by single children")
}

/// A uniformly random permutation of `0..n`.
pub fn random_relabeling<R: Rng>(rng: &mut R, n: usize) -> Bijection {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    Bijection::new(v).expect("shuffled identity")
}

/// A strictly increasing map from `domain` to positive rationals with
/// denominators at most 4.
pub fn random_monotone_map<R: Rng>(
    rng: &mut R,
    domain: &BTreeSet<Rational>,
) -> BTreeMap<Rational, Rational> {
    let mut acc = Rational::ZERO;
    domain
        .iter()
        .map(|&r| {
            acc = acc + Rational::new(rng.gen_range(1..=8), rng.gen_range(1..=4));
            (r, acc)
        })
        .collect()
}

/// `X_T` for a random tree `T` with at most `max_size` nodes, pushed through a
/// random monotone map and randomly relabeled.
pub fn random_ultrametric<R: Rng>(rng: &mut R, max_size: usize) -> UltrametricSpace {
    let t = random_tree(rng, max_size, 3, 3);
    let x = tree_to_space(&t, &RadiusSequence::harmonic(4)).expect("depth at most 3");
    let rho = random_monotone_map(rng, &x.distance_spectrum());
    let y = transfer(&x, &rho).expect("monotone map on the spectrum");
    let perm = random_relabeling(rng, y.len());
    UltrametricSpace::try_from(y.permuted(&perm)).expect("relabeling keeps ultrametricity")
}

/// `count` random ultrametric spaces; roughly a third are relabeled copies of
/// earlier entries, so isometric pairs occur.
pub fn ultrametric_batch(seed: u64, count: usize, max_size: usize) -> Vec<UltrametricSpace> {
    let mut rng = rng(seed);
    let mut out: Vec<UltrametricSpace> = Vec::with_capacity(count);
    while out.len() < count {
        if !out.is_empty() && rng.gen_ratio(1, 3) {
            let base = out[rng.gen_range(0..out.len())].clone();
            let perm = random_relabeling(&mut rng, base.len());
            out.push(
                UltrametricSpace::try_from(base.permuted(&perm))
                    .expect("relabeling keeps ultrametricity"),
            );
        } else {
            out.push(random_ultrametric(&mut rng, max_size));
        }
    }
    out
}

/// A metric on `n` points with distances in `{1, 3/2, 2}`; any such choice
/// satisfies the triangle inequality.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> MetricSpace {
    let values = [Rational::ONE, Rational::new(3, 2), Rational::integer(2)];
    let upper: Vec<Rational> = (0..n * n)
        .map(|_| *values.choose(rng).expect("nonempty"))
        .collect();
    let m = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::ZERO
                    } else {
                        upper[i.min(j) * n + i.max(j)]
                    }
                })
                .collect()
        })
        .collect();
    MetricSpace::from_matrix(m).expect("distances in [1,2]")
}

/// `count` random metric spaces of sizes `1..=max_size`, with relabeled
/// copies mixed in.
pub fn metric_batch(seed: u64, count: usize, max_size: usize) -> Vec<MetricSpace> {
    let mut rng = rng(seed);
    let mut out: Vec<MetricSpace> = Vec::with_capacity(count);
    while out.len() < count {
        if !out.is_empty() && rng.gen_ratio(1, 3) {
            let base = &out[rng.gen_range(0..out.len())];
            let perm = random_relabeling(&mut rng, base.len());
            out.push(base.permuted(&perm));
        } else {
            let n = rng.gen_range(1..=max_size);
            out.push(random_metric(&mut rng, n));
        }
    }
    out
}
