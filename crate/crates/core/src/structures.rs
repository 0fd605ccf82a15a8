//! Finite relational structures and their isomorphism problem.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::metric::{Bijection, SearchMode};
use crate::perm::Permutations;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Relation {
    pub arity: usize,
    pub tuples: BTreeSet<Vec<usize>>,
}

/// A universe `0..size` together with named relations on it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationalStructure {
    size: usize,
    relations: BTreeMap<String, Relation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("relation {name}: tuple {tuple:?} does not have arity {arity}")]
    WrongArity {
        name: String,
        tuple: Vec<usize>,
        arity: usize,
    },
    #[error("relation {name}: tuple {tuple:?} leaves the universe 0..{size}")]
    OutOfUniverse {
        name: String,
        tuple: Vec<usize>,
        size: usize,
    },
    #[error("SignatureMismatch: {0}")]
    SignatureMismatch(String),
}

impl StructureError {
    pub fn name(&self) -> &'static str {
        match self {
            StructureError::WrongArity { .. } => "WrongArity",
            StructureError::OutOfUniverse { .. } => "OutOfUniverse",
            StructureError::SignatureMismatch(_) => "SignatureMismatch",
        }
    }
}

impl RelationalStructure {
    pub fn new(size: usize) -> Self {
        RelationalStructure {
            size,
            relations: BTreeMap::new(),
        }
    }

    /// Adds (or replaces) relation `name`, checking every tuple.
    pub fn with_relation(
        mut self,
        name: impl Into<String>,
        arity: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, StructureError> {
        let name = name.into();
        let mut set = BTreeSet::new();
        for tuple in tuples {
            if tuple.len() != arity {
                return Err(StructureError::WrongArity { name, tuple, arity });
            }
            if tuple.iter().any(|&e| e >= self.size) {
                return Err(StructureError::OutOfUniverse {
                    name,
                    tuple,
                    size: self.size,
                });
            }
            set.insert(tuple);
        }
        self.relations.insert(name, Relation { arity, tuples: set });
        Ok(self)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn signature(&self) -> Vec<(&str, usize)> {
        self.relations
            .iter()
            .map(|(n, r)| (n.as_str(), r.arity))
            .collect()
    }
}

fn check_signatures(
    a: &RelationalStructure,
    b: &RelationalStructure,
) -> Result<(), StructureError> {
    if a.signature() != b.signature() {
        return Err(StructureError::SignatureMismatch(format!(
            "{:?} vs {:?}",
            a.signature(),
            b.signature()
        )));
    }
    Ok(())
}

/// Independent certificate check: `f` maps every relation's tuple set exactly
/// onto the corresponding tuple set of `b`.
pub fn is_structure_isomorphism(
    a: &RelationalStructure,
    b: &RelationalStructure,
    f: &Bijection,
) -> bool {
    if a.size != b.size || f.len() != a.size || a.signature() != b.signature() {
        return false;
    }
    a.relations.iter().all(|(name, rel)| {
        let image: BTreeSet<Vec<usize>> = rel
            .tuples
            .iter()
            .map(|t| t.iter().map(|&e| f.apply(e)).collect())
            .collect();
        image == b.relations[name].tuples
    })
}

/// Searches for an isomorphism `A -> B`.
///
/// Pruned mode backtracks over elements in index order, trying only targets
/// with the same degree profile (occurrence counts per relation and position)
/// and checking every tuple as soon as all its entries are assigned.
pub fn structure_isomorphic(
    a: &RelationalStructure,
    b: &RelationalStructure,
    mode: SearchMode,
) -> Result<Option<Bijection>, StructureError> {
    check_signatures(a, b)?;
    if a.size != b.size {
        return Ok(None);
    }
    if a.relations
        .iter()
        .any(|(name, rel)| rel.tuples.len() != b.relations[name].tuples.len())
    {
        return Ok(None);
    }
    let found = match mode {
        SearchMode::Exhaustive => Permutations::new(a.size)
            .map(|p| Bijection::new(p).expect("permutation"))
            .find(|f| is_structure_isomorphism(a, b, f)),
        SearchMode::Pruned => {
            pruned(a, b).map(|p| Bijection::new(p).expect("backtracking yields a bijection"))
        }
    };
    Ok(found)
}

fn degree_profiles(s: &RelationalStructure) -> Vec<Vec<usize>> {
    let width: usize = s.relations.values().map(|r| r.arity.max(1)).sum();
    let mut prof = vec![vec![0; width]; s.size];
    let mut offset = 0;
    for rel in s.relations.values() {
        for t in &rel.tuples {
            for (pos, &e) in t.iter().enumerate() {
                prof[e][offset + pos] += 1;
            }
        }
        offset += rel.arity.max(1);
    }
    prof
}

fn pruned(a: &RelationalStructure, b: &RelationalStructure) -> Option<Vec<usize>> {
    let n = a.size;
    let pa = degree_profiles(a);
    let pb = degree_profiles(b);
    let mut sa = pa.clone();
    let mut sb = pb.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return None;
    }
    let candidates: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| pa[i] == pb[j]).collect())
        .collect();

    // Tuples of A grouped by their largest entry: they become checkable once
    // that element is assigned.
    let mut closing: Vec<Vec<(&str, &Vec<usize>)>> = vec![Vec::new(); n];
    for (name, rel) in &a.relations {
        for t in &rel.tuples {
            if let Some(&m) = t.iter().max() {
                closing[m].push((name.as_str(), t));
            }
        }
    }

    struct Search<'a> {
        n: usize,
        b: &'a RelationalStructure,
        candidates: Vec<Vec<usize>>,
        closing: Vec<Vec<(&'a str, &'a Vec<usize>)>>,
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
                self.map[i] = j;
                let ok = self.closing[i].iter().all(|(name, t)| {
                    let image: Vec<usize> = t.iter().map(|&e| self.map[e]).collect();
                    self.b.relations[*name].tuples.contains(&image)
                });
                if !ok {
                    continue;
                }
                self.used[j] = true;
                if self.extend(i + 1) {
                    return true;
                }
                self.used[j] = false;
            }
            false
        }
    }

    // Nullary relations have no elements to close them; compare directly.
    for (name, rel) in &a.relations {
        if rel.arity == 0 && rel.tuples != b.relations[name].tuples {
            return None;
        }
    }
    let mut s = Search {
        n,
        b,
        candidates,
        closing,
        map: vec![0; n],
        used: vec![false; n],
    };
    s.extend(0).then_some(s.map)
}
