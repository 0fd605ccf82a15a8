//! `verify-reduction`: named corpora, maps and oracles.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use metriso::corpus::{metric_batch, ultrametric_batch};
use metriso::graph::all_graphs;
use metriso::reductions::{
    default_thresholds, discrete_to_structure, graph_to_space, gromov_full, tree_to_space,
    GromovMatrix, RadiusSequence,
};
use metriso::trees::{enumerate_trees, tree_isomorphic_exhaustive};
use metriso::ultrametric::ball_structure_with_thresholds;
use metriso::verify::{verify_reduction, Fallible, Verdict};
use metriso::{
    anchored_isometry_check, canonical_code, find_isometry, graph_isomorphic, io,
    structure_isomorphic, tree_canonical, CanonicalCode, Graph, MetricSpace, Rational,
    RelationalStructure, SearchMode, Tree, UltrametricSpace,
};

use crate::{CliError, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Tree,
    Graph,
    Space,
    Structure,
    Gromov,
    Code,
    Unit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Obj {
    Tree(Tree),
    Graph(Graph),
    Space(MetricSpace),
    Structure(RelationalStructure),
    Gromov(Vec<BTreeSet<GromovMatrix>>),
    Code(CanonicalCode),
    Unit,
}

impl Obj {
    fn describe(&self) -> String {
        match self {
            Obj::Tree(t) => t.to_string(),
            Obj::Graph(g) => {
                let edges: Vec<String> =
                    g.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
                format!("graph {} [{}]", g.vertex_count(), edges.join(","))
            }
            Obj::Space(x) => {
                let rows: Vec<String> = (0..x.len())
                    .map(|i| {
                        x.row(i)
                            .iter()
                            .map(|c| c.to_string())
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .collect();
                format!("space {} [{}]", x.len(), rows.join("; "))
            }
            Obj::Structure(s) => {
                let rels: Vec<String> = s
                    .relations()
                    .iter()
                    .map(|(n, r)| format!("{n}:{}", r.tuples.len()))
                    .collect();
                format!("structure {} [{}]", s.size(), rels.join(" "))
            }
            Obj::Gromov(g) => {
                let sizes: Vec<String> = g.iter().map(|s| s.len().to_string()).collect();
                format!("gromov [{}]", sizes.join(" "))
            }
            Obj::Code(c) => c.to_string(),
            Obj::Unit => "()".into(),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn numbers(spec: &str, parts: &[&str], min: usize, max: usize) -> Result<Vec<usize>, CliError> {
    if parts.len() < min || parts.len() > max {
        return Err(usage(format!("--corpus {spec}: wrong number of fields")));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| usage(format!("--corpus {spec}: bad number {p:?}")))
        })
        .collect()
}

fn corpus(spec: &str, seed: u64) -> Result<(Kind, Vec<Obj>), CliError> {
    let fields: Vec<&str> = spec.split(':').collect();
    let (name, rest) = fields.split_first().expect("split yields one field");
    match *name {
        "trees" => {
            let v = numbers(spec, rest, 1, 3)?;
            if v.len() == 2 {
                return Err(usage(format!(
                    "--corpus {spec}: give both branching and depth"
                )));
            }
            let n = v[0];
            if n > 7 {
                return Err(usage("--corpus trees: at most 7 nodes"));
            }
            let (b, d) = if v.len() == 3 {
                (v[1], v[2])
            } else {
                (n.saturating_sub(1).max(1), n.saturating_sub(1))
            };
            Ok((
                Kind::Tree,
                enumerate_trees(n, b as u32, d).map(Obj::Tree).collect(),
            ))
        }
        "graphs" => {
            let n = numbers(spec, rest, 1, 1)?[0];
            if n > 5 {
                return Err(usage("--corpus graphs: at most 5 vertices"));
            }
            Ok((
                Kind::Graph,
                (1..=n).flat_map(all_graphs).map(Obj::Graph).collect(),
            ))
        }
        "ultra" => {
            let v = numbers(spec, rest, 1, 2)?;
            let size = v.get(1).copied().unwrap_or(8);
            Ok((
                Kind::Space,
                ultrametric_batch(seed, v[0], size)
                    .into_iter()
                    .map(|x| Obj::Space(x.into_metric()))
                    .collect(),
            ))
        }
        "metric" => {
            let v = numbers(spec, rest, 1, 2)?;
            let size = v.get(1).copied().unwrap_or(5);
            Ok((
                Kind::Space,
                metric_batch(seed, v[0], size)
                    .into_iter()
                    .map(Obj::Space)
                    .collect(),
            ))
        }
        _ => Err(usage(format!(
            "unknown corpus {name:?}; expected trees, graphs, ultra or metric"
        ))),
    }
}

fn map_kinds(name: &str, input: Kind) -> Result<Kind, CliError> {
    let (from, to) = match name {
        "identity" => return Ok(input),
        "constant" => return Ok(Kind::Unit),
        "tree2space" => (Kind::Tree, Kind::Space),
        "tree-canon" => (Kind::Tree, Kind::Code),
        "graph2space" => (Kind::Graph, Kind::Space),
        "disc2struct" | "ball-structure" => (Kind::Space, Kind::Structure),
        "gromov" => (Kind::Space, Kind::Gromov),
        "canon-ultra" => (Kind::Space, Kind::Code),
        _ => return Err(usage(format!("unknown map {name:?}"))),
    };
    if from != input {
        return Err(usage(format!(
            "map {name} does not accept {input:?} objects"
        )));
    }
    Ok(to)
}

fn check_oracle(flag: &str, name: &str, kind: Kind) -> Result<(), CliError> {
    let wants = match name {
        "equal" => return Ok(()),
        "tree-iso" => Kind::Tree,
        "graph-iso" => Kind::Graph,
        "isometry" | "isometry-exhaustive" | "anchored" => Kind::Space,
        "struct-iso" => Kind::Structure,
        _ => return Err(usage(format!("--{flag}: unknown oracle {name:?}"))),
    };
    if wants != kind {
        return Err(usage(format!(
            "--{flag} {name} does not apply to {kind:?} objects"
        )));
    }
    Ok(())
}

fn oracle(name: &str, a: &Obj, b: &Obj) -> Result<bool, String> {
    let ultra = |x: &MetricSpace| UltrametricSpace::try_from(x.clone()).map_err(|e| e.to_string());
    match (name, a, b) {
        ("equal", a, b) => Ok(a == b),
        ("tree-iso", Obj::Tree(a), Obj::Tree(b)) => Ok(tree_isomorphic_exhaustive(a, b).is_some()),
        ("graph-iso", Obj::Graph(a), Obj::Graph(b)) => Ok(graph_isomorphic(a, b).is_some()),
        ("isometry", Obj::Space(a), Obj::Space(b)) => Ok(find_isometry(a, b, SearchMode::Pruned)
            .ok()
            .flatten()
            .is_some()),
        ("isometry-exhaustive", Obj::Space(a), Obj::Space(b)) => {
            Ok(find_isometry(a, b, SearchMode::Exhaustive)
                .ok()
                .flatten()
                .is_some())
        }
        ("anchored", Obj::Space(a), Obj::Space(b)) => {
            Ok(anchored_isometry_check(&ultra(a)?, &ultra(b)?))
        }
        ("struct-iso", Obj::Structure(a), Obj::Structure(b)) => {
            Ok(structure_isomorphic(a, b, SearchMode::Pruned)
                .map_err(|e| e.to_string())?
                .is_some())
        }
        _ => Err(format!("oracle {name} got mismatched objects")),
    }
}

/// Thresholds separating the distances of every space in the corpus.
fn joint_thresholds(items: &[Obj]) -> BTreeSet<Rational> {
    let spaces: Vec<&MetricSpace> = items
        .iter()
        .filter_map(|o| if let Obj::Space(x) = o { Some(x) } else { None })
        .collect();
    default_thresholds(&spaces)
}

fn apply(name: &str, q: &BTreeSet<Rational>, x: &Obj) -> Result<Obj, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    let ultra = |x: &MetricSpace| UltrametricSpace::try_from(x.clone()).map_err(|e| err(&e));
    Ok(match (name, x) {
        ("identity", x) => x.clone(),
        ("constant", _) => Obj::Unit,
        ("tree2space", Obj::Tree(t)) => Obj::Space(
            tree_to_space(t, &RadiusSequence::harmonic(t.depth().max(1)))
                .map_err(|e| err(&e))?
                .into_metric(),
        ),
        ("tree-canon", Obj::Tree(t)) => Obj::Code(tree_canonical(t)),
        ("graph2space", Obj::Graph(g)) => Obj::Space(graph_to_space(g)),
        ("disc2struct", Obj::Space(x)) => {
            Obj::Structure(discrete_to_structure(x, q).map_err(|e| err(&e))?)
        }
        ("ball-structure", Obj::Space(x)) => {
            let u = ultra(x)?;
            Obj::Structure(
                ball_structure_with_thresholds(&u, q)
                    .map_err(|e| err(&e))?
                    .to_structure(&u),
            )
        }
        ("gromov", Obj::Space(x)) => Obj::Gromov(gromov_full(x)),
        ("canon-ultra", Obj::Space(x)) => Obj::Code(canonical_code(&ultra(x)?)),
        _ => return Err(format!("map {name} got an object of the wrong kind")),
    })
}

pub fn run(corpus_spec: &str, map: &str, e: &str, f: &str, seed: u64) -> Result<Output, CliError> {
    let (kind, items) = corpus(corpus_spec, seed)?;
    let image = map_kinds(map, kind)?;
    check_oracle("E", e, kind)?;
    check_oracle("F", f, image)?;
    let q = joint_thresholds(&items);
    let report = verify_reduction(
        &items,
        |x| apply(map, &q, x),
        &Fallible(|a: &Obj, b: &Obj| oracle(e, a, b)),
        &Fallible(|a: &Obj, b: &Obj| oracle(f, a, b)),
    )?;
    let mut out = io::header("verify-reduction");
    writeln!(out, "corpus {corpus_spec} size {}", items.len()).unwrap();
    writeln!(out, "pairs {}", report.pairs_checked).unwrap();
    match report.verdict {
        Verdict::Pass => {
            writeln!(out, "pass").unwrap();
            Ok(Output {
                text: out,
                failed: false,
            })
        }
        Verdict::Counterexample { x, y, exy, ffxy } => {
            writeln!(out, "counterexample {x} {y} E={exy} F={ffxy}").unwrap();
            writeln!(out, "x {}", items[x].describe()).unwrap();
            writeln!(out, "y {}", items[y].describe()).unwrap();
            Ok(Output {
                text: out,
                failed: true,
            })
        }
    }
}
