//! Line-oriented text formats. Every emitter writes a `# metriso/1 <kind>`
//! header; parsers skip lines starting with `#`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::metric::{Bijection, MetricSpace};
use crate::rational::Rational;
use crate::reductions::ActionCandidate;
use crate::structures::{RelationalStructure, StructureError};
use crate::trees::{Sequence, Tree};

pub const FORMAT_VERSION: &str = "metriso/1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    /// 1-based; 0 means end of input.
    pub line: usize,
    pub msg: String,
}

pub fn header(kind: &str) -> String {
    format!("# {FORMAT_VERSION} {kind}\n")
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    fn err(&self, line: usize, msg: impl Into<String>) -> ParseError {
        ParseError {
            line,
            msg: msg.into(),
        }
    }

    /// Next non-comment line, blank lines included.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            if !l.trim_start().starts_with('#') {
                return Some((i + 1, l.trim()));
            }
        }
        None
    }

    /// Next non-comment, non-blank line.
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        while let Some((n, l)) = self.next_line() {
            if !l.is_empty() {
                return Some((n, l));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.next_content()
            .ok_or_else(|| self.err(0, format!("unexpected end of input, expected {what}")))
    }

    fn expect_count(&mut self, what: &str) -> Result<usize, ParseError> {
        let (n, l) = self.expect(what)?;
        l.parse()
            .map_err(|_| self.err(n, format!("expected {what}, found {l:?}")))
    }

    fn expect_row<T: FromStr>(&mut self, len: usize, what: &str) -> Result<Vec<T>, ParseError>
    where
        T::Err: std::fmt::Display,
    {
        let (n, l) = self.expect(what)?;
        self.row_of(n, l, len, what)
    }

    fn row_of<T: FromStr>(
        &self,
        n: usize,
        l: &str,
        len: usize,
        what: &str,
    ) -> Result<Vec<T>, ParseError>
    where
        T::Err: std::fmt::Display,
    {
        let row = l
            .split_whitespace()
            .map(|tok| {
                tok.parse::<T>()
                    .map_err(|e| self.err(n, format!("bad {what} entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<T>, _>>()?;
        if row.len() != len {
            return Err(self.err(n, format!("expected {len} entries, found {}", row.len())));
        }
        Ok(row)
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.next_content() {
            None => Ok(()),
            Some((n, l)) => Err(self.err(n, format!("trailing content {l:?}"))),
        }
    }

    fn matrix(&mut self, n: usize, what: &str) -> Result<Vec<Vec<Rational>>, ParseError> {
        (0..n).map(|_| self.expect_row(n, what)).collect()
    }
}

fn write_row<T: std::fmt::Display>(out: &mut String, row: impl IntoIterator<Item = T>) {
    let cells: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
    out.push_str(&cells.join(" "));
    out.push('\n');
}

/// Point count, then one label per line, then the distance rows.
pub fn parse_space(text: &str) -> Result<(Vec<String>, Vec<Vec<Rational>>), ParseError> {
    let mut lines = Lines::new(text);
    let n = lines.expect_count("point count")?;
    let labels = (0..n)
        .map(|_| lines.expect("label").map(|(_, l)| l.to_string()))
        .collect::<Result<_, _>>()?;
    let matrix = lines.matrix(n, "distance")?;
    lines.expect_end()?;
    Ok((labels, matrix))
}

pub fn emit_space(x: &MetricSpace) -> String {
    let mut out = header("space");
    writeln!(out, "{}", x.len()).unwrap();
    for l in x.labels() {
        writeln!(out, "{l}").unwrap();
    }
    for i in 0..x.len() {
        write_row(&mut out, x.row(i));
    }
    out
}

/// One node per line as comma-separated entries; a blank line is the root.
pub fn parse_tree(text: &str) -> Result<Vec<Sequence>, ParseError> {
    let mut lines = Lines::new(text);
    let mut nodes = Vec::new();
    while let Some((n, l)) = lines.next_line() {
        if l.is_empty() {
            nodes.push(Vec::new());
            continue;
        }
        let seq = l
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<u32>()
                    .map_err(|_| lines.err(n, format!("bad node entry {tok:?}")))
            })
            .collect::<Result<Sequence, _>>()?;
        nodes.push(seq);
    }
    Ok(nodes)
}

pub fn emit_tree(t: &Tree) -> String {
    let mut out = header("tree");
    for u in t.nodes() {
        let cells: Vec<String> = u.iter().map(|a| a.to_string()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}

/// A relation as read from a structure file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRelation {
    pub name: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

/// Universe size, then per relation a `name arity count` line followed by
/// `count` tuple lines. Tuples of a nullary relation are blank lines.
pub fn parse_structure(text: &str) -> Result<(usize, Vec<RawRelation>), ParseError> {
    let mut lines = Lines::new(text);
    let size = lines.expect_count("universe size")?;
    let mut relations = Vec::new();
    while let Some((n, l)) = lines.next_content() {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let [name, arity, count] = parts[..] else {
            return Err(lines.err(n, format!("expected `name arity count`, found {l:?}")));
        };
        let arity: usize = arity
            .parse()
            .map_err(|_| lines.err(n, format!("bad arity {arity:?}")))?;
        let count: usize = count
            .parse()
            .map_err(|_| lines.err(n, format!("bad tuple count {count:?}")))?;
        let mut tuples = Vec::with_capacity(count);
        for _ in 0..count {
            let next = if arity == 0 {
                lines.next_line()
            } else {
                lines.next_content()
            };
            let (m, t) = next.ok_or_else(|| {
                lines.err(0, format!("unexpected end of input in relation {name}"))
            })?;
            tuples.push(lines.row_of(m, t, arity, "tuple")?);
        }
        relations.push(RawRelation {
            name: name.to_string(),
            arity,
            tuples,
        });
    }
    Ok((size, relations))
}

pub fn structure_from_raw(
    size: usize,
    raw: Vec<RawRelation>,
) -> Result<RelationalStructure, StructureError> {
    raw.into_iter()
        .try_fold(RelationalStructure::new(size), |s, r| {
            s.with_relation(r.name, r.arity, r.tuples)
        })
}

pub fn emit_structure(s: &RelationalStructure) -> String {
    let mut out = header("structure");
    writeln!(out, "{}", s.size()).unwrap();
    for (name, rel) in s.relations() {
        writeln!(out, "{name} {} {}", rel.arity, rel.tuples.len()).unwrap();
        for t in &rel.tuples {
            write_row(&mut out, t);
        }
    }
    out
}

/// Vertex count, then one `i j` line per edge.
pub fn parse_graph(text: &str) -> Result<(usize, Vec<(usize, usize)>), ParseError> {
    let mut lines = Lines::new(text);
    let n = lines.expect_count("vertex count")?;
    let mut edges = Vec::new();
    while let Some((m, l)) = lines.next_content() {
        let e: Vec<usize> = lines.row_of(m, l, 2, "edge")?;
        edges.push((e[0], e[1]));
    }
    Ok((n, edges))
}

pub fn emit_graph(g: &crate::graph::Graph) -> String {
    let mut out = header("graph");
    writeln!(out, "{}", g.vertex_count()).unwrap();
    for (a, b) in g.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

/// Group order, `d_G` rows, `|Y|`, `d_Y` rows, then one table row per group
/// element listing `g.y` for each `y`.
pub fn parse_action(text: &str) -> Result<ActionCandidate, ParseError> {
    let mut lines = Lines::new(text);
    let m = lines.expect_count("group order")?;
    let group_metric = lines.matrix(m, "group distance")?;
    let k = lines.expect_count("space size")?;
    let space_metric = lines.matrix(k, "space distance")?;
    let table = (0..m)
        .map(|_| lines.expect_row(k, "action table"))
        .collect::<Result<_, _>>()?;
    lines.expect_end()?;
    Ok(ActionCandidate {
        group_metric,
        space_metric,
        table,
    })
}

pub fn emit_action(a: &ActionCandidate) -> String {
    let mut out = header("action");
    writeln!(out, "{}", a.group_metric.len()).unwrap();
    for row in &a.group_metric {
        write_row(&mut out, row);
    }
    writeln!(out, "{}", a.space_metric.len()).unwrap();
    for row in &a.space_metric {
        write_row(&mut out, row);
    }
    for row in &a.table {
        write_row(&mut out, row);
    }
    out
}

/// One `i j` line per point, meaning `i ↦ j`.
pub fn parse_bijection(text: &str) -> Result<Vec<(usize, usize)>, ParseError> {
    let mut lines = Lines::new(text);
    let mut pairs = Vec::new();
    while let Some((m, l)) = lines.next_content() {
        let p: Vec<usize> = lines.row_of(m, l, 2, "map")?;
        pairs.push((p[0], p[1]));
    }
    Ok(pairs)
}

/// Builds a bijection of `0..n` from `i j` pairs; `None` if the pairs do not
/// list every point exactly once or do not form a bijection.
pub fn bijection_from_pairs(pairs: &[(usize, usize)]) -> Option<Bijection> {
    let n = pairs.len();
    let mut forward = vec![usize::MAX; n];
    for &(i, j) in pairs {
        if i >= n || forward[i] != usize::MAX {
            return None;
        }
        forward[i] = j;
    }
    Bijection::new(forward).ok()
}

pub fn emit_bijection(f: &Bijection) -> String {
    let mut out = header("bijection");
    for (i, j) in f.pairs() {
        writeln!(out, "{i} {j}").unwrap();
    }
    out
}

/// One `r s` line per distance, meaning `r ↦ s`.
pub fn parse_rational_map(text: &str) -> Result<BTreeMap<Rational, Rational>, ParseError> {
    let mut lines = Lines::new(text);
    let mut map = BTreeMap::new();
    while let Some((m, l)) = lines.next_content() {
        let p: Vec<Rational> = lines.row_of(m, l, 2, "map")?;
        if map.insert(p[0], p[1]).is_some() {
            return Err(lines.err(m, format!("{} mapped twice", p[0])));
        }
    }
    Ok(map)
}

pub fn emit_rational_map(rho: &BTreeMap<Rational, Rational>) -> String {
    let mut out = header("map");
    for (r, s) in rho {
        writeln!(out, "{r} {s}").unwrap();
    }
    out
}

/// Comma-separated rationals, as used by `--radii` and `--thresholds`.
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>, ParseError> {
    text.split(',')
        .map(|tok| {
            tok.trim().parse::<Rational>().map_err(|e| ParseError {
                line: 1,
                msg: format!("bad rational {tok:?}: {e}"),
            })
        })
        .collect()
}
