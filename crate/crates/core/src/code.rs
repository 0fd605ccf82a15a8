//! Order-independent fingerprints for ultrametric spaces and rooted trees.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rational::Rational;

/// A canonical code: a leaf, or a node with a sorted multiset of children.
///
/// Ultrametric dendrogram codes carry the diameter of each ball as `radius`;
/// tree codes leave it empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CanonicalCode {
    Leaf,
    Node {
        radius: Option<Rational>,
        children: Vec<CanonicalCode>,
    },
}

impl CanonicalCode {
    /// Builds a node, sorting `children` into canonical order.
    pub fn node(radius: Option<Rational>, mut children: Vec<CanonicalCode>) -> Self {
        children.sort();
        CanonicalCode::Node { radius, children }
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            CanonicalCode::Leaf => 1,
            CanonicalCode::Node { children, .. } => children.iter().map(CanonicalCode::size).sum(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            CanonicalCode::Leaf => 0,
            CanonicalCode::Node { children, .. } => {
                1 + children
                    .iter()
                    .map(CanonicalCode::height)
                    .max()
                    .unwrap_or(0)
            }
        }
    }
}

/// Leaf first; nodes by radius descending (no radius first), then children
/// lexicographically, then child count.
impl Ord for CanonicalCode {
    fn cmp(&self, other: &Self) -> Ordering {
        use CanonicalCode::*;
        match (self, other) {
            (Leaf, Leaf) => Ordering::Equal,
            (Leaf, Node { .. }) => Ordering::Less,
            (Node { .. }, Leaf) => Ordering::Greater,
            (
                Node {
                    radius: ra,
                    children: ca,
                },
                Node {
                    radius: rb,
                    children: cb,
                },
            ) => {
                let by_radius = match (ra, rb) {
                    (None, None) => Ordering::Equal,
                    (None, Some(_)) => Ordering::Less,
                    (Some(_), None) => Ordering::Greater,
                    (Some(a), Some(b)) => b.cmp(a),
                };
                by_radius
                    .then_with(|| {
                        ca.iter()
                            .zip(cb.iter())
                            .map(|(a, b)| a.cmp(b))
                            .find(|o| o.is_ne())
                            .unwrap_or(Ordering::Equal)
                    })
                    .then_with(|| ca.len().cmp(&cb.len()))
            }
        }
    }
}

impl PartialOrd for CanonicalCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `*` for a leaf, `(r c1 c2 ...)` for a node with radius, `(c1 c2 ...)` without.
impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalCode::Leaf => write!(f, "*"),
            CanonicalCode::Node { radius, children } => {
                write!(f, "(")?;
                let mut first = true;
                if let Some(r) = radius {
                    write!(f, "{r}")?;
                    first = false;
                }
                for c in children {
                    if !first {
                        write!(f, " ")?;
                    }
                    write!(f, "{c}")?;
                    first = false;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed canonical code at byte {pos}: {msg}")]
pub struct ParseCodeError {
    pub pos: usize,
    pub msg: &'static str,
}

struct CodeParser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl CodeParser<'_> {
    fn err(&self, msg: &'static str) -> ParseCodeError {
        ParseCodeError { pos: self.pos, msg }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn code(&mut self) -> Result<CanonicalCode, ParseCodeError> {
        self.skip_ws();
        match self.s.get(self.pos) {
            Some(b'*') => {
                self.pos += 1;
                Ok(CanonicalCode::Leaf)
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let mut radius = None;
                if matches!(self.s.get(self.pos), Some(c) if c.is_ascii_digit() || *c == b'-') {
                    let start = self.pos;
                    while matches!(self.s.get(self.pos), Some(c) if c.is_ascii_digit() || *c == b'-' || *c == b'/')
                    {
                        self.pos += 1;
                    }
                    let text = std::str::from_utf8(&self.s[start..self.pos])
                        .map_err(|_| self.err("bad radius"))?;
                    radius = Some(
                        text.parse::<Rational>()
                            .map_err(|_| self.err("bad radius"))?,
                    );
                }
                let mut children = Vec::new();
                loop {
                    self.skip_ws();
                    match self.s.get(self.pos) {
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => children.push(self.code()?),
                        None => return Err(self.err("unterminated node")),
                    }
                }
                if children.is_empty() {
                    return Err(self.err("node without children"));
                }
                Ok(CanonicalCode::node(radius, children))
            }
            _ => Err(self.err("expected '*' or '('")),
        }
    }
}

impl FromStr for CanonicalCode {
    type Err = ParseCodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = CodeParser {
            s: s.as_bytes(),
            pos: 0,
        };
        let code = p.code()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("trailing input"));
        }
        Ok(code)
    }
}
