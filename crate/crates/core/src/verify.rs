//! Checking `x E y ⟺ f(x) F f(y)` over a finite corpus, and the jump
//! equivalences on finite tuples.

use rayon::prelude::*;
use thiserror::Error;

/// A decision procedure for an equivalence relation on `T`. An `Err` means
/// the procedure could not decide the pair.
pub trait EquivalenceOracle<T: ?Sized>: Sync {
    fn equivalent(&self, a: &T, b: &T) -> Result<bool, String>;
}

/// Wraps an infallible predicate as an oracle.
pub struct Total<F>(pub F);

impl<T: ?Sized, F: Fn(&T, &T) -> bool + Sync> EquivalenceOracle<T> for Total<F> {
    fn equivalent(&self, a: &T, b: &T) -> Result<bool, String> {
        Ok((self.0)(a, b))
    }
}

/// Wraps a fallible predicate as an oracle.
pub struct Fallible<F>(pub F);

impl<T: ?Sized, F: Fn(&T, &T) -> Result<bool, String> + Sync> EquivalenceOracle<T> for Fallible<F> {
    fn equivalent(&self, a: &T, b: &T) -> Result<bool, String> {
        (self.0)(a, b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("OracleFailure: {oracle} on ({x},{y}): {message}")]
    OracleFailure {
        oracle: &'static str,
        x: usize,
        y: usize,
        message: String,
    },
    #[error("MapFailure: element {index}: {message}")]
    MapFailure { index: usize, message: String },
}

impl VerifyError {
    pub fn name(&self) -> &'static str {
        match self {
            VerifyError::OracleFailure { .. } => "OracleFailure",
            VerifyError::MapFailure { .. } => "MapFailure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// Corpus indices `x ≤ y` with `exy = (x E y)` and `ffxy = (f(x) F f(y))`.
    Counterexample {
        x: usize,
        y: usize,
        exy: bool,
        ffxy: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionReport {
    /// Pairs examined in corpus order, up to and including a counterexample.
    pub pairs_checked: usize,
    pub verdict: Verdict,
}

impl ReductionReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Re-runs both oracles on the reported pair; true iff they still disagree
    /// the same way. A passing report rechecks trivially.
    pub fn recheck<T, U, M, E, F>(
        &self,
        corpus: &[T],
        f: M,
        e: &E,
        ff: &F,
    ) -> Result<bool, VerifyError>
    where
        M: Fn(&T) -> Result<U, String>,
        E: EquivalenceOracle<T>,
        F: EquivalenceOracle<U>,
    {
        let Verdict::Counterexample { x, y, exy, ffxy } = self.verdict else {
            return Ok(true);
        };
        let image = |i: usize| {
            f(&corpus[i]).map_err(|message| VerifyError::MapFailure { index: i, message })
        };
        let (fx, fy) = (image(x)?, image(y)?);
        let e_now =
            e.equivalent(&corpus[x], &corpus[y])
                .map_err(|message| VerifyError::OracleFailure {
                    oracle: "E",
                    x,
                    y,
                    message,
                })?;
        let f_now = ff
            .equivalent(&fx, &fy)
            .map_err(|message| VerifyError::OracleFailure {
                oracle: "F",
                x,
                y,
                message,
            })?;
        Ok(e_now == exy && f_now == ffxy && exy != ffxy)
    }
}

fn pairs_before(n: usize, i: usize) -> usize {
    i * n - i * i.saturating_sub(1) / 2
}

/// Checks the biconditional on every pair `i ≤ j` of the corpus.
///
/// Rows are checked concurrently; the reported counterexample is always the
/// first one in `(i, j)` lexicographic order.
pub fn verify_reduction<T, U, M, E, F>(
    corpus: &[T],
    f: M,
    e: &E,
    ff: &F,
) -> Result<ReductionReport, VerifyError>
where
    T: Sync,
    U: Send + Sync,
    M: Fn(&T) -> Result<U, String> + Sync,
    E: EquivalenceOracle<T>,
    F: EquivalenceOracle<U>,
{
    let images: Vec<U> = corpus
        .par_iter()
        .enumerate()
        .map(|(index, x)| f(x).map_err(|message| VerifyError::MapFailure { index, message }))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let n = corpus.len();
    let first = (0..n).into_par_iter().find_map_first(|i| {
        for j in i..n {
            let exy = match e.equivalent(&corpus[i], &corpus[j]) {
                Ok(b) => b,
                Err(message) => {
                    return Some(Err(VerifyError::OracleFailure {
                        oracle: "E",
                        x: i,
                        y: j,
                        message,
                    }))
                }
            };
            let ffxy = match ff.equivalent(&images[i], &images[j]) {
                Ok(b) => b,
                Err(message) => {
                    return Some(Err(VerifyError::OracleFailure {
                        oracle: "F",
                        x: i,
                        y: j,
                        message,
                    }))
                }
            };
            if exy != ffxy {
                return Some(Ok((i, j, exy, ffxy)));
            }
        }
        None
    });
    match first {
        None => Ok(ReductionReport {
            pairs_checked: n * (n + 1) / 2,
            verdict: Verdict::Pass,
        }),
        Some(Err(err)) => Err(err),
        Some(Ok((x, y, exy, ffxy))) => Ok(ReductionReport {
            pairs_checked: pairs_before(n, x) + (y - x) + 1,
            verdict: Verdict::Counterexample { x, y, exy, ffxy },
        }),
    }
}

/// Same set of `E`-classes: every entry of each tuple matches some entry of the other.
pub fn eplus_equal<T>(xs: &[T], ys: &[T], e: impl Fn(&T, &T) -> bool) -> bool {
    xs.iter().all(|x| ys.iter().any(|y| e(x, y))) && ys.iter().all(|y| xs.iter().any(|x| e(x, y)))
}

/// Some bijection `f` between the index sets with `x_n E y_{f(n)}`.
pub fn eomega_equal<T>(xs: &[T], ys: &[T], e: impl Fn(&T, &T) -> bool) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = xs
        .iter()
        .map(|x| (0..ys.len()).filter(|&k| e(x, &ys[k])).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; ys.len()];
    (0..xs.len()).all(|i| {
        let mut seen = vec![false; ys.len()];
        augment(i, &adj, &mut owner, &mut seen)
    })
}

fn augment(i: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &k in &adj[i] {
        if !seen[k] {
            seen[k] = true;
            if owner[k].is_none_or(|j| augment(j, adj, owner, seen)) {
                owner[k] = Some(i);
                return true;
            }
        }
    }
    false
}

/// Keeps the first entry of each `E`-class, in order.
pub fn dedup_by_oracle<T: Clone>(xs: &[T], e: impl Fn(&T, &T) -> bool) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for x in xs {
        if !out.iter().any(|y| e(y, x)) {
            out.push(x.clone());
        }
    }
    out
}
