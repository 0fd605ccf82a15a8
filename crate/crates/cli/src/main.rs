mod reduce;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use metriso::io::{self, ParseError};
use metriso::reductions::{
    adjust_group_metric, default_thresholds, discrete_to_structure, graph_to_space, gromov_full,
    gromov_invariant, orbit_encode, repair_isometry_to_tree_iso, sum_space, tree_to_space,
    GroupAction, RadiusSequence,
};
use metriso::trees::tree_rank;
use metriso::ultrametric::{
    ball_structure_with_thresholds, default_ball_thresholds, sphere_decompose, transfer,
    universal_discrete,
};
use metriso::{
    canonical_code, find_isometry, structure_isomorphic, tree_canonical, validate_metric,
    validate_tree, Bijection, Graph, MetricSpace, Rational, RelationalStructure, SearchMode, Tree,
    UltrametricSpace,
};

/// Exact computations on finite metric spaces, ultrametrics, trees and
/// relational structures.
#[derive(Parser)]
#[command(name = "metriso", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a metric space file
    CheckMetric { file: PathBuf },
    /// Decide isometry, printing a certificate when one exists
    Isometry {
        x: PathBuf,
        y: PathBuf,
        /// Try every bijection instead of the pruned search
        #[arg(long)]
        exhaustive: bool,
    },
    /// Canonical code of an ultrametric space
    CanonUltra { file: PathBuf },
    /// Ball structure of an ultrametric space
    BallStructure {
        file: PathBuf,
        /// Diameter thresholds, e.g. 1,3/2,2 (default: R(X) and max+1)
        #[arg(long)]
        thresholds: Option<String>,
    },
    /// Spheres around a point of an ultrametric space
    Sphere {
        file: PathBuf,
        #[arg(long)]
        center: usize,
    },
    /// Push an ultrametric space through a monotone map of distances
    Transfer {
        file: PathBuf,
        /// File of `r s` lines
        #[arg(long)]
        map: PathBuf,
    },
    /// The space D x {0..k-1} with d = max of the distance coordinates
    Universal {
        #[arg(long = "d")]
        distances: String,
        #[arg(long)]
        k: usize,
    },
    /// Canonical code of a tree
    TreeCanon { file: PathBuf },
    /// Rank of a tree
    TreeRank { file: PathBuf },
    /// Ultrametric space on the nodes of a tree
    #[command(name = "tree2space")]
    TreeToSpace {
        file: PathBuf,
        #[arg(long)]
        radii: Option<String>,
    },
    /// Turn an isometry between tree spaces into a tree isomorphism
    RepairIso {
        t: PathBuf,
        s: PathBuf,
        /// File of `i j` lines
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        radii: Option<String>,
    },
    /// Metric space of a graph: 1 on edges, 2 elsewhere
    #[command(name = "graph2space")]
    GraphToSpace { file: PathBuf },
    /// Threshold structure of a metric space
    #[command(name = "disc2struct")]
    DiscToStruct {
        file: PathBuf,
        #[arg(long)]
        thresholds: Option<String>,
    },
    /// Decide isomorphism of relational structures
    StructIso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        exhaustive: bool,
    },
    /// Sum of ultrametric spaces with cross distance r
    Sum {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        r: String,
    },
    /// Sets of distance matrices of point tuples
    Gromov {
        file: PathBuf,
        /// Only tuples of length n+1
        #[arg(long)]
        n: Option<usize>,
    },
    /// Rescale an action's metrics and adjust the group metric
    AdjustAction { file: PathBuf },
    /// Metric space encoding the orbit of a point
    OrbitEncode {
        file: PathBuf,
        #[arg(long)]
        z: usize,
    },
    /// Check x E y <=> f(x) F f(y) over a built-in corpus
    VerifyReduction {
        /// trees:N[:B:D], graphs:N, ultra:COUNT[:SIZE], metric:COUNT[:SIZE]
        #[arg(long)]
        corpus: String,
        #[arg(long)]
        map: String,
        #[arg(long = "E")]
        e: String,
        #[arg(long = "F")]
        f: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse { file: PathBuf, err: ParseError },
    Io { file: PathBuf, err: std::io::Error },
    Domain { name: &'static str, msg: String },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain { .. } => 1,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "UsageError: {msg}"),
            CliError::Parse { file, err } => write!(f, "ParseError: {}: {err}", file.display()),
            CliError::Io { file, err } => write!(f, "IoError: {}: {err}", file.display()),
            CliError::Domain { name, msg } => write!(f, "{name}: {msg}"),
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain { name: e.name(), msg: e.to_string() }
            }
        }
    )*};
}

domain_from!(
    metriso::MetricError,
    metriso::UltraError,
    metriso::TreeError,
    metriso::StructureError,
    metriso::ReductionError,
    metriso::verify::VerifyError
);

impl From<metriso::GraphError> for CliError {
    fn from(e: metriso::GraphError) -> Self {
        let name = match e {
            metriso::GraphError::NoVertices => "NoVertices",
            metriso::GraphError::SelfLoop(_) => "SelfLoop",
            metriso::GraphError::VertexOutOfRange(..) => "VertexOutOfRange",
        };
        CliError::Domain {
            name,
            msg: e.to_string(),
        }
    }
}

/// Text for standard output and whether the run found a counterexample.
pub struct Output {
    text: String,
    failed: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output {
            text,
            failed: false,
        }
    }
}

fn read(file: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(file).map_err(|err| CliError::Io {
        file: file.to_path_buf(),
        err,
    })
}

fn parsed<T>(file: &Path, f: impl FnOnce(&str) -> Result<T, ParseError>) -> Result<T, CliError> {
    f(&read(file)?).map_err(|err| CliError::Parse {
        file: file.to_path_buf(),
        err,
    })
}

fn load_space(file: &Path) -> Result<MetricSpace, CliError> {
    let (labels, matrix) = parsed(file, io::parse_space)?;
    Ok(validate_metric(labels, matrix)?)
}

fn load_ultra(file: &Path) -> Result<UltrametricSpace, CliError> {
    Ok(UltrametricSpace::try_from(load_space(file)?)?)
}

fn load_tree(file: &Path) -> Result<Tree, CliError> {
    Ok(validate_tree(parsed(file, io::parse_tree)?)?)
}

fn load_graph(file: &Path) -> Result<Graph, CliError> {
    let (n, edges) = parsed(file, io::parse_graph)?;
    Ok(Graph::new(n, edges)?)
}

fn load_structure(file: &Path) -> Result<RelationalStructure, CliError> {
    let (size, raw) = parsed(file, io::parse_structure)?;
    Ok(io::structure_from_raw(size, raw)?)
}

fn load_bijection(file: &Path) -> Result<Bijection, CliError> {
    let pairs = parsed(file, io::parse_bijection)?;
    io::bijection_from_pairs(&pairs).ok_or_else(|| CliError::Domain {
        name: "NotABijection",
        msg: format!("{} does not list a bijection", file.display()),
    })
}

fn rational_list(flag: &str, text: &str) -> Result<Vec<Rational>, CliError> {
    io::parse_rational_list(text).map_err(|e| CliError::Usage(format!("--{flag}: {}", e.msg)))
}

fn rational_flag(flag: &str, text: &str) -> Result<Rational, CliError> {
    text.trim()
        .parse()
        .map_err(|e| CliError::Usage(format!("--{flag}: bad rational {text:?}: {e}")))
}

fn radii_for(flag: &Option<String>, depth: usize) -> Result<RadiusSequence, CliError> {
    match flag {
        Some(text) => Ok(RadiusSequence::new(rational_list("radii", text)?)?),
        None => Ok(RadiusSequence::harmonic(depth.max(1))),
    }
}

fn certificate(kind: &str, verdict: Option<Bijection>, yes: &str, no: &str) -> String {
    let mut out = io::header(kind);
    match verdict {
        Some(f) => {
            writeln!(out, "{yes}").unwrap();
            for (i, j) in f.pairs() {
                writeln!(out, "{i} {j}").unwrap();
            }
        }
        None => writeln!(out, "{no}").unwrap(),
    }
    out
}

fn mode(exhaustive: bool) -> SearchMode {
    if exhaustive {
        SearchMode::Exhaustive
    } else {
        SearchMode::Pruned
    }
}

fn run(command: Command) -> Result<Output, CliError> {
    let text = match command {
        Command::CheckMetric { file } => {
            let x = load_space(&file)?;
            let mut out = io::header("check-metric");
            writeln!(out, "valid").unwrap();
            writeln!(out, "points {}", x.len()).unwrap();
            writeln!(out, "ultrametric {}", x.is_ultrametric()).unwrap();
            out
        }
        Command::Isometry { x, y, exhaustive } => {
            let (x, y) = (load_space(&x)?, load_space(&y)?);
            let found = find_isometry(&x, &y, mode(exhaustive)).ok().flatten();
            certificate("isometry", found, "isometric", "not-isometric")
        }
        Command::CanonUltra { file } => {
            let x = load_ultra(&file)?;
            format!("{}{}\n", io::header("code"), canonical_code(&x))
        }
        Command::BallStructure { file, thresholds } => {
            let x = load_ultra(&file)?;
            let q: BTreeSet<Rational> = match thresholds {
                Some(t) => rational_list("thresholds", &t)?.into_iter().collect(),
                None => default_ball_thresholds(&x),
            };
            io::emit_structure(&ball_structure_with_thresholds(&x, &q)?.to_structure(&x))
        }
        Command::Sphere { file, center } => {
            let x = load_ultra(&file)?;
            let mut out = io::header("spheres");
            for (r, points) in sphere_decompose(&x, center)? {
                let cells: Vec<String> = points.iter().map(|p| p.to_string()).collect();
                writeln!(out, "{r} {}", cells.join(" ")).unwrap();
            }
            out
        }
        Command::Transfer { file, map } => {
            let x = load_ultra(&file)?;
            let rho = parsed(&map, io::parse_rational_map)?;
            io::emit_space(&transfer(&x, &rho)?.into_metric())
        }
        Command::Universal { distances, k } => {
            let d: BTreeSet<Rational> = rational_list("d", &distances)?.into_iter().collect();
            io::emit_space(&universal_discrete(&d, k)?.into_metric())
        }
        Command::TreeCanon { file } => format!(
            "{}{}\n",
            io::header("code"),
            tree_canonical(&load_tree(&file)?)
        ),
        Command::TreeRank { file } => {
            format!("{}{}\n", io::header("rank"), tree_rank(&load_tree(&file)?))
        }
        Command::TreeToSpace { file, radii } => {
            let t = load_tree(&file)?;
            let r = radii_for(&radii, t.depth())?;
            io::emit_space(&tree_to_space(&t, &r)?.into_metric())
        }
        Command::RepairIso { t, s, map, radii } => {
            let (t, s) = (load_tree(&t)?, load_tree(&s)?);
            let phi = load_bijection(&map)?;
            let r = radii_for(&radii, t.depth().max(s.depth()))?;
            if phi.len() != t.len() || t.len() != s.len() {
                return Err(metriso::ReductionError::NotAnIsometry.into());
            }
            io::emit_bijection(&repair_isometry_to_tree_iso(&t, &s, &r, &phi)?)
        }
        Command::GraphToSpace { file } => io::emit_space(&graph_to_space(&load_graph(&file)?)),
        Command::DiscToStruct { file, thresholds } => {
            let x = load_space(&file)?;
            let q: BTreeSet<Rational> = match thresholds {
                Some(t) => rational_list("thresholds", &t)?.into_iter().collect(),
                None => default_thresholds(&[&x]),
            };
            io::emit_structure(&discrete_to_structure(&x, &q)?)
        }
        Command::StructIso { a, b, exhaustive } => {
            let (a, b) = (load_structure(&a)?, load_structure(&b)?);
            let found = structure_isomorphic(&a, &b, mode(exhaustive))?;
            certificate("struct-iso", found, "isomorphic", "not-isomorphic")
        }
        Command::Sum { files, r } => {
            let r = rational_flag("r", &r)?;
            let parts = files
                .iter()
                .map(|f| load_ultra(f))
                .collect::<Result<Vec<_>, _>>()?;
            io::emit_space(&sum_space(&parts, r)?.into_metric())
        }
        Command::Gromov { file, n } => {
            let x = load_space(&file)?;
            let levels = match n {
                Some(n) => vec![(n, gromov_invariant(&x, n))],
                None => gromov_full(&x).into_iter().enumerate().collect(),
            };
            let mut out = io::header("gromov");
            for (n, set) in levels {
                writeln!(out, "n {n} {}", set.len()).unwrap();
                for m in set {
                    let cells: Vec<String> = m.entries.iter().map(|c| c.to_string()).collect();
                    writeln!(out, "{}", cells.join(" ")).unwrap();
                }
            }
            out
        }
        Command::AdjustAction { file } => {
            let cand = parsed(&file, io::parse_action)?;
            io::emit_action(&adjust_group_metric(cand)?.to_candidate())
        }
        Command::OrbitEncode { file, z } => {
            let action = GroupAction::new(parsed(&file, io::parse_action)?)?;
            io::emit_space(&orbit_encode(&action, z)?)
        }
        Command::VerifyReduction {
            corpus,
            map,
            e,
            f,
            seed,
        } => return reduce::run(&corpus, &map, &e, &f, seed),
    };
    Ok(text.into())
}

fn configure_workers() -> Result<(), CliError> {
    let Ok(value) = std::env::var("METRISO_WORKERS") else {
        return Ok(());
    };
    let n: usize = value.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "METRISO_WORKERS must be a positive integer, got {value:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_workers().and_then(|()| run(cli.command)) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.failed as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
