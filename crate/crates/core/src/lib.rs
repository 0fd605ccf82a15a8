//! Finite metric and ultrametric spaces with exact rational distances,
//! finite trees and relational structures, and the maps between them that
//! turn isomorphism of one kind of object into isometry of another.
//!
//! ```
//! use metriso::{find_isometry, rat, MetricSpace, SearchMode};
//!
//! let x = MetricSpace::from_matrix(vec![
//!     vec![rat(0, 1), rat(1, 2)],
//!     vec![rat(1, 2), rat(0, 1)],
//! ])
//! .unwrap();
//! let f = find_isometry(&x, &x, SearchMode::Pruned).unwrap().unwrap();
//! assert_eq!(f.as_slice(), &[0, 1]);
//! ```

pub mod code;
pub mod corpus;
pub mod graph;
pub mod io;
pub mod metric;
pub mod perm;
pub mod rational;
pub mod reductions;
pub mod structures;
pub mod trees;
pub mod ultrametric;
pub mod verify;

pub use code::CanonicalCode;
pub use graph::{graph_isomorphic, Graph, GraphError};
pub use metric::{
    all_isometries, find_isometry, is_isometry, isometric, isometric_exhaustive, validate_metric,
    Bijection, MetricError, MetricSpace, SearchMode,
};
pub use rational::{rat, Rational};
pub use reductions::ReductionError;
pub use structures::{structure_isomorphic, RelationalStructure, StructureError};
pub use trees::{tree_canonical, validate_tree, Tree, TreeError};
pub use ultrametric::{anchored_isometry_check, canonical_code, UltraError, UltrametricSpace};
