//! Exponential last passage percolation on a finite box: the geodesic tree
//! toward a far root, its planar dual, the Peano curve threading between
//! them, and estimators for their scaling exponents.
//!
//! Typical pipeline for one replicate:
//!
//! ```
//! use mtl_core::{field::{Seed, WeightField}, lpp, forest, peano};
//!
//! let field = WeightField::on_demand(64, Seed::new(1, 0)).unwrap();
//! let grid = lpp::value_grid_default(&field);
//! let tree = forest::successor_map(&field, &grid).unwrap();
//! let curve = peano::peano_order(&tree);
//! assert_eq!(curve.len(), 64 * 64);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod experiment;
pub mod field;
pub mod forest;
pub mod lattice;
pub mod lpp;
pub mod peano;
pub mod render;
pub mod report;
pub mod rescale;
pub mod stats;

pub use error::{Error, Result};
pub use lattice::{LatticeBox, Step, Vertex};
