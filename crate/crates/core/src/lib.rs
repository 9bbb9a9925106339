//! Local limits of random graphs from subcritical block-stable classes.
//!
//! * [`series`]: truncated power series, the functional equations of
//!   rooted classes, singularity location and coefficient asymptotics.
//! * [`classes`]: built-in and user-supplied block classes, cycle indices.
//! * [`limits`]: 2-ended links, the link measures, fringe densities and
//!   samples of the limiting chain.
//! * [`enumerate`]: exhaustive generators, uniform samplers, block
//!   decomposition and fringe counting, used as brute-force oracles.
//! * [`metric`]: the pseudometric on countable rooted graphs given by
//!   rooted connected induced subgraphs, and the core of a graph.
//!
//! Series are generic over [`Scalar`]; counting runs over exact rationals
//! ([`ExactSeries`]) and numerics over `f64` ([`FloatSeries`]).

pub mod canon;
pub mod classes;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod limits;
pub mod metric;
pub mod scalar;
pub mod series;

pub use classes::{BlockClass, ClassKind};
pub use error::{Error, Result};
pub use graph::RootedGraph;
pub use scalar::Scalar;
pub use series::{SingularityData, TruncatedSeries};

/// Library version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Series with exact rational coefficients.
pub type ExactSeries = TruncatedSeries<num_rational::BigRational>;

/// Series with `f64` coefficients.
pub type FloatSeries = TruncatedSeries<f64>;
