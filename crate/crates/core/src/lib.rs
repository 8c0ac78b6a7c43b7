//! Length spaces on finite discretizations.
//!
//! A finite wide-sense metric space `(X, d)` is tested for being a length
//! space by chaining it at a scale `h` ([`length`]), and dually by asking
//! whether every cover-locally 1-Lipschitz function is globally 1-Lipschitz
//! ([`sheaf`]). Planar domains with obstacles ([`domain`]) supply the
//! Euclidean examples: the chord metric of a sampled domain against its
//! intrinsic length metric.

pub mod demo;
pub mod domain;
pub mod error;
pub mod ext;
pub mod gen;
pub mod graph;
pub mod io;
pub mod length;
pub mod sheaf;
pub mod space;
pub mod svg;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use graph::{GraphMetric, WeightedGraph};
pub use length::{Tolerance, Verdict};
pub use space::{FiniteMetricSpace, Metric, Path};
