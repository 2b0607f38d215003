//! Measures with concave, homogeneous densities on convex polytopes.
//!
//! The crate computes `mu(K) = int_K g` for densities `g` that are
//! `p`-concave and `1/p`-homogeneous, the mixed measures `mu_1(A, B)`, the
//! projection functional `P_{mu,K}(theta)`, and evaluates both sides of
//! Loomis-Whitney and Ball type inequalities for such measures.

pub mod bodies;
pub mod densities;
pub mod error;
pub mod frames;
pub mod harness;
pub mod linalg;
pub mod measure;
pub mod mixed;
pub mod report;

pub use bodies::{BodySpec, ConvexBody, Face};
pub use densities::{Density, DensitySpec};
pub use error::{Error, Result};
pub use measure::{HomogeneityExponent, MeasureResult, Method};
pub use report::{CheckReport, Relation};
