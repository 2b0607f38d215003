//! Evaluation of the inequalities and identities on concrete instances.

pub mod builtin;
pub mod checks;
pub mod fuzz;
pub mod identities;
pub mod limit;
pub mod scenario;

pub use checks::{
    check_borell, check_face_bound, check_minkowski_first, check_theorem_ball, check_theorem_lw, check_zonotope_bound,
};
pub use fuzz::{fuzz, FuzzConfig, FuzzReport};
pub use limit::lebesgue_limit_study;
pub use scenario::{CheckKind, Scenario};
