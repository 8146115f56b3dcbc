//! Cohomogeneity-one isometric actions on adS₃ = SL(2,R): orbit geometry,
//! properness and orbit spaces for the sixteen catalogued groups.

pub mod catalog;
pub mod census;
pub mod classifier;
pub mod engine;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod orbit_space;
pub mod par;
pub mod properness;
pub mod reconcile;
pub mod sl2;
pub mod suite;
pub mod transporter;

pub use catalog::{element, spec, GroupLabel, GroupSpec, IsometryPair};
pub use engine::CausalCharacter;
pub use error::Error;
pub use sl2::{Mat2, PointAdS, TracelessMat, DEFAULT_TOL};
