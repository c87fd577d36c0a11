//! Bounds on the relative entropy of entanglement of bipartite states.
//!
//! * [`cha`]: upper bound from an actively refined convex hull of product
//!   states.
//! * [`ppt`]: relative entropy to the PPT relaxation of the separable set.
//! * [`analytic`]: closed forms for Werner, isotropic and pure states.
//! * [`states`]: the state families and random ensembles used throughout.
//! * [`experiment`]: parameter sweeps and random-state studies that emit
//!   CSV tables and JSON reports; the `erbound` binary is a thin front end.

pub mod analytic;
pub mod cha;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod ppt;
pub mod seed;
pub mod states;

pub use error::{Error, Result};
