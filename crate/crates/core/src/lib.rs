//! Numerical toolkit for standard static Finsler spacetimes `ℝ × M` with
//! `L(τ, v) = −Λ(x)τ² + F²(v)` and their stationary (SSTK) extension.
//!
//! Layers, bottom-up: [`minkowski`] (one fiber), [`base`] (fields over a
//! chart), [`spacetime`] (causal character and cones), [`geodesics`],
//! [`causality`] (grid distances and ladder probes), [`scene`] (TOML input),
//! [`suite`] (property checks over a scene).

pub mod base;
pub mod causality;
pub mod cli;
pub mod error;
pub mod geodesics;
pub mod io;
pub mod minkowski;
pub mod numdiff;
pub mod sampling;
pub mod scene;
pub mod spacetime;
pub mod suite;

pub use base::{Chart, FinslerField, Hole, NormField, ScalarField};
pub use causality::{Direction, DistanceField, Grid, GridOptions};
pub use error::{Error, Result};
pub use geodesics::{ShootingProblem, Trajectory};
pub use scene::Scene;
pub use minkowski::NormSpec;
pub use spacetime::{CausalClass, CausalKind, Event, Orientation, StaticSpacetime, Tangent};

pub type Vector = nalgebra::DVector<f64>;
pub type Matrix = nalgebra::DMatrix<f64>;
