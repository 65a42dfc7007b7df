//! Simulation and verification toolkit for intrinsic geometry and dynamics in
//! bounded Euclidean domains: implicit domains and their regularity, intrinsic
//! geodesics, loop shortening and rubber-band stress tests, spherical
//! comparison geometry, deterministic pursuit/evasion integration, and
//! Monte-Carlo experiments on co-adapted couplings of reflected Brownian
//! motions.

pub mod geom;
pub mod rng;

pub mod domain;
pub mod geodesy;

pub use geom::{Matrix, Point, MAX_DIM};
