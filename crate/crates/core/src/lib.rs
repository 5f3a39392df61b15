//! Wireframe reconstruction from multi-view 2D line observations.
//!
//! The crate is `no_std` (it needs `alloc`) and contains every algorithmic
//! stage of the reconstruction:
//!
//! - [`geometry`]: pinhole cameras, segments and wireframe graphs.
//! - [`sdf`]: analytic signed distance fields and sphere tracing.
//! - [`render`]: SDF-driven volume rendering of 3D line segments along
//!   attraction-field rays.
//! - [`cluster`], [`assignment`], [`junctions`]: DBSCAN pseudo junctions,
//!   Hungarian matching and the global junction fit.
//! - [`distill`]: endpoint indexing, grouping, least-squares junction
//!   adjustment, SDF snapping and visibility filtering.
//! - [`synth`]: synthetic ground-truth scenes and corrupted observations.
//! - [`metrics`]: accuracy/completeness and precision/recall.
//! - [`pipeline`]: the end-to-end driver over in-memory values.
//!
//! File formats and the command line live in the `wirefield` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b, tol): (f64, f64, f64) = ($a, $b, $tol);
        assert!((a - b).abs() <= tol, "{} vs {} (tol {})", a, b, tol);
    }};
}

pub mod assignment;
pub mod cluster;
pub mod distill;
mod error;
pub mod geometry;
pub mod junctions;
pub(crate) mod math;
pub mod metrics;
pub mod pipeline;
pub mod render;
pub mod sdf;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    Camera, CloudSegment, LineCloud, LineSegment2D, LineSegment3D, Mat3, Vec2, Vec3,
    WireframeGraph2D, WireframeGraph3D,
};
