//! Polygonal cell-based smoothed finite element solver for two-dimensional
//! seepage in saturated porous media.

pub mod assembly;
pub mod benchmarks;
pub mod config;
pub mod domain;
pub mod error;
pub mod free_surface;
pub mod geometry;
pub mod mesh;
pub mod problem;
pub mod quadrature;
pub mod quadtree;
pub mod runner;
pub mod seepage;
pub mod shape;
pub mod smoothing;
pub mod solver;
pub mod sparse;
pub mod voronoi;
pub mod vtk;

pub use error::{Error, Result};
pub use geometry::Point2;
