//! Euclidean discrete uniformization of triangulated disks.
//!
//! A combinatorial closed disk with a conformal structure `C_{α,η}` and
//! boundary data `μ` is augmented by an apex vertex; a flat label on the
//! augmented disk is found numerically, developed into the plane, and
//! realized as M-weighted points (circles) meeting the prescribed
//! Minkowski products.

pub mod complex;
pub mod conformal;
pub mod error;
pub mod io;
pub mod layout;
pub mod measures;
pub mod minkowski;
pub mod rigidity;
pub mod solver;

pub use complex::{augment, validate_disk, AugmentedDisk, CombinatorialDisk, Complex, Simplex, SimplexClass, VertexId};
pub use conformal::{ConformalStructure, CurvatureVector, Label};
pub use io::{parse_problem, Preset, Problem};
pub use layout::{BoundaryScenario, PlaneLayout, Traversal};
pub use minkowski::{InfinitesimalMobius, MPoint};
pub use solver::{curvature_flow, newton_flat, FlowOptions, NewtonOptions};
