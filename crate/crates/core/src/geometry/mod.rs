//! Curves, unfitted annulus meshes, boundary transfer maps and extension patches.

mod boundary_map;
mod curve;
mod io;
mod mesh;
mod meshing;
mod patches;
mod vec2;

pub use boundary_map::{
    build_boundary_map, build_boundary_map_with, BoundaryMap, EdgeMap, MapStrategy, MappedPoint,
    DEFAULT_EDGE_NODES, TANGENCY_FLOOR,
};
pub use curve::{param_delta, wrap_param, Curve, ParametricCurve};
pub use io::{mesh_to_string, parse_mesh, read_mesh, write_mesh};
pub use mesh::{local_edge_vertices, BoundaryTag, Edge, ProximityReport, UnfittedMesh};
pub use meshing::{build_annulus_mesh, build_annulus_mesh_with, MeshOptions};
pub use patches::{build_extension_patches, ExtensionPatch};
pub use vec2::Vec2;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gap {gap:.4} between the curves is too small for mesh size {h}")]
    Infeasible { gap: f64, h: f64 },
    #[error("meshing failed at element {element}: {reason}")]
    MeshingFailure { element: usize, reason: String },
    #[error("mesh topology: {0}")]
    Topology(String),
    #[error("boundary map failed at edge {edge}: {reason}")]
    MapConstruction { edge: usize, reason: String },
    #[error("extension patch of edge {edge} folds")]
    PatchFold { edge: usize },
    #[error("mesh file line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
