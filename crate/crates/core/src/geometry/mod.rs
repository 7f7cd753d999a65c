//! Scenarios (domain, obstacle, piecewise-constant partition, measurement arc) and
//! interface-aligned meshes.

mod mesh;
mod mesher;
mod scenario;

pub use mesh::{conductivity_field, triangle_area, BoundaryEdge, Circle, EdgeTag, Mesh};
pub use mesher::{build_mesh, build_mesh_with, reference_mesh, MeshExtras};
pub use scenario::{
    polar_angle, Axis, DomainShape, GammaArc, Obstacle, ObstacleBc, RegionShape, RegionSpec, Scenario,
};
