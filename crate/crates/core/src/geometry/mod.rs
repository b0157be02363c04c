//! Convex-part bodies, contact queries, and the contact manifold.
//!
//! Bodies are unions of convex vertex clouds. Contact between parts is
//! resolved with a support-function (GJK-style) distance query plus a
//! polytope-expansion phase for penetration depth, then widened to a small
//! manifold (deepest point plus face/edge clip points) so that planar and
//! line contacts rest stably.
//!
//! All operations here are pure functions on immutable inputs and safe to
//! call concurrently.

mod gjk;
mod manifold;

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use crate::math::Pose;

/// Distance tolerance for contact queries (m): 1e-6 mm.
pub const QUERY_TOL: f64 = 1e-9;

/// Maximum iterations for the support-function queries.
pub const MAX_ITERATIONS: usize = 64;

/// Default facet count for cylinder parts.
pub const CYLINDER_FACETS: usize = 16;

#[derive(Debug, Clone, thiserror::Error)]
pub enum GeometryError {
    #[error("part `{part}`: degenerate vertex set ({detail})")]
    Degenerate { part: String, detail: &'static str },
    #[error("part `{part}`: vertex {vertex} lies {depth_mm:.4} mm inside the hull of the others")]
    NonConvex {
        part: String,
        vertex: usize,
        depth_mm: f64,
    },
    #[error("body `{body}`: mass must be positive, got {mass}")]
    NonPositiveMass { body: String, mass: f64 },
    #[error("body `{body}`: inertia tensor must be symmetric positive-definite")]
    BadInertia { body: String },
}

/// A convex vertex cloud, positioned relative to its owning body.
#[derive(Debug, Clone)]
pub struct ConvexPart {
    pub name: String,
    /// Vertices in the part frame (m).
    pub vertices: Vec<Vector3<f64>>,
    /// Part frame relative to the owning body frame.
    pub local_pose: Pose,
    /// Centroid in body frame (cached).
    centroid: Vector3<f64>,
    /// Bounding radius about the centroid (cached).
    radius: f64,
}

impl ConvexPart {
    pub fn from_vertices(
        name: impl Into<String>,
        vertices: Vec<Vector3<f64>>,
        local_pose: Pose,
    ) -> Self {
        let mean = if vertices.is_empty() {
            Vector3::zeros()
        } else {
            vertices.iter().sum::<Vector3<f64>>() / vertices.len() as f64
        };
        let radius = vertices
            .iter()
            .map(|v| (v - mean).norm())
            .fold(0.0, f64::max);
        Self {
            name: name.into(),
            centroid: local_pose.transform_point(&mean),
            radius,
            vertices,
            local_pose,
        }
    }

    /// Axis-aligned box with the given half extents (m), centered on the
    /// part frame origin.
    pub fn cuboid(name: impl Into<String>, half: Vector3<f64>, local_pose: Pose) -> Self {
        let mut vs = Vec::with_capacity(8);
        for &sx in &[-1.0, 1.0] {
            for &sy in &[-1.0, 1.0] {
                for &sz in &[-1.0, 1.0] {
                    vs.push(Vector3::new(sx * half.x, sy * half.y, sz * half.z));
                }
            }
        }
        Self::from_vertices(name, vs, local_pose)
    }

    /// Z-axis cylinder discretized to `facets` prism vertices per end ring.
    pub fn cylinder(
        name: impl Into<String>,
        radius: f64,
        half_height: f64,
        facets: usize,
        local_pose: Pose,
    ) -> Self {
        let facets = facets.max(3);
        let mut vs = Vec::with_capacity(2 * facets);
        for &sz in &[-1.0, 1.0] {
            for k in 0..facets {
                let th = core::f64::consts::TAU * k as f64 / facets as f64;
                vs.push(Vector3::new(
                    radius * libm::cos(th),
                    radius * libm::sin(th),
                    sz * half_height,
                ));
            }
        }
        Self::from_vertices(name, vs, local_pose)
    }

    /// Bounding-sphere center in the body frame.
    pub fn centroid(&self) -> Vector3<f64> {
        self.centroid
    }

    /// Bounding-sphere radius (m).
    pub fn bounding_radius(&self) -> f64 {
        self.radius
    }

    /// Checks that the part has at least four vertices spanning 3-D.
    pub fn check_nondegenerate(&self) -> Result<(), GeometryError> {
        let err = |detail| GeometryError::Degenerate {
            part: self.name.clone(),
            detail,
        };
        if self.vertices.len() < 4 {
            return Err(err("fewer than 4 vertices"));
        }
        let v0 = self.vertices[0];
        let scale = self.radius.max(1e-12);
        let v1 = match self
            .vertices
            .iter()
            .max_by(|a, b| cmp_f64((*a - v0).norm(), (*b - v0).norm()))
        {
            Some(v) if (v - v0).norm() > 1e-9 * scale.max(1.0) => *v,
            _ => return Err(err("all vertices coincide")),
        };
        let e1 = (v1 - v0).normalize();
        let dist_line = |v: &Vector3<f64>| ((v - v0) - (v - v0).dot(&e1) * e1).norm();
        let v2 = match self.vertices.iter().max_by(|a, b| cmp_f64(dist_line(a), dist_line(b))) {
            Some(v) if dist_line(v) > 1e-9 => *v,
            _ => return Err(err("vertices are collinear")),
        };
        let n = (v1 - v0).cross(&(v2 - v0)).normalize();
        let dist_plane = |v: &Vector3<f64>| (v - v0).dot(&n).abs();
        match self.vertices.iter().max_by(|a, b| cmp_f64(dist_plane(a), dist_plane(b))) {
            Some(v) if dist_plane(v) > 1e-9 => Ok(()),
            _ => Err(err("vertices are coplanar")),
        }
    }
}

fn cmp_f64(a: f64, b: f64) -> core::cmp::Ordering {
    a.partial_cmp(&b).unwrap_or(core::cmp::Ordering::Equal)
}

/// A rigid body made of overlapping convex parts.
#[derive(Debug, Clone)]
pub struct BodyModel {
    pub name: String,
    pub parts: Vec<ConvexPart>,
    /// Mass (kg).
    pub mass: f64,
    /// Inertia tensor about the center of mass, body frame (kg·m²).
    pub inertia: Matrix3<f64>,
    /// Center of mass in the body frame (m).
    pub com: Vector3<f64>,
    pub friction_tangential: f64,
    pub friction_torsional: f64,
}

impl BodyModel {
    /// Validates masses, inertia, degeneracy, and convexity of every part.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(self.mass > 0.0) {
            return Err(GeometryError::NonPositiveMass {
                body: self.name.clone(),
                mass: self.mass,
            });
        }
        let sym = (self.inertia - self.inertia.transpose()).norm() < 1e-12;
        // Leading principal minors positive <=> symmetric positive-definite.
        let m1 = self.inertia[(0, 0)];
        let m2 = self.inertia.fixed_view::<2, 2>(0, 0).determinant();
        let m3 = self.inertia.determinant();
        if !sym || m1 <= 0.0 || m2 <= 0.0 || m3 <= 0.0 {
            return Err(GeometryError::BadInertia {
                body: self.name.clone(),
            });
        }
        for part in &self.parts {
            if !validate_convexity(part)? {
                // validate_convexity reports *which* vertex failed via the
                // error path below, so recompute for the message.
                for (i, _) in part.vertices.iter().enumerate() {
                    if let Some(depth) = interior_depth(part, i) {
                        return Err(GeometryError::NonConvex {
                            part: part.name.clone(),
                            vertex: i,
                            depth_mm: depth / crate::MM,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Lowest world-frame z over all part vertices.
    pub fn lowest_point_z(&self, pose: &Pose) -> f64 {
        let mut z = f64::INFINITY;
        for part in &self.parts {
            let world = pose.compose(&part.local_pose);
            for v in &part.vertices {
                z = z.min(world.transform_point(v).z);
            }
        }
        z
    }
}

/// A single contact between two parts.
///
/// `normal` points from body A into body B; `depth >= 0` is penetration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactPoint {
    /// Contact location, world frame (m).
    pub point: Vector3<f64>,
    /// Unit normal from body A into body B.
    pub normal: Vector3<f64>,
    /// Penetration depth (m), `>= 0`.
    pub depth: f64,
    /// `(part index in A, part index in B)`.
    pub part_ids: (usize, usize),
}

/// Result of a narrow-phase query between two convex parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContactResult {
    Penetrating(ContactPoint),
    /// Minimum distance (m) and the direction from A into B.
    Separated { distance: f64, normal: Vector3<f64> },
}

impl ContactResult {
    /// Penetration depth when penetrating, negative separation otherwise.
    pub fn signed_depth(&self) -> f64 {
        match self {
            ContactResult::Penetrating(c) => c.depth,
            ContactResult::Separated { distance, .. } => -distance,
        }
    }
}

/// True iff every vertex of `part` is a hull vertex within [`QUERY_TOL`].
///
/// Degenerate (collinear/coplanar) vertex sets are rejected with an error
/// naming the part.
pub fn validate_convexity(part: &ConvexPart) -> Result<bool, GeometryError> {
    part.check_nondegenerate()?;
    for i in 0..part.vertices.len() {
        if interior_depth(part, i).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Depth of vertex `i` inside the hull of the remaining vertices, if it is
/// more than [`QUERY_TOL`] inside.
fn interior_depth(part: &ConvexPart, i: usize) -> Option<f64> {
    let v = part.vertices[i];
    let rest: Vec<Vector3<f64>> = part
        .vertices
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, p)| *p)
        .collect();
    let point = [v];
    let a = gjk::SupportPoly::new(&point, &Matrix3::identity(), &Vector3::zeros());
    let b = gjk::SupportPoly::new(&rest, &Matrix3::identity(), &Vector3::zeros());
    match gjk::query(&a, &b) {
        gjk::Query::Separated { .. } => None,
        gjk::Query::Penetrating { depth, .. } if depth > QUERY_TOL => Some(depth),
        gjk::Query::Penetrating { .. } => None,
    }
}

/// World-frame support point of a posed part: the vertex maximizing
/// `dot(vertex, direction)`, ties broken by lowest vertex index.
pub fn support(part: &ConvexPart, pose: &Pose, direction: &Vector3<f64>) -> Vector3<f64> {
    let world = pose.compose(&part.local_pose);
    let local_dir = world.rotate_inv(direction);
    let mut best = 0;
    let mut best_d = f64::NEG_INFINITY;
    for (i, v) in part.vertices.iter().enumerate() {
        let d = v.dot(&local_dir);
        if d > best_d {
            best_d = d;
            best = i;
        }
    }
    world.transform_point(&part.vertices[best])
}

fn support_poly<'a>(part: &'a ConvexPart, pose: &Pose) -> (gjk::SupportPoly<'a>, Pose) {
    let world = pose.compose(&part.local_pose);
    let rot = world.orientation.to_rotation_matrix().into_inner();
    (
        gjk::SupportPoly::new(&part.vertices, &rot, &world.position),
        world,
    )
}

/// Deepest-point contact between two posed convex parts, or their minimum
/// separation distance.
///
/// Symmetric under argument swap: the normal flips, depth/distance agree
/// within [`QUERY_TOL`]. Touching pairs (|depth| below tolerance) report a
/// contact of depth zero.
pub fn contact_query(
    part_a: &ConvexPart,
    pose_a: &Pose,
    part_b: &ConvexPart,
    pose_b: &Pose,
) -> ContactResult {
    let (sa, _) = support_poly(part_a, pose_a);
    let (sb, _) = support_poly(part_b, pose_b);
    match gjk::query(&sa, &sb) {
        gjk::Query::Separated {
            distance,
            point_a,
            point_b,
        } => {
            if distance <= QUERY_TOL {
                // Touching: report a zero-depth contact.
                let normal = touch_normal(point_b - point_a);
                ContactResult::Penetrating(ContactPoint {
                    point: (point_a + point_b) * 0.5,
                    normal,
                    depth: 0.0,
                    part_ids: (0, 0),
                })
            } else {
                ContactResult::Separated {
                    distance,
                    normal: (point_b - point_a) / distance,
                }
            }
        }
        gjk::Query::Penetrating {
            depth,
            normal,
            point,
        } => ContactResult::Penetrating(ContactPoint {
            point,
            normal,
            depth,
            part_ids: (0, 0),
        }),
    }
}

fn touch_normal(dir: Vector3<f64>) -> Vector3<f64> {
    let n = dir.norm();
    if n > 1e-12 {
        dir / n
    } else {
        Vector3::z()
    }
}

/// Contact manifold between two bodies: for every penetrating part pair,
/// the deepest point plus up to three face/edge clip points.
///
/// Ordering is deterministic: pairs by `(part index in A, part index in B)`,
/// the deepest point first within a pair. An empty list means fully
/// separated. A body never collides with itself.
pub fn collide_bodies(
    body_a: &BodyModel,
    pose_a: &Pose,
    body_b: &BodyModel,
    pose_b: &Pose,
) -> Vec<ContactPoint> {
    let mut out = Vec::new();
    if core::ptr::eq(body_a, body_b) {
        return out;
    }
    for (i, pa) in body_a.parts.iter().enumerate() {
        let ca = pose_a.transform_point(&pa.centroid());
        for (j, pb) in body_b.parts.iter().enumerate() {
            let cb = pose_b.transform_point(&pb.centroid());
            let reach = pa.bounding_radius() + pb.bounding_radius();
            if (cb - ca).norm_squared() > (reach + 1e-6) * (reach + 1e-6) {
                continue;
            }
            let (sa, _) = support_poly(pa, pose_a);
            let (sb, _) = support_poly(pb, pose_b);
            if let gjk::Query::Penetrating {
                depth,
                normal,
                point,
            } = gjk::query(&sa, &sb)
            {
                let deepest = ContactPoint {
                    point,
                    normal,
                    depth,
                    part_ids: (i, j),
                };
                manifold::expand(&sa, &sb, deepest, &mut out);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
