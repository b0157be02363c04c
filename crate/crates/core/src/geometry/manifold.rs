//! Widens a deepest-point contact into a small manifold.
//!
//! A single penetration witness cannot hold a face or an edge at rest, so
//! when the supporting features of both parts along the contact normal are
//! faces (or a face and an edge), the overlap region is clipped and up to
//! three extra points are emitted alongside the deepest one.

use alloc::vec::Vec;

use nalgebra::{Vector2, Vector3};

use super::gjk::SupportPoly;
use super::ContactPoint;

/// Vertices within this band (m) of the support plane count as the
/// supporting feature.
const FEAT_TOL: f64 = 2e-4;

/// Clip points closer than this (m) to an already-kept point are dropped.
const MERGE_TOL: f64 = 3e-4;

/// Extra points beyond the deepest one.
const MAX_EXTRA: usize = 3;

pub(crate) fn expand(
    sa: &SupportPoly,
    sb: &SupportPoly,
    deepest: ContactPoint,
    out: &mut Vec<ContactPoint>,
) {
    let n = deepest.normal;
    let feat_a = feature_verts(sa, &n);
    let feat_b = feature_verts(sb, &-n);

    let extra: Vec<(Vector3<f64>, f64)> = if feat_a.len() >= 3 && feat_b.len() >= 3 {
        face_face(&feat_a, &feat_b, &n, &deepest.point)
    } else if feat_a.len() == 2 && feat_b.len() >= 3 {
        edge_face(&feat_a, &feat_b, &n, &deepest.point, true)
    } else if feat_b.len() == 2 && feat_a.len() >= 3 {
        edge_face(&feat_b, &feat_a, &n, &deepest.point, false)
    } else {
        Vec::new()
    };

    out.push(deepest);
    let mut kept = 1usize;
    for (point, depth) in extra {
        if kept > MAX_EXTRA {
            break;
        }
        if depth <= 0.0 {
            continue;
        }
        let near_existing = out[out.len() - kept..]
            .iter()
            .any(|c| (c.point - point).norm() < MERGE_TOL);
        if near_existing {
            continue;
        }
        out.push(ContactPoint {
            point,
            normal: n,
            depth,
            part_ids: deepest.part_ids,
        });
        kept += 1;
    }
}

fn feature_verts(s: &SupportPoly, dir: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let mut h = f64::NEG_INFINITY;
    let verts: Vec<Vector3<f64>> = s.world_vertices().collect();
    for v in &verts {
        h = h.max(v.dot(dir));
    }
    verts
        .into_iter()
        .filter(|v| v.dot(dir) >= h - FEAT_TOL)
        .collect()
}

/// Orthonormal basis perpendicular to `n`.
fn plane_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let pick = if n.x.abs() < 0.57 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let u = n.cross(&pick).normalize();
    let v = n.cross(&u);
    (u, v)
}

/// Plane through a point set, normal oriented along `toward`.
fn fit_plane(verts: &[Vector3<f64>], toward: &Vector3<f64>) -> (Vector3<f64>, f64) {
    // Newell's method over the (angle-ordered) polygon is overkill here:
    // features are small and near-planar, a cross of two spanning edges
    // is stable enough, with a fallback to `toward` for collinear sets.
    let mut normal = Vector3::zeros();
    'outer: for i in 1..verts.len() {
        for j in (i + 1)..verts.len() {
            let c = (verts[i] - verts[0]).cross(&(verts[j] - verts[0]));
            if c.norm_squared() > 1e-18 {
                normal = c.normalize();
                break 'outer;
            }
        }
    }
    if normal.norm_squared() < 0.5 {
        normal = *toward;
    }
    if normal.dot(toward) < 0.0 {
        normal = -normal;
    }
    let centroid = verts.iter().sum::<Vector3<f64>>() / verts.len() as f64;
    (normal, normal.dot(&centroid))
}

/// Offset along `n` from the base plane (through `origin`, normal `n`) to
/// where the plane `(pn, pc)` lies, at lateral position `q`.
fn plane_height(q: &Vector3<f64>, n: &Vector3<f64>, pn: &Vector3<f64>, pc: f64) -> f64 {
    let denom = pn.dot(n);
    if denom.abs() < 1e-9 {
        return 0.0;
    }
    (pc - pn.dot(q)) / denom
}

fn project(
    verts: &[Vector3<f64>],
    origin: &Vector3<f64>,
    u: &Vector3<f64>,
    v: &Vector3<f64>,
) -> Vec<Vector2<f64>> {
    verts
        .iter()
        .map(|p| Vector2::new((p - origin).dot(u), (p - origin).dot(v)))
        .collect()
}

/// Angle-order a convex point set counterclockwise, dropping duplicates.
fn order_ccw(mut pts: Vec<Vector2<f64>>) -> Vec<Vector2<f64>> {
    let mut i = 0;
    while i < pts.len() {
        let mut j = i + 1;
        while j < pts.len() {
            if (pts[i] - pts[j]).norm_squared() < 1e-18 {
                pts.swap_remove(j);
            } else {
                j += 1;
            }
        }
        i += 1;
    }
    if pts.len() < 3 {
        return pts;
    }
    let c = pts.iter().sum::<Vector2<f64>>() / pts.len() as f64;
    pts.sort_by(|a, b| {
        let ta = libm::atan2(a.y - c.y, a.x - c.x);
        let tb = libm::atan2(b.y - c.y, b.x - c.x);
        ta.partial_cmp(&tb).unwrap_or(core::cmp::Ordering::Equal)
    });
    pts
}

fn cross2(a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Sutherland-Hodgman clip of a convex `subject` by a convex CCW `clip`.
fn clip_polygon(subject: Vec<Vector2<f64>>, clip: &[Vector2<f64>]) -> Vec<Vector2<f64>> {
    let mut out = subject;
    for k in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let c0 = clip[k];
        let c1 = clip[(k + 1) % clip.len()];
        let edge = c1 - c0;
        let input = core::mem::take(&mut out);
        for i in 0..input.len() {
            let s = input[i];
            let e = input[(i + 1) % input.len()];
            let s_in = cross2(&edge, &(s - c0)) >= -1e-15;
            let e_in = cross2(&edge, &(e - c0)) >= -1e-15;
            if e_in {
                if !s_in {
                    out.push(seg_line_intersect(&s, &e, &c0, &c1));
                }
                out.push(e);
            } else if s_in {
                out.push(seg_line_intersect(&s, &e, &c0, &c1));
            }
        }
    }
    out
}

fn seg_line_intersect(
    s: &Vector2<f64>,
    e: &Vector2<f64>,
    c0: &Vector2<f64>,
    c1: &Vector2<f64>,
) -> Vector2<f64> {
    let d = e - s;
    let edge = c1 - c0;
    let denom = cross2(&edge, &d);
    if denom.abs() < 1e-18 {
        return *s;
    }
    let t = cross2(&edge, &(c0 - s)) / denom;
    s + d * t.clamp(0.0, 1.0)
}

fn face_face(
    feat_a: &[Vector3<f64>],
    feat_b: &[Vector3<f64>],
    n: &Vector3<f64>,
    origin: &Vector3<f64>,
) -> Vec<(Vector3<f64>, f64)> {
    let (u, v) = plane_basis(n);
    let poly_a = order_ccw(project(feat_a, origin, &u, &v));
    let poly_b = order_ccw(project(feat_b, origin, &u, &v));
    if poly_a.len() < 3 || poly_b.len() < 3 {
        return Vec::new();
    }
    let clipped = clip_polygon(poly_b, &poly_a);
    if clipped.is_empty() {
        return Vec::new();
    }
    let (na, ca) = fit_plane(feat_a, n);
    let (nb, cb) = fit_plane(feat_b, n);
    let candidates: Vec<(Vector3<f64>, f64)> = clipped
        .iter()
        .map(|q2| {
            let q = origin + u * q2.x + v * q2.y;
            let ta = plane_height(&q, n, &na, ca);
            let tb = plane_height(&q, n, &nb, cb);
            (q + n * ((ta + tb) * 0.5), ta - tb)
        })
        .collect();
    spread_out(candidates, &u, &v, origin)
}

/// `edge` belongs to A when `edge_is_a`; `face` is the other part's feature.
fn edge_face(
    edge: &[Vector3<f64>],
    face: &[Vector3<f64>],
    n: &Vector3<f64>,
    origin: &Vector3<f64>,
    edge_is_a: bool,
) -> Vec<(Vector3<f64>, f64)> {
    let (u, v) = plane_basis(n);
    let poly = order_ccw(project(face, origin, &u, &v));
    if poly.len() < 3 {
        return Vec::new();
    }
    let e2 = project(edge, origin, &u, &v);
    // Clip the segment parameter range against each polygon half-plane.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for k in 0..poly.len() {
        let c0 = poly[k];
        let c1 = poly[(k + 1) % poly.len()];
        let eg = c1 - c0;
        let f0 = cross2(&eg, &(e2[0] - c0));
        let f1 = cross2(&eg, &(e2[1] - c0));
        let df = f1 - f0;
        if df.abs() < 1e-18 {
            if f0 < -1e-15 {
                return Vec::new();
            }
            continue;
        }
        let t = -f0 / df;
        if df > 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 {
            return Vec::new();
        }
    }
    // Face plane of the other part; orient toward the face's support side.
    let face_dir = if edge_is_a { -*n } else { *n };
    let (nf, cf) = fit_plane(face, &face_dir);
    let mut candidates = Vec::with_capacity(2);
    for t in [t0, t1] {
        let p = edge[0] + (edge[1] - edge[0]) * t;
        let lat = p - n * (p - origin).dot(n);
        let tf = plane_height(&lat, n, &nf, cf);
        let offset = (p - origin).dot(n);
        // Overlap between the edge point and the face surface along n.
        let depth = if edge_is_a { offset - tf } else { tf - offset };
        candidates.push((p - n * (depth * 0.5) * if edge_is_a { 1.0 } else { -1.0 }, depth));
    }
    candidates
}

/// Keep candidates that spread the manifold: extremes along the two plane
/// axes, deterministic order.
fn spread_out(
    candidates: Vec<(Vector3<f64>, f64)>,
    u: &Vector3<f64>,
    v: &Vector3<f64>,
    origin: &Vector3<f64>,
) -> Vec<(Vector3<f64>, f64)> {
    if candidates.len() <= MAX_EXTRA {
        return candidates;
    }
    let mut picked: Vec<usize> = Vec::with_capacity(4);
    for dir in [*u, -*u, *v, -*v] {
        let best = candidates
            .iter()
            .enumerate()
            .max_by(|(_, (p, _)), (_, (q, _))| {
                let a = (p - origin).dot(&dir);
                let b = (q - origin).dot(&dir);
                a.partial_cmp(&b).unwrap_or(core::cmp::Ordering::Equal)
            })
            .map(|(i, _)| i);
        if let Some(i) = best {
            if !picked.contains(&i) {
                picked.push(i);
            }
        }
    }
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|i| candidates[i])
        .collect()
}
