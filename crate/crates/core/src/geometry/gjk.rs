//! Support-function distance query with a polytope-expansion phase for
//! penetration depth.

use alloc::vec::Vec;

use nalgebra::{Matrix3, Vector3};

use super::{MAX_ITERATIONS, QUERY_TOL};

/// World-space support evaluator over a posed vertex cloud.
pub(crate) struct SupportPoly<'a> {
    verts: &'a [Vector3<f64>],
    rot: Matrix3<f64>,
    trans: Vector3<f64>,
}

impl<'a> SupportPoly<'a> {
    pub(crate) fn new(verts: &'a [Vector3<f64>], rot: &Matrix3<f64>, trans: &Vector3<f64>) -> Self {
        Self {
            verts,
            rot: *rot,
            trans: *trans,
        }
    }

    /// Support point in world frame; ties broken by lowest vertex index.
    pub(crate) fn support(&self, dir: &Vector3<f64>) -> Vector3<f64> {
        let local = self.rot.tr_mul(dir);
        let mut best = 0usize;
        let mut best_d = f64::NEG_INFINITY;
        for (i, v) in self.verts.iter().enumerate() {
            let d = v.dot(&local);
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        self.rot * self.verts[best] + self.trans
    }

    /// Support value `max(dot(v, dir))` without materializing the point.
    pub(crate) fn support_value(&self, dir: &Vector3<f64>) -> f64 {
        let local = self.rot.tr_mul(dir);
        let mut best = f64::NEG_INFINITY;
        for v in self.verts {
            best = best.max(v.dot(&local));
        }
        best + self.trans.dot(dir)
    }

    pub(crate) fn world_vertices(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.verts.iter().map(move |v| self.rot * v + self.trans)
    }

    fn center(&self) -> Vector3<f64> {
        self.trans
    }
}

/// One vertex of the configuration-space obstacle `A - B`, with the
/// originating witness points on either part.
#[derive(Debug, Clone, Copy)]
struct CsoPoint {
    w: Vector3<f64>,
    a: Vector3<f64>,
    b: Vector3<f64>,
}

fn cso_support(a: &SupportPoly, b: &SupportPoly, dir: &Vector3<f64>) -> CsoPoint {
    let pa = a.support(dir);
    let pb = b.support(&-dir);
    CsoPoint {
        w: pa - pb,
        a: pa,
        b: pb,
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Query {
    Separated {
        distance: f64,
        point_a: Vector3<f64>,
        point_b: Vector3<f64>,
    },
    Penetrating {
        depth: f64,
        /// Unit direction from A into B.
        normal: Vector3<f64>,
        /// Midpoint of the two witness points, world frame.
        point: Vector3<f64>,
    },
}

struct Simplex {
    pts: [CsoPoint; 4],
    lambda: [f64; 4],
    n: usize,
}

impl Simplex {
    fn new(p: CsoPoint) -> Self {
        Self {
            pts: [p; 4],
            lambda: [1.0, 0.0, 0.0, 0.0],
            n: 1,
        }
    }

    fn push(&mut self, p: CsoPoint) {
        debug_assert!(self.n < 4);
        self.pts[self.n] = p;
        self.n += 1;
    }

    fn witnesses(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut a = Vector3::zeros();
        let mut b = Vector3::zeros();
        for i in 0..self.n {
            a += self.lambda[i] * self.pts[i].a;
            b += self.lambda[i] * self.pts[i].b;
        }
        (a, b)
    }

    /// Closest point of the simplex to the origin. Reduces the simplex to
    /// the minimal feature containing that point and stores barycentrics.
    /// Returns `None` when the origin is inside a tetrahedron.
    fn closest_to_origin(&mut self) -> Option<Vector3<f64>> {
        match self.n {
            1 => {
                self.lambda = [1.0, 0.0, 0.0, 0.0];
                Some(self.pts[0].w)
            }
            2 => {
                let (p, l, mask) = closest_on_segment(self.pts[0].w, self.pts[1].w);
                self.reduce(&[l[0], l[1], 0.0, 0.0], mask);
                Some(p)
            }
            3 => {
                let (p, l, mask) = closest_on_triangle(self.pts[0].w, self.pts[1].w, self.pts[2].w);
                self.reduce(&[l[0], l[1], l[2], 0.0], mask);
                Some(p)
            }
            4 => {
                let mut best: Option<(f64, Vector3<f64>, [f64; 4], u8)> = None;
                let faces: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
                let mut outside_any = false;
                for f in &faces {
                    let opposite = 6 - (f[0] + f[1] + f[2]);
                    let (a, b, c) = (self.pts[f[0]].w, self.pts[f[1]].w, self.pts[f[2]].w);
                    let mut n = (b - a).cross(&(c - a));
                    if n.norm_squared() < 1e-300 {
                        continue;
                    }
                    if n.dot(&(self.pts[opposite].w - a)) > 0.0 {
                        n = -n;
                    }
                    // Origin on the outer side of this face?
                    if n.dot(&-a) <= 0.0 {
                        continue;
                    }
                    outside_any = true;
                    let (p, l, mask) = closest_on_triangle(a, b, c);
                    let d2 = p.norm_squared();
                    if best.map_or(true, |(bd, ..)| d2 < bd) {
                        let mut lam = [0.0; 4];
                        let mut m = 0u8;
                        for (k, &fi) in f.iter().enumerate() {
                            lam[fi] = l[k];
                            if mask & (1 << k) != 0 {
                                m |= 1 << fi;
                            }
                        }
                        best = Some((d2, p, lam, m));
                    }
                }
                if !outside_any {
                    return None;
                }
                let (_, p, lam, mask) = best?;
                self.reduce(&lam, mask);
                Some(p)
            }
            _ => unreachable!(),
        }
    }

    fn reduce(&mut self, lambda: &[f64; 4], mask: u8) {
        let mut k = 0;
        for i in 0..self.n {
            if mask & (1 << i) != 0 {
                self.pts[k] = self.pts[i];
                self.lambda[k] = lambda[i];
                k += 1;
            }
        }
        self.n = k;
    }
}

fn closest_on_segment(a: Vector3<f64>, b: Vector3<f64>) -> (Vector3<f64>, [f64; 2], u8) {
    let ab = b - a;
    let denom = ab.norm_squared();
    if denom < 1e-300 {
        return (a, [1.0, 0.0], 0b01);
    }
    let t = (-a.dot(&ab) / denom).clamp(0.0, 1.0);
    if t <= 0.0 {
        (a, [1.0, 0.0], 0b01)
    } else if t >= 1.0 {
        (b, [0.0, 1.0], 0b10)
    } else {
        (a + ab * t, [1.0 - t, t], 0b11)
    }
}

/// Closest point on a triangle to the origin with barycentrics and the
/// bitmask of supporting vertices.
fn closest_on_triangle(
    a: Vector3<f64>,
    b: Vector3<f64>,
    c: Vector3<f64>,
) -> (Vector3<f64>, [f64; 3], u8) {
    let ab = b - a;
    let ac = c - a;
    let ap = -a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return (a, [1.0, 0.0, 0.0], 0b001);
    }
    let bp = -b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return (b, [0.0, 1.0, 0.0], 0b010);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        let v = if denom.abs() < 1e-300 { 0.0 } else { d1 / denom };
        return (a + ab * v, [1.0 - v, v, 0.0], 0b011);
    }
    let cp = -c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return (c, [0.0, 0.0, 1.0], 0b100);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        let w = if denom.abs() < 1e-300 { 0.0 } else { d2 / denom };
        return (a + ac * w, [1.0 - w, 0.0, w], 0b101);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        let w = if denom.abs() < 1e-300 { 0.0 } else { (d4 - d3) / denom };
        return (b + (c - b) * w, [0.0, 1.0 - w, w], 0b110);
    }
    let denom = va + vb + vc;
    let inv = if denom.abs() < 1e-300 { 0.0 } else { 1.0 / denom };
    let v = vb * inv;
    let w = vc * inv;
    (
        a + ab * v + ac * w,
        [1.0 - v - w, v, w],
        0b111,
    )
}

/// Distance or penetration between two convex supports.
pub(crate) fn query(a: &SupportPoly, b: &SupportPoly) -> Query {
    let mut dir = b.center() - a.center();
    if dir.norm_squared() < 1e-24 {
        dir = Vector3::x();
    }
    let mut simplex = Simplex::new(cso_support(a, b, &dir));
    let mut closest = simplex.pts[0].w;

    for _ in 0..MAX_ITERATIONS {
        let dist = closest.norm();
        if dist < QUERY_TOL {
            return epa(a, b, &simplex);
        }
        let w = cso_support(a, b, &-closest);
        // Every CSO point projects to at least v̂·w along v̂, so once that
        // bound reaches the current distance the query has converged.
        let lower_bound = closest.dot(&w.w) / dist;
        let duplicate = (0..simplex.n).any(|i| (simplex.pts[i].w - w.w).norm_squared() < 1e-28);
        if dist - lower_bound <= QUERY_TOL || duplicate {
            let (pa, pb) = simplex.witnesses();
            return Query::Separated {
                distance: dist,
                point_a: pa,
                point_b: pb,
            };
        }
        simplex.push(w);
        match simplex.closest_to_origin() {
            Some(p) => closest = p,
            None => return epa(a, b, &simplex),
        }
    }
    let (pa, pb) = simplex.witnesses();
    Query::Separated {
        distance: closest.norm(),
        point_a: pa,
        point_b: pb,
    }
}

// ───────────────────────── penetration phase ─────────────────────────

struct Face {
    idx: [usize; 3],
    normal: Vector3<f64>,
    dist: f64,
    alive: bool,
}

fn make_face(verts: &[CsoPoint], idx: [usize; 3], interior: &Vector3<f64>) -> Option<Face> {
    let (a, b, c) = (verts[idx[0]].w, verts[idx[1]].w, verts[idx[2]].w);
    let mut n = (b - a).cross(&(c - a));
    let len = n.norm();
    if len < 1e-18 {
        return None;
    }
    n /= len;
    let mut idx = idx;
    if n.dot(&(a - interior)) < 0.0 {
        n = -n;
        idx.swap(1, 2);
    }
    Some(Face {
        idx,
        normal: n,
        dist: n.dot(&a),
        alive: true,
    })
}

/// Expanding-polytope depth query. `simplex` comes from a terminated
/// distance query with the origin inside or on the simplex.
fn epa(a: &SupportPoly, b: &SupportPoly, simplex: &Simplex) -> Query {
    let mut verts: Vec<CsoPoint> = (0..simplex.n).map(|i| simplex.pts[i]).collect();
    dedup_verts(&mut verts);
    if !grow_to_tetrahedron(a, b, &mut verts) {
        // Genuinely flat difference body: report a zero-depth touch.
        let n = flat_normal(&verts);
        let (pa, pb) = (verts[0].a, verts[0].b);
        return Query::Penetrating {
            depth: 0.0,
            normal: n,
            point: (pa + pb) * 0.5,
        };
    }

    let interior =
        (verts[0].w + verts[1].w + verts[2].w + verts[3].w) / 4.0;
    let mut faces: Vec<Face> = Vec::with_capacity(64);
    for idx in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
        if let Some(f) = make_face(&verts, idx, &interior) {
            faces.push(f);
        }
    }
    if faces.len() < 4 {
        let n = flat_normal(&verts);
        return Query::Penetrating {
            depth: 0.0,
            normal: n,
            point: (verts[0].a + verts[0].b) * 0.5,
        };
    }

    for _ in 0..MAX_ITERATIONS {
        let best = faces
            .iter()
            .enumerate()
            .filter(|(_, f)| f.alive)
            .min_by(|(_, x), (_, y)| x.dist.partial_cmp(&y.dist).unwrap_or(core::cmp::Ordering::Equal))
            .map(|(i, _)| i);
        let Some(fi) = best else { break };
        let normal = faces[fi].normal;
        let fdist = faces[fi].dist;
        let w = cso_support(a, b, &normal);
        let wdist = w.w.dot(&normal);
        if wdist - fdist < QUERY_TOL {
            return finish_epa(&verts, &faces[fi]);
        }
        // Remove all faces visible from w and stitch the horizon.
        let wi = verts.len();
        verts.push(w);
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for f in faces.iter_mut().filter(|f| f.alive) {
            if f.normal.dot(&(w.w - verts[f.idx[0]].w)) > 1e-12 {
                f.alive = false;
                for e in [(f.idx[0], f.idx[1]), (f.idx[1], f.idx[2]), (f.idx[2], f.idx[0])] {
                    // An edge shared with another removed face cancels out.
                    if let Some(pos) = horizon.iter().position(|&(x, y)| (x, y) == (e.1, e.0)) {
                        horizon.swap_remove(pos);
                    } else {
                        horizon.push(e);
                    }
                }
            }
        }
        if horizon.is_empty() {
            return finish_epa(&verts, &faces[fi]);
        }
        for (e0, e1) in horizon {
            if let Some(f) = make_face(&verts, [e0, e1, wi], &interior) {
                faces.push(f);
            }
        }
    }

    // Iteration cap: report the current best face.
    let best = faces
        .iter()
        .filter(|f| f.alive)
        .min_by(|x, y| x.dist.partial_cmp(&y.dist).unwrap_or(core::cmp::Ordering::Equal));
    match best {
        Some(f) => finish_epa(&verts, f),
        None => Query::Penetrating {
            depth: 0.0,
            normal: Vector3::z(),
            point: (verts[0].a + verts[0].b) * 0.5,
        },
    }
}

fn finish_epa(verts: &[CsoPoint], face: &Face) -> Query {
    let (p0, p1, p2) = (
        verts[face.idx[0]],
        verts[face.idx[1]],
        verts[face.idx[2]],
    );
    // Barycentrics of the origin's projection onto the face plane.
    let proj = face.normal * face.dist;
    let (_, l, _) = closest_on_triangle(p0.w - proj, p1.w - proj, p2.w - proj);
    let pa = l[0] * p0.a + l[1] * p1.a + l[2] * p2.a;
    let pb = l[0] * p0.b + l[1] * p1.b + l[2] * p2.b;
    Query::Penetrating {
        depth: face.dist.max(0.0),
        normal: face.normal,
        point: (pa + pb) * 0.5,
    }
}

fn dedup_verts(verts: &mut Vec<CsoPoint>) {
    let mut i = 0;
    while i < verts.len() {
        let mut j = i + 1;
        while j < verts.len() {
            if (verts[i].w - verts[j].w).norm_squared() < 1e-24 {
                verts.swap_remove(j);
            } else {
                j += 1;
            }
        }
        i += 1;
    }
}

/// Expand a 1-3 point seed into a non-degenerate tetrahedron.
fn grow_to_tetrahedron(a: &SupportPoly, b: &SupportPoly, verts: &mut Vec<CsoPoint>) -> bool {
    const AXES: [Vector3<f64>; 6] = [
        Vector3::new(1.0, 0.0, 0.0),
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(0.0, 1.0, 0.0),
        Vector3::new(0.0, -1.0, 0.0),
        Vector3::new(0.0, 0.0, 1.0),
        Vector3::new(0.0, 0.0, -1.0),
    ];
    let distinct = |vs: &[CsoPoint], w: &Vector3<f64>| {
        vs.iter().all(|v| (v.w - w).norm_squared() > 1e-24)
    };
    // Grow to 2 distinct points.
    if verts.len() < 2 {
        for d in &AXES {
            let w = cso_support(a, b, d);
            if distinct(verts, &w.w) {
                verts.push(w);
                break;
            }
        }
        if verts.len() < 2 {
            return false;
        }
    }
    // Grow to 3 non-collinear points.
    if verts.len() < 3 {
        let e = (verts[1].w - verts[0].w).normalize();
        let pick = if e.x.abs() < 0.57 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let u = e.cross(&pick).normalize();
        let v = e.cross(&u);
        for d in [u, -u, v, -v] {
            let w = cso_support(a, b, &d);
            if distinct(verts, &w.w)
                && (verts[1].w - verts[0].w)
                    .cross(&(w.w - verts[0].w))
                    .norm_squared()
                    > 1e-24
            {
                verts.push(w);
                break;
            }
        }
        if verts.len() < 3 {
            return false;
        }
    }
    // Grow to a tetrahedron with nonzero volume.
    if verts.len() < 4 {
        let n = (verts[1].w - verts[0].w)
            .cross(&(verts[2].w - verts[0].w))
            .normalize();
        for d in [n, -n] {
            let w = cso_support(a, b, &d);
            if distinct(verts, &w.w) && (w.w - verts[0].w).dot(&n).abs() > 1e-15 {
                verts.push(w);
                break;
            }
        }
    }
    verts.len() >= 4
}

fn flat_normal(verts: &[CsoPoint]) -> Vector3<f64> {
    if verts.len() >= 3 {
        let n = (verts[1].w - verts[0].w).cross(&(verts[2].w - verts[0].w));
        if n.norm_squared() > 1e-30 {
            return n.normalize();
        }
    }
    if verts.len() >= 2 {
        let e = verts[1].w - verts[0].w;
        let pick = if e.x.abs() < 0.57 * e.norm() {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let n = e.cross(&pick);
        if n.norm_squared() > 1e-30 {
            return n.normalize();
        }
    }
    Vector3::z()
}
