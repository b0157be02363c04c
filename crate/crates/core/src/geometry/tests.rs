use alloc::vec;
use alloc::vec::Vec;

use approx::assert_relative_eq;
use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::math::Pose;

fn unit_cube() -> ConvexPart {
    ConvexPart::cuboid("cube", Vector3::new(0.5, 0.5, 0.5), Pose::IDENTITY)
}

fn random_part(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> ConvexPart {
    let mut vs = Vec::with_capacity(n);
    while vs.len() < n {
        let v = Vector3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if v.norm() > 1e-3 {
            vs.push(v.normalize() * scale * rng.gen_range(0.5..1.0));
        }
    }
    ConvexPart::from_vertices("random", vs, Pose::IDENTITY)
}

fn random_pose(rng: &mut ChaCha8Rng, span: f64) -> Pose {
    Pose::new(
        Vector3::new(
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
            rng.gen_range(-span..span),
        ),
        UnitQuaternion::from_scaled_axis(Vector3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )),
    )
}

#[test]
fn cube_is_convex() {
    assert!(validate_convexity(&unit_cube()).unwrap());
}

#[test]
fn cube_plus_centroid_is_not_convex() {
    let mut part = unit_cube();
    part.vertices.push(Vector3::zeros());
    let part = ConvexPart::from_vertices("cube+c", part.vertices, Pose::IDENTITY);
    assert!(!validate_convexity(&part).unwrap());
}

#[test]
fn coplanar_set_is_degenerate() {
    let part = ConvexPart::from_vertices(
        "flat",
        vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(1.0, 1.0, 0.0),
        ],
        Pose::IDENTITY,
    );
    let err = validate_convexity(&part).unwrap_err();
    let msg = alloc::format!("{err}");
    assert!(msg.contains("flat"), "error should name the part: {msg}");
}

#[test]
fn support_axis_aligned_cube() {
    let cube = unit_cube();
    let s = support(&cube, &Pose::IDENTITY, &Vector3::x());
    assert_relative_eq!(s.x, 0.5, epsilon = 1e-12);
}

#[test]
fn support_is_rotation_consistent() {
    let cube = unit_cube();
    let pose = Pose::from_rotation(UnitQuaternion::from_axis_angle(
        &Vector3::z_axis(),
        core::f64::consts::FRAC_PI_2,
    ));
    let s = support(&cube, &pose, &Vector3::x());
    assert_relative_eq!(s.x, 0.5, epsilon = 1e-12);
}

#[test]
fn support_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let part = random_part(&mut rng, 12, 0.3);
        let pose = random_pose(&mut rng, 0.5);
        let dir = random_pose(&mut rng, 1.0).rotate(&Vector3::x());
        let s = support(&part, &pose, &dir);
        let best = part
            .vertices
            .iter()
            .map(|v| pose.compose(&part.local_pose).transform_point(v).dot(&dir))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_relative_eq!(s.dot(&dir), best, epsilon = 1e-12);
    }
}

#[test]
fn separated_cubes_distance() {
    let cube = unit_cube();
    let pa = Pose::IDENTITY;
    let pb = Pose::from_translation(Vector3::new(1.5, 0.0, 0.0));
    match contact_query(&cube, &pa, &cube, &pb) {
        ContactResult::Separated { distance, normal } => {
            assert_relative_eq!(distance, 0.5, epsilon = 1e-9);
            assert_relative_eq!(normal.x, 1.0, epsilon = 1e-9);
        }
        other => panic!("expected separation, got {other:?}"),
    }
}

#[test]
fn overlapping_cubes_depth_and_normal() {
    let cube = unit_cube();
    let pa = Pose::IDENTITY;
    let pb = Pose::from_translation(Vector3::new(0.9, 0.0, 0.0));
    match contact_query(&cube, &pa, &cube, &pb) {
        ContactResult::Penetrating(c) => {
            assert_relative_eq!(c.depth, 0.1, epsilon = 1e-9);
            assert_relative_eq!(c.normal.x.abs(), 1.0, epsilon = 1e-9);
            assert!(c.normal.x > 0.0, "normal must point from A into B");
        }
        other => panic!("expected contact, got {other:?}"),
    }
}

#[test]
fn touching_cubes_report_zero_depth_contact() {
    let cube = unit_cube();
    let pa = Pose::IDENTITY;
    let pb = Pose::from_translation(Vector3::new(1.0 + 1e-13, 0.0, 0.0));
    match contact_query(&cube, &pa, &cube, &pb) {
        ContactResult::Penetrating(c) => assert!(c.depth.abs() < 1e-9),
        other => panic!("expected touching contact, got {other:?}"),
    }
}

#[test]
fn query_is_symmetric_under_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let a = random_part(&mut rng, 10, 0.2);
        let b = random_part(&mut rng, 10, 0.2);
        let pa = random_pose(&mut rng, 0.15);
        let pb = random_pose(&mut rng, 0.15);
        let fwd = contact_query(&a, &pa, &b, &pb);
        let rev = contact_query(&b, &pb, &a, &pa);
        assert!(
            (fwd.signed_depth() - rev.signed_depth()).abs() < 1e-9,
            "depth mismatch: {} vs {}",
            fwd.signed_depth(),
            rev.signed_depth()
        );
        if let (
            ContactResult::Separated { normal: nf, .. },
            ContactResult::Separated { normal: nr, .. },
        ) = (&fwd, &rev)
        {
            assert!((nf + nr).norm() < 1e-6, "separated normals must flip");
        }
    }
}

#[test]
fn query_is_translation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let a = random_part(&mut rng, 10, 0.2);
        let b = random_part(&mut rng, 10, 0.2);
        let pa = random_pose(&mut rng, 0.15);
        let pb = random_pose(&mut rng, 0.15);
        let shift = Vector3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        let base = contact_query(&a, &pa, &b, &pb).signed_depth();
        let mut pa2 = pa;
        let mut pb2 = pb;
        pa2.position += shift;
        pb2.position += shift;
        let moved = contact_query(&a, &pa2, &b, &pb2).signed_depth();
        assert!(
            (base - moved).abs() < 1e-12,
            "translation changed result: {base} vs {moved}"
        );
    }
}

#[test]
fn query_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..30 {
        let a = random_part(&mut rng, 10, 0.2);
        let b = random_part(&mut rng, 10, 0.2);
        let pa = random_pose(&mut rng, 0.15);
        let pb = random_pose(&mut rng, 0.15);
        let rot = Pose::from_rotation(UnitQuaternion::from_scaled_axis(Vector3::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
        )));
        let base = contact_query(&a, &pa, &b, &pb).signed_depth();
        let moved =
            contact_query(&a, &rot.compose(&pa), &b, &rot.compose(&pb)).signed_depth();
        assert!(
            (base - moved).abs() < 1e-9,
            "rotation changed result: {base} vs {moved}"
        );
    }
}

fn two_wall_socket() -> BodyModel {
    // Two walls 10 mm apart in x, 5 mm thick, 20 mm tall.
    let wall = |name: &str, cx: f64| {
        ConvexPart::cuboid(
            name,
            Vector3::new(2.5e-3, 10e-3, 10e-3),
            Pose::from_translation(Vector3::new(cx, 0.0, 10e-3)),
        )
    };
    BodyModel {
        name: "socket".into(),
        parts: vec![wall("wall_nx", -7.5e-3), wall("wall_px", 7.5e-3)],
        mass: 1.0,
        inertia: Matrix3::identity() * 1e-3,
        com: Vector3::zeros(),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    }
}

fn peg() -> BodyModel {
    BodyModel {
        name: "peg".into(),
        parts: vec![ConvexPart::cuboid(
            "peg",
            Vector3::new(4e-3, 4e-3, 15e-3),
            Pose::from_translation(Vector3::new(0.0, 0.0, 15e-3)),
        )],
        mass: 0.02,
        inertia: Matrix3::identity() * 1e-6,
        com: Vector3::new(0.0, 0.0, 15e-3),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    }
}

#[test]
fn peg_between_walls_with_clearance_has_no_contacts() {
    let socket = two_wall_socket();
    let peg = peg();
    let contacts = collide_bodies(
        &peg,
        &Pose::from_translation(Vector3::new(0.0, 0.0, 2e-3)),
        &socket,
        &Pose::IDENTITY,
    );
    assert!(contacts.is_empty(), "got {contacts:?}");
}

#[test]
fn peg_overlapping_one_wall_reports_only_that_pair() {
    let socket = two_wall_socket();
    let peg = peg();
    // Shift the peg +x so it overlaps wall_px (parts index 1) by 0.5 mm.
    let contacts = collide_bodies(
        &peg,
        &Pose::from_translation(Vector3::new(1.5e-3, 0.0, 2e-3)),
        &socket,
        &Pose::IDENTITY,
    );
    assert!(!contacts.is_empty());
    for c in &contacts {
        assert_eq!(c.part_ids, (0, 1), "only the +x wall pair may appear");
        assert!(c.depth > 0.0);
    }
}

#[test]
fn body_never_collides_with_itself() {
    let socket = two_wall_socket();
    let contacts = collide_bodies(&socket, &Pose::IDENTITY, &socket, &Pose::IDENTITY);
    assert!(contacts.is_empty());
}

#[test]
fn face_resting_produces_a_spread_manifold() {
    // Small cube resting 0.05 mm deep on a large slab: face-face contact
    // needs at least 3 points to rest stably.
    let slab = BodyModel {
        name: "slab".into(),
        parts: vec![ConvexPart::cuboid(
            "slab",
            Vector3::new(50e-3, 50e-3, 5e-3),
            Pose::IDENTITY,
        )],
        mass: 1.0,
        inertia: Matrix3::identity() * 1e-3,
        com: Vector3::zeros(),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    };
    let cube = BodyModel {
        name: "cube".into(),
        parts: vec![ConvexPart::cuboid(
            "cube",
            Vector3::new(5e-3, 5e-3, 5e-3),
            Pose::IDENTITY,
        )],
        mass: 0.01,
        inertia: Matrix3::identity() * 1e-7,
        com: Vector3::zeros(),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    };
    let contacts = collide_bodies(
        &cube,
        &Pose::from_translation(Vector3::new(0.0, 0.0, 9.95e-3)),
        &slab,
        &Pose::IDENTITY,
    );
    assert!(
        contacts.len() >= 3,
        "face-face should spread to >= 3 points, got {}",
        contacts.len()
    );
    for c in &contacts {
        assert_relative_eq!(c.depth, 0.05e-3, epsilon = 1e-6);
        assert_relative_eq!(c.normal.z, -1.0, epsilon = 1e-9);
    }
    // Manifold points must not be concentrated: lateral spread across the
    // whole 10 mm face.
    let min_x = contacts.iter().map(|c| c.point.x).fold(f64::INFINITY, f64::min);
    let max_x = contacts.iter().map(|c| c.point.x).fold(f64::NEG_INFINITY, f64::max);
    assert!(max_x - min_x > 8e-3, "spread {}", max_x - min_x);
}

#[test]
fn tilted_edge_contact_produces_a_line_manifold() {
    // Cube tilted 7.5 deg about y, its low edge sunk into the slab.
    let slab = ConvexPart::cuboid("slab", Vector3::new(50e-3, 50e-3, 5e-3), Pose::IDENTITY);
    let cube = ConvexPart::cuboid("cube", Vector3::new(5e-3, 5e-3, 5e-3), Pose::IDENTITY);
    let slab_body = BodyModel {
        name: "slab".into(),
        parts: vec![slab],
        mass: 1.0,
        inertia: Matrix3::identity() * 1e-3,
        com: Vector3::zeros(),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    };
    let cube_body = BodyModel {
        name: "cube".into(),
        parts: vec![cube],
        mass: 0.01,
        inertia: Matrix3::identity() * 1e-7,
        com: Vector3::zeros(),
        friction_tangential: 0.2,
        friction_torsional: 0.01,
    };
    let tilt = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), -7.5f64.to_radians());
    // Low edge sits 5.61 mm below the cube center when tilted; place the
    // center so that edge penetrates ~0.1 mm into the slab top (z = 5 mm).
    let pose = Pose::new(Vector3::new(0.0, 0.0, 10.51e-3), tilt);
    let contacts = collide_bodies(&cube_body, &pose, &slab_body, &Pose::IDENTITY);
    assert!(
        contacts.len() >= 2,
        "edge contact should produce a 2-point line manifold, got {contacts:?}"
    );
    let min_y = contacts.iter().map(|c| c.point.y).fold(f64::INFINITY, f64::min);
    let max_y = contacts.iter().map(|c| c.point.y).fold(f64::NEG_INFINITY, f64::max);
    assert!(max_y - min_y > 8e-3, "line spread {}", max_y - min_y);
}

#[test]
fn cylinder_parts_are_convex() {
    let cyl = ConvexPart::cylinder("cyl", 5e-3, 10e-3, CYLINDER_FACETS, Pose::IDENTITY);
    assert_eq!(cyl.vertices.len(), 2 * CYLINDER_FACETS);
    assert!(validate_convexity(&cyl).unwrap());
}

#[test]
fn body_validation_rejects_bad_mass_and_inertia() {
    let mut body = peg();
    body.mass = 0.0;
    assert!(matches!(
        body.validate(),
        Err(GeometryError::NonPositiveMass { .. })
    ));
    let mut body = peg();
    body.inertia[(0, 0)] = -1.0;
    assert!(matches!(body.validate(), Err(GeometryError::BadInertia { .. })));
}
