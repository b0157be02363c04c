//! Rigid-body pose math and small shared linear-algebra helpers.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};

/// A rigid-body pose: position plus orientation, both in the parent frame.
///
/// Compositions renormalize the quaternion so that orientation norm stays
/// within 1e-9 of unity no matter how many poses are chained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    /// Position of the child origin in the parent frame (m).
    pub position: Vector3<f64>,
    /// Orientation of the child frame in the parent frame.
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        position: Vector3::new(0.0, 0.0, 0.0),
        orientation: UnitQuaternion::new_unchecked(Quaternion::new(1.0, 0.0, 0.0, 0.0)),
    };

    pub fn new(position: Vector3<f64>, orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position,
            orientation,
        }
    }

    pub fn from_translation(position: Vector3<f64>) -> Self {
        Self {
            position,
            orientation: UnitQuaternion::identity(),
        }
    }

    pub fn from_rotation(orientation: UnitQuaternion<f64>) -> Self {
        Self {
            position: Vector3::zeros(),
            orientation,
        }
    }

    /// `self ∘ other`: first apply `other` in the child frame, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        let q = self.orientation.into_inner() * other.orientation.into_inner();
        Pose {
            position: self.position + self.orientation * other.position,
            orientation: UnitQuaternion::new_normalize(q),
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.orientation.inverse();
        Pose {
            position: -(inv * self.position),
            orientation: inv,
        }
    }

    /// Map a point from the child frame into the parent frame.
    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.position + self.orientation * p
    }

    /// Rotate a direction from the child frame into the parent frame.
    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.orientation * v
    }

    /// Inverse-rotate a direction from the parent frame into the child frame.
    pub fn rotate_inv(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.orientation.inverse_transform_vector(v)
    }

    /// Positional distance to another pose (m).
    pub fn position_error(&self, other: &Pose) -> f64 {
        (self.position - other.position).norm()
    }

    /// Angle of the relative rotation to another pose (rad).
    pub fn rotation_error(&self, other: &Pose) -> f64 {
        self.orientation.angle_to(&other.orientation)
    }

    /// Linear interpolation of position plus slerp of orientation.
    ///
    /// `t` outside `[0, 1]` is clamped; `t = 1` lands exactly on `target`.
    pub fn interpolate_towards(&self, target: &Pose, t: f64) -> Pose {
        let t = t.clamp(0.0, 1.0);
        if t >= 1.0 {
            return *target;
        }
        let orientation = self
            .orientation
            .try_slerp(&target.orientation, t, 1e-12)
            .unwrap_or(target.orientation);
        Pose {
            position: self.position + (target.position - self.position) * t,
            orientation,
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::IDENTITY
    }
}

/// A six-component force/torque pair, world frame, about a stated point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub const ZERO: Wrench = Wrench {
        force: Vector3::new(0.0, 0.0, 0.0),
        torque: Vector3::new(0.0, 0.0, 0.0),
    };

    /// Re-express the wrench about a new reference point.
    ///
    /// The force is unchanged; the torque picks up the moment of the force
    /// over the arm from the new point to the old one.
    pub fn shift_to(&self, from: &Vector3<f64>, to: &Vector3<f64>) -> Wrench {
        Wrench {
            force: self.force,
            torque: self.torque + (from - to).cross(&self.force),
        }
    }
}

impl core::ops::Add for Wrench {
    type Output = Wrench;
    fn add(self, rhs: Wrench) -> Wrench {
        Wrench {
            force: self.force + rhs.force,
            torque: self.torque + rhs.torque,
        }
    }
}

impl core::ops::AddAssign for Wrench {
    fn add_assign(&mut self, rhs: Wrench) {
        self.force += rhs.force;
        self.torque += rhs.torque;
    }
}
