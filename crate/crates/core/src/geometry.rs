//! Rigid-body geometry over a generic floating point scalar.
//!
//! Everything here is parameterised by [`Scalar`], implemented for `f32` and
//! `f64`. The rest of the crate works on the `f64` aliases exported from the
//! crate root ([`crate::Vec3`], [`crate::Quaternion`], [`crate::Pose6D`]).

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Floating point scalar usable by the geometry and statistics code.
pub trait Scalar: Float + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Tolerance used for unit-norm checks.
    fn norm_tolerance() -> Self;
}

impl Scalar for f32 {
    fn norm_tolerance() -> Self {
        1e-5
    }
}

impl Scalar for f64 {
    fn norm_tolerance() -> Self {
        1e-9
    }
}

#[inline]
fn lit<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("literal representable in scalar")
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vector3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Vector3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zeros() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if !n.is_finite() || n <= T::epsilon() {
            None
        } else {
            Some(self.scale(T::one() / n))
        }
    }

    pub fn distance(&self, o: &Self) -> T {
        (*self - *o).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation, returning `o` exactly at `t == 1`.
    pub fn lerp(&self, o: &Self, t: T) -> Self {
        if t >= T::one() {
            return *o;
        }
        *self + (*o - *self).scale(t)
    }

    /// Some unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(&self) -> Self {
        let ax = self.x.abs();
        let ay = self.y.abs();
        let az = self.z.abs();
        let other = if ax <= ay && ax <= az {
            Self::unit_x()
        } else if ay <= az {
            Self::unit_y()
        } else {
            Self::unit_z()
        };
        self.cross(&other).normalized().unwrap_or_else(Self::unit_x)
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Scalar> Add for Vector3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Vector3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Vector3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Scalar + Serialize> Serialize for Vector3<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Vector3<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[T; 3]>::deserialize(d)?;
        Ok(Self { x, y, z })
    }
}

/// Rotation quaternion stored as (w, x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Default for Quat<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Quat<T> {
    /// Raw constructor; does not normalise.
    pub const fn from_wxyz(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::from_wxyz(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn norm(&self) -> T {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Unit quaternion in the same direction, `None` for zero or non-finite input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if !n.is_finite() || n <= T::epsilon() {
            return None;
        }
        let inv = T::one() / n;
        Some(Self::from_wxyz(self.w * inv, self.x * inv, self.y * inv, self.z * inv))
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - T::one()).abs() <= T::norm_tolerance()
    }

    /// Rotation of `angle` radians about `axis` (normalised internally).
    pub fn from_axis_angle(axis: &Vector3<T>, angle: T) -> Option<Self> {
        let a = axis.normalized()?;
        let half = angle / lit(2.0);
        let s = half.sin();
        Some(Self::from_wxyz(half.cos(), a.x * s, a.y * s, a.z * s))
    }

    /// Shortest-arc rotation taking direction `from` onto direction `to`.
    pub fn rotation_between(from: &Vector3<T>, to: &Vector3<T>) -> Option<Self> {
        let a = from.normalized()?;
        let b = to.normalized()?;
        let d = a.dot(&b);
        if d >= T::one() - T::epsilon() {
            return Some(Self::identity());
        }
        if d <= -T::one() + T::epsilon() {
            let axis = a.any_orthogonal();
            return Some(Self::from_wxyz(T::zero(), axis.x, axis.y, axis.z));
        }
        let c = a.cross(&b);
        Self::from_wxyz(T::one() + d, c.x, c.y, c.z).normalized()
    }

    pub fn conjugate(&self) -> Self {
        Self::from_wxyz(self.w, -self.x, -self.y, -self.z)
    }

    pub fn rotate(&self, v: &Vector3<T>) -> Vector3<T> {
        let u = Vector3::new(self.x, self.y, self.z);
        let two: T = lit(2.0);
        let t = u.cross(v).scale(two);
        *v + t.scale(self.w) + u.cross(&t)
    }

    /// Normalised linear interpolation; exact endpoints at `t` = 0 and 1.
    pub fn nlerp(&self, o: &Self, t: T) -> Self {
        if t <= T::zero() {
            return *self;
        }
        if t >= T::one() {
            return *o;
        }
        let dot = self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z;
        let o = if dot < T::zero() {
            Self::from_wxyz(-o.w, -o.x, -o.y, -o.z)
        } else {
            *o
        };
        let s = T::one() - t;
        Self::from_wxyz(
            self.w * s + o.w * t,
            self.x * s + o.x * t,
            self.y * s + o.y * t,
            self.z * s + o.z * t,
        )
        .normalized()
        .unwrap_or(*self)
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl<T: Scalar> Mul for Quat<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::from_wxyz(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl<T: Scalar + Serialize> Serialize for Quat<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.w, self.x, self.y, self.z].serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Quat<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [w, x, y, z] = <[T; 4]>::deserialize(d)?;
        Ok(Self { w, x, y, z })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum PoseError {
    #[error("position has a non-finite component")]
    NonFinitePosition,
    #[error("orientation quaternion is zero or non-finite")]
    DegenerateOrientation,
}

/// A rigid transform: unit quaternion orientation plus position in meters.
///
/// The orientation is always within the scalar's norm tolerance of unit
/// length; construction normalises any non-zero quaternion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose<T> {
    position: Vector3<T>,
    orientation: Quat<T>,
}

impl<T: Scalar> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Scalar> Pose<T> {
    pub fn new(position: Vector3<T>, orientation: Quat<T>) -> Result<Self, PoseError> {
        if !position.is_finite() {
            return Err(PoseError::NonFinitePosition);
        }
        let orientation = if orientation.is_unit() {
            orientation
        } else {
            orientation
                .normalized()
                .ok_or(PoseError::DegenerateOrientation)?
        };
        if !orientation.w.is_finite() {
            return Err(PoseError::DegenerateOrientation);
        }
        Ok(Self {
            position,
            orientation,
        })
    }

    pub fn identity() -> Self {
        Self {
            position: Vector3::zeros(),
            orientation: Quat::identity(),
        }
    }

    /// Pure translation. Panics on non-finite input.
    pub fn from_translation(position: Vector3<T>) -> Self {
        Self::new(position, Quat::identity()).expect("finite translation")
    }

    pub fn position(&self) -> Vector3<T> {
        self.position
    }

    pub fn orientation(&self) -> Quat<T> {
        self.orientation
    }

    pub fn with_position(&self, position: Vector3<T>) -> Self {
        Self {
            position,
            orientation: self.orientation,
        }
    }

    pub fn transform_point(&self, p: &Vector3<T>) -> Vector3<T> {
        self.orientation.rotate(p) + self.position
    }

    pub fn transform_vector(&self, v: &Vector3<T>) -> Vector3<T> {
        self.orientation.rotate(v)
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let orientation = (self.orientation * other.orientation)
            .normalized()
            .unwrap_or_else(Quat::identity);
        Self {
            position: self.transform_point(&other.position),
            orientation,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.orientation.conjugate();
        Self {
            position: -inv.rotate(&self.position),
            orientation: inv,
        }
    }

    /// Linear position interpolation with normalised quaternion blending.
    pub fn interpolate(&self, other: &Self, t: T) -> Self {
        Self {
            position: self.position.lerp(&other.position, t),
            orientation: self.orientation.nlerp(&other.orientation, t),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PoseRepr<T> {
    position: [T; 3],
    orientation: [T; 4],
}

impl<T: Scalar + Serialize> Serialize for Pose<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PoseRepr {
            position: self.position.to_array(),
            orientation: self.orientation.to_array(),
        }
        .serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for Pose<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PoseRepr::<T>::deserialize(d)?;
        let [x, y, z] = r.position;
        let [qw, qx, qy, qz] = r.orientation;
        Pose::new(Vector3::new(x, y, z), Quat::from_wxyz(qw, qx, qy, qz))
            .map_err(serde::de::Error::custom)
    }
}

/// Infinite line through `point` along unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub point: Vector3<T>,
    pub direction: Vector3<T>,
}

impl<T: Scalar> Axis<T> {
    pub fn transformed(&self, pose: &Pose<T>) -> Self {
        Self {
            point: pose.transform_point(&self.point),
            direction: pose.transform_vector(&self.direction),
        }
    }

    /// Perpendicular distance of `p` from the line.
    pub fn distance_to_point(&self, p: &Vector3<T>) -> T {
        let d = *p - self.point;
        let along = self.direction.scale(d.dot(&self.direction));
        (d - along).norm()
    }

    /// Signed coordinate of `p` projected onto the axis.
    pub fn coordinate_of(&self, p: &Vector3<T>) -> T {
        (*p - self.point).dot(&self.direction)
    }
}

/// Pose mapping `moving` onto `fixed` so the two axes coincide with parallel
/// directions, then shifted by `axial_offset` along the fixed axis.
///
/// The moving axis' reference point lands at
/// `fixed.point + axial_offset * fixed.direction`.
pub fn align_axes<T: Scalar>(moving: &Axis<T>, fixed: &Axis<T>, axial_offset: T) -> Option<Pose<T>> {
    let rotation = Quat::rotation_between(&moving.direction, &fixed.direction)?;
    let rotated = rotation.rotate(&moving.point);
    let dir = fixed.direction.normalized()?;
    let position = fixed.point + dir.scale(axial_offset) - rotated;
    Pose::new(position, rotation).ok()
}
