//! Vectors, device rotation and incidence angles.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{acos_clamped, wrap_two_pi, Real};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Vec3<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    /// Unit vector from elevation (angle from +z) and azimuth (angle from +x in the xy-plane).
    pub fn from_spherical(elevation: T, azimuth: T) -> Self {
        let (se, ce) = elevation.sin_cos();
        let (sa, ca) = azimuth.sin_cos();
        Self::new(se * ca, se * sa, ce)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.norm_sq().sqrt()
    }

    /// Returns the unit vector, or `None` for a zero vector.
    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        if n > T::zero() && n.is_finite() {
            Some(self * (T::one() / n))
        } else {
            None
        }
    }

    pub fn map<U: Real>(self, f: impl Fn(T) -> U) -> Vec3<U> {
        Vec3::new(f(self.x), f(self.y), f(self.z))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

/// Device orientation: elevation `theta` in [0, π/2] tilts the device normal away from +z,
/// azimuth `omega` in [0, 2π) turns the tilted device about +z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Orientation<T: Real> {
    pub theta: T,
    pub omega: T,
}

impl<T: Real> Orientation<T> {
    pub fn new(theta: T, omega: T) -> Self {
        Self { theta, omega }
    }

    pub fn from_degrees(theta: f64, omega: f64) -> Self {
        Self::new(T::deg(theta), T::deg(omega))
    }

    /// Upward-facing device.
    pub fn vertical() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Normal of the device after rotation.
    pub fn device_normal(&self) -> Vec3<T> {
        rotate_direction(Vec3::unit_z(), *self)
    }
}

/// Elevation in [0, π] and azimuth in [0, 2π) of a photodiode normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PdAngles<T: Real> {
    pub elevation: T,
    pub azimuth: T,
}

impl<T: Real> PdAngles<T> {
    pub fn new(elevation: T, azimuth: T) -> Self {
        Self { elevation, azimuth }
    }

    pub fn normal(&self) -> Vec3<T> {
        Vec3::from_spherical(self.elevation, self.azimuth)
    }
}

/// Applies `R(omega) R(theta)` to `n`: a rotation about +y by `theta` followed by one about +z
/// by `omega`.
pub fn rotate_direction<T: Real>(n: Vec3<T>, o: Orientation<T>) -> Vec3<T> {
    let (st, ct) = o.theta.sin_cos();
    let (sw, cw) = o.omega.sin_cos();
    // about y
    let x1 = ct * n.x + st * n.z;
    let y1 = n.y;
    let z1 = -st * n.x + ct * n.z;
    // about z
    Vec3::new(cw * x1 - sw * y1, sw * x1 + cw * y1, z1)
}

/// Inverse of [`rotate_direction`]: maps a world direction into the device frame.
pub fn unrotate_direction<T: Real>(d: Vec3<T>, o: Orientation<T>) -> Vec3<T> {
    let (st, ct) = o.theta.sin_cos();
    let (sw, cw) = o.omega.sin_cos();
    let x1 = cw * d.x + sw * d.y;
    let y1 = -sw * d.x + cw * d.y;
    Vec3::new(ct * x1 - st * d.z, y1, st * x1 + ct * d.z)
}

/// Elevation and azimuth of a PD normal after the device is rotated by `o`.
///
/// The azimuth is taken with a four-quadrant arctangent. When the rotated normal is parallel
/// to the z-axis the azimuth is undefined and 0 is returned.
pub fn post_rotation_angles<T: Real>(vert: PdAngles<T>, o: Orientation<T>) -> PdAngles<T> {
    let n = rotate_direction(vert.normal(), o);
    angles_of(n)
}

/// Spherical angles of a unit vector.
pub fn angles_of<T: Real>(n: Vec3<T>) -> PdAngles<T> {
    let elevation = acos_clamped(n.z);
    let horiz = (n.x * n.x + n.y * n.y).sqrt();
    let azimuth = if horiz <= T::epsilon() * T::of(16.0) {
        T::zero()
    } else {
        wrap_two_pi(n.y.atan2(n.x))
    };
    PdAngles::new(elevation, azimuth)
}

/// Angle between `n_pd` and the direction from `p_rx` towards `p_tx`, in [0, π].
pub fn incidence_angle<T: Real>(n_pd: Vec3<T>, p_rx: Vec3<T>, p_tx: Vec3<T>) -> Result<T> {
    let d = p_tx - p_rx;
    let dist = d.norm();
    if !(dist > T::zero()) {
        return Err(Error::DegenerateLink);
    }
    Ok(acos_clamped(n_pd.dot(d) / dist))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: Vec3<f64>, b: Vec3<f64>, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn identity_rotation() {
        let n = Vec3::new(0.0, 0.0, 1.0);
        for w in [0.0, 1.0, 4.0] {
            let r = rotate_direction(n, Orientation::new(0.0, w));
            assert!(close(r, n, 1e-15));
        }
    }

    #[test]
    fn device_normal_matches_closed_form() {
        let (t, w) = (0.7_f64, 2.3_f64);
        let r = rotate_direction(Vec3::unit_z(), Orientation::new(t, w));
        let want = Vec3::new(t.sin() * w.cos(), t.sin() * w.sin(), t.cos());
        assert!(close(r, want, 1e-15));
    }

    #[test]
    fn x_axis_tipped_down() {
        let r = rotate_direction(Vec3::new(1.0, 0.0, 0.0), Orientation::new(FRAC_PI_2, 0.0));
        assert!(close(r, Vec3::new(0.0, 0.0, -1.0), 1e-15));
    }

    #[test]
    fn angles_without_rotation() {
        let v = PdAngles::new(0.6_f64, 1.9);
        let a = post_rotation_angles(v, Orientation::vertical());
        assert!((a.elevation - 0.6).abs() < 1e-12);
        assert!((a.azimuth - 1.9).abs() < 1e-12);
    }

    #[test]
    fn central_pd_follows_device() {
        let (t, w) = (0.4_f64, 5.0_f64);
        let a = post_rotation_angles(PdAngles::new(0.0, 0.0), Orientation::new(t, w));
        assert!((a.elevation - t).abs() < 1e-12);
        assert!((a.azimuth - w).abs() < 1e-12);
    }

    #[test]
    fn coplanar_tilts_add_or_subtract() {
        let o = Orientation::<f64>::from_degrees(41.39, 180.0);
        // PD leaning along +x and device tilted along +x: elevations add.
        let same = post_rotation_angles(PdAngles::new(45f64.to_radians(), 0.0), o);
        assert!((same.elevation.to_degrees() - 86.39).abs() < 1e-9);
        // Closed-form elevation: acos(-C1 sinθ + cosθ cosΘ)
        let (th, big) = (41.39f64.to_radians(), 45f64.to_radians());
        let c1 = big.sin();
        let want = (-c1 * th.sin() + th.cos() * big.cos()).acos();
        assert!((same.elevation - want).abs() < 1e-12);
        // PD leaning against the tilt: elevations subtract.
        let opp = post_rotation_angles(PdAngles::new(45f64.to_radians(), PI), o);
        assert!((opp.elevation.to_degrees() - 3.61).abs() < 1e-9);
    }

    #[test]
    fn incidence_examples() {
        let up: Vec3<f64> = Vec3::unit_z();
        let o = Vec3::zero();
        assert!(
            incidence_angle(up, o, Vec3::new(0.0, 0.0, 2.15))
                .unwrap()
                .abs()
                < 1e-15
        );
        let a = incidence_angle(up, o, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-15);
        let a = incidence_angle(up, Vec3::new(0.0, 0.0, 0.85), Vec3::new(2.0, 0.0, 3.0)).unwrap();
        assert!((a - (2.0f64 / 2.15).atan()).abs() < 1e-12);
        assert!((a - 0.74927).abs() < 1e-5);
        assert_eq!(incidence_angle(up, o, o), Err(Error::DegenerateLink));
    }

    #[test]
    fn single_precision_agrees() {
        let o = Orientation::<f32>::from_degrees(30.0, 60.0);
        let r = rotate_direction(Vec3::<f32>::unit_z(), o);
        assert!((r.z - 30f32.to_radians().cos()).abs() < 1e-6);
    }

    fn unit() -> impl Strategy<Value = Vec3<f64>> {
        (0.0..PI, 0.0..2.0 * PI).prop_map(|(e, a)| Vec3::from_spherical(e, a))
    }

    proptest! {
        #[test]
        fn rotation_is_orthogonal(u in unit(), v in unit(), t in 0.0..FRAC_PI_2, w in 0.0..2.0*PI) {
            let o = Orientation::new(t, w);
            let (ru, rv) = (rotate_direction(u, o), rotate_direction(v, o));
            prop_assert!((ru.dot(rv) - u.dot(v)).abs() < 1e-9);
            prop_assert!((ru.norm() - 1.0).abs() < 1e-9);
            prop_assert!((unrotate_direction(ru, o) - u).norm() < 1e-12);
        }

        #[test]
        fn angles_round_trip(e in 0.0..PI, a in 0.0..2.0*PI, t in 0.0..FRAC_PI_2, w in 0.0..2.0*PI) {
            let o = Orientation::new(t, w);
            let v = PdAngles::new(e, a);
            let direct = rotate_direction(v.normal(), o);
            let rebuilt = post_rotation_angles(v, o).normal();
            prop_assert!((direct - rebuilt).norm() < 1e-9);
        }

        #[test]
        fn incidence_invariant_under_joint_rotation(
            n in unit(), dx in -3.0..3.0f64, dy in -3.0..3.0f64, dz in 0.1..3.0f64,
            t in 0.0..FRAC_PI_2, w in 0.0..2.0*PI,
        ) {
            let o = Orientation::new(t, w);
            let d = Vec3::new(dx, dy, dz);
            let a = incidence_angle(n, Vec3::zero(), d).unwrap();
            let b = incidence_angle(rotate_direction(n, o), Vec3::zero(), rotate_direction(d, o)).unwrap();
            prop_assert!((a - b).abs() < 1e-7);
        }
    }
}
