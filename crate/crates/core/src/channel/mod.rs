//! Line-of-sight and diffuse (multi-bounce) DC channel gains.
//!
//! The diffuse part follows the frequency-domain transfer-matrix method evaluated at DC:
//! `H_diff = r^T G (I - H G)^{-1} t`, where `t` holds source-to-element gains, `H` the
//! element-to-element gains, `G` the element reflectivities and `r` the element-to-receiver
//! gains. The kernel `G (I - H G)^{-1} t` depends only on the room and the sources, so it is
//! solved once and each receiver query is a single dot product.

mod cache;
mod linalg;
mod mesh;
mod operators;

pub use cache::{load_operators, operator_cache_key, save_operators, CACHE_VERSION};
pub use linalg::LuFactorization;
pub use mesh::{build_mesh, Face, Room, SurfaceElement, SurfaceMesh, DEFAULT_MAX_ELEMENTS};
pub use operators::{
    assemble_operators, diffuse_gain, diffuse_gain_truncated, receiver_vector, ChannelModel,
    ReflectionMode, TransferOperators,
};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// Lambertian order for a half-power semi-angle: `-ln 2 / ln cos(half_angle)`.
pub fn lambert_order<T: Real>(half_angle: T) -> Result<T> {
    let c = half_angle.cos();
    if !(half_angle > T::zero()) || !(c > T::zero()) {
        return Err(invalid("half_power_angle", "must lie in (0, 90) degrees"));
    }
    Ok(-T::LN_2() / c.ln())
}

/// Downward- or arbitrarily-facing Lambertian emitter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Source<T: Real> {
    pub position: Vec3<T>,
    pub normal: Vec3<T>,
    pub lambert_m: T,
    /// Optical power, W.
    pub power: T,
}

impl<T: Real> Source<T> {
    pub fn new(position: Vec3<T>, normal: Vec3<T>, lambert_m: T, power: T) -> Result<Self> {
        let normal = normal
            .normalized()
            .ok_or_else(|| invalid("source.normal", "zero vector"))?;
        if !(power > T::zero()) {
            return Err(invalid("source.power", "must be positive"));
        }
        if !(lambert_m >= T::zero()) {
            return Err(invalid("source.lambert_m", "must be non-negative"));
        }
        Ok(Self {
            position,
            normal,
            lambert_m,
            power,
        })
    }

    /// Ceiling luminaire facing straight down.
    pub fn ceiling(position: Vec3<T>, half_angle: T, power: T) -> Result<Self> {
        Self::new(
            position,
            Vec3::new(T::zero(), T::zero(), -T::one()),
            lambert_order(half_angle)?,
            power,
        )
    }
}

/// A single PD with concentrator and optical filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OpticalRx<T: Real> {
    pub position: Vec3<T>,
    pub normal: Vec3<T>,
    /// Physical PD area, m².
    pub area: T,
    /// Field of view of PD plus concentrator.
    pub psi_c: T,
    /// Refractive index of the concentrator.
    pub n_ref: T,
    /// Optical filter gain.
    pub t_s: T,
}

impl<T: Real> OpticalRx<T> {
    pub fn new(
        position: Vec3<T>,
        normal: Vec3<T>,
        area: T,
        psi_c: T,
        n_ref: T,
        t_s: T,
    ) -> Result<Self> {
        if !(psi_c > T::zero()) || psi_c > T::FRAC_PI_2() {
            return Err(invalid("psi_c", "must lie in (0, 90] degrees"));
        }
        if !(area > T::zero()) {
            return Err(invalid("area", "must be positive"));
        }
        Ok(Self {
            position,
            normal,
            area,
            psi_c,
            n_ref,
            t_s,
        })
    }

    /// `T_s n^2 / sin^2(psi_c)`
    pub fn optical_gain(&self) -> T {
        let s = self.psi_c.sin();
        self.t_s * self.n_ref * self.n_ref / (s * s)
    }

    pub(crate) fn aperture(&self) -> Aperture<T> {
        Aperture {
            position: self.position,
            normal: self.normal,
            area: self.area,
            cos_fov: self.psi_c.cos(),
            gain: self.optical_gain(),
        }
    }
}

/// Receiving side of one Lambertian link.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Aperture<T: Real> {
    pub position: Vec3<T>,
    pub normal: Vec3<T>,
    pub area: T,
    pub cos_fov: T,
    pub gain: T,
}

/// `(m+1)/(2π d²) A g cos^m(φ) cos(ψ)`, zero when `φ > π/2` or `ψ` exceeds the FOV.
#[inline]
pub(crate) fn lambertian_link<T: Real>(
    tx_pos: Vec3<T>,
    tx_normal: Vec3<T>,
    m: T,
    rx: &Aperture<T>,
) -> Result<T> {
    let d = rx.position - tx_pos;
    let d2 = d.norm_sq();
    if !(d2 > T::zero()) {
        return Err(crate::error::Error::DegenerateLink);
    }
    Ok(lambertian_link_unchecked(d, d2, tx_normal, m, rx))
}

#[inline]
pub(crate) fn lambertian_link_unchecked<T: Real>(
    d: Vec3<T>,
    d2: T,
    tx_normal: Vec3<T>,
    m: T,
    rx: &Aperture<T>,
) -> T {
    let dist = d2.sqrt();
    let cos_phi = tx_normal.dot(d) / dist;
    let cos_psi = -rx.normal.dot(d) / dist;
    if cos_phi <= T::zero() || cos_psi < rx.cos_fov || cos_psi <= T::zero() {
        return T::zero();
    }
    let emit = if m == T::one() {
        cos_phi
    } else {
        cos_phi.powf(m)
    };
    (m + T::one()) / (T::TAU() * d2) * rx.area * rx.gain * emit * cos_psi
}

/// Direct-path DC gain between a Lambertian source and a PD.
pub fn los_gain<T: Real>(src: &Source<T>, rx: &OpticalRx<T>) -> Result<T> {
    lambertian_link(src.position, src.normal, src.lambert_m, &rx.aperture())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rx_at(pos: Vec3<f64>, normal: Vec3<f64>, area: f64, fov_deg: f64) -> OpticalRx<f64> {
        OpticalRx::new(pos, normal, area, fov_deg.to_radians(), 1.5, 1.0).unwrap()
    }

    #[test]
    fn lambert_order_of_sixty_degrees_is_one() {
        let m = lambert_order(60f64.to_radians()).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        assert!(lambert_order(0.0f64).is_err());
    }

    #[test]
    fn boresight_gain_matches_hand_evaluation() {
        let src = Source::ceiling(Vec3::new(0.0, 0.0, 3.0), 60f64.to_radians(), 10.0).unwrap();
        let rx = rx_at(Vec3::new(0.0, 0.0, 0.85), Vec3::unit_z(), 1e-4, 60.0);
        let g = los_gain(&src, &rx).unwrap();
        let want = 2.0 / (2.0 * std::f64::consts::PI * 2.15 * 2.15) * 1e-4 * (2.25 / 0.75);
        assert!((g - want).abs() / want < 1e-12);
        assert!((g - 2.066e-5).abs() < 1e-8);
    }

    #[test]
    fn outside_fov_is_dark() {
        let src = Source::ceiling(Vec3::new(0.0, 0.0, 3.0), 60f64.to_radians(), 10.0).unwrap();
        // AP seen 61 degrees off the PD normal.
        let x = 2.15 * 61f64.to_radians().tan();
        let rx = rx_at(Vec3::new(x, 0.0, 0.85), Vec3::unit_z(), 1e-4, 60.0);
        assert_eq!(los_gain(&src, &rx).unwrap(), 0.0);
        let rx = rx_at(Vec3::new(x, 0.0, 0.85), Vec3::unit_z(), 1e-4, 62.0);
        assert!(los_gain(&src, &rx).unwrap() > 0.0);
    }

    #[test]
    fn behind_the_source_is_dark() {
        let src = Source::ceiling(Vec3::new(0.0, 0.0, 3.0), 60f64.to_radians(), 10.0).unwrap();
        let rx = rx_at(Vec3::new(0.0, 0.0, 3.5), -Vec3::unit_z(), 1e-4, 90.0);
        assert_eq!(los_gain(&src, &rx).unwrap(), 0.0);
    }

    #[test]
    fn linear_in_area() {
        let src = Source::ceiling(Vec3::new(1.0, 2.0, 3.0), 60f64.to_radians(), 10.0).unwrap();
        let a = rx_at(Vec3::new(0.3, 1.5, 0.85), Vec3::unit_z(), 1e-4, 60.0);
        let b = OpticalRx { area: 2e-4, ..a };
        let (ga, gb) = (los_gain(&src, &a).unwrap(), los_gain(&src, &b).unwrap());
        assert!((gb - 2.0 * ga).abs() < 1e-18);
    }

    #[test]
    fn coincident_points_error() {
        let src = Source::ceiling(Vec3::new(0.0, 0.0, 3.0), 60f64.to_radians(), 10.0).unwrap();
        let rx = rx_at(Vec3::new(0.0, 0.0, 3.0), Vec3::unit_z(), 1e-4, 60.0);
        assert!(los_gain(&src, &rx).is_err());
    }
}
