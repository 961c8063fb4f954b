//! Pyramid (PR) and truncated-pyramid (TPR) angle-diversity receivers.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{rotate_direction, Orientation, PdAngles, Vec3};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdrKind {
    /// Ring of identical tilted PDs.
    #[serde(rename = "PR")]
    Pyramid,
    /// Ring of tilted PDs plus one upward-facing central PD.
    #[serde(rename = "TPR")]
    TruncatedPyramid,
}

impl AdrKind {
    pub fn label(self) -> &'static str {
        match self {
            AdrKind::Pyramid => "PR",
            AdrKind::TruncatedPyramid => "TPR",
        }
    }

    pub fn min_pds(self) -> usize {
        match self {
            AdrKind::Pyramid => 3,
            AdrKind::TruncatedPyramid => 4,
        }
    }

    /// Number of tilted PDs on the ring.
    pub fn side_count(self, n_pd: usize) -> usize {
        match self {
            AdrKind::Pyramid => n_pd,
            AdrKind::TruncatedPyramid => n_pd - 1,
        }
    }
}

impl std::str::FromStr for AdrKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PR" | "PYRAMID" => Ok(AdrKind::Pyramid),
            "TPR" | "TRUNCATED" | "TRUNCATED_PYRAMID" => Ok(AdrKind::TruncatedPyramid),
            _ => Err(invalid(
                "adr.kind",
                format!("unknown receiver kind `{s}` (PR|TPR)"),
            )),
        }
    }
}

impl std::fmt::Display for AdrKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AdrLayout<T: Real> {
    pub kind: AdrKind,
    pub n_pd: usize,
    /// Per-PD field of view.
    pub psi_c: T,
    /// Elevation of the side PDs for an upward-facing device.
    pub theta_pd: T,
    pub ring_radius: T,
    /// Physical area summed over all PDs.
    pub total_area: T,
}

/// One photodiode relative to the device, before any device rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PdSpec<T: Real> {
    /// 1-based; for a TPR the central PD is the last one.
    pub index: usize,
    pub offset: Vec3<T>,
    pub vert_angles: PdAngles<T>,
}

/// World-frame pose of one PD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPose<T: Real> {
    pub position: Vec3<T>,
    pub normal: Vec3<T>,
}

impl<T: Real> AdrLayout<T> {
    pub fn new(
        kind: AdrKind,
        n_pd: usize,
        psi_c: T,
        theta_pd: T,
        ring_radius: T,
        total_area: T,
    ) -> Result<Self> {
        if n_pd < kind.min_pds() {
            return Err(Error::InvalidLayout(format!(
                "{kind} needs at least {} PDs, got {n_pd}",
                kind.min_pds()
            )));
        }
        if !(psi_c > T::zero()) || psi_c > T::FRAC_PI_2() {
            return Err(Error::InvalidLayout(format!(
                "psi_c must lie in (0, 90] degrees, got {:.4}",
                psi_c.to_deg()
            )));
        }
        if !(theta_pd >= T::zero()) || theta_pd > T::FRAC_PI_2() {
            return Err(Error::InvalidLayout(
                "theta_pd must lie in [0, 90] degrees".into(),
            ));
        }
        if !(total_area > T::zero()) {
            return Err(Error::InvalidLayout(
                "total PD area must be positive".into(),
            ));
        }
        if !(ring_radius >= T::zero()) {
            return Err(Error::InvalidLayout(
                "ring radius must be non-negative".into(),
            ));
        }
        Ok(Self {
            kind,
            n_pd,
            psi_c,
            theta_pd,
            ring_radius,
            total_area,
        })
    }

    /// Layout whose side-PD elevation spends the rest of a total FOV budget:
    /// `theta_pd = psi_total - psi_c`.
    pub fn from_budget(
        kind: AdrKind,
        n_pd: usize,
        psi_c: T,
        psi_total: T,
        ring_radius: T,
        total_area: T,
    ) -> Result<Self> {
        if psi_c > psi_total {
            return Err(invalid("psi_c", "per-PD FOV exceeds the total FOV budget"));
        }
        Self::new(
            kind,
            n_pd,
            psi_c,
            psi_total - psi_c,
            ring_radius,
            total_area,
        )
    }

    pub fn psi_total(&self) -> T {
        self.psi_c + self.theta_pd
    }

    pub fn pd_area(&self) -> T {
        self.total_area / T::of(self.n_pd as f64)
    }

    pub fn side_count(&self) -> usize {
        self.kind.side_count(self.n_pd)
    }

    /// PD offsets and upward-device angles: side PDs uniformly on a ring of radius `r`,
    /// and for a TPR the central PD last with zero offset and zero elevation.
    pub fn pds(&self) -> Vec<PdSpec<T>> {
        let sides = self.side_count();
        let step = T::TAU() / T::of(sides as f64);
        let mut out: Vec<PdSpec<T>> = (0..sides)
            .map(|p| {
                let az = step * T::of(p as f64);
                let (s, c) = az.sin_cos();
                PdSpec {
                    index: p + 1,
                    offset: Vec3::new(self.ring_radius * c, self.ring_radius * s, T::zero()),
                    vert_angles: PdAngles::new(self.theta_pd, az),
                }
            })
            .collect();
        if self.kind == AdrKind::TruncatedPyramid {
            out.push(PdSpec {
                index: self.n_pd,
                offset: Vec3::zero(),
                vert_angles: PdAngles::new(T::zero(), T::zero()),
            });
        }
        out
    }

    /// World poses of every PD for a device at `ue_pos` with orientation `o`.
    ///
    /// Offsets are not rotated with the device. With `collocate` all PDs sit at `ue_pos`.
    pub fn world_poses(
        &self,
        ue_pos: Vec3<T>,
        o: Orientation<T>,
        collocate: bool,
    ) -> Vec<PdPose<T>> {
        pd_world_poses(&self.pds(), ue_pos, o, collocate)
    }
}

/// Builds the layout and its PD list in one go.
pub fn build_layout<T: Real>(
    kind: AdrKind,
    n_pd: usize,
    psi_c: T,
    theta_pd: T,
    ring_radius: T,
    total_area: T,
) -> Result<(AdrLayout<T>, Vec<PdSpec<T>>)> {
    let layout = AdrLayout::new(kind, n_pd, psi_c, theta_pd, ring_radius, total_area)?;
    let pds = layout.pds();
    Ok((layout, pds))
}

pub fn pd_world_poses<T: Real>(
    pds: &[PdSpec<T>],
    ue_pos: Vec3<T>,
    o: Orientation<T>,
    collocate: bool,
) -> Vec<PdPose<T>> {
    pds.iter()
        .map(|pd| PdPose {
            position: if collocate {
                ue_pos
            } else {
                ue_pos + pd.offset
            },
            normal: rotate_direction(pd.vert_angles.normal(), o),
        })
        .collect()
}

/// Physical constants of the PD front end that set its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BandwidthModel<T: Real> {
    /// Load resistance, Ω.
    pub r_load: T,
    /// Vacuum permittivity, F/m.
    pub eps0: T,
    /// Relative permittivity of silicon.
    pub eps_r: T,
    /// Hole velocity, m/s.
    pub v_p: T,
}

impl<T: Real> Default for BandwidthModel<T> {
    fn default() -> Self {
        Self {
            r_load: T::of(50.0),
            eps0: T::of(8.854e-12),
            eps_r: T::of(11.68),
            v_p: T::of(4.8e4),
        }
    }
}

/// Depletion-layer thickness of a PD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thickness<T: Real> {
    /// The thickness maximizing the bandwidth for the given area.
    Optimal,
    Fixed(T),
}

impl<T: Real> BandwidthModel<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("bandwidth.r_load_ohm", self.r_load),
            ("bandwidth.eps0", self.eps0),
            ("bandwidth.eps_r", self.eps_r),
            ("bandwidth.hole_velocity", self.v_p),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be strictly positive"));
            }
        }
        Ok(())
    }

    /// `sqrt(0.886 π R ε0 εr A v)`
    pub fn optimal_thickness(&self, area: T) -> T {
        (T::of(0.886) * T::PI() * self.r_load * self.eps0 * self.eps_r * area * self.v_p).sqrt()
    }

    /// Copy of the model with `r_load` chosen so that a PD of `area` at optimal thickness
    /// reaches `target_hz`.
    pub fn calibrated(&self, area: T, target_hz: T) -> Result<Self> {
        if !(area > T::zero()) {
            return Err(invalid("area", "must be positive"));
        }
        if !(target_hz > T::zero()) {
            return Err(invalid("target bandwidth", "must be positive"));
        }
        // At optimal thickness B^2 = 0.886 v / (8 π R ε A).
        let r = T::of(0.886) * self.v_p
            / (T::of(8.0) * T::PI() * self.eps0 * self.eps_r * area * target_hz * target_hz);
        Ok(Self { r_load: r, ..*self })
    }
}

/// RC- and transit-time-limited bandwidth of a PD with area `area_pd`, Hz.
pub fn receiver_bandwidth<T: Real>(
    area_pd: T,
    bw: &BandwidthModel<T>,
    thickness: Thickness<T>,
) -> Result<T> {
    if !(area_pd > T::zero()) {
        return Err(invalid("area_pd", "PD area must be positive"));
    }
    let l = match thickness {
        Thickness::Optimal => bw.optimal_thickness(area_pd),
        Thickness::Fixed(l) if l > T::zero() => l,
        Thickness::Fixed(_) => return Err(invalid("l_p", "thickness must be positive")),
    };
    let (rc, transit) = bandwidth_terms(area_pd, bw, l);
    Ok(T::one() / (rc * rc + transit * transit).sqrt())
}

/// The RC and transit-time terms under the square root, before squaring.
pub fn bandwidth_terms<T: Real>(area_pd: T, bw: &BandwidthModel<T>, l_p: T) -> (T, T) {
    let c_r = bw.eps0 * bw.eps_r * area_pd / l_p;
    let rc = T::TAU() * bw.r_load * c_r;
    let transit = l_p / (T::of(0.443) * bw.v_p);
    (rc, transit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn pyramid_azimuths_are_quarter_turns() {
        let (_, pds) = build_layout(AdrKind::Pyramid, 4, deg(30.0), deg(30.0), 0.01, 1e-4).unwrap();
        let az: Vec<f64> = pds
            .iter()
            .map(|p| p.vert_angles.azimuth.to_degrees())
            .collect();
        for (a, want) in az.iter().zip([0.0, 90.0, 180.0, 270.0]) {
            assert!((a - want).abs() < 1e-12);
        }
        assert!((pds[1].offset.y - 0.01).abs() < 1e-15);
    }

    #[test]
    fn truncated_pyramid_nine() {
        let (l, pds) = build_layout(
            AdrKind::TruncatedPyramid,
            9,
            deg(20.0),
            deg(40.0),
            0.01,
            1e-4,
        )
        .unwrap();
        assert_eq!(pds.len(), 9);
        assert_eq!(l.side_count(), 8);
        for w in pds[..8].windows(2) {
            let d = w[1].vert_angles.azimuth - w[0].vert_angles.azimuth;
            assert!((d - std::f64::consts::TAU / 8.0).abs() < 1e-12);
        }
        let c = pds[8];
        assert_eq!(c.index, 9);
        assert_eq!(c.offset, Vec3::zero());
        assert_eq!(c.vert_angles.elevation, 0.0);
    }

    #[test]
    fn equal_split_of_area() {
        let l = AdrLayout::new(AdrKind::Pyramid, 3, deg(30.0), deg(30.0), 0.01, 1e-4).unwrap();
        assert!((l.pd_area() - 3.333_333e-5).abs() < 1e-10);
        for n in 3..=15 {
            let l = AdrLayout::new(AdrKind::Pyramid, n, deg(30.0), deg(30.0), 0.01, 1e-4).unwrap();
            let s: f64 = (0..n).map(|_| l.pd_area()).sum();
            assert!((s - 1e-4).abs() < 1e-18);
        }
    }

    #[test]
    fn layout_errors() {
        assert!(AdrLayout::new(
            AdrKind::TruncatedPyramid,
            3,
            deg(20.0),
            deg(40.0),
            0.0,
            1e-4
        )
        .is_err());
        assert!(AdrLayout::new(AdrKind::Pyramid, 2, deg(20.0), deg(40.0), 0.0, 1e-4).is_err());
        assert!(AdrLayout::new(AdrKind::Pyramid, 4, 0.0, deg(40.0), 0.0, 1e-4).is_err());
        assert!(AdrLayout::new(AdrKind::Pyramid, 4, -0.1, deg(40.0), 0.0, 1e-4).is_err());
        assert!(AdrLayout::<f64>::from_budget(
            AdrKind::Pyramid,
            4,
            deg(70.0),
            deg(60.0),
            0.0,
            1e-4
        )
        .is_err());
    }

    #[test]
    fn budget_split() {
        let l = AdrLayout::from_budget(
            AdrKind::TruncatedPyramid,
            6,
            deg(25.0),
            deg(60.0),
            0.01,
            1e-4,
        )
        .unwrap();
        assert!((l.theta_pd + l.psi_c - deg(60.0)).abs() < 1e-15);
    }

    #[test]
    fn poses_vertical_and_rotated() {
        let l = AdrLayout::new(
            AdrKind::TruncatedPyramid,
            9,
            deg(20.0),
            deg(40.0),
            0.01,
            1e-4,
        )
        .unwrap();
        let ue = Vec3::new(1.0, 2.0, 0.85);
        let poses = l.world_poses(ue, Orientation::vertical(), true);
        for (pose, pd) in poses.iter().zip(l.pds()) {
            assert!((pose.normal - pd.vert_angles.normal()).norm() < 1e-15);
            assert_eq!(pose.position, ue);
        }
        let o = Orientation::from_degrees(33.0, 250.0);
        let poses = l.world_poses(ue, o, false);
        assert!((poses[8].normal - o.device_normal()).norm() < 1e-12);
        assert!((poses[0].position - (ue + Vec3::new(0.01, 0.0, 0.0))).norm() < 1e-15);
    }

    #[test]
    fn rotated_pyramid_normals_distinct() {
        let l = AdrLayout::new(AdrKind::Pyramid, 8, deg(30.0), deg(30.0), 0.01, 1e-4).unwrap();
        let poses = l.world_poses(Vec3::zero(), Orientation::from_degrees(41.39, 90.0), true);
        for (i, a) in poses.iter().enumerate() {
            assert!((a.normal.norm() - 1.0).abs() < 1e-12);
            for b in &poses[i + 1..] {
                assert!((a.normal - b.normal).norm() > 1e-3);
            }
        }
    }

    #[test]
    fn optimal_thickness_balances_terms() {
        let bw = BandwidthModel::<f64>::default();
        for area in [1e-6, 3.3e-5, 1e-4] {
            let l = bw.optimal_thickness(area);
            let (rc, tr) = bandwidth_terms(area, &bw, l);
            assert!(((rc * rc) / (tr * tr) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn halving_area_gains_root_two() {
        let bw = BandwidthModel::<f64>::default();
        let b1 = receiver_bandwidth(1e-4 / 3.0, &bw, Thickness::Optimal).unwrap();
        let b2 = receiver_bandwidth(0.5e-4 / 3.0, &bw, Thickness::Optimal).unwrap();
        assert!((b2 / b1 - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn calibration_hits_anchor_values() {
        let bw = BandwidthModel::<f64>::default()
            .calibrated(1e-4 / 3.0, 150e6)
            .unwrap();
        let b3 = receiver_bandwidth(1e-4 / 3.0, &bw, Thickness::Optimal).unwrap();
        let b15 = receiver_bandwidth(1e-4 / 15.0, &bw, Thickness::Optimal).unwrap();
        assert!((b3 - 150e6).abs() / 150e6 < 1e-9);
        assert!((b15 - 350e6).abs() / 350e6 < 0.2);
        assert!(bw.r_load > 10.0 && bw.r_load < 50.0);
    }

    #[test]
    fn bandwidth_errors() {
        let bw = BandwidthModel::<f64>::default();
        assert!(receiver_bandwidth(0.0, &bw, Thickness::Optimal).is_err());
        assert!(receiver_bandwidth(-1.0, &bw, Thickness::Optimal).is_err());
        assert!(receiver_bandwidth(1e-5, &bw, Thickness::Fixed(0.0)).is_err());
    }

    proptest! {
        #[test]
        fn optimum_dominates_fixed(area in 1e-6..1e-3f64, scale in 0.05..20.0f64) {
            let bw = BandwidthModel::<f64>::default();
            let best = receiver_bandwidth(area, &bw, Thickness::Optimal).unwrap();
            let l = bw.optimal_thickness(area) * scale;
            let other = receiver_bandwidth(area, &bw, Thickness::Fixed(l)).unwrap();
            prop_assert!(best >= other * (1.0 - 1e-12));
        }

        #[test]
        fn bandwidth_decreases_with_area(a in 1e-6..1e-3f64, f in 1.001..5.0f64) {
            let bw = BandwidthModel::<f64>::default();
            let small = receiver_bandwidth(a, &bw, Thickness::Optimal).unwrap();
            let large = receiver_bandwidth(a * f, &bw, Thickness::Optimal).unwrap();
            prop_assert!(large < small);
        }
    }
}
