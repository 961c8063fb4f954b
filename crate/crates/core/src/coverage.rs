//! Ceiling footprints of upward-facing ADRs, the minimum per-PD FOV that keeps at least one
//! AP visible everywhere, and Monte-Carlo visibility checks.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adr::{AdrKind, AdrLayout};
use crate::combining::CellMode;
use crate::error::{invalid, Error, Result};
use crate::geometry::{unrotate_direction, Orientation, Vec3};
use crate::orientation::{sample_rng, OrientationMode, OrientationModel};
use crate::scalar::Real;

/// Footprint of a PD tilted by `theta_pd` towards +x, in ceiling coordinates relative to
/// the point straight above the UE.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EllipseSpec<T: Real> {
    pub a: T,
    pub b: T,
    pub center: (T, T),
}

impl<T: Real> EllipseSpec<T> {
    pub fn point(&self, t: T) -> (T, T) {
        (
            self.center.0 + self.a * t.cos(),
            self.center.1 + self.b * t.sin(),
        )
    }
}

pub fn footprint_ellipse<T: Real>(h: T, psi_c: T, theta_pd: T) -> Result<EllipseSpec<T>> {
    if !(h > T::zero()) {
        return Err(invalid("h", "vertical AP-UE distance must be positive"));
    }
    if !(psi_c > T::zero()) || theta_pd < T::zero() {
        return Err(invalid(
            "psi_c",
            "FOV must be positive and tilt non-negative",
        ));
    }
    if psi_c + theta_pd >= T::FRAC_PI_2() {
        return Err(Error::UnboundedFootprint);
    }
    let two = T::of(2.0);
    let den = (two * psi_c).cos() + (two * theta_pd).cos();
    let a = h * (two * psi_c).sin() / den;
    let b = two.sqrt() * h * psi_c.sin() / den.sqrt();
    let cx = h * (two * theta_pd).sin() / den;
    Ok(EllipseSpec {
        a,
        b,
        center: (cx, T::zero()),
    })
}

/// One PD's visible region on the ceiling plane, relative to the UE's horizontal position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub enum Footprint<T: Real> {
    Ellipse { spec: EllipseSpec<T>, azimuth: T },
    Circle { radius: T },
}

impl<T: Real> Footprint<T> {
    pub fn contains(&self, dx: T, dy: T) -> bool {
        match *self {
            Footprint::Circle { radius } => dx * dx + dy * dy <= radius * radius,
            Footprint::Ellipse { spec, azimuth } => {
                let (s, c) = azimuth.sin_cos();
                let u = (dx * c + dy * s - spec.center.0) / spec.a;
                let v = (-dx * s + dy * c - spec.center.1) / spec.b;
                u * u + v * v <= T::one()
            }
        }
    }

    /// Boundary point at parameter `t` in [0, 2π).
    pub fn boundary_point(&self, t: T) -> (T, T) {
        match *self {
            Footprint::Circle { radius } => (radius * t.cos(), radius * t.sin()),
            Footprint::Ellipse { spec, azimuth } => {
                let (x, y) = spec.point(t);
                let (s, c) = azimuth.sin_cos();
                (x * c - y * s, x * s + y * c)
            }
        }
    }

    pub fn area(&self) -> T {
        match *self {
            Footprint::Circle { radius } => T::PI() * radius * radius,
            Footprint::Ellipse { spec, .. } => T::PI() * spec.a * spec.b,
        }
    }
}

/// Footprints of every PD of an upward-facing receiver, in PD order.
pub fn adr_footprint<T: Real>(layout: &AdrLayout<T>, h: T) -> Result<Vec<Footprint<T>>> {
    layout
        .pds()
        .iter()
        .map(|pd| {
            let el = pd.vert_angles.elevation;
            if el == T::zero() {
                if layout.psi_c >= T::FRAC_PI_2() {
                    return Err(Error::UnboundedFootprint);
                }
                Ok(Footprint::Circle {
                    radius: h * layout.psi_c.tan(),
                })
            } else {
                Ok(Footprint::Ellipse {
                    spec: footprint_ellipse(h, layout.psi_c, el)?,
                    azimuth: pd.vert_angles.azimuth,
                })
            }
        })
        .collect()
}

/// Smallest FOV that leaves no hole straight above the receiver.
pub fn constraint1_min<T: Real>(kind: AdrKind, psi_total: T) -> T {
    match kind {
        AdrKind::Pyramid => psi_total / T::of(2.0),
        AdrKind::TruncatedPyramid => psi_total / T::of(3.0),
    }
}

/// Square grid of cells with one AP (SS) or one antipodal source pair (DS) per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CellLayout<T: Real> {
    pub mode: CellMode,
    pub r_cell: T,
    pub ap_positions: Vec<Vec3<T>>,
    /// Separation of the two sources of a DS AP, along x.
    pub d_source: T,
    /// Vertical AP-to-UE distance.
    pub h: T,
    /// Horizontal extent `[0, width] x [0, length]` users are drawn from.
    pub width: T,
    pub length: T,
}

impl<T: Real> CellLayout<T> {
    /// `nx` by `ny` cells of side `r_cell` starting at the origin, APs at the cell centres
    /// on the plane `z = ceiling_z`.
    pub fn square_grid(
        mode: CellMode,
        nx: usize,
        ny: usize,
        r_cell: T,
        ceiling_z: T,
        h: T,
        d_source: T,
    ) -> Result<Self> {
        let half = r_cell / T::of(2.0);
        let mut ap_positions = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                ap_positions.push(Vec3::new(
                    half + r_cell * T::of(i as f64),
                    half + r_cell * T::of(j as f64),
                    ceiling_z,
                ));
            }
        }
        let cell = Self {
            mode,
            r_cell,
            ap_positions,
            d_source,
            h,
            width: r_cell * T::of(nx as f64),
            length: r_cell * T::of(ny as f64),
        };
        cell.validate()?;
        Ok(cell)
    }

    /// Four 4 m cells under a 3 m ceiling with users 2.15 m below the APs.
    pub fn office(mode: CellMode) -> Self {
        Self::square_grid(mode, 2, 2, T::of(4.0), T::of(3.0), T::of(2.15), T::of(2.0))
            .expect("office layout is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_cell > T::zero()) {
            return Err(invalid("cell.r_cell_m", "must be positive"));
        }
        if !(self.h > T::zero()) {
            return Err(invalid("cell.h_m", "must be positive"));
        }
        if self.ap_positions.is_empty() {
            return Err(invalid("cell", "no access points"));
        }
        if !(self.width > T::zero() && self.length > T::zero()) {
            return Err(invalid("cell", "empty user region"));
        }
        if self.mode == CellMode::DoubleSource
            && !(self.d_source > T::zero() && self.d_source < self.r_cell * T::SQRT_2())
        {
            return Err(invalid(
                "cell.d_source_m",
                "must lie strictly between 0 and r_cell * sqrt(2)",
            ));
        }
        Ok(())
    }

    pub fn ue_height(&self) -> T {
        self.ap_positions[0].z - self.h
    }

    pub fn sources_per_ap(&self) -> usize {
        match self.mode {
            CellMode::SingleSource => 1,
            CellMode::DoubleSource => 2,
        }
    }

    /// Emitter positions grouped per AP; in DS mode the positive source comes first.
    pub fn source_positions(&self) -> Vec<Vec3<T>> {
        let dx = Vec3::new(self.d_source / T::of(2.0), T::zero(), T::zero());
        self.ap_positions
            .iter()
            .flat_map(|&ap| match self.mode {
                CellMode::SingleSource => vec![ap],
                CellMode::DoubleSource => vec![ap + dx, ap - dx],
            })
            .collect()
    }
}

/// Largest horizontal distance a user can be from its nearest emitter.
pub fn dc_min<T: Real>(cell: &CellLayout<T>) -> T {
    let half = cell.r_cell / T::of(2.0);
    match cell.mode {
        CellMode::SingleSource => cell.r_cell * T::SQRT_2() / T::of(2.0),
        CellMode::DoubleSource => {
            let hs = cell.d_source / T::of(2.0);
            if cell.d_source <= half {
                ((half - hs).powi(2) + half * half).sqrt()
            } else {
                (half * half + hs * hs).sqrt()
            }
        }
    }
}

/// Half the azimuth spacing of the side PDs.
pub fn omega_c<T: Real>(kind: AdrKind, n_pd: usize) -> T {
    T::PI() / T::of(kind.side_count(n_pd) as f64)
}

/// Tilt `theta_pd` at which the footprint boundary passes through horizontal distance `d_c`
/// in the direction midway between two side PDs.
pub fn f1<T: Real>(d_c: T, h: T, psi_total: T, omega_c: T) -> T {
    let r = (h * h + d_c * d_c).sqrt();
    let num = r * psi_total.cos() - h;
    let den = d_c * omega_c.cos() - r * psi_total.sin();
    (num / den).atan()
}

/// FOV needed for the boundary to reach `d_c`: `psi_total - f1`.
pub fn f2<T: Real>(d_c: T, h: T, psi_total: T, omega_c: T) -> T {
    psi_total - f1(d_c, h, psi_total, omega_c)
}

/// Maximizer of `f1` on `(0, h tan psi_total]`.
pub fn d_c2<T: Real>(h: T, psi_total: T, omega_c: T) -> T {
    h * omega_c.cos() * psi_total.sin() / (psi_total.cos() + omega_c.sin())
}

fn check_budget<T: Real>(psi_total: T) -> Result<()> {
    if !(psi_total > T::zero() && psi_total < T::FRAC_PI_2()) {
        return Err(invalid("adr.psi_total_deg", "must lie in (0, 90) degrees"));
    }
    Ok(())
}

pub fn constraint2_min<T: Real>(
    cell: &CellLayout<T>,
    kind: AdrKind,
    n_pd: usize,
    psi_total: T,
) -> Result<T> {
    Ok(bound_parts(cell, kind, n_pd, psi_total)?.psi_c2_min)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FovBound<T: Real> {
    pub psi_c1_min: T,
    pub psi_c2_min: T,
    pub psi_c_min: T,
    pub d_c_min: T,
    pub d_c2: T,
    pub omega_c: T,
}

impl<T: Real> FovBound<T> {
    /// Smallest whole degree not below the bound.
    pub fn ceil_deg(&self) -> i64 {
        (self.psi_c_min.to_deg() - 1e-9).ceil() as i64
    }
}

fn bound_parts<T: Real>(
    cell: &CellLayout<T>,
    kind: AdrKind,
    n_pd: usize,
    psi_total: T,
) -> Result<FovBound<T>> {
    check_budget(psi_total)?;
    cell.validate()?;
    if n_pd < kind.min_pds() {
        return Err(Error::InvalidLayout(format!(
            "{kind} needs at least {} PDs, got {n_pd}",
            kind.min_pds()
        )));
    }
    let h = cell.h;
    let dcm = dc_min(cell);
    let limit = h * psi_total.tan();
    if dcm > limit {
        return Err(Error::CellTooLarge {
            d_c: dcm.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let w = omega_c::<T>(kind, n_pd);
    let dc2 = d_c2(h, psi_total, w);
    let psi_c2_min = if dcm <= dc2 {
        f2(dc2, h, psi_total, w)
    } else {
        f2(dcm, h, psi_total, w)
    };
    let psi_c1_min = constraint1_min(kind, psi_total);
    Ok(FovBound {
        psi_c1_min,
        psi_c2_min,
        psi_c_min: psi_c1_min.max(psi_c2_min),
        d_c_min: dcm,
        d_c2: dc2,
        omega_c: w,
    })
}

pub fn fov_lower_bound<T: Real>(
    cell: &CellLayout<T>,
    kind: AdrKind,
    n_pd: usize,
    psi_total: T,
) -> Result<FovBound<T>> {
    bound_parts(cell, kind, n_pd, psi_total)
}

/// Visibility of every emitter from every PD.
#[derive(Debug, Clone, PartialEq)]
pub struct Visibility {
    pub n_ap: usize,
    pub n_pd: usize,
    /// Row-major `[ap][pd]`: some source of the AP is inside the PD's FOV.
    pub factors: Vec<bool>,
}

impl Visibility {
    pub fn any(&self) -> bool {
        self.factors.iter().any(|v| *v)
    }
}

/// Unit PD normals for a device with orientation `o`.
fn pd_normals<T: Real>(layout: &AdrLayout<T>, o: Orientation<T>) -> Vec<Vec3<T>> {
    layout
        .world_poses(Vec3::zero(), o, true)
        .into_iter()
        .map(|p| p.normal)
        .collect()
}

fn sees<T: Real>(normal: Vec3<T>, ue: Vec3<T>, src: Vec3<T>, cos_fov: T) -> bool {
    let d = src - ue;
    let dist = d.norm();
    dist > T::zero() && normal.dot(d) >= cos_fov * dist
}

pub fn visibility<T: Real>(
    ue_pos: Vec3<T>,
    orientation: Orientation<T>,
    layout: &AdrLayout<T>,
    cell: &CellLayout<T>,
) -> Visibility {
    let normals = pd_normals(layout, orientation);
    let sources = cell.source_positions();
    let per_ap = cell.sources_per_ap();
    let cos_fov = layout.psi_c.cos();
    let n_ap = cell.ap_positions.len();
    let mut factors = Vec::with_capacity(n_ap * normals.len());
    for ap in 0..n_ap {
        let srcs = &sources[ap * per_ap..(ap + 1) * per_ap];
        for n in &normals {
            factors.push(srcs.iter().any(|s| sees(*n, ue_pos, *s, cos_fov)));
        }
    }
    Visibility {
        n_ap,
        n_pd: normals.len(),
        factors,
    }
}

fn draw_position<T: Real, R: Rng + ?Sized>(cell: &CellLayout<T>, rng: &mut R) -> Vec3<T> {
    let x: f64 = rng.gen();
    let y: f64 = rng.gen();
    Vec3::new(
        T::of(x) * cell.width,
        T::of(y) * cell.length,
        cell.ue_height(),
    )
}

/// Device-frame unit directions towards the emitters that can fall inside some PD's FOV. A
/// PD tilted by `psi_total - psi_c` never accepts light from further than `psi_total` off the
/// device axis, so the others are dropped up front.
fn candidate_dirs<T: Real>(
    ue: Vec3<T>,
    o: Orientation<T>,
    sources: &[Vec3<T>],
    psi_total: T,
) -> Vec<Vec3<T>> {
    let cos_total = psi_total.cos() - T::of(1e-9);
    sources
        .iter()
        .filter_map(|s| (*s - ue).normalized())
        .map(|d| unrotate_direction(d, o))
        .filter(|d| d.z >= cos_total)
        .collect()
}

fn sees_any<T: Real>(normals: &[Vec3<T>], dirs: &[Vec3<T>], cos_fov: T) -> bool {
    dirs.iter()
        .any(|d| normals.iter().any(|n| n.dot(*d) >= cos_fov))
}

fn device_normals<T: Real>(layout: &AdrLayout<T>) -> Vec<Vec3<T>> {
    layout
        .pds()
        .iter()
        .map(|p| p.vert_angles.normal())
        .collect()
}

/// Position and orientation of user `i`, then its candidate emitter directions.
fn draw_user<T: Real>(
    cell: &CellLayout<T>,
    sources: &[Vec3<T>],
    psi_total: T,
    mode: OrientationMode,
    model: &OrientationModel<T>,
    seed: u64,
    i: usize,
) -> Vec<Vec3<T>> {
    let mut rng = sample_rng(seed, i as u64);
    let ue = draw_position(cell, &mut rng);
    let o = model.draw(mode, &mut rng);
    candidate_dirs(ue, o, sources, psi_total)
}

/// Fraction of users, uniform over the region and oriented per `mode`, that see at least one AP.
pub fn prob_visibility<T: Real>(
    layout: &AdrLayout<T>,
    cell: &CellLayout<T>,
    mode: OrientationMode,
    model: &OrientationModel<T>,
    n_samples: usize,
    seed: u64,
) -> Result<T> {
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    let sources = cell.source_positions();
    let normals = device_normals(layout);
    let cos_fov = layout.psi_c.cos();
    let psi_total = layout.psi_total();
    let hits: usize = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let dirs = draw_user(cell, &sources, psi_total, mode, model, seed, i);
            usize::from(sees_any(&normals, &dirs, cos_fov))
        })
        .sum();
    Ok(T::of(hits as f64 / n_samples as f64))
}

/// Smallest whole-degree FOV at which every sampled user sees an AP, with the side PDs
/// tilted by `psi_total - psi_c`. `None` if even `psi_total` leaves someone uncovered.
///
/// The worst case behind [`fov_lower_bound`] has an AP midway between two side-PD azimuths,
/// which only [`OrientationMode::VerticalSpin`] samples; with a fixed azimuth the grid
/// geometry pins the AP directions and the bound is generally not reached.
pub fn empirical_min_fov<T: Real>(
    cell: &CellLayout<T>,
    kind: AdrKind,
    n_pd: usize,
    psi_total: T,
    mode: OrientationMode,
    n_samples: usize,
    seed: u64,
) -> Result<Option<i64>> {
    check_budget(psi_total)?;
    cell.validate()?;
    if n_samples == 0 {
        return Err(invalid("n_samples", "must be at least 1"));
    }
    let model = OrientationModel::default();
    let sources = cell.source_positions();
    let users: Vec<Vec<Vec3<T>>> = (0..n_samples)
        .into_par_iter()
        .map(|i| draw_user(cell, &sources, psi_total, mode, &model, seed, i))
        .collect();
    let top = (psi_total.to_deg() + 1e-9).floor() as i64;
    for deg in 1..=top {
        let psi_c = T::deg(deg as f64);
        let layout = AdrLayout::from_budget(kind, n_pd, psi_c, psi_total, T::zero(), T::one())?;
        let normals = device_normals(&layout);
        let cos_fov = psi_c.cos();
        if users
            .par_iter()
            .all(|dirs| sees_any(&normals, dirs, cos_fov))
        {
            return Ok(Some(deg));
        }
    }
    Ok(None)
}
