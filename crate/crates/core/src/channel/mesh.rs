use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::Vec3;
use crate::scalar::Real;

/// Default cap on the number of surface elements (dense N² operators).
pub const DEFAULT_MAX_ELEMENTS: usize = 4096;

/// Rectangular room spanning `[0, width] x [0, depth] x [0, height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Room<T: Real> {
    pub width: T,
    pub depth: T,
    pub height: T,
    pub rho_wall: T,
    pub rho_ceiling: T,
    pub rho_floor: T,
}

impl<T: Real> Room<T> {
    /// 8 m x 8 m x 3 m office with walls/ceiling at 0.8 and floor at 0.3.
    pub fn office() -> Self {
        Self {
            width: T::of(8.0),
            depth: T::of(8.0),
            height: T::of(3.0),
            rho_wall: T::of(0.8),
            rho_ceiling: T::of(0.8),
            rho_floor: T::of(0.3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("room.width_m", self.width),
            ("room.depth_m", self.depth),
            ("room.height_m", self.height),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be positive"));
            }
        }
        for (name, v) in [
            ("room.rho_wall", self.rho_wall),
            ("room.rho_ceiling", self.rho_ceiling),
            ("room.rho_floor", self.rho_floor),
        ] {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(invalid(name, "reflectivity must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn with_reflectivity(self, rho: T) -> Self {
        Self {
            rho_wall: rho,
            rho_ceiling: rho,
            rho_floor: rho,
            ..self
        }
    }

    pub fn surface_area(&self) -> T {
        let two = T::of(2.0);
        two * (self.width * self.depth + self.width * self.height + self.depth * self.height)
    }

    /// Whether a point lies inside the closed box.
    pub fn contains(&self, p: Vec3<T>) -> bool {
        p.x >= T::zero()
            && p.y >= T::zero()
            && p.z >= T::zero()
            && p.x <= self.width
            && p.y <= self.depth
            && p.z <= self.height
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    Floor,
    Ceiling,
    WallXMin,
    WallXMax,
    WallYMin,
    WallYMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SurfaceElement<T: Real> {
    pub center: Vec3<T>,
    /// Points into the room.
    pub normal: Vec3<T>,
    pub area: T,
    pub rho: T,
    pub face: Face,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SurfaceMesh<T: Real> {
    pub elements: Vec<SurfaceElement<T>>,
    pub patch_size: T,
}

impl<T: Real> SurfaceMesh<T> {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn total_area(&self) -> T {
        self.elements.iter().map(|e| e.area).sum()
    }
}

fn cells(extent: f64, patch: f64) -> usize {
    // Tolerate round-off so that 8.0 / 0.5 gives 16, not 17.
    ((extent / patch) - 1e-9).ceil().max(1.0) as usize
}

/// Splits all six faces of `room` into an axis-aligned grid of patches no larger than
/// `patch_size` on a side.
pub fn build_mesh<T: Real>(
    room: &Room<T>,
    patch_size: T,
    max_elements: usize,
) -> Result<SurfaceMesh<T>> {
    room.validate()?;
    let (w, d, h, p) = (
        room.width.as_f64(),
        room.depth.as_f64(),
        room.height.as_f64(),
        patch_size.as_f64(),
    );
    if !(p > 0.0) || p >= w.min(d).min(h) {
        return Err(invalid(
            "mesh.patch_size_m",
            "must be positive and smaller than the smallest room dimension",
        ));
    }
    let (nx, ny, nz) = (cells(w, p), cells(d, p), cells(h, p));
    let count = 2 * nx * ny + 2 * nx * nz + 2 * ny * nz;
    if count > max_elements {
        let suggested = (room.surface_area().as_f64() / max_elements as f64).sqrt();
        return Err(Error::MeshTooFine {
            elements: count,
            cap: max_elements,
            suggested: (suggested * 1000.0).ceil() / 1000.0,
        });
    }

    let (sx, sy, sz) = (w / nx as f64, d / ny as f64, h / nz as f64);
    let mut elements = Vec::with_capacity(count);
    let mut push = |c: [f64; 3], n: [f64; 3], area: f64, rho: T, face: Face| {
        elements.push(SurfaceElement {
            center: Vec3::new(T::of(c[0]), T::of(c[1]), T::of(c[2])),
            normal: Vec3::new(T::of(n[0]), T::of(n[1]), T::of(n[2])),
            area: T::of(area),
            rho,
            face,
        });
    };
    let mid = |i: usize, s: f64| (i as f64 + 0.5) * s;

    for i in 0..nx {
        for j in 0..ny {
            let (x, y) = (mid(i, sx), mid(j, sy));
            push(
                [x, y, 0.0],
                [0.0, 0.0, 1.0],
                sx * sy,
                room.rho_floor,
                Face::Floor,
            );
            push(
                [x, y, h],
                [0.0, 0.0, -1.0],
                sx * sy,
                room.rho_ceiling,
                Face::Ceiling,
            );
        }
    }
    for j in 0..ny {
        for k in 0..nz {
            let (y, z) = (mid(j, sy), mid(k, sz));
            push(
                [0.0, y, z],
                [1.0, 0.0, 0.0],
                sy * sz,
                room.rho_wall,
                Face::WallXMin,
            );
            push(
                [w, y, z],
                [-1.0, 0.0, 0.0],
                sy * sz,
                room.rho_wall,
                Face::WallXMax,
            );
        }
    }
    for i in 0..nx {
        for k in 0..nz {
            let (x, z) = (mid(i, sx), mid(k, sz));
            push(
                [x, 0.0, z],
                [0.0, 1.0, 0.0],
                sx * sz,
                room.rho_wall,
                Face::WallYMin,
            );
            push(
                [x, d, z],
                [0.0, -1.0, 0.0],
                sx * sz,
                room.rho_wall,
                Face::WallYMax,
            );
        }
    }
    Ok(SurfaceMesh {
        elements,
        patch_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metre_mesh_of_office() {
        let room = Room::<f64>::office();
        let mesh = build_mesh(&room, 1.0, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(mesh.len(), 2 * 64 + 4 * 24);
        assert!((mesh.total_area() - 224.0).abs() < 1e-9);
        for e in &mesh.elements {
            assert!([0.8, 0.3].contains(&e.rho));
            let expected = if e.face == Face::Floor { 0.3 } else { 0.8 };
            assert_eq!(e.rho, expected);
        }
    }

    #[test]
    fn half_metre_mesh_count() {
        let mesh = build_mesh(&Room::<f64>::office(), 0.5, DEFAULT_MAX_ELEMENTS).unwrap();
        assert_eq!(mesh.len(), 896);
    }

    #[test]
    fn normals_point_inside() {
        let room = Room::<f64>::office();
        let centre = Vec3::new(4.0, 4.0, 1.5);
        let mesh = build_mesh(&room, 0.7, DEFAULT_MAX_ELEMENTS).unwrap();
        for e in &mesh.elements {
            assert!(e.normal.dot(centre - e.center) > 0.0);
            assert!(room.contains(e.center));
        }
        // non-divisible patch size still tiles the surface exactly
        assert!((mesh.total_area() - room.surface_area()).abs() / 224.0 < 1e-3);
    }

    #[test]
    fn cap_is_enforced() {
        let err = build_mesh(&Room::<f64>::office(), 0.05, 4096).unwrap_err();
        match err {
            Error::MeshTooFine { suggested, .. } => assert!(suggested > 0.2 && suggested < 0.3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(build_mesh(&Room::<f64>::office(), 0.0, 4096).is_err());
        assert!(build_mesh(&Room::<f64>::office(), 3.0, 4096).is_err());
    }
}
