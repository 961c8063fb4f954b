use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linalg::{matvec, LuFactorization};
use super::mesh::{build_mesh, Room, SurfaceMesh};
use super::{lambertian_link_unchecked, los_gain, Aperture, OpticalRx, Source};
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// How many reflections the diffuse kernel accounts for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReflectionMode {
    /// All orders, via one linear solve.
    Exact,
    /// Reflections 1..=L only.
    Truncated(usize),
}

impl std::fmt::Display for ReflectionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ReflectionMode::Exact => f.write_str("exact"),
            ReflectionMode::Truncated(l) => write!(f, "truncated:{l}"),
        }
    }
}

impl std::str::FromStr for ReflectionMode {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Self::Exact);
        }
        s.strip_prefix("truncated:")
            .and_then(|l| l.parse().ok())
            .map(Self::Truncated)
            .ok_or_else(|| {
                invalid(
                    "channel.reflection",
                    format!("`{s}` is not `exact` or `truncated:<orders>`"),
                )
            })
    }
}

/// Room transfer operators for a fixed set of sources.
///
/// `h[k * n + i]` is the gain from element `i` (as an `m`-order Lambertian emitter) to
/// element `k` (as a hemispheric receiver without concentrator), so `A_i h[k][i] =
/// A_k h[i][k]` and the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferOperators<T: Real> {
    pub(crate) n_e: usize,
    pub(crate) h: Vec<T>,
    pub(crate) rho: Vec<T>,
    pub(crate) lambert_m_reflect: T,
    pub(crate) t_by_source: Vec<Vec<T>>,
    /// `G (I - H G)^{-1} t` per source.
    pub(crate) kernel_by_source: Vec<Vec<T>>,
}

impl<T: Real> TransferOperators<T> {
    pub fn n_elements(&self) -> usize {
        self.n_e
    }

    pub fn n_sources(&self) -> usize {
        self.t_by_source.len()
    }

    pub fn h(&self, k: usize, i: usize) -> T {
        self.h[k * self.n_e + i]
    }

    pub fn reflectivity(&self) -> &[T] {
        &self.rho
    }

    pub fn lambert_m_reflect(&self) -> T {
        self.lambert_m_reflect
    }

    pub fn transmitter_vector(&self, source: usize) -> &[T] {
        &self.t_by_source[source]
    }

    pub fn exact_kernel(&self, source: usize) -> &[T] {
        &self.kernel_by_source[source]
    }

    /// Per-reflection-order kernels `(G H)^l G t` for `l = 0..orders`.
    pub fn order_kernels(&self, source: usize, orders: usize) -> Vec<Vec<T>> {
        let mut out = Vec::with_capacity(orders);
        if orders == 0 {
            return out;
        }
        let mut q: Vec<T> = self.t_by_source[source]
            .iter()
            .zip(&self.rho)
            .map(|(t, r)| *t * *r)
            .collect();
        for _ in 1..orders {
            let next: Vec<T> = matvec(self.n_e, &self.h, &q)
                .into_iter()
                .zip(&self.rho)
                .map(|(v, r)| v * *r)
                .collect();
            out.push(std::mem::replace(&mut q, next));
        }
        out.push(q);
        out
    }

    /// `sum_{l < orders} (G H)^l G t`
    pub fn truncated_kernel(&self, source: usize, orders: usize) -> Vec<T> {
        let mut acc = vec![T::zero(); self.n_e];
        for q in self.order_kernels(source, orders) {
            for (a, v) in acc.iter_mut().zip(q) {
                *a = *a + v;
            }
        }
        acc
    }

    pub fn kernel(&self, source: usize, mode: ReflectionMode) -> Vec<T> {
        match mode {
            ReflectionMode::Exact => self.kernel_by_source[source].clone(),
            ReflectionMode::Truncated(l) => self.truncated_kernel(source, l),
        }
    }

    /// Spectral radius of `H G` by power iteration; below one for a physical room.
    pub fn spectral_radius(&self, iterations: usize) -> T {
        let n = self.n_e;
        let mut v = vec![T::one(); n];
        let mut lambda = T::zero();
        for _ in 0..iterations {
            let gv: Vec<T> = v.iter().zip(&self.rho).map(|(a, r)| *a * *r).collect();
            let w = matvec(n, &self.h, &gv);
            let norm = w.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            if norm == T::zero() {
                return T::zero();
            }
            lambda = norm / v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lambda
    }
}

fn element_aperture<T: Real>(e: &super::SurfaceElement<T>) -> Aperture<T> {
    Aperture {
        position: e.center,
        normal: e.normal,
        area: e.area,
        cos_fov: T::zero(),
        gain: T::one(),
    }
}

fn link_or_zero<T: Real>(tx: super::Vec3<T>, tx_n: super::Vec3<T>, m: T, rx: &Aperture<T>) -> T {
    let d = rx.position - tx;
    let d2 = d.norm_sq();
    if d2 > T::zero() {
        lambertian_link_unchecked(d, d2, tx_n, m, rx)
    } else {
        T::zero()
    }
}

/// Builds `t`, `H`, `G` and the exact diffuse kernel for each source.
pub fn assemble_operators<T: Real>(
    mesh: &SurfaceMesh<T>,
    sources: &[Source<T>],
    lambert_m_reflect: T,
) -> Result<TransferOperators<T>> {
    let n = mesh.len();
    if n == 0 {
        return Err(invalid("mesh", "no surface elements"));
    }
    let apertures: Vec<Aperture<T>> = mesh.elements.iter().map(element_aperture).collect();

    let mut h = vec![T::zero(); n * n];
    h.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        let rx = &apertures[k];
        for (i, e) in mesh.elements.iter().enumerate() {
            if i != k {
                row[i] = link_or_zero(e.center, e.normal, lambert_m_reflect, rx);
            }
        }
    });
    let rho: Vec<T> = mesh.elements.iter().map(|e| e.rho).collect();

    let t_by_source: Vec<Vec<T>> = sources
        .iter()
        .map(|s| {
            apertures
                .iter()
                .map(|a| link_or_zero(s.position, s.normal, s.lambert_m, a))
                .collect()
        })
        .collect();

    // I - H G
    let mut a = vec![T::zero(); n * n];
    a.par_chunks_mut(n).enumerate().for_each(|(k, row)| {
        for i in 0..n {
            let delta = if i == k { T::one() } else { T::zero() };
            row[i] = delta - h[k * n + i] * rho[i];
        }
    });
    let lu = LuFactorization::new(n, a)?;
    let kernel_by_source = t_by_source
        .par_iter()
        .map(|t| {
            lu.solve(t)
                .into_iter()
                .zip(&rho)
                .map(|(x, r)| x * *r)
                .collect()
        })
        .collect();

    Ok(TransferOperators {
        n_e: n,
        h,
        rho,
        lambert_m_reflect,
        t_by_source,
        kernel_by_source,
    })
}

/// Element-to-receiver gains `r`, with each element acting as a Lambertian emitter of order
/// `lambert_m_reflect` and the receiver using its own FOV and concentrator.
pub fn receiver_vector<T: Real>(
    mesh: &SurfaceMesh<T>,
    rx: &OpticalRx<T>,
    lambert_m_reflect: T,
) -> Vec<T> {
    let ap = rx.aperture();
    mesh.elements
        .iter()
        .map(|e| link_or_zero(e.center, e.normal, lambert_m_reflect, &ap))
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Diffuse DC gain including every reflection order.
pub fn diffuse_gain<T: Real>(
    ops: &TransferOperators<T>,
    source_id: usize,
    rx: &OpticalRx<T>,
    mesh: &SurfaceMesh<T>,
) -> T {
    let r = receiver_vector(mesh, rx, ops.lambert_m_reflect);
    dot(&r, &ops.kernel_by_source[source_id])
}

/// Diffuse DC gain over the first `orders` reflections; zero for `orders == 0`.
pub fn diffuse_gain_truncated<T: Real>(
    ops: &TransferOperators<T>,
    source_id: usize,
    rx: &OpticalRx<T>,
    mesh: &SurfaceMesh<T>,
    orders: usize,
) -> T {
    if orders == 0 {
        return T::zero();
    }
    let r = receiver_vector(mesh, rx, ops.lambert_m_reflect);
    dot(&r, &ops.truncated_kernel(source_id, orders))
}

/// Room, sources and the diffuse kernels for one reflection mode, ready for receiver queries.
#[derive(Debug, Clone)]
pub struct ChannelModel<T: Real> {
    pub room: Room<T>,
    pub mesh: SurfaceMesh<T>,
    pub sources: Vec<Source<T>>,
    pub ops: TransferOperators<T>,
    pub mode: ReflectionMode,
    kernels: Vec<Vec<T>>,
}

impl<T: Real> ChannelModel<T> {
    pub fn build(
        room: Room<T>,
        sources: Vec<Source<T>>,
        patch_size: T,
        max_elements: usize,
        mode: ReflectionMode,
    ) -> Result<Self> {
        let mesh = build_mesh(&room, patch_size, max_elements)?;
        let ops = assemble_operators(&mesh, &sources, T::one())?;
        Ok(Self::from_parts(room, mesh, sources, ops, mode))
    }

    pub fn from_parts(
        room: Room<T>,
        mesh: SurfaceMesh<T>,
        sources: Vec<Source<T>>,
        ops: TransferOperators<T>,
        mode: ReflectionMode,
    ) -> Self {
        let kernels = (0..sources.len()).map(|s| ops.kernel(s, mode)).collect();
        Self {
            room,
            mesh,
            sources,
            ops,
            mode,
            kernels,
        }
    }

    fn check_inside(&self, rx: &OpticalRx<T>) -> Result<()> {
        if self.room.contains(rx.position) {
            Ok(())
        } else {
            Err(invalid("rx.position", "receiver lies outside the room"))
        }
    }

    pub fn los(&self, source_id: usize, rx: &OpticalRx<T>) -> Result<T> {
        los_gain(&self.sources[source_id], rx)
    }

    pub fn diffuse(&self, source_id: usize, rx: &OpticalRx<T>) -> Result<T> {
        self.check_inside(rx)?;
        let r = receiver_vector(&self.mesh, rx, self.ops.lambert_m_reflect);
        Ok(dot(&r, &self.kernels[source_id]))
    }

    pub fn total(&self, source_id: usize, rx: &OpticalRx<T>) -> Result<T> {
        Ok(self.los(source_id, rx)? + self.diffuse(source_id, rx)?)
    }

    /// Total gain from every source to one receiver, building `r` once.
    pub fn total_all(&self, rx: &OpticalRx<T>) -> Result<Vec<T>> {
        self.check_inside(rx)?;
        let r = receiver_vector(&self.mesh, rx, self.ops.lambert_m_reflect);
        self.sources
            .iter()
            .zip(&self.kernels)
            .map(|(s, k)| Ok(los_gain(s, rx)? + dot(&r, k)))
            .collect()
    }

    /// LOS and diffuse gains from every source to one receiver, as two vectors.
    pub fn gains_split(&self, rx: &OpticalRx<T>) -> Result<(Vec<T>, Vec<T>)> {
        self.check_inside(rx)?;
        let r = receiver_vector(&self.mesh, rx, self.ops.lambert_m_reflect);
        let los = self
            .sources
            .iter()
            .map(|s| los_gain(s, rx))
            .collect::<Result<_>>()?;
        let diffuse = self.kernels.iter().map(|k| dot(&r, k)).collect();
        Ok((los, diffuse))
    }

    /// Diffuse gain split by reflection order `1..=orders`, plus the all-order total.
    pub fn diffuse_by_order(
        &self,
        source_id: usize,
        rx: &OpticalRx<T>,
        orders: usize,
    ) -> Result<(Vec<T>, T)> {
        self.check_inside(rx)?;
        let r = receiver_vector(&self.mesh, rx, self.ops.lambert_m_reflect);
        let per_order = self
            .ops
            .order_kernels(source_id, orders)
            .iter()
            .map(|k| dot(&r, k))
            .collect();
        Ok((per_order, dot(&r, self.ops.exact_kernel(source_id))))
    }

    /// Signed `H_pos - H_neg` for a double-source access point.
    pub fn ds_delta_gain(&self, pos_id: usize, neg_id: usize, rx: &OpticalRx<T>) -> Result<T> {
        Ok(self.total(pos_id, rx)? - self.total(neg_id, rx)?)
    }
}
