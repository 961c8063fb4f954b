//! Monte-Carlo evaluation of average SINR, INR, data rate and visibility for users spread
//! uniformly over the room.
//!
//! Every user `i` draws its position and orientation from its own stream
//! (`sample_rng(seed, i)`), so runs that differ only in PD count, combiner, noise level or
//! cell mode see the same users and their differences are paired.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adr::{receiver_bandwidth, AdrKind, AdrLayout, BandwidthModel, Thickness};
use crate::channel::{ChannelModel, OpticalRx, ReflectionMode, Room, Source, DEFAULT_MAX_ELEMENTS};
use crate::combining::{
    data_rate, sinr_terms, CellMode, CombinerKind, LinkGains, PhyParams, SinrTerms,
};
use crate::coverage::{fov_lower_bound, CellLayout, FovBound};
use crate::error::{invalid, Error, Result};
use crate::geometry::{Orientation, Vec3};
use crate::orientation::{sample_rng, OrientationMode, OrientationModel};
use crate::scalar::Real;

/// How per-user SINR/INR values are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Mean of linear values, then converted to dB.
    Linear,
    /// Mean of per-user dB values.
    Db,
}

impl std::fmt::Display for Averaging {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Averaging::Linear => "linear",
            Averaging::Db => "db",
        })
    }
}

impl std::str::FromStr for Averaging {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "db" => Ok(Self::Db),
            _ => Err(invalid(
                "sim.averaging",
                format!("`{s}` is not one of linear|db"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Scenario<T: Real> {
    pub room: Room<T>,
    pub cell: CellLayout<T>,
    pub kind: AdrKind,
    pub n_pd: usize,
    pub psi_total: T,
    /// Per-PD FOV; `None` uses the analytic lower bound for the PD count.
    pub psi_c: Option<T>,
    /// PD area summed over the receiver, m².
    pub total_area: T,
    pub ring_radius: T,
    pub n_ref: T,
    pub t_s: T,
    pub half_power_angle: T,
    pub combiner: CombinerKind,
    /// `b_l` is ignored here and recomputed as `min(B_r, b_t)` for each PD count.
    pub phy: PhyParams<T>,
    pub b_t: T,
    pub bandwidth: BandwidthModel<T>,
    pub patch_size: T,
    pub max_elements: usize,
    pub reflection: ReflectionMode,
    pub n_samples: usize,
    pub seed: u64,
    pub orientation_mode: OrientationMode,
    pub orientation: OrientationModel<T>,
    pub averaging: Averaging,
}

/// Bandwidth of a 3-PD receiver sharing a 1 cm² budget, used to pin the load resistance.
pub const CALIBRATION_BANDWIDTH_HZ: f64 = 150e6;
pub const CALIBRATION_PD_COUNT: usize = 3;

impl<T: Real> Scenario<T> {
    pub fn office(mode: CellMode) -> Self {
        let total_area = T::of(1e-4);
        let bandwidth = BandwidthModel::default()
            .calibrated(
                total_area / T::of(CALIBRATION_PD_COUNT as f64),
                T::of(CALIBRATION_BANDWIDTH_HZ),
            )
            .expect("calibration inputs are positive");
        Self {
            room: Room::office(),
            cell: CellLayout::office(mode),
            kind: AdrKind::Pyramid,
            n_pd: 6,
            psi_total: T::deg(60.0),
            psi_c: None,
            total_area,
            ring_radius: T::zero(),
            n_ref: T::of(1.5),
            t_s: T::one(),
            half_power_angle: T::deg(60.0),
            combiner: CombinerKind::Mrc,
            phy: PhyParams::default(),
            b_t: T::of(100e6),
            bandwidth,
            patch_size: T::of(0.5),
            max_elements: DEFAULT_MAX_ELEMENTS,
            reflection: ReflectionMode::Truncated(5),
            n_samples: 5000,
            seed: 1,
            orientation_mode: OrientationMode::Random,
            orientation: OrientationModel::default(),
            averaging: Averaging::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.room.validate()?;
        self.cell.validate()?;
        self.phy.validate()?;
        self.bandwidth.validate()?;
        if self.n_samples == 0 {
            return Err(invalid("sim.n_samples", "must be at least 1"));
        }
        if !(self.psi_total > T::zero() && self.psi_total < T::FRAC_PI_2()) {
            return Err(invalid("adr.psi_total_deg", "must lie in (0, 90) degrees"));
        }
        if let Some(p) = self.psi_c {
            if !(p > T::zero() && p <= self.psi_total) {
                return Err(invalid("adr.psi_c_deg", "must lie in (0, psi_total]"));
            }
        }
        if !(self.b_t > T::zero()) {
            return Err(invalid("phy.b_t_hz", "must be positive"));
        }
        if !(self.patch_size > T::zero()) {
            return Err(invalid("channel.patch_m", "must be positive"));
        }
        if !(self.half_power_angle > T::zero() && self.half_power_angle < T::FRAC_PI_2()) {
            return Err(invalid(
                "ap.half_power_angle_deg",
                "must lie in (0, 90) degrees",
            ));
        }
        if !(self.n_ref > T::zero() && self.t_s > T::zero()) {
            return Err(invalid(
                "rx",
                "refractive index and filter gain must be positive",
            ));
        }
        let ue_z = self.cell.ue_height();
        if !(ue_z >= T::zero() && ue_z < self.room.height) {
            return Err(invalid("cell.h_m", "user plane falls outside the room"));
        }
        for p in self.cell.source_positions() {
            if !self.room.contains(p) {
                return Err(invalid("cell", "an AP source lies outside the room"));
            }
        }
        if self.cell.width > self.room.width || self.cell.length > self.room.depth {
            return Err(invalid("cell", "cell grid is larger than the room"));
        }
        Ok(())
    }

    pub fn with_mode(&self, mode: CellMode) -> Self {
        Self {
            cell: CellLayout {
                mode,
                ..self.cell.clone()
            },
            ..self.clone()
        }
    }
}

/// Room operators for one cell layout; shared by every PD count, combiner and noise level.
#[derive(Debug, Clone)]
pub struct Environment<T: Real> {
    pub channel: ChannelModel<T>,
    pub cell: CellLayout<T>,
}

impl<T: Real> Environment<T> {
    pub fn build(s: &Scenario<T>) -> Result<Self> {
        s.validate()?;
        let power = s.phy.source_power(s.cell.mode);
        let sources = s
            .cell
            .source_positions()
            .into_iter()
            .map(|p| Source::ceiling(p, s.half_power_angle, power))
            .collect::<Result<Vec<_>>>()?;
        let channel =
            ChannelModel::build(s.room, sources, s.patch_size, s.max_elements, s.reflection)?;
        Ok(Self {
            channel,
            cell: s.cell.clone(),
        })
    }
}

/// Receiver built for one PD count: FOV, areas and bandwidths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReceiverSetup<T: Real> {
    pub layout: AdrLayout<T>,
    pub bound: Option<FovBound<T>>,
    pub b_r: T,
    pub b_l: T,
}

pub fn receiver_setup<T: Real>(s: &Scenario<T>, n_pd: usize) -> Result<ReceiverSetup<T>> {
    let (psi_c, bound) = match s.psi_c {
        Some(p) => (p, None),
        None => {
            let b = fov_lower_bound(&s.cell, s.kind, n_pd, s.psi_total)?;
            (b.psi_c_min, Some(b))
        }
    };
    let layout = AdrLayout::from_budget(
        s.kind,
        n_pd,
        psi_c,
        s.psi_total,
        s.ring_radius,
        s.total_area,
    )?;
    let b_r = receiver_bandwidth(layout.pd_area(), &s.bandwidth, Thickness::Optimal)?;
    Ok(ReceiverSetup {
        layout,
        bound,
        b_r,
        b_l: b_r.min(s.b_t),
    })
}

/// One simulated user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserSample<T: Real> {
    pub position: Vec3<T>,
    pub orientation: Orientation<T>,
    pub links: LinkGains<T>,
    /// Some AP emitter lies inside some PD's FOV.
    pub visible: bool,
}

/// Position and orientation of user `i`.
pub fn draw_user<T: Real>(s: &Scenario<T>, seed: u64, i: usize) -> (Vec3<T>, Orientation<T>) {
    let mut rng = sample_rng(seed, i as u64);
    let x: f64 = rng.gen();
    let y: f64 = rng.gen();
    let pos = Vec3::new(
        T::of(x) * s.cell.width,
        T::of(y) * s.cell.length,
        s.cell.ue_height(),
    );
    let o = s.orientation.draw(s.orientation_mode, &mut rng);
    (pos, o)
}

/// Per-(AP, PD) gains for a receiver at `pos` with orientation `o`.
pub fn link_gains<T: Real>(
    env: &Environment<T>,
    s: &Scenario<T>,
    layout: &AdrLayout<T>,
    pos: Vec3<T>,
    o: Orientation<T>,
) -> Result<(LinkGains<T>, bool)> {
    let poses = layout.world_poses(pos, o, s.ring_radius == T::zero());
    let n_pd = poses.len();
    let n_ap = env.cell.ap_positions.len();
    let per_ap = env.cell.sources_per_ap();
    let mut gains = vec![T::zero(); n_ap * n_pd];
    let mut visible = false;
    for (p, pose) in poses.iter().enumerate() {
        let rx = OpticalRx::new(
            pose.position,
            pose.normal,
            layout.pd_area(),
            layout.psi_c,
            s.n_ref,
            s.t_s,
        )?;
        let (los, dif) = env.channel.gains_split(&rx)?;
        visible |= los.iter().any(|g| *g > T::zero());
        for ap in 0..n_ap {
            let h = |k: usize| los[k] + dif[k];
            gains[ap * n_pd + p] = match env.cell.mode {
                CellMode::SingleSource => h(ap),
                CellMode::DoubleSource => h(ap * per_ap) - h(ap * per_ap + 1),
            };
        }
    }
    Ok((LinkGains::new(n_ap, n_pd, gains, env.cell.mode)?, visible))
}

pub fn sample_users<T: Real>(
    env: &Environment<T>,
    s: &Scenario<T>,
    layout: &AdrLayout<T>,
) -> Result<Vec<UserSample<T>>> {
    (0..s.n_samples)
        .into_par_iter()
        .map(|i| {
            let (position, orientation) = draw_user(s, s.seed, i);
            let (links, visible) = link_gains(env, s, layout, position, orientation)?;
            Ok(UserSample {
                position,
                orientation,
                links,
                visible,
            })
        })
        .collect()
}

/// Mean and 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub ci95: f64,
}

impl Estimate {
    /// Sample mean with a normal-approximation half-width; the half-width is NaN below two
    /// values.
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                ci95: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n < 2 {
            return Self {
                mean,
                ci95: f64::NAN,
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Self {
            mean,
            ci95: 1.96 * (var / n as f64).sqrt(),
        }
    }

    /// dB of a linear mean, half-width carried through the first-order expansion.
    fn linear_to_db(self) -> Self {
        Self {
            mean: 10.0 * self.mean.log10(),
            ci95: 10.0 / std::f64::consts::LN_10 * self.ci95 / self.mean,
        }
    }
}

/// Floor applied to linear ratios before taking per-user dB values.
const DB_FLOOR: f64 = 1e-20;

fn average_ratio(xs: &[f64], averaging: Averaging) -> Estimate {
    match averaging {
        Averaging::Linear => Estimate::of(xs).linear_to_db(),
        Averaging::Db => {
            let db: Vec<f64> = xs.iter().map(|x| 10.0 * x.max(DB_FLOOR).log10()).collect();
            Estimate::of(&db)
        }
    }
}

/// Settings a result depends on beyond the aggregate numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub kind: AdrKind,
    pub n_pd: usize,
    pub mode: CellMode,
    pub combiner: CombinerKind,
    pub n0: f64,
    pub kappa: f64,
    pub subcarriers: usize,
    pub psi_c_deg: f64,
    pub b_t_hz: f64,
    pub b_r_hz: f64,
    pub b_l_hz: f64,
    pub r_load_ohm: f64,
    pub patch_size_m: f64,
    pub reflection: String,
    pub d_source_m: f64,
    pub orientation_mode: OrientationMode,
    pub averaging: Averaging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub avg_sinr_db: f64,
    pub ci95_sinr_db: f64,
    pub avg_sinr_linear: f64,
    pub avg_inr_db: f64,
    pub ci95_inr_db: f64,
    /// Users without coverage contribute zero rate.
    pub avg_rate_bps: f64,
    pub ci95_rate_bps: f64,
    pub p_v: f64,
    pub ci95_p_v: f64,
    pub n_samples: usize,
    pub n_covered: usize,
    pub no_coverage_fraction: f64,
    pub metadata: RunMetadata,
}

/// SINR terms per user under `combiner`; `None` where no AP delivers any power.
pub fn evaluate<T: Real>(
    samples: &[UserSample<T>],
    phy: &PhyParams<T>,
    combiner: CombinerKind,
) -> Result<Vec<Option<SinrTerms<T>>>> {
    samples
        .par_iter()
        .map(|u| match sinr_terms(&u.links, phy, combiner) {
            Ok(t) => Ok(Some(t)),
            Err(Error::NoCoverage) => Ok(None),
            Err(e) => Err(e),
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn aggregate<T: Real>(
    samples: &[UserSample<T>],
    s: &Scenario<T>,
    setup: &ReceiverSetup<T>,
    combiner: CombinerKind,
    n0: T,
) -> Result<AggregateResult> {
    let phy = PhyParams {
        n0,
        b_l: setup.b_l,
        ..s.phy
    };
    phy.validate()?;
    let terms = evaluate(samples, &phy, combiner)?;
    let mut sinr = Vec::with_capacity(terms.len());
    let mut inr = Vec::with_capacity(terms.len());
    let mut rate = Vec::with_capacity(terms.len());
    for t in &terms {
        match t {
            Some(t) => {
                let g = t.sinr();
                sinr.push(g.as_f64());
                inr.push(t.inr().as_f64());
                rate.push(data_rate(g, &phy).as_f64());
            }
            None => rate.push(0.0),
        }
    }
    let vis: Vec<f64> = samples
        .iter()
        .map(|u| f64::from(u8::from(u.visible)))
        .collect();
    let sinr_est = average_ratio(&sinr, s.averaging);
    let inr_est = average_ratio(&inr, s.averaging);
    let rate_est = Estimate::of(&rate);
    let pv = Estimate::of(&vis);
    let n = samples.len();
    Ok(AggregateResult {
        avg_sinr_db: sinr_est.mean,
        ci95_sinr_db: sinr_est.ci95,
        avg_sinr_linear: Estimate::of(&sinr).mean,
        avg_inr_db: inr_est.mean,
        ci95_inr_db: inr_est.ci95,
        avg_rate_bps: rate_est.mean,
        ci95_rate_bps: rate_est.ci95,
        p_v: pv.mean,
        ci95_p_v: pv.ci95,
        n_samples: n,
        n_covered: sinr.len(),
        no_coverage_fraction: (n - sinr.len()) as f64 / n.max(1) as f64,
        metadata: RunMetadata {
            seed: s.seed,
            kind: setup.layout.kind,
            n_pd: setup.layout.n_pd,
            mode: s.cell.mode,
            combiner,
            n0: n0.as_f64(),
            kappa: s.phy.kappa.as_f64(),
            subcarriers: s.phy.m_sub,
            psi_c_deg: setup.layout.psi_c.to_deg(),
            b_t_hz: s.b_t.as_f64(),
            b_r_hz: setup.b_r.as_f64(),
            b_l_hz: setup.b_l.as_f64(),
            r_load_ohm: s.bandwidth.r_load.as_f64(),
            patch_size_m: s.patch_size.as_f64(),
            reflection: s.reflection.to_string(),
            d_source_m: s.cell.d_source.as_f64(),
            orientation_mode: s.orientation_mode,
            averaging: s.averaging,
        },
    })
}

/// Paired mean of `sinr_a - sinr_b` (linear) over users covered under both combiners.
pub fn paired_difference<T: Real>(
    samples: &[UserSample<T>],
    phy: &PhyParams<T>,
    a: CombinerKind,
    b: CombinerKind,
) -> Result<Estimate> {
    let ta = evaluate(samples, phy, a)?;
    let tb = evaluate(samples, phy, b)?;
    let d: Vec<f64> = ta
        .iter()
        .zip(&tb)
        .filter_map(|(x, y)| Some((x.as_ref()?.sinr() - y.as_ref()?.sinr()).as_f64()))
        .collect();
    Ok(Estimate::of(&d))
}

/// Full pipeline for the scenario's own PD count, combiner and noise level.
pub fn run<T: Real>(s: &Scenario<T>) -> Result<AggregateResult> {
    let env = Environment::build(s)?;
    run_in(&env, s)
}

pub fn run_in<T: Real>(env: &Environment<T>, s: &Scenario<T>) -> Result<AggregateResult> {
    let setup = receiver_setup(s, s.n_pd)?;
    let samples = sample_users(env, s, &setup.layout)?;
    aggregate(&samples, s, &setup, s.combiner, s.phy.n0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub kind: AdrKind,
    pub n_pd: usize,
    pub mode: CellMode,
    pub combiner: CombinerKind,
    pub n0: f64,
    pub result: AggregateResult,
}

/// Every combination of PD count, combiner and noise level, with users shared across all.
pub fn sweep_n_pd<T: Real>(
    env: &Environment<T>,
    s: &Scenario<T>,
    n_list: &[usize],
    combiners: &[CombinerKind],
    n0_list: &[T],
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::new();
    for &n in n_list {
        let setup = receiver_setup(s, n)?;
        let samples = sample_users(env, s, &setup.layout)?;
        for &c in combiners {
            for &n0 in n0_list {
                let result = aggregate(&samples, s, &setup, c, n0)?;
                out.push(SweepPoint {
                    kind: s.kind,
                    n_pd: n,
                    mode: s.cell.mode,
                    combiner: c,
                    n0: n0.as_f64(),
                    result,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinerComparison {
    pub n_pd: usize,
    pub n0: f64,
    pub first: AggregateResult,
    pub second: AggregateResult,
    /// Paired linear SINR difference `first - second`.
    pub difference: Estimate,
}

/// Two combiners on the same users for each PD count and noise level.
pub fn compare_combiners<T: Real>(
    env: &Environment<T>,
    s: &Scenario<T>,
    n_list: &[usize],
    n0_list: &[T],
    first: CombinerKind,
    second: CombinerKind,
) -> Result<Vec<CombinerComparison>> {
    let mut out = Vec::new();
    for &n in n_list {
        let setup = receiver_setup(s, n)?;
        let samples = sample_users(env, s, &setup.layout)?;
        for &n0 in n0_list {
            let phy = PhyParams {
                n0,
                b_l: setup.b_l,
                ..s.phy
            };
            out.push(CombinerComparison {
                n_pd: n,
                n0: n0.as_f64(),
                first: aggregate(&samples, s, &setup, first, n0)?,
                second: aggregate(&samples, s, &setup, second, n0)?,
                difference: paired_difference(&samples, &phy, first, second)?,
            });
        }
    }
    Ok(out)
}

/// The same sweep in single- and double-source cells. Each mode gets its own FOV bound and
/// operators; users are shared.
pub fn compare_ss_ds<T: Real>(
    s: &Scenario<T>,
    n_list: &[usize],
    n0_list: &[T],
) -> Result<(Vec<SweepPoint>, Vec<SweepPoint>)> {
    let ss = s.with_mode(CellMode::SingleSource);
    let ds = s.with_mode(CellMode::DoubleSource);
    let env_ss = Environment::build(&ss)?;
    let env_ds = Environment::build(&ds)?;
    Ok((
        sweep_n_pd(&env_ss, &ss, n_list, &[s.combiner], n0_list)?,
        sweep_n_pd(&env_ds, &ds, n_list, &[s.combiner], n0_list)?,
    ))
}

/// Optical power collected by one receiver from every source, split by path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerProfile {
    pub los_w: f64,
    /// Diffuse power of reflection orders 1, 2, ...
    pub orders_w: Vec<f64>,
    /// Diffuse power over all orders.
    pub diffuse_w: f64,
}

impl PowerProfile {
    pub fn total_w(&self) -> f64 {
        self.los_w + self.diffuse_w
    }

    pub fn p_los(&self) -> f64 {
        self.los_w / self.total_w()
    }

    pub fn diffuse_share(&self) -> f64 {
        self.diffuse_w / self.total_w()
    }

    /// Share of the total carried by reflections of order greater than `order`.
    pub fn share_above(&self, order: usize) -> f64 {
        let upto: f64 = self.orders_w.iter().take(order).sum();
        (self.diffuse_w - upto) / self.total_w()
    }

    /// LOS plus the first `orders` reflections.
    pub fn cumulative_w(&self, orders: usize) -> f64 {
        self.los_w + self.orders_w.iter().take(orders).sum::<f64>()
    }
}

/// Power received through `rx` with each source radiating its own `power`.
pub fn power_profile<T: Real>(
    channel: &ChannelModel<T>,
    rx: &OpticalRx<T>,
    orders: usize,
) -> Result<PowerProfile> {
    let mut los_w = 0.0;
    let mut diffuse_w = 0.0;
    let mut orders_w = vec![0.0; orders];
    for (k, src) in channel.sources.iter().enumerate() {
        let p = src.power.as_f64();
        los_w += p * channel.los(k, rx)?.as_f64();
        let (per, all) = channel.diffuse_by_order(k, rx, orders)?;
        diffuse_w += p * all.as_f64();
        for (acc, v) in orders_w.iter_mut().zip(per) {
            *acc += p * v.as_f64();
        }
    }
    Ok(PowerProfile {
        los_w,
        orders_w,
        diffuse_w,
    })
}
