//! Serving-AP selection, diversity combining, SINR/INR and DCO-OFDM data rate.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Single-source cells, or double-source cells with antipodal source pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellMode {
    #[serde(rename = "SS")]
    SingleSource,
    #[serde(rename = "DS")]
    DoubleSource,
}

impl CellMode {
    pub fn label(self) -> &'static str {
        match self {
            CellMode::SingleSource => "SS",
            CellMode::DoubleSource => "DS",
        }
    }
}

impl std::fmt::Display for CellMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for CellMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ss" | "single" => Ok(Self::SingleSource),
            "ds" | "double" => Ok(Self::DoubleSource),
            _ => Err(invalid("mode", format!("`{s}` is not one of ss|ds"))),
        }
    }
}

/// Per-(AP, PD) DC gains for one user. Row-major `[ap][pd]`; in DS mode entries are the
/// signed differences `H_pos - H_neg`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LinkGains<T: Real> {
    pub n_ap: usize,
    pub n_pd: usize,
    pub gains: Vec<T>,
    pub mode: CellMode,
}

impl<T: Real> LinkGains<T> {
    pub fn new(n_ap: usize, n_pd: usize, gains: Vec<T>, mode: CellMode) -> Result<Self> {
        if n_ap == 0 || n_pd == 0 {
            return Err(invalid("link_gains", "need at least one AP and one PD"));
        }
        if gains.len() != n_ap * n_pd {
            return Err(invalid("link_gains", "gain matrix has the wrong size"));
        }
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(invalid("link_gains", "gains must be finite"));
        }
        if mode == CellMode::SingleSource && gains.iter().any(|g| *g < T::zero()) {
            return Err(invalid(
                "link_gains",
                "single-source gains must be non-negative",
            ));
        }
        Ok(Self {
            n_ap,
            n_pd,
            gains,
            mode,
        })
    }

    pub fn single(rows: &[&[T]]) -> Result<Self> {
        Self::from_rows(rows, CellMode::SingleSource)
    }

    pub fn from_rows(rows: &[&[T]], mode: CellMode) -> Result<Self> {
        let n_pd = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_pd) {
            return Err(invalid("link_gains", "ragged gain rows"));
        }
        Self::new(rows.len(), n_pd, rows.concat(), mode)
    }

    pub fn ap(&self, ap: usize) -> &[T] {
        &self.gains[ap * self.n_pd..(ap + 1) * self.n_pd]
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            gains: self.gains.iter().map(|g| *g * c).collect(),
            ..self.clone()
        }
    }
}

/// Physical-layer constants entering the SINR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PhyParams<T: Real> {
    /// PD responsivity, A/W.
    pub tau: T,
    /// Optical power per AP, W.
    pub p_tx: T,
    /// DC-bias ratio of optical power to electrical signal amplitude.
    pub kappa: T,
    /// Noise power spectral density, A²/Hz.
    pub n0: T,
    /// Modulation bandwidth, Hz.
    pub b_l: T,
    /// Number of OFDM subcarriers.
    pub m_sub: usize,
}

impl<T: Real> Default for PhyParams<T> {
    fn default() -> Self {
        Self {
            tau: T::of(0.5),
            p_tx: T::of(10.0),
            kappa: T::of(3.0),
            n0: T::of(1e-21),
            b_l: T::of(100e6),
            m_sub: 512,
        }
    }
}

impl<T: Real> PhyParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("phy.responsivity", self.tau),
            ("phy.p_tx_w", self.p_tx),
            ("phy.kappa", self.kappa),
            ("phy.n0", self.n0),
            ("phy.b_l", self.b_l),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(invalid(name, "must be strictly positive"));
            }
        }
        if self.m_sub < 4 || self.m_sub % 2 != 0 {
            return Err(invalid("phy.subcarriers", "must be an even integer >= 4"));
        }
        Ok(())
    }

    /// Per-PD noise power `kappa^2 N0 B_L (M-2)/M`.
    pub fn noise_power(&self) -> T {
        let m = T::of(self.m_sub as f64);
        self.kappa * self.kappa * self.n0 * self.b_l * (m - T::of(2.0)) / m
    }

    /// Optical power of each emitter: halved for double-source APs.
    pub fn source_power(&self, mode: CellMode) -> T {
        match mode {
            CellMode::SingleSource => self.p_tx,
            CellMode::DoubleSource => self.p_tx / T::of(2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CombinerKind {
    /// Unit weights.
    #[serde(rename = "EGC")]
    Egc,
    /// Only the PD with the best per-PD SINR.
    #[serde(rename = "SBC")]
    Sbc,
    /// Maximum-ratio weights `tau P H_p / (noise + I_p)`.
    #[serde(rename = "MRC")]
    Mrc,
    /// Per-PD SINR weights `(tau P H_p)^2 / (noise + I_p)`.
    #[serde(rename = "MRC-P")]
    MrcPower,
}

impl CombinerKind {
    pub fn label(self) -> &'static str {
        match self {
            CombinerKind::Egc => "EGC",
            CombinerKind::Sbc => "SBC",
            CombinerKind::Mrc => "MRC",
            CombinerKind::MrcPower => "MRC-P",
        }
    }
}

impl std::fmt::Display for CombinerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for CombinerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "EGC" => Ok(Self::Egc),
            "SBC" => Ok(Self::Sbc),
            "MRC" => Ok(Self::Mrc),
            "MRC-P" | "MRC_P" | "MRCP" => Ok(Self::MrcPower),
            _ => Err(invalid(
                "combiner",
                format!("`{s}` is not one of EGC|SBC|MRC|MRC-P"),
            )),
        }
    }
}

/// AP maximizing the summed squared gains over all PDs; ties go to the lowest index.
pub fn serving_ap<T: Real>(lg: &LinkGains<T>) -> Result<usize> {
    let mut best = (0, T::zero());
    for ap in 0..lg.n_ap {
        let e: T = lg.ap(ap).iter().map(|g| *g * *g).sum();
        if e > best.1 {
            best = (ap, e);
        }
    }
    if best.1 > T::zero() {
        Ok(best.0)
    } else {
        Err(Error::NoCoverage)
    }
}

/// Amplitude `tau P |H_sp|` and interference power `sum_i (tau P H_ip)^2` seen by each PD.
fn per_pd_terms<T: Real>(
    lg: &LinkGains<T>,
    phy: &PhyParams<T>,
    serving: usize,
) -> (Vec<T>, Vec<T>) {
    let a = phy.tau * phy.source_power(lg.mode);
    let amp = lg.ap(serving).iter().map(|g| a * g.abs()).collect();
    let interference = (0..lg.n_pd)
        .map(|p| {
            (0..lg.n_ap)
                .filter(|&ap| ap != serving)
                .map(|ap| {
                    let v = a * lg.ap(ap)[p];
                    v * v
                })
                .sum()
        })
        .collect();
    (amp, interference)
}

/// SINR of each PD used on its own.
pub fn per_pd_sinr<T: Real>(lg: &LinkGains<T>, phy: &PhyParams<T>, serving: usize) -> Vec<T> {
    let noise = phy.noise_power();
    let (amp, intf) = per_pd_terms(lg, phy, serving);
    amp.iter()
        .zip(&intf)
        .map(|(s, i)| *s * *s / (noise + *i))
        .collect()
}

/// Combining weights. In DS mode each weight carries the sign of the serving AP's `ΔH`
/// on that PD so the bipolar branches add coherently.
pub fn weights<T: Real>(
    kind: CombinerKind,
    lg: &LinkGains<T>,
    phy: &PhyParams<T>,
    serving: usize,
) -> Vec<T> {
    let noise = phy.noise_power();
    let (amp, intf) = per_pd_terms(lg, phy, serving);
    let mut w: Vec<T> = match kind {
        CombinerKind::Egc => vec![T::one(); lg.n_pd],
        CombinerKind::Sbc => {
            let sinr = per_pd_sinr(lg, phy, serving);
            let mut best = 0;
            for (p, v) in sinr.iter().enumerate() {
                if *v > sinr[best] {
                    best = p;
                }
            }
            (0..lg.n_pd)
                .map(|p| if p == best { T::one() } else { T::zero() })
                .collect()
        }
        CombinerKind::Mrc => amp
            .iter()
            .zip(&intf)
            .map(|(s, i)| *s / (noise + *i))
            .collect(),
        CombinerKind::MrcPower => amp
            .iter()
            .zip(&intf)
            .map(|(s, i)| *s * *s / (noise + *i))
            .collect(),
    };
    if lg.mode == CellMode::DoubleSource {
        for (wp, g) in w.iter_mut().zip(lg.ap(serving)) {
            if *g < T::zero() {
                *wp = -*wp;
            }
        }
    }
    w
}

/// Signal, noise and interference powers of the combined output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrTerms<T: Real> {
    pub serving: usize,
    pub signal: T,
    pub noise: T,
    pub interference: T,
}

impl<T: Real> SinrTerms<T> {
    pub fn sinr(&self) -> T {
        self.signal / (self.noise + self.interference)
    }

    pub fn inr(&self) -> T {
        self.interference / self.noise
    }

    /// SINR with the interference term dropped.
    pub fn snr(&self) -> T {
        self.signal / self.noise
    }
}

pub fn sinr_terms<T: Real>(
    lg: &LinkGains<T>,
    phy: &PhyParams<T>,
    kind: CombinerKind,
) -> Result<SinrTerms<T>> {
    let serving = serving_ap(lg)?;
    let w = weights(kind, lg, phy, serving);
    Ok(terms_with_weights(lg, phy, serving, &w))
}

pub fn terms_with_weights<T: Real>(
    lg: &LinkGains<T>,
    phy: &PhyParams<T>,
    serving: usize,
    w: &[T],
) -> SinrTerms<T> {
    let a = phy.tau * phy.source_power(lg.mode);
    let combine = |ap: usize| -> T {
        let s: T = w.iter().zip(lg.ap(ap)).map(|(wp, g)| *wp * *g).sum();
        let v = a * s;
        v * v
    };
    let signal = combine(serving);
    let noise = w.iter().map(|x| *x * *x).sum::<T>() * phy.noise_power();
    let interference = (0..lg.n_ap).filter(|&ap| ap != serving).map(combine).sum();
    SinrTerms {
        serving,
        signal,
        noise,
        interference,
    }
}

/// Post-combining SINR on one subcarrier (the DC channel is flat, so every data subcarrier
/// sees the same value).
pub fn sinr<T: Real>(lg: &LinkGains<T>, phy: &PhyParams<T>, kind: CombinerKind) -> Result<T> {
    Ok(sinr_terms(lg, phy, kind)?.sinr())
}

/// Interference-to-noise ratio of the combined output under the same weights.
pub fn inr<T: Real>(lg: &LinkGains<T>, phy: &PhyParams<T>, kind: CombinerKind) -> Result<T> {
    Ok(sinr_terms(lg, phy, kind)?.inr())
}

/// Interference-free approximation used for double-source cells.
pub fn ds_approx_sinr<T: Real>(
    lg: &LinkGains<T>,
    phy: &PhyParams<T>,
    kind: CombinerKind,
) -> Result<T> {
    Ok(sinr_terms(lg, phy, kind)?.snr())
}

/// User rate summed over the `M/2 - 1` data subcarriers, bit/s.
pub fn data_rate<T: Real>(gamma: T, phy: &PhyParams<T>) -> T {
    let m = T::of(phy.m_sub as f64);
    let used = T::of((phy.m_sub / 2 - 1) as f64);
    used / m * phy.b_l * (T::one() + gamma.max(T::zero())).log2()
}

pub fn to_db<T: Real>(x: T) -> T {
    T::of(10.0) * x.log10()
}
