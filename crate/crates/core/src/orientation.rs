//! Random device orientation: truncated-Laplace elevation, uniform azimuth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::Orientation;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationMode {
    Random,
    /// Facing straight up with zero azimuth.
    Vertical,
    /// Facing straight up, spun to a uniformly drawn azimuth.
    #[serde(rename = "vertical-spin")]
    VerticalSpin,
}

impl std::str::FromStr for OrientationMode {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "vertical" => Ok(Self::Vertical),
            "vertical-spin" => Ok(Self::VerticalSpin),
            _ => Err(invalid(
                "orientation_mode",
                format!("`{s}` is not one of random|vertical|vertical-spin"),
            )),
        }
    }
}

impl std::fmt::Display for OrientationMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Random => "random",
            Self::Vertical => "vertical",
            Self::VerticalSpin => "vertical-spin",
        })
    }
}

/// Elevation follows a Laplace law with location `mu_theta` and scale `b_theta =
/// sqrt(sigma_theta^2 / 2)`, truncated to [0, π/2] and renormalized there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct OrientationModel<T: Real> {
    pub mu_theta: T,
    pub sigma_theta: T,
    pub b_theta: T,
}

impl<T: Real> Default for OrientationModel<T> {
    fn default() -> Self {
        Self::new(T::deg(41.39), T::deg(7.68)).expect("default orientation parameters are valid")
    }
}

impl<T: Real> OrientationModel<T> {
    pub fn new(mu_theta: T, sigma_theta: T) -> Result<Self> {
        if !(sigma_theta > T::zero()) {
            return Err(invalid("orientation.sigma_theta_deg", "must be positive"));
        }
        if !(mu_theta.is_finite()) {
            return Err(invalid("orientation.mu_theta_deg", "must be finite"));
        }
        let b_theta = (sigma_theta * sigma_theta / T::of(2.0)).sqrt();
        Ok(Self {
            mu_theta,
            sigma_theta,
            b_theta,
        })
    }

    fn laplace_cdf(&self, x: T) -> T {
        let half = T::of(0.5);
        let z = (x - self.mu_theta) / self.b_theta;
        if z < T::zero() {
            half * z.exp()
        } else {
            T::one() - half * (-z).exp()
        }
    }

    fn laplace_quantile(&self, p: T) -> T {
        let half = T::of(0.5);
        let two = T::of(2.0);
        if p < half {
            self.mu_theta + self.b_theta * (two * p).ln()
        } else {
            self.mu_theta - self.b_theta * (two * (T::one() - p)).ln()
        }
    }

    /// Probability mass of the untruncated law on [0, π/2].
    pub fn truncation_mass(&self) -> T {
        self.laplace_cdf(T::FRAC_PI_2()) - self.laplace_cdf(T::zero())
    }

    pub fn pdf_theta(&self, theta: T) -> T {
        if theta < T::zero() || theta > T::FRAC_PI_2() {
            return T::zero();
        }
        let d = (theta - self.mu_theta).abs() / self.b_theta;
        (-d).exp() / (T::of(2.0) * self.b_theta * self.truncation_mass())
    }

    pub fn cdf_theta(&self, theta: T) -> T {
        if theta <= T::zero() {
            return T::zero();
        }
        if theta >= T::FRAC_PI_2() {
            return T::one();
        }
        (self.laplace_cdf(theta) - self.laplace_cdf(T::zero())) / self.truncation_mass()
    }

    /// Inverse of [`Self::cdf_theta`] for `u` in [0, 1].
    pub fn quantile_theta(&self, u: T) -> T {
        let lo = self.laplace_cdf(T::zero());
        let p = lo + u * self.truncation_mass();
        self.laplace_quantile(p).max(T::zero()).min(T::FRAC_PI_2())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Orientation<T> {
        let u: f64 = rng.gen();
        let w: f64 = rng.gen();
        Orientation::new(
            self.quantile_theta(T::of(u)),
            T::of(w * std::f64::consts::TAU),
        )
    }

    pub fn draw<R: Rng + ?Sized>(&self, mode: OrientationMode, rng: &mut R) -> Orientation<T> {
        match mode {
            OrientationMode::Random => self.sample(rng),
            OrientationMode::Vertical => vertical(),
            OrientationMode::VerticalSpin => {
                let w: f64 = rng.gen();
                Orientation::new(T::zero(), T::of(w * std::f64::consts::TAU))
            }
        }
    }
}

pub fn vertical<T: Real>() -> Orientation<T> {
    Orientation::vertical()
}

/// Independent generator for sample `index` of a run seeded with `seed`. Each sample owns
/// its stream, so results do not depend on how samples are spread over threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
