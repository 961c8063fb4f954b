//! Channel, coverage and link-level simulation of LiFi attocell networks served by
//! angle-diversity receivers.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod adr;
pub mod channel;
pub mod combining;
pub mod coverage;
pub mod error;
pub mod geometry;
pub mod orientation;
pub mod scalar;
pub mod simulation;

pub use adr::{AdrKind, AdrLayout, BandwidthModel, Thickness};
pub use channel::{ChannelModel, OpticalRx, ReflectionMode, Room, Source};
pub use combining::{CellMode, CombinerKind, LinkGains, PhyParams};
pub use coverage::{CellLayout, FovBound};
pub use error::{Error, Result};
pub use geometry::{Orientation, PdAngles, Vec3};
pub use orientation::{OrientationMode, OrientationModel};
pub use scalar::Real;
pub use simulation::{AggregateResult, Averaging, Environment, Scenario};

/// Version of this crate, echoed in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Vec3f = Vec3<f64>;
pub type Orientationf = Orientation<f64>;
pub type AdrLayoutf = AdrLayout<f64>;
pub type Roomf = Room<f64>;
pub type ChannelModelf = ChannelModel<f64>;
pub type LinkGainsf = LinkGains<f64>;
pub type PhyParamsf = PhyParams<f64>;
pub type CellLayoutf = CellLayout<f64>;
pub type FovBoundf = FovBound<f64>;
pub type Scenariof = Scenario<f64>;
pub type Environmentf = Environment<f64>;
