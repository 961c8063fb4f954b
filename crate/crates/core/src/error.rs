use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate link: transmitter and receiver coincide")]
    DegenerateLink,
    #[error("invalid receiver layout: {0}")]
    InvalidLayout(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error(
        "mesh too fine: {elements} elements exceeds cap {cap}; try patch size >= {suggested:.3} m"
    )]
    MeshTooFine {
        elements: usize,
        cap: usize,
        suggested: f64,
    },
    #[error("non-physical mesh (energy gain): reflection system is singular")]
    NonPhysicalMesh,
    #[error("no coverage: all channel gains are zero")]
    NoCoverage,
    #[error("unbounded footprint: psi_c + theta_pd must stay below 90 degrees")]
    UnboundedFootprint,
    #[error(
        "cell too large for psi_total: d_c = {d_c:.4} m exceeds h tan(psi_total) = {limit:.4} m"
    )]
    CellTooLarge { d_c: f64, limit: f64 },
    #[error("operator cache: {0}")]
    Cache(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
