use thiserror::Error;

/// Errors raised by the scattering library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside its domain ({expected})")]
    Domain { function: &'static str, value: f64, expected: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// `b^2 - omega^2` is within the singular threshold; the cylinder kernel
    /// diverges logarithmically there.
    #[error("singular cylinder kernel: |b^2 - omega^2| = {gap:e} below threshold {threshold:e}")]
    Singular { gap: f64, threshold: f64 },

    /// The `delta(omega)` term of a modulated dielectric cannot be evaluated
    /// numerically.
    #[error("frequency {omega:e} falls inside the static-term guard band")]
    StaticTerm { omega: f64 },

    #[error("detection frequency {omega} too close to incident frequency {k} (guard band {band:e})")]
    GuardBand { omega: f64, k: f64, band: f64 },

    #[error("far-field precondition violated: {0}")]
    FarField(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("power-law fit: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
