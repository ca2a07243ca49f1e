use thiserror::Error;

/// Errors raised by the geometric and numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("polygon is not simple: edges {0} and {1} intersect")]
    NotSimple(usize, usize),
    #[error("grid of {nodes} nodes exceeds the memory budget; try h >= {suggested_h}")]
    Size { nodes: u64, suggested_h: f64 },
    #[error("lookup failed: {0}")]
    Lookup(String),
    #[error("index {0} out of range")]
    Range(i64),
    #[error("curve is not admissible: {0}")]
    Admissibility(String),
    #[error("no path: {0}")]
    Connectivity(String),
    #[error("ball of radius {0} leaves the distance field")]
    Coverage(f64),
    #[error("no interior nodes at resolution {0}")]
    Resolution(f64),
    #[error("degenerate fit: {0}")]
    Fit(String),
    #[error("points are not in the pieces required by case {0}")]
    CaseRouting(u8),
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
    #[error("grid point {index} ({label}): {source}")]
    Grid { index: usize, label: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
