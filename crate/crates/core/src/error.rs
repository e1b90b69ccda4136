use thiserror::Error;

/// Errors raised anywhere in the annealing pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("unknown topology `{0}`")]
    UnknownTopology(String),

    #[error("field denominator bx^2 + bz^2 = {value:e} vanishes at site {site}, t = {t}")]
    VanishingDenominator { t: f64, site: usize, value: f64 },

    #[error("derivative system is singular or ill-conditioned at t = {t} (condition estimate {condition:e})")]
    IllConditioned { t: f64, condition: f64 },

    #[error("norm drift {drift:e} exceeds limit {limit:e} at t = {t}")]
    NormDrift { t: f64, drift: f64, limit: f64 },

    #[error("{what} requires N <= {limit}, got N = {n}")]
    TooLarge { what: &'static str, n: usize, limit: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("frame angle undefined at t = {t}, site {site}: both atan2 arguments vanish")]
    UndefinedFrame { t: f64, site: usize },

    #[error("sites do not share one B_y profile (site {site} deviates by {deviation:e})")]
    NonUniformSites { site: usize, deviation: f64 },

    #[error("longitudinal schedule out of range [-{limit}, {limit}] at {} point(s): {}", .points.len(), format_points(.points))]
    RangeViolation { limit: f64, points: Vec<(f64, f64)> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_points(points: &[(f64, f64)]) -> String {
    points
        .iter()
        .map(|(s, v)| format!("(s={s:.4}, g'={v:.4})"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
