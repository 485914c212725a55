use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("track does not close: residual {residual:.3} m (limit {limit} m)")]
    NonClosure { residual: f64, limit: f64 },

    #[error("no track projection within {max_dist} m of ({x:.1}, {y:.1})")]
    OffTrack { x: f64, y: f64, max_dist: f64 },

    #[error("numerical divergence at t = {t:.3} s: {what}")]
    NumericalDivergence { t: f64, what: String },

    #[error("steady state not attainable: a_y target {target:.2} m/s² beyond grip limit")]
    NotAttainable { target: f64 },

    #[error("infeasible track: v_target {v:.2} m/s below 1 m/s at s = {s:.1} m")]
    InfeasibleTrack { s: f64, v: f64 },

    #[error("regressor matrix rank {rank} < {needed} (degenerate sample set)")]
    RankDeficient { rank: usize, needed: usize },

    #[error("training diverged at epoch {epoch}: loss not finite")]
    Diverged { epoch: usize },

    #[error("zero variance in series: {what}")]
    ZeroVariance { what: String },

    #[error("closed-loop failure: |lateral error| {error:.3} m >= {threshold} m at s = {s:.1} m (lap {lap})")]
    TrackingFailure {
        error: f64,
        threshold: f64,
        s: f64,
        lap: i64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown controller '{0}' (registered: {1})")]
    UnknownController(String, String),

    #[error("malformed file {path}: {what}")]
    Parse { path: String, what: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
