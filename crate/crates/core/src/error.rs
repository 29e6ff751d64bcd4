use thiserror::Error;

/// Errors surfaced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("site index {site} out of range for a chain of {n} sites")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("dense workspace of dimension {dim} exceeds the cap of 2^{max_sites} (N = {requested} sites)")]
    DimensionOverflow {
        requested: usize,
        max_sites: usize,
        dim: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("overlapping site labels in tensor product: {0:?}")]
    OverlappingSites(Vec<usize>),

    #[error("matrix is not a valid density operator: {0}")]
    InvalidState(String),

    #[error("observable expectation has non-negligible imaginary part {imag:e}; Hermiticity bug upstream")]
    NonHermitianExpectation { imag: f64 },

    #[error("channel target {target} does not match a state on {got} sites (expected {expected})")]
    TargetMismatch {
        target: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("Kraus decomposition requires finite inverse temperatures")]
    InfiniteTemperatureKraus,

    #[error(
        "fixed-point iteration did not converge: residual {residual:e} after {iterations} iterations \
         (estimated spectral gap {gap_estimate:e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        gap_estimate: f64,
    },

    #[error("eigenvalue-1 subspace of the channel is degenerate (second singular value {second:e}); fixed point not unique")]
    DegenerateFixedPoint { second: f64 },

    #[error("regime undefined: local energy E1 = 0 makes the gap ratio ill-posed")]
    UndefinedRatio,

    #[error("sign pattern (Q_H={q_h:e}, Q_C={q_c:e}, W={w:e}) matches no operating regime; numerics inconsistent")]
    InconsistentRegime { q_h: f64, q_c: f64, w: f64 },

    #[error("ansatz extraction inconsistent: f from Q_C is {from_qc:e}, from Q_H is {from_qh:e}")]
    AnsatzInconsistent { from_qc: f64, from_qh: f64 },

    #[error("zero local energy on the {0} site; heat-per-gap ratio undefined")]
    ZeroLocalEnergy(&'static str),

    #[error("closed form degenerate: {0}")]
    ClosedFormDegenerate(String),

    #[error("survival probabilities violate monotonicity by {violation:e} at (n={n}, m={m})")]
    MonotonicityViolation { n: usize, m: usize, violation: f64 },

    #[error("operation requires the {0} stroke mode")]
    WrongMode(&'static str),

    #[error("subsystem C is empty for a chain of {0} sites")]
    EmptyInterior(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
