use thiserror::Error;

use crate::analysis::SweepRow;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the physical model.
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    /// Structurally invalid input (grids, sweeps, trajectories).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// RK4 step too coarse for the stability/accuracy guard.
    #[error(
        "step size guard violated: h = {step} ps with n_steps = {n_steps}; \
         use n_steps >= {min_steps}"
    )]
    StepGuard {
        step: f64,
        n_steps: usize,
        min_steps: usize,
    },

    /// Not enough decay in a trajectory to extract a decoherence time.
    #[error("trajectory too short to extract a decoherence time; use t_end >= {min_t_end} ps")]
    TrajectoryTooShort { min_t_end: f64 },

    /// The coherence does not decay at all (χ = 0 or an isolated qubit).
    #[error("no decoherence: the coherence does not decay")]
    NoDecoherence,

    /// A sweep point failed; `completed` holds the rows evaluated before it.
    #[error("sweep aborted at {parameter} = {value}: {source}")]
    SweepPoint {
        parameter: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
        completed: Vec<SweepRow>,
    },
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64) -> Self {
        Error::Domain { what, value }
    }

    /// The innermost error, looking through sweep-point wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::SweepPoint { source, .. } => source.root(),
            other => other,
        }
    }
}
