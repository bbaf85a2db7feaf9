//! Decoherence of a double-quantum-dot charge qubit under the Redfield
//! master equation.
//!
//! The qubit `H_S = T_c σ_x` couples through `σ_z` to one of three bosonic
//! baths (piezoelectric phonons, deformation phonons, Ohmic). Two independent
//! routes compute the reduced dynamics:
//!
//! * [`analytic`]: closed-form populations and coherences driven by the rate
//!   `χ = J(ω₂₁)(1 + 2n(ω₂₁))/2`;
//! * [`redfield`]: the full 16-entry Redfield tensor assembled from the `Γ±`
//!   rules and integrated with fixed-step RK4.
//!
//! [`analysis`] extracts decoherence times and runs parameter sweeps, in
//! parallel when the `parallel` feature (default) is enabled.
//!
//! Units: frequencies and rates in ps⁻¹, times in ps, temperatures in K, and
//! `ħ = 1` inside all dynamical equations. See [`units`].

// `!(x > 0.0)` is used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod analytic;
pub mod bath;
pub mod error;
pub mod redfield;
pub mod system;
pub mod units;

pub use analysis::{
    decoherence_time_analytic, decoherence_time_empirical, equilibrium_populations, evaluate_point,
    point_trajectories, run_sweep, run_sweep_sequential, Engine, PointOutcome, PointSpec,
    PointTrajectories, QubitBinding, SweepParameter, SweepResult, SweepRow, SweepSpec, TimeGrid,
};
pub use analytic::{chi_rate, closed_form_rdm, closed_form_trajectory, ChiRate};
pub use bath::{bose_occupation, BathModel, MaterialConstants};
pub use error::{Error, Result};
pub use redfield::{build_tensor, propagate_numeric, RedfieldTensor, Trajectory};
pub use system::{diagonalize, initial_state, DensityMatrix, EigenSystem, QubitParams};
