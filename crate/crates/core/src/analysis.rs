//! Decoherence times, equilibrium populations and parameter sweeps.
//!
//! The decoherence time is the 1/e time of the `|ρ₁₂|` envelope, `T₂ = 1/χ`.
//! [`decoherence_time_empirical`] recovers it from a sampled trajectory
//! without knowing `χ`.

use serde::Serialize;

use crate::analytic::{chi_rate, closed_form_trajectory, ChiRate};
use crate::bath::BathModel;
use crate::error::{Error, Result};
use crate::redfield::{build_tensor, propagate_strided, Trajectory};
use crate::system::{diagonalize, initial_state, EigenSystem, QubitParams};

/// Default `T_c/ω_l` binding for the phonon baths.
pub const DEFAULT_TUNNELING_RATIO: f64 = 0.1;

/// Sign changes of `Re ρ₁₂` needed to treat a trajectory as oscillating.
const MIN_SIGN_CHANGES: usize = 2;
/// Smallest total log-decay across the fit window counted as real decay.
const MIN_LOG_DECAY: f64 = 1e-6;
/// Samples with `|ρ₁₂|` below `½e⁻⁸` are left out of the envelope fit, where
/// integration error would start to bias the log.
const FIT_FLOOR_LOG: f64 = -8.0;

pub fn decoherence_time_analytic(rate: &ChiRate) -> Result<f64> {
    if rate.chi > 0.0 {
        Ok(1.0 / rate.chi)
    } else {
        Err(Error::NoDecoherence)
    }
}

/// Envelope time of the coherence from a trajectory.
///
/// When `Re ρ₁₂` oscillates (underdamped), `ln|ρ₁₂|` is fitted by least
/// squares over every sample above the fit floor and `−1/slope` returned.
/// `|ρ₁₂|` is `½e^{−χt}` times a factor oscillating by `O(χ/Ω)` about one, so
/// the fit needs no resolved peaks and tolerates coarse, aliased sampling.
/// Otherwise (overdamped) the first crossing of `|ρ₁₂| = ½e⁻¹` is located by
/// linear interpolation.
pub fn decoherence_time_empirical(traj: &Trajectory) -> Result<f64> {
    let times = traj.times();
    let amps: Vec<f64> = traj.states().iter().map(|s| s.rho12.norm()).collect();

    let sign_changes = traj
        .states()
        .windows(2)
        .filter(|w| (w[0].rho12.re < 0.0) != (w[1].rho12.re < 0.0))
        .count();
    if sign_changes >= MIN_SIGN_CHANGES {
        let floor = 0.5 * FIT_FLOOR_LOG.exp();
        let points: Vec<(f64, f64)> = times
            .iter()
            .zip(&amps)
            .take_while(|(_, &a)| a >= floor)
            .map(|(&t, &a)| (t, a.ln()))
            .collect();
        if points.len() >= 2 {
            let slope = least_squares_slope(&points);
            let span = points[points.len() - 1].0 - points[0].0;
            if slope < 0.0 && -slope * span > MIN_LOG_DECAY {
                return Ok(-1.0 / slope);
            }
        }
    }

    let threshold = 0.5 * (-1.0f64).exp();
    if let Some(i) = amps.iter().position(|&a| a < threshold) {
        if i == 0 {
            return Ok(times[0]);
        }
        let (t0, t1) = (times[i - 1], times[i]);
        let (a0, a1) = (amps[i - 1], amps[i]);
        return Ok(t0 + (a0 - threshold) / (a0 - a1) * (t1 - t0));
    }

    // Extrapolate the average decay rate to name a sufficient t_end.
    let (first, last) = (amps[0], amps[amps.len() - 1]);
    let span = times[times.len() - 1] - times[0];
    if span > 0.0 && first > 0.0 && last > 0.0 && first > last {
        let rate = (first / last).ln() / span;
        if rate * span > MIN_LOG_DECAY {
            let needed = times[0] + (first / threshold).ln() / rate;
            return Err(Error::TrajectoryTooShort {
                min_t_end: needed.max(times[times.len() - 1]),
            });
        }
    }
    Err(Error::NoDecoherence)
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), &(x, y)| (sx + x / n, sy + y / n));
    let (sxy, sxx) = points.iter().fold((0.0, 0.0), |(sxy, sxx), &(x, y)| {
        (sxy + (x - mx) * (y - my), sxx + (x - mx) * (x - mx))
    });
    sxy / sxx
}

/// Stationary populations `((1+n)/(1+2n), n/(1+2n))`.
pub fn equilibrium_populations(n_occ: f64) -> (f64, f64) {
    if n_occ.is_infinite() {
        return (0.5, 0.5);
    }
    let upper = n_occ / (1.0 + 2.0 * n_occ);
    (1.0 - upper, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    ClosedForm,
    Numeric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Dot-size frequency ω_l, ps⁻¹ (phonon baths).
    OmegaL,
    /// Ohmic damping strength η.
    Eta,
    /// Temperature, K.
    Temperature,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::OmegaL => "omega_l",
            SweepParameter::Eta => "eta",
            SweepParameter::Temperature => "temperature",
        }
    }
}

/// How the tunneling is chosen for a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitBinding {
    Fixed(QubitParams),
    /// `T_c = ratio · ω_l`, following the bath's ω_l when it is swept.
    OmegaL {
        omega_l: f64,
        ratio: f64,
    },
}

impl QubitBinding {
    pub fn resolve(&self) -> Result<QubitParams> {
        match *self {
            QubitBinding::Fixed(p) => QubitParams::new(p.tunneling),
            QubitBinding::OmegaL { omega_l, ratio } => {
                QubitParams::bound_to_omega_l(omega_l, ratio)
            }
        }
    }
}

/// One fully specified parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointSpec {
    pub bath: BathModel,
    pub qubit: QubitBinding,
    /// K.
    pub temperature: f64,
}

impl PointSpec {
    /// The point with `parameter` replaced by `value`.
    pub fn with(&self, parameter: SweepParameter, value: f64) -> Result<PointSpec> {
        let mut point = *self;
        match parameter {
            SweepParameter::OmegaL => {
                point.bath = self.bath.with_omega_l(value)?;
                if let QubitBinding::OmegaL { ratio, .. } = self.qubit {
                    point.qubit = QubitBinding::OmegaL {
                        omega_l: value,
                        ratio,
                    };
                }
            }
            SweepParameter::Eta => point.bath = self.bath.with_eta(value)?,
            SweepParameter::Temperature => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::domain("temperature", value));
                }
                point.temperature = value;
            }
        }
        Ok(point)
    }

    pub fn eigensystem(&self) -> Result<EigenSystem> {
        self.bath.validate()?;
        Ok(diagonalize(&self.qubit.resolve()?))
    }
}

/// Uniform time grid shared by both engines. `n_steps` is the RK4 step count;
/// samples are taken every `stride` steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_end: f64,
    pub n_steps: usize,
    pub stride: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize, stride: usize) -> Result<Self> {
        let grid = TimeGrid {
            t_end,
            n_steps,
            stride,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::domain("t_end", self.t_end));
        }
        if self.n_steps == 0 {
            return Err(Error::Invalid("n_steps must be at least 1".into()));
        }
        if self.stride == 0 || !self.n_steps.is_multiple_of(self.stride) {
            return Err(Error::Invalid(format!(
                "stride {} must be positive and divide n_steps {}",
                self.stride, self.n_steps
            )));
        }
        Ok(())
    }

    /// Sample times, computed as `k · stride · h` exactly as the integrator does.
    pub fn sample_times(&self) -> Vec<f64> {
        let h = self.t_end / self.n_steps as f64;
        (0..=self.n_steps / self.stride)
            .map(|k| (k * self.stride) as f64 * h)
            .collect()
    }
}

/// Everything computed for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointOutcome {
    pub point: PointSpec,
    pub rate: ChiRate,
    pub t2_analytic: f64,
    pub t2_empirical: Option<f64>,
    pub max_abs_diff: Option<f64>,
    pub closed_form: Option<Trajectory>,
    pub numeric: Option<Trajectory>,
}

/// Rate and trajectories for one point, without any T₂ extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PointTrajectories {
    pub rate: ChiRate,
    pub closed_form: Option<Trajectory>,
    pub numeric: Option<Trajectory>,
}

impl PointTrajectories {
    /// Largest closed-form/numeric discrepancy, when both were computed.
    pub fn max_abs_diff(&self) -> Result<Option<f64>> {
        match (&self.closed_form, &self.numeric) {
            (Some(a), Some(b)) => Ok(Some(a.max_abs_diff(b)?)),
            _ => Ok(None),
        }
    }
}

pub fn point_trajectories(
    point: &PointSpec,
    grid: &TimeGrid,
    engine: Engine,
) -> Result<PointTrajectories> {
    grid.validate()?;
    let eig = point.eigensystem()?;
    let rate = chi_rate(&eig, &point.bath, point.temperature)?;

    let closed_form = match engine {
        Engine::ClosedForm | Engine::Both => {
            Some(closed_form_trajectory(&rate, &grid.sample_times())?)
        }
        Engine::Numeric => None,
    };
    let numeric = match engine {
        Engine::Numeric | Engine::Both => {
            let tensor = build_tensor(&eig, &point.bath, point.temperature)?;
            Some(propagate_strided(
                &tensor,
                &eig,
                &initial_state(),
                grid.t_end,
                grid.n_steps,
                grid.stride,
            )?)
        }
        Engine::ClosedForm => None,
    };
    Ok(PointTrajectories {
        rate,
        closed_form,
        numeric,
    })
}

/// Evaluate one point with the requested engine(s).
///
/// The empirical T₂ comes from the numeric trajectory when there is one.
pub fn evaluate_point(point: &PointSpec, grid: &TimeGrid, engine: Engine) -> Result<PointOutcome> {
    let trajectories = point_trajectories(point, grid, engine)?;
    let t2_analytic = decoherence_time_analytic(&trajectories.rate)?;
    let max_abs_diff = trajectories.max_abs_diff()?;
    let PointTrajectories {
        rate,
        closed_form,
        numeric,
    } = trajectories;
    let t2_empirical = numeric
        .as_ref()
        .or(closed_form.as_ref())
        .map(decoherence_time_empirical)
        .transpose()?;

    Ok(PointOutcome {
        point: *point,
        rate,
        t2_analytic,
        t2_empirical,
        max_abs_diff,
        closed_form,
        numeric,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: PointSpec,
    pub parameter: SweepParameter,
    /// Units: ps⁻¹ for ω_l, dimensionless for η, K for temperature.
    pub values: Vec<f64>,
    pub grid: TimeGrid,
    pub engine: Engine,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Invalid("sweep has no values".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("sweep values must be finite".into()));
        }
        if self.values.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(
                "sweep values must be strictly increasing".into(),
            ));
        }
        self.grid.validate()?;
        self.base.eigensystem()?;
        if !(self.base.temperature > 0.0) {
            return Err(Error::domain("temperature", self.base.temperature));
        }
        Ok(())
    }
}

/// One row of a sweep, in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub bath: BathModel,
    pub tunneling: f64,
    pub temperature: f64,
    pub omega_21: f64,
    pub n_occ: f64,
    pub chi: f64,
    pub t2_analytic: f64,
    pub t2_empirical: Option<f64>,
    pub max_abs_diff: Option<f64>,
    #[serde(skip)]
    pub closed_form: Option<Trajectory>,
    #[serde(skip)]
    pub numeric: Option<Trajectory>,
}

impl SweepRow {
    fn from_outcome(value: f64, outcome: PointOutcome) -> Result<Self> {
        Ok(SweepRow {
            value,
            bath: outcome.point.bath,
            tunneling: outcome.point.qubit.resolve()?.tunneling,
            temperature: outcome.point.temperature,
            omega_21: outcome.rate.omega_21,
            n_occ: outcome.rate.n_occ,
            chi: outcome.rate.chi,
            t2_analytic: outcome.t2_analytic,
            t2_empirical: outcome.t2_empirical,
            max_abs_diff: outcome.max_abs_diff,
            closed_form: outcome.closed_form,
            numeric: outcome.numeric,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: SweepParameter,
    pub engine: Engine,
    pub rows: Vec<SweepRow>,
}

fn evaluate_value(spec: &SweepSpec, value: f64) -> Result<SweepRow> {
    let point = spec.base.with(spec.parameter, value)?;
    SweepRow::from_outcome(value, evaluate_point(&point, &spec.grid, spec.engine)?)
}

fn assemble(spec: &SweepSpec, results: Vec<Result<SweepRow>>) -> Result<SweepResult> {
    let mut rows = Vec::with_capacity(results.len());
    for (value, result) in spec.values.iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(err) => {
                return Err(Error::SweepPoint {
                    parameter: spec.parameter.name(),
                    value: *value,
                    source: Box::new(err),
                    completed: rows,
                })
            }
        }
    }
    Ok(SweepResult {
        parameter: spec.parameter,
        engine: spec.engine,
        rows,
    })
}

/// Evaluate the sweep points one after another.
pub fn run_sweep_sequential(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let results = spec
        .values
        .iter()
        .map(|&v| evaluate_value(spec, v))
        .collect();
    assemble(spec, results)
}

/// Evaluate the sweep points on the rayon pool. Row order and contents are
/// identical to [`run_sweep_sequential`].
#[cfg(feature = "parallel")]
pub fn run_sweep_parallel(spec: &SweepSpec) -> Result<SweepResult> {
    use rayon::prelude::*;
    spec.validate()?;
    let results = spec
        .values
        .par_iter()
        .map(|&v| evaluate_value(spec, v))
        .collect();
    assemble(spec, results)
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    #[cfg(feature = "parallel")]
    {
        run_sweep_parallel(spec)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_sweep_sequential(spec)
    }
}
