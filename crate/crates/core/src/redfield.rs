//! Redfield relaxation tensor and fixed-step RK4 propagation of
//!
//! ```text
//! dρ_μν/dt = −i ω_μν ρ_μν + Σ_κλ R_μνκλ ρ_κλ
//! ```
//!
//! The tensor is assembled from the `Γ±` rates, which are real (no Lamb-shift
//! terms). No secular approximation is made: the `ρ₁₂ ↔ ρ₂₁` coupling is kept.
//! All indices are 0-based, 0 = lower level.

use num_complex::Complex64;

use crate::bath::{bose_occupation, BathModel};
use crate::error::{Error, Result};
use crate::system::{DensityMatrix, EigenSystem};

/// Largest allowed `h · max(ω₂₁, 2|R₁₂₁₂|)`.
pub const STEP_GUARD: f64 = 0.1;

/// `J(|ω|)(1 + n(|ω|))` for emission (`ω > 0`), `J(|ω|) n(|ω|)` for
/// absorption (`ω < 0`).
fn transition_weight(bath: &BathModel, temperature: f64, omega: f64) -> Result<f64> {
    let w = omega.abs();
    let j = bath.spectral_density(w)?;
    if j == 0.0 {
        return Ok(0.0);
    }
    let n = bose_occupation(w, temperature)?;
    Ok(if omega > 0.0 { j * (1.0 + n) } else { j * n })
}

/// `Γ⁺_λνμκ`, with the rate set by `ω_κμ`. Zero when `μ = κ`.
pub fn gamma_plus(
    eig: &EigenSystem,
    bath: &BathModel,
    temperature: f64,
    lambda: usize,
    nu: usize,
    mu: usize,
    kappa: usize,
) -> Result<f64> {
    if mu == kappa {
        return Ok(0.0);
    }
    let coupling = eig.sz[lambda][nu] * eig.sz[mu][kappa];
    let weight = transition_weight(bath, temperature, eig.transition(kappa, mu))?;
    Ok(0.5 * coupling * weight)
}

/// `Γ⁻_λνμκ`, with the rate set by `ω_λν`. Zero when `λ = ν`.
pub fn gamma_minus(
    eig: &EigenSystem,
    bath: &BathModel,
    temperature: f64,
    lambda: usize,
    nu: usize,
    mu: usize,
    kappa: usize,
) -> Result<f64> {
    if lambda == nu {
        return Ok(0.0);
    }
    let coupling = eig.sz[lambda][nu] * eig.sz[mu][kappa];
    let weight = transition_weight(bath, temperature, eig.transition(lambda, nu))?;
    Ok(0.5 * coupling * weight)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RedfieldTensor {
    /// `r[μ][ν][κ][λ]`, ps⁻¹.
    pub r: [[[[f64; 2]; 2]; 2]; 2],
}

impl RedfieldTensor {
    #[inline]
    pub fn get(&self, mu: usize, nu: usize, kappa: usize, lambda: usize) -> f64 {
        self.r[mu][nu][kappa][lambda]
    }

    /// Largest `|Σ_μ R_μμκλ|` over `(κ, λ)`; zero for a trace-preserving tensor.
    pub fn trace_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..2 {
            for l in 0..2 {
                worst = worst.max((self.r[0][0][k][l] + self.r[1][1][k][l]).abs());
            }
        }
        worst
    }

    /// The 4×4 generator acting on the flat state `[ρ11, ρ12, ρ21, ρ22]`.
    pub fn generator(&self, eig: &EigenSystem) -> [[Complex64; 4]; 4] {
        let mut g = [[Complex64::new(0.0, 0.0); 4]; 4];
        for mu in 0..2 {
            for nu in 0..2 {
                let row = 2 * mu + nu;
                for k in 0..2 {
                    for l in 0..2 {
                        g[row][2 * k + l] = Complex64::new(self.r[mu][nu][k][l], 0.0);
                    }
                }
                g[row][row] -= Complex64::new(0.0, eig.transition(mu, nu));
            }
        }
        g
    }

    /// Right-hand side of the master equation at `rho`.
    pub fn time_derivative(&self, eig: &EigenSystem, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_array(matvec(&self.generator(eig), &rho.to_array()))
    }
}

/// Assemble `R_μνκλ = Γ⁺_λνμκ + Γ⁻_λνμκ − δ_νλ Σ_α Γ⁺_μαακ − δ_μκ Σ_α Γ⁻_λααν`.
pub fn build_tensor(
    eig: &EigenSystem,
    bath: &BathModel,
    temperature: f64,
) -> Result<RedfieldTensor> {
    let gp = |l, n, m, k| gamma_plus(eig, bath, temperature, l, n, m, k);
    let gm = |l, n, m, k| gamma_minus(eig, bath, temperature, l, n, m, k);

    let mut r = [[[[0.0; 2]; 2]; 2]; 2];
    #[allow(clippy::needless_range_loop)]
    for mu in 0..2 {
        for nu in 0..2 {
            for kappa in 0..2 {
                for lambda in 0..2 {
                    let mut value = gp(lambda, nu, mu, kappa)? + gm(lambda, nu, mu, kappa)?;
                    if nu == lambda {
                        for alpha in 0..2 {
                            value -= gp(mu, alpha, alpha, kappa)?;
                        }
                    }
                    if mu == kappa {
                        for alpha in 0..2 {
                            value -= gm(lambda, alpha, alpha, nu)?;
                        }
                    }
                    r[mu][nu][kappa][lambda] = value;
                }
            }
        }
    }
    Ok(RedfieldTensor { r })
}

/// Sampled reduced dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Invalid("empty trajectory".into()));
        }
        if times.len() != states.len() {
            return Err(Error::Invalid(format!(
                "{} times but {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Invalid(
                "trajectory times must be strictly increasing".into(),
            ));
        }
        Ok(Trajectory { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Largest elementwise deviation between two trajectories on the same grid.
    pub fn max_abs_diff(&self, other: &Trajectory) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::Invalid(
                "trajectories sampled on different grids".into(),
            ));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max))
    }
}

/// Smallest step count that satisfies the step guard.
pub fn min_steps(tensor: &RedfieldTensor, eig: &EigenSystem, t_end: f64) -> usize {
    let rate = eig.omega_21.max(2.0 * tensor.get(0, 1, 0, 1).abs());
    (t_end * rate / STEP_GUARD).ceil().max(1.0) as usize
}

/// RK4 integration with every step recorded.
pub fn propagate_numeric(
    tensor: &RedfieldTensor,
    eig: &EigenSystem,
    rho0: &DensityMatrix,
    t_end: f64,
    n_steps: usize,
) -> Result<Trajectory> {
    propagate_strided(tensor, eig, rho0, t_end, n_steps, 1)
}

/// RK4 integration recording every `stride`-th step (and `t = 0`).
pub fn propagate_strided(
    tensor: &RedfieldTensor,
    eig: &EigenSystem,
    rho0: &DensityMatrix,
    t_end: f64,
    n_steps: usize,
    stride: usize,
) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::domain("t_end", t_end));
    }
    if n_steps == 0 {
        return Err(Error::Invalid("n_steps must be at least 1".into()));
    }
    if stride == 0 || !n_steps.is_multiple_of(stride) {
        return Err(Error::Invalid(format!(
            "stride {stride} must be positive and divide n_steps {n_steps}"
        )));
    }
    let h = t_end / n_steps as f64;
    let required = min_steps(tensor, eig, t_end);
    if n_steps < required {
        return Err(Error::StepGuard {
            step: h,
            n_steps,
            min_steps: required,
        });
    }

    let gen = tensor.generator(eig);
    let n_samples = n_steps / stride + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    times.push(0.0);
    states.push(*rho0);

    let mut y = rho0.to_array();
    for step in 1..=n_steps {
        y = rk4_step(&gen, &y, h);
        if step % stride == 0 {
            times.push(step as f64 * h);
            states.push(DensityMatrix::from_array(y));
        }
    }
    Trajectory::new(times, states)
}

#[inline]
fn matvec(m: &[[Complex64; 4]; 4], v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
    }
    out
}

#[inline]
fn axpy(y: &[Complex64; 4], a: f64, x: &[Complex64; 4]) -> [Complex64; 4] {
    [
        y[0] + x[0] * a,
        y[1] + x[1] * a,
        y[2] + x[2] * a,
        y[3] + x[3] * a,
    ]
}

/// One classical Runge–Kutta step of `y' = G y`.
#[inline]
fn rk4_step(gen: &[[Complex64; 4]; 4], y: &[Complex64; 4], h: f64) -> [Complex64; 4] {
    let k1 = matvec(gen, y);
    let k2 = matvec(gen, &axpy(y, 0.5 * h, &k1));
    let k3 = matvec(gen, &axpy(y, 0.5 * h, &k2));
    let k4 = matvec(gen, &axpy(y, h, &k3));
    let sixth = h / 6.0;
    let mut out = *y;
    for i in 0..4 {
        out[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * sixth;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::bose_occupation;
    use crate::system::{diagonalize, initial_state, QubitParams};
    use approx::assert_relative_eq;

    fn setup(bath: BathModel, temperature: f64) -> (EigenSystem, RedfieldTensor) {
        let eig = diagonalize(&QubitParams::new(0.05).unwrap());
        let tensor = build_tensor(&eig, &bath, temperature).unwrap();
        (eig, tensor)
    }

    #[test]
    fn gamma_golden_values() {
        let eig = diagonalize(&QubitParams::new(0.05).unwrap());
        let bath = BathModel::default_pcpb(0.5).unwrap();
        // labels (2,1,1,2) → 0-based (1,0,0,1)
        let gp = gamma_plus(&eig, &bath, 0.030, 1, 0, 0, 1).unwrap();
        assert_relative_eq!(gp, 2.044_325_383_943_989e-3, max_relative = 1e-12);
        let gm = gamma_minus(&eig, &bath, 0.030, 1, 0, 0, 1).unwrap();
        assert_relative_eq!(gm, gp, max_relative = 1e-15);
        let absorb = gamma_plus(&eig, &bath, 0.030, 0, 1, 1, 0).unwrap();
        assert_relative_eq!(absorb, 1.790_918_494_756_278e-14, max_relative = 1e-10);
    }

    #[test]
    fn gamma_vanishes_on_zero_frequency_tuples() {
        let eig = diagonalize(&QubitParams::new(0.05).unwrap());
        let bath = BathModel::default_ohmic(0.04).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    assert_eq!(gamma_plus(&eig, &bath, 0.1, a, b, c, c).unwrap(), 0.0);
                    assert_eq!(gamma_minus(&eig, &bath, 0.1, c, c, a, b).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn gamma_minus_mirrors_gamma_plus() {
        // Γ⁻ with the frequency carried by (λ,ν) equals Γ⁺ with it carried by (μ,κ).
        let eig = diagonalize(&QubitParams::new(0.05).unwrap());
        let bath = BathModel::default_pcpb(0.5).unwrap();
        for l in 0..2 {
            for n in 0..2 {
                for m in 0..2 {
                    for k in 0..2 {
                        let minus = gamma_minus(&eig, &bath, 0.3, l, n, m, k).unwrap();
                        let plus = gamma_plus(&eig, &bath, 0.3, m, k, n, l).unwrap();
                        assert_eq!(minus, plus, "tuple {l}{n}{m}{k}");
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_block_structure() {
        let bath = BathModel::default_pcpb(0.5).unwrap();
        let t = 0.3;
        let (eig, tensor) = setup(bath, t);
        let j = bath.spectral_density(0.1).unwrap();
        let n = bose_occupation(0.1, t).unwrap();
        let chi = j * (1.0 + 2.0 * n) / 2.0;
        let tol = 1e-15;
        assert_relative_eq!(tensor.get(0, 0, 0, 0), -j * n, max_relative = tol);
        assert_relative_eq!(tensor.get(0, 0, 1, 1), j * (1.0 + n), max_relative = tol);
        assert_relative_eq!(tensor.get(1, 1, 1, 1), -j * (1.0 + n), max_relative = tol);
        assert_relative_eq!(tensor.get(1, 1, 0, 0), j * n, max_relative = tol);
        assert_relative_eq!(tensor.get(0, 1, 0, 1), -chi, max_relative = tol);
        assert_relative_eq!(tensor.get(1, 0, 1, 0), -chi, max_relative = tol);
        assert_relative_eq!(tensor.get(0, 1, 1, 0), chi, max_relative = tol);
        assert_relative_eq!(tensor.get(1, 0, 0, 1), chi, max_relative = tol);
        // population/coherence blocks decouple
        for (a, b) in [(0, 0), (1, 1)] {
            for (c, d) in [(0, 1), (1, 0)] {
                assert_eq!(tensor.get(a, b, c, d), 0.0);
                assert_eq!(tensor.get(c, d, a, b), 0.0);
            }
        }
        assert!(tensor.trace_defect() < 1e-12 * j);
        let _ = eig;
    }

    #[test]
    fn tensor_golden_entries() {
        let (_, tensor) = setup(BathModel::default_pcpb(0.5).unwrap(), 0.030);
        assert_relative_eq!(
            tensor.get(0, 1, 0, 1),
            -2.044_325_383_961_898e-3,
            max_relative = 1e-12
        );
        let (_, tensor) = setup(BathModel::default_ohmic(0.04).unwrap(), 0.030);
        assert_relative_eq!(
            tensor.get(0, 0, 1, 1),
            5.413_411_329_464_508e-4,
            max_relative = 1e-10
        );
    }

    #[test]
    fn zero_coupling_gives_zero_tensor() {
        let (_, tensor) = setup(BathModel::piezoelectric(0.0, 0.02, 0.5).unwrap(), 0.03);
        assert_eq!(tensor.r, [[[[0.0; 2]; 2]; 2]; 2]);
    }

    #[test]
    fn isolated_evolution_rotates_coherence() {
        let (eig, tensor) = setup(BathModel::default_ohmic(0.0).unwrap(), 0.03);
        let traj = propagate_numeric(&tensor, &eig, &initial_state(), 200.0, 20_000).unwrap();
        for (t, rho) in traj.iter() {
            let exact = Complex64::new(0.0, eig.omega_21 * t).exp() * 0.5;
            assert!((rho.rho12 - exact).norm() < 1e-12, "t = {t}");
            assert!((rho.rho11.re - 0.5).abs() < 1e-15);
            assert!((rho.rho22.re - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn step_guard_names_required_steps() {
        let (eig, tensor) = setup(BathModel::default_pcpb(0.5).unwrap(), 0.03);
        let err = propagate_numeric(&tensor, &eig, &initial_state(), 1000.0, 100).unwrap_err();
        match err {
            Error::StepGuard { min_steps, .. } => assert_eq!(min_steps, 1000),
            other => panic!("unexpected {other:?}"),
        }
        assert!(propagate_numeric(&tensor, &eig, &initial_state(), 1000.0, 1000).is_ok());
        assert!(propagate_numeric(&tensor, &eig, &initial_state(), 1000.0, 0).is_err());
        assert!(propagate_numeric(&tensor, &eig, &initial_state(), -1.0, 10).is_err());
        assert!(propagate_strided(&tensor, &eig, &initial_state(), 1000.0, 1000, 3).is_err());
    }

    #[test]
    fn trajectory_sampling_and_trace() {
        let (eig, tensor) = setup(BathModel::default_pcpb(0.7).unwrap(), 1.0);
        let rho0 = initial_state();
        let traj = propagate_strided(&tensor, &eig, &rho0, 500.0, 10_000, 100).unwrap();
        assert_eq!(traj.len(), 101);
        assert_eq!(traj.states()[0], rho0);
        assert_eq!(traj.times()[100], 500.0);
        for (_, rho) in traj.iter() {
            assert!((rho.trace() - 1.0).norm() < 1e-10);
            assert!(rho.hermiticity_error() < 1e-10);
        }
    }

    #[test]
    fn trajectory_validation() {
        let s = initial_state();
        assert!(Trajectory::new(vec![], vec![]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![s, s]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![s]).is_err());
        assert!(Trajectory::new(vec![0.0, 1.0], vec![s, s]).is_ok());
    }
}
