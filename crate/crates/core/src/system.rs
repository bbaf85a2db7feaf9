//! The two-level system: `H_S = T_c σ_x`, its eigenbasis, and the reduced
//! density matrix.
//!
//! Everything downstream is expressed in the eigenbasis of `H_S`. Index 0 is
//! the lower level (label 1 in the usual notation), index 1 the upper level
//! (label 2). `ρ₁₂ = ⟨1|ρ|2⟩` is stored in [`DensityMatrix::rho12`].
//!
//! Basis caveat: the symmetric localized superposition `(|0⟩+|1⟩)/√2` is an
//! eigenstate of `σ_x` and would carry no eigenbasis coherence. The closed-form
//! solutions, however, start from `ρ₁₂(0) = 1/2`, so [`initial_state`] is the
//! state with every element equal to 1/2 in the working (eigen)basis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    /// Interdot tunneling `T_c`, ps⁻¹.
    pub tunneling: f64,
}

impl QubitParams {
    pub fn new(tunneling: f64) -> Result<Self> {
        if !(tunneling.is_finite() && tunneling > 0.0) {
            return Err(Error::domain("tunneling", tunneling));
        }
        Ok(QubitParams { tunneling })
    }

    /// `T_c = ratio · ω_l`, the dot-size binding used with the phonon baths.
    pub fn bound_to_omega_l(omega_l: f64, ratio: f64) -> Result<Self> {
        Self::new(ratio * omega_l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    /// Level splitting `(E₂ − E₁)/ħ`, ps⁻¹.
    pub omega_21: f64,
    /// `⟨μ|σ_z|ν⟩` in the eigenbasis.
    pub sz: [[f64; 2]; 2],
    /// Level frequencies `E_μ/ħ`, lower first.
    levels: [f64; 2],
}

impl EigenSystem {
    /// Transition frequency `ω_μν = ω_μ − ω_ν` (0-based indices).
    #[inline]
    pub fn transition(&self, mu: usize, nu: usize) -> f64 {
        self.levels[mu] - self.levels[nu]
    }
}

/// Eigenvalues of `T_c σ_x` are `∓T_c` with eigenvectors `(|0⟩ ∓ |1⟩)/√2`;
/// `σ_z` maps one onto the other, so it is purely off-diagonal there.
pub fn diagonalize(params: &QubitParams) -> EigenSystem {
    let tc = params.tunneling;
    EigenSystem {
        omega_21: 2.0 * tc,
        sz: [[0.0, 1.0], [1.0, 0.0]],
        levels: [-tc, tc],
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    pub rho11: Complex64,
    pub rho12: Complex64,
    pub rho21: Complex64,
    pub rho22: Complex64,
}

impl DensityMatrix {
    /// Row-major `[ρ11, ρ12, ρ21, ρ22]`, i.e. flat index `2μ + ν`.
    #[inline]
    pub fn to_array(&self) -> [Complex64; 4] {
        [self.rho11, self.rho12, self.rho21, self.rho22]
    }

    #[inline]
    pub fn from_array(v: [Complex64; 4]) -> Self {
        DensityMatrix {
            rho11: v[0],
            rho12: v[1],
            rho21: v[2],
            rho22: v[3],
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho11 + self.rho22
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (self.rho11 * self.rho11
            + self.rho12 * self.rho21
            + self.rho21 * self.rho12
            + self.rho22 * self.rho22)
            .re
    }

    /// Largest violation of `ρ₂₁ = ρ₁₂*` and of real populations.
    pub fn hermiticity_error(&self) -> f64 {
        (self.rho21 - self.rho12.conj())
            .norm()
            .max(self.rho11.im.abs())
            .max(self.rho22.im.abs())
    }

    /// Largest elementwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

pub fn initial_state() -> DensityMatrix {
    let half = Complex64::new(0.5, 0.0);
    DensityMatrix {
        rho11: half,
        rho12: half,
        rho21: half,
        rho22: half,
    }
}
