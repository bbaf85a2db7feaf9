//! Physical constants and the unit conventions of the crate.
//!
//! Frequencies are angular frequencies in ps⁻¹, times in ps, temperatures in
//! kelvin. The only place ħ and k_B enter is the ratio `ħω/k_BT` used by the
//! Bose function.

use crate::error::{Error, Result};

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// ħ/k_B in ps·K (≈ 7.638233).
pub const HBAR_OVER_KB: f64 = HBAR / BOLTZMANN * 1e12;

/// The exponent `ħω/k_BT` for `omega` in ps⁻¹ and `temperature` in K.
pub fn thermal_ratio(omega: f64, temperature: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::domain("omega", omega));
    }
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::domain("temperature", temperature));
    }
    Ok(HBAR_OVER_KB * omega / temperature)
}

pub fn temperature_from_millikelvin(t_mk: f64) -> Result<f64> {
    if t_mk.is_nan() || t_mk <= 0.0 {
        return Err(Error::domain("temperature [mK]", t_mk));
    }
    Ok(t_mk / 1000.0)
}
