//! Bath spectral densities and thermal occupation.
//!
//! All three families are evaluated as rates in ps⁻¹. For the deformation
//! bath the prefactor `g_df·ω³` is taken numerically with `g_df` in the same
//! "ps⁻²" bookkeeping as the piezoelectric case, so the printed magnitudes
//! (0.035 and 0.029) can be used directly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::thermal_ratio;

/// Piezoelectric coupling prefactor, ps⁻².
pub const DEFAULT_G_PZ: f64 = 0.035;
/// Deformation coupling prefactor, ps⁻².
pub const DEFAULT_G_DF: f64 = 0.029;
/// `s/d` for the dot separation, ps⁻¹.
pub const DEFAULT_OMEGA_D: f64 = 0.02;
/// Ohmic cutoff, ps⁻¹.
pub const DEFAULT_OMEGA_C: f64 = 0.05;

const SINC_SERIES_LIMIT: f64 = 1e-4;
const BOSE_LARGE: f64 = 700.0;
const BOSE_SMALL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum BathModel {
    /// Piezoelectric-coupling phonons:
    /// `g ω [1 − sinc(ω/ω_d)] exp(−ω²/2ω_l²)`.
    #[serde(rename = "pcpb")]
    Piezoelectric { g: f64, omega_d: f64, omega_l: f64 },
    /// Deformation-coupling phonons: as above with `g ω³`.
    #[serde(rename = "dcpb")]
    Deformation { g: f64, omega_d: f64, omega_l: f64 },
    /// Power law with exponential cutoff: `η ω^s exp(−ω/ω_c)`.
    #[serde(rename = "ohmic")]
    Ohmic {
        eta: f64,
        omega_c: f64,
        #[serde(default = "default_exponent")]
        s_exponent: f64,
    },
}

fn default_exponent() -> f64 {
    1.0
}

impl BathModel {
    pub fn piezoelectric(g: f64, omega_d: f64, omega_l: f64) -> Result<Self> {
        let model = BathModel::Piezoelectric {
            g,
            omega_d,
            omega_l,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn deformation(g: f64, omega_d: f64, omega_l: f64) -> Result<Self> {
        let model = BathModel::Deformation {
            g,
            omega_d,
            omega_l,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn ohmic(eta: f64, omega_c: f64) -> Result<Self> {
        Self::power_law(eta, omega_c, 1.0)
    }

    pub fn power_law(eta: f64, omega_c: f64, s_exponent: f64) -> Result<Self> {
        let model = BathModel::Ohmic {
            eta,
            omega_c,
            s_exponent,
        };
        model.validate()?;
        Ok(model)
    }

    /// Piezoelectric bath with the default `g_pz` and `ω_d`.
    pub fn default_pcpb(omega_l: f64) -> Result<Self> {
        Self::piezoelectric(DEFAULT_G_PZ, DEFAULT_OMEGA_D, omega_l)
    }

    /// Deformation bath with the default `g_df` and `ω_d`.
    pub fn default_dcpb(omega_l: f64) -> Result<Self> {
        Self::deformation(DEFAULT_G_DF, DEFAULT_OMEGA_D, omega_l)
    }

    /// Ohmic bath with the default cutoff.
    pub fn default_ohmic(eta: f64) -> Result<Self> {
        Self::ohmic(eta, DEFAULT_OMEGA_C)
    }

    pub fn validate(&self) -> Result<()> {
        fn non_negative(what: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::domain(what, v))
            }
        }
        fn positive(what: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(what, v))
            }
        }
        match *self {
            BathModel::Piezoelectric {
                g,
                omega_d,
                omega_l,
            }
            | BathModel::Deformation {
                g,
                omega_d,
                omega_l,
            } => {
                non_negative("g", g)?;
                positive("omega_d", omega_d)?;
                positive("omega_l", omega_l)
            }
            BathModel::Ohmic {
                eta,
                omega_c,
                s_exponent,
            } => {
                non_negative("eta", eta)?;
                positive("omega_c", omega_c)?;
                positive("s_exponent", s_exponent)
            }
        }
    }

    /// Short family name as used in config files.
    pub fn kind(&self) -> &'static str {
        match self {
            BathModel::Piezoelectric { .. } => "pcpb",
            BathModel::Deformation { .. } => "dcpb",
            BathModel::Ohmic { .. } => "ohmic",
        }
    }

    pub fn omega_l(&self) -> Option<f64> {
        match *self {
            BathModel::Piezoelectric { omega_l, .. } | BathModel::Deformation { omega_l, .. } => {
                Some(omega_l)
            }
            BathModel::Ohmic { .. } => None,
        }
    }

    /// Copy of the model with the dot-size frequency replaced.
    pub fn with_omega_l(&self, value: f64) -> Result<Self> {
        let model = match *self {
            BathModel::Piezoelectric { g, omega_d, .. } => BathModel::Piezoelectric {
                g,
                omega_d,
                omega_l: value,
            },
            BathModel::Deformation { g, omega_d, .. } => BathModel::Deformation {
                g,
                omega_d,
                omega_l: value,
            },
            BathModel::Ohmic { .. } => {
                return Err(Error::Invalid("ohmic bath has no omega_l".into()));
            }
        };
        model.validate()?;
        Ok(model)
    }

    /// Copy of the model with the Ohmic damping strength replaced.
    pub fn with_eta(&self, value: f64) -> Result<Self> {
        let model = match *self {
            BathModel::Ohmic {
                omega_c,
                s_exponent,
                ..
            } => BathModel::Ohmic {
                eta: value,
                omega_c,
                s_exponent,
            },
            _ => return Err(Error::Invalid(format!("{} bath has no eta", self.kind()))),
        };
        model.validate()?;
        Ok(model)
    }

    /// `J(ω)` in ps⁻¹. Exactly zero at `ω = 0` for every family.
    pub fn spectral_density(&self, omega: f64) -> Result<f64> {
        if omega.is_nan() || omega < 0.0 {
            return Err(Error::domain("omega", omega));
        }
        if omega == 0.0 {
            return Ok(0.0);
        }
        let value = match *self {
            BathModel::Piezoelectric {
                g,
                omega_d,
                omega_l,
            } => g * omega * one_minus_sinc(omega / omega_d) * gaussian_cutoff(omega, omega_l),
            BathModel::Deformation {
                g,
                omega_d,
                omega_l,
            } => {
                g * omega.powi(3)
                    * one_minus_sinc(omega / omega_d)
                    * gaussian_cutoff(omega, omega_l)
            }
            BathModel::Ohmic {
                eta,
                omega_c,
                s_exponent,
            } => eta * omega.powf(s_exponent) * (-omega / omega_c).exp(),
        };
        Ok(value)
    }
}

fn gaussian_cutoff(omega: f64, omega_l: f64) -> f64 {
    (-omega * omega / (2.0 * omega_l * omega_l)).exp()
}

/// `1 − sin(x)/x`, accurate to a few ulps for all x.
pub(crate) fn one_minus_sinc(x: f64) -> f64 {
    let ax = x.abs();
    let x2 = x * x;
    if ax < SINC_SERIES_LIMIT {
        // sinc ≈ 1 − x²/6 + x⁴/120
        x2 / 6.0 - x2 * x2 / 120.0
    } else if ax < 1.0 {
        // (x − sin x)/x = Σ_{k≥1} (−1)^{k+1} x^{2k} / (2k+1)!
        let mut term = x2 / 6.0;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > 1e-18 * sum {
            term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
            sum += term;
            k += 1.0;
        }
        sum
    } else {
        1.0 - x.sin() / x
    }
}

/// Bose–Einstein occupation `1/(e^{ħω/k_BT} − 1)`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::domain("omega", omega));
    }
    let x = thermal_ratio(omega, temperature)?;
    Ok(if x > BOSE_LARGE {
        (-x).exp()
    } else if x < BOSE_SMALL {
        1.0 / x - 0.5
    } else {
        1.0 / x.exp_m1()
    })
}

/// Material parameters for the coupling-prefactor formulas.
///
/// The formulas are evaluated literally; the caller owns the unit system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialConstants {
    pub piezoconstant: f64,
    pub density: f64,
    pub sound_velocity: f64,
    /// Transverse-to-longitudinal sound velocity ratio.
    pub velocity_ratio: f64,
    pub deformation_potential: f64,
}

impl MaterialConstants {
    fn validate(&self) -> Result<()> {
        if !(self.density > 0.0) {
            return Err(Error::domain("density", self.density));
        }
        if !(self.sound_velocity > 0.0) {
            return Err(Error::domain("sound_velocity", self.sound_velocity));
        }
        if !(self.velocity_ratio > 0.0) {
            return Err(Error::domain("velocity_ratio", self.velocity_ratio));
        }
        Ok(())
    }

    /// `M/(π² ϱ s³) · (6/35 + 8/(35 x))`.
    pub fn g_pz(&self) -> Result<f64> {
        self.validate()?;
        let s3 = self.sound_velocity.powi(3);
        Ok(self.piezoconstant / (PI * PI * self.density * s3)
            * (6.0 / 35.0 + 8.0 / (35.0 * self.velocity_ratio)))
    }

    /// `Ξ²/(8 π² ϱ s⁵)`.
    pub fn g_df(&self) -> Result<f64> {
        self.validate()?;
        let xi = self.deformation_potential;
        Ok(xi * xi / (8.0 * PI * PI * self.density * self.sound_velocity.powi(5)))
    }
}
