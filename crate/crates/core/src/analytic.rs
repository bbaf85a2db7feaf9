//! Closed-form reduced dynamics from the initial state with all elements 1/2.
//!
//! With `χ = J(ω₂₁)(1 + 2n)/2`, `n = n(ω₂₁)`:
//!
//! ```text
//! ρ₁₁(t) = (1+n)/(1+2n) − e^{−2χt} / (2(1+2n))
//! ρ₁₂(t) = [(χ+s)e^{(−χ+s)t} − (χ−s)e^{(−χ−s)t}] / 4s
//!        + i ω₂₁ [e^{(−χ+s)t} − e^{(−χ−s)t}] / 4s,      s = √(χ² − ω₂₁²)
//! ```
//!
//! `s` is taken as a complex square root, so the underdamped (`χ < ω₂₁`) and
//! overdamped regimes share one formula. Near critical damping the `0/0` is
//! replaced by a short series in `d = χ² − ω₂₁²`.

use num_complex::Complex64;

use crate::bath::{bose_occupation, BathModel};
use crate::error::{Error, Result};
use crate::redfield::Trajectory;
use crate::system::{DensityMatrix, EigenSystem};

/// Relative width `|χ² − ω₂₁²| / ω₂₁²` of the near-critical series branch.
pub const CRITICAL_BAND: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiRate {
    /// Decoherence rate, ps⁻¹.
    pub chi: f64,
    /// Thermal occupation at the splitting.
    pub n_occ: f64,
    /// Level splitting, ps⁻¹.
    pub omega_21: f64,
}

impl ChiRate {
    pub fn new(chi: f64, n_occ: f64, omega_21: f64) -> Result<Self> {
        if !(chi.is_finite() && chi >= 0.0) {
            return Err(Error::domain("chi", chi));
        }
        if !(n_occ.is_finite() && n_occ >= 0.0) {
            return Err(Error::domain("n_occ", n_occ));
        }
        if !(omega_21.is_finite() && omega_21 > 0.0) {
            return Err(Error::domain("omega_21", omega_21));
        }
        Ok(ChiRate {
            chi,
            n_occ,
            omega_21,
        })
    }

    pub fn is_underdamped(&self) -> bool {
        self.chi < self.omega_21
    }
}

/// `χ = J(ω₂₁)(1 + 2n(ω₂₁))/2`, with `ħ = 1`.
pub fn chi_rate(eig: &EigenSystem, bath: &BathModel, temperature: f64) -> Result<ChiRate> {
    let w = eig.omega_21;
    let j = bath.spectral_density(w)?;
    let n = bose_occupation(w, temperature)?;
    ChiRate::new(0.5 * j * (1.0 + 2.0 * n), n, w)
}

pub fn closed_form_rdm(rate: &ChiRate, t: f64) -> Result<DensityMatrix> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::domain("t", t));
    }
    let ChiRate {
        chi,
        n_occ: n,
        omega_21: w,
    } = *rate;

    // (1+n)/(1+2n) − e^{−2χt}/(2(1+2n)) rewritten to stay exact at t = 0
    let rho11 = 0.5 - 0.5 * (-2.0 * chi * t).exp_m1() / (1.0 + 2.0 * n);
    let rho22 = 1.0 - rho11;

    let disc = chi * chi - w * w;
    let rho12 = if disc.abs() < CRITICAL_BAND * w * w {
        // e^{−χt}[cosh(st) + (χ + iω) sinh(st)/s]/2 expanded in d = s²
        let tt = t * t;
        let dt2 = disc * tt;
        let cosh = 1.0 + dt2 / 2.0 + dt2 * dt2 / 24.0;
        let sinhc = t * (1.0 + dt2 / 6.0 + dt2 * dt2 / 120.0);
        let decay = (-chi * t).exp() / 2.0;
        Complex64::new(decay * (cosh + chi * sinhc), decay * w * sinhc)
    } else {
        let s = Complex64::new(disc, 0.0).sqrt();
        let grow = ((s - chi) * t).exp();
        let fall = ((-s - chi) * t).exp();
        let four_s = s * 4.0;
        let re = ((s + chi) * grow - (chi - s) * fall) / four_s;
        let im = (grow - fall) * w / four_s;
        Complex64::new(re.re, im.re)
    };

    Ok(DensityMatrix {
        rho11: Complex64::new(rho11, 0.0),
        rho12,
        rho21: rho12.conj(),
        rho22: Complex64::new(rho22, 0.0),
    })
}

/// Closed form sampled on `times` (strictly increasing, non-negative).
pub fn closed_form_trajectory(rate: &ChiRate, times: &[f64]) -> Result<Trajectory> {
    #[cfg(feature = "parallel")]
    let states: Result<Vec<_>> = {
        use rayon::prelude::*;
        times
            .par_iter()
            .map(|&t| closed_form_rdm(rate, t))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let states: Result<Vec<_>> = times.iter().map(|&t| closed_form_rdm(rate, t)).collect();
    Trajectory::new(times.to_vec(), states?)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::system::{diagonalize, initial_state, QubitParams};
    use approx::assert_relative_eq;

    fn eig() -> EigenSystem {
        diagonalize(&QubitParams::new(0.05).unwrap())
    }

    #[test]
    fn chi_golden() {
        let pz = BathModel::default_pcpb(0.5).unwrap();
        let c = chi_rate(&eig(), &pz, 0.030).unwrap();
        assert_relative_eq!(c.chi, 2.044_325_383_961_898e-3, max_relative = 1e-12);
        let c = chi_rate(&eig(), &pz, 1.0).unwrap();
        assert_relative_eq!(c.chi, 5.610_630_032_332_877e-3, max_relative = 1e-12);
        let ohm = BathModel::default_ohmic(0.04).unwrap();
        let c = chi_rate(&eig(), &ohm, 0.030).unwrap();
        assert_relative_eq!(c.chi, 2.706_705_664_779_678e-4, max_relative = 1e-12);
        let free = BathModel::default_ohmic(0.0).unwrap();
        assert_eq!(chi_rate(&eig(), &free, 0.030).unwrap().chi, 0.0);
    }

    #[test]
    fn initial_values() {
        for (chi, n) in [(2e-3, 0.0), (0.1, 0.3), (0.5, 2.0), (0.0, 0.0)] {
            let rate = ChiRate::new(chi, n, 0.1).unwrap();
            assert_eq!(closed_form_rdm(&rate, 0.0).unwrap(), initial_state());
        }
    }

    #[test]
    fn long_time_limit() {
        let pz = BathModel::default_pcpb(0.5).unwrap();
        let rate = chi_rate(&eig(), &pz, 1.0).unwrap();
        let rho = closed_form_rdm(&rate, 40.0 / rate.chi).unwrap();
        assert_relative_eq!(rho.rho11.re, 0.682_183_228_277_846_1, max_relative = 1e-14);
        assert!(rho.rho12.norm() < 1e-15);
    }

    #[test]
    fn underdamped_golden() {
        let pz = BathModel::default_pcpb(0.5).unwrap();
        let rate = chi_rate(&eig(), &pz, 0.030).unwrap();
        let rho = closed_form_rdm(&rate, 1.0 / rate.chi).unwrap();
        assert!((rho.rho12.re - 0.034_843_224_356_065_72).abs() < 1e-12);
        assert!((rho.rho12.im + 0.179_898_537_719_892_57).abs() < 1e-12);
        let rho = closed_form_rdm(&rate, 100.0).unwrap();
        assert!((rho.rho12.re + 0.346_949_265_789_107_6).abs() < 1e-13);
        assert!((rho.rho12.im + 0.221_049_500_773_173_98).abs() < 1e-13);
    }

    #[test]
    fn overdamped_golden() {
        let rate = ChiRate::new(0.5, 0.2, 0.1).unwrap();
        let rho = closed_form_rdm(&rate, 3.0).unwrap();
        assert!((rho.rho12.re - 0.489_810_969_097_685_1).abs() < 1e-14);
        assert!((rho.rho12.im - 0.046_888_819_200_090_81).abs() < 1e-14);
    }

    #[test]
    fn critical_damping() {
        let rate = ChiRate::new(0.1, 0.0, 0.1).unwrap();
        let rho = closed_form_rdm(&rate, 10.0).unwrap();
        assert!((rho.rho12.re - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((rho.rho12.im - 0.183_939_720_585_721_2).abs() < 1e-15);

        // the complex-sqrt branch just outside the band
        for (eps, re, im) in [
            (1e-6, 0.367_879_502_484_658, 0.183_939_597_959_308_2),
            (-1e-6, 0.367_879_379_858_177_6, 0.183_939_843_212_269),
        ] {
            let rate = ChiRate::new(0.1 * (1.0 + eps), 0.0, 0.1).unwrap();
            let rho = closed_form_rdm(&rate, 10.0).unwrap();
            assert!((rho.rho12.re - re).abs() < 1e-9, "{eps}");
            assert!((rho.rho12.im - im).abs() < 1e-9, "{eps}");
        }
    }

    #[test]
    fn critical_band_is_continuous() {
        let w = 0.1;
        for side in [1.0, -1.0] {
            let inside = (w * w * (1.0 + side * 0.999 * CRITICAL_BAND)).sqrt();
            let outside = (w * w * (1.0 + side * 1.001 * CRITICAL_BAND)).sqrt();
            for t in [1.0, 10.0, 50.0, 300.0] {
                let a = closed_form_rdm(&ChiRate::new(inside, 0.1, w).unwrap(), t).unwrap();
                let b = closed_form_rdm(&ChiRate::new(outside, 0.1, w).unwrap(), t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-9, "t = {t}");
            }
        }
    }

    #[test]
    fn printed_second_population_matches() {
        let rate = ChiRate::new(3e-3, 0.4, 0.1).unwrap();
        for t in [0.0, 10.0, 333.0, 5000.0] {
            let rho = closed_form_rdm(&rate, t).unwrap();
            let printed = rate.n_occ / (1.0 + 2.0 * rate.n_occ)
                + (-2.0 * rate.chi * t).exp() / (2.0 * (1.0 + 2.0 * rate.n_occ));
            assert_relative_eq!(rho.rho22.re, printed, max_relative = 1e-14);
        }
    }

    #[test]
    fn rejects_negative_time_and_bad_rates() {
        let rate = ChiRate::new(1e-3, 0.0, 0.1).unwrap();
        assert!(closed_form_rdm(&rate, -1.0).is_err());
        assert!(ChiRate::new(-1.0, 0.0, 0.1).is_err());
        assert!(ChiRate::new(1.0, -0.1, 0.1).is_err());
        assert!(ChiRate::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn trajectory_grid() {
        let rate = ChiRate::new(1e-3, 0.0, 0.1).unwrap();
        let times: Vec<f64> = (0..50).map(|k| k as f64 * 2.0).collect();
        let traj = closed_form_trajectory(&rate, &times).unwrap();
        assert_eq!(traj.len(), 50);
        assert_eq!(traj.states()[7], closed_form_rdm(&rate, 14.0).unwrap());
    }
}
