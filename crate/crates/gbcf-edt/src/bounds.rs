//! Closed-form energy-distortion bounds for the symmetric two-user
//! broadcast channel with feedback.
//!
//! Four expressions are evaluated, all in energy per source-pair sample:
//!
//! * `energy_lower_bound` — cut-set converse
//!   `σz²·ln2·max{2·R_single(D), (1+ρz)·R_joint(D)}`;
//! * `energy_sscc_rho_s` — separation scheme that jointly compresses the
//!   pair into one stream and sends it as a common message; equals
//!   `2σz²·ln2 · R_joint(D)`;
//! * `energy_sscc_rho_z` — separation scheme with per-source compression
//!   and feedback channel coding; `2σz²·ln(σs²/D)`, independent of both
//!   correlations;
//! * `energy_ol_closed` — the low-power limit of the uncoded linear
//!   feedback scheme (see [`crate::olscheme`]), piecewise around the
//!   error-decorrelation threshold `D_th = σs²(2−ρz−|ρs|)/(2−ρz)`.
//!
//! Logs are natural internally; bit-rates are converted with an explicit
//! `ln 2` factor.

use crate::model::{DistortionTarget, SystemParams};
use crate::ratedistortion::{rate_joint, rate_single};

use std::f64::consts::LN_2;

/// Energy per source sample (channel-units²·uses per sample).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Energy(f64);

impl Energy {
    /// Wrap a computed energy. Values in `[-1e-12, 0)` — floating-point
    /// cancellation at `D = σs²` — are reported as exactly 0.
    pub(crate) fn from_raw(e: f64) -> Self {
        debug_assert!(e >= -1e-12, "energy {e} below rounding tolerance");
        Self(if e < 0.0 { 0.0 } else { e })
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// All four bounds plus the threshold distortion at one `(params, D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBounds {
    pub e_lb: Energy,
    pub e_sep_rho_s: Energy,
    pub e_sep_rho_z: Energy,
    pub e_ol: Energy,
    pub d_th: f64,
}

/// Cut-set lower bound on the energy-distortion tradeoff.
pub fn energy_lower_bound(p: &SystemParams, d: &DistortionTarget) -> Energy {
    let single_term = 2.0 * rate_single(p, d).bits();
    let joint_term = (1.0 + p.rho_z()) * rate_joint(p, d).bits();
    Energy::from_raw(p.sigma_z2() * LN_2 * single_term.max(joint_term))
}

/// Energy of the joint-compression separation scheme.
pub fn energy_sscc_rho_s(p: &SystemParams, d: &DistortionTarget) -> Energy {
    let ss2 = p.sigma_s2();
    let sz2 = p.sigma_z2();
    let a = p.rho_s().abs();
    let d = d.value();
    let e = if d > ss2 * (1.0 - a) {
        sz2 * (ss2 * (1.0 + a) / (2.0 * d - ss2 * (1.0 - a))).ln()
    } else {
        sz2 * (ss2 * ss2 * (1.0 - a * a) / (d * d)).ln()
    };
    Energy::from_raw(e)
}

/// Energy of the per-source separation scheme, `2σz²·ln(σs²/D)`.
///
/// Independent of both correlation coefficients: the feedback channel
/// code buys nothing over orthogonal transmission in the symmetric
/// setting, and separate compression ignores ρs.
pub fn energy_sscc_rho_z(p: &SystemParams, d: &DistortionTarget) -> Energy {
    Energy::from_raw(2.0 * p.sigma_z2() * (p.sigma_s2() / d.value()).ln())
}

/// Distortion threshold `D_th = σs²(2−ρz−|ρs|)/(2−ρz)` at which the
/// linear scheme's receiver errors decorrelate. Always in `(0, σs²]`.
pub fn distortion_threshold(p: &SystemParams) -> f64 {
    let rz = p.rho_z();
    p.sigma_s2() * (2.0 - rz - p.rho_s().abs()) / (2.0 - rz)
}

/// Low-power energy limit of the uncoded linear feedback scheme.
pub fn energy_ol_closed(p: &SystemParams, d: &DistortionTarget) -> Energy {
    let ss2 = p.sigma_s2();
    let sz2 = p.sigma_z2();
    let a = p.rho_s().abs();
    let rz = p.rho_z();
    let d = d.value();
    let d_th = distortion_threshold(p);
    let e = if d >= d_th {
        2.0 * sz2 / (3.0 - rz) * (ss2 * (1.0 + a) / (d + (2.0 - rz) * (d - ss2) + ss2 * a)).ln()
    } else {
        2.0 * sz2
            * (((2.0 - rz - a) * ss2 / ((2.0 - rz) * d)).ln()
                + ((2.0 - rz) * (1.0 + a) / (2.0 - rz - a)).ln() / (3.0 - rz))
    };
    Energy::from_raw(e)
}

/// Minimum energy per reliably delivered bit over the point-to-point
/// Gaussian channel in the wideband limit, `2σz²·ln2`.
pub fn min_energy_per_bit_common(sigma_z2: f64) -> f64 {
    2.0 * sigma_z2 * LN_2
}

/// Evaluate all four bounds and the threshold at one `(params, D)`.
pub fn bounds_bundle(p: &SystemParams, d: &DistortionTarget) -> EnergyBounds {
    EnergyBounds {
        e_lb: energy_lower_bound(p, d),
        e_sep_rho_s: energy_sscc_rho_s(p, d),
        e_sep_rho_z: energy_sscc_rho_z(p, d),
        e_ol: energy_ol_closed(p, d),
        d_th: distortion_threshold(p),
    }
}
