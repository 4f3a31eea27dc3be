//! Deterministic second-moment engine for the uncoded linear feedback
//! scheme.
//!
//! One source pair is transmitted over many channel uses. Each receiver
//! keeps a running estimate of its source; the transmitter, which learns
//! both channel outputs through the noiseless feedback, reconstructs both
//! estimates and therefore both estimation errors `ε₁, ε₂`. By symmetry
//! the two errors share a variance `α` and carry a cross-covariance
//! `c = E[ε₁ε₂]`; writing `ρ̃ = c/α`, one channel use proceeds as
//!
//! ```text
//! sel = +1 if ρ̃ ≥ 0 else −1
//! X   = sqrt(P / (2α(1+|ρ̃|))) · (ε₁ + sel·ε₂)        E[X²] = P exactly
//! Yᵢ  = X + Zᵢ
//! Ŝ₁ += g·Y₁,  Ŝ₂ += sel·g·Y₂                         g = γ/(P+σz²)
//! ```
//!
//! with `γ = sqrt(P·α·(1+|ρ̃|)/2)` the error/observation covariance. The
//! scalar corrections are the per-user LMMSE gains, driving the second
//! moments through the exact recursion
//!
//! ```text
//! α' = α − γ²/(P+σz²)
//! c' = c − sel·γ²·(P + (2−ρz)σz²)/(P+σz²)²
//! ```
//!
//! `α` strictly decreases every step, so running until `α ≤ D` yields the
//! channel-use count `K(P, D)` and the spent energy `P·K`, which converges
//! to [`crate::bounds::energy_ol_closed`] as `P → 0`. Starting from
//! `ρ̃ = ρs > 0` the recursion drifts along
//! `ρ̃(α) = (2−ρz) − (2−ρz−ρs)·σs²/α`, hitting zero exactly at the
//! threshold `α = D_th` of [`crate::bounds::distortion_threshold`]; below
//! it, `ρ̃` oscillates at `O(P)` around zero.

use crate::bounds::Energy;
use crate::error::{Error, Result};
use crate::model::{DistortionTarget, SystemParams};

/// Second-moment state of the scheme after `step` channel uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlState {
    alpha: f64,
    cross_cov: f64,
    step: usize,
    energy_used: f64,
}

impl OlState {
    /// State before any transmission: estimates are zero, so the error
    /// moments are the source moments `α = σs²`, `c = ρs·σs²`.
    pub fn initial(p: &SystemParams) -> Self {
        Self {
            alpha: p.sigma_s2(),
            cross_cov: p.rho_s() * p.sigma_s2(),
            step: 0,
            energy_used: 0.0,
        }
    }

    /// Common per-user error variance.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Error cross-covariance `E[ε₁ε₂]`.
    pub fn cross_cov(&self) -> f64 {
        self.cross_cov
    }

    /// Error correlation coefficient `ρ̃ = c/α`.
    pub fn rho_tilde(&self) -> f64 {
        self.cross_cov / self.alpha
    }

    /// Channel-use index.
    pub fn step(&self) -> usize {
        self.step
    }

    /// Accumulated transmit energy, exactly `step · P` (each use spends
    /// power exactly `P`; assumes the constant per-run power that the
    /// driver functions apply).
    pub fn energy_used(&self) -> f64 {
        self.energy_used
    }

    /// Advance one channel use at per-use power `P`.
    pub fn step_once(&self, p: &SystemParams, power: f64) -> Result<OlState> {
        check_power(power)?;
        let sz2 = p.sigma_z2();
        let rho = self.rho_tilde();
        let sel = if rho >= 0.0 { 1.0 } else { -1.0 };
        let gamma2 = power * self.alpha * (1.0 + rho.abs()) / 2.0;
        let denom = power + sz2;

        let alpha = self.alpha - gamma2 / denom;
        if alpha <= 0.0 {
            return Err(Error::NumericDegeneracy {
                step: self.step + 1,
                detail: format!("error variance underflowed to {alpha}"),
            });
        }
        // Strict decrease is guaranteed in exact arithmetic; a stall
        // means the decrement fell below one ulp and the run would never
        // progress.
        if alpha >= self.alpha {
            return Err(Error::NumericDegeneracy {
                step: self.step + 1,
                detail: format!(
                    "variance decrement underflowed at alpha={} (power {power} too small)",
                    self.alpha
                ),
            });
        }
        let mut cross_cov =
            self.cross_cov - sel * gamma2 * (power + (2.0 - p.rho_z()) * sz2) / (denom * denom);

        // Exact second moments satisfy Cauchy-Schwarz; absorb rounding
        // excursions up to 1e-12 relative, fail on anything larger.
        let excess = cross_cov.abs() - alpha;
        if excess > 0.0 {
            if excess <= 1e-12 * alpha {
                cross_cov = cross_cov.signum() * alpha;
            } else {
                return Err(Error::NumericDegeneracy {
                    step: self.step + 1,
                    detail: format!(
                        "cross-covariance {cross_cov} exceeds error variance {alpha}"
                    ),
                });
            }
        }

        Ok(OlState {
            alpha,
            cross_cov,
            step: self.step + 1,
            energy_used: (self.step + 1) as f64 * power,
        })
    }
}

fn check_power(power: f64) -> Result<()> {
    if !power.is_finite() || power <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "power",
            value: power,
            constraint: "per-use power must be finite and > 0",
        });
    }
    Ok(())
}

/// One record of the deterministic trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub step: usize,
    pub alpha: f64,
    pub rho_tilde: f64,
    pub cum_energy: f64,
}

impl TracePoint {
    fn from_state(s: &OlState) -> Self {
        Self {
            step: s.step,
            alpha: s.alpha,
            rho_tilde: s.rho_tilde(),
            cum_energy: s.energy_used,
        }
    }
}

/// Outcome of running the recursion to a distortion target.
#[derive(Debug, Clone, PartialEq)]
pub struct OlRun {
    /// Channel uses needed; 0 when the target is met before transmission.
    pub k_ol: usize,
    /// Energy per source-pair sample, `P · k_ol`.
    pub total_energy: Energy,
    /// States from step 0 through the final step, inclusive.
    pub trace: Vec<TracePoint>,
    /// False when `max_steps` was exhausted before reaching the target.
    pub terminated: bool,
}

/// Iterate the recursion until `α ≤ D` or `max_steps` is exhausted.
///
/// Non-termination is reported in the result, not as an error; the
/// overshoot below `D` on the final step is kept.
pub fn run_to_distortion(
    p: &SystemParams,
    power: f64,
    d: &DistortionTarget,
    max_steps: usize,
) -> Result<OlRun> {
    check_power(power)?;
    if max_steps == 0 {
        return Err(Error::InvalidConfig(
            "max_steps must be at least 1".to_string(),
        ));
    }
    let mut state = OlState::initial(p);
    let mut trace = vec![TracePoint::from_state(&state)];
    let mut terminated = state.alpha() <= d.value();
    while !terminated && state.step() < max_steps {
        state = state.step_once(p, power)?;
        trace.push(TracePoint::from_state(&state));
        terminated = state.alpha() <= d.value();
    }
    Ok(OlRun {
        k_ol: state.step(),
        total_energy: energy_of(power, state.step()),
        trace,
        terminated,
    })
}

fn energy_of(power: f64, steps: usize) -> Energy {
    Energy::from_raw(power * steps as f64)
}

/// Deterministic per-step coefficients consumed by the sample-path
/// simulator: receiver gain `g`, combining sign `sel`, and the transmit
/// scaling applied to `ε₁ + sel·ε₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainEntry {
    /// Scalar LMMSE gain of receiver 1; receiver 2 applies `sel · g`.
    pub g: f64,
    /// Combining sign, `+1.0` or `-1.0`.
    pub sel: f64,
    /// Transmit scaling `sqrt(P/(2α(1+|ρ̃|)))`.
    pub tx_scale: f64,
}

/// Precompute the gains used at steps `0..steps` of the deterministic
/// recursion started from the initial state.
pub fn gain_schedule(p: &SystemParams, power: f64, steps: usize) -> Result<Vec<GainEntry>> {
    check_power(power)?;
    if steps == 0 {
        return Err(Error::InvalidConfig(
            "gain schedule needs at least 1 step".to_string(),
        ));
    }
    let sz2 = p.sigma_z2();
    let mut state = OlState::initial(p);
    let mut entries = Vec::with_capacity(steps);
    for _ in 0..steps {
        let rho = state.rho_tilde();
        let sel = if rho >= 0.0 { 1.0 } else { -1.0 };
        let gamma = (power * state.alpha() * (1.0 + rho.abs()) / 2.0).sqrt();
        entries.push(GainEntry {
            g: gamma / (power + sz2),
            sel,
            tx_scale: (power / (2.0 * state.alpha() * (1.0 + rho.abs()))).sqrt(),
        });
        state = state.step_once(p, power)?;
    }
    Ok(entries)
}

/// Default step budget: `ceil(8σz²·ln(σs²/D)/P)`, about four times the
/// worst closed-form energy prediction, and at least 1.
pub fn default_max_steps(p: &SystemParams, power: f64, d: &DistortionTarget) -> usize {
    let bound = 8.0 * p.sigma_z2() * (p.sigma_s2() / d.value()).ln() / power;
    (bound.ceil() as usize).max(1)
}
