//! Rate-distortion functions of the symmetric correlated Gaussian pair.
//!
//! Two quantities drive every energy bound in [`crate::bounds`]:
//!
//! * `rate_single`: the scalar Gaussian rate-distortion function
//!   `R(D) = ½·log2(σs²/D)` of one source;
//! * `rate_joint`: the rate needed to jointly compress the pair into a
//!   single stream from which *both* sources are recoverable at
//!   distortion `D`,
//!
//!   ```text
//!   R(D) = ½·log2( σs²(1+|ρs|) / (2D − σs²(1−|ρs|)) )   D > σs²(1−|ρs|)
//!   R(D) = ½·log2( σs⁴(1−ρs²) / D² )                    D ≤ σs²(1−|ρs|)
//!   ```
//!
//! Both are reported in bits per source sample. The joint function is
//! continuous at the branch point, where both forms reduce to
//! `½·log2((1+|ρs|)/(1−|ρs|))`; a `D` exactly on the boundary evaluates
//! the lower branch.

use crate::model::{DistortionTarget, SystemParams};

/// An information rate in bits per source sample.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RateBits(f64);

impl RateBits {
    /// Wrap a computed rate, zeroing sub-rounding negatives so the
    /// nonnegativity invariant holds exactly at `D = σs²`.
    fn from_raw(rate: f64) -> Self {
        debug_assert!(rate >= -1e-12, "rate {rate} below rounding tolerance");
        Self(if rate < 0.0 { 0.0 } else { rate })
    }

    pub fn bits(&self) -> f64 {
        self.0
    }
}

/// Rate-distortion function of a single source, `½·log2(σs²/D)`.
pub fn rate_single(p: &SystemParams, d: &DistortionTarget) -> RateBits {
    RateBits::from_raw(0.5 * (p.sigma_s2() / d.value()).log2())
}

/// Joint rate-distortion function of the pair at common distortion `D`.
pub fn rate_joint(p: &SystemParams, d: &DistortionTarget) -> RateBits {
    let ss2 = p.sigma_s2();
    let a = p.rho_s().abs();
    let d = d.value();
    let rate = if d > ss2 * (1.0 - a) {
        0.5 * (ss2 * (1.0 + a) / (2.0 * d - ss2 * (1.0 - a))).log2()
    } else {
        0.5 * (ss2 * ss2 * (1.0 - a * a) / (d * d)).log2()
    };
    RateBits::from_raw(rate)
}
