//! System model: symmetric source/noise parameters and correlated
//! bivariate Gaussian sampling.
//!
//! The channel instance is described by four numbers: the common source
//! variance and correlation (σs², ρs) of the pair fed to the encoder, and
//! the common noise variance and correlation (σz², ρz) seen by the two
//! receivers. Both 2×2 covariance matrices have the exchangeable form
//! `σ²·[[1, ρ], [ρ, 1]]` with `|ρ| < 1` strictly; the degenerate `|ρ| = 1`
//! case is excluded because the closed-form expressions divide by
//! `(1 − ρ²)`-like terms. Callers that want near-degenerate correlation
//! pass e.g. `0.999`.
//!
//! Sampling is pinned for reproducibility:
//!
//! * the uniform source is a [`ChaCha12Rng`] stream (a specified cipher,
//!   byte-stable across platforms and crate versions);
//! * standard-normal pairs come from the Marsaglia polar transform
//!   ([`standard_normal_pair`]), whose only libm dependency is `ln`;
//! * parallel workers derive per-sample substreams with the SplitMix64
//!   output function ([`substream_seed`]), so results are independent of
//!   worker count.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Symmetric system parameters `(σs², ρs, σz², ρz)`.
///
/// Immutable after construction; [`SystemParams::new`] rejects
/// non-positive or non-finite variances and `|ρ| ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    sigma_s2: f64,
    rho_s: f64,
    sigma_z2: f64,
    rho_z: f64,
}

impl SystemParams {
    /// Validate raw values into a parameter set.
    pub fn new(sigma_s2: f64, rho_s: f64, sigma_z2: f64, rho_z: f64) -> Result<Self> {
        check_variance("sigma_s2", sigma_s2)?;
        check_variance("sigma_z2", sigma_z2)?;
        check_correlation("rho_s", rho_s)?;
        check_correlation("rho_z", rho_z)?;
        Ok(Self {
            sigma_s2,
            rho_s,
            sigma_z2,
            rho_z,
        })
    }

    pub fn sigma_s2(&self) -> f64 {
        self.sigma_s2
    }

    pub fn rho_s(&self) -> f64 {
        self.rho_s
    }

    pub fn sigma_z2(&self) -> f64 {
        self.sigma_z2
    }

    pub fn rho_z(&self) -> f64 {
        self.rho_z
    }

    /// Cholesky factor of the source covariance `σs²·[[1, ρs], [ρs, 1]]`.
    pub fn source_factor(&self) -> Cholesky2 {
        Cholesky2::new(self.sigma_s2, self.rho_s).expect("validated params factor")
    }

    /// Cholesky factor of the noise covariance `σz²·[[1, ρz], [ρz, 1]]`.
    pub fn noise_factor(&self) -> Cholesky2 {
        Cholesky2::new(self.sigma_z2, self.rho_z).expect("validated params factor")
    }
}

fn check_variance(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            constraint: "variance must be finite and > 0",
        });
    }
    Ok(())
}

fn check_correlation(name: &'static str, value: f64) -> Result<()> {
    // Strict inequality, no epsilon slack; NaN fails is_finite.
    if !value.is_finite() || value.abs() >= 1.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            constraint: "correlation must satisfy |rho| < 1",
        });
    }
    Ok(())
}

/// Target mean-square error `D` with `0 < D ≤ σs²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionTarget {
    d: f64,
}

impl DistortionTarget {
    pub fn new(params: &SystemParams, d: f64) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 || d > params.sigma_s2 {
            return Err(Error::InvalidParameter {
                name: "d",
                value: d,
                constraint: "distortion must satisfy 0 < d <= sigma_s2",
            });
        }
        Ok(Self { d })
    }

    pub fn value(&self) -> f64 {
        self.d
    }
}

/// Lower-triangular factor of an exchangeable 2×2 covariance,
/// `L·Lᵀ = variance·[[1, rho], [rho, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cholesky2 {
    l11: f64,
    l21: f64,
    l22: f64,
}

impl Cholesky2 {
    pub fn new(variance: f64, rho: f64) -> Result<Self> {
        check_variance("variance", variance)?;
        check_correlation("rho", rho)?;
        let s = variance.sqrt();
        Ok(Self {
            l11: s,
            l21: rho * s,
            l22: s * (1.0 - rho * rho).sqrt(),
        })
    }

    pub fn l11(&self) -> f64 {
        self.l11
    }

    pub fn l21(&self) -> f64 {
        self.l21
    }

    pub fn l22(&self) -> f64 {
        self.l22
    }

    /// Map a pair of independent standard normals to a correlated pair.
    pub fn apply(&self, z1: f64, z2: f64) -> (f64, f64) {
        (self.l11 * z1, self.l21 * z1 + self.l22 * z2)
    }

    /// Draw one correlated pair from `generator`.
    ///
    /// Consumes exactly one polar-transform invocation (a variable, seed-
    /// determined number of `u64` words) from the stream.
    pub fn sample<R: RngCore>(&self, generator: &mut R) -> (f64, f64) {
        let (z1, z2) = standard_normal_pair(generator);
        self.apply(z1, z2)
    }
}

/// One pair of independent standard-normal deviates via the Marsaglia
/// polar transform.
///
/// Candidates `(v1, v2)` are drawn uniformly from `[-1, 1)` using the top
/// 53 bits of each `u64` word and accepted when `0 < v1² + v2² < 1`; the
/// accepted point is scaled by `sqrt(-2·ln(s)/s)`. The transform is pinned
/// here (rather than taken from a distributions crate) so that a fixed
/// seed reproduces the identical stream in every build.
pub fn standard_normal_pair<R: RngCore>(generator: &mut R) -> (f64, f64) {
    loop {
        let v1 = unit_symmetric(generator.next_u64());
        let v2 = unit_symmetric(generator.next_u64());
        let s = v1 * v1 + v2 * v2;
        if s < 1.0 && s > 0.0 {
            let scale = (-2.0 * s.ln() / s).sqrt();
            return (v1 * scale, v2 * scale);
        }
    }
}

/// Map a raw word to `[-1, 1)` with 53-bit resolution.
fn unit_symmetric(word: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 52) as f64;
    (word >> 11) as f64 * SCALE - 1.0
}

/// Derive the seed of worker substream `index` from a master seed.
///
/// This is the SplitMix64 output function evaluated on the SplitMix64
/// state sequence `master + (index+1)·γ` with γ = 0x9E3779B97F4A7C15, so
/// substreams are pairwise decorrelated and addressable without
/// sequential jumping.
pub fn substream_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Construct the pinned generator for worker substream `index`.
pub fn substream(master: u64, index: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(substream_seed(master, index))
}
