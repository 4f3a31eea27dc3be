//! Sample-path simulation of the linear feedback scheme over the actual
//! channel: random correlated sources, random correlated noise, and the
//! deterministic gain schedule of [`crate::olscheme`].
//!
//! Per source pair the simulator replays the scheduled steps, with the
//! transmitter reconstructing both receiver estimates from the fed-back
//! channel outputs (noiseless feedback makes the reconstruction exact,
//! which the code asserts bitwise in debug builds). Gains are never
//! re-estimated from samples, so every sample is independent and the run
//! parallelizes over samples.
//!
//! Reproducibility contract: sample `i` draws from
//! `substream(seed, i)` — the source pair first, then one noise pair per
//! step — and all reductions are fixed-shape pairwise sums over
//! 256-sample blocks, so a `(seed, config)` pair yields a bit-identical
//! report for any worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{substream, Cholesky2, DistortionTarget, SystemParams};
use crate::olscheme::{gain_schedule, run_to_distortion, GainEntry, OlRun};

/// Samples per accumulation block; fixed so that reduction shape (and
/// therefore rounding) is independent of the worker count.
const BLOCK: usize = 256;

/// Monte-Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub params: SystemParams,
    pub power: f64,
    pub distortion: DistortionTarget,
    pub n_samples: usize,
    pub seed: u64,
    pub max_steps: usize,
}

/// Summary statistics of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    /// Steps used per source pair (shared across samples by design).
    pub k_used: usize,
    /// Number of simulated source pairs.
    pub n_samples: usize,
    /// Average squared reconstruction error at receiver 1.
    pub empirical_mse_1: f64,
    /// Average squared reconstruction error at receiver 2.
    pub empirical_mse_2: f64,
    /// Average transmitted `X²` per channel use (0 when `k_used` is 0).
    pub empirical_power_per_step: f64,
    /// `k_used · empirical_power_per_step`, energy per source pair.
    pub total_energy_per_sample: f64,
    /// Three-sigma half-width of the per-user MSE estimate, from the
    /// chi-square relation `Var(ε²) = 2·(E[ε²])²`.
    pub ci_halfwidth_mse: f64,
    /// Seed the run was configured with.
    pub seed_echo: u64,
}

/// One row of the per-step diagnostic comparing sample paths to the
/// deterministic second-moment recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub step: usize,
    pub empirical_alpha: f64,
    pub analytic_alpha: f64,
    pub empirical_rho: f64,
    pub analytic_rho: f64,
}

fn validate(cfg: &McConfig) -> Result<()> {
    if cfg.n_samples == 0 {
        return Err(Error::InvalidConfig(
            "n_samples must be at least 1".to_string(),
        ));
    }
    Ok(())
}

/// Deterministic plan shared by all samples of a run.
struct Plan {
    run: OlRun,
    schedule: Vec<GainEntry>,
    source: Cholesky2,
    noise: Cholesky2,
}

fn plan(cfg: &McConfig) -> Result<Plan> {
    validate(cfg)?;
    let run = run_to_distortion(&cfg.params, cfg.power, &cfg.distortion, cfg.max_steps)?;
    if !run.terminated {
        return Err(Error::NonTermination {
            max_steps: cfg.max_steps,
        });
    }
    let schedule = if run.k_ol == 0 {
        Vec::new()
    } else {
        gain_schedule(&cfg.params, cfg.power, run.k_ol)?
    };
    Ok(Plan {
        run,
        schedule,
        source: cfg.params.source_factor(),
        noise: cfg.params.noise_factor(),
    })
}

struct SampleStats {
    sq_err_1: f64,
    sq_err_2: f64,
    sum_x2: f64,
}

/// Replay the schedule for one source pair.
fn simulate_sample(cfg: &McConfig, plan: &Plan, index: u64) -> SampleStats {
    let mut rng = substream(cfg.seed, index);
    let (s1, s2) = plan.source.sample(&mut rng);
    // Receiver-side estimates and the transmitter's feedback-driven
    // reconstruction of them evolve through identical updates; noiseless
    // feedback keeps them bitwise equal.
    let mut rx = [0.0f64; 2];
    let mut tx_view = [0.0f64; 2];
    let mut sum_x2 = 0.0;
    for entry in &plan.schedule {
        let err_1 = s1 - tx_view[0];
        let err_2 = s2 - tx_view[1];
        let x = entry.tx_scale * (err_1 + entry.sel * err_2);
        sum_x2 += x * x;
        let (z1, z2) = plan.noise.sample(&mut rng);
        let y1 = x + z1;
        let y2 = x + z2;
        rx[0] += entry.g * y1;
        rx[1] += entry.sel * entry.g * y2;
        tx_view[0] += entry.g * y1;
        tx_view[1] += entry.sel * entry.g * y2;
        debug_assert_eq!(rx[0].to_bits(), tx_view[0].to_bits());
        debug_assert_eq!(rx[1].to_bits(), tx_view[1].to_bits());
    }
    let e1 = s1 - rx[0];
    let e2 = s2 - rx[1];
    SampleStats {
        sq_err_1: e1 * e1,
        sq_err_2: e2 * e2,
        sum_x2,
    }
}

/// Fixed-shape pairwise summation (sequential below 64 elements).
pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 64 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Run the full simulation and summarize it.
pub fn simulate(cfg: &McConfig) -> Result<McReport> {
    let plan = plan(cfg)?;
    let m = cfg.n_samples;
    let n_blocks = m.div_ceil(BLOCK);

    let partials: Vec<[f64; 3]> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(m);
            let mut sq1 = Vec::with_capacity(end - start);
            let mut sq2 = Vec::with_capacity(end - start);
            let mut x2 = Vec::with_capacity(end - start);
            for i in start..end {
                let s = simulate_sample(cfg, &plan, i as u64);
                sq1.push(s.sq_err_1);
                sq2.push(s.sq_err_2);
                x2.push(s.sum_x2);
            }
            [pairwise_sum(&sq1), pairwise_sum(&sq2), pairwise_sum(&x2)]
        })
        .collect();

    let column = |j: usize| -> f64 {
        let col: Vec<f64> = partials.iter().map(|p| p[j]).collect();
        pairwise_sum(&col)
    };
    let mf = m as f64;
    let empirical_mse_1 = column(0) / mf;
    let empirical_mse_2 = column(1) / mf;
    let k = plan.run.k_ol;
    let empirical_power_per_step = if k == 0 {
        0.0
    } else {
        column(2) / (mf * k as f64)
    };
    let pooled = 0.5 * (empirical_mse_1 + empirical_mse_2);
    Ok(McReport {
        k_used: k,
        n_samples: m,
        empirical_mse_1,
        empirical_mse_2,
        empirical_power_per_step,
        total_energy_per_sample: k as f64 * empirical_power_per_step,
        ci_halfwidth_mse: 3.0 * pooled * (2.0 / mf).sqrt(),
        seed_echo: cfg.seed,
    })
}

/// Per-step empirical error moments alongside the deterministic trace.
///
/// Row `k` reports the error state before the `k`-th transmission (row 0
/// is the raw source pair); the final row is the post-run state.
pub fn mse_trajectory(cfg: &McConfig) -> Result<Vec<TrajectoryPoint>> {
    let plan = plan(cfg)?;
    let m = cfg.n_samples;
    let k = plan.run.k_ol;
    let n_blocks = m.div_ceil(BLOCK);

    // Per block: per-step sums of (e1^2+e2^2)/2 and e1*e2, accumulated
    // over the block's samples in index order.
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            let end = (start + BLOCK).min(m);
            let mut sq = vec![0.0f64; k + 1];
            let mut cross = vec![0.0f64; k + 1];
            for i in start..end {
                let mut rng = substream(cfg.seed, i as u64);
                let (s1, s2) = plan.source.sample(&mut rng);
                let mut est = [0.0f64; 2];
                for (step, entry) in plan.schedule.iter().enumerate() {
                    let err_1 = s1 - est[0];
                    let err_2 = s2 - est[1];
                    sq[step] += 0.5 * (err_1 * err_1 + err_2 * err_2);
                    cross[step] += err_1 * err_2;
                    let x = entry.tx_scale * (err_1 + entry.sel * err_2);
                    let (z1, z2) = plan.noise.sample(&mut rng);
                    est[0] += entry.g * (x + z1);
                    est[1] += entry.sel * entry.g * (x + z2);
                }
                let err_1 = s1 - est[0];
                let err_2 = s2 - est[1];
                sq[k] += 0.5 * (err_1 * err_1 + err_2 * err_2);
                cross[k] += err_1 * err_2;
            }
            (sq, cross)
        })
        .collect();

    let mf = m as f64;
    let rows = (0..=k)
        .map(|step| {
            let sq: Vec<f64> = partials.iter().map(|p| p.0[step]).collect();
            let cross: Vec<f64> = partials.iter().map(|p| p.1[step]).collect();
            let empirical_alpha = pairwise_sum(&sq) / mf;
            let empirical_rho = pairwise_sum(&cross) / mf / empirical_alpha;
            let analytic = plan.run.trace[step];
            TrajectoryPoint {
                step,
                empirical_alpha,
                analytic_alpha: analytic.alpha,
                empirical_rho,
                analytic_rho: analytic.rho_tilde,
            }
        })
        .collect();
    Ok(rows)
}
