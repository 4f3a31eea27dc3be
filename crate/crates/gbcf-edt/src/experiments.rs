//! Parameter sweeps and convergence studies over the closed-form bounds
//! and the step recursion, as machine-readable tables.
//!
//! Grid cells are evaluated in parallel but collected in grid order, and
//! every output is a pure function of its spec, so re-rendering a sweep
//! yields identical bytes.

use std::path::PathBuf;

use rayon::prelude::*;

use crate::bounds::{bounds_bundle, energy_ol_closed};
use crate::error::{Error, Result};
use crate::model::{DistortionTarget, SystemParams};
use crate::olscheme::{default_max_steps, run_to_distortion};

/// What a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepQuantity {
    /// All four bounds per distortion (curve tables).
    Bounds,
    /// A pairwise scheme gap per (distortion, |rho_s|) cell.
    Gap(GapKind),
}

/// Which excess-energy surface to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapKind {
    /// `E_OL − E_sep^(rho_s)`: price of uncoded transmission.
    OlMinusSepRhoS,
    /// `E_sep^(rho_z) − E_OL`: savings of the linear scheme over
    /// per-source separation.
    SepRhoZMinusOl,
}

impl GapKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            GapKind::OlMinusSepRhoS => "ol_minus_sep_rho_s",
            GapKind::SepRhoZMinusOl => "sep_rho_z_minus_ol",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ol_minus_sep_rho_s" => Ok(GapKind::OlMinusSepRhoS),
            "sep_rho_z_minus_ol" => Ok(GapKind::SepRhoZMinusOl),
            other => Err(Error::InvalidConfig(format!(
                "unknown gap kind `{other}` (expected ol_minus_sep_rho_s or sep_rho_z_minus_ol)"
            ))),
        }
    }
}

/// Declarative sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SystemParams,
    pub d_grid: Vec<f64>,
    pub rho_s_grid: Option<Vec<f64>>,
    pub rho_z_grid: Option<Vec<f64>>,
    pub quantity: SweepQuantity,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// Validate a spec: grids nonempty, strictly increasing, and inside
    /// the model domain.
    pub fn new(
        base: SystemParams,
        d_grid: Vec<f64>,
        rho_s_grid: Option<Vec<f64>>,
        rho_z_grid: Option<Vec<f64>>,
        quantity: SweepQuantity,
        output: Option<PathBuf>,
    ) -> Result<Self> {
        check_grid("d_grid", &d_grid)?;
        for &d in &d_grid {
            DistortionTarget::new(&base, d)?;
        }
        if let Some(grid) = &rho_s_grid {
            check_grid("rho_s_grid", grid)?;
            check_rho_grid("rho_s_grid", grid)?;
        }
        if let Some(grid) = &rho_z_grid {
            check_grid("rho_z_grid", grid)?;
            check_rho_grid("rho_z_grid", grid)?;
        }
        Ok(Self {
            base,
            d_grid,
            rho_s_grid,
            rho_z_grid,
            quantity,
            output,
        })
    }
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} must be nonempty")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(format!(
            "{name} must be strictly increasing"
        )));
    }
    Ok(())
}

fn check_rho_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.iter().any(|r| !r.is_finite() || r.abs() >= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "{name} entries must satisfy |rho| < 1"
        )));
    }
    Ok(())
}

/// Logarithmically spaced grid with exact endpoints.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || n < 2 {
        return Err(Error::InvalidConfig(format!(
            "log grid needs 0 < lo < hi and n >= 2 (got lo={lo}, hi={hi}, n={n})"
        )));
    }
    let ratio = hi / lo;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo * ratio.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect())
}

/// Default distortion grid: 96 logarithmically spaced points covering
/// `[0.05, 1]·σs²`, endpoint exact.
pub fn default_d_grid(sigma_s2: f64) -> Vec<f64> {
    log_grid(0.05 * sigma_s2, sigma_s2, 96).expect("static grid bounds")
}

/// One row of a curve table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub d: f64,
    pub e_lb: f64,
    pub e_sep_rho_s: f64,
    pub e_sep_rho_z: f64,
    pub e_ol: f64,
}

/// Rows for one `(rho_s, rho_z)` combination.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveBlock {
    pub params: SystemParams,
    pub rows: Vec<CurvePoint>,
}

/// Output of [`curve_sweep`]: one block per grid combination, in grid
/// order (`rho_s` outer, `rho_z` inner).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub blocks: Vec<CurveBlock>,
}

/// Evaluate the four bounds over the distortion grid for every
/// correlation combination of the spec.
pub fn curve_sweep(spec: &SweepSpec) -> Result<CurveTable> {
    let rho_s_values = spec
        .rho_s_grid
        .clone()
        .unwrap_or_else(|| vec![spec.base.rho_s()]);
    let rho_z_values = spec
        .rho_z_grid
        .clone()
        .unwrap_or_else(|| vec![spec.base.rho_z()]);
    let mut blocks = Vec::new();
    for &rs in &rho_s_values {
        for &rz in &rho_z_values {
            let params = SystemParams::new(spec.base.sigma_s2(), rs, spec.base.sigma_z2(), rz)?;
            let rows = spec
                .d_grid
                .par_iter()
                .map(|&d| {
                    let t = DistortionTarget::new(&params, d)?;
                    let b = bounds_bundle(&params, &t);
                    Ok(CurvePoint {
                        d,
                        e_lb: b.e_lb.value(),
                        e_sep_rho_s: b.e_sep_rho_s.value(),
                        e_sep_rho_z: b.e_sep_rho_z.value(),
                        e_ol: b.e_ol.value(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(CurveBlock { params, rows });
        }
    }
    Ok(CurveTable { blocks })
}

/// Excess-energy surface over a `(distortion, |rho_s|)` grid at fixed
/// noise correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct GapGrid {
    pub d_axis: Vec<f64>,
    pub rho_s_axis: Vec<f64>,
    /// Row-major over `d_axis × rho_s_axis`.
    pub values: Vec<f64>,
    pub kind: GapKind,
}

impl GapGrid {
    pub fn cell(&self, d_index: usize, rho_index: usize) -> f64 {
        self.values[d_index * self.rho_s_axis.len() + rho_index]
    }
}

/// Evaluate one gap kind per `(d, |rho_s|)` cell; `base` supplies the
/// variances and the fixed noise correlation.
pub fn gap_surface(
    base: &SystemParams,
    d_grid: &[f64],
    rho_s_grid: &[f64],
    kind: GapKind,
) -> Result<GapGrid> {
    check_grid("d_grid", d_grid)?;
    check_grid("rho_s_grid", rho_s_grid)?;
    check_rho_grid("rho_s_grid", rho_s_grid)?;
    let cells: Vec<(usize, usize)> = (0..d_grid.len())
        .flat_map(|i| (0..rho_s_grid.len()).map(move |j| (i, j)))
        .collect();
    let values = cells
        .par_iter()
        .map(|&(i, j)| {
            let params = SystemParams::new(
                base.sigma_s2(),
                rho_s_grid[j],
                base.sigma_z2(),
                base.rho_z(),
            )?;
            let t = DistortionTarget::new(&params, d_grid[i])?;
            let b = bounds_bundle(&params, &t);
            Ok(match kind {
                GapKind::OlMinusSepRhoS => b.e_ol.value() - b.e_sep_rho_s.value(),
                GapKind::SepRhoZMinusOl => b.e_sep_rho_z.value() - b.e_ol.value(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GapGrid {
        d_axis: d_grid.to_vec(),
        rho_s_axis: rho_s_grid.to_vec(),
        values,
        kind,
    })
}

/// One row of a power-convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub power: f64,
    pub k: usize,
    /// Spent energy `P·K`.
    pub energy: f64,
    pub e_ol_closed: f64,
    /// `P·K/E_OL − 1`; `None` when the closed form is zero.
    pub rel_gap: Option<f64>,
    pub terminated: bool,
}

/// Run the recursion at each power of a decreasing grid and compare the
/// spent energy to the closed form.
pub fn convergence_study(
    p: &SystemParams,
    d: &DistortionTarget,
    powers: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    if powers.is_empty() {
        return Err(Error::InvalidConfig("power grid must be nonempty".into()));
    }
    if powers.iter().any(|&x| !x.is_finite() || x <= 0.0) {
        return Err(Error::InvalidConfig("powers must be positive".into()));
    }
    if powers.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidConfig(
            "power grid must be strictly decreasing".into(),
        ));
    }
    let closed = energy_ol_closed(p, d).value();
    powers
        .par_iter()
        .map(|&power| {
            let run = run_to_distortion(p, power, d, default_max_steps(p, power, d))?;
            let energy = run.total_energy.value();
            let rel_gap = if closed > 0.0 && run.terminated {
                Some(energy / closed - 1.0)
            } else {
                None
            };
            Ok(ConvergenceRow {
                power,
                k: run.k_ol,
                energy,
                e_ol_closed: closed,
                rel_gap,
                terminated: run.terminated,
            })
        })
        .collect()
}
