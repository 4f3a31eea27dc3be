//! Text output for tables and reports.
//!
//! Every float is printed with [`sig12`] (12 significant digits,
//! exponent notation), column orders are fixed, and lines end with `\n`,
//! so rendering the same value twice yields identical bytes.

use crate::bounds::EnergyBounds;
use crate::experiments::{ConvergenceRow, CurveBlock, CurveTable, GapGrid};
use crate::montecarlo::{McReport, TrajectoryPoint};
use crate::olscheme::OlRun;

/// Format with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl EnergyBounds {
    /// Fixed-order JSON object.
    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"e_lb\": {},\n  \"e_sep_rho_s\": {},\n  \"e_sep_rho_z\": {},\n  \"e_ol\": {},\n  \"d_th\": {}\n}}\n",
            sig12(self.e_lb.value()),
            sig12(self.e_sep_rho_s.value()),
            sig12(self.e_sep_rho_z.value()),
            sig12(self.e_ol.value()),
            sig12(self.d_th),
        )
    }

    /// Single-row CSV: `d,e_lb,e_sep_rho_s,e_sep_rho_z,e_ol,d_th`.
    pub fn to_csv(&self, d: f64) -> String {
        format!(
            "d,e_lb,e_sep_rho_s,e_sep_rho_z,e_ol,d_th\n{},{},{},{},{},{}\n",
            sig12(d),
            sig12(self.e_lb.value()),
            sig12(self.e_sep_rho_s.value()),
            sig12(self.e_sep_rho_z.value()),
            sig12(self.e_ol.value()),
            sig12(self.d_th),
        )
    }
}

impl CurveBlock {
    /// CSV with the pinned schema `d,e_lb,e_sep_rho_s,e_sep_rho_z,e_ol`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,e_lb,e_sep_rho_s,e_sep_rho_z,e_ol\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig12(r.d),
                sig12(r.e_lb),
                sig12(r.e_sep_rho_s),
                sig12(r.e_sep_rho_z),
                sig12(r.e_ol),
            ));
        }
        out
    }
}

impl CurveTable {
    /// Concatenated blocks; multi-block tables carry a `#` comment line
    /// naming each block's correlation pair.
    pub fn to_csv(&self) -> String {
        if self.blocks.len() == 1 {
            return self.blocks[0].to_csv();
        }
        let mut out = String::new();
        for block in &self.blocks {
            out.push_str(&format!(
                "# rho_s={} rho_z={}\n",
                sig12(block.params.rho_s()),
                sig12(block.params.rho_z()),
            ));
            out.push_str(&block.to_csv());
        }
        out
    }
}

impl GapGrid {
    /// Long-form CSV `d,rho_s,gap`, rows in `d`-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,rho_s,gap\n");
        for (i, &d) in self.d_axis.iter().enumerate() {
            for (j, &rho) in self.rho_s_axis.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    sig12(d),
                    sig12(rho),
                    sig12(self.cell(i, j)),
                ));
            }
        }
        out
    }
}

impl OlRun {
    /// Trace CSV with the pinned schema
    /// `step,alpha,rho_tilde,cum_energy`.
    pub fn trace_to_csv(&self) -> String {
        let mut out = String::from("step,alpha,rho_tilde,cum_energy\n");
        for pt in &self.trace {
            out.push_str(&format!(
                "{},{},{},{}\n",
                pt.step,
                sig12(pt.alpha),
                sig12(pt.rho_tilde),
                sig12(pt.cum_energy),
            ));
        }
        out
    }
}

/// Convergence CSV with the pinned schema
/// `power,k,energy,e_ol_closed,rel_gap`; an undefined gap renders as
/// `nan`.
pub fn convergence_to_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("power,k,energy,e_ol_closed,rel_gap\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            sig12(r.power),
            r.k,
            sig12(r.energy),
            sig12(r.e_ol_closed),
            r.rel_gap.map_or_else(|| "nan".to_string(), sig12),
        ));
    }
    out
}

impl McReport {
    /// Fixed-order JSON object mirroring the report fields.
    pub fn to_json(&self) -> String {
        format!(
            "{{\n  \"k_used\": {},\n  \"n_samples\": {},\n  \"empirical_mse_1\": {},\n  \"empirical_mse_2\": {},\n  \"empirical_power_per_step\": {},\n  \"total_energy_per_sample\": {},\n  \"ci_halfwidth_mse\": {},\n  \"seed_echo\": {}\n}}\n",
            self.k_used,
            self.n_samples,
            sig12(self.empirical_mse_1),
            sig12(self.empirical_mse_2),
            sig12(self.empirical_power_per_step),
            sig12(self.total_energy_per_sample),
            sig12(self.ci_halfwidth_mse),
            self.seed_echo,
        )
    }
}

/// Trajectory CSV:
/// `step,empirical_alpha,analytic_alpha,empirical_rho,analytic_rho`.
pub fn trajectory_to_csv(rows: &[TrajectoryPoint]) -> String {
    let mut out = String::from("step,empirical_alpha,analytic_alpha,empirical_rho,analytic_rho\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.step,
            sig12(r.empirical_alpha),
            sig12(r.analytic_alpha),
            sig12(r.empirical_rho),
            sig12(r.analytic_rho),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{curve_sweep, SweepQuantity, SweepSpec};
    use crate::model::SystemParams;

    #[test]
    fn sig12_has_twelve_significant_digits() {
        assert_eq!(sig12(std::f64::consts::LN_2), "6.93147180560e-1");
        assert_eq!(sig12(0.4), "4.00000000000e-1");
        assert_eq!(sig12(0.0), "0.00000000000e0");
        assert_eq!(sig12(-1.5), "-1.50000000000e0");
        assert_eq!(sig12(12345.0), "1.23450000000e4");
    }

    #[test]
    fn rendering_is_byte_stable() {
        let p = SystemParams::new(1.0, 0.9, 1.0, 0.5).unwrap();
        let spec = SweepSpec::new(
            p,
            vec![0.2, 0.5, 1.0],
            Some(vec![0.2, 0.9]),
            None,
            SweepQuantity::Bounds,
            None,
        )
        .unwrap();
        let a = curve_sweep(&spec).unwrap().to_csv();
        let b = curve_sweep(&spec).unwrap().to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("# rho_s=2.00000000000e-1 rho_z=5.00000000000e-1\n"));
        assert!(a.contains("d,e_lb,e_sep_rho_s,e_sep_rho_z,e_ol\n"));
        assert!(a.ends_with('\n'));
        assert!(!a.contains('\r'));
    }
}
