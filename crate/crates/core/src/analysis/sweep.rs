use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run, Mode};
use crate::config::ThermalConfig;
use crate::error::{Error, Result};
use crate::program::Program;

/// Ratios `T1_comp / T1_reset` below this get flagged.
pub const LOW_RATIO_WARNING: f64 = 100.0;

/// Finite-relaxation parameter grid. Time is measured in units of `T1_comp`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub eps0: Vec<f64>,
    /// `T1_comp / T1_reset`.
    pub ratio: Vec<f64>,
    /// Duration of a compute group, as a fraction of `T1_comp`.
    pub compute_duration: Vec<f64>,
    /// Duration of a reset group, as a multiple of `T1_reset`.
    pub reset_wait: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub eps0: f64,
    pub ratio: f64,
    pub compute_duration: f64,
    pub reset_duration: f64,
    pub final_bias: f64,
    pub ideal_bias: f64,
    /// `(final - ideal) / ideal`, zero when the ideal bias is zero.
    pub relative_change: f64,
    pub low_ratio_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub program: String,
    pub rows: Vec<SweepRow>,
}

fn target_bias(program: &Program, cfg: &ThermalConfig, mode: Mode) -> Result<f64> {
    let report = run(program, cfg, mode)?;
    let bit = program.targets.first().copied().unwrap_or(0);
    Ok(report.final_biases()[bit])
}

/// Final target-bit bias over the grid, in `eps0`-major order. Grid points run in parallel.
pub fn sweep(spec: &SweepSpec, program: &Program) -> Result<SweepReport> {
    if spec.eps0.is_empty()
        || spec.ratio.is_empty()
        || spec.compute_duration.is_empty()
        || spec.reset_wait.is_empty()
    {
        return Err(Error::Config(
            "every sweep range needs at least one value".into(),
        ));
    }
    if let Some(r) = spec.ratio.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Config(format!(
            "relaxation-time ratio must be positive, got {r}"
        )));
    }
    let ideal: Vec<f64> = spec
        .eps0
        .par_iter()
        .map(|&e| target_bias(program, &ThermalConfig::ideal(e), Mode::Ideal))
        .collect::<Result<_>>()?;

    let mut points = Vec::new();
    for (ei, &e) in spec.eps0.iter().enumerate() {
        for &r in &spec.ratio {
            for &c in &spec.compute_duration {
                for &w in &spec.reset_wait {
                    points.push((ei, e, r, c, w / r));
                }
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(ei, e, r, c, reset)| {
            let cfg = ThermalConfig::finite(e, 1.0, r, c, reset);
            let final_bias = target_bias(program, &cfg, Mode::Finite)?;
            let ideal_bias = ideal[ei];
            let relative_change = if ideal_bias == 0.0 {
                0.0
            } else {
                (final_bias - ideal_bias) / ideal_bias
            };
            Ok(SweepRow {
                eps0: e,
                ratio: r,
                compute_duration: c,
                reset_duration: reset,
                final_bias,
                ideal_bias,
                relative_change,
                low_ratio_warning: r < LOW_RATIO_WARNING,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        program: program.name.clone(),
        rows,
    })
}

impl SweepReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
