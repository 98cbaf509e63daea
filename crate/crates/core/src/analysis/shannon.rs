use serde::{Deserialize, Serialize};

use super::{Mode, RunReport};
use crate::program::Program;
use crate::thermo::shannon_bound_bias;

const TOLERANCE: f64 = 1e-12;

/// Outcome of comparing a run against the closed-system compression bounds.
///
/// The bypass margin is measured against `ε0 √n` with `n` the full register,
/// reset bits included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    /// No RESET, WAIT or relaxation touched the register.
    pub closed: bool,
    /// Every bit started at the same bias, so the `√n` form applies.
    pub uniform_initial: bool,
    /// `H_total(initial) - (n - 1)`.
    pub entropy_floor: f64,
    pub min_single_bit_entropy: f64,
    pub entropy_ok: bool,
    pub bound_bias: Option<f64>,
    /// Largest `|bias|` over every record.
    pub max_abs_bias: f64,
    /// Allowance above the leading-order `√n` form, `2 ε0³ n`.
    pub bias_slack: Option<f64>,
    pub bias_ok: bool,
    /// Final maximum bias minus the bound; `None` when the initial biases differ.
    pub bypass_margin: Option<f64>,
    pub bypassed: bool,
    pub violation: bool,
}

pub fn check_shannon(report: &RunReport, program: &Program) -> BoundVerdict {
    let n = program.n_bits;
    let first = &report.records[0];
    let eps0 = first.biases[0];
    let uniform_initial = first.biases.iter().all(|b| (b - eps0).abs() <= 1e-15);
    let closed = program.is_closed() && report.summary.mode == Mode::Ideal;

    let entropy_floor = first.total_entropy - (n as f64 - 1.0);
    let min_single_bit_entropy = report
        .records
        .iter()
        .flat_map(|r| r.bit_entropies.iter().copied())
        .fold(f64::INFINITY, f64::min);
    let entropy_ok = min_single_bit_entropy >= entropy_floor - TOLERANCE;

    let max_abs_bias = report
        .records
        .iter()
        .flat_map(|r| r.biases.iter().map(|b| b.abs()))
        .fold(0.0, f64::max);
    let final_max = report
        .final_biases()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);

    let (bound_bias, bias_slack, bypass_margin) = if uniform_initial {
        let bound = shannon_bound_bias(n as u64, eps0.abs());
        (
            Some(bound),
            Some(2.0 * eps0.abs().powi(3) * n as f64),
            Some(final_max - bound),
        )
    } else {
        (None, None, None)
    };
    let bias_ok = match (bound_bias, bias_slack) {
        (Some(b), Some(s)) => max_abs_bias <= b + s + TOLERANCE,
        _ => true,
    };
    let bypassed = !closed && bypass_margin.is_some_and(|m| m > 0.0);
    BoundVerdict {
        closed,
        uniform_initial,
        entropy_floor,
        min_single_bit_entropy,
        entropy_ok,
        bound_bias,
        max_abs_bias,
        bias_slack,
        bias_ok,
        bypass_margin,
        bypassed,
        violation: closed && !(entropy_ok && bias_ok),
    }
}
