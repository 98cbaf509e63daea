use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::config::ThermalConfig;
use crate::error::{Error, Result};
use crate::gates::{level_bias, pt_swap_table};
use crate::program::{Group, Op, Program};
use crate::state::{BiasTracker, DiagonalState, Role};
use crate::thermo::shannon_bound_bias;

const ENTROPY_TOLERANCE: f64 = 1e-12;
const TRACKER_TOLERANCE: f64 = 1e-12;

/// Ideal: RESET is an exact replacement and nothing relaxes outside WAIT.
/// Finite: every group lasts its configured duration and all bits relax
/// throughout; a RESET is only the waiting that lets that happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Ideal,
    Finite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 0 is the initial state; record `i` follows group `i - 1`.
    pub step: usize,
    pub label: String,
    pub op: String,
    pub biases: Vec<f64>,
    pub total_entropy: f64,
    pub bit_entropies: Vec<f64>,
    pub compute_steps: u64,
    pub reset_steps: u64,
    pub time_steps: u64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub program: String,
    pub mode: Mode,
    pub eps0: f64,
    pub n_bits: usize,
    pub target_bit: Option<usize>,
    pub target_bias: Option<f64>,
    /// Exact-recursion bias at the program's target level.
    pub predicted_bias: Option<f64>,
    /// `(3/2)^level · eps0`.
    pub predicted_bias_smalleps: Option<f64>,
    pub target_biases: Vec<f64>,
    pub max_bias: f64,
    /// `min(1, eps0 √n)` over the whole register.
    pub bound_bias: f64,
    /// `max_bias - bound_bias`; positive when the closed-system bound is beaten.
    pub bypass_margin: f64,
    pub initial_entropy: f64,
    pub final_entropy: f64,
    /// Largest tracker/exact disagreement seen while the tracker was valid.
    pub tracker_max_deviation: f64,
    pub tracker_valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub records: Vec<StepRecord>,
    pub summary: RunSummary,
    pub violations: Vec<String>,
}

fn initial_biases(roles: &[Role], config: &ThermalConfig) -> Vec<f64> {
    roles.iter().map(|&r| config.equilibrium(r)).collect()
}

fn group_duration(group: &Group, config: &ThermalConfig) -> f64 {
    if let Some(Op::Wait(d)) = group.ops.first() {
        *d
    } else if group.has_reset() {
        config.reset_duration
    } else {
        config.compute_duration
    }
}

fn record(
    state: &DiagonalState,
    step: usize,
    label: &str,
    op: String,
    program: &Program,
    upto: usize,
    wall: f64,
) -> StepRecord {
    let cost = crate::program::Cost::count(&program.groups[..upto]);
    let biases = state.biases();
    let bit_entropies = biases
        .iter()
        .map(|b| crate::thermo::binary_entropy((1.0 + b.clamp(-1.0, 1.0)) / 2.0))
        .collect();
    StepRecord {
        step,
        label: label.to_string(),
        op,
        biases,
        total_entropy: state.total_entropy(),
        bit_entropies,
        compute_steps: cost.compute_steps,
        reset_steps: cost.reset_steps,
        time_steps: cost.total_time_steps,
        wall_time: wall,
    }
}

/// Executes `program` on the exact distribution, starting from every bit at its equilibrium bias.
pub fn run(program: &Program, config: &ThermalConfig, mode: Mode) -> Result<RunReport> {
    run_with_state(program, config, mode).map(|(report, _)| report)
}

/// [`run`], also returning the final distribution.
pub fn run_with_state(
    program: &Program,
    config: &ThermalConfig,
    mode: Mode,
) -> Result<(RunReport, DiagonalState)> {
    config.validate()?;
    if mode == Mode::Finite && (config.t1_comp.is_none() || config.t1_reset.is_none()) {
        return Err(Error::Config(
            "finite mode requires both t1_comp and t1_reset".into(),
        ));
    }
    let start = initial_biases(&program.roles, config);
    let mut state = DiagonalState::new_thermal(&start, &program.roles)?;
    let mut tracker = BiasTracker::new(start, program.roles.clone())?;
    let swap = pt_swap_table();

    let mut records = vec![record(&state, 0, "init", "INIT".into(), program, 0, 0.0)];
    let mut violations = Vec::new();
    let mut wall = 0.0;
    let mut tracker_dev: f64 = 0.0;

    for (i, group) in program.groups.iter().enumerate() {
        for op in &group.ops {
            match op {
                Op::Gate(g) => state.apply_gate(g)?,
                Op::Pt { src, dst } => state.apply_permutation(&swap, &[*src, *dst])?,
                Op::Reset(bits) => {
                    if mode == Mode::Ideal {
                        for &b in bits {
                            state.apply_reset(b, config.equilibrium(Role::Reset), false)?;
                        }
                    } else if let Some(&b) = bits.iter().find(|&&b| program.roles[b] != Role::Reset)
                    {
                        return Err(Error::Policy(format!(
                            "bit {b} is a computation bit and cannot be reset"
                        )));
                    }
                }
                Op::Wait(d) => state.relax(*d, config)?,
            }
            if !(mode == Mode::Finite && matches!(op, Op::Reset(_))) {
                tracker.apply(op, config)?;
            }
        }
        let duration = group_duration(group, config);
        if mode == Mode::Finite && !matches!(group.ops.first(), Some(Op::Wait(_))) {
            state.relax(duration, config)?;
            tracker.relax(duration, config);
        }
        wall += duration;

        let prev_h = records.last().map(|r| r.total_entropy).unwrap_or_default();
        let rec = record(
            &state,
            i + 1,
            &group.label,
            group.summary(&program.bit_names),
            program,
            i + 1,
            wall,
        );

        if rec.biases.iter().any(|b| b.abs() > 1.0 + 1e-12) {
            violations.push(format!("step {}: bias outside [-1, 1]", i + 1));
        }
        if mode == Mode::Ideal {
            if !group.has_reset() && (rec.total_entropy - prev_h).abs() > ENTROPY_TOLERANCE {
                violations.push(format!(
                    "step {} ({}): entropy changed by {:e} under reversible gates",
                    i + 1,
                    group.label,
                    rec.total_entropy - prev_h
                ));
            }
            if tracker.independence_valid() {
                let dev = tracker
                    .biases()
                    .iter()
                    .zip(&rec.biases)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                tracker_dev = tracker_dev.max(dev);
                if dev > TRACKER_TOLERANCE {
                    violations.push(format!(
                        "step {}: tracker disagrees with exact state by {dev:e}",
                        i + 1
                    ));
                }
            }
        }
        records.push(rec);
    }

    let first = &records[0];
    let last = records.last().expect("initial record");
    let n = program.n_bits;
    let bound = shannon_bound_bias(n as u64, config.eps0);
    let max_bias = last
        .biases
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let target_bit = program.targets.first().copied();
    let summary = RunSummary {
        program: program.name.clone(),
        mode,
        eps0: config.eps0,
        n_bits: n,
        target_bit,
        target_bias: target_bit.map(|t| last.biases[t]),
        predicted_bias: program.target_level.map(|l| level_bias(config.eps0, l)),
        predicted_bias_smalleps: program
            .target_level
            .map(|l| 1.5f64.powi(l as i32) * config.eps0),
        target_biases: program.targets.iter().map(|&t| last.biases[t]).collect(),
        max_bias,
        bound_bias: bound,
        bypass_margin: max_bias - bound,
        initial_entropy: first.total_entropy,
        final_entropy: last.total_entropy,
        tracker_max_deviation: tracker_dev,
        tracker_valid: tracker.independence_valid(),
    };
    Ok((
        RunReport {
            records,
            summary,
            violations,
        },
        state,
    ))
}

/// Tracker-only execution for registers beyond the dense cap (ideal mode).
pub fn run_tracker(program: &Program, config: &ThermalConfig) -> Result<BiasTracker> {
    config.validate()?;
    let mut tracker = BiasTracker::new(
        initial_biases(&program.roles, config),
        program.roles.clone(),
    )?;
    for group in &program.groups {
        tracker.apply_group(group, config)?;
    }
    Ok(tracker)
}

impl RunReport {
    /// Ledger CSV: `step, op, bias_0..bias_{n-1}, H_total, resets, time, wall_time`.
    /// `time` counts time steps; `wall_time` sums configured group durations.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.summary.n_bits;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_string(), "op".to_string()];
        header.extend((0..n).map(|i| format!("bias_{i}")));
        header.extend(["H_total", "resets", "time", "wall_time"].map(String::from));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![r.step.to_string(), r.op.clone()];
            row.extend(r.biases.iter().map(|b| b.to_string()));
            row.push(r.total_entropy.to_string());
            row.push(r.reset_steps.to_string());
            row.push(r.time_steps.to_string());
            row.push(r.wall_time.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn final_biases(&self) -> &[f64] {
        &self.records.last().expect("initial record").biases
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::{compile_fig2_demo, compile_pac1, compile_pac2, Comp3Form};

    #[test]
    fn fig2_demo_ideal() {
        let p = compile_fig2_demo(Comp3Form::default()).unwrap();
        let r = run(&p, &ThermalConfig::ideal(0.1), Mode::Ideal).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        let b = r.final_biases();
        assert!((b[4] - 0.1495).abs() < 1e-12);
        for (i, &x) in b.iter().enumerate() {
            if i != 4 {
                assert!((x - 0.1).abs() < 1e-12, "bit {i}: {x}");
            }
        }
        assert!(r.summary.final_entropy < r.summary.initial_entropy);
    }

    #[test]
    fn zero_bias_stays_zero() {
        let p = compile_fig2_demo(Comp3Form::default()).unwrap();
        let r = run(&p, &ThermalConfig::ideal(0.0), Mode::Ideal).unwrap();
        assert!(r
            .records
            .iter()
            .all(|rec| rec.biases.iter().all(|b| b.abs() < 1e-15)));
    }

    #[test]
    fn pac2_two_levels() {
        let p = compile_pac2(2, Comp3Form::default()).unwrap();
        let r = run(&p, &ThermalConfig::ideal(0.01), Mode::Ideal).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert!((r.summary.target_bias.unwrap() - 0.022497562668744375).abs() < 1e-12);
    }

    #[test]
    fn empty_program_reports_initial_state() {
        let p = Program::new(
            "empty",
            vec![Role::Reset; 4],
            (0..4).map(|i| i.to_string()).collect(),
            vec![],
            vec![],
            None,
            "",
        )
        .unwrap();
        let r = run(&p, &ThermalConfig::ideal(0.05), Mode::Ideal).unwrap();
        assert_eq!(r.records.len(), 1);
        assert!((r.summary.bypass_margin - 0.05 * (1.0 - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn finite_mode_needs_relaxation_times() {
        let p = compile_pac1(1, Comp3Form::default()).unwrap();
        assert!(matches!(
            run(&p, &ThermalConfig::ideal(0.01), Mode::Finite),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_columns() {
        let p = compile_fig2_demo(Comp3Form::default()).unwrap();
        let r = run(&p, &ThermalConfig::ideal(0.1), Mode::Ideal).unwrap();
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "step,op,bias_0,bias_1,bias_2,bias_3,bias_4,bias_5,H_total,resets,time,wall_time"
        );
        assert_eq!(csv.lines().count(), 5);
        assert!(csv
            .lines()
            .last()
            .unwrap()
            .starts_with("3,\"RESET(rB,rC)\","));
    }

    #[test]
    fn tracker_only_run_matches_large_pac1() {
        let p = compile_pac1(8, Comp3Form::default()).unwrap();
        let t = run_tracker(&p, &ThermalConfig::ideal(0.01)).unwrap();
        assert!(t.independence_valid());
        assert!((t.bias(p.targets[0]) - level_bias(0.01, 8)).abs() < 1e-15);
        assert!(matches!(
            run(&p, &ThermalConfig::ideal(0.01), Mode::Ideal),
            Err(Error::CapExceeded { .. })
        ));
    }
}
