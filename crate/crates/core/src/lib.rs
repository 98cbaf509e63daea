//! Exact simulation and compilation of algorithmic cooling on spin registers.
//!
//! Cooling procedures are compiled into [`Program`]s of parallel step groups
//! (3B-Comp compressions, polarization transfers, resets) and executed on a
//! [`DiagonalState`], the full classical distribution over the register's
//! basis states. A [`BiasTracker`] follows the same programs analytically
//! for registers too large to hold densely.
//!
//! ```
//! use algocool::{compile_pac2, run, Comp3Form, Mode, ThermalConfig};
//!
//! let program = compile_pac2(2, Comp3Form::default()).unwrap();
//! let report = run(&program, &ThermalConfig::ideal(0.01), Mode::Ideal).unwrap();
//! let bias = report.summary.target_bias.unwrap();
//! assert!((bias - 0.0224975626687).abs() < 1e-12);
//! ```

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod compile;
pub mod config;
pub mod error;
pub mod gates;
pub mod program;
pub mod state;
pub mod thermo;

pub use analysis::{
    check_shannon, run, run_tracker, sweep, table_figures, BoundVerdict, Mode, RunReport, SweepSpec,
};
pub use compile::{
    block_compression_costs, check_level_discipline, closed_form_costs, compile_fig2_demo,
    compile_m, compile_pac1, compile_pac1_multi, compile_pac2, Algorithm, Comp3Form,
};
pub use config::ThermalConfig;
pub use error::{Error, Result};
pub use gates::{predicted_comp3_bias, GateKind, GateSpec, Permutation};
pub use program::{Cost, Group, Op, Program};
pub use state::{BiasTracker, DiagonalState, Role, StateSnapshot};
