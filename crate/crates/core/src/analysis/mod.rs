//! Program execution against exact states, entropy ledgers and bound checks.

mod random;
mod run;
mod shannon;
mod sweep;
mod tables;

pub use random::random_closed_program;
pub use run::{run, run_tracker, run_with_state, Mode, RunReport, RunSummary, StepRecord};
pub use shannon::{check_shannon, BoundVerdict};
pub use sweep::{sweep, SweepReport, SweepRow, SweepSpec, LOW_RATIO_WARNING};
pub use tables::{table_figures, ComparisonTables, Fig1Row, Table1Row, Table2Row};
