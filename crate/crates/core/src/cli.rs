//! Command-line front end: `compile | run | tables | sweep | verify`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 invariant violation, 4 register too large for the dense state.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{
    check_shannon, random_closed_program, run, run_tracker, run_with_state, sweep, table_figures,
    BoundVerdict, Mode, RunSummary, SweepSpec, LOW_RATIO_WARNING,
};
use crate::compile::{check_level_discipline, closed_form_costs, Algorithm, Comp3Form};
use crate::config::ThermalConfig;
use crate::error::{Error, Result};
use crate::gates::{level_bias, predicted_comp3_bias, GateKind, GateSpec};
use crate::program::Program;
use crate::state::{DiagonalState, Role};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_CAP: i32 = 4;

/// Overrides the default output directory (the current directory).
pub const OUT_DIR_ENV: &str = "ALGOCOOL_OUT_DIR";

/// Default compute-group duration as a fraction of `t1_comp`.
pub const DEFAULT_COMPUTE_FRACTION: f64 = 1e-3;
/// Default reset-group duration in units of `t1_reset`.
pub const DEFAULT_RESET_WAIT: f64 = 5.0;

#[derive(Debug, Parser)]
#[command(
    name = "algocool",
    version,
    about = "Algorithmic cooling compiler and exact simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compile a procedure to JSON lines and a disassembly.
    Compile(ConfigArgs),
    /// Compile and execute on the exact state; writes a ledger CSV and a summary JSON.
    Run(ConfigArgs),
    /// Print the spin-count and cost comparison tables.
    Tables(TablesArgs),
    /// Finite-relaxation parameter grid.
    Sweep(SweepArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmName {
    Pac1,
    Pac2,
    Fig2,
    Mj,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ideal,
    Finite,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ideal => Mode::Ideal,
            ModeArg::Finite => Mode::Finite,
        }
    }
}

/// Everything a compile or run needs. Loadable from JSON with these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: AlgorithmName,
    pub jf: Option<u32>,
    pub m: Option<usize>,
    pub j: Option<u32>,
    pub k: Option<usize>,
    pub eps0: f64,
    pub mode: Mode,
    pub t1_comp: Option<f64>,
    pub t1_reset: Option<f64>,
    pub compute_duration: Option<f64>,
    pub reset_duration: Option<f64>,
    pub two_gate: bool,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub dump_state: bool,
    pub tracker_only: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: AlgorithmName::Pac1,
            jf: None,
            m: None,
            j: None,
            k: None,
            eps0: 0.01,
            mode: Mode::Ideal,
            t1_comp: None,
            t1_reset: None,
            compute_duration: None,
            reset_duration: None,
            two_gate: false,
            out_dir: None,
            seed: None,
            dump_state: false,
            tracker_only: false,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// JSON file with `RunConfig` fields; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmName>,
    /// Target purification level.
    #[arg(long)]
    pub jf: Option<u32>,
    /// Number of bits to cool (pac1 only).
    #[arg(long)]
    pub m: Option<usize>,
    /// Level of a bare M_j(k).
    #[arg(long)]
    pub j: Option<u32>,
    /// Top bit of a bare M_j(k).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub t1_comp: Option<f64>,
    #[arg(long)]
    pub t1_reset: Option<f64>,
    #[arg(long)]
    pub compute_duration: Option<f64>,
    #[arg(long)]
    pub reset_duration: Option<f64>,
    /// Use the CNOT + controlled-swap construction for 3B-Comp.
    #[arg(long)]
    pub two_gate: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the final distribution as JSON.
    #[arg(long)]
    pub dump_state: bool,
    /// Follow biases analytically instead of holding the full distribution.
    #[arg(long)]
    pub tracker_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct TablesArgs {
    #[arg(long, value_enum, default_value = "text")]
    pub format: TableFormat,
    /// Also write tables.txt and tables.csv here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "pac2")]
    pub algorithm: AlgorithmName,
    #[arg(long, default_value_t = 2)]
    pub jf: u32,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    pub eps0: Vec<f64>,
    /// Values of T1_comp / T1_reset.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ratio: Vec<f64>,
    /// Compute-group durations as fractions of T1_comp.
    #[arg(long, value_delimiter = ',', default_value = "0.001")]
    pub compute_duration: Vec<f64>,
    /// Reset-group durations in units of T1_reset.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    pub reset_wait: Vec<f64>,
    #[arg(long)]
    pub two_gate: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random closed programs to test against the compression bounds.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

/// Output of a subcommand: text for stdout and an exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => EXIT_CAP,
        Error::Internal(_) => EXIT_VIOLATION,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

fn merge(args: &ConfigArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
        None => RunConfig::default(),
    };
    macro_rules! take {
        ($($field:ident),*) => { $( if args.$field.is_some() { cfg.$field = args.$field.clone(); } )* };
    }
    take!(
        jf,
        m,
        j,
        k,
        t1_comp,
        t1_reset,
        compute_duration,
        reset_duration,
        out_dir,
        seed
    );
    if let Some(a) = args.algorithm {
        cfg.algorithm = a;
    }
    if let Some(e) = args.eps0 {
        cfg.eps0 = e;
    }
    if let Some(m) = args.mode {
        cfg.mode = m.into();
    }
    cfg.two_gate |= args.two_gate;
    cfg.dump_state |= args.dump_state;
    cfg.tracker_only |= args.tracker_only;
    Ok(cfg)
}

fn algorithm_of(
    name: AlgorithmName,
    jf: Option<u32>,
    m: Option<usize>,
    j: Option<u32>,
    k: Option<usize>,
) -> Result<Algorithm> {
    let need = |v: Option<u32>, flag: &str| {
        v.ok_or_else(|| Error::Config(format!("--{flag} is required")))
    };
    Ok(match name {
        AlgorithmName::Pac1 => Algorithm::Pac1 {
            j_f: need(jf, "jf")?,
            m: m.unwrap_or(1),
        },
        AlgorithmName::Pac2 => Algorithm::Pac2 {
            j_f: need(jf, "jf")?,
        },
        AlgorithmName::Fig2 => Algorithm::Fig2,
        AlgorithmName::Mj => {
            let j = need(j, "j")?;
            let k = k.ok_or_else(|| Error::Config("--k is required".into()))?;
            Algorithm::Mj { j, k }
        }
    })
}

fn form(two_gate: bool) -> Comp3Form {
    if two_gate {
        Comp3Form::TwoGate
    } else {
        Comp3Form::SinglePermutation
    }
}

fn stem(alg: &Algorithm) -> String {
    match *alg {
        Algorithm::Pac1 { j_f, m: 1 } => format!("pac1_jf{j_f}"),
        Algorithm::Pac1 { j_f, m } => format!("pac1_m{m}_jf{j_f}"),
        Algorithm::Pac2 { j_f } => format!("pac2_jf{j_f}"),
        Algorithm::Fig2 => "fig2".into(),
        Algorithm::Mj { j, k } => format!("mj_j{j}_k{k}"),
    }
}

fn out_dir(explicit: Option<&Path>) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Builds the thermal configuration, filling finite-mode durations from the relaxation times.
fn thermal(cfg: &RunConfig, warnings: &mut String) -> Result<ThermalConfig> {
    if !(cfg.eps0.abs() <= 1.0) {
        return Err(Error::Config(format!(
            "eps0 must lie in [-1, 1], got {}",
            cfg.eps0
        )));
    }
    let mut t = ThermalConfig {
        t1_comp: cfg.t1_comp,
        t1_reset: cfg.t1_reset,
        ..ThermalConfig::ideal(cfg.eps0)
    };
    if cfg.mode == Mode::Finite {
        let (Some(tc), Some(tr)) = (cfg.t1_comp, cfg.t1_reset) else {
            return Err(Error::Config(
                "finite mode requires --t1-comp and --t1-reset".into(),
            ));
        };
        let ratio = tc / tr;
        if !(ratio > 1.0) {
            return Err(Error::Config(format!(
                "T1_comp / T1_reset = {ratio} must exceed 1"
            )));
        }
        if ratio < LOW_RATIO_WARNING {
            let _ = writeln!(
                warnings,
                "warning: T1_comp / T1_reset = {ratio} is below {LOW_RATIO_WARNING}"
            );
        }
        t.compute_duration = cfg
            .compute_duration
            .unwrap_or(DEFAULT_COMPUTE_FRACTION * tc);
        t.reset_duration = cfg.reset_duration.unwrap_or(DEFAULT_RESET_WAIT * tr);
    } else {
        t.compute_duration = cfg.compute_duration.unwrap_or(1.0);
        t.reset_duration = cfg.reset_duration.unwrap_or(1.0);
    }
    t.validate()?;
    Ok(t)
}

fn cost_summary(program: &Program, alg: &Algorithm) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "program: {}", program.name);
    let _ = writeln!(s, "notation: {}", program.notation);
    let _ = writeln!(s, "bits: {}", program.n_bits);
    let _ = writeln!(
        s,
        "time steps: {} ({} compute, {} reset)",
        program.cost.total_time_steps, program.cost.compute_steps, program.cost.reset_steps
    );
    let closed = match *alg {
        Algorithm::Pac1 { j_f, m } => Some((j_f, m)),
        Algorithm::Pac2 { j_f } => Some((j_f, 1)),
        _ => None,
    };
    if let Some((j_f, m)) = closed {
        if let Ok(cf) = closed_form_costs(j_f) {
            let _ = writeln!(
                s,
                "closed form (j_f={j_f}): T={} per cooled bit, {} over {m} bit(s), reset steps {}, PAC1 bits {}, PAC2 bits {}, multiplier ≈ {:.4}",
                cf.time_steps,
                cf.time_steps * m as u64,
                cf.reset_steps,
                cf.pac1_bits,
                cf.pac2_bits,
                cf.bias_multiplier_smalleps
            );
        }
    }
    s
}

pub fn cmd_compile(cfg: &RunConfig) -> Result<Outcome> {
    let alg = algorithm_of(cfg.algorithm, cfg.jf, cfg.m, cfg.j, cfg.k)?;
    let program = alg.compile(form(cfg.two_gate))?;
    let dir = out_dir(cfg.out_dir.as_deref());
    let stem = stem(&alg);
    write_atomic(&dir.join(format!("{stem}.jsonl")), &program.to_jsonl()?)?;
    write_atomic(&dir.join(format!("{stem}.txt")), &program.disassemble())?;
    Ok(Outcome {
        stdout: cost_summary(&program, &alg),
        ..Default::default()
    })
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    summary: &'a RunSummary,
    shannon: &'a BoundVerdict,
    relax_ratio: Option<f64>,
    bypass_margin_definition: &'static str,
    violations: &'a [String],
}

pub fn cmd_run(cfg: &RunConfig) -> Result<Outcome> {
    let mut warnings = String::new();
    let thermal = thermal(cfg, &mut warnings)?;
    let alg = algorithm_of(cfg.algorithm, cfg.jf, cfg.m, cfg.j, cfg.k)?;
    let program = alg.compile(form(cfg.two_gate))?;
    let dir = out_dir(cfg.out_dir.as_deref());
    let stem = stem(&alg);

    if cfg.tracker_only {
        if cfg.mode != Mode::Ideal {
            return Err(Error::Config("tracker-only runs use ideal mode".into()));
        }
        let tracker = run_tracker(&program, &thermal)?;
        let mut out = String::new();
        for &t in &program.targets {
            let _ = writeln!(
                out,
                "target {} bias: {}",
                program.bit_names[t],
                tracker.bias(t)
            );
        }
        let _ = writeln!(out, "tracker valid: {}", tracker.independence_valid());
        let code = if tracker.independence_valid() {
            EXIT_OK
        } else {
            EXIT_VIOLATION
        };
        return Ok(Outcome {
            stdout: out,
            stderr: warnings,
            code,
        });
    }

    let (report, state) = run_with_state(&program, &thermal, cfg.mode)?;
    let verdict = check_shannon(&report, &program);
    write_atomic(&dir.join(format!("{stem}_ledger.csv")), &report.to_csv()?)?;
    let summary_file = SummaryFile {
        summary: &report.summary,
        shannon: &verdict,
        relax_ratio: thermal.relax_ratio(),
        bypass_margin_definition:
            "max final bias - min(1, eps0*sqrt(n_bits)), n_bits including reset bits",
        violations: &report.violations,
    };
    write_atomic(
        &dir.join(format!("{stem}_summary.json")),
        &serde_json::to_string_pretty(&summary_file)?,
    )?;
    if cfg.dump_state {
        write_atomic(
            &dir.join(format!("{stem}_state.json")),
            &serde_json::to_string(&state.snapshot())?,
        )?;
    }

    let s = &report.summary;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "program: {} ({} bits, {:?} mode, eps0 = {})",
        s.program, s.n_bits, s.mode, s.eps0
    );
    let finals = report.final_biases();
    let named: Vec<String> = program
        .bit_names
        .iter()
        .zip(finals)
        .map(|(n, b)| format!("{n}={b:.6}"))
        .collect();
    let _ = writeln!(out, "final biases: {}", named.join(" "));
    if let (Some(t), Some(b)) = (s.target_bit, s.target_bias) {
        let _ = writeln!(out, "target {}: {b}", program.bit_names[t]);
    }
    if let Some(p) = s.predicted_bias {
        let _ = writeln!(out, "predicted (exact recursion): {p}");
    }
    let _ = writeln!(out, "entropy: {} -> {}", s.initial_entropy, s.final_entropy);
    let _ = writeln!(out, "bound eps0*sqrt(n): {}", s.bound_bias);
    let _ = writeln!(out, "bypass_margin: {}", s.bypass_margin);
    for v in &report.violations {
        let _ = writeln!(warnings, "violation: {v}");
    }
    if verdict.violation {
        let _ = writeln!(
            warnings,
            "violation: closed program broke the compression bound"
        );
    }
    let code = if report.violations.is_empty() && !verdict.violation {
        EXIT_OK
    } else {
        EXIT_VIOLATION
    };
    Ok(Outcome {
        stdout: out,
        stderr: warnings,
        code,
    })
}

pub fn cmd_tables(args: &TablesArgs) -> Result<Outcome> {
    let tables = table_figures();
    if let Some(dir) = &args.out_dir {
        write_atomic(&dir.join("tables.txt"), &tables.to_text())?;
        write_atomic(&dir.join("tables.csv"), &tables.to_csv())?;
    }
    let stdout = match args.format {
        TableFormat::Text => tables.to_text(),
        TableFormat::Csv => tables.to_csv(),
    };
    Ok(Outcome {
        stdout,
        ..Default::default()
    })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    if args.eps0.is_empty()
        || args.ratio.is_empty()
        || args.compute_duration.is_empty()
        || args.reset_wait.is_empty()
    {
        return Err(Error::Config("sweep ranges must not be empty".into()));
    }
    let mut warnings = String::new();
    for &r in &args.ratio {
        if !(r > 1.0) {
            return Err(Error::Config(format!(
                "T1_comp / T1_reset = {r} must exceed 1"
            )));
        }
        if r < LOW_RATIO_WARNING {
            let _ = writeln!(
                warnings,
                "warning: T1_comp / T1_reset = {r} is below {LOW_RATIO_WARNING}"
            );
        }
    }
    let alg = algorithm_of(args.algorithm, Some(args.jf), args.m, args.j, args.k)?;
    let program = alg.compile(form(args.two_gate))?;
    let spec = SweepSpec {
        eps0: args.eps0.clone(),
        ratio: args.ratio.clone(),
        compute_duration: args.compute_duration.clone(),
        reset_wait: args.reset_wait.clone(),
    };
    let csv = sweep(&spec, &program)?.to_csv()?;
    let dir = out_dir(args.out_dir.as_deref());
    write_atomic(&dir.join(format!("{}_sweep.csv", stem(&alg))), &csv)?;
    Ok(Outcome {
        stdout: csv,
        stderr: warnings,
        code: EXIT_OK,
    })
}

fn check(
    out: &mut String,
    failed: &mut bool,
    name: &str,
    f: impl FnOnce() -> std::result::Result<(), String>,
) {
    match f() {
        Ok(()) => {
            let _ = writeln!(out, "PASS {name}");
        }
        Err(e) => {
            *failed = true;
            let _ = writeln!(out, "FAIL {name}: {e}");
        }
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> std::result::Result<(), String> {
    if (a - b).abs() <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let mut out = String::new();
    let mut failed = false;

    check(
        &mut out,
        &mut failed,
        "comp3 cooled bit matches (3e-e^3)/2",
        || {
            (0..100).try_for_each(|i| {
                let e = i as f64 / 100.0;
                [GateKind::Comp3Perm, GateKind::Comp3TwoGate]
                    .iter()
                    .try_for_each(|&kind| {
                        let mut s = DiagonalState::new_thermal(&[e; 3], &[Role::Computation; 3])
                            .map_err(|x| x.to_string())?;
                        s.apply_gate(&GateSpec::new(kind, vec![2, 1, 0]).expect("valid"))
                            .map_err(|x| x.to_string())?;
                        close(
                            s.marginal_bias(2).expect("bit"),
                            predicted_comp3_bias(e),
                            1e-12,
                            kind.name(),
                        )
                    })
            })
        },
    );

    check(
        &mut out,
        &mut failed,
        "PAC1 step counts match closed forms (j_f <= 8)",
        || {
            (1..=8).try_for_each(|j| {
                let p = crate::compile::compile_pac1(j, Comp3Form::default())
                    .map_err(|e| e.to_string())?;
                let cf = closed_form_costs(j).map_err(|e| e.to_string())?;
                check_level_discipline(&p).map_err(|e| e.to_string())?;
                if (p.cost.total_time_steps, p.cost.reset_steps) == (cf.time_steps, cf.reset_steps)
                {
                    Ok(())
                } else {
                    Err(format!("j_f={j}: counted {:?}", p.cost))
                }
            })
        },
    );

    check(
        &mut out,
        &mut failed,
        "exact runs follow the bias recursion (j_f <= 3)",
        || {
            [0.01, 0.1].iter().try_for_each(|&eps| {
                (1..=3).try_for_each(|j| {
                    [Algorithm::Pac1 { j_f: j, m: 1 }, Algorithm::Pac2 { j_f: j }]
                        .iter()
                        .try_for_each(|alg| {
                            let p = alg
                                .compile(Comp3Form::default())
                                .map_err(|e| e.to_string())?;
                            let r = run(&p, &ThermalConfig::ideal(eps), Mode::Ideal)
                                .map_err(|e| e.to_string())?;
                            if !r.violations.is_empty() {
                                return Err(r.violations.join("; "));
                            }
                            close(
                                r.summary.target_bias.unwrap_or(f64::NAN),
                                level_bias(eps, j),
                                1e-12,
                                &p.name,
                            )
                        })
                })
            })
        },
    );

    check(
        &mut out,
        &mut failed,
        "closed random programs respect the compression bounds",
        || {
            (0..args.trials as u64).try_for_each(|t| {
                let seed = args.seed.wrapping_add(t);
                let n = 3 + (seed % 6) as usize;
                let p = random_closed_program(n, 12, seed);
                let eps = 0.01 + 0.09 * ((seed.wrapping_mul(2654435761) % 1000) as f64 / 1000.0);
                let r =
                    run(&p, &ThermalConfig::ideal(eps), Mode::Ideal).map_err(|e| e.to_string())?;
                let v = check_shannon(&r, &p);
                if v.violation || !r.violations.is_empty() {
                    Err(format!("seed {seed}: {v:?}"))
                } else {
                    Ok(())
                }
            })
        },
    );

    check(
        &mut out,
        &mut failed,
        "PAC2 j_f=3 beats eps0*sqrt(7)",
        || {
            let p =
                crate::compile::compile_pac2(3, Comp3Form::default()).map_err(|e| e.to_string())?;
            let r = run(&p, &ThermalConfig::ideal(0.01), Mode::Ideal).map_err(|e| e.to_string())?;
            let v = check_shannon(&r, &p);
            if v.bypass_margin.unwrap_or(0.0) > 0.007 {
                Ok(())
            } else {
                Err(format!("margin {:?}", v.bypass_margin))
            }
        },
    );

    check(
        &mut out,
        &mut failed,
        "demo cycle lowers total entropy",
        || {
            let p = crate::compile::compile_fig2_demo(Comp3Form::default())
                .map_err(|e| e.to_string())?;
            let r = run(&p, &ThermalConfig::ideal(0.1), Mode::Ideal).map_err(|e| e.to_string())?;
            let s = &r.summary;
            if s.initial_entropy - s.final_entropy >= 1e-5 && r.violations.is_empty() {
                Ok(())
            } else {
                Err(format!("{} -> {}", s.initial_entropy, s.final_entropy))
            }
        },
    );

    check(&mut out, &mut failed, "relaxation is a semigroup", || {
        let cfg = ThermalConfig {
            t1_comp: Some(3.0),
            t1_reset: Some(0.5),
            ..ThermalConfig::ideal(0.1)
        };
        let roles = [Role::Computation, Role::Reset, Role::Computation];
        let mut a =
            DiagonalState::new_thermal(&[0.4, -0.2, 0.7], &roles).map_err(|e| e.to_string())?;
        let mut b = a.clone();
        a.relax(0.7, &cfg)
            .and_then(|_| a.relax(1.1, &cfg))
            .map_err(|e| e.to_string())?;
        b.relax(1.8, &cfg).map_err(|e| e.to_string())?;
        a.probs()
            .iter()
            .zip(b.probs())
            .try_for_each(|(x, y)| close(*x, *y, 1e-12, "probability"))
    });

    check(
        &mut out,
        &mut failed,
        "comparison tables match the reference values",
        || {
            let t = table_figures();
            let fig: Vec<_> = t
                .fig1
                .iter()
                .map(|r| (r.rpc_spins, r.pac1_bits, r.pac2_bits))
                .collect();
            let t2: Vec<_> = t.table2.iter().map(|r| (r.bits, r.time_steps)).collect();
            let t1: Vec<_> = t.table1.iter().map(|r| (r.bits, r.time_bound)).collect();
            if fig == [(25, 18, 9), (625, 34, 17)]
                && t2 == [(30, 4040), (34, 36440)]
                && t1 == [(140, 250_000), (180, 1_250_000)]
            {
                Ok(())
            } else {
                Err(format!("{fig:?} {t1:?} {t2:?}"))
            }
        },
    );

    let code = if failed { EXIT_VIOLATION } else { EXIT_OK };
    Ok(Outcome {
        stdout: out,
        code,
        ..Default::default()
    })
}

/// Parses arguments and dispatches; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Compile(a) => merge(a).and_then(|c| cmd_compile(&c)),
        Command::Run(a) => merge(a).and_then(|c| cmd_run(&c)),
        Command::Tables(a) => cmd_tables(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            eprint!("{}", outcome.stderr);
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
