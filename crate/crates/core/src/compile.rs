//! Compilers for the recursive cooling procedures.
//!
//! Register layouts, with bit 0 the rightmost bit `a1`:
//!
//! * one reset bit per computation bit: `a_i` at index `2(i-1)`, its reset
//!   partner `r_i` at `2(i-1)+1`;
//! * shared reset bit: the reset bit sits at index 0 and `a_i` at index `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::program::{Group, Op, Program};
use crate::state::Role;

/// Which 3B-Comp construction compiled programs use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Comp3Form {
    #[default]
    SinglePermutation,
    TwoGate,
}

impl Comp3Form {
    pub fn kind(self) -> GateKind {
        match self {
            Comp3Form::SinglePermutation => GateKind::Comp3Perm,
            Comp3Form::TwoGate => GateKind::Comp3TwoGate,
        }
    }
}

fn comp_index(i: usize) -> usize {
    2 * (i - 1)
}

fn reset_index(i: usize) -> usize {
    2 * (i - 1) + 1
}

fn comp_label(from: u32, k: usize) -> String {
    format!("B{{{}→{}}}({k})", from, from + 1)
}

/// Top-level expansion of `M_j(k)` in recursion notation.
pub fn m_notation(j: u32, k: usize) -> String {
    if j == 0 {
        format!("M0({k})")
    } else {
        let p = j - 1;
        format!(
            "{} M{p}({}) M{p}({}) M{p}({k})",
            comp_label(p, k),
            k - 2,
            k - 1
        )
    }
}

struct DedicatedResetBuilder {
    groups: Vec<Group>,
    comp3: GateKind,
}

impl DedicatedResetBuilder {
    fn emit(&mut self, j: u32, k: usize) {
        match j {
            0 => self.groups.push(Group::new(
                format!("M0({k})"),
                vec![Op::Pt {
                    src: reset_index(k),
                    dst: comp_index(k),
                }],
            )),
            1 => {
                let trio = [k, k - 1, k - 2];
                // the three M0 transfers run in parallel
                self.groups.push(Group::new(
                    format!("M1({k})"),
                    trio.iter()
                        .map(|&i| Op::Pt {
                            src: reset_index(i),
                            dst: comp_index(i),
                        })
                        .collect(),
                ));
                self.groups.push(Group::new(
                    comp_label(0, k),
                    vec![
                        Op::gate(self.comp3, &trio.map(comp_index)),
                        Op::Reset(trio.iter().map(|&i| reset_index(i)).collect()),
                    ],
                ));
            }
            _ => {
                // applied right to left: M_{j-1}(k) first
                self.emit(j - 1, k);
                self.emit(j - 1, k - 1);
                self.emit(j - 1, k - 2);
                self.groups.push(Group::new(
                    comp_label(j - 1, k),
                    vec![Op::gate(
                        self.comp3,
                        &[comp_index(k), comp_index(k - 1), comp_index(k - 2)],
                    )],
                ));
            }
        }
    }
}

fn dedicated_layout(n_comp: usize) -> (Vec<Role>, Vec<String>) {
    let mut roles = Vec::with_capacity(2 * n_comp);
    let mut names = Vec::with_capacity(2 * n_comp);
    for i in 1..=n_comp {
        roles.extend([Role::Computation, Role::Reset]);
        names.extend([format!("a{i}"), format!("r{i}")]);
    }
    (roles, names)
}

/// `M_j(k)` on a register where every computation bit has its own reset bit.
pub fn compile_m(j: u32, k: usize, n_bits: usize, form: Comp3Form) -> Result<Program> {
    let min_k = 2 * j as usize + 1;
    if k < min_k {
        return Err(Error::Compile(format!(
            "M_{j}({k}) needs k ≥ 2j+1 = {min_k} (it touches bits a_k down to a_(k-2j))"
        )));
    }
    if !n_bits.is_multiple_of(2) || n_bits < 2 * k {
        return Err(Error::Compile(format!(
            "M_{j}({k}) needs an even register of at least {} bits (computation + reset pairs), got {n_bits}",
            2 * k
        )));
    }
    let mut b = DedicatedResetBuilder {
        groups: Vec::new(),
        comp3: form.kind(),
    };
    b.emit(j, k);
    let (roles, names) = dedicated_layout(n_bits / 2);
    Program::new(
        format!("M{j}({k})"),
        roles,
        names,
        b.groups,
        vec![comp_index(k)],
        Some(j),
        m_notation(j, k),
    )
}

/// Cools one bit to level `j_f` using `2 j_f + 1` computation bits, each with a reset bit.
pub fn compile_pac1(j_f: u32, form: Comp3Form) -> Result<Program> {
    if j_f == 0 {
        return Err(Error::Compile("target level must be at least 1".into()));
    }
    let k = 2 * j_f as usize + 1;
    let mut p = compile_m(j_f, k, 2 * k, form)?;
    p.name = format!("pac1(j_f={j_f})");
    Ok(p)
}

/// Cools `m` bits to level `j_f` with `2 j_f + m` computation bits, one after another.
pub fn compile_pac1_multi(m: usize, j_f: u32, form: Comp3Form) -> Result<Program> {
    if j_f == 0 || m == 0 {
        return Err(Error::Compile("need j_f ≥ 1 and m ≥ 1".into()));
    }
    if m == 1 {
        return compile_pac1(j_f, form);
    }
    let n_comp = 2 * j_f as usize + m;
    let mut b = DedicatedResetBuilder {
        groups: Vec::new(),
        comp3: form.kind(),
    };
    let tops: Vec<usize> = (0..m).map(|t| n_comp - t).collect();
    for &k in &tops {
        b.emit(j_f, k);
    }
    let (roles, names) = dedicated_layout(n_comp);
    let notation = tops
        .iter()
        .rev()
        .map(|k| format!("M{j_f}({k})"))
        .collect::<Vec<_>>()
        .join(" ");
    Program::new(
        format!("pac1(m={m}, j_f={j_f})"),
        roles,
        names,
        b.groups,
        tops.iter().map(|&k| comp_index(k)).collect(),
        Some(j_f),
        notation,
    )
}

struct SharedResetBuilder {
    groups: Vec<Group>,
    comp3: GateKind,
    reset_fresh: bool,
}

impl SharedResetBuilder {
    /// Brings the reset bit's polarization to `a_k` by a chain of neighbouring transfers.
    fn initiate(&mut self, k: usize) {
        let label = format!("M0({k})");
        if k == 0 {
            if !self.reset_fresh {
                self.groups
                    .push(Group::new(label, vec![Op::Reset(vec![0])]));
                self.reset_fresh = true;
            }
            return;
        }
        self.groups
            .push(Group::new(label.clone(), vec![Op::Pt { src: 0, dst: 1 }]));
        // the reset bit now holds a_1's old state
        self.groups
            .push(Group::new(label.clone(), vec![Op::Reset(vec![0])]));
        self.reset_fresh = true;
        for i in 1..k {
            self.groups.push(Group::new(
                label.clone(),
                vec![Op::Pt { src: i, dst: i + 1 }],
            ));
        }
    }

    fn emit(&mut self, j: u32, k: usize) {
        if j == 0 {
            self.initiate(k);
            return;
        }
        self.emit(j - 1, k);
        self.emit(j - 1, k - 1);
        self.emit(j - 1, k - 2);
        if k - 2 == 0 {
            self.reset_fresh = false;
        }
        self.groups.push(Group::new(
            comp_label(j - 1, k),
            vec![Op::gate(self.comp3, &[k, k - 1, k - 2])],
        ));
    }
}

/// Cools one bit to level `j_f` with `2 j_f` computation bits and a single shared reset bit.
pub fn compile_pac2(j_f: u32, form: Comp3Form) -> Result<Program> {
    if j_f == 0 {
        return Err(Error::Compile("target level must be at least 1".into()));
    }
    let k = 2 * j_f as usize;
    let mut b = SharedResetBuilder {
        groups: Vec::new(),
        comp3: form.kind(),
        reset_fresh: true,
    };
    b.emit(j_f, k);
    let mut roles = vec![Role::Reset];
    roles.extend(std::iter::repeat_n(Role::Computation, k));
    let mut names = vec!["r".to_string()];
    names.extend((1..=k).map(|i| format!("a{i}")));
    Program::new(
        format!("pac2(j_f={j_f})"),
        roles,
        names,
        b.groups,
        vec![k],
        Some(j_f),
        m_notation(j_f, k),
    )
}

/// The three-step demonstration on `A, B, C` with reset partners `rA, rB, rC`.
pub fn compile_fig2_demo(form: Comp3Form) -> Result<Program> {
    let (roles, _) = dedicated_layout(3);
    let names = ["C", "rC", "B", "rB", "A", "rA"].map(String::from).to_vec();
    let (a, b, c) = (comp_index(3), comp_index(2), comp_index(1));
    let (rb, rc) = (reset_index(2), reset_index(1));
    let groups = vec![
        Group::new("3B-Comp", vec![Op::gate(form.kind(), &[a, b, c])]),
        Group::new(
            "PT",
            vec![Op::Pt { src: rb, dst: b }, Op::Pt { src: rc, dst: c }],
        ),
        Group::new("RESET", vec![Op::Reset(vec![rb, rc])]),
    ];
    Program::new(
        "fig2-demo",
        roles,
        names,
        groups,
        vec![a],
        Some(1),
        "RESET(rB,rC) PT(rB→B) PT(rC→C) 3B-Comp(A;B;C)",
    )
}

/// A compilable cooling procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Algorithm {
    /// `m` bits to level `j_f`, one reset bit per computation bit.
    Pac1 {
        j_f: u32,
        m: usize,
    },
    /// One bit to level `j_f` with a single shared reset bit.
    Pac2 {
        j_f: u32,
    },
    Fig2,
    /// A bare `M_j(k)` on a `2k`-bit register.
    Mj {
        j: u32,
        k: usize,
    },
}

impl Algorithm {
    pub fn compile(&self, form: Comp3Form) -> Result<Program> {
        match *self {
            Algorithm::Pac1 { j_f, m } => compile_pac1_multi(m, j_f, form),
            Algorithm::Pac2 { j_f } => compile_pac2(j_f, form),
            Algorithm::Fig2 => compile_fig2_demo(form),
            Algorithm::Mj { j, k } => compile_m(j, k, 2 * k, form),
        }
    }

    /// Target level, when one is defined.
    pub fn level(&self) -> u32 {
        match *self {
            Algorithm::Pac1 { j_f, .. } | Algorithm::Pac2 { j_f } => j_f,
            Algorithm::Fig2 => 1,
            Algorithm::Mj { j, .. } => j,
        }
    }
}

/// Purification level held by each bit, as far as static analysis can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Never initiated.
    Raw,
    At(u32),
    /// Left over from a compression.
    Heated,
}

/// Replays the program symbolically and rejects any 3B-Comp whose operands are not
/// all at the same purification level. Returns the final level of every bit.
pub fn check_level_discipline(program: &Program) -> Result<Vec<Level>> {
    let mut levels: Vec<Level> = program
        .roles
        .iter()
        .map(|r| {
            if *r == Role::Reset {
                Level::At(0)
            } else {
                Level::Raw
            }
        })
        .collect();
    for (i, group) in program.groups.iter().enumerate() {
        for op in &group.ops {
            match op {
                Op::Pt { src, dst } => levels.swap(*src, *dst),
                Op::Reset(bits) => bits.iter().for_each(|&b| levels[b] = Level::At(0)),
                Op::Wait(_) => {
                    for (l, r) in levels.iter_mut().zip(&program.roles) {
                        *l = if *r == Role::Reset {
                            Level::At(0)
                        } else {
                            Level::Raw
                        };
                    }
                }
                Op::Gate(g) if g.kind == GateKind::Swap => {
                    levels.swap(g.operands[0], g.operands[1])
                }
                Op::Gate(g) if g.kind.is_comp3() => {
                    let trio = [
                        levels[g.operands[0]],
                        levels[g.operands[1]],
                        levels[g.operands[2]],
                    ];
                    match trio {
                        [Level::At(x), Level::At(y), Level::At(z)] if x == y && y == z => {
                            levels[g.operands[0]] = Level::At(x + 1);
                            levels[g.operands[1]] = Level::Heated;
                            levels[g.operands[2]] = Level::Heated;
                        }
                        _ => {
                            return Err(Error::Compile(format!(
                                "group {i} ({}): 3B-Comp on mismatched levels {trio:?}",
                                group.label
                            )))
                        }
                    }
                }
                Op::Gate(g) => g.operands.iter().for_each(|&b| levels[b] = Level::Heated),
            }
        }
    }
    Ok(levels)
}

/// Closed-form resource counts for cooling one bit to level `j_f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormCosts {
    pub j_f: u32,
    pub time_steps: u64,
    pub reset_steps: u64,
    pub pac1_bits: u64,
    pub pac2_bits: u64,
    /// `(3/2)^j_f`, valid while the final bias stays small.
    pub bias_multiplier_smalleps: f64,
}

pub fn closed_form_costs(j_f: u32) -> Result<ClosedFormCosts> {
    if j_f == 0 || j_f > 39 {
        return Err(Error::Compile(format!("j_f must lie in 1..=39, got {j_f}")));
    }
    let pow3 = 3u64.pow(j_f - 1);
    Ok(ClosedFormCosts {
        j_f,
        time_steps: (5 * pow3 - 1) / 2,
        reset_steps: pow3,
        pac1_bits: 4 * j_f as u64 + 2,
        pac2_bits: 2 * j_f as u64 + 1,
        bias_multiplier_smalleps: 1.5f64.powi(j_f as i32),
    })
}

/// Published cost formulas of the earlier block-compression cooling scheme (comparator only).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockCompressionCosts {
    pub j_f: u32,
    pub bits_approx: u64,
    /// Upper bound on time steps.
    pub time_bound: u64,
    pub bias_multiplier: u64,
}

pub fn block_compression_costs(j_f: u32) -> Result<BlockCompressionCosts> {
    if j_f == 0 || j_f > 20 {
        return Err(Error::Compile(format!("j_f must lie in 1..=20, got {j_f}")));
    }
    Ok(BlockCompressionCosts {
        j_f,
        bits_approx: 40 * j_f as u64,
        time_bound: 400 * 5u64.pow(j_f + 1),
        bias_multiplier: 1 << j_f,
    })
}
