//! Step programs: ordered parallel groups of primitive operations, with cost metadata.
//!
//! # JSON-lines format
//!
//! The first line is a header object
//! `{"program", "n_bits", "roles", "bit_names", "targets", "target_level", "notation", "cost"}`.
//! Every following line is one parallel group,
//! `{"group": i, "label": "...", "ops": [...]}`, with ops written as
//! `{"op":"COMP3_PERM","bits":[a,b,c]}`, `{"op":"PT","bits":[src,dst]}`,
//! `{"op":"RESET","bits":[..]}` or `{"op":"WAIT","duration":d}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GateKind, GateSpec};
use crate::state::Role;

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(GateSpec),
    /// Polarization transfer: a SWAP moving `src`'s polarization onto `dst`.
    Pt {
        src: usize,
        dst: usize,
    },
    Reset(Vec<usize>),
    /// Let every bit relax for the given duration.
    Wait(f64),
}

impl Op {
    pub fn gate(kind: GateKind, operands: &[usize]) -> Self {
        Op::Gate(GateSpec::new(kind, operands.to_vec()).expect("compiler emits well-formed gates"))
    }

    /// Register bits touched; `None` for WAIT, which touches every bit.
    pub fn bits(&self) -> Option<Vec<usize>> {
        match self {
            Op::Gate(g) => Some(g.operands.clone()),
            Op::Pt { src, dst } => Some(vec![*src, *dst]),
            Op::Reset(bits) => Some(bits.clone()),
            Op::Wait(_) => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Op::Gate(g) => g.kind.name(),
            Op::Pt { .. } => "PT",
            Op::Reset(_) => "RESET",
            Op::Wait(_) => "WAIT",
        }
    }

    pub fn time_cost(&self) -> u64 {
        match self {
            Op::Gate(g) => g.kind.time_cost(),
            _ => 1,
        }
    }

    pub fn is_open(&self) -> bool {
        matches!(self, Op::Reset(_) | Op::Wait(_))
    }

    fn render(&self, names: &[String]) -> String {
        let n = |b: &usize| names.get(*b).cloned().unwrap_or_else(|| b.to_string());
        match self {
            Op::Gate(g) => {
                let ops: Vec<String> = g.operands.iter().map(n).collect();
                format!("{}({})", g.kind.name(), ops.join(";"))
            }
            Op::Pt { src, dst } => format!("PT({}→{})", n(src), n(dst)),
            Op::Reset(bits) => {
                let ops: Vec<String> = bits.iter().map(n).collect();
                format!("RESET({})", ops.join(","))
            }
            Op::Wait(d) => format!("WAIT({d})"),
        }
    }
}

/// Operations applied simultaneously; they touch disjoint bits.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub label: String,
    pub ops: Vec<Op>,
}

impl Group {
    pub fn new(label: impl Into<String>, ops: Vec<Op>) -> Self {
        Self {
            label: label.into(),
            ops,
        }
    }

    pub fn time_cost(&self) -> u64 {
        self.ops.iter().map(Op::time_cost).max().unwrap_or(0)
    }

    pub fn has_reset(&self) -> bool {
        self.ops.iter().any(Op::is_open)
    }

    pub fn has_compute(&self) -> bool {
        self.ops.iter().any(|op| !op.is_open())
    }

    pub fn summary(&self, names: &[String]) -> String {
        self.ops
            .iter()
            .map(|op| op.render(names))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cost {
    /// Time steps spent in groups that contain a gate or transfer.
    pub compute_steps: u64,
    /// Groups that contain a RESET or WAIT.
    pub reset_steps: u64,
    pub total_time_steps: u64,
}

impl Cost {
    pub fn count(groups: &[Group]) -> Self {
        groups.iter().fold(Cost::default(), |mut c, g| {
            let t = g.time_cost();
            c.total_time_steps += t;
            if g.has_compute() {
                c.compute_steps += t;
            }
            if g.has_reset() {
                c.reset_steps += 1;
            }
            c
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub name: String,
    pub n_bits: usize,
    pub roles: Vec<Role>,
    pub bit_names: Vec<String>,
    pub groups: Vec<Group>,
    /// Bits the program cools, in the order they are finished.
    pub targets: Vec<usize>,
    /// Purification level the targets reach.
    pub target_level: Option<u32>,
    /// Top-level expansion in recursion notation, e.g. `B{1→2}(5) M1(3) M1(4) M1(5)`.
    pub notation: String,
    pub cost: Cost,
}

impl Program {
    /// Validates the groups against the register and counts the cost.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        roles: Vec<Role>,
        bit_names: Vec<String>,
        groups: Vec<Group>,
        targets: Vec<usize>,
        target_level: Option<u32>,
        notation: impl Into<String>,
    ) -> Result<Self> {
        let cost = Cost::count(&groups);
        let program = Self {
            name: name.into(),
            n_bits: roles.len(),
            roles,
            bit_names,
            groups,
            targets,
            target_level,
            notation: notation.into(),
            cost,
        };
        program.validate()?;
        Ok(program)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bit_names.len() != self.n_bits || self.roles.len() != self.n_bits {
            return Err(Error::Compile(
                "bit names and roles must cover the register".into(),
            ));
        }
        let out_of_range = |b: usize| Error::BitOutOfRange {
            index: b,
            n_bits: self.n_bits,
        };
        if let Some(&t) = self.targets.iter().find(|&&t| t >= self.n_bits) {
            return Err(out_of_range(t));
        }
        for (i, group) in self.groups.iter().enumerate() {
            let mut seen = vec![false; self.n_bits];
            for op in &group.ops {
                let bits = match op.bits() {
                    Some(bits) => bits,
                    None if group.ops.len() == 1 => continue,
                    None => {
                        return Err(Error::Compile(format!("group {i}: WAIT must stand alone")))
                    }
                };
                if let Op::Gate(g) = op {
                    GateSpec::new(g.kind, g.operands.clone())?;
                }
                if let Op::Wait(d) = op {
                    if !(*d >= 0.0) {
                        return Err(Error::Compile(format!("group {i}: negative wait")));
                    }
                }
                for b in bits {
                    if b >= self.n_bits {
                        return Err(out_of_range(b));
                    }
                    if std::mem::replace(&mut seen[b], true) {
                        return Err(Error::Compile(format!("group {i} touches bit {b} twice")));
                    }
                }
            }
        }
        if Cost::count(&self.groups) != self.cost {
            return Err(Error::Compile(
                "stored cost does not match the step list".into(),
            ));
        }
        Ok(())
    }

    /// True when the program contains no RESET or WAIT.
    pub fn is_closed(&self) -> bool {
        !self.groups.iter().any(Group::has_reset)
    }

    pub fn reset_bits(&self) -> Vec<usize> {
        (0..self.n_bits)
            .filter(|&b| self.roles[b] == Role::Reset)
            .collect()
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let header = Header {
            program: self.name.clone(),
            n_bits: self.n_bits,
            roles: self.roles.clone(),
            bit_names: self.bit_names.clone(),
            targets: self.targets.clone(),
            target_level: self.target_level,
            notation: self.notation.clone(),
            cost: self.cost,
        };
        let mut out = serde_json::to_string(&header)?;
        out.push('\n');
        for (i, g) in self.groups.iter().enumerate() {
            let line = GroupLine {
                group: i,
                label: g.label.clone(),
                ops: g.ops.iter().map(OpRecord::from).collect(),
            };
            out.push_str(&serde_json::to_string(&line)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Header = serde_json::from_str(
            lines
                .next()
                .ok_or_else(|| Error::Parse("empty program".into()))?,
        )?;
        let mut groups = Vec::new();
        for (i, line) in lines.enumerate() {
            let g: GroupLine = serde_json::from_str(line)?;
            if g.group != i {
                return Err(Error::Parse(format!(
                    "group {} out of order (expected {i})",
                    g.group
                )));
            }
            let ops = g
                .ops
                .into_iter()
                .map(Op::try_from)
                .collect::<Result<Vec<_>>>()?;
            groups.push(Group::new(g.label, ops));
        }
        if header.roles.len() != header.n_bits {
            return Err(Error::Parse("roles do not match n_bits".into()));
        }
        let program = Self {
            name: header.program,
            n_bits: header.n_bits,
            roles: header.roles,
            bit_names: header.bit_names,
            groups,
            targets: header.targets,
            target_level: header.target_level,
            notation: header.notation,
            cost: header.cost,
        };
        program.validate()?;
        Ok(program)
    }

    /// Human-readable listing, one time step per line.
    pub fn disassemble(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# {}: {} bits, {} time steps ({} compute, {} reset)",
            self.name,
            self.n_bits,
            self.cost.total_time_steps,
            self.cost.compute_steps,
            self.cost.reset_steps
        );
        let _ = writeln!(out, "# {}", self.notation);
        let layout: Vec<String> = self
            .bit_names
            .iter()
            .zip(&self.roles)
            .enumerate()
            .map(|(i, (n, r))| format!("{i}={n}:{}", r.code()))
            .collect();
        let _ = writeln!(out, "# bits {}", layout.join(" "));
        let width = self.groups.len().saturating_sub(1).to_string().len();
        for (i, g) in self.groups.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i:>width$}  [{}]  {}",
                g.label,
                g.summary(&self.bit_names)
            );
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    program: String,
    n_bits: usize,
    roles: Vec<Role>,
    bit_names: Vec<String>,
    targets: Vec<usize>,
    target_level: Option<u32>,
    notation: String,
    cost: Cost,
}

#[derive(Serialize, Deserialize)]
struct GroupLine {
    group: usize,
    label: String,
    ops: Vec<OpRecord>,
}

#[derive(Serialize, Deserialize)]
struct OpRecord {
    op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bits: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    duration: Option<f64>,
}

impl From<&Op> for OpRecord {
    fn from(op: &Op) -> Self {
        let duration = match op {
            Op::Wait(d) => Some(*d),
            _ => None,
        };
        OpRecord {
            op: op.name().to_string(),
            bits: op.bits(),
            duration,
        }
    }
}

impl TryFrom<OpRecord> for Op {
    type Error = Error;

    fn try_from(rec: OpRecord) -> Result<Op> {
        let bits = || {
            rec.bits
                .clone()
                .ok_or_else(|| Error::Parse(format!("{} needs bits", rec.op)))
        };
        Ok(match rec.op.as_str() {
            "PT" => match bits()?.as_slice() {
                &[src, dst] => Op::Pt { src, dst },
                other => return Err(Error::Parse(format!("PT needs two bits, got {other:?}"))),
            },
            "RESET" => Op::Reset(bits()?),
            "WAIT" => Op::Wait(
                rec.duration
                    .ok_or_else(|| Error::Parse("WAIT needs a duration".into()))?,
            ),
            name => {
                let kind = GateKind::from_name(name)
                    .ok_or_else(|| Error::Parse(format!("unknown op {name}")))?;
                Op::Gate(GateSpec::new(kind, bits()?)?)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Program {
        let roles = vec![
            Role::Computation,
            Role::Reset,
            Role::Computation,
            Role::Reset,
        ];
        let names = vec!["a1".into(), "r1".into(), "a2".into(), "r2".into()];
        let groups = vec![
            Group::new(
                "init",
                vec![Op::Pt { src: 1, dst: 0 }, Op::Pt { src: 3, dst: 2 }],
            ),
            Group::new(
                "mix",
                vec![Op::gate(GateKind::Cnot, &[0, 2]), Op::Reset(vec![1, 3])],
            ),
            Group::new("wait", vec![Op::Wait(0.5)]),
        ];
        Program::new("tiny", roles, names, groups, vec![2], Some(0), "demo").unwrap()
    }

    #[test]
    fn cost_counting() {
        let p = tiny();
        assert_eq!(
            p.cost,
            Cost {
                compute_steps: 2,
                reset_steps: 2,
                total_time_steps: 3
            }
        );
        assert!(!p.is_closed());
        assert_eq!(p.reset_bits(), vec![1, 3]);
    }

    #[test]
    fn jsonl_round_trip_and_shape() {
        let p = tiny();
        let text = p.to_jsonl().unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(
            lines[2],
            r#"{"group":1,"label":"mix","ops":[{"op":"CNOT","bits":[0,2]},{"op":"RESET","bits":[1,3]}]}"#
        );
        assert_eq!(
            lines[3],
            r#"{"group":2,"label":"wait","ops":[{"op":"WAIT","duration":0.5}]}"#
        );
        assert_eq!(Program::from_jsonl(&text).unwrap(), p);
    }

    #[test]
    fn rejects_overlapping_group() {
        let roles = vec![Role::Computation; 3];
        let names = vec!["a".into(), "b".into(), "c".into()];
        let groups = vec![Group::new(
            "x",
            vec![Op::Pt { src: 0, dst: 1 }, Op::Pt { src: 1, dst: 2 }],
        )];
        assert!(Program::new(
            "bad",
            roles.clone(),
            names.clone(),
            groups,
            vec![],
            None,
            ""
        )
        .is_err());
        let groups = vec![Group::new("x", vec![Op::Pt { src: 0, dst: 3 }])];
        assert!(matches!(
            Program::new(
                "bad",
                roles.clone(),
                names.clone(),
                groups,
                vec![],
                None,
                ""
            ),
            Err(Error::BitOutOfRange { .. })
        ));
        let groups = vec![Group::new("x", vec![Op::Wait(1.0), Op::Reset(vec![0])])];
        assert!(Program::new("bad", roles, names, groups, vec![], None, "").is_err());
    }

    #[test]
    fn rejects_tampered_cost_and_bad_ops() {
        let text = tiny()
            .to_jsonl()
            .unwrap()
            .replace("\"total_time_steps\":3", "\"total_time_steps\":4");
        assert!(Program::from_jsonl(&text).is_err());
        let text = tiny().to_jsonl().unwrap().replace("CNOT", "TOFFOLI");
        assert!(matches!(Program::from_jsonl(&text), Err(Error::Parse(_))));
        assert!(Program::from_jsonl("").is_err());
    }

    #[test]
    fn disassembly_lines() {
        let d = tiny().disassemble();
        assert!(d.contains("0  [init]  PT(r1→a1) PT(r2→a2)"));
        assert!(d.contains("1  [mix]  CNOT(a1;a2) RESET(r1,r2)"));
    }
}
