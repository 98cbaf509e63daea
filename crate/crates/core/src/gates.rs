//! The reversible gate set as permutation tables on local bit patterns.
//!
//! A local pattern over operands `(A, B, C)` is read the way the truth
//! tables are written: `A` is the most significant bit, so pattern `0b011`
//! means `A=0, B=1, C=1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `{0,1}^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    arity: usize,
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(arity: usize, image: Vec<usize>) -> Result<Self> {
        if arity == 0 || arity > 16 {
            return Err(Error::InvalidPermutation(format!(
                "unsupported arity {arity}"
            )));
        }
        let size = 1usize << arity;
        if image.len() != size {
            return Err(Error::InvalidPermutation(format!(
                "table has {} rows, expected {size}",
                image.len()
            )));
        }
        let mut seen = vec![false; size];
        for &y in &image {
            if y >= size || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidPermutation(format!(
                    "pattern {y} is hit twice or out of range"
                )));
            }
        }
        Ok(Self { arity, image })
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            image: (0..1usize << arity).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn apply(&self, pattern: usize) -> usize {
        self.image[pattern]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.image.len()];
        for (x, &y) in self.image.iter().enumerate() {
            inv[y] = x;
        }
        Self {
            arity: self.arity,
            image: inv,
        }
    }

    /// `other` after `self`.
    pub fn then(&self, other: &Permutation) -> Self {
        assert_eq!(self.arity, other.arity);
        Self {
            arity: self.arity,
            image: self.image.iter().map(|&y| other.image[y]).collect(),
        }
    }

    /// Truth table as `input → output` rows of bit strings, e.g. `011 → 100`.
    pub fn truth_table(&self, header: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input:{header} → output:{header}");
        for (x, &y) in self.image.iter().enumerate() {
            let _ = writeln!(out, "{:0w$b} → {:0w$b}", x, y, w = self.arity);
        }
        out
    }
}

/// Builds a permutation from a function on operand bit vectors (index 0 = first operand).
fn table_from_fn(arity: usize, f: impl Fn(&[u8]) -> Vec<u8>) -> Permutation {
    let image = (0..1usize << arity)
        .map(|x| {
            let bits: Vec<u8> = (0..arity)
                .map(|j| ((x >> (arity - 1 - j)) & 1) as u8)
                .collect();
            f(&bits)
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | b as usize)
        })
        .collect();
    Permutation::new(arity, image).expect("gate table is a bijection")
}

/// CNOT over operands `(C, B)`: `C → C`, `B → B ⊕ C`.
pub fn cnot_table() -> Permutation {
    table_from_fn(2, |v| vec![v[0], v[1] ^ v[0]])
}

/// Over `(A, B, C)`: swap `A` and `C` when `B = 0`.
pub fn cswap_variant_table() -> Permutation {
    table_from_fn(3, |v| {
        if v[1] == 0 {
            vec![v[2], v[1], v[0]]
        } else {
            v.to_vec()
        }
    })
}

/// 3B-Comp as CNOT (control `C`, target `B`) followed by the swap-on-`B=0` gate.
pub fn comp3_two_gate_table() -> Permutation {
    let cnot = table_from_fn(3, |v| vec![v[0], v[1] ^ v[2], v[2]]);
    cnot.then(&cswap_variant_table())
}

/// Single-permutation 3B-Comp: identity except `011 ↔ 100`.
pub fn comp3_perm_table() -> Permutation {
    let mut image: Vec<usize> = (0..8).collect();
    image.swap(0b011, 0b100);
    Permutation::new(3, image).expect("bijection")
}

/// Polarization transfer as a SWAP over `(X, r)`.
pub fn pt_swap_table() -> Permutation {
    table_from_fn(2, |v| vec![v[1], v[0]])
}

/// Cooled-bit bias after 3B-Comp on three independent bits of bias `eps`.
pub fn predicted_comp3_bias(eps: f64) -> f64 {
    (3.0 * eps - eps.powi(3)) / 2.0
}

/// Small-bias form of [`predicted_comp3_bias`].
pub fn predicted_comp3_bias_small(eps: f64) -> f64 {
    1.5 * eps
}

/// Bias after `levels` nested compressions starting from `eps0`.
pub fn level_bias(eps0: f64, levels: u32) -> f64 {
    (0..levels).fold(eps0, |e, _| predicted_comp3_bias(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    Cnot,
    CswapVariant,
    Comp3TwoGate,
    Comp3Perm,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Swap => 2,
            GateKind::CswapVariant | GateKind::Comp3TwoGate | GateKind::Comp3Perm => 3,
        }
    }

    pub fn table(self) -> Permutation {
        match self {
            GateKind::Cnot => cnot_table(),
            GateKind::CswapVariant => cswap_variant_table(),
            GateKind::Comp3TwoGate => comp3_two_gate_table(),
            GateKind::Comp3Perm => comp3_perm_table(),
            GateKind::Swap => pt_swap_table(),
        }
    }

    /// Time steps charged for one application.
    pub fn time_cost(self) -> u64 {
        match self {
            GateKind::Comp3TwoGate => 2,
            _ => 1,
        }
    }

    pub fn is_comp3(self) -> bool {
        matches!(self, GateKind::Comp3TwoGate | GateKind::Comp3Perm)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Cnot => "CNOT",
            GateKind::CswapVariant => "CSWAP_VARIANT",
            GateKind::Comp3TwoGate => "COMP3_TWO_GATE",
            GateKind::Comp3Perm => "COMP3_PERM",
            GateKind::Swap => "SWAP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "CNOT" => GateKind::Cnot,
            "CSWAP_VARIANT" => GateKind::CswapVariant,
            "COMP3_TWO_GATE" => GateKind::Comp3TwoGate,
            "COMP3_PERM" => GateKind::Comp3Perm,
            "SWAP" => GateKind::Swap,
            _ => return None,
        })
    }

    /// Marginal biases of `(A, B, C)` after a 3B-Comp on three independent bits of equal bias.
    pub fn comp3_marginals(self, eps: f64) -> Option<[f64; 3]> {
        let heated = (eps + eps.powi(3)) / 2.0;
        match self {
            GateKind::Comp3Perm => Some([predicted_comp3_bias(eps), heated, heated]),
            // B ends up holding B⊕C, whose bias is the product of the input biases
            GateKind::Comp3TwoGate => Some([predicted_comp3_bias(eps), eps * eps, heated]),
            _ => None,
        }
    }
}

/// A gate bound to register operands, in `(A, B, C)` order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub operands: Vec<usize>,
}

impl GateSpec {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Result<Self> {
        if operands.len() != kind.arity() {
            return Err(Error::InvalidPermutation(format!(
                "{} takes {} operands, got {}",
                kind.name(),
                kind.arity(),
                operands.len()
            )));
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[..i].contains(a) {
                return Err(Error::InvalidPermutation(format!("repeated operand {a}")));
            }
        }
        Ok(Self { kind, operands })
    }

    pub fn table(&self) -> Permutation {
        self.kind.table()
    }
}
