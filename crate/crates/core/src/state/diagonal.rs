use serde::{Deserialize, Serialize};

use super::Role;
use crate::config::ThermalConfig;
use crate::error::{Error, Result};
use crate::gates::{GateSpec, Permutation};

/// Largest register the dense representation accepts by default (16M entries).
pub const DEFAULT_MAX_BITS: usize = 24;

const NEGATIVE_CLAMP: f64 = 1e-15;

/// Exact probability distribution over the `2^n` basis states of a register.
///
/// Bit `i` of a basis index is the value of register bit `i`; value 0 is spin-up.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalState {
    n_bits: usize,
    probs: Vec<f64>,
    roles: Vec<Role>,
}

/// JSON form of a state: `{n_bits, roles, probs}` with `probs[x]` the probability
/// of basis index `x` (bit 0 is the least significant).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub n_bits: usize,
    pub roles: Vec<Role>,
    pub probs: Vec<f64>,
}

fn check_bias(b: f64) -> Result<()> {
    if b.abs() <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("bias {b} outside [-1, 1]")))
    }
}

impl DiagonalState {
    /// Product of per-bit thermal distributions.
    pub fn new_thermal(biases: &[f64], roles: &[Role]) -> Result<Self> {
        Self::new_thermal_with_cap(biases, roles, DEFAULT_MAX_BITS)
    }

    pub fn new_thermal_with_cap(biases: &[f64], roles: &[Role], cap: usize) -> Result<Self> {
        let n = biases.len();
        if roles.len() != n {
            return Err(Error::Config(format!(
                "{n} biases but {} roles",
                roles.len()
            )));
        }
        if n == 0 {
            return Err(Error::Config("register needs at least one bit".into()));
        }
        if n > cap {
            return Err(Error::CapExceeded { n_bits: n, cap });
        }
        for &b in biases {
            check_bias(b)?;
        }
        let mut probs = vec![1.0];
        // grow from the most significant bit down so that bit 0 varies fastest
        for &b in biases.iter().rev() {
            let (up, down) = ((1.0 + b) / 2.0, (1.0 - b) / 2.0);
            probs = probs.iter().flat_map(|&p| [p * up, p * down]).collect();
        }
        Ok(Self {
            n_bits: n,
            probs,
            roles: roles.to_vec(),
        })
    }

    pub fn from_snapshot(snap: StateSnapshot) -> Result<Self> {
        if snap.roles.len() != snap.n_bits || snap.probs.len() != 1usize << snap.n_bits {
            return Err(Error::Parse("snapshot sizes are inconsistent".into()));
        }
        let mut state = Self {
            n_bits: snap.n_bits,
            probs: snap.probs,
            roles: snap.roles,
        };
        state.check_probabilities()?;
        Ok(state)
    }

    pub fn snapshot(&self) -> StateSnapshot {
        StateSnapshot {
            n_bits: self.n_bits,
            roles: self.roles.clone(),
            probs: self.probs.clone(),
        }
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    fn check_bit(&self, bit: usize) -> Result<()> {
        if bit < self.n_bits {
            Ok(())
        } else {
            Err(Error::BitOutOfRange {
                index: bit,
                n_bits: self.n_bits,
            })
        }
    }

    /// `P(bit = 0) - P(bit = 1)`.
    pub fn marginal_bias(&self, bit: usize) -> Result<f64> {
        self.check_bit(bit)?;
        let mask = 1usize << bit;
        let p1: f64 = self
            .probs
            .iter()
            .enumerate()
            .filter(|(x, _)| x & mask != 0)
            .map(|(_, p)| p)
            .sum();
        Ok(1.0 - 2.0 * p1)
    }

    /// Every marginal bias, in bit order.
    pub fn biases(&self) -> Vec<f64> {
        let mut p1 = vec![0.0; self.n_bits];
        for (x, &p) in self.probs.iter().enumerate() {
            let mut rest = x;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                p1[b] += p;
                rest &= rest - 1;
            }
        }
        p1.into_iter().map(|q| 1.0 - 2.0 * q).collect()
    }

    /// Joint distribution of bits `(i, j)` indexed by `vi + 2 vj`.
    pub fn pair_distribution(&self, i: usize, j: usize) -> Result<[f64; 4]> {
        self.check_bit(i)?;
        self.check_bit(j)?;
        let mut out = [0.0; 4];
        for (x, &p) in self.probs.iter().enumerate() {
            out[((x >> i) & 1) | (((x >> j) & 1) << 1)] += p;
        }
        Ok(out)
    }

    /// Mutual information in bits between two register bits.
    pub fn mutual_information(&self, i: usize, j: usize) -> Result<f64> {
        let joint = self.pair_distribution(i, j)?;
        let pi = [joint[0] + joint[2], joint[1] + joint[3]];
        let pj = [joint[0] + joint[1], joint[2] + joint[3]];
        let mut mi = 0.0;
        for (k, &p) in joint.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (pi[k & 1] * pj[k >> 1])).log2();
            }
        }
        Ok(mi.max(0.0))
    }

    /// Re-indexes probability mass: the operand bits of each basis state, read as a local
    /// pattern with `bits[0]` most significant, are mapped through `perm`.
    pub fn apply_permutation(&mut self, perm: &Permutation, bits: &[usize]) -> Result<()> {
        let k = bits.len();
        if perm.arity() != k {
            return Err(Error::InvalidPermutation(format!(
                "table of arity {} applied to {k} operands",
                perm.arity()
            )));
        }
        for (i, &b) in bits.iter().enumerate() {
            self.check_bit(b)?;
            if bits[..i].contains(&b) {
                return Err(Error::InvalidPermutation(format!("repeated operand {b}")));
            }
        }
        let operand_mask: usize = bits.iter().map(|&b| 1usize << b).sum();
        // scatter table: local pattern -> register bits to set
        let scatter: Vec<usize> = (0..1usize << k)
            .map(|y| {
                bits.iter()
                    .enumerate()
                    .filter(|(j, _)| (y >> (k - 1 - j)) & 1 == 1)
                    .map(|(_, &b)| 1usize << b)
                    .sum()
            })
            .collect();
        let mut next = vec![0.0; self.probs.len()];
        for (x, &p) in self.probs.iter().enumerate() {
            let local = bits
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | ((x >> b) & 1));
            let y = perm.apply(local);
            next[(x & !operand_mask) | scatter[y]] = p;
        }
        self.probs = next;
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &GateSpec) -> Result<()> {
        self.apply_permutation(&gate.table(), &gate.operands)
    }

    /// Mixes bit `bit` toward a fresh independent thermal bit: with probability `weight`
    /// its state is discarded and replaced.
    fn replace_bit(&mut self, bit: usize, equilibrium: f64, weight: f64) {
        if weight == 0.0 {
            return;
        }
        let mask = 1usize << bit;
        let (up, down) = ((1.0 + equilibrium) / 2.0, (1.0 - equilibrium) / 2.0);
        for x in 0..self.probs.len() {
            if x & mask != 0 {
                continue;
            }
            let (p0, p1) = (self.probs[x], self.probs[x | mask]);
            let m = p0 + p1;
            self.probs[x] = (1.0 - weight) * p0 + weight * m * up;
            self.probs[x | mask] = (1.0 - weight) * p1 + weight * m * down;
        }
    }

    /// Traces out `bit` and replaces it by an independent thermal bit.
    ///
    /// Only reset bits may be reset unless `allow_computation` is set.
    pub fn apply_reset(
        &mut self,
        bit: usize,
        equilibrium_bias: f64,
        allow_computation: bool,
    ) -> Result<()> {
        self.check_bit(bit)?;
        check_bias(equilibrium_bias)?;
        if self.roles[bit] != Role::Reset && !allow_computation {
            return Err(Error::Policy(format!(
                "bit {bit} is a computation bit and cannot be reset"
            )));
        }
        self.replace_bit(bit, equilibrium_bias, 1.0);
        self.check_probabilities()
    }

    /// Independent per-bit relaxation toward equilibrium over `duration`.
    pub fn relax(&mut self, duration: f64, config: &ThermalConfig) -> Result<()> {
        if !(duration >= 0.0) {
            return Err(Error::Domain(format!(
                "negative relaxation duration {duration}"
            )));
        }
        for bit in 0..self.n_bits {
            let role = self.roles[bit];
            let w = config.replacement_probability(role, duration);
            self.replace_bit(bit, config.equilibrium(role), w);
        }
        self.check_probabilities()
    }

    /// Shannon entropy of the joint distribution, in bits.
    pub fn total_entropy(&self) -> f64 {
        self.probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| -p * p.log2())
            .sum()
    }

    pub fn single_bit_entropy(&self, bit: usize) -> Result<f64> {
        let b = self.marginal_bias(bit)?;
        Ok(crate::thermo::binary_entropy(
            (1.0 + b.clamp(-1.0, 1.0)) / 2.0,
        ))
    }

    fn check_probabilities(&mut self) -> Result<()> {
        let mut total = 0.0;
        for p in self.probs.iter_mut() {
            if *p < 0.0 {
                if *p < -NEGATIVE_CLAMP {
                    return Err(Error::Internal(format!("negative probability {p}")));
                }
                *p = 0.0;
            }
            total += *p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Internal(format!("probabilities sum to {total}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{comp3_perm_table, pt_swap_table, GateKind};

    fn comp(n: usize) -> Vec<Role> {
        vec![Role::Computation; n]
    }

    #[test]
    fn thermal_construction() {
        let s = DiagonalState::new_thermal(&[0.0], &comp(1)).unwrap();
        assert_eq!(s.probs(), &[0.5, 0.5]);
        let s = DiagonalState::new_thermal(&[1.0; 3], &comp(3)).unwrap();
        assert_eq!(s.probs()[0], 1.0);
        assert_eq!(s.total_entropy(), 0.0);
        let s = DiagonalState::new_thermal(&[0.1; 3], &comp(3)).unwrap();
        assert!((s.probs()[0] - 0.166375).abs() < 1e-15);
    }

    #[test]
    fn thermal_marginals_and_errors() {
        let b = [0.3, -0.2, 0.7, 0.05];
        let s = DiagonalState::new_thermal(&b, &comp(4)).unwrap();
        for (i, &e) in b.iter().enumerate() {
            assert!((s.marginal_bias(i).unwrap() - e).abs() < 1e-15);
        }
        assert_eq!(s.biases().len(), 4);
        assert!(matches!(
            s.marginal_bias(4),
            Err(Error::BitOutOfRange { .. })
        ));
        assert!(DiagonalState::new_thermal(&[1.2], &comp(1)).is_err());
        assert!(matches!(
            DiagonalState::new_thermal_with_cap(&[0.0; 5], &comp(5), 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn swap_exchanges_marginals() {
        let mut s = DiagonalState::new_thermal(&[0.4, 0.1, 0.2], &comp(3)).unwrap();
        s.apply_permutation(&pt_swap_table(), &[0, 2]).unwrap();
        let b = s.biases();
        assert!(
            (b[0] - 0.2).abs() < 1e-15 && (b[2] - 0.4).abs() < 1e-15 && (b[1] - 0.1).abs() < 1e-15
        );
    }

    #[test]
    fn not_gate_flips_bias() {
        let mut s = DiagonalState::new_thermal(&[0.3], &comp(1)).unwrap();
        s.apply_permutation(&Permutation::new(1, vec![1, 0]).unwrap(), &[0])
            .unwrap();
        assert!((s.marginal_bias(0).unwrap() + 0.3).abs() < 1e-15);
        let before = s.clone();
        s.apply_permutation(&Permutation::identity(1), &[0])
            .unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn comp3_on_register() {
        // A is bit 2, B bit 1, C bit 0
        let mut s = DiagonalState::new_thermal(&[0.1; 3], &comp(3)).unwrap();
        let h0 = s.total_entropy();
        s.apply_permutation(&comp3_perm_table(), &[2, 1, 0])
            .unwrap();
        assert!((s.marginal_bias(2).unwrap() - 0.1495).abs() < 1e-12);
        assert!((s.total_entropy() - h0).abs() < 1e-12);
        let mut t = DiagonalState::new_thermal(&[0.1; 3], &comp(3)).unwrap();
        t.apply_gate(&GateSpec::new(GateKind::Comp3TwoGate, vec![2, 1, 0]).unwrap())
            .unwrap();
        assert!((t.marginal_bias(2).unwrap() - 0.1495).abs() < 1e-12);
    }

    #[test]
    fn permutation_errors() {
        let mut s = DiagonalState::new_thermal(&[0.1; 3], &comp(3)).unwrap();
        assert!(s
            .apply_permutation(&comp3_perm_table(), &[0, 0, 1])
            .is_err());
        assert!(s.apply_permutation(&comp3_perm_table(), &[0, 1]).is_err());
        assert!(s.apply_permutation(&pt_swap_table(), &[0, 5]).is_err());
    }

    #[test]
    fn reset_policy_and_idempotence() {
        let roles = [Role::Computation, Role::Reset];
        let mut s = DiagonalState::new_thermal(&[0.2, 0.1], &roles).unwrap();
        let before = s.clone();
        s.apply_reset(1, 0.1, false).unwrap();
        for (a, b) in s.probs().iter().zip(before.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(matches!(
            s.apply_reset(0, 0.1, false),
            Err(Error::Policy(_))
        ));
        s.apply_reset(0, 0.5, true).unwrap();
        assert!((s.marginal_bias(0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reset_breaks_correlation() {
        let snap = StateSnapshot {
            n_bits: 2,
            roles: vec![Role::Computation, Role::Reset],
            probs: vec![0.5, 0.0, 0.0, 0.5],
        };
        let mut s = DiagonalState::from_snapshot(snap).unwrap();
        assert!((s.mutual_information(0, 1).unwrap() - 1.0).abs() < 1e-12);
        s.apply_reset(1, 0.0, false).unwrap();
        for p in s.probs() {
            assert!((p - 0.25).abs() < 1e-15);
        }
        assert!(s.mutual_information(0, 1).unwrap() < 1e-15);
    }

    #[test]
    fn relaxation_closed_form() {
        let cfg = ThermalConfig {
            t1_comp: Some(2.0),
            ..ThermalConfig::ideal(0.1)
        };
        let mut s = DiagonalState::new_thermal(&[0.15], &comp(1)).unwrap();
        s.relax(0.0, &cfg).unwrap();
        assert!((s.marginal_bias(0).unwrap() - 0.15).abs() < 1e-15);
        s.relax(2.0, &cfg).unwrap();
        // two-outcome enumeration: keep with e^-1, else replace by (0.55, 0.45)
        let keep = (-1.0f64).exp();
        let p_up = keep * 0.575 + (1.0 - keep) * 0.55;
        let expected = 2.0 * p_up - 1.0;
        assert!((s.marginal_bias(0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.11839).abs() < 1e-5);
        s.relax(1e6, &cfg).unwrap();
        assert!((s.marginal_bias(0).unwrap() - 0.1).abs() < 1e-12);
        assert!(s.relax(-1.0, &cfg).is_err());
    }

    #[test]
    fn entropy_values() {
        let s = DiagonalState::new_thermal(&[0.0; 4], &comp(4)).unwrap();
        assert!((s.total_entropy() - 4.0).abs() < 1e-12);
        let s = DiagonalState::new_thermal(&[0.1; 5], &comp(5)).unwrap();
        let approx = 5.0 * crate::thermo::approx_entropy_of_bias(0.1);
        assert!((s.total_entropy() - approx).abs() <= 5.0 * 1e-4);
        assert!(
            (s.single_bit_entropy(3).unwrap() - crate::thermo::entropy_of_bias(0.1).unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn snapshot_json_shape() {
        let s = DiagonalState::new_thermal(&[1.0, 0.0], &[Role::Computation, Role::Reset]).unwrap();
        let json = serde_json::to_string(&s.snapshot()).unwrap();
        assert_eq!(
            json,
            r#"{"n_bits":2,"roles":["computation","reset"],"probs":[0.5,0.0,0.5,0.0]}"#
        );
        let back: StateSnapshot = serde_json::from_str(&json).unwrap();
        assert_eq!(DiagonalState::from_snapshot(back).unwrap(), s);
        let bad = StateSnapshot {
            n_bits: 1,
            roles: vec![Role::Reset],
            probs: vec![0.7, 0.7],
        };
        assert!(DiagonalState::from_snapshot(bad).is_err());
    }
}
