use super::Role;
use crate::config::ThermalConfig;
use crate::error::{Error, Result};
use crate::gates::GateKind;
use crate::program::{Group, Op};

/// Operand biases closer than this count as equal for a 3B-Comp.
const EQUAL_BIAS_TOLERANCE: f64 = 1e-12;

/// Analytic per-bit bias vector.
///
/// Exact for programs that only compress trios of independent, equally biased
/// bits; any other compression clears `independence_valid`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasTracker {
    biases: Vec<f64>,
    roles: Vec<Role>,
    independence_valid: bool,
}

impl BiasTracker {
    pub fn new(biases: Vec<f64>, roles: Vec<Role>) -> Result<Self> {
        if biases.len() != roles.len() {
            return Err(Error::Config(format!(
                "{} biases but {} roles",
                biases.len(),
                roles.len()
            )));
        }
        if let Some(b) = biases.iter().find(|b| !(b.abs() <= 1.0)) {
            return Err(Error::Domain(format!("bias {b} outside [-1, 1]")));
        }
        Ok(Self {
            biases,
            roles,
            independence_valid: true,
        })
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn bias(&self, bit: usize) -> f64 {
        self.biases[bit]
    }

    pub fn n_bits(&self) -> usize {
        self.biases.len()
    }

    pub fn independence_valid(&self) -> bool {
        self.independence_valid
    }

    /// Applies one operation. RESET always uses the reset equilibrium; WAIT relaxes every bit.
    pub fn apply(&mut self, op: &Op, config: &ThermalConfig) -> Result<()> {
        let n = self.biases.len();
        if let Some(bits) = op.bits() {
            if let Some(&b) = bits.iter().find(|&&b| b >= n) {
                return Err(Error::BitOutOfRange {
                    index: b,
                    n_bits: n,
                });
            }
        }
        match op {
            Op::Pt { src, dst } => self.biases.swap(*src, *dst),
            Op::Reset(bits) => {
                for &b in bits {
                    self.biases[b] = config.equilibrium(Role::Reset);
                }
            }
            Op::Wait(d) => self.relax(*d, config),
            Op::Gate(g) => match g.kind {
                GateKind::Swap => self.biases.swap(g.operands[0], g.operands[1]),
                kind if kind.is_comp3() => {
                    let [a, b, c] = [g.operands[0], g.operands[1], g.operands[2]];
                    let eps = self.biases[a];
                    let equal = (self.biases[b] - eps).abs() <= EQUAL_BIAS_TOLERANCE
                        && (self.biases[c] - eps).abs() <= EQUAL_BIAS_TOLERANCE;
                    if equal {
                        let m = kind.comp3_marginals(eps).expect("compression gate");
                        self.biases[a] = m[0];
                        self.biases[b] = m[1];
                        self.biases[c] = m[2];
                    } else {
                        self.independent_marginals(&g.operands, kind);
                        self.independence_valid = false;
                    }
                }
                kind => {
                    self.independent_marginals(&g.operands, kind);
                    self.independence_valid = false;
                }
            },
        }
        Ok(())
    }

    pub fn apply_group(&mut self, group: &Group, config: &ThermalConfig) -> Result<()> {
        group.ops.iter().try_for_each(|op| self.apply(op, config))
    }

    /// Closed-form relaxation toward each bit's equilibrium.
    pub fn relax(&mut self, duration: f64, config: &ThermalConfig) {
        for (b, role) in self.biases.iter_mut().zip(&self.roles) {
            let w = config.replacement_probability(*role, duration);
            let eq = config.equilibrium(*role);
            *b = eq + (*b - eq) * (1.0 - w);
        }
    }

    /// Output marginals of a gate as if its inputs were independent.
    fn independent_marginals(&mut self, operands: &[usize], kind: GateKind) {
        let k = operands.len();
        let table = kind.table();
        let mut p0 = vec![0.0; k];
        for x in 0..1usize << k {
            let pr: f64 = (0..k)
                .map(|j| {
                    let e = self.biases[operands[j]];
                    if (x >> (k - 1 - j)) & 1 == 0 {
                        (1.0 + e) / 2.0
                    } else {
                        (1.0 - e) / 2.0
                    }
                })
                .product();
            let y = table.apply(x);
            for (j, slot) in p0.iter_mut().enumerate() {
                if (y >> (k - 1 - j)) & 1 == 0 {
                    *slot += pr;
                }
            }
        }
        for (j, &b) in operands.iter().enumerate() {
            self.biases[b] = 2.0 * p0[j] - 1.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::DiagonalState;

    fn comp(n: usize) -> Vec<Role> {
        vec![Role::Computation; n]
    }

    #[test]
    fn comp3_equal_biases() {
        let cfg = ThermalConfig::ideal(0.1);
        let mut t = BiasTracker::new(vec![0.1; 3], comp(3)).unwrap();
        t.apply(&Op::gate(GateKind::Comp3Perm, &[2, 1, 0]), &cfg)
            .unwrap();
        assert!((t.bias(2) - 0.1495).abs() < 1e-15);
        assert!(t.independence_valid());

        let mut s = DiagonalState::new_thermal(&[0.1; 3], &comp(3)).unwrap();
        s.apply_gate(&crate::gates::GateSpec::new(GateKind::Comp3Perm, vec![2, 1, 0]).unwrap())
            .unwrap();
        for (a, b) in t.biases().iter().zip(s.biases()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_and_reset() {
        let cfg = ThermalConfig::ideal(0.1);
        let mut t = BiasTracker::new(vec![0.4, 0.1], vec![Role::Computation, Role::Reset]).unwrap();
        t.apply(&Op::Pt { src: 1, dst: 0 }, &cfg).unwrap();
        assert_eq!(t.biases(), &[0.1, 0.4]);
        t.apply(&Op::Reset(vec![1]), &cfg).unwrap();
        assert_eq!(t.biases(), &[0.1, 0.1]);
    }

    #[test]
    fn two_levels_small_bias() {
        let cfg = ThermalConfig::ideal(0.01);
        let mut t = BiasTracker::new(vec![0.01; 3], comp(3)).unwrap();
        let comp3 = Op::gate(GateKind::Comp3Perm, &[2, 1, 0]);
        t.apply(&comp3, &cfg).unwrap();
        let e1 = t.bias(2);
        let mut t2 = BiasTracker::new(vec![e1; 3], comp(3)).unwrap();
        t2.apply(&comp3, &cfg).unwrap();
        assert!((t2.bias(2) - 0.022497562668744375).abs() < 1e-15);
        assert!((t2.bias(2) - 2.25 * 0.01).abs() < 1e-5);
    }

    #[test]
    fn unequal_compression_clears_flag() {
        let cfg = ThermalConfig::ideal(0.1);
        let mut t = BiasTracker::new(vec![0.1, 0.2, 0.3], comp(3)).unwrap();
        t.apply(&Op::gate(GateKind::Comp3Perm, &[2, 1, 0]), &cfg)
            .unwrap();
        assert!(!t.independence_valid());
        // still the independent-input marginals
        let mut s = DiagonalState::new_thermal(&[0.1, 0.2, 0.3], &comp(3)).unwrap();
        s.apply_gate(&crate::gates::GateSpec::new(GateKind::Comp3Perm, vec![2, 1, 0]).unwrap())
            .unwrap();
        for (a, b) in t.biases().iter().zip(s.biases()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn wait_relaxes() {
        let cfg = ThermalConfig {
            t1_comp: Some(1.0),
            ..ThermalConfig::ideal(0.1)
        };
        let mut t = BiasTracker::new(vec![0.15], comp(1)).unwrap();
        t.apply(&Op::Wait(1.0), &cfg).unwrap();
        assert!((t.bias(0) - (0.1 + 0.05 * (-1.0f64).exp())).abs() < 1e-15);
        assert!(t.independence_valid());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(BiasTracker::new(vec![1.5], comp(1)).is_err());
        let mut t = BiasTracker::new(vec![0.1], comp(1)).unwrap();
        assert!(t
            .apply(&Op::Reset(vec![3]), &ThermalConfig::ideal(0.1))
            .is_err());
    }
}
