use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gates::GateKind;
use crate::program::{Group, Op, Program};
use crate::state::Role;

const KINDS: [GateKind; 5] = [
    GateKind::Cnot,
    GateKind::CswapVariant,
    GateKind::Comp3TwoGate,
    GateKind::Comp3Perm,
    GateKind::Swap,
];

/// A closed program of `steps` random gates on `n_bits` computation bits, deterministic in `seed`.
pub fn random_closed_program(n_bits: usize, steps: usize, seed: u64) -> Program {
    assert!(n_bits >= 3, "random programs need room for three-bit gates");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups = (0..steps)
        .map(|i| {
            let kind = KINDS[rng.random_range(0..KINDS.len())];
            let operands = sample(&mut rng, n_bits, kind.arity()).into_vec();
            Group::new(format!("g{i}"), vec![Op::gate(kind, &operands)])
        })
        .collect();
    Program::new(
        format!("random(n={n_bits}, seed={seed})"),
        vec![Role::Computation; n_bits],
        (0..n_bits).map(|i| format!("b{i}")).collect(),
        groups,
        vec![],
        None,
        "",
    )
    .expect("generated program is well formed")
}
