use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::Role;

/// Equilibrium biases, relaxation times and step durations.
///
/// A missing `t1_comp` means computation bits never relax; a missing
/// `t1_reset` means reset bits rethermalize instantly whenever any time passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalConfig {
    /// Equilibrium bias of the reset bits (and the initial bias of every bit).
    pub eps0: f64,
    /// Equilibrium bias of the computation bits; defaults to `eps0`.
    #[serde(default)]
    pub comp_equilibrium: Option<f64>,
    #[serde(default)]
    pub t1_comp: Option<f64>,
    #[serde(default)]
    pub t1_reset: Option<f64>,
    /// Wall time of a group made only of gates and transfers.
    #[serde(default = "default_duration")]
    pub compute_duration: f64,
    /// Wall time of a group containing a RESET.
    #[serde(default = "default_duration")]
    pub reset_duration: f64,
}

fn default_duration() -> f64 {
    1.0
}

impl Default for ThermalConfig {
    fn default() -> Self {
        Self::ideal(0.01)
    }
}

impl ThermalConfig {
    pub fn ideal(eps0: f64) -> Self {
        Self {
            eps0,
            comp_equilibrium: None,
            t1_comp: None,
            t1_reset: None,
            compute_duration: 1.0,
            reset_duration: 1.0,
        }
    }

    /// Finite-relaxation configuration with computation-bit relaxation time `t1_comp`
    /// and ratio `r = t1_comp / t1_reset`.
    pub fn finite(
        eps0: f64,
        t1_comp: f64,
        ratio: f64,
        compute_duration: f64,
        reset_duration: f64,
    ) -> Self {
        Self {
            eps0,
            comp_equilibrium: None,
            t1_comp: Some(t1_comp),
            t1_reset: Some(t1_comp / ratio),
            compute_duration,
            reset_duration,
        }
    }

    pub fn equilibrium(&self, role: Role) -> f64 {
        match role {
            Role::Computation => self.comp_equilibrium.unwrap_or(self.eps0),
            Role::Reset => self.eps0,
        }
    }

    pub fn t1(&self, role: Role) -> f64 {
        match role {
            Role::Computation => self.t1_comp.unwrap_or(f64::INFINITY),
            Role::Reset => self.t1_reset.unwrap_or(0.0),
        }
    }

    /// Probability that a bit of `role` is replaced by a fresh thermal bit over `duration`.
    pub fn replacement_probability(&self, role: Role, duration: f64) -> f64 {
        if duration == 0.0 {
            return 0.0;
        }
        let t1 = self.t1(role);
        if t1 == 0.0 {
            1.0
        } else {
            -(-duration / t1).exp_m1()
        }
    }

    /// `T1_comp / T1_reset`, when both are set.
    pub fn relax_ratio(&self) -> Option<f64> {
        Some(self.t1_comp? / self.t1_reset?)
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |b: f64| b.abs() <= 1.0;
        if !in_range(self.eps0) || !self.comp_equilibrium.is_none_or(in_range) {
            return Err(Error::Config(
                "equilibrium biases must lie in [-1, 1]".into(),
            ));
        }
        for (name, t) in [("t1_comp", self.t1_comp), ("t1_reset", self.t1_reset)] {
            if let Some(t) = t {
                if !(t > 0.0) {
                    return Err(Error::Config(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if !(self.compute_duration >= 0.0 && self.reset_duration >= 0.0) {
            return Err(Error::Config("step durations must be non-negative".into()));
        }
        Ok(())
    }
}
