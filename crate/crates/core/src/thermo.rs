//! Conversions among polarization bias, spin temperature and entropy.
//!
//! Temperatures are measured in energy units (Boltzmann's constant is 1),
//! and every entropy is in bits.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};

/// Thermal description of a two-level spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinThermo {
    pub delta_e: f64,
    pub temperature: f64,
    pub bias: f64,
}

impl SpinThermo {
    pub fn from_temperature(delta_e: f64, temperature: f64) -> Result<Self> {
        let bias = bias_from_temperature(delta_e, temperature)?;
        Ok(Self {
            delta_e,
            temperature,
            bias,
        })
    }

    pub fn from_bias(delta_e: f64, bias: f64) -> Result<Self> {
        let temperature = temperature_from_bias(delta_e, bias)?;
        Ok(Self {
            delta_e,
            temperature,
            bias,
        })
    }

    /// Probability of the spin-up (bit 0) state.
    pub fn p_up(&self) -> f64 {
        (1.0 + self.bias) / 2.0
    }

    pub fn p_down(&self) -> f64 {
        (1.0 - self.bias) / 2.0
    }

    pub fn entropy(&self) -> f64 {
        binary_entropy((1.0 + self.bias) / 2.0)
    }
}

/// Energy gap of a spin with gyromagnetic factor `gamma` in a field `field`.
pub fn energy_gap(gamma: f64, field: f64) -> f64 {
    2.0 * gamma * field
}

pub fn bias_from_temperature(delta_e: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    if !(delta_e > 0.0) {
        return Err(Error::Domain(format!(
            "energy gap must be positive, got {delta_e}"
        )));
    }
    Ok((delta_e / (2.0 * temperature)).tanh())
}

/// Spin temperature whose equilibrium bias is `bias`. Diverges as the bias goes to zero.
pub fn temperature_from_bias(delta_e: f64, bias: f64) -> Result<f64> {
    if !(bias > 0.0 && bias < 1.0) {
        return Err(Error::Domain(format!(
            "bias must lie in (0, 1) for a finite positive temperature, got {bias}"
        )));
    }
    if !(delta_e > 0.0) {
        return Err(Error::Domain(format!(
            "energy gap must be positive, got {delta_e}"
        )));
    }
    Ok(delta_e / (2.0 * bias.atanh()))
}

/// Shannon entropy (bits) of a Bernoulli variable with `P(0) = p`.
pub(crate) fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Exact single-spin entropy in bits.
pub fn entropy_of_bias(bias: f64) -> Result<f64> {
    if !(bias.abs() <= 1.0) {
        return Err(Error::Domain(format!(
            "|bias| must be at most 1, got {bias}"
        )));
    }
    Ok(binary_entropy((1.0 + bias) / 2.0))
}

/// Second-order small-bias entropy, `1 - ε²/ln 4`.
pub fn approx_entropy_of_bias(bias: f64) -> f64 {
    1.0 - bias * bias / (2.0 * LN_2)
}

/// Leading-order ceiling on the bias any closed manipulation of `n` spins can put on one spin.
pub fn shannon_bound_bias(n: u64, bias: f64) -> f64 {
    (bias * (n as f64).sqrt()).min(1.0)
}

/// Leading-order entropy floor for a single spin after lossless compression of `n` spins.
/// Can go negative when `n ε²` is large; callers clamp.
pub fn shannon_entropy_floor(n: u64, bias: f64) -> f64 {
    1.0 - n as f64 * bias * bias / (2.0 * LN_2)
}
