//! Deterministic, counter-based randomness for trial streams, and the
//! statistical model of the physical setting generators.
//!
//! Trial generation must be reproducible record-for-record regardless of
//! chunking, so instead of a sequential generator each draw is a pure hash
//! of `(seed, trial index, stream, draw index)`. Disjoint index ranges can
//! then be generated on any number of threads and always agree with the
//! sequential stream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SplitMix64 finalizer; bijective with full avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent draw streams within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u32)]
pub enum Stream {
    SettingA = 0,
    SettingB = 1,
    Outcome = 2,
    TimeA = 3,
    TimeB = 4,
    Lambda = 5,
    GuessA = 6,
    GuessB = 7,
}

/// Counter-based generator keyed by a run seed.
#[derive(Debug, Clone, Copy)]
pub struct TrialRng {
    key: u64,
}

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        Self { key: mix64(seed ^ 0x9e37_79b9_7f4a_7c15) }
    }

    /// Uniform `u64` for `(trial, stream, draw)`.
    #[inline]
    pub fn word(&self, trial: u64, stream: Stream, draw: u32) -> u64 {
        let lane = ((stream as u64) << 32) | draw as u64;
        mix64(mix64(self.key ^ trial.wrapping_mul(0xd1b5_4a32_d192_ed03)) ^ lane.wrapping_mul(0x2545_f491_4f6c_dd1d))
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    #[inline]
    pub fn unit(&self, trial: u64, stream: Stream, draw: u32) -> f64 {
        (self.word(trial, stream, draw) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`, safe as a logarithm argument.
    #[inline]
    pub fn unit_open(&self, trial: u64, stream: Stream, draw: u32) -> f64 {
        ((self.word(trial, stream, draw) >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller on draws `(2k, 2k+1)` of `stream`.
    #[inline]
    pub fn normal(&self, trial: u64, stream: Stream, pair: u32) -> f64 {
        let u1 = self.unit_open(trial, stream, 2 * pair);
        let u2 = self.unit(trial, stream, 2 * pair + 1);
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

/// Statistical abstraction of the physical setting generator: each setting
/// is the parity of `bits_per_setting` raw bits, every raw bit deviating
/// from fair by at most `raw_bit_bias`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RngModel {
    /// Per-raw-bit deviation from 1/2 (the raw bit is 1 with probability
    /// `1/2 + raw_bit_bias`).
    pub raw_bit_bias: f64,
    /// Number of raw bits whose parity forms one setting.
    pub bits_per_setting: u32,
}

impl RngModel {
    pub fn new(raw_bit_bias: f64, bits_per_setting: u32) -> Result<Self> {
        let model = Self { raw_bit_bias, bits_per_setting };
        model.validate()?;
        Ok(model)
    }

    /// Fair settings from a single raw bit.
    pub fn fair() -> Self {
        Self { raw_bit_bias: 0.0, bits_per_setting: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.raw_bit_bias.is_finite() || !(0.0..0.5).contains(&self.raw_bit_bias) {
            return Err(Error::invalid(format!(
                "raw_bit_bias = {} must be in [0, 1/2)",
                self.raw_bit_bias
            )));
        }
        if self.bits_per_setting == 0 {
            return Err(Error::invalid("bits_per_setting must be >= 1"));
        }
        Ok(())
    }

    /// Excess setting predictability implied by the parity composition.
    pub fn epsilon(&self) -> f64 {
        parity_epsilon(self.raw_bit_bias, self.bits_per_setting).unwrap_or(f64::NAN)
    }
}

/// Excess predictability of the parity of `n` independent raw bits of equal
/// bias `delta`: `2^(n-1) * delta^n` (piling-up composition).
pub fn parity_epsilon(delta: f64, n: u32) -> Result<f64> {
    if !delta.is_finite() || !(0.0..0.5).contains(&delta) {
        return Err(Error::invalid(format!("delta = {delta} must be in [0, 1/2)")));
    }
    if n == 0 {
        return Err(Error::invalid("bit count must be >= 1"));
    }
    Ok(2f64.powi(n as i32 - 1) * delta.powi(n as i32))
}
