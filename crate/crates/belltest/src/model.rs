//! Quantum forward model.
//!
//! From a non-maximally entangled two-photon polarization state, four
//! analyzer angles, and an apparatus description (efficiencies, visibility,
//! background, multi-pair emission) this module predicts the per-trial
//! outcome probability table and the violation figure
//!
//! ```text
//! J = p_++(a1 b1) - p_+0(a1 b2) - p_0+(a2 b1) - p_++(a2 b2)
//! ```
//!
//! where `+` is a detection and `0` no detection, and every probability is
//! conditional on the setting pair. Local realism requires `J <= 0`.
//!
//! Measurement convention: `+` means transmission through a polarizer at
//! angle `theta` from horizontal, with `|theta> = cos(theta)|H> +
//! sin(theta)|V>`. Polarization is axis-valued, so angles live modulo 180
//! degrees.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used by the table validity checks (normalization, no-signaling).
pub const TABLE_TOL: f64 = 1e-12;

/// Two-photon state `(|VH> + r|HV>) / sqrt(1 + r^2)`.
///
/// `r = 0` is the product state `|VH>`; `|r| = 1` is maximally entangled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EberhardState {
    r: f64,
}

impl EberhardState {
    pub fn new(r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::invalid(format!("state parameter r = {r} is not finite")));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Real amplitudes over the basis `(HH, HV, VH, VV)`.
    ///
    /// The vector is `(0, r, 1, 0) / sqrt(1 + r^2)` and has unit norm.
    pub fn amplitudes(&self) -> [f64; 4] {
        let norm = (1.0 + self.r * self.r).sqrt().recip();
        [0.0, self.r * norm, norm, 0.0]
    }
}

/// Amplitudes of the state over `(HH, HV, VH, VV)`.
pub fn state_vector(state: &EberhardState) -> [f64; 4] {
    state.amplitudes()
}

/// The four analyzer angles, stored in radians and reduced modulo pi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettingAngles {
    pub a1: f64,
    pub a2: f64,
    pub b1: f64,
    pub b2: f64,
}

/// Reduce a polarization angle to the half-open interval `(-pi/2, pi/2]`.
pub fn reduce_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(std::f64::consts::PI);
    if t > std::f64::consts::FRAC_PI_2 {
        t -= std::f64::consts::PI;
    }
    t
}

impl SettingAngles {
    pub fn from_radians(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self> {
        for (name, v) in [("a1", a1), ("a2", a2), ("b1", b1), ("b2", b2)] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("angle {name} = {v} is not finite")));
            }
        }
        Ok(Self {
            a1: reduce_angle(a1),
            a2: reduce_angle(a2),
            b1: reduce_angle(b1),
            b2: reduce_angle(b2),
        })
    }

    pub fn from_degrees(a1: f64, a2: f64, b1: f64, b2: f64) -> Result<Self> {
        let d = std::f64::consts::PI / 180.0;
        Self::from_radians(a1 * d, a2 * d, b1 * d, b2 * d)
    }

    pub fn alice(&self, setting: usize) -> f64 {
        match setting {
            0 => self.a1,
            _ => self.a2,
        }
    }

    pub fn bob(&self, setting: usize) -> f64 {
        match setting {
            0 => self.b1,
            _ => self.b2,
        }
    }

    pub fn to_degrees(&self) -> [f64; 4] {
        let d = 180.0 / std::f64::consts::PI;
        [self.a1 * d, self.a2 * d, self.b1 * d, self.b2 * d]
    }
}

/// How pair number per trial is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiPairModel {
    /// Exactly one pair per trial; `pair_rate`/`pulse_rate` are ignored.
    None,
    /// Poissonian pair number with mean `pair_rate / pulse_rate` per trial,
    /// multi-pair trials acting as independent detection opportunities.
    Poissonian,
}

/// Source, detector, and noise description of the apparatus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// System heralding efficiency of the Alice arm, in `[0, 1]`.
    pub eta_a: f64,
    /// System heralding efficiency of the Bob arm, in `[0, 1]`.
    pub eta_b: f64,
    /// State visibility in `[0, 1]`; the state is mixed with white noise as
    /// `V |psi><psi| + (1 - V) I/4`.
    pub visibility: f64,
    /// Per-trial dark/background click probability on Alice, OR-composed
    /// with photon detections.
    pub background_a: f64,
    /// Per-trial dark/background click probability on Bob.
    pub background_b: f64,
    /// Mean produced pairs per second.
    pub pair_rate: f64,
    /// Trials per second.
    pub pulse_rate: f64,
    pub multi_pair_model: MultiPairModel,
}

impl ExperimentParams {
    /// Ideal lossless single-pair apparatus.
    pub fn ideal() -> Self {
        Self {
            eta_a: 1.0,
            eta_b: 1.0,
            visibility: 1.0,
            background_a: 0.0,
            background_b: 0.0,
            pair_rate: 1.0,
            pulse_rate: 1.0,
            multi_pair_model: MultiPairModel::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let probs = [
            ("eta_a", self.eta_a),
            ("eta_b", self.eta_b),
            ("visibility", self.visibility),
            ("background_a", self.background_a),
            ("background_b", self.background_b),
        ];
        for (name, v) in probs {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("{name} = {v} must be in [0, 1]")));
            }
        }
        if !self.pair_rate.is_finite() || self.pair_rate < 0.0 {
            return Err(Error::invalid(format!("pair_rate = {} must be >= 0", self.pair_rate)));
        }
        if !self.pulse_rate.is_finite() || self.pulse_rate <= 0.0 {
            return Err(Error::invalid(format!("pulse_rate = {} must be > 0", self.pulse_rate)));
        }
        Ok(())
    }

    /// Mean pairs per trial `mu = pair_rate / pulse_rate`.
    pub fn mean_pairs_per_trial(&self) -> f64 {
        self.pair_rate / self.pulse_rate
    }
}

/// Outcome probabilities for one setting pair, conditional on that pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairProbabilities {
    /// Both sides detect.
    pub pp: f64,
    /// Alice detects, Bob does not.
    pub p0: f64,
    /// Bob detects, Alice does not.
    pub zp: f64,
    /// Neither detects.
    pub zz: f64,
}

impl PairProbabilities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.pp, self.p0, self.zp, self.zz]
    }
}

/// Per setting pair, per outcome pair probability table.
///
/// Indexed by `(alice_setting, bob_setting)` with settings `0` and `1` for
/// `a1/a2` and `b1/b2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilityTable {
    pairs: [[PairProbabilities; 2]; 2],
}

impl OutcomeProbabilityTable {
    pub fn from_pairs(pairs: [[PairProbabilities; 2]; 2]) -> Result<Self> {
        let table = Self { pairs };
        table.validate()?;
        Ok(table)
    }

    pub fn pair(&self, alice: usize, bob: usize) -> &PairProbabilities {
        &self.pairs[alice][bob]
    }

    /// Normalization and no-signaling checks, both at [`TABLE_TOL`].
    pub fn validate(&self) -> Result<()> {
        for i in 0..2 {
            for j in 0..2 {
                let p = &self.pairs[i][j];
                for (name, v) in [("pp", p.pp), ("p0", p.p0), ("zp", p.zp), ("zz", p.zz)] {
                    if !v.is_finite() || v < -TABLE_TOL {
                        return Err(Error::invalid(format!(
                            "p_{name}(a{} b{}) = {v} is negative or non-finite",
                            i + 1,
                            j + 1
                        )));
                    }
                }
                let sum = p.pp + p.p0 + p.zp + p.zz;
                if (sum - 1.0).abs() > TABLE_TOL {
                    return Err(Error::invalid(format!(
                        "outcome probabilities for (a{} b{}) sum to {sum}, not 1",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        // No-signaling: each side's detection marginal must not depend on the
        // other side's setting.
        for i in 0..2 {
            let ma0 = self.pairs[i][0].pp + self.pairs[i][0].p0;
            let ma1 = self.pairs[i][1].pp + self.pairs[i][1].p0;
            if (ma0 - ma1).abs() > TABLE_TOL {
                return Err(Error::invalid(format!(
                    "Alice marginal for a{} depends on Bob's setting ({ma0} vs {ma1})",
                    i + 1
                )));
            }
        }
        for j in 0..2 {
            let mb0 = self.pairs[0][j].pp + self.pairs[0][j].zp;
            let mb1 = self.pairs[1][j].pp + self.pairs[1][j].zp;
            if (mb0 - mb1).abs() > TABLE_TOL {
                return Err(Error::invalid(format!(
                    "Bob marginal for b{} depends on Alice's setting ({mb0} vs {mb1})",
                    j + 1
                )));
            }
        }
        Ok(())
    }
}

/// Polarizer transmission probabilities for the visibility-degraded state:
/// joint transmission, Alice marginal, Bob marginal.
fn transmission_probs(state: &EberhardState, alpha: f64, beta: f64, visibility: f64) -> (f64, f64, f64) {
    let r = state.r();
    let n2 = 1.0 + r * r;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    // <alpha beta | psi> for the pure part.
    let amp = (sa * cb + r * ca * sb) / n2.sqrt();
    let v = visibility;
    let joint = v * amp * amp + (1.0 - v) * 0.25;
    let alice = v * (sa * sa + r * r * ca * ca) / n2 + (1.0 - v) * 0.5;
    let bob = v * (cb * cb + r * r * sb * sb) / n2 + (1.0 - v) * 0.5;
    (joint, alice, bob)
}

/// Click probabilities for one setting pair after efficiency thinning,
/// multi-pair averaging, and background OR-composition.
fn pair_click_probs(
    state: &EberhardState,
    alpha: f64,
    beta: f64,
    params: &ExperimentParams,
) -> PairProbabilities {
    let (p_tt, p_ta, p_tb) = transmission_probs(state, alpha, beta, params.visibility);
    let qa = params.eta_a * p_ta;
    let qb = params.eta_b * p_tb;
    let qab = params.eta_a * params.eta_b * p_tt;
    // Probabilities that a side (or both) stays dark from photons alone.
    let (dark_a, dark_b, dark_ab) = match params.multi_pair_model {
        MultiPairModel::None => (1.0 - qa, 1.0 - qb, 1.0 - qa - qb + qab),
        MultiPairModel::Poissonian => {
            let mu = params.mean_pairs_per_trial();
            ((-mu * qa).exp(), (-mu * qb).exp(), (-mu * (qa + qb - qab)).exp())
        }
    };
    // Independent background clicks darken nothing; they only rescue clicks.
    let ga = 1.0 - params.background_a;
    let gb = 1.0 - params.background_b;
    let zz = dark_ab * ga * gb;
    let a_dark = dark_a * ga;
    let b_dark = dark_b * gb;
    PairProbabilities {
        pp: 1.0 - a_dark - b_dark + zz,
        p0: b_dark - zz,
        zp: a_dark - zz,
        zz,
    }
}

/// Full outcome probability table for the four setting pairs.
pub fn outcome_probabilities(
    state: &EberhardState,
    angles: &SettingAngles,
    params: &ExperimentParams,
) -> Result<OutcomeProbabilityTable> {
    params.validate()?;
    let mut pairs = [[PairProbabilities { pp: 0.0, p0: 0.0, zp: 0.0, zz: 1.0 }; 2]; 2];
    for (i, &alpha) in [angles.a1, angles.a2].iter().enumerate() {
        for (j, &beta) in [angles.b1, angles.b2].iter().enumerate() {
            pairs[i][j] = pair_click_probs(state, alpha, beta, params);
        }
    }
    OutcomeProbabilityTable::from_pairs(pairs)
}

/// The violation figure `J`; local realism requires `J <= 0`.
pub fn j_value(table: &OutcomeProbabilityTable) -> f64 {
    table.pair(0, 0).pp - table.pair(0, 1).p0 - table.pair(1, 0).zp - table.pair(1, 1).pp
}

/// Convenience: `J` straight from state, angles, and apparatus.
pub fn predict_j(state: &EberhardState, angles: &SettingAngles, params: &ExperimentParams) -> Result<f64> {
    Ok(j_value(&outcome_probabilities(state, angles, params)?))
}
