//! Count-based estimation and hypothesis testing.
//!
//! The test statistic reduces every trial to one of three classes:
//!
//! * **win** — outcome `++` at settings `(a1, b1)`,
//! * **loss** — `+0` at `(a1, b2)`, `0+` at `(a2, b1)`, or `++` at `(a2, b2)`,
//! * everything else is ignored.
//!
//! Under local realism each trial's conditional win probability given
//! (win or loss) is at most `q = 1/2 + 2*epsilon` no matter what the
//! hidden-variable model remembers about the past, where `epsilon` bounds
//! each side's excess setting predictability. The bound composes the two
//! one-sided excesses: a predicted setting pair has probability at most
//! `(1/2+eps)^2` and each loss pair at least `(1/2-eps)^2`, so the win
//! fraction is at most `(1/4+eps+eps^2)/(1/2+2 eps^2) <= 1/2 + 2 eps`.
//! The p-value is the binomial upper tail `P[Bin(K+L, q) >= K]`, which is a
//! supermartingale bound valid without any IID assumption. An
//! Azuma-Hoeffding variant provides an independent, weaker cross-check.
//!
//! All tail arithmetic happens in natural-log space so that runs of 1e12
//! trials cannot underflow.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::sim::CountTable;

const LN10: f64 = std::f64::consts::LN_10;

/// Plug-in estimate of `J` from conditional relative frequencies.
pub fn j_estimate(counts: &CountTable) -> Result<f64> {
    let mut terms = [0.0; 4];
    for (slot, (i, j)) in [(0usize, (0usize, 0usize)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))] {
        let total = counts.pair_total(i, j);
        if total == 0 {
            return Err(Error::UndefinedEstimate(format!(
                "no trials recorded for setting pair (a{}, b{})",
                i + 1,
                j + 1
            )));
        }
        let k = match (i, j) {
            (0, 0) => counts.get(0, 0, crate::sim::OutcomePair::PlusPlus),
            (0, 1) => counts.get(0, 1, crate::sim::OutcomePair::PlusZero),
            (1, 0) => counts.get(1, 0, crate::sim::OutcomePair::ZeroPlus),
            _ => counts.get(1, 1, crate::sim::OutcomePair::PlusPlus),
        };
        terms[slot] = k as f64 / total as f64;
    }
    Ok(terms[0] - terms[1] - terms[2] - terms[3])
}

/// Win and loss counts entering the hypothesis test.
pub fn win_loss(counts: &CountTable) -> (u64, u64) {
    use crate::sim::OutcomePair::*;
    let k = counts.get(0, 0, PlusPlus);
    let l = counts.get(0, 1, PlusZero) + counts.get(1, 0, ZeroPlus) + counts.get(1, 1, PlusPlus);
    (k, l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    /// Exact binomial-tail supermartingale bound (the reported p-value).
    BinomialSupermartingale,
    /// Azuma-Hoeffding concentration bound; independent but weaker.
    Azuma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValueResult {
    pub log10_p: f64,
    /// Win count.
    pub k: u64,
    /// Loss count.
    pub l: u64,
    /// Adjusted per-trial success bound `1/2 + 2*epsilon`.
    pub q: f64,
    pub method: PValueMethod,
}

impl PValueResult {
    pub fn p(&self) -> f64 {
        10f64.powf(self.log10_p)
    }
}

/// Memory-robust local-realism p-value from win/loss counts.
///
/// `epsilon` is the excess setting predictability granted to the adversary
/// (per side). `K + L == 0` returns `p = 1` by convention.
pub fn pvalue_from_counts(k: u64, l: u64, epsilon: f64, method: PValueMethod) -> Result<PValueResult> {
    if !epsilon.is_finite() || !(0.0..0.5).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon = {epsilon} must be in [0, 1/2)")));
    }
    let q = (0.5 + 2.0 * epsilon).min(1.0);
    let n = k + l;
    let log10_p = if n == 0 {
        0.0
    } else {
        match method {
            PValueMethod::BinomialSupermartingale => (ln_binomial_tail(n, k, q) / LN10).min(0.0),
            PValueMethod::Azuma => ln_azuma_tail(n, k, q) / LN10,
        }
    };
    Ok(PValueResult { log10_p, k, l, q, method })
}

/// p-value straight from a count table.
pub fn pvalue(counts: &CountTable, epsilon: f64, method: PValueMethod) -> Result<PValueResult> {
    let (k, l) = win_loss(counts);
    pvalue_from_counts(k, l, epsilon, method)
}

/// Natural log of the binomial upper tail `P[Bin(n, q) >= k]`.
///
/// Exact in log space: the tail is summed term by term with a streaming
/// log-sum-exp, entering from whichever side of the mode keeps the series
/// decreasing. Never underflows for any representable inputs.
pub fn ln_binomial_tail(n: u64, k: u64, q: f64) -> f64 {
    assert!((0.0..=1.0).contains(&q), "q = {q} out of range");
    if k == 0 {
        return 0.0;
    }
    if k > n {
        return f64::NEG_INFINITY;
    }
    if q == 0.0 {
        return f64::NEG_INFINITY; // k >= 1 cannot happen
    }
    if q == 1.0 {
        return 0.0; // all mass at n >= k
    }
    let nf = n as f64;
    let mean = nf * q;
    if k as f64 > mean {
        // Upper tail summed upward from k: terms strictly decreasing.
        let mut acc = 0.0f64; // sum of term ratios relative to the first term
        let mut rel = 0.0f64; // ln(term_j / term_k)
        let lr = q.ln() - (-q).ln_1p();
        let mut j = k;
        loop {
            acc += rel.exp();
            if j == n {
                break;
            }
            rel += ((n - j) as f64 / (j + 1) as f64).ln() + lr;
            // Terms only shrink; once they stop mattering, stop.
            if rel < -40.0 - (acc.ln().max(0.0)) {
                break;
            }
            j += 1;
        }
        ln_binomial_pmf(n, k, q) + acc.ln()
    } else {
        // Complement of the lower tail P[Bin <= k-1], summed downward from
        // k-1 where terms are again decreasing. The complement is >= 1/2
        // here, so the final ln is well-conditioned.
        let km1 = k - 1;
        let mut acc = 0.0f64;
        let mut rel = 0.0f64;
        let lr = (-q).ln_1p() - q.ln();
        let mut j = km1;
        loop {
            acc += rel.exp();
            if j == 0 {
                break;
            }
            rel += (j as f64 / (n - j + 1) as f64).ln() + lr;
            if rel < -40.0 - (acc.ln().max(0.0)) {
                break;
            }
            j -= 1;
        }
        let ln_lower = ln_binomial_pmf(n, km1, q) + acc.ln();
        // ln(1 - e^x) for x <= ln(1/2).
        (-ln_lower.exp()).ln_1p()
    }
}

/// Natural log of the binomial pmf via log-gamma.
fn ln_binomial_pmf(n: u64, k: u64, q: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    ln_gamma(nf + 1.0) - ln_gamma(kf + 1.0) - ln_gamma(nf - kf + 1.0)
        + kf * q.ln()
        + (nf - kf) * (-q).ln_1p()
}

/// Natural log of the Azuma-Hoeffding tail bound for `K >= q n + t`.
fn ln_azuma_tail(n: u64, k: u64, q: f64) -> f64 {
    let t = k as f64 - q * n as f64;
    if t <= 0.0 {
        return 0.0;
    }
    -2.0 * t * t / n as f64
}

/// One-sided Gaussian tail in natural-log space: `ln Q(z)` with
/// `Q(z) = P[N(0,1) >= z]`.
fn ln_gauss_tail(z: f64) -> f64 {
    if z < 6.0 {
        (0.5 * erfc(z / std::f64::consts::SQRT_2)).ln()
    } else {
        // Asymptotic expansion; truncation error < 1e-5 in ln at z = 6 and
        // falls off fast.
        let z2 = z * z;
        let mut series = 1.0;
        let mut term = 1.0;
        for i in 0..5 {
            term *= -((2 * i + 1) as f64) / z2;
            series += term;
        }
        -0.5 * z2 - z.ln() - 0.5 * (std::f64::consts::TAU).ln() + series.ln()
    }
}

/// Number of Gaussian standard deviations equivalent to a one-sided
/// p-value: the `z` with `Q(z) = p`.
pub fn sigma_equivalent(p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p = {p} must be in (0, 1]")));
    }
    sigma_equivalent_log10(p.log10())
}

/// Same inversion from `log10(p)`, for p-values too small to represent.
pub fn sigma_equivalent_log10(log10_p: f64) -> Result<f64> {
    if !(log10_p <= 0.0) {
        return Err(Error::invalid(format!("log10 p = {log10_p} must be <= 0")));
    }
    let target = log10_p * LN10;
    let (mut lo, mut hi) = (-39.0, 42.0);
    if target >= ln_gauss_tail(lo) {
        return Ok(lo); // p indistinguishable from 1 at double precision
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_gauss_tail(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
