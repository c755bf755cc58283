//! Exact finite-`n` laws of the magnetisation: the tilted PMF on the spin-sum
//! lattice, its CDF and moments, and the mixture-representation PMF used as a
//! cross-oracle.
//!
//! All weights are handled in log space with log-sum-exp normalization; the
//! tilt factor `exp(beta S^2 / 2n)` overflows at modest `n` otherwise.

use crate::error::{Error, Result};
use crate::measures::{DeFinettiMeasure, ModelParams};

const MAX_N: u64 = 1_000_000;

/// Exact law of the magnetisation on the lattice `{-n, -n+2, ..., n}`.
#[derive(Clone, Debug)]
pub struct MagnetisationPMF {
    n: u64,
    support: Vec<i64>,
    probs: Vec<f64>,
    log_weights: Vec<f64>,
    prefix: Vec<f64>,
}

/// The one conversion point between the spin-sum lattice `{-n..n step 2}`
/// and the count coordinate `k = (s + n)/2 in {0..n}`.
pub fn count_from_spin(n: u64, s: i64) -> usize {
    debug_assert!((s + n as i64) % 2 == 0 && s.unsigned_abs() <= n);
    ((s + n as i64) / 2) as usize
}

/// Cumulative log-factorials `lf[k] = ln k!`, accumulated with compensation.
pub(crate) fn log_factorials(n: usize) -> Vec<f64> {
    let mut lf = Vec::with_capacity(n + 1);
    lf.push(0.0);
    let mut sum = 0.0;
    let mut carry = 0.0;
    for k in 1..=n {
        let term = (k as f64).ln() + carry;
        let next = sum + term;
        carry = term - (next - sum);
        sum = next;
        lf.push(sum);
    }
    lf
}

fn normalize_from_logs(n: u64, log_weights: Vec<f64>) -> MagnetisationPMF {
    let max = log_weights.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_weights.iter().map(|&lw| (lw - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    let mut prefix = Vec::with_capacity(probs.len());
    let mut run = 0.0;
    for &p in &probs {
        run += p;
        prefix.push(run.min(1.0));
    }
    let support = (0..=n as i64).map(|j| 2 * j - n as i64).collect();
    MagnetisationPMF { n, support, probs, log_weights, prefix }
}

impl MagnetisationPMF {
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Lattice values `s_j = 2j - n`.
    pub fn support(&self) -> &[i64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Per-atom log-weights kept for numerical audit.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Running sums of `probs`.
    pub fn prefix(&self) -> &[f64] {
        &self.prefix
    }

    /// `P(S <= s)` for a lattice point index.
    pub fn cdf_index(&self, j: usize) -> f64 {
        self.prefix[j]
    }
}

/// Exact tilted PMF: `probs[j] ∝ C(n, j) exp(beta s_j^2 / 2n)`.
///
/// Uses the effective inverse temperature, so the window scaling is honored.
pub fn exact_pmf(params: &ModelParams) -> Result<MagnetisationPMF> {
    let n = params.n();
    if n == 0 {
        return Err(Error::Config("exact_pmf needs n >= 1".into()));
    }
    if n > MAX_N {
        return Err(Error::Config(format!("exact_pmf supports n <= {MAX_N}, got {n}")));
    }
    if params.mu() != 0.0 {
        return Err(Error::Config("exact_pmf is defined for mu = 0 only".into()));
    }
    let beta = params.effective_beta();
    let lf = log_factorials(n as usize);
    let nf = n as f64;
    let mut log_weights = Vec::with_capacity(n as usize + 1);
    for j in 0..=n as usize {
        let s = (2 * j as i64 - n as i64) as f64;
        let lw = lf[n as usize] - lf[j] - lf[n as usize - j] + beta * s * s / (2.0 * nf);
        log_weights.push(lw);
    }
    Ok(normalize_from_logs(n, log_weights))
}

/// Right-continuous CDF `P(S / rescale <= x)` by exact partial sums.
pub fn exact_cdf(pmf: &MagnetisationPMF, x: f64, rescale: f64) -> f64 {
    assert!(rescale > 0.0, "rescale must be positive");
    let bound = x * rescale;
    // last index with support <= bound
    match pmf.support.partition_point(|&s| (s as f64) <= bound) {
        0 => 0.0,
        k => pmf.prefix[k - 1],
    }
}

/// Exact lattice moment `E[S^k]`.
pub fn exact_moment(pmf: &MagnetisationPMF, k: u32) -> f64 {
    let mut sum = 0.0;
    for (&s, &p) in pmf.support.iter().zip(&pmf.probs) {
        sum += p * (s as f64).powi(k as i32);
    }
    sum
}

/// Mixture-representation PMF: `probs[j] = ∫ C(n,j) psi(x)^j (1-psi(x))^{n-j} d mu_n(x)`.
///
/// Computed with the mixing measure's own quadrature rule; the pre-renormalization
/// drift must stay below `1e-10`, otherwise the grid or truncation is at fault.
pub fn mixture_pmf(params: &ModelParams, mix: &DeFinettiMeasure) -> Result<MagnetisationPMF> {
    if mix.params() != params {
        return Err(Error::Config("mixture_pmf: measure was built for different parameters".into()));
    }
    let n = params.n() as usize;
    let lf = log_factorials(n);
    let mut acc = vec![0.0f64; n + 1];
    for &(x, w) in mix.nodes() {
        // ln psi(x) = -ln(1 + e^{-2x}), ln(1 - psi(x)) = -ln(1 + e^{2x})
        let lpsi = -(-2.0 * x).exp().ln_1p();
        let lpsi_neg = -(2.0 * x).exp().ln_1p();
        for (j, slot) in acc.iter_mut().enumerate() {
            let mut lt = lf[n] - lf[j] - lf[n - j];
            if j > 0 {
                lt += j as f64 * lpsi;
            }
            if j < n {
                lt += (n - j) as f64 * lpsi_neg;
            }
            *slot += w * lt.exp();
        }
    }
    let total: f64 = acc.iter().sum();
    let drift = (total - 1.0).abs();
    if drift >= 1e-10 {
        return Err(Error::Numerical(format!(
            "mixture mass drifted by {drift:.3e} before renormalization; grid or truncation fault"
        )));
    }
    for a in &mut acc {
        if !(*a > 0.0) {
            return Err(Error::Numerical("mixture produced a non-positive atom".into()));
        }
        *a /= total;
    }
    let log_weights = acc.iter().map(|&p| p.ln()).collect();
    let mut prefix = Vec::with_capacity(acc.len());
    let mut run = 0.0;
    for &p in &acc {
        run += p;
        prefix.push(run.min(1.0));
    }
    let support = (0..=n as i64).map(|j| 2 * j - n as i64).collect();
    Ok(MagnetisationPMF { n: params.n(), support, probs: acc, log_weights, prefix })
}
