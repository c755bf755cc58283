//! The mixing law of the exchangeable spins, its normalizing constant, the
//! transcendental critical point, and the four limit laws.
//!
//! All density work happens in the `x = atanh(t)` coordinate, where the
//! mixing density is proportional to `exp(-n * phi_beta(x))` and smooth on
//! the whole line; the `t` and `p` parametrizations are obtained by pushing
//! forward through `tanh` and the logistic map. This keeps every quadrature
//! free of endpoint singularities.

use crate::error::{Error, Result};
use crate::quad::{self, PanelTable};
use crate::special::{log_cosh, normal_cdf};
use rand::Rng;

/// `phi_beta(x) = x^2 / (2 beta) - ln cosh x`, overflow-safe in `x`.
pub fn phi_beta(x: f64, beta: f64) -> f64 {
    x * x / (2.0 * beta) - log_cosh(x)
}

/// Second derivative `phi_beta''(x) = tanh(x)^2 - (beta - 1)/beta`.
pub fn phi_beta_second(x: f64, beta: f64) -> f64 {
    let t = x.tanh();
    t * t - (beta - 1.0) / beta
}

/// Logistic map `psi(alpha) = (1 + tanh alpha) / 2`.
pub fn logistic(alpha: f64) -> f64 {
    0.5 * (1.0 + alpha.tanh())
}

/// Inverse logistic `psi^{-1}(p) = atanh(2p - 1)`, valid on `0 < p < 1`.
pub fn logistic_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("logistic_inv needs 0 < p < 1, got {p}")));
    }
    // 0.5 (ln p - ln(1-p)) keeps precision near the endpoints
    Ok(0.5 * (p.ln() - (-p).ln_1p()))
}

/// Positive solution of `tanh(x) = x / beta` together with the limiting
/// magnetisation `m = x/beta` and the curvature `phi_beta''(x) > 0`.
#[derive(Clone, Copy, Debug)]
pub struct CriticalPoint {
    pub x: f64,
    pub m: f64,
    pub curvature: f64,
}

/// Solve `tanh(x) = x/beta` on `x > 0` for `beta > 1`.
///
/// Bracketed bisection on `[1e-8, beta]` (the function changes sign exactly
/// once there) followed by guarded Newton steps.
pub fn solve_critical_point(beta: f64) -> Result<CriticalPoint> {
    if !beta.is_finite() || beta <= 1.0 {
        return Err(Error::NoPositiveRoot { beta });
    }
    let g = |x: f64| x.tanh() - x / beta;
    let dg = |x: f64| {
        let t = x.tanh();
        (1.0 - t * t) - 1.0 / beta
    };
    let (mut lo, mut hi) = (1e-8, beta);
    if g(lo) <= 0.0 || g(hi) >= 0.0 {
        return Err(Error::Internal(format!("critical-point bracket failed for beta = {beta}")));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..8 {
        let step = g(x) / dg(x);
        let next = x - step;
        if next.is_finite() && next > lo && next < hi {
            x = next;
        } else {
            break;
        }
    }
    if g(x).abs() > 1e-12 {
        return Err(Error::Numerical(format!(
            "critical point residual {} above tolerance at beta = {beta}",
            g(x).abs()
        )));
    }
    Ok(CriticalPoint { x, m: x.tanh(), curvature: phi_beta_second(x, beta) })
}

/// One Curie-Weiss instance: spin count, inverse temperature, the optional
/// critical-window scaling, and an external field for the fixed-point chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    n: u64,
    beta: f64,
    gamma: Option<f64>,
    mu: f64,
}

impl ModelParams {
    pub fn new(n: u64, beta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::Config(format!("beta must be positive and finite, got {beta}")));
        }
        Ok(ModelParams { n, beta, gamma: None, mu: 0.0 })
    }

    /// Switch to the critical window `beta_n = 1 - gamma / sqrt(n)`.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma == 0.0 {
            return Err(Error::Config(format!("gamma must be finite and nonzero, got {gamma}")));
        }
        if 1.0 - gamma / (self.n as f64).sqrt() <= 0.0 {
            return Err(Error::Config(format!(
                "window scaling 1 - gamma/sqrt(n) = {} is not positive (n = {}, gamma = {gamma})",
                1.0 - gamma / (self.n as f64).sqrt(),
                self.n
            )));
        }
        self.gamma = Some(gamma);
        Ok(self)
    }

    /// External field, used only by the fixed-point chain.
    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Config(format!("mu must be finite, got {mu}")));
        }
        self.mu = mu;
        Ok(self)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> Option<f64> {
        self.gamma
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `beta` itself, or `1 - gamma/sqrt(n)` when the window scaling is set.
    pub fn effective_beta(&self) -> f64 {
        match self.gamma {
            Some(g) => 1.0 - g / (self.n as f64).sqrt(),
            None => self.beta,
        }
    }
}

/// Tabulated mixing law of the spins in `x`-coordinates.
///
/// The density `exp(-n phi_beta(x)) / Z` is tabulated on an adaptive panel
/// grid over `[-L, L]`, with `L` chosen from an explicit Gaussian-dominating
/// tail bound so that the omitted mass is certified below the requested
/// tolerance. `log_z` is the log of the normalizing integral.
#[derive(Clone, Debug)]
pub struct DeFinettiMeasure {
    params: ModelParams,
    eff_beta: f64,
    shift: f64,
    table: PanelTable,
    nodes: Vec<(f64, f64)>,
    log_z: f64,
    truncation_error: f64,
    log_density: Vec<f64>,
    cdf: Vec<f64>,
}

// Certified bound on log of the two-sided unnormalized tail mass beyond l.
// Uses phi(x) >= x^2/(2 beta) - |x| always, and phi(x) >= C x^2 / 2 with
// C = 1/beta - 1 when beta < 1.
fn log_tail_bound(n: f64, beta: f64, l: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let mut bound = f64::INFINITY;
    if l > beta {
        let gap = l - beta;
        bound = n * beta / 2.0 - n * gap * gap / (2.0 * beta) + (beta / (n * gap)).ln() + ln2;
    }
    let c = 1.0 / beta - 1.0;
    if c > 0.0 && l > 0.0 {
        let sub = -n * c * l * l / 2.0 - (n * c * l).ln() + ln2;
        bound = bound.min(sub);
    }
    bound
}

/// Build the tabulated mixing law for `params`.
///
/// `tail_tol` bounds the certified omitted tail mass (at most `1e-6`);
/// `grid_points` is a lower bound on the number of panels (at least 64).
pub fn build_definetti(
    params: &ModelParams,
    tail_tol: f64,
    grid_points: usize,
) -> Result<DeFinettiMeasure> {
    if !(tail_tol > 0.0 && tail_tol <= 1e-6) {
        return Err(Error::Config(format!("tail_tol must lie in (0, 1e-6], got {tail_tol}")));
    }
    if grid_points < 64 {
        return Err(Error::Config(format!("grid_points must be at least 64, got {grid_points}")));
    }
    let eff = params.effective_beta();
    let n = params.n() as f64;
    let shift = if eff > 1.0 {
        let cp = solve_critical_point(eff)?;
        phi_beta(cp.x, eff)
    } else {
        0.0
    };

    // initial truncation radius from the quadratic tail bound
    let budget = eff * eff / 2.0 + shift.abs() + (tail_tol.recip().ln() + 40.0) / n;
    let mut l = (eff + (2.0 * eff * budget).sqrt()).max(eff + 0.5).max(1.0);
    if eff > 1.0 {
        l = l.max(solve_critical_point(eff)?.x + 1.0);
    }

    let density = |x: f64| (-(n * (phi_beta(x, eff) - shift))).exp();
    for _attempt in 0..8 {
        let c_pos = (1.0 / eff - 1.0).max(1.0);
        let scale = (n * c_pos).sqrt();
        let initial = ((4.0 * l * scale).ceil() as usize).clamp(grid_points - 1, 65_536);
        let table = quad::adaptive_table(&density, -l, l, initial, 1e-12)?;
        let log_z = table.total.ln() - n * shift;
        let truncation_error = (log_tail_bound(n, eff, l) - log_z).exp();
        if truncation_error < tail_tol {
            let nodes: Vec<(f64, f64)> = table
                .nodes(&density)
                .into_iter()
                .map(|(x, w)| (x, w / table.total))
                .collect();
            let log_density: Vec<f64> = table.edges.iter().map(|&x| -n * phi_beta(x, eff)).collect();
            let cdf: Vec<f64> = table.prefix.iter().map(|&p| (p / table.total).clamp(0.0, 1.0)).collect();
            return Ok(DeFinettiMeasure {
                params: params.clone(),
                eff_beta: eff,
                shift,
                table,
                nodes,
                log_z,
                truncation_error,
                log_density,
                cdf,
            });
        }
        l *= 1.4;
    }
    Err(Error::Numerical("could not certify the truncation radius".into()))
}

impl DeFinettiMeasure {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Effective inverse temperature the measure was built with.
    pub fn effective_beta(&self) -> f64 {
        self.eff_beta
    }

    /// Panel-edge grid on `[-L, L]`.
    pub fn xgrid(&self) -> &[f64] {
        &self.table.edges
    }

    /// Unnormalized log-density `-n phi_beta(x)` on the grid.
    pub fn log_density_grid(&self) -> &[f64] {
        &self.log_density
    }

    /// CDF values on the grid.
    pub fn cdf_grid(&self) -> &[f64] {
        &self.cdf
    }

    /// `ln Z_{n,beta}` with `Z_{n,beta} = ∫ exp(-n phi_beta)`.
    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// Certified bound on the relative mass omitted beyond the grid.
    pub fn truncation_error(&self) -> f64 {
        self.truncation_error
    }

    fn shifted_density(&self) -> impl Fn(f64) -> f64 + '_ {
        let n = self.params.n() as f64;
        let eff = self.eff_beta;
        let shift = self.shift;
        move |x: f64| (-(n * (phi_beta(x, eff) - shift))).exp()
    }

    /// Normalized density at `x` (zero outside the tabulated interval).
    pub fn density(&self, x: f64) -> f64 {
        if x < self.table.edges[0] || x > *self.table.edges.last().unwrap() {
            return 0.0;
        }
        self.shifted_density()(x) / self.table.total
    }

    /// CDF at `x`.
    pub fn cdf_at(&self, x: f64) -> f64 {
        self.table.cdf(&self.shifted_density(), x)
    }

    /// Quantile, the inverse of [`DeFinettiMeasure::cdf_at`].
    pub fn quantile(&self, u: f64) -> f64 {
        self.table.quantile(&self.shifted_density(), u)
    }

    /// Quadrature nodes `(x_i, w_i)` with `sum w_i = 1`.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    /// `E[g(X)]` by the tabulated rule, summed left to right.
    pub fn expectation<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let mut sum = 0.0;
        for &(x, w) in &self.nodes {
            sum += w * g(x);
        }
        sum
    }

    /// CDF of `T = tanh(X)` at `t`.
    pub fn t_cdf(&self, t: f64) -> f64 {
        if t <= -1.0 {
            0.0
        } else if t >= 1.0 {
            1.0
        } else {
            self.cdf_at(t.atanh())
        }
    }

    /// Density of `scale * tanh(X)` at `u` (the laws of `sqrt(n) T` and
    /// `n^{1/4} T` are both reached this way).
    pub fn scaled_t_density(&self, u: f64, scale: f64) -> f64 {
        let t = u / scale;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        let x = t.atanh();
        self.density(x) / (scale * (1.0 - t * t))
    }
}

/// Which of the four fluctuation limits applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Window,
    Supercritical,
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subcritical" => Ok(Regime::Subcritical),
            "critical" => Ok(Regime::Critical),
            "window" => Ok(Regime::Window),
            "supercritical" => Ok(Regime::Supercritical),
            other => Err(Error::Config(format!(
                "unknown regime {other:?}; expected subcritical, critical, window or supercritical"
            ))),
        }
    }
}

/// Identity of a limit law.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LimitKind {
    /// `N(0, 1/(1-beta))`.
    Gaussian { beta: f64 },
    /// Density `exp(-x^4/12) / Z_F`.
    Quartic,
    /// Density `exp(-gamma x^2/2 - x^4/12) / Z_{F_gamma}`.
    QuarticWindow { gamma: f64 },
    /// `Ber_{±m}(1/2)`.
    TwoPoint { m: f64 },
}

struct QuarticTable {
    gamma: f64,
    shift: f64,
    table: PanelTable,
}

impl QuarticTable {
    fn potential(&self, x: f64) -> f64 {
        x.powi(4) / 12.0 + self.gamma * x * x / 2.0
    }

    fn density_raw(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x: f64| (-(self.potential(x) - self.shift)).exp()
    }

    fn normalizer(&self) -> f64 {
        self.table.total * (-self.shift).exp()
    }
}

/// One of the four fluctuation limits, with CDF, moments and a sampler.
pub struct LimitLaw {
    kind: LimitKind,
    quartic: Option<QuarticTable>,
}

impl LimitLaw {
    /// `N(0, 1/(1-beta))` for `beta < 1`.
    pub fn gaussian_subcritical(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Config(format!("gaussian limit needs 0 < beta < 1, got {beta}")));
        }
        Ok(LimitLaw { kind: LimitKind::Gaussian { beta }, quartic: None })
    }

    /// The pure quartic limit `exp(-x^4/12)/Z_F`.
    pub fn quartic_critical() -> Result<Self> {
        let table = build_quartic_table(0.0)?;
        Ok(LimitLaw { kind: LimitKind::Quartic, quartic: Some(table) })
    }

    /// The window limit `exp(-gamma x^2/2 - x^4/12)/Z_{F_gamma}`.
    pub fn quartic_window(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::Config(format!("gamma must be finite, got {gamma}")));
        }
        let table = build_quartic_table(gamma)?;
        Ok(LimitLaw { kind: LimitKind::QuarticWindow { gamma }, quartic: Some(table) })
    }

    /// `Ber_{±m_beta}(1/2)` for `beta > 1`.
    pub fn two_point(beta: f64) -> Result<Self> {
        let cp = solve_critical_point(beta)?;
        Ok(LimitLaw { kind: LimitKind::TwoPoint { m: cp.m }, quartic: None })
    }

    pub fn kind(&self) -> &LimitKind {
        &self.kind
    }

    /// Normalizer `Z_F` or `Z_{F_gamma}` for the quartic kinds.
    pub fn normalizer(&self) -> Option<f64> {
        self.quartic.as_ref().map(|q| q.normalizer())
    }

    /// CDF (right-continuous for the two-point kind).
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            LimitKind::Gaussian { beta } => {
                let sd = (1.0 / (1.0 - beta)).sqrt();
                normal_cdf(x / sd)
            }
            LimitKind::Quartic | LimitKind::QuarticWindow { .. } => {
                let q = self.quartic.as_ref().unwrap();
                q.table.cdf(&q.density_raw(), x)
            }
            LimitKind::TwoPoint { m } => {
                if x < -m {
                    0.0
                } else if x < *m {
                    0.5
                } else {
                    1.0
                }
            }
        }
    }

    /// Density for the continuous kinds, `None` for the two-point law.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        match &self.kind {
            LimitKind::Gaussian { beta } => {
                let var = 1.0 / (1.0 - beta);
                Some((-(x * x) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt())
            }
            LimitKind::Quartic | LimitKind::QuarticWindow { .. } => {
                let q = self.quartic.as_ref().unwrap();
                Some(q.density_raw()(x) / q.table.total)
            }
            LimitKind::TwoPoint { .. } => None,
        }
    }

    /// `E[X^k]`; odd moments vanish by symmetry.
    pub fn moment(&self, k: u32) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        match &self.kind {
            LimitKind::Gaussian { beta } => {
                let var = 1.0 / (1.0 - beta);
                // (k-1)!! var^{k/2}
                let mut acc = 1.0;
                let mut j = k as i64 - 1;
                while j > 1 {
                    acc *= j as f64;
                    j -= 2;
                }
                acc * var.powi(k as i32 / 2)
            }
            LimitKind::Quartic | LimitKind::QuarticWindow { .. } => {
                let q = self.quartic.as_ref().unwrap();
                let f = q.density_raw();
                q.table.integrate_edges(&|x: f64| x.powi(k as i32) * f(x)) / q.table.total
            }
            LimitKind::TwoPoint { m } => m.powi(k as i32),
        }
    }

    /// Standard deviation, used to size default test-function grids.
    pub fn sigma(&self) -> f64 {
        self.moment(2).sqrt()
    }

    /// `E[h(X)]` computed by quadrature (or the two-point closed form).
    pub fn expect<H: Fn(f64) -> f64>(&self, h: H) -> f64 {
        match &self.kind {
            LimitKind::Gaussian { beta } => {
                let sd = (1.0 / (1.0 - beta)).sqrt();
                let f = move |x: f64| (-(x * x) / (2.0 * sd * sd)).exp();
                let table = quad::adaptive_table(&f, -12.0 * sd, 12.0 * sd, 64, 1e-13)
                    .expect("gaussian expectation table");
                table.integrate_edges(&|x: f64| h(x) * f(x)) / table.total
            }
            LimitKind::Quartic | LimitKind::QuarticWindow { .. } => {
                let q = self.quartic.as_ref().unwrap();
                let f = q.density_raw();
                q.table.integrate_edges(&|x: f64| h(x) * f(x)) / q.table.total
            }
            LimitKind::TwoPoint { m } => 0.5 * (h(*m) + h(-*m)),
        }
    }

    /// Draw one sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            LimitKind::Gaussian { beta } => {
                let g: f64 = rng.sample(rand_distr::StandardNormal);
                g * (1.0 / (1.0 - beta)).sqrt()
            }
            LimitKind::Quartic | LimitKind::QuarticWindow { .. } => {
                let q = self.quartic.as_ref().unwrap();
                let u: f64 = rng.gen();
                q.table.quantile(&q.density_raw(), u)
            }
            LimitKind::TwoPoint { m } => {
                if rng.gen::<bool>() {
                    *m
                } else {
                    -*m
                }
            }
        }
    }
}

fn build_quartic_table(gamma: f64) -> Result<QuarticTable> {
    let shift = if gamma < 0.0 { 0.75 * gamma * gamma } else { 0.0 };
    // radius where the potential exceeds the shift by ~800
    let mut l = (12.0f64 * (800.0 + shift)).powf(0.25);
    for _ in 0..3 {
        l = (12.0 * (800.0 + shift + gamma.abs() * l * l / 2.0)).powf(0.25);
    }
    let f = move |x: f64| (-(x.powi(4) / 12.0 + gamma * x * x / 2.0 - shift)).exp();
    let table = quad::adaptive_table(&f, -l, l, 128, 1e-13)?;
    Ok(QuarticTable { gamma, shift, table })
}

/// The limit law matching `params` in the given regime.
pub fn limit_law_for(params: &ModelParams, regime: Regime) -> Result<LimitLaw> {
    match regime {
        Regime::Subcritical => {
            if params.gamma().is_some() || !(params.beta() < 1.0) {
                return Err(Error::RegimeMismatch(format!(
                    "subcritical regime needs beta < 1 and no window scaling (beta = {}, gamma = {:?})",
                    params.beta(),
                    params.gamma()
                )));
            }
            LimitLaw::gaussian_subcritical(params.beta())
        }
        Regime::Critical => {
            if params.gamma().is_some() || params.beta() != 1.0 {
                return Err(Error::RegimeMismatch(format!(
                    "critical regime needs beta = 1 and no window scaling (beta = {}, gamma = {:?})",
                    params.beta(),
                    params.gamma()
                )));
            }
            LimitLaw::quartic_critical()
        }
        Regime::Window => match params.gamma() {
            Some(g) => LimitLaw::quartic_window(g),
            None => Err(Error::RegimeMismatch("window regime needs the gamma scaling".into())),
        },
        Regime::Supercritical => {
            if params.gamma().is_some() || !(params.beta() > 1.0) {
                return Err(Error::RegimeMismatch(format!(
                    "supercritical regime needs beta > 1 and no window scaling (beta = {}, gamma = {:?})",
                    params.beta(),
                    params.gamma()
                )));
            }
            LimitLaw::two_point(params.beta())
        }
    }
}

pub use crate::special::{gamma_fn, gamma_quarter};

/// Closed form `Z_F = 3^{1/4} 2^{-1/2} Gamma(1/4)` for cross-checking the
/// quartic normalizer.
pub fn quartic_normalizer_closed_form() -> f64 {
    3.0f64.powf(0.25) / 2.0f64.sqrt() * gamma_quarter()
}

#[cfg(test)]
mod tests {
    use super::*;

    // independent oracle: plain bisection for tanh(x) = x/beta on (0, beta)
    fn bisect_critical(beta: f64) -> f64 {
        let g = |x: f64| x.tanh() - x / beta;
        let (mut lo, mut hi) = (1e-12, beta);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    // independent oracle: composite Simpson on a uniform grid
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
        let m = 2 * panels;
        let h = (b - a) / m as f64;
        let mut sum = f(a) + f(b);
        for k in 1..m {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * f(a + h * k as f64);
        }
        sum * h / 3.0
    }

    #[test]
    fn phi_beta_vanishes_at_origin() {
        assert_eq!(phi_beta(0.0, 0.5), 0.0);
    }

    #[test]
    fn phi_beta_is_even() {
        for &x in &[0.3, 1.0, 2.7, 14.0] {
            for &b in &[0.3, 1.0, 2.0] {
                assert!((phi_beta(x, b) - phi_beta(-x, b)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn phi_beta_minimum_at_critical_point_for_beta_two() {
        // oracle: bisection for tanh(x) = x/2
        let xb = bisect_critical(2.0);
        assert!((xb - 1.915).abs() < 1e-3);
        // stationarity: x/beta - tanh(x) = 0 within 1e-10
        assert!((xb / 2.0 - xb.tanh()).abs() < 1e-10);
        for &d in &[1e-3, 1e-2, 0.1, 0.5] {
            assert!(phi_beta(xb, 2.0) < phi_beta(xb + d, 2.0));
            assert!(phi_beta(xb, 2.0) < phi_beta(xb - d, 2.0));
        }
    }

    #[test]
    fn phi_beta_nonnegative_on_grid_for_beta_at_most_one() {
        for &b in &[0.2, 0.5, 0.9, 1.0] {
            for k in -400..=400 {
                let x = k as f64 * 0.05;
                let v = phi_beta(x, b);
                assert!(v >= -1e-15, "phi_{b}({x}) = {v}");
                if x != 0.0 {
                    assert!(v > 0.0);
                }
            }
        }
    }

    #[test]
    fn logistic_at_zero_is_one_half() {
        assert_eq!(logistic(0.0), 0.5);
    }

    #[test]
    fn logistic_pair_is_mutually_inverse() {
        assert!((logistic_inv(logistic(1.3)).unwrap() - 1.3).abs() < 1e-12);
        for &a in &[-4.0, -0.2, 0.9, 6.0] {
            assert!((logistic_inv(logistic(a)).unwrap() - a).abs() < 1e-12);
        }
    }

    #[test]
    fn logistic_symmetry() {
        for &a in &[0.1, 1.0, 3.5, 20.0] {
            assert!((logistic(a) + logistic(-a) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn logistic_inv_rejects_endpoints() {
        assert!(logistic_inv(0.0).is_err());
        assert!(logistic_inv(1.0).is_err());
    }

    #[test]
    fn critical_point_rejects_beta_one() {
        assert!(matches!(solve_critical_point(1.0), Err(Error::NoPositiveRoot { .. })));
    }

    #[test]
    fn critical_point_matches_bisection_oracle() {
        let cp = solve_critical_point(2.0).unwrap();
        let oracle = bisect_critical(2.0);
        assert!((cp.x - oracle).abs() < 1e-12);
        assert!((cp.m - 0.95750).abs() < 5e-6);
        assert!((cp.m - (2.0 * cp.m).tanh()).abs() < 1e-12);
        assert!(cp.curvature > 0.0);
    }

    #[test]
    fn critical_point_near_one_from_above() {
        let cp = solve_critical_point(1.0 + 1.0 / 4096.0f64.sqrt()).unwrap();
        assert!((cp.m - (cp.x / (1.0 + 1.0 / 64.0))).abs() < 1e-12);
        assert!(cp.x > 0.0 && cp.x < 0.5);
    }

    #[test]
    fn model_params_validation() {
        assert!(ModelParams::new(0, 0.5).is_err());
        assert!(ModelParams::new(10, -1.0).is_err());
        assert!(ModelParams::new(10, 0.5).unwrap().with_gamma(0.0).is_err());
        // 1 - 5/sqrt(4) < 0
        assert!(ModelParams::new(4, 1.0).unwrap().with_gamma(5.0).is_err());
        let p = ModelParams::new(100, 1.0).unwrap().with_gamma(2.0).unwrap();
        assert!((p.effective_beta() - 0.8).abs() < 1e-15);
        let q = ModelParams::new(100, 0.7).unwrap();
        assert_eq!(q.effective_beta(), 0.7);
    }

    #[test]
    fn definetti_rejects_bad_config() {
        let p = ModelParams::new(10, 0.5).unwrap();
        assert!(matches!(build_definetti(&p, 1e-12, 32), Err(Error::Config(_))));
        assert!(matches!(build_definetti(&p, 1e-3, 128), Err(Error::Config(_))));
    }

    #[test]
    fn definetti_density_normalized_against_simpson_oracle() {
        let p = ModelParams::new(1, 0.5).unwrap();
        let m = build_definetti(&p, 1e-12, 64).unwrap();
        let edges = m.xgrid();
        let (a, b) = (edges[0], *edges.last().unwrap());
        let mass = simpson(|x| m.density(x), a, b, 4000);
        assert!((mass - 1.0).abs() < 1e-12, "mass = {mass}");
    }

    #[test]
    fn definetti_symmetry_and_cdf_invariants() {
        for (n, beta) in [(1u64, 0.5), (100, 0.5), (50, 1.0), (64, 1.5)] {
            let p = ModelParams::new(n, beta).unwrap();
            let m = build_definetti(&p, 1e-12, 64).unwrap();
            let l = *m.xgrid().last().unwrap();
            for k in 1..20 {
                let x = l * k as f64 / 20.0;
                let (d1, d2) = (m.density(x), m.density(-x));
                assert!((d1 - d2).abs() <= 1e-12 * d1.max(1.0), "density asym at {x}");
                let (c1, c2) = (m.cdf_at(x), m.cdf_at(-x));
                assert!((c1 + c2 - 1.0).abs() < 1e-10, "cdf asym at {x}: {c1} + {c2}");
            }
            let cg = m.cdf_grid();
            assert!(cg.windows(2).all(|w| w[1] >= w[0] - 1e-15));
            assert!(cg[0].abs() < 1e-12 && (cg[cg.len() - 1] - 1.0).abs() < 1e-12);
            assert!(m.truncation_error() < 1e-12);
        }
    }

    #[test]
    fn definetti_subcritical_normalizer_bound_beta_half() {
        // sqrt(n) Z sqrt(C/2pi) - 1 in (-C^{-9/2}/(4n), 0] at beta = 1/2, n = 100
        let p = ModelParams::new(100, 0.5).unwrap();
        let m = build_definetti(&p, 1e-12, 64).unwrap();
        let c = 1.0 / 0.5 - 1.0;
        let v = (100.0f64).sqrt() * m.log_z().exp() * (c / (2.0 * std::f64::consts::PI)).sqrt() - 1.0;
        let bound = c.powf(-4.5) / (4.0 * 100.0);
        assert!(v <= 0.0, "signed deviation {v} should be nonpositive");
        assert!(v > -bound, "deviation {v} outside (-{bound}, 0]");
    }

    #[test]
    fn definetti_critical_normalizer_approaches_quartic() {
        // oracle: Simpson quadrature of exp(-x^4/12)
        let zf = simpson(|x| (-x.powi(4) / 12.0).exp(), -10.0, 10.0, 20000);
        let p = ModelParams::new(10_000, 1.0).unwrap();
        let m = build_definetti(&p, 1e-12, 64).unwrap();
        let v = (10_000.0f64).powf(0.25) * m.log_z().exp();
        assert!((v / zf - 1.0).abs() < 0.02, "n^(1/4) Z = {v} vs Z_F = {zf}");
    }

    #[test]
    fn definetti_quantile_inverts_cdf() {
        let p = ModelParams::new(200, 1.5).unwrap();
        let m = build_definetti(&p, 1e-12, 64).unwrap();
        for &u in &[0.01, 0.2, 0.5, 0.77, 0.999] {
            let x = m.quantile(u);
            assert!((m.cdf_at(x) - u).abs() < 1e-11);
        }
    }

    #[test]
    fn limit_gaussian_moment_is_exact() {
        let law = LimitLaw::gaussian_subcritical(0.5).unwrap();
        assert_eq!(law.moment(2), 2.0);
        assert_eq!(law.moment(1), 0.0);
        assert!((law.moment(4) - 12.0).abs() < 1e-12);
    }

    #[test]
    fn limit_quartic_normalizer_matches_closed_form() {
        let law = LimitLaw::quartic_critical().unwrap();
        let z = law.normalizer().unwrap();
        let closed = quartic_normalizer_closed_form();
        assert!((z / closed - 1.0).abs() < 1e-8, "z = {z}, closed = {closed}");
        assert!((z - 3.3740).abs() < 5e-4);
    }

    #[test]
    fn limit_window_at_gamma_zero_equals_critical() {
        let a = LimitLaw::quartic_critical().unwrap();
        let b = LimitLaw::quartic_window(0.0).unwrap();
        for k in -40..=40 {
            let x = k as f64 * 0.2;
            assert!((a.cdf(x) - b.cdf(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_cdfs_are_symmetric_and_normalized() {
        let laws = [
            LimitLaw::gaussian_subcritical(0.5).unwrap(),
            LimitLaw::quartic_critical().unwrap(),
            LimitLaw::quartic_window(1.0).unwrap(),
            LimitLaw::quartic_window(-1.0).unwrap(),
        ];
        for law in &laws {
            for k in 1..30 {
                let x = k as f64 * 0.3;
                assert!((law.cdf(-x) + law.cdf(x) - 1.0).abs() < 1e-12);
            }
            assert!((law.cdf(-1e6), law.cdf(1e6)) == (0.0, 1.0));
            // pdf integrates to 1
            let pdf = |x: f64| law.pdf(x).unwrap();
            let mass = simpson(pdf, -12.0, 12.0, 20000);
            assert!((mass - 1.0).abs() < 1e-12, "pdf mass = {mass}");
        }
    }

    #[test]
    fn limit_two_point_cdf_and_moments() {
        let law = LimitLaw::two_point(2.0).unwrap();
        let m = match law.kind() {
            LimitKind::TwoPoint { m } => *m,
            _ => unreachable!(),
        };
        assert_eq!(law.cdf(-m - 1e-9), 0.0);
        assert_eq!(law.cdf(0.0), 0.5);
        assert_eq!(law.cdf(m), 1.0);
        assert!((law.moment(2) - m * m).abs() < 1e-15);
        assert!(law.pdf(0.0).is_none());
    }

    #[test]
    fn limit_quartic_moment_stable_under_refinement() {
        // Cauchy difference against a finer independent Simpson grid
        let law = LimitLaw::quartic_critical().unwrap();
        let m2 = law.moment(2);
        let num = simpson(|x| x * x * (-x.powi(4) / 12.0).exp(), -12.0, 12.0, 40000);
        let den = simpson(|x| (-x.powi(4) / 12.0).exp(), -12.0, 12.0, 40000);
        assert!((m2 - num / den).abs() < 1e-10);
    }

    #[test]
    fn limit_law_for_checks_regime_consistency() {
        let sub = ModelParams::new(50, 0.5).unwrap();
        assert!(limit_law_for(&sub, Regime::Subcritical).is_ok());
        assert!(matches!(
            limit_law_for(&sub, Regime::Supercritical),
            Err(Error::RegimeMismatch(_))
        ));
        let win = ModelParams::new(50, 1.0).unwrap().with_gamma(1.0).unwrap();
        assert!(limit_law_for(&win, Regime::Window).is_ok());
        assert!(matches!(limit_law_for(&win, Regime::Critical), Err(Error::RegimeMismatch(_))));
    }

    #[test]
    fn scaled_t_density_integrates_to_one() {
        let p = ModelParams::new(400, 1.0).unwrap();
        let m = build_definetti(&p, 1e-12, 64).unwrap();
        let scale = 400.0f64.powf(0.25);
        let mass = simpson(|u| m.scaled_t_density(u, scale), -scale * 0.999, scale * 0.999, 40000);
        assert!((mass - 1.0).abs() < 1e-6, "mass = {mass}");
    }
}
