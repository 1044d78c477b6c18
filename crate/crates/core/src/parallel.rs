//! Asymptotics for `N` parallel dying sub-channels sharing a power budget.
//!
//! With per-sub-channel power `P/N` small, `log(1 + alpha P/N) ~ alpha P/N`
//! and the outage event reduces to the sample mean of the per-sub-channel
//! throughputs `Y_i = (1/K) sum_{k <= L_i} alpha_k` falling below the rate per
//! unit cost `t = R/P`. Everything here works with that linearised event;
//! Monte Carlo uses the exact logarithm.

use statrs::function::gamma::gamma_lr;

use crate::channel::{block_weights, surviving_moments, AttackModel, FadingModel, WeightVector};
use crate::error::{Error, Result};
use crate::special::norm_cdf;

/// Below this many sub-channels the Gaussian approximations are unreliable.
pub const GAUSSIAN_MIN_N: usize = 20;

/// Exponent searches flag `t` below this quantile of `Y`.
pub const LOW_T_QUANTILE: f64 = 1e-3;

const BRACKET_LIMIT: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelConfig {
    /// Number of sub-channels.
    pub n: usize,
    /// Blocks per codeword on every sub-channel.
    pub k: usize,
    /// Total power, split evenly over the sub-channels.
    pub power: f64,
    /// Total target rate.
    pub rate: f64,
    /// Dependence range of the attacks; 0 means independent.
    pub m: usize,
    /// Common correlation of surviving-block counts within the range.
    pub rho: f64,
    pub fading: FadingModel,
    pub attack: AttackModel,
}

impl ParallelConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        k: usize,
        power: f64,
        rate: f64,
        m: usize,
        rho: f64,
        fading: FadingModel,
        attack: AttackModel,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("need at least one sub-channel"));
        }
        if k == 0 {
            return Err(Error::precondition("coding length K must be at least 1"));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::precondition(format!("power must be positive, got {power}")));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::precondition(format!("rate must be positive, got {rate}")));
        }
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::precondition(format!("rho must lie in [0, 1), got {rho}")));
        }
        Ok(ParallelConfig { n, k, power, rate, m, rho, fading, attack })
    }

    /// Independent attacks.
    pub fn independent(
        n: usize,
        k: usize,
        power: f64,
        rate: f64,
        fading: FadingModel,
        attack: AttackModel,
    ) -> Result<Self> {
        Self::new(n, k, power, rate, 0, 0.0, fading, attack)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        let mut c = self.clone();
        c.n = n;
        Self::new(c.n, c.k, c.power, c.rate, c.m, c.rho, c.fading, c.attack)
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        let mut c = self.clone();
        c.rate = rate;
        Self::new(c.n, c.k, c.power, c.rate, c.m, c.rho, c.fading, c.attack)
    }

    /// Rate per unit cost `R/P`.
    pub fn t(&self) -> f64 {
        self.rate / self.power
    }

    pub fn per_channel_power(&self) -> f64 {
        self.power / self.n as f64
    }

    pub fn is_independent(&self) -> bool {
        self.m == 0 || self.rho == 0.0
    }
}

/// Moments of the per-sub-channel throughput `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct YMoments {
    pub mean: f64,
    pub variance: f64,
    /// `E[Y_i Y_{i+h}]` for `h = 1..=m`.
    pub lag_cross_moment: Vec<f64>,
    /// `Cov(Y_i, Y_{i+h})` for `h = 1..=m`.
    pub lag_covariance: Vec<f64>,
    /// Long-run variance `Var(Y) + 2 sum_h Cov(Y_i, Y_{i+h})`.
    pub long_run_variance: f64,
}

impl YMoments {
    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub fn y_moments(fading: &FadingModel, attack: &AttackModel, k: usize) -> Result<YMoments> {
    nu_m(fading, attack, k, 0, 0.0)
}

/// Moments of `Y` plus the lag covariances and long-run variance when the
/// surviving-block counts of sub-channels up to `m` apart have correlation
/// `rho`.
pub fn nu_m(fading: &FadingModel, attack: &AttackModel, k: usize, m: usize, rho: f64) -> Result<YMoments> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::precondition(format!("rho must lie in [0, 1), got {rho}")));
    }
    let (mu_l, var_l) = surviving_moments(attack, k)?;
    let mu_a = fading.mean();
    let var_a = fading.variance();
    let k2 = (k * k) as f64;
    let mean = mu_l * mu_a / k as f64;
    let variance = if fading.is_identical() {
        // Y = L alpha / K with one gain per frame.
        ((var_l + mu_l * mu_l) * (var_a + mu_a * mu_a) - mu_l * mu_l * mu_a * mu_a) / k2
    } else {
        (mu_l * var_a + var_l * mu_a * mu_a) / k2
    };
    let cov = rho * mu_a * mu_a * var_l / k2;
    let cross = mu_a * mu_a * (rho * var_l + mu_l * mu_l) / k2;
    Ok(YMoments {
        mean,
        variance: variance.max(0.0),
        lag_cross_moment: vec![cross; m],
        lag_covariance: vec![cov; m],
        long_run_variance: variance.max(0.0) + 2.0 * m as f64 * cov,
    })
}

fn gaussian_tail(t: f64, mean: f64, var: f64, n: usize) -> f64 {
    if var <= 0.0 {
        return if t < mean {
            0.0
        } else if t > mean {
            1.0
        } else {
            0.5
        };
    }
    norm_cdf((t - mean) * (n as f64).sqrt() / var.sqrt())
}

/// Gaussian approximation of the outage probability with independent attacks.
pub fn gaussian_outage_indep(pcfg: &ParallelConfig) -> Result<f64> {
    let y = y_moments(&pcfg.fading, &pcfg.attack, pcfg.k)?;
    Ok(gaussian_tail(pcfg.t(), y.mean, y.variance, pcfg.n))
}

/// Gaussian approximation with m-dependent attacks, using the long-run
/// variance.
pub fn gaussian_outage_mdep(pcfg: &ParallelConfig) -> Result<f64> {
    if pcfg.m == 0 {
        return Err(Error::precondition("m-dependent approximation needs m >= 1"));
    }
    let y = nu_m(&pcfg.fading, &pcfg.attack, pcfg.k, pcfg.m, pcfg.rho)?;
    Ok(gaussian_tail(pcfg.t(), y.mean, y.long_run_variance, pcfg.n))
}

/// Fading rate for the compound MGF; only i.i.d. exponential gains qualify.
fn rayleigh_rate(fading: &FadingModel) -> Result<f64> {
    match fading {
        FadingModel::RayleighExp { rate } => Ok(*rate),
        _ => Err(Error::unsupported("the compound MGF of Y needs i.i.d. Rayleigh fading")),
    }
}

/// Compound MGF `E[exp(sY)] = sum_i w_i f(s/K)^i`. Needs `s < K rate`.
pub fn mgf_y(fading: &FadingModel, attack: &AttackModel, k: usize, s: f64) -> Result<f64> {
    let rate = rayleigh_rate(fading)?;
    let w = block_weights(attack, k)?;
    LogMgf::new(&w, rate).value(s).map(f64::exp)
}

/// `log E[exp(sY)]` and its derivative for Rayleigh fading.
struct LogMgf<'a> {
    w: &'a [f64],
    k: f64,
    rate: f64,
}

impl<'a> LogMgf<'a> {
    fn new(w: &'a WeightVector, rate: f64) -> Self {
        LogMgf { w: w.as_slice(), k: w.k() as f64, rate }
    }

    fn check(&self, s: f64) -> Result<f64> {
        let d = 1.0 - s / (self.k * self.rate);
        if !(d > 0.0) {
            return Err(Error::domain(format!("MGF of Y needs s < {}, got {s}", self.k * self.rate)));
        }
        Ok(1.0 / d)
    }

    fn value(&self, s: f64) -> Result<f64> {
        let x = self.check(s)?;
        let m: f64 = self.w.iter().enumerate().map(|(i, w)| w * x.powi(i as i32)).sum();
        Ok(m.ln())
    }

    /// `(log M)'(s) = M'(s)/M(s)`, with `d/ds x^i = i x^{i+1}/(K rate)`.
    fn derivative(&self, s: f64) -> Result<f64> {
        let x = self.check(s)?;
        let mut m = 0.0;
        let mut dm = 0.0;
        for (i, w) in self.w.iter().enumerate() {
            let xi = x.powi(i as i32);
            m += w * xi;
            dm += w * i as f64 * xi * x;
        }
        Ok(dm / (self.k * self.rate * m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentKind {
    /// Legendre transform of the log-MGF of `Y`.
    IndependentLdp,
    /// Gaussian-tail bound using the long-run variance.
    MDependentGaussianBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentResult {
    pub value: f64,
    /// Maximising `s`.
    pub s_star: f64,
    pub t: f64,
    pub kind: ExponentKind,
    /// `(mean - t)^2 / (2 v)` with the variance matching `kind`, for
    /// side-by-side comparison.
    pub gaussian_bound: f64,
    /// The maximiser lies beyond the search bracket.
    pub bracket_capped: bool,
    /// `t` is below the low quantile of `Y`; the exponent is dominated by the
    /// atom at zero and the limit may not be meaningful.
    pub low_t: bool,
}

fn check_t(t: f64, mean: f64, strict: bool) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::precondition(format!("rate per unit cost must be positive, got {t}")));
    }
    if t > mean || (strict && t >= mean) {
        return Err(Error::OutOfRegime(format!("exponent is defined for t below the mean throughput {mean}, got {t}")));
    }
    Ok(())
}

/// Outage exponent with independent attacks,
/// `sup_{s <= 0} (s t - log E[exp(sY)])`, for Rayleigh fading.
pub fn outage_exponent_indep(fading: &FadingModel, attack: &AttackModel, k: usize, t: f64) -> Result<ExponentResult> {
    let rate = rayleigh_rate(fading)?;
    let w = block_weights(attack, k)?;
    let y = y_moments(fading, attack, k)?;
    check_t(t, y.mean, false)?;
    let gaussian_bound = (y.mean - t).powi(2) / (2.0 * y.variance);
    let low_t = t < y_quantile_rayleigh(&w, rate, LOW_T_QUANTILE);
    let mut out = ExponentResult {
        value: 0.0,
        s_star: 0.0,
        t,
        kind: ExponentKind::IndependentLdp,
        gaussian_bound,
        bracket_capped: false,
        low_t,
    };
    if t == y.mean {
        return Ok(out);
    }
    let lm = LogMgf::new(&w, rate);
    let psi = |s: f64| s * t - lm.value(s).expect("s <= 0 is inside the MGF domain");
    let dpsi = |s: f64| t - lm.derivative(s).expect("s <= 0 is inside the MGF domain");
    let mut lo = -1.0;
    while dpsi(lo) < 0.0 {
        if lo.abs() > BRACKET_LIMIT {
            out.bracket_capped = true;
            break;
        }
        lo *= 2.0;
    }
    let s = golden_max(psi, lo, 0.0, 1e-12 * lo.abs().max(1.0));
    out.s_star = s;
    out.value = psi(s).max(0.0);
    Ok(out)
}

/// Gaussian-bound outage exponent with m-dependent attacks.
pub fn outage_exponent_mdep(
    fading: &FadingModel,
    attack: &AttackModel,
    k: usize,
    m: usize,
    rho: f64,
    t: f64,
) -> Result<ExponentResult> {
    let y = nu_m(fading, attack, k, m, rho)?;
    check_t(t, y.mean, true)?;
    let v = y.long_run_variance;
    let value = (y.mean - t).powi(2) / (2.0 * v);
    let low_t = match fading {
        FadingModel::RayleighExp { rate } => t < y_quantile_rayleigh(&block_weights(attack, k)?, *rate, LOW_T_QUANTILE),
        _ => false,
    };
    Ok(ExponentResult {
        value,
        s_star: (t - y.mean) / v,
        t,
        kind: ExponentKind::MDependentGaussianBound,
        gaussian_bound: value,
        bracket_capped: false,
        low_t,
    })
}

/// Golden-section maximisation of a concave function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // the interval endpoints can beat the midpoint when the maximiser is at 0
    [mid, a, b]
        .into_iter()
        .fold((mid, f(mid)), |best, s| {
            let v = f(s);
            if v > best.1 {
                (s, v)
            } else {
                best
            }
        })
        .0
}

/// CDF of `Y` for Rayleigh fading: given `L = i`, `K Y` is Gamma(i, rate).
pub fn y_cdf_rayleigh(w: &WeightVector, rate: f64, y: f64) -> f64 {
    if y < 0.0 {
        return 0.0;
    }
    let x = rate * w.k() as f64 * y;
    let mut p = w.w0();
    for i in 1..=w.k() {
        if x > 0.0 {
            p += w.get(i) * gamma_lr(i as f64, x);
        }
    }
    p.min(1.0)
}

/// Smallest `y` with `P(Y <= y) >= q`.
pub fn y_quantile_rayleigh(w: &WeightVector, rate: f64, q: f64) -> f64 {
    if w.w0() >= q {
        return 0.0;
    }
    let mut hi = 1.0 / rate;
    while y_cdf_rayleigh(w, rate, hi) < q {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if y_cdf_rayleigh(w, rate, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig5() -> (FadingModel, AttackModel) {
        (FadingModel::unit_rayleigh(), AttackModel::with_mean(5.0).unwrap())
    }

    #[test]
    fn throughput_moments() {
        let (f, a) = fig5();
        let y = y_moments(&f, &a, 5).unwrap();
        assert!((y.mean - 0.571_014_2).abs() < 1e-6);
        assert!((y.variance - 0.269_344_3).abs() < 1e-6);
        let nv = y_moments(&f, &AttackModel::NeverAttack, 4).unwrap();
        assert!((nv.mean - 1.0).abs() < 1e-15 && (nv.variance - 0.25).abs() < 1e-15);
    }

    #[test]
    fn long_run_variance() {
        let (f, a) = fig5();
        let y = nu_m(&f, &a, 5, 1, 0.8).unwrap();
        assert!((y.long_run_variance - 0.517_570_7).abs() < 1e-6);
        assert_eq!(y.lag_covariance.len(), 1);
        let z = nu_m(&f, &a, 5, 3, 0.0).unwrap();
        assert_eq!(z.long_run_variance, z.variance);
        assert_eq!(nu_m(&f, &a, 5, 0, 0.5).unwrap().long_run_variance, z.variance);
    }

    #[test]
    fn gaussian_approximations() {
        let (f, a) = fig5();
        let p = ParallelConfig::new(100, 5, 2.0, 0.5, 1, 0.8, f.clone(), a.clone()).unwrap();
        let gi = gaussian_outage_indep(&p).unwrap();
        let gm = gaussian_outage_mdep(&p).unwrap();
        assert!((gi / 3.0966e-10 - 1.0).abs() < 1e-3, "{gi}");
        assert!((gm / 4.058e-6 - 1.0).abs() < 1e-3, "{gm}");
        let mu = y_moments(&f, &a, 5).unwrap().mean;
        let at_mean = ParallelConfig::new(37, 5, 2.0, 2.0 * mu, 1, 0.3, f.clone(), a.clone()).unwrap();
        assert!((gaussian_outage_indep(&at_mean).unwrap() - 0.5).abs() < 1e-12);
        assert!((gaussian_outage_mdep(&at_mean).unwrap() - 0.5).abs() < 1e-12);
        let zero = ParallelConfig::new(100, 5, 2.0, 0.5, 1, 0.0, f, a).unwrap();
        assert_eq!(gaussian_outage_mdep(&zero).unwrap(), gaussian_outage_indep(&zero).unwrap());
    }

    #[test]
    fn compound_mgf() {
        let (f, a) = fig5();
        assert!((mgf_y(&f, &a, 5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((mgf_y(&f, &a, 5, -1.0).unwrap() - 0.634_018).abs() < 1e-6);
        assert!(matches!(mgf_y(&f, &a, 5, 5.0), Err(Error::Domain(_))));
        let h = 1e-5;
        let d = (mgf_y(&f, &a, 5, h).unwrap() - mgf_y(&f, &a, 5, -h).unwrap()) / (2.0 * h);
        assert!((d - 0.571_014_2).abs() < 1e-6);
    }

    #[test]
    fn exponent_at_mean_is_zero() {
        let (f, a) = fig5();
        let mu = y_moments(&f, &a, 5).unwrap().mean;
        let e = outage_exponent_indep(&f, &a, 5, mu).unwrap();
        assert_eq!(e.value, 0.0);
        assert_eq!(e.s_star, 0.0);
        assert!(matches!(outage_exponent_indep(&f, &a, 5, 0.6), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn exponent_matches_grid() {
        let (f, a) = fig5();
        let w = block_weights(&a, 5).unwrap();
        let lm = LogMgf::new(&w, 1.0);
        for &t in &[0.1, 0.25, 0.4] {
            let e = outage_exponent_indep(&f, &a, 5, t).unwrap();
            let grid = (0..=100_000)
                .map(|j| -50.0 + 50.0 * j as f64 / 100_000.0)
                .map(|s| s * t - lm.value(s).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((e.value - grid).abs() < 1e-6, "t={t}: {} vs {grid}", e.value);
            assert!(e.s_star <= 0.0 && !e.bracket_capped);
        }
    }

    #[test]
    fn mdep_exponent() {
        let (f, a) = fig5();
        let e = outage_exponent_mdep(&f, &a, 5, 1, 0.8, 0.3).unwrap();
        assert!((e.value - 0.070_955).abs() < 1e-5);
        assert!(e.s_star < 0.0);
        let ind = outage_exponent_indep(&f, &a, 5, 0.3).unwrap();
        let z = outage_exponent_mdep(&f, &a, 5, 1, 0.0, 0.3).unwrap();
        assert!((z.value - ind.gaussian_bound).abs() < 1e-15);
    }

    #[test]
    fn y_cdf_has_atom_and_limits() {
        let (_, a) = fig5();
        let w = block_weights(&a, 5).unwrap();
        assert!((y_cdf_rayleigh(&w, 1.0, 0.0) - w.w0()).abs() < 1e-15);
        assert!(y_cdf_rayleigh(&w, 1.0, 100.0) > 1.0 - 1e-12);
        assert_eq!(y_quantile_rayleigh(&w, 1.0, 1e-3), 0.0);
        let nv = block_weights(&AttackModel::NeverAttack, 2).unwrap();
        let q = y_quantile_rayleigh(&nv, 1.0, 0.3);
        assert!((y_cdf_rayleigh(&nv, 1.0, q) - 0.3).abs() < 1e-10);
    }
}
