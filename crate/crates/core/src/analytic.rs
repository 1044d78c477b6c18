//! Closed-form outage quantities for one dying channel under uniform power.

use crate::channel::{block_weights, AttackModel, FadingModel, WeightVector};
use crate::error::{Error, Result};

/// Smallest power (linear) for which the high-SNR expressions are considered
/// trustworthy; callers may warn below it.
pub const HIGH_SNR_MIN_POWER: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SingleChannelConfig {
    pub k: usize,
    /// Target rate in nats per channel use.
    pub rate: f64,
    /// Average power per block, linear scale.
    pub power: f64,
    pub fading: FadingModel,
    pub attack: AttackModel,
}

impl SingleChannelConfig {
    pub fn new(k: usize, rate: f64, power: f64, fading: FadingModel, attack: AttackModel) -> Result<Self> {
        if k == 0 {
            return Err(Error::precondition("coding length K must be at least 1"));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::precondition(format!("rate must be positive, got {rate}")));
        }
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::precondition(format!("power must be positive, got {power}")));
        }
        Ok(SingleChannelConfig { k, rate, power, fading, attack })
    }

    pub fn with_k(&self, k: usize) -> Result<Self> {
        Self::new(k, self.rate, self.power, self.fading.clone(), self.attack.clone())
    }

    pub fn with_rate(&self, rate: f64) -> Result<Self> {
        Self::new(self.k, rate, self.power, self.fading.clone(), self.attack.clone())
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.k, self.rate, power, self.fading.clone(), self.attack.clone())
    }

    pub fn weights(&self) -> Result<WeightVector> {
        block_weights(&self.attack, self.k)
    }
}

fn iid_only(cfg: &SingleChannelConfig) -> Result<()> {
    if cfg.fading.is_identical() {
        return Err(Error::unsupported("outage bounds assume i.i.d. block fading"));
    }
    Ok(())
}

/// `F((e^x - 1)/P)`, saturating when the exponent overflows.
fn block_outage(fading: &FadingModel, x: f64, power: f64) -> f64 {
    fading.cdf(x.exp_m1() / power)
}

/// Lower bound from splitting the rate evenly over the surviving blocks.
pub fn outage_lower_bound(cfg: &SingleChannelConfig) -> Result<f64> {
    iid_only(cfg)?;
    let w = cfg.weights()?;
    let k = cfg.k;
    let kr = k as f64 * cfg.rate;
    let mut p = w.w0();
    for i in 1..k {
        p += block_outage(&cfg.fading, kr / i as f64, cfg.power).powi(i as i32) * w.get(i);
    }
    p += block_outage(&cfg.fading, cfg.rate, cfg.power).powi(k as i32) * w.tail();
    Ok(p.clamp(0.0, 1.0))
}

/// Upper bound requiring every surviving block to fail on its own.
pub fn outage_upper_bound(cfg: &SingleChannelConfig) -> Result<f64> {
    iid_only(cfg)?;
    let w = cfg.weights()?;
    let k = cfg.k;
    let f = block_outage(&cfg.fading, k as f64 * cfg.rate, cfg.power);
    let mut p = w.w0();
    for i in 1..k {
        p += f.powi(i as i32) * w.get(i);
    }
    p += f.powi(k as i32) * w.tail();
    Ok(p.clamp(0.0, 1.0))
}

/// Exact outage for a single-block codeword.
pub fn exact_outage_k1(cfg: &SingleChannelConfig) -> Result<f64> {
    if cfg.k != 1 {
        return Err(Error::precondition(format!("exact outage needs K = 1, got {}", cfg.k)));
    }
    let w = cfg.weights()?;
    Ok(w.w0() + block_outage(&cfg.fading, cfg.rate, cfg.power) * w.tail())
}

/// Parameters of the high-SNR Rayleigh approximation for a given attack rate.
#[derive(Debug, Clone, Copy, PartialEq)]
struct HighSnrTerms {
    lambda: f64,
    /// Power scaled by the mean gain, so the tail `P(alpha < y) ~ y/mean`
    /// matches the unit-mean case.
    power: f64,
    rate: f64,
    beta: f64,
    c: f64,
    xi: f64,
}

impl HighSnrTerms {
    fn from_config(cfg: &SingleChannelConfig) -> Result<Self> {
        let mean_gain = match &cfg.fading {
            FadingModel::RayleighExp { rate } => 1.0 / rate,
            _ => return Err(Error::unsupported("high-SNR approximation needs i.i.d. Rayleigh fading")),
        };
        let lambda = match &cfg.attack {
            AttackModel::Exponential { rate } => *rate,
            _ => return Err(Error::unsupported("high-SNR approximation needs an exponential attack")),
        };
        let power = cfg.power * mean_gain;
        let beta = (-lambda).exp();
        let c = -(-lambda).exp_m1();
        let ratio = beta / power;
        if ratio >= 1.0 {
            return Err(Error::domain(format!("high-SNR approximation needs P > e^-lambda, got P = {}", cfg.power)));
        }
        Ok(HighSnrTerms { lambda, power, rate: cfg.rate, beta, c, xi: c * ratio / (1.0 - ratio) })
    }

    fn w0(&self) -> f64 {
        self.c
    }

    /// `xi e^{KR} + (P e^{lambda - R})^{-K} + w0`, valid for `K >= 2`.
    fn approx(&self, k: f64) -> f64 {
        self.xi * (k * self.rate).exp() + (-k * (self.power.ln() + self.lambda - self.rate)).exp() + self.w0()
    }

    /// Full geometric sum before the `K >= 2` simplification.
    fn geometric(&self, k: usize) -> f64 {
        let kf = k as f64;
        let ratio = self.beta / self.power;
        let head = (kf * self.rate).exp() * self.c * (ratio - ratio.powi(k as i32)) / (1.0 - ratio);
        let tail = (-kf * (self.power.ln() + self.lambda - self.rate)).exp();
        head + tail + self.w0()
    }
}

/// High-SNR Rayleigh outage approximation, treated as a function of `K`.
pub fn high_snr_outage(cfg: &SingleChannelConfig) -> Result<f64> {
    Ok(HighSnrTerms::from_config(cfg)?.approx(cfg.k as f64))
}

/// Same approximation at real-valued `K`.
pub fn high_snr_outage_real(cfg: &SingleChannelConfig, k: f64) -> Result<f64> {
    Ok(HighSnrTerms::from_config(cfg)?.approx(k))
}

/// High-SNR outage before dropping `(beta/P)^K`; equals [`high_snr_outage`]
/// up to that term and is the correct form at `K = 1`.
pub fn high_snr_outage_geometric(cfg: &SingleChannelConfig) -> Result<f64> {
    Ok(HighSnrTerms::from_config(cfg)?.geometric(cfg.k))
}

/// Objective used for the integer choice of `K`: the geometric form at
/// `K = 1`, the simplified approximation otherwise.
pub fn high_snr_objective(cfg: &SingleChannelConfig, k: usize) -> Result<f64> {
    let t = HighSnrTerms::from_config(cfg)?;
    Ok(if k <= 1 { t.geometric(1) } else { t.approx(k as f64) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HighSnrSummary {
    pub beta: f64,
    pub c: f64,
    pub xi: f64,
    /// Stationary point of the real-`K` approximation (NaN when there is none).
    pub k_real: f64,
    pub k_int: usize,
    /// False when the approximation has no interior minimum; `k_int` is then 1.
    pub interior: bool,
}

/// Optimal coding length in the high-SNR Rayleigh regime.
pub fn optimal_k_high_snr(cfg: &SingleChannelConfig) -> Result<HighSnrSummary> {
    let t = HighSnrTerms::from_config(cfg)?;
    let slope = t.lambda + t.power.ln() - t.rate;
    let arg = slope / (t.xi * t.rate);
    let mut out = HighSnrSummary { beta: t.beta, c: t.c, xi: t.xi, k_real: f64::NAN, k_int: 1, interior: false };
    if !(slope > 0.0 && arg > 1.0) {
        return Ok(out);
    }
    let k_real = arg.ln() / (t.lambda + t.power.ln());
    out.k_real = k_real;
    out.interior = true;
    let lo = (k_real.floor() as usize).max(1);
    let hi = (k_real.ceil() as usize).max(1);
    let obj = |k: usize| if k == 1 { t.geometric(1) } else { t.approx(k as f64) };
    // ties go to the shorter code
    out.k_int = if obj(hi) < obj(lo) { hi } else { lo };
    Ok(out)
}

/// Threshold `K R / P` on the sum of surviving gains shared by parallel
/// coding and repetition at low SNR.
pub fn low_snr_threshold(cfg: &SingleChannelConfig) -> f64 {
    cfg.k as f64 * cfg.rate / cfg.power
}
