//! Fading and attack models for a single dying channel.
//!
//! A frame spans `K` fading blocks. The attack time `T` is measured in block
//! lengths; blocks from the attack onward are lost, so `L = min(K, floor(T))`
//! blocks survive.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};

/// Distribution of the per-block power gain `alpha = |h|^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum FadingModel {
    /// Rayleigh amplitude, so the power gain is exponential with this rate.
    RayleighExp { rate: f64 },
    /// `log(alpha)` is standard normal.
    LogNormalStd,
    /// One gain drawn per frame and shared by every block.
    Identical(Box<FadingModel>),
}

impl FadingModel {
    pub fn rayleigh(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::domain(format!("fading rate must be positive, got {rate}")));
        }
        Ok(FadingModel::RayleighExp { rate })
    }

    /// Unit-mean Rayleigh fading.
    pub fn unit_rayleigh() -> Self {
        FadingModel::RayleighExp { rate: 1.0 }
    }

    pub fn identical(base: FadingModel) -> Self {
        match base {
            FadingModel::Identical(_) => base,
            other => FadingModel::Identical(Box::new(other)),
        }
    }

    pub fn is_identical(&self) -> bool {
        matches!(self, FadingModel::Identical(_))
    }

    /// The per-block marginal model.
    pub fn marginal(&self) -> &FadingModel {
        match self {
            FadingModel::Identical(base) => base.marginal(),
            other => other,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 0.0;
        }
        match self.marginal() {
            FadingModel::RayleighExp { rate } => -(-rate * x).exp_m1(),
            FadingModel::LogNormalStd => crate::special::norm_cdf(x.ln()),
            FadingModel::Identical(_) => unreachable!(),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.marginal() {
            FadingModel::RayleighExp { rate } => 1.0 / rate,
            FadingModel::LogNormalStd => 0.5f64.exp(),
            FadingModel::Identical(_) => unreachable!(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.marginal() {
            FadingModel::RayleighExp { rate } => 1.0 / (rate * rate),
            FadingModel::LogNormalStd => (1f64.exp() - 1.0) * 1f64.exp(),
            FadingModel::Identical(_) => unreachable!(),
        }
    }

    /// Moment generating function `E[exp(s alpha)]`. Closed form only for
    /// exponential gains, where it requires `s < rate`.
    pub fn mgf(&self, s: f64) -> Result<f64> {
        match self {
            FadingModel::RayleighExp { rate } => {
                if s >= *rate {
                    return Err(Error::domain(format!("mgf needs s < {rate}, got {s}")));
                }
                Ok(1.0 / (1.0 - s / rate))
            }
            _ => Err(Error::unsupported("mgf is available for i.i.d. Rayleigh fading only")),
        }
    }

    /// Derivative of [`FadingModel::mgf`] in `s`.
    pub fn mgf_derivative(&self, s: f64) -> Result<f64> {
        match self {
            FadingModel::RayleighExp { rate } => {
                if s >= *rate {
                    return Err(Error::domain(format!("mgf needs s < {rate}, got {s}")));
                }
                let d = 1.0 - s / rate;
                Ok(1.0 / (rate * d * d))
            }
            _ => Err(Error::unsupported("mgf is available for i.i.d. Rayleigh fading only")),
        }
    }

    /// One draw from the marginal.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.marginal() {
            FadingModel::RayleighExp { rate } => {
                let e: f64 = rng.sample(Exp1);
                e / rate
            }
            FadingModel::LogNormalStd => {
                let z: f64 = rng.sample(StandardNormal);
                z.exp()
            }
            FadingModel::Identical(_) => unreachable!(),
        }
    }

    /// Fill `out` with the gains of one frame (i.i.d., or one shared draw for
    /// [`FadingModel::Identical`]).
    pub fn fill_frame<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        if self.is_identical() {
            let g = self.sample_one(rng);
            out.iter_mut().for_each(|x| *x = g);
        } else {
            out.iter_mut().for_each(|x| *x = self.sample_one(rng));
        }
    }
}

/// Piecewise-constant, right-continuous attack-time CDF.
///
/// `G(t)` equals the value of the last breakpoint at or before `t` and 0
/// before the first one. Mass missing at the last breakpoint sits at
/// `T = infinity` (no attack).
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Model("empirical CDF needs at least one point".into()));
        }
        let mut prev_t = 0.0;
        let mut prev_g = 0.0;
        for &(t, g) in points {
            if !(t.is_finite() && t > prev_t) {
                return Err(Error::Model(format!(
                    "empirical CDF times must be positive and strictly increasing, got {t}"
                )));
            }
            if !(g.is_finite() && (prev_g..=1.0).contains(&g)) {
                return Err(Error::Model(format!("empirical CDF values must be non-decreasing in [0, 1], got {g}")));
            }
            prev_t = t;
            prev_g = g;
        }
        Ok(EmpiricalCdf { times: points.iter().map(|p| p.0).collect(), values: points.iter().map(|p| p.1).collect() })
    }

    /// Unit mass at `t`.
    pub fn point_mass(t: f64) -> Result<Self> {
        Self::new(&[(t, 1.0)])
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self.times.partition_point(|&x| x <= t) {
            0 => 0.0,
            i => self.values[i - 1],
        }
    }

    /// `inf { t : G(t) >= u }`, or infinity when the table never reaches `u`.
    fn quantile(&self, u: f64) -> f64 {
        match self.values.iter().position(|&g| g >= u) {
            Some(i) => self.times[i],
            None => f64::INFINITY,
        }
    }
}

/// Distribution of the attack time `T`, in block lengths.
#[derive(Debug, Clone, PartialEq)]
pub enum AttackModel {
    Exponential { rate: f64 },
    NeverAttack,
    Empirical(EmpiricalCdf),
}

impl AttackModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::domain(format!("attack rate must be positive, got {rate}")));
        }
        Ok(AttackModel::Exponential { rate })
    }

    /// Exponential attack with the given mean time `1/lambda`.
    pub fn with_mean(mean: f64) -> Result<Self> {
        Self::exponential(1.0 / mean)
    }

    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            AttackModel::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
            AttackModel::NeverAttack => 0.0,
            AttackModel::Empirical(table) => table.cdf(t),
        }
    }

    /// Attack time whose survival probability is `q`, i.e. `G^{-1}(1 - q)`.
    /// Working from the survival side keeps precision for long attack times.
    pub fn survival_quantile(&self, q: f64) -> f64 {
        match self {
            AttackModel::Exponential { rate } => {
                if q <= 0.0 {
                    f64::INFINITY
                } else {
                    -q.ln() / rate
                }
            }
            AttackModel::NeverAttack => f64::INFINITY,
            AttackModel::Empirical(table) => table.quantile(1.0 - q),
        }
    }

    pub fn sample_time<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            AttackModel::Exponential { rate } => {
                let e: f64 = rng.sample(Exp1);
                e / rate
            }
            AttackModel::NeverAttack => f64::INFINITY,
            AttackModel::Empirical(table) => {
                let u: f64 = rng.random();
                // u in [0, 1); inf{t: G(t) >= u} with u = 0 picks the first breakpoint.
                table.quantile(u.max(f64::MIN_POSITIVE))
            }
        }
    }
}

/// `L = min(K, floor(T))`.
pub fn surviving_from_time(t: f64, k: usize) -> usize {
    if t.is_nan() || t < 0.0 {
        return 0;
    }
    if t >= k as f64 {
        k
    } else {
        t.floor() as usize
    }
}

/// Probabilities of `i = 0..=K` surviving blocks: `w[i] = G(i+1) - G(i)` for
/// `i < K` and the no-attack tail `w[K] = 1 - G(K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w: Vec<f64>,
}

impl WeightVector {
    pub fn k(&self) -> usize {
        self.w.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn get(&self, i: usize) -> f64 {
        self.w[i]
    }

    /// Probability the attack lands in the first block.
    pub fn w0(&self) -> f64 {
        self.w[0]
    }

    /// Probability of no attack within `K` blocks.
    pub fn tail(&self) -> f64 {
        self.w[self.k()]
    }

    /// `P(L >= j)`.
    pub fn survival(&self, j: usize) -> f64 {
        self.w[j.min(self.w.len())..].iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.w.iter().enumerate().map(|(i, w)| i as f64 * w).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let m2: f64 = self.w.iter().enumerate().map(|(i, w)| (i * i) as f64 * w).sum();
        (m2 - m * m).max(0.0)
    }
}

pub fn block_weights(attack: &AttackModel, k: usize) -> Result<WeightVector> {
    if k == 0 {
        return Err(Error::precondition("coding length K must be at least 1"));
    }
    let w: Vec<f64> = match attack {
        AttackModel::Exponential { rate } => {
            let c = -(-rate).exp_m1();
            (0..k).map(|i| (-rate * i as f64).exp() * c).chain(std::iter::once((-rate * k as f64).exp())).collect()
        }
        _ => {
            let g: Vec<f64> = (0..=k).map(|i| attack.cdf(i as f64)).collect();
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::Model("attack CDF returned a non-finite value".into()));
            }
            (0..k).map(|i| g[i + 1] - g[i]).chain(std::iter::once(1.0 - g[k])).collect()
        }
    };
    if w.iter().any(|x| !x.is_finite() || *x < -1e-15) {
        return Err(Error::Model("block weights are not a probability vector".into()));
    }
    Ok(WeightVector { w })
}

/// Exact mean and variance of the surviving block count `L`.
pub fn surviving_moments(attack: &AttackModel, k: usize) -> Result<(f64, f64)> {
    let w = block_weights(attack, k)?;
    Ok((w.mean(), w.variance()))
}

pub fn sample_surviving_blocks<R: Rng + ?Sized>(attack: &AttackModel, k: usize, rng: &mut R) -> usize {
    surviving_from_time(attack.sample_time(rng), k)
}

/// `n` gains from `model`. For [`FadingModel::Identical`] the buffer is one
/// frame and every entry is the same draw.
pub fn sample_fading<R: Rng + ?Sized>(model: &FadingModel, n: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n];
    model.fill_frame(rng, &mut out);
    out
}

/// Per-block transmit powers of one frame, with the average-power budget they
/// were allocated under.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVector {
    p: Vec<f64>,
    budget: f64,
}

impl PowerVector {
    /// Checks non-negativity and `sum(p) <= K * budget`.
    pub fn new(p: Vec<f64>, budget: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::precondition("power vector must have at least one block"));
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::domain("block powers must be finite and non-negative"));
        }
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(Error::domain(format!("power budget must be non-negative, got {budget}")));
        }
        let total: f64 = p.iter().sum();
        if total > p.len() as f64 * budget + 1e-9 {
            return Err(Error::precondition(format!(
                "power vector uses {total} but the budget allows {}",
                p.len() as f64 * budget
            )));
        }
        Ok(PowerVector { p, budget })
    }

    pub fn uniform(k: usize, power: f64) -> Result<Self> {
        Self::new(vec![power; k], power)
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }
}

/// Normalised mutual information of the first `L` blocks,
/// `(1/K) sum_{i<L} log(1 + alpha_i p_i)` in nats per channel use.
pub fn mutual_information(gains: &[f64], powers: &PowerVector, l: usize) -> Result<f64> {
    let k = powers.k();
    if l > k {
        return Err(Error::precondition(format!("L = {l} exceeds K = {k}")));
    }
    if gains.len() < l {
        return Err(Error::precondition(format!("need {l} gains, got {}", gains.len())));
    }
    if gains[..l].iter().any(|g| *g < 0.0 || g.is_nan()) {
        return Err(Error::domain("fading gains must be non-negative"));
    }
    Ok(mutual_information_unchecked(&gains[..l], powers.as_slice(), k))
}

#[inline]
pub(crate) fn mutual_information_unchecked(gains: &[f64], powers: &[f64], k: usize) -> f64 {
    gains.iter().zip(powers).map(|(a, p)| (a * p).ln_1p()).sum::<f64>() / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Oracle for the exponential weights: integrate the density over each
    // unit interval with Simpson's rule.
    fn integrated_weights(rate: f64, k: usize) -> Vec<f64> {
        let dens = |t: f64| rate * (-rate * t).exp();
        let mut w: Vec<f64> = (0..k)
            .map(|i| {
                let n = 2000;
                let h = 1.0 / n as f64;
                let a = i as f64;
                let mut s = dens(a) + dens(a + 1.0);
                for j in 1..n {
                    s += if j % 2 == 1 { 4.0 } else { 2.0 } * dens(a + j as f64 * h);
                }
                s * h / 3.0
            })
            .collect();
        w.push(1.0 - w.iter().sum::<f64>());
        w
    }

    #[test]
    fn exponential_weights_match_integration() {
        let w = block_weights(&AttackModel::exponential(0.2).unwrap(), 5).unwrap();
        let oracle = integrated_weights(0.2, 5);
        for (a, b) in w.as_slice().iter().zip(&oracle) {
            assert!(close(*a, *b, 1e-12), "{a} vs {b}");
        }
        let frozen = [0.181269, 0.148411, 0.121509, 0.099482, 0.081450, 0.367879];
        for (a, b) in w.as_slice().iter().zip(frozen) {
            assert!(close(*a, b, 1e-6));
        }
    }

    #[test]
    fn weights_single_block_and_never() {
        let w = block_weights(&AttackModel::exponential(0.1).unwrap(), 1).unwrap();
        assert!(close(w.get(0), 0.095163, 1e-6));
        assert!(close(w.get(1), 0.904837, 1e-6));
        let never = block_weights(&AttackModel::NeverAttack, 3).unwrap();
        assert_eq!(never.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
        assert!(block_weights(&AttackModel::NeverAttack, 0).is_err());
    }

    #[test]
    fn surviving_moment_examples() {
        let (m, v) = surviving_moments(&AttackModel::exponential(0.2).unwrap(), 5).unwrap();
        assert!(close(m, 2.855071, 1e-6));
        assert!(close(v, 3.878537, 1e-6));
        assert_eq!(surviving_moments(&AttackModel::NeverAttack, 5).unwrap(), (5.0, 0.0));
        let (m, v) = surviving_moments(&AttackModel::exponential(50.0).unwrap(), 5).unwrap();
        assert!(m < 1e-20 && v < 1e-20);
    }

    #[test]
    fn sampled_survivors() {
        let mut rng = RngStream::new(1, 0).generator();
        for _ in 0..100 {
            assert_eq!(sample_surviving_blocks(&AttackModel::NeverAttack, 4, &mut rng), 4);
        }
        let atom = AttackModel::Empirical(EmpiricalCdf::point_mass(2.5).unwrap());
        for _ in 0..100 {
            assert_eq!(sample_surviving_blocks(&atom, 5, &mut rng), 2);
        }
        let w = block_weights(&atom, 5).unwrap();
        assert_eq!(w.get(2), 1.0);
    }

    #[test]
    fn empirical_cdf_rules() {
        let t = EmpiricalCdf::new(&[(1.5, 0.25), (3.0, 0.75)]).unwrap();
        assert_eq!(t.cdf(0.0), 0.0);
        assert_eq!(t.cdf(1.5), 0.25);
        assert_eq!(t.cdf(2.9), 0.25);
        assert_eq!(t.cdf(10.0), 0.75);
        assert!(EmpiricalCdf::new(&[(0.0, 0.5)]).is_err());
        assert!(EmpiricalCdf::new(&[(1.0, 0.5), (2.0, 0.4)]).is_err());
        let a = AttackModel::Empirical(t);
        let w = block_weights(&a, 4).unwrap();
        assert!(close(w.as_slice().iter().sum::<f64>(), 1.0, 1e-12));
        assert_eq!(w.tail(), 0.25);
    }

    #[test]
    fn mutual_information_examples() {
        let one = PowerVector::uniform(1, 1.0).unwrap();
        let mi = mutual_information(&[std::f64::consts::E - 1.0], &one, 1).unwrap();
        assert!(close(mi, 1.0, 1e-15));
        let p = PowerVector::new(vec![3.0, 1.0], 2.0).unwrap();
        assert_eq!(mutual_information(&[1.0, 1.0], &p, 0).unwrap(), 0.0);
        let mi = mutual_information(&[1.0, 1.0], &p, 2).unwrap();
        assert!(close(mi, 1.039721, 1e-6));
        assert!(matches!(mutual_information(&[-1.0, 1.0], &p, 2), Err(Error::Domain(_))));
        assert!(PowerVector::new(vec![-1.0], 1.0).is_err());
        assert!(PowerVector::new(vec![3.0, 2.0], 2.0).is_err());
    }

    #[test]
    fn fading_closed_forms() {
        let r = FadingModel::rayleigh(2.0).unwrap();
        assert_eq!(r.mean(), 0.5);
        assert_eq!(r.variance(), 0.25);
        assert_eq!(r.cdf(0.0), 0.0);
        assert!(close(r.mgf(1.0).unwrap(), 2.0, 1e-15));
        assert!(r.mgf(2.0).is_err());
        let ln = FadingModel::LogNormalStd;
        assert!(close(ln.cdf(1.0), 0.5, 1e-15));
        assert!(ln.mgf(-1.0).is_err());
    }

    fn sample_mean_var(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        (m, v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0))
    }

    #[test]
    fn rayleigh_samples_match_moments() {
        let mut rng = RngStream::new(11, 0).generator();
        let f = FadingModel::unit_rayleigh();
        let v = sample_fading(&f, 1_000_000, &mut rng);
        let (m, var) = sample_mean_var(&v);
        assert!((0.997..=1.003).contains(&m), "mean {m}");
        // var of the sample variance for Exp(1) is (mu4 - sigma^4)/n = 8/n
        assert!((var - 1.0).abs() < 3.0 * (8.0f64 / 1e6).sqrt());
    }

    #[test]
    fn lognormal_median_is_one() {
        let mut rng = RngStream::new(12, 0).generator();
        let mut v = sample_fading(&FadingModel::LogNormalStd, 1_000_000, &mut rng);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = v[v.len() / 2];
        assert!((0.99..=1.01).contains(&med), "median {med}");
    }

    #[test]
    fn identical_frame_shares_gain() {
        let mut rng = RngStream::new(13, 0).generator();
        let f = FadingModel::identical(FadingModel::unit_rayleigh());
        let v = sample_fading(&f, 4, &mut rng);
        assert!(v.iter().all(|x| *x == v[0]));
    }

    #[test]
    fn survivor_histogram_chi_square() {
        let attack = AttackModel::exponential(0.2).unwrap();
        let w = block_weights(&attack, 5).unwrap();
        let stream = RngStream::new(21, 0);
        let n = 1_000_000u64;
        let mut counts = [0u64; 6];
        let mut rng = stream.generator();
        for _ in 0..n {
            counts[sample_surviving_blocks(&attack, 5, &mut rng)] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(w.as_slice())
            .map(|(&c, &p)| {
                let e = p * n as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        // chi-square(5) upper 0.001 quantile
        assert!(chi2 < 20.515, "chi2 = {chi2}");
        let mean = counts.iter().enumerate().map(|(i, c)| i as f64 * *c as f64).sum::<f64>() / n as f64;
        let se = (w.variance() / n as f64).sqrt();
        assert!((mean - 2.85507).abs() < 3.0 * se);
    }

    proptest! {
        #[test]
        fn weights_normalised(rate in 1e-3f64..20.0, k in 1usize..40) {
            let w = block_weights(&AttackModel::exponential(rate).unwrap(), k).unwrap();
            prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn empirical_weights_normalised(a in 0.1f64..3.0, b in 0.1f64..3.0, g in 0.0f64..1.0, k in 1usize..8) {
            let t = EmpiricalCdf::new(&[(a, g), (a + b, 1.0)]).unwrap();
            let w = block_weights(&AttackModel::Empirical(t), k).unwrap();
            prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn cdf_monotone(x in 0.0f64..50.0, dx in 0.0f64..5.0) {
            for f in [FadingModel::unit_rayleigh(), FadingModel::LogNormalStd] {
                prop_assert!(f.cdf(x) <= f.cdf(x + dx));
            }
            let a = AttackModel::exponential(0.3).unwrap();
            prop_assert!(a.cdf(x) <= a.cdf(x + dx));
        }

        #[test]
        fn mutual_information_monotone(
            g in proptest::collection::vec(0.0f64..10.0, 4),
            p in proptest::collection::vec(0.0f64..10.0, 4),
            bump in 0.0f64..3.0,
            idx in 0usize..4,
            l in 0usize..4,
        ) {
            let pv = PowerVector::new(p.clone(), 10.0).unwrap();
            let base = mutual_information(&g, &pv, l).unwrap();
            let mut g2 = g.clone();
            g2[idx] += bump;
            prop_assert!(mutual_information(&g2, &pv, l).unwrap() >= base);
            let mut p2 = p.clone();
            p2[idx] += bump;
            let pv2 = PowerVector::new(p2, 20.0).unwrap();
            prop_assert!(mutual_information(&g, &pv2, l).unwrap() >= base);
            prop_assert!(mutual_information(&g, &pv, l + 1).unwrap() >= base);
        }

        #[test]
        fn deterministic_streams(seed in any::<u64>(), id in any::<u64>()) {
            let f = FadingModel::unit_rayleigh();
            let a = AttackModel::exponential(0.2).unwrap();
            let mut r1 = RngStream::new(seed, id).trial(3);
            let mut r2 = RngStream::new(seed, id).trial(3);
            prop_assert_eq!(sample_fading(&f, 8, &mut r1), sample_fading(&f, 8, &mut r2));
            prop_assert_eq!(sample_surviving_blocks(&a, 5, &mut r1), sample_surviving_blocks(&a, 5, &mut r2));
        }
    }
}
