//! Direct simulation of the outage events.
//!
//! Trials are split into fixed-size chunks on a rayon pool. Each trial draws
//! from its own counter-based stream and chunk results are combined in chunk
//! order, so estimates are bit-identical for any worker count.

use std::ops::Range;

use rayon::prelude::*;

use crate::analytic::SingleChannelConfig;
use crate::channel::{
    block_weights, mutual_information_unchecked, sample_surviving_blocks, AttackModel, FadingModel, PowerVector,
};
use crate::copula::{calibrate, CopulaCalibration, MDependentSampler};
use crate::error::{Error, Result};
use crate::parallel::ParallelConfig;
use crate::rng::{streams, RngStream};

pub const MIN_TRIALS: u64 = 10_000;
pub const DEFAULT_TRIALS: u64 = 100_000;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "DCL_THREADS";

/// Realized neighbour correlation must land this close to the target.
pub const REALIZED_CORR_TOL: f64 = 0.05;

const CHUNK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McOptions {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` reads `DCL_THREADS`, then uses every core.
    pub threads: Option<usize>,
}

impl McOptions {
    pub fn new(trials: u64, seed: u64) -> Self {
        McOptions { trials, seed, threads: None }
    }

    pub fn with_threads(self, threads: usize) -> Self {
        McOptions { threads: Some(threads), ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        McOptions { seed, ..self }
    }

    fn check(&self) -> Result<()> {
        if self.trials < MIN_TRIALS {
            return Err(Error::precondition(format!("need at least {MIN_TRIALS} trials, got {}", self.trials)));
        }
        if self.threads == Some(0) {
            return Err(Error::precondition("thread count must be positive"));
        }
        Ok(())
    }

    fn worker_count(&self) -> Result<usize> {
        if let Some(t) = self.threads {
            return Ok(t);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(Error::precondition(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
            },
            Err(_) => Ok(0),
        }
    }
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions::new(DEFAULT_TRIALS, 1)
    }
}

/// Run `f` over trial-index chunks and return the per-chunk results in order.
fn run_chunks<T, F>(opts: &McOptions, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    opts.check()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.worker_count()?)
        .build()
        .map_err(|e| Error::precondition(format!("cannot start worker pool: {e}")))?;
    let n = opts.trials;
    let chunks = n.div_ceil(CHUNK);
    Ok(pool.install(|| (0..chunks).into_par_iter().map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n))).collect()))
}

fn count_events<F>(opts: &McOptions, f: F) -> Result<u64>
where
    F: Fn(Range<u64>) -> u64 + Sync + Send,
{
    Ok(run_chunks(opts, f)?.into_iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p (1-p) / n)`.
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub outages: u64,
}

impl OutageEstimate {
    pub fn from_count(outages: u64, trials: u64, seed: u64) -> Self {
        let p = outages as f64 / trials as f64;
        OutageEstimate { p_hat: p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), trials, seed, outages }
    }

    /// Standard error of the difference of two independent estimates.
    pub fn combined_stderr(&self, other: &OutageEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }

    /// Two-proportion z statistic using the pooled proportion.
    pub fn z_statistic(&self, other: &OutageEstimate) -> f64 {
        let n1 = self.trials as f64;
        let n2 = other.trials as f64;
        let pool = (self.outages + other.outages) as f64 / (n1 + n2);
        let se = (pool * (1.0 - pool) * (1.0 / n1 + 1.0 / n2)).sqrt();
        if se == 0.0 {
            0.0
        } else {
            (self.p_hat - other.p_hat) / se
        }
    }
}

/// Outage of one dying channel with the given block powers.
pub fn estimate_outage_single(
    cfg: &SingleChannelConfig,
    power: &PowerVector,
    opts: &McOptions,
) -> Result<OutageEstimate> {
    estimate_outage_with_stream(cfg, power, opts, streams::SINGLE)
}

pub(crate) fn estimate_outage_with_stream(
    cfg: &SingleChannelConfig,
    power: &PowerVector,
    opts: &McOptions,
    stream_id: u64,
) -> Result<OutageEstimate> {
    let k = cfg.k;
    if power.k() != k {
        return Err(Error::precondition(format!("power vector has {} blocks, K = {k}", power.k())));
    }
    if power.total() > k as f64 * cfg.power + 1e-9 {
        return Err(Error::precondition(format!(
            "power vector uses {} but the budget allows {}",
            power.total(),
            k as f64 * cfg.power
        )));
    }
    let stream = RngStream::new(opts.seed, stream_id);
    let p = power.as_slice();
    let hits = count_events(opts, |range| {
        let mut gains = vec![0.0; k];
        let mut c = 0;
        for i in range {
            let mut rng = stream.trial(i);
            let l = sample_surviving_blocks(&cfg.attack, k, &mut rng);
            cfg.fading.fill_frame(&mut rng, &mut gains);
            if mutual_information_unchecked(&gains[..l], p, k) < cfg.rate {
                c += 1;
            }
        }
        c
    })?;
    Ok(OutageEstimate::from_count(hits, opts.trials, opts.seed))
}

/// Whether `N` sub-channels with the given surviving counts carry less than
/// the target rate at power `P/N` each. `gains` is scratch of length `K`.
fn parallel_outage<R: rand::Rng>(pcfg: &ParallelConfig, surviving: &[usize], gains: &mut [f64], rng: &mut R) -> bool {
    let q = pcfg.per_channel_power();
    let k = pcfg.k;
    let mut total = 0.0;
    for &l in surviving {
        pcfg.fading.fill_frame(rng, gains);
        total += gains[..l].iter().map(|a| (a * q).ln_1p()).sum::<f64>();
    }
    total / (k as f64) < pcfg.rate
}

/// Outage of `N` parallel sub-channels with independent attacks. The
/// dependence fields of `pcfg` are ignored.
pub fn estimate_outage_parallel(pcfg: &ParallelConfig, opts: &McOptions) -> Result<OutageEstimate> {
    let stream = RngStream::new(opts.seed, streams::PARALLEL);
    let (n, k) = (pcfg.n, pcfg.k);
    let hits = count_events(opts, |range| {
        let mut gains = vec![0.0; k];
        let mut surv = vec![0usize; n];
        let mut c = 0;
        for i in range {
            let mut rng = stream.trial(i);
            for l in surv.iter_mut() {
                *l = sample_surviving_blocks(&pcfg.attack, k, &mut rng);
            }
            if parallel_outage(pcfg, &surv, &mut gains, &mut rng) {
                c += 1;
            }
        }
        c
    })?;
    Ok(OutageEstimate::from_count(hits, opts.trials, opts.seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MDependentEstimate {
    pub estimate: OutageEstimate,
    pub calibration: CopulaCalibration,
    /// Sample correlation of neighbouring surviving counts over all trials.
    pub realized_corr: f64,
    /// `realized_corr` is within [`REALIZED_CORR_TOL`] of the target.
    pub corr_ok: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct PairSums {
    hits: u64,
    s1: u64,
    s2: u64,
    a: u64,
    b: u64,
    aa: u64,
    bb: u64,
    ab: u64,
    pairs: u64,
}

/// Outage of `N` parallel sub-channels with m-dependent attacks drawn from
/// the calibrated Gaussian copula.
pub fn estimate_outage_parallel_mdep(pcfg: &ParallelConfig, opts: &McOptions) -> Result<MDependentEstimate> {
    if pcfg.m == 0 {
        return Err(Error::precondition("m-dependent simulation needs m >= 1"));
    }
    let cal = calibrate(&pcfg.attack, pcfg.k, pcfg.m, pcfg.rho)?;
    let sampler = MDependentSampler::new(pcfg.n, pcfg.m, cal.latent)?;
    let stream = RngStream::new(opts.seed, streams::PARALLEL_MDEP);
    let (n, k) = (pcfg.n, pcfg.k);
    let parts = run_chunks(opts, |range| {
        let mut gains = vec![0.0; k];
        let mut surv = vec![0usize; n];
        let (mut eps, mut z) = (vec![0.0; n], vec![0.0; n]);
        let mut s = PairSums::default();
        for i in range {
            let mut rng = stream.trial(i);
            sampler.surviving(&pcfg.attack, k, &mut rng, &mut eps, &mut z, &mut surv);
            for l in &surv {
                s.s1 += *l as u64;
                s.s2 += (*l * *l) as u64;
            }
            for w in surv.windows(2) {
                let (a, b) = (w[0] as u64, w[1] as u64);
                s.a += a;
                s.b += b;
                s.aa += a * a;
                s.bb += b * b;
                s.ab += a * b;
                s.pairs += 1;
            }
            if parallel_outage(pcfg, &surv, &mut gains, &mut rng) {
                s.hits += 1;
            }
        }
        s
    })?;
    let t = parts.into_iter().fold(PairSums::default(), |mut t, s| {
        t.hits += s.hits;
        t.s1 += s.s1;
        t.s2 += s.s2;
        t.a += s.a;
        t.b += s.b;
        t.aa += s.aa;
        t.bb += s.bb;
        t.ab += s.ab;
        t.pairs += s.pairs;
        t
    });
    let realized = if t.pairs == 0 {
        f64::NAN
    } else {
        let np = t.pairs as f64;
        let (ma, mb) = (t.a as f64 / np, t.b as f64 / np);
        let cov = t.ab as f64 / np - ma * mb;
        let va = t.aa as f64 / np - ma * ma;
        let vb = t.bb as f64 / np - mb * mb;
        if va > 0.0 && vb > 0.0 {
            cov / (va * vb).sqrt()
        } else {
            0.0
        }
    };
    Ok(MDependentEstimate {
        estimate: OutageEstimate::from_count(t.hits, opts.trials, opts.seed),
        calibration: cal,
        realized_corr: realized,
        corr_ok: (realized - pcfg.rho).abs() <= REALIZED_CORR_TOL,
    })
}

/// Sample mean and variance of the per-sub-channel throughput
/// `Y = (1/K) sum_{k <= L} alpha_k`, one draw per trial.
pub fn sample_throughput_moments(
    fading: &FadingModel,
    attack: &AttackModel,
    k: usize,
    opts: &McOptions,
) -> Result<(f64, f64)> {
    let stream = RngStream::new(opts.seed, streams::THROUGHPUT);
    let parts = run_chunks(opts, |range| {
        let mut gains = vec![0.0; k];
        let (mut s, mut s2) = (0.0, 0.0);
        for i in range {
            let mut rng = stream.trial(i);
            let l = sample_surviving_blocks(attack, k, &mut rng);
            fading.fill_frame(&mut rng, &mut gains);
            let y = gains[..l].iter().sum::<f64>() / k as f64;
            s += y;
            s2 += y * y;
        }
        (s, s2)
    })?;
    let (s, s2) = parts.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = opts.trials as f64;
    let mean = s / n;
    Ok((mean, (s2 / n - mean * mean) * n / (n - 1.0)))
}

/// Outage at one `(K, R)` point together with the power vector used.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub outage: f64,
    pub power: Option<PowerVector>,
}

/// Outage as a function of coding length and rate, for capacity search.
pub trait OutageEvaluator: Sync {
    /// Average power budget.
    fn budget(&self) -> f64;
    fn fading(&self) -> &FadingModel;
    fn attack(&self) -> &AttackModel;
    fn evaluate(&self, k: usize, rate: f64) -> Result<Evaluation>;
}

/// Uniform power `P` on every block, outage by Monte Carlo.
#[derive(Debug, Clone)]
pub struct UniformMc {
    pub fading: FadingModel,
    pub attack: AttackModel,
    pub power: f64,
    pub opts: McOptions,
}

impl OutageEvaluator for UniformMc {
    fn budget(&self) -> f64 {
        self.power
    }

    fn fading(&self) -> &FadingModel {
        &self.fading
    }

    fn attack(&self) -> &AttackModel {
        &self.attack
    }

    fn evaluate(&self, k: usize, rate: f64) -> Result<Evaluation> {
        let cfg = SingleChannelConfig::new(k, rate, self.power, self.fading.clone(), self.attack.clone())?;
        let p = PowerVector::uniform(k, self.power)?;
        let e = estimate_outage_single(&cfg, &p, &self.opts)?;
        Ok(Evaluation { outage: e.p_hat, power: Some(p) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Largest rate meeting the outage target, maximised over `K`.
    pub c_out: f64,
    pub k_star: usize,
    /// Power vector at the optimum (absent when the capacity is zero).
    pub power: Option<PowerVector>,
    pub eta: f64,
    /// Capacity for each `K = 1..=K_max`.
    pub per_k: Vec<f64>,
    /// The search stopped at the rate cap for the winning `K`.
    pub hit_cap: bool,
    /// No positive rate meets the target.
    pub zero_capacity: bool,
}

/// Rate cap for the bisection at coding length `K`.
pub fn rate_cap(k: usize, mean_gain: f64, power: f64) -> f64 {
    k as f64 * (mean_gain * power * 10.0).ln_1p()
}

struct PerK {
    rate: f64,
    hit_cap: bool,
    power: Option<PowerVector>,
}

fn capacity_for_k(ev: &dyn OutageEvaluator, k: usize, eta: f64, tol: f64) -> Result<PerK> {
    let zero = PerK { rate: 0.0, hit_cap: false, power: None };
    // outage never drops below the first-block attack probability
    if eta <= block_weights(ev.attack(), k)?.w0() {
        return Ok(zero);
    }
    let hi_cap = rate_cap(k, ev.fading().mean(), ev.budget());
    if eta >= 1.0 {
        // vacuous constraint: every rate qualifies
        return Ok(PerK { rate: hi_cap, hit_cap: true, power: ev.evaluate(k, hi_cap)?.power });
    }
    let top = ev.evaluate(k, hi_cap)?;
    if top.outage < eta {
        return Ok(PerK { rate: hi_cap, hit_cap: true, power: top.power });
    }
    let first = ev.evaluate(k, tol)?;
    if first.outage >= eta {
        return Ok(zero);
    }
    let (mut lo, mut hi) = (tol, hi_cap);
    let mut best = first.power;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let e = ev.evaluate(k, mid)?;
        if e.outage < eta {
            lo = mid;
            best = e.power;
        } else {
            hi = mid;
        }
    }
    Ok(PerK { rate: lo, hit_cap: false, power: best })
}

/// Outage capacity: for each `K <= K_max`, bisect on `R` for the largest rate
/// with outage below `eta`, then maximise over `K` (ties go to smaller `K`).
pub fn outage_capacity_search(ev: &dyn OutageEvaluator, eta: f64, k_max: usize, tol: f64) -> Result<CapacityResult> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::precondition(format!("outage target must lie in (0, 1], got {eta}")));
    }
    if k_max == 0 {
        return Err(Error::precondition("K_max must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::precondition(format!("rate tolerance must be positive, got {tol}")));
    }
    let mut per_k = Vec::with_capacity(k_max);
    let mut best: Option<(usize, PerK)> = None;
    for k in 1..=k_max {
        let r = capacity_for_k(ev, k, eta, tol)?;
        per_k.push(r.rate);
        if best.as_ref().is_none_or(|(_, b)| r.rate > b.rate) {
            best = Some((k, r));
        }
    }
    let (k_star, b) = best.expect("k_max >= 1");
    Ok(CapacityResult {
        c_out: b.rate,
        k_star,
        zero_capacity: b.rate == 0.0,
        power: b.power,
        eta,
        per_k,
        hit_cap: b.hit_cap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionCheck {
    /// Separate coding over the blocks.
    pub p_parallel: f64,
    /// Repetition of one codeword, combining the surviving gains.
    pub p_repetition: f64,
    /// `P(sum of surviving gains < K R / P)`, the shared low-SNR limit.
    pub p_threshold: f64,
    pub trials: u64,
}

impl RepetitionCheck {
    pub fn gap(&self) -> f64 {
        (self.p_parallel - self.p_repetition).abs()
    }
}

/// Parallel coding versus repetition on the same draws. The two agree at low
/// SNR and separate at high SNR.
pub fn repetition_equivalence_check(cfg: &SingleChannelConfig, opts: &McOptions) -> Result<RepetitionCheck> {
    if cfg.fading.is_identical() {
        return Err(Error::unsupported("repetition comparison assumes i.i.d. block fading"));
    }
    let stream = RngStream::new(opts.seed, streams::REPETITION);
    let k = cfg.k;
    let (p, r) = (cfg.power, cfg.rate);
    let threshold = crate::analytic::low_snr_threshold(cfg);
    let parts = run_chunks(opts, |range| {
        let mut gains = vec![0.0; k];
        let mut c = [0u64; 3];
        for i in range {
            let mut rng = stream.trial(i);
            let l = sample_surviving_blocks(&cfg.attack, k, &mut rng);
            cfg.fading.fill_frame(&mut rng, &mut gains);
            let g = &gains[..l];
            let par = g.iter().map(|a| (a * p).ln_1p()).sum::<f64>() / k as f64;
            let sum: f64 = g.iter().sum();
            let rep = (p * sum).ln_1p() / k as f64;
            c[0] += (par < r) as u64;
            c[1] += (rep < r) as u64;
            c[2] += (sum < threshold) as u64;
        }
        c
    })?;
    let c = parts.into_iter().fold([0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let n = opts.trials as f64;
    Ok(RepetitionCheck {
        p_parallel: c[0] as f64 / n,
        p_repetition: c[1] as f64 / n,
        p_threshold: c[2] as f64 / n,
        trials: opts.trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::exact_outage_k1;

    fn single(k: usize, rate: f64, power: f64, attack: AttackModel) -> SingleChannelConfig {
        SingleChannelConfig::new(k, rate, power, FadingModel::unit_rayleigh(), attack).unwrap()
    }

    #[test]
    fn k1_matches_closed_form() {
        let cfg = single(1, 1.0, 10.0, AttackModel::NeverAttack);
        let e =
            estimate_outage_single(&cfg, &PowerVector::uniform(1, 10.0).unwrap(), &McOptions::new(200_000, 5)).unwrap();
        let exact = exact_outage_k1(&cfg).unwrap();
        assert!((e.p_hat - exact).abs() < 3.0 * e.stderr, "{} vs {exact}", e.p_hat);
        assert!((e.stderr - (e.p_hat * (1.0 - e.p_hat) / 200_000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let cfg = single(3, 0.7, 5.0, AttackModel::with_mean(4.0).unwrap());
        let p = PowerVector::uniform(3, 5.0).unwrap();
        let a = estimate_outage_single(&cfg, &p, &McOptions::new(30_001, 9).with_threads(1)).unwrap();
        let b = estimate_outage_single(&cfg, &p, &McOptions::new(30_001, 9).with_threads(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn degenerate_powers_and_rates() {
        let cfg = single(2, 1.0, 3.0, AttackModel::with_mean(5.0).unwrap());
        let zero = PowerVector::new(vec![0.0, 0.0], 3.0).unwrap();
        assert_eq!(estimate_outage_single(&cfg, &zero, &McOptions::new(10_000, 1)).unwrap().p_hat, 1.0);
        let tiny = single(2, 1e-12, 3.0, AttackModel::NeverAttack);
        let e =
            estimate_outage_single(&tiny, &PowerVector::uniform(2, 3.0).unwrap(), &McOptions::new(10_000, 1)).unwrap();
        assert_eq!(e.p_hat, 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = single(2, 1.0, 3.0, AttackModel::NeverAttack);
        let over = PowerVector::new(vec![5.0, 5.0], 5.0).unwrap();
        assert!(matches!(estimate_outage_single(&cfg, &over, &McOptions::new(10_000, 1)), Err(Error::Precondition(_))));
        let p = PowerVector::uniform(2, 3.0).unwrap();
        assert!(estimate_outage_single(&cfg, &p, &McOptions::new(100, 1)).is_err());
        assert!(
            estimate_outage_single(&cfg, &PowerVector::uniform(3, 3.0).unwrap(), &McOptions::new(10_000, 1)).is_err()
        );
    }

    #[test]
    fn capacity_floor_and_cap() {
        let ev = UniformMc {
            fading: FadingModel::unit_rayleigh(),
            attack: AttackModel::with_mean(4.0).unwrap(),
            power: 3.0,
            opts: McOptions::new(10_000, 2),
        };
        let w0 = 1.0 - (-0.25f64).exp();
        let r = outage_capacity_search(&ev, w0 * 0.99, 3, 1e-3).unwrap();
        assert!(r.zero_capacity && r.c_out == 0.0);
        let r = outage_capacity_search(&ev, 1.0, 2, 1e-3).unwrap();
        assert!(r.hit_cap);
        assert_eq!(r.k_star, 2);
        assert!((r.c_out - rate_cap(2, 1.0, 3.0)).abs() < 1e-12);
    }

    #[test]
    fn capacity_bisection_brackets_target() {
        let ev = UniformMc {
            fading: FadingModel::unit_rayleigh(),
            attack: AttackModel::NeverAttack,
            power: 10.0,
            opts: McOptions::new(20_000, 4),
        };
        let r = outage_capacity_search(&ev, 0.2, 1, 1e-4).unwrap();
        // K = 1 without attack: outage(R) = 1 - exp(-(e^R - 1)/P)
        let exact = (1.0 + 10.0 * -(0.8f64.ln())).ln();
        assert!((r.c_out - exact).abs() < 0.03, "{} vs {exact}", r.c_out);
        assert!(ev.evaluate(1, r.c_out).unwrap().outage < 0.2);
        assert!(ev.evaluate(1, r.c_out + 2e-4).unwrap().outage >= 0.2);
    }
}
