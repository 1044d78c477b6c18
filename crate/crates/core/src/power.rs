//! Outage-minimising power allocation over the blocks of one codeword.
//!
//! Two smooth surrogates of the outage probability are minimised over the
//! non-increasing power profiles within the budget `sum p_i <= K P`:
//!
//! * high-SNR Rayleigh: `w0 + sum_j c_j / prod_{i<=j} p_i`;
//! * log-normal upper bound: `w0 + sum_n w_n Phi((K R - sum_{i<=n} log p_i)/sqrt(n))`,
//!   restricted to `sum_{i<=n} log p_i >= K R` where it is convex.
//!
//! Both become convex in `x = log p` and are solved by the barrier method.
//! A grid oracle, convexity probes and a check of the "one block is optimal
//! under identical fading" property sit alongside.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::analytic::SingleChannelConfig;
use crate::barrier::{self, Constraint, Program};
use crate::channel::{AttackModel, FadingModel, PowerVector, WeightVector};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_outage_single, Evaluation, McOptions, OutageEstimate, OutageEvaluator};
use crate::rng::{streams, RngStream};
use crate::special::{norm_cdf, norm_pdf};

pub const KKT_TOL: f64 = 1e-7;
pub const MAX_JOINT_K: usize = 16;
pub const MAX_BRUTE_FORCE_K: usize = 4;

/// High-SNR Rayleigh program: `w0 + sum_j c_j / prod_{i<=j} p_i` with
/// `c_j = w_j (e^{KR/j} - 1)^j`, scaled by `rate_alpha^j` for fading rates
/// other than 1.
#[derive(Debug, Clone, PartialEq)]
pub struct HighSnrProgram {
    pub k: usize,
    pub rate: f64,
    pub power: f64,
    pub weights: WeightVector,
    pub coeffs: Vec<f64>,
}

impl HighSnrProgram {
    pub fn new(cfg: &SingleChannelConfig) -> Result<Self> {
        let alpha_rate = match &cfg.fading {
            FadingModel::RayleighExp { rate } => *rate,
            _ => return Err(Error::unsupported("high-SNR program needs i.i.d. Rayleigh fading")),
        };
        let w = cfg.weights()?;
        let k = cfg.k;
        let kr = k as f64 * cfg.rate;
        let coeffs = (1..=k).map(|j| w.get(j) * ((kr / j as f64).exp_m1() * alpha_rate).powi(j as i32)).collect();
        Ok(HighSnrProgram { k, rate: cfg.rate, power: cfg.power, weights: w, coeffs })
    }

    /// `sum_j c_j / prod_{i<=j} p_i` without the constant `w0`.
    pub fn variable_part(&self, p: &[f64]) -> f64 {
        let mut prod = 1.0;
        let mut s = 0.0;
        for (c, pi) in self.coeffs.iter().zip(p) {
            prod *= pi;
            s += c / prod;
        }
        s
    }

    pub fn objective(&self, p: &[f64]) -> f64 {
        self.weights.w0() + self.variable_part(p)
    }

    /// Gradient in the block powers.
    pub fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let mut terms = Vec::with_capacity(self.k);
        let mut prod = 1.0;
        for (c, pi) in self.coeffs.iter().zip(p) {
            prod *= pi;
            terms.push(c / prod);
        }
        (0..self.k).map(|m| -terms[m..].iter().sum::<f64>() / p[m]).collect()
    }
}

/// Log-normal upper bound on the outage probability.
pub fn lognormal_upper_objective(cfg: &SingleChannelConfig, p: &[f64]) -> Result<f64> {
    lognormal_only(cfg)?;
    let w = cfg.weights()?;
    let x: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    Ok(LogNormalLog::new(cfg, w).value(&x))
}

fn lognormal_only(cfg: &SingleChannelConfig) -> Result<()> {
    match cfg.fading {
        FadingModel::LogNormalStd => Ok(()),
        _ => Err(Error::unsupported("log-normal program needs i.i.d. log-normal fading")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub power: PowerVector,
    pub objective: f64,
    pub iterations: usize,
    pub kkt_residual: f64,
    pub status: SolveStatus,
    /// `sum_{i<=n} log p_i - K R` for each `n` (log-normal program only);
    /// values near zero mark active constraints.
    pub cumulative_slack: Vec<f64>,
}

fn budget_constraint(x: &DVector<f64>, total: f64) -> Constraint {
    let e = x.map(f64::exp);
    Constraint { value: e.sum() - total, grad: e.clone(), hess: Some(DMatrix::from_diagonal(&e)) }
}

fn ordering_constraints(x: &DVector<f64>, out: &mut Vec<Constraint>) {
    let k = x.len();
    for i in 0..k.saturating_sub(1) {
        let mut g = DVector::zeros(k);
        g[i] = -1.0;
        g[i + 1] = 1.0;
        out.push(Constraint { value: x[i + 1] - x[i], grad: g, hess: None });
    }
}

/// High-SNR program in log powers.
struct HighSnrLog<'a> {
    prog: &'a HighSnrProgram,
    total: f64,
}

impl Program for HighSnrLog<'_> {
    fn objective(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let k = x.len();
        let mut s = 0.0;
        let terms: Vec<f64> = self
            .prog
            .coeffs
            .iter()
            .zip(x.iter())
            .map(|(c, xi)| {
                s += xi;
                c * (-s).exp()
            })
            .collect();
        // tail[m] = sum_{j >= m} terms[j]
        let mut tail = vec![0.0; k + 1];
        for j in (0..k).rev() {
            tail[j] = tail[j + 1] + terms[j];
        }
        let f = self.prog.weights.w0() + tail[0];
        let g = DVector::from_iterator(k, (0..k).map(|m| -tail[m]));
        let h = DMatrix::from_fn(k, k, |a, b| tail[a.max(b)]);
        (f, g, h)
    }

    fn constraints(&self, x: &DVector<f64>) -> Vec<Constraint> {
        let mut out = vec![budget_constraint(x, self.total)];
        ordering_constraints(x, &mut out);
        out
    }
}

/// Log-normal upper-bound program in log powers.
struct LogNormalLog {
    kr: f64,
    total: f64,
    w0: f64,
    /// Weights of `n = 1..=K` surviving blocks.
    w: Vec<f64>,
}

impl LogNormalLog {
    fn new(cfg: &SingleChannelConfig, w: WeightVector) -> Self {
        LogNormalLog {
            kr: cfg.k as f64 * cfg.rate,
            total: cfg.k as f64 * cfg.power,
            w0: w.w0(),
            w: w.as_slice()[1..].to_vec(),
        }
    }

    fn args(&self, x: &[f64]) -> Vec<f64> {
        let mut s = 0.0;
        x.iter()
            .enumerate()
            .map(|(i, xi)| {
                s += xi;
                (self.kr - s) / ((i + 1) as f64).sqrt()
            })
            .collect()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.w0 + self.args(x).iter().zip(&self.w).map(|(a, w)| w * norm_cdf(*a)).sum::<f64>()
    }
}

impl Program for LogNormalLog {
    fn objective(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>) {
        let k = x.len();
        let a = self.args(x.as_slice());
        let mut g1 = vec![0.0; k + 1];
        let mut h1 = vec![0.0; k + 1];
        for n in (0..k).rev() {
            let nn = (n + 1) as f64;
            let d = norm_pdf(a[n]);
            g1[n] = g1[n + 1] - self.w[n] * d / nn.sqrt();
            h1[n] = h1[n + 1] - self.w[n] * a[n] * d / nn;
        }
        let f = self.value(x.as_slice());
        (f, DVector::from_column_slice(&g1[..k]), DMatrix::from_fn(k, k, |i, j| h1[i.max(j)]))
    }

    fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.value(x.as_slice())
    }

    fn constraints(&self, x: &DVector<f64>) -> Vec<Constraint> {
        let k = x.len();
        let mut out = vec![budget_constraint(x, self.total)];
        ordering_constraints(x, &mut out);
        let mut s = 0.0;
        for n in 0..k {
            s += x[n];
            let g = DVector::from_fn(k, |i, _| if i <= n { -1.0 } else { 0.0 });
            out.push(Constraint { value: self.kr - s, grad: g, hess: None });
        }
        out
    }
}

/// Strictly feasible, strictly decreasing start just inside the budget.
fn perturbed_uniform(k: usize, power: f64) -> Vec<f64> {
    (0..k).map(|i| 0.99 * power * (1.0 + 0.01 * (k as f64 - 1.0 - 2.0 * i as f64) / k as f64)).collect()
}

/// Rescale onto the budget (the objectives decrease in every block power)
/// and package the barrier outcome.
fn finish(
    out: barrier::BarrierOutcome,
    k: usize,
    power: f64,
    objective: impl Fn(&[f64]) -> f64,
) -> Result<(PowerVector, f64, SolveStatus, usize, f64)> {
    let mut p: Vec<f64> = out.x.iter().map(|v| v.exp()).collect();
    let scale = k as f64 * power / p.iter().sum::<f64>();
    if scale > 1.0 {
        p.iter_mut().for_each(|v| *v *= scale);
    }
    let obj = objective(&p);
    let status = if out.converged && out.kkt_residual <= KKT_TOL { SolveStatus::Optimal } else { SolveStatus::MaxIter };
    Ok((PowerVector::new(p, power)?, obj, status, out.iterations, out.kkt_residual))
}

/// Minimise the high-SNR Rayleigh outage over non-increasing powers within
/// the budget.
pub fn solve_high_snr_rayleigh(prog: &HighSnrProgram) -> Result<SolveReport> {
    let total = prog.k as f64 * prog.power;
    if !(total > 0.0) {
        return Err(Error::Infeasible { reason: "power budget must be positive".into(), min_budget: None });
    }
    if prog.k == 1 {
        let p = PowerVector::new(vec![prog.power], prog.power)?;
        return Ok(SolveReport {
            objective: prog.objective(p.as_slice()),
            power: p,
            iterations: 0,
            kkt_residual: 0.0,
            status: SolveStatus::Optimal,
            cumulative_slack: Vec::new(),
        });
    }
    let x0 = DVector::from_iterator(prog.k, perturbed_uniform(prog.k, prog.power).into_iter().map(f64::ln));
    let out = barrier::solve(&HighSnrLog { prog, total }, x0);
    let (power, objective, status, iterations, kkt_residual) = finish(out, prog.k, prog.power, |p| prog.objective(p))?;
    Ok(SolveReport { power, objective, iterations, kkt_residual, status, cumulative_slack: Vec::new() })
}

/// Smallest average power for which the log-normal program has a feasible
/// point: the cheapest profile meeting every cumulative constraint is
/// `(e^{KR}, 1, ..., 1)`.
pub fn lognormal_min_budget(k: usize, rate: f64) -> f64 {
    ((k as f64 * rate).exp() + k as f64 - 1.0) / k as f64
}

/// Minimise the log-normal outage upper bound inside its convexity region.
pub fn solve_lognormal_upper(cfg: &SingleChannelConfig) -> Result<SolveReport> {
    lognormal_only(cfg)?;
    let k = cfg.k;
    let kr = k as f64 * cfg.rate;
    let min_budget = lognormal_min_budget(k, cfg.rate);
    if min_budget >= cfg.power {
        return Err(Error::Infeasible {
            reason: format!(
                "cumulative rate constraints need average power above {min_budget}, budget is {}",
                cfg.power
            ),
            min_budget: Some(min_budget),
        });
    }
    let prog = LogNormalLog::new(cfg, cfg.weights()?);
    let strictly_feasible = |x: &DVector<f64>| prog.constraints(x).iter().all(|c| c.value < 0.0);
    let mut x0 = DVector::from_iterator(k, perturbed_uniform(k, cfg.power).into_iter().map(f64::ln));
    if !strictly_feasible(&x0) {
        let mut eps = 1.0;
        let mut found = false;
        for _ in 0..200 {
            x0 = DVector::from_fn(k, |i, _| if i == 0 { kr + eps * k as f64 } else { eps * (k - i) as f64 });
            if strictly_feasible(&x0) {
                found = true;
                break;
            }
            eps *= 0.5;
        }
        if !found {
            return Err(Error::Infeasible {
                reason: "no strictly feasible starting point inside the budget".into(),
                min_budget: Some(min_budget),
            });
        }
    }
    let out = barrier::solve(&prog, x0);
    let (power, objective, status, iterations, kkt_residual) =
        finish(out, k, cfg.power, |p| prog.value(&p.iter().map(|v| v.ln()).collect::<Vec<_>>()))?;
    let mut s = 0.0;
    let cumulative_slack = power
        .as_slice()
        .iter()
        .map(|p| {
            s += p.ln();
            s - kr
        })
        .collect();
    Ok(SolveReport { power, objective, iterations, kkt_residual, status, cumulative_slack })
}

/// Which program to use for a given fading model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerProgram {
    Uniform,
    HighSnrRayleigh,
    LogNormalUpper,
}

impl PowerProgram {
    /// The optimising program matching the fading model.
    pub fn for_fading(fading: &FadingModel) -> Result<Self> {
        match fading {
            FadingModel::RayleighExp { .. } => Ok(PowerProgram::HighSnrRayleigh),
            FadingModel::LogNormalStd => Ok(PowerProgram::LogNormalUpper),
            FadingModel::Identical(_) => Err(Error::unsupported("no power program for identical fading")),
        }
    }
}

/// Run `program` on `cfg`. [`PowerProgram::Uniform`] returns `p_i = P` with
/// NaN objective.
pub fn solve_power(cfg: &SingleChannelConfig, program: PowerProgram) -> Result<SolveReport> {
    match program {
        PowerProgram::Uniform => Ok(SolveReport {
            power: PowerVector::uniform(cfg.k, cfg.power)?,
            objective: f64::NAN,
            iterations: 0,
            kkt_residual: 0.0,
            status: SolveStatus::Optimal,
            cumulative_slack: Vec::new(),
        }),
        PowerProgram::HighSnrRayleigh => solve_high_snr_rayleigh(&HighSnrProgram::new(cfg)?),
        PowerProgram::LogNormalUpper => solve_lognormal_upper(cfg),
    }
}

/// Objective for [`brute_force_power`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BruteObjective {
    HighSnr,
    LogNormalUpper,
    /// Monte Carlo outage with common random numbers at every grid point.
    McOutage(McOptions),
}

/// Visit every non-increasing composition of `units` into `parts` parts.
fn compositions(units: usize, parts: usize, max: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if parts == 1 {
        if units <= max {
            prefix.push(units);
            f(prefix);
            prefix.pop();
        }
        return;
    }
    // the first part is at least the average of what remains
    let lo = units.div_ceil(parts);
    for first in lo..=units.min(max) {
        prefix.push(first);
        compositions(units - first, parts - 1, first, prefix, f);
        prefix.pop();
    }
}

/// Exhaustive search over non-increasing profiles on the budget simplex,
/// discretised so the step is as close to `grid_step` as divides `K P`.
pub fn brute_force_power(cfg: &SingleChannelConfig, objective: BruteObjective, grid_step: f64) -> Result<SolveReport> {
    let k = cfg.k;
    if k > MAX_BRUTE_FORCE_K {
        return Err(Error::precondition(format!("grid search is limited to K <= {MAX_BRUTE_FORCE_K}, got {k}")));
    }
    if !(grid_step > 0.0) {
        return Err(Error::precondition(format!("grid step must be positive, got {grid_step}")));
    }
    let total = k as f64 * cfg.power;
    let units = (total / grid_step).round().max(1.0) as usize;
    let step = total / units as f64;
    let kr = k as f64 * cfg.rate;
    let high = match objective {
        BruteObjective::HighSnr => Some(HighSnrProgram::new(cfg)?),
        _ => None,
    };
    if objective == BruteObjective::LogNormalUpper {
        lognormal_only(cfg)?;
    }
    let lognormal = LogNormalLog::new(cfg, cfg.weights()?);
    let eval = |p: &[f64]| -> Result<Option<f64>> {
        // the surrogates are infinite at zero power; Monte Carlo is not
        if p.iter().any(|v| *v <= 0.0) && !matches!(objective, BruteObjective::McOutage(_)) {
            return Ok(None);
        }
        Ok(match objective {
            BruteObjective::HighSnr => Some(high.as_ref().expect("built above").objective(p)),
            BruteObjective::LogNormalUpper => {
                let x: Vec<f64> = p.iter().map(|v| v.ln()).collect();
                let mut s = 0.0;
                if x.iter().any(|xi| {
                    s += xi;
                    s < kr
                }) {
                    None
                } else {
                    Some(lognormal.value(&x))
                }
            }
            BruteObjective::McOutage(opts) => {
                let pv = PowerVector::new(p.to_vec(), cfg.power)?;
                Some(estimate_outage_single(cfg, &pv, &opts)?.p_hat)
            }
        })
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut visited = 0;
    let mut err = None;
    compositions(units, k, units, &mut Vec::with_capacity(k), &mut |c| {
        if err.is_some() {
            return;
        }
        visited += 1;
        let p: Vec<f64> = c.iter().map(|u| *u as f64 * step).collect();
        match eval(&p) {
            Ok(Some(v)) => {
                if best.as_ref().is_none_or(|(b, _)| v < *b) {
                    best = Some((v, p));
                }
            }
            Ok(None) => {}
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let (objective, p) = best.ok_or_else(|| Error::Infeasible {
        reason: "no grid point satisfies the constraints".into(),
        min_budget: None,
    })?;
    Ok(SolveReport {
        power: PowerVector::new(p, cfg.power)?,
        objective,
        iterations: visited,
        kkt_residual: f64::NAN,
        status: SolveStatus::Optimal,
        cumulative_slack: Vec::new(),
    })
}

/// Non-increasing up to `1e-9`.
pub fn check_monotone_cone(power: &PowerVector) -> bool {
    power.as_slice().windows(2).all(|w| w[0] >= w[1] - 1e-9)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdenticalFadingCheck {
    /// Outage of a single-block codeword at power `P`.
    pub single: OutageEstimate,
    /// Outage of `M`-block codewords for each tested power profile.
    pub candidates: Vec<(PowerVector, OutageEstimate)>,
    pub holds: bool,
}

/// With one gain shared by all blocks, a single-block codeword is never worse
/// than an `M`-block one. Compares against uniform power and 20 random
/// non-increasing profiles on common random numbers.
pub fn identical_fading_k1_check(
    fading: &FadingModel,
    attack: &AttackModel,
    rate: f64,
    power: f64,
    m: usize,
    opts: &McOptions,
) -> Result<IdenticalFadingCheck> {
    if !fading.is_identical() {
        return Err(Error::precondition("identical-fading check needs identical fading"));
    }
    if m < 2 {
        return Err(Error::precondition(format!("need M >= 2 blocks, got {m}")));
    }
    let one = SingleChannelConfig::new(1, rate, power, fading.clone(), attack.clone())?;
    let many = one.with_k(m)?;
    let single = estimate_outage_single(&one, &PowerVector::uniform(1, power)?, opts)?;
    let mut profiles = vec![PowerVector::uniform(m, power)?];
    let mut rng = RngStream::new(opts.seed, streams::POWER_SAMPLES).generator();
    for _ in 0..20 {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x *= m as f64 * power / s);
        profiles.push(PowerVector::new(v, power)?);
    }
    let mut holds = true;
    let mut candidates = Vec::with_capacity(profiles.len());
    for p in profiles {
        let e = estimate_outage_single(&many, &p, opts)?;
        holds &= single.p_hat <= e.p_hat + 3.0 * single.combined_stderr(&e);
        candidates.push((p, e));
    }
    Ok(IdenticalFadingCheck { single, candidates, holds })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessianProbe {
    /// Smallest `d' H d / |d|^2` over the probe directions.
    pub min_quadratic: f64,
    /// Smallest eigenvalue of the finite-difference Hessian.
    pub min_eigenvalue: f64,
    pub psd: bool,
    /// Largest relative gap between analytic and finite-difference gradients.
    pub gradient_rel_err: f64,
    pub gradient_ok: bool,
}

/// Finite-difference convexity probe of the high-SNR objective in the block
/// powers at `point`.
pub fn hessian_psd_probe(prog: &HighSnrProgram, point: &PowerVector) -> Result<HessianProbe> {
    let p = point.as_slice();
    let k = prog.k;
    if p.len() != k {
        return Err(Error::precondition(format!("point has {} blocks, K = {k}", p.len())));
    }
    if p.iter().any(|v| *v <= 0.0) {
        return Err(Error::precondition("probe point must be strictly positive"));
    }
    let f = |q: &[f64]| prog.variable_part(q);
    let h: Vec<f64> = p.iter().map(|v| 1e-4 * v).collect();
    let at = |shifts: &[(usize, f64)]| {
        let mut q = p.to_vec();
        for &(i, s) in shifts {
            q[i] += s;
        }
        f(&q)
    };
    let f0 = f(p);
    let mut hess = DMatrix::<f64>::zeros(k, k);
    for a in 0..k {
        hess[(a, a)] = (at(&[(a, h[a])]) - 2.0 * f0 + at(&[(a, -h[a])])) / (h[a] * h[a]);
        for b in 0..a {
            let v = (at(&[(a, h[a]), (b, h[b])]) - at(&[(a, h[a]), (b, -h[b])]) - at(&[(a, -h[a]), (b, h[b])])
                + at(&[(a, -h[a]), (b, -h[b])]))
                / (4.0 * h[a] * h[b]);
            hess[(a, b)] = v;
            hess[(b, a)] = v;
        }
    }
    let grad = prog.gradient(p);
    let gradient_rel_err = (0..k)
        .map(|i| {
            let fd = (at(&[(i, h[i])]) - at(&[(i, -h[i])])) / (2.0 * h[i]);
            (fd - grad[i]).abs() / grad[i].abs().max(1e-300)
        })
        .fold(0.0, f64::max);
    let mut rng = RngStream::new(0, streams::PROBE_DIRECTIONS).generator();
    let mut min_quadratic = f64::INFINITY;
    let mut psd = true;
    for _ in 0..100 {
        let d = DVector::<f64>::from_fn(k, |_, _| rng.sample(StandardNormal));
        let q = (d.transpose() * &hess * &d)[(0, 0)];
        let n2 = d.norm_squared();
        psd &= q >= -1e-6 * n2;
        min_quadratic = min_quadratic.min(q / n2);
    }
    let min_eigenvalue = SymmetricEigen::new(hess).eigenvalues.min();
    Ok(HessianProbe { min_quadratic, min_eigenvalue, psd, gradient_rel_err, gradient_ok: gradient_rel_err <= 1e-5 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointResult {
    pub k_best: usize,
    pub report: SolveReport,
    /// Monte Carlo outage of the solution at each `K = 1..=K_max`; `None`
    /// where the program was infeasible.
    pub outages: Vec<Option<OutageEstimate>>,
}

/// Solve for each `K = 1..=K_max` and keep the `K` whose solution has the
/// smallest Monte Carlo outage (common seed; ties go to smaller `K`).
pub fn joint_optimize(
    base: &SingleChannelConfig,
    k_max: usize,
    program: PowerProgram,
    opts: &McOptions,
) -> Result<JointResult> {
    if k_max == 0 || k_max > MAX_JOINT_K {
        return Err(Error::precondition(format!("K_max must lie in 1..={MAX_JOINT_K}, got {k_max}")));
    }
    let mut best: Option<(usize, SolveReport, f64)> = None;
    let mut outages = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let cfg = base.with_k(k)?;
        let report = match solve_power(&cfg, program) {
            Ok(r) => r,
            Err(Error::Infeasible { .. }) => {
                outages.push(None);
                continue;
            }
            Err(e) => return Err(e),
        };
        let est = estimate_outage_single(&cfg, &report.power, opts)?;
        outages.push(Some(est));
        if best.as_ref().is_none_or(|(_, _, b)| est.p_hat < *b) {
            best = Some((k, report, est.p_hat));
        }
    }
    let (k_best, report, _) = best.ok_or_else(|| Error::Infeasible {
        reason: format!("program is infeasible for every K up to {k_max}"),
        min_budget: None,
    })?;
    Ok(JointResult { k_best, report, outages })
}

/// Capacity-search evaluator that optimises the power profile at each
/// `(K, R)` and measures its outage by Monte Carlo. Where the program is
/// infeasible the outage is taken as 1.
#[derive(Debug, Clone)]
pub struct OptimizedMc {
    pub fading: FadingModel,
    pub attack: AttackModel,
    pub power: f64,
    pub opts: McOptions,
    pub program: PowerProgram,
}

impl OutageEvaluator for OptimizedMc {
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
        match solve_power(&cfg, self.program) {
            Ok(r) => {
                let e = estimate_outage_single(&cfg, &r.power, &self.opts)?;
                Ok(Evaluation { outage: e.p_hat, power: Some(r.power) })
            }
            Err(Error::Infeasible { .. }) => Ok(Evaluation { outage: 1.0, power: None }),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rayleigh(k: usize, rate: f64, power: f64, mean_attack: f64) -> SingleChannelConfig {
        SingleChannelConfig::new(
            k,
            rate,
            power,
            FadingModel::unit_rayleigh(),
            AttackModel::with_mean(mean_attack).unwrap(),
        )
        .unwrap()
    }

    fn lognormal(k: usize, rate: f64, power: f64, mean_attack: f64) -> SingleChannelConfig {
        SingleChannelConfig::new(
            k,
            rate,
            power,
            FadingModel::LogNormalStd,
            AttackModel::with_mean(mean_attack).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn coefficients() {
        let prog = HighSnrProgram::new(&rayleigh(2, 0.5, 10.0, 5.0)).unwrap();
        assert!((prog.coeffs[0] - 0.255_008).abs() < 1e-5, "{:?}", prog.coeffs);
        assert!((prog.coeffs[1] - 0.282_099).abs() < 1e-5, "{:?}", prog.coeffs);
    }

    #[test]
    fn single_block_uses_whole_budget() {
        let prog = HighSnrProgram::new(&rayleigh(1, 0.5, 10.0, 5.0)).unwrap();
        let r = solve_high_snr_rayleigh(&prog).unwrap();
        assert_eq!(r.power.as_slice(), &[10.0]);
        assert!((r.objective - (prog.weights.w0() + prog.coeffs[0] / 10.0)).abs() < 1e-15);
    }

    #[test]
    fn high_snr_solver_matches_grid() {
        let cfg = rayleigh(2, 0.5, 10.0, 5.0);
        let prog = HighSnrProgram::new(&cfg).unwrap();
        let r = solve_high_snr_rayleigh(&prog).unwrap();
        let b = brute_force_power(&cfg, BruteObjective::HighSnr, 0.001).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!(r.kkt_residual <= KKT_TOL);
        assert!((r.objective - b.objective).abs() <= 1e-5);
        assert!(r.objective <= b.objective + 1e-12);
        for (a, c) in r.power.as_slice().iter().zip(b.power.as_slice()) {
            assert!((a - c).abs() <= 1e-2, "{:?} vs {:?}", r.power, b.power);
        }
        assert!((r.power.total() - 20.0).abs() <= 1e-7);
        assert!(check_monotone_cone(&r.power));
        assert!(r.objective <= prog.objective(&[10.0, 10.0]));
    }

    #[test]
    fn lognormal_single_block() {
        let cfg = lognormal(1, 0.1, 3.0, 4.0);
        let r = solve_lognormal_upper(&cfg).unwrap();
        assert!((r.power.as_slice()[0] - 3.0).abs() < 1e-9);
        let w = cfg.weights().unwrap();
        let expect = w.w0() + 0.5 * (1.0 + crate::special::erf((0.1 - 3f64.ln()) / 2f64.sqrt())) * w.tail();
        assert!((r.objective - expect).abs() < 1e-9);
        assert!(r.kkt_residual <= KKT_TOL);
    }

    #[test]
    fn lognormal_infeasible_certificate() {
        match solve_lognormal_upper(&lognormal(2, 2.0, 3.0, 4.0)) {
            Err(Error::Infeasible { min_budget: Some(b), .. }) => assert!((b - (4f64.exp() + 1.0) / 2.0).abs() < 1e-12),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn lognormal_solver_matches_grid() {
        let cfg = lognormal(2, 0.4, 3.0, 4.0);
        let r = solve_lognormal_upper(&cfg).unwrap();
        let b = brute_force_power(&cfg, BruteObjective::LogNormalUpper, 0.01).unwrap();
        assert_eq!(r.status, SolveStatus::Optimal);
        assert!((r.objective - b.objective).abs() <= 1e-4, "{} vs {}", r.objective, b.objective);
        assert!(check_monotone_cone(&r.power));
        assert!(r.cumulative_slack.iter().all(|s| *s >= -1e-12));
    }

    #[test]
    fn grid_enumerates_the_cone() {
        let mut seen = Vec::new();
        compositions(4, 2, 4, &mut Vec::new(), &mut |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![2, 2], vec![3, 1], vec![4, 0]]);
        assert!(brute_force_power(&rayleigh(5, 0.5, 10.0, 5.0), BruteObjective::HighSnr, 0.5).is_err());
        let one = brute_force_power(&rayleigh(1, 0.5, 10.0, 5.0), BruteObjective::HighSnr, 0.1).unwrap();
        assert!((one.power.as_slice()[0] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn cone_check() {
        assert!(check_monotone_cone(&PowerVector::new(vec![3.0, 2.0, 1.0], 2.0).unwrap()));
        assert!(!check_monotone_cone(&PowerVector::new(vec![1.0, 2.0], 1.5).unwrap()));
    }

    #[test]
    fn hessian_probe() {
        let prog = HighSnrProgram::new(&rayleigh(2, 0.5, 10.0, 5.0)).unwrap();
        let r = hessian_psd_probe(&prog, &PowerVector::new(vec![12.0, 8.0], 10.0).unwrap()).unwrap();
        assert!(r.psd && r.gradient_ok, "{r:?}");
        let one = HighSnrProgram::new(&rayleigh(1, 0.5, 10.0, 5.0)).unwrap();
        let r = hessian_psd_probe(&one, &PowerVector::new(vec![10.0], 10.0).unwrap()).unwrap();
        let exact = 2.0 * one.coeffs[0] / 1000.0;
        assert!((r.min_eigenvalue - exact).abs() < 1e-6 * exact);
    }

    #[test]
    fn identical_fading_prefers_one_block() {
        let f = FadingModel::identical(FadingModel::unit_rayleigh());
        let a = AttackModel::with_mean(5.0).unwrap();
        let c = identical_fading_k1_check(&f, &a, 0.5, 10.0, 2, &McOptions::new(20_000, 3)).unwrap();
        assert!(c.holds);
        assert_eq!(c.candidates.len(), 21);
        assert!(c.candidates.iter().all(|(p, _)| check_monotone_cone(p)));
    }
}
