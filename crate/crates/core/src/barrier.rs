//! Small dense log-barrier interior-point method.
//!
//! Minimises a smooth convex `f(x)` subject to smooth convex `g_j(x) <= 0`
//! from a strictly feasible start. Each outer step minimises
//! `f(x) - mu sum_j log(-g_j(x))` by damped Newton with Armijo backtracking;
//! `mu` runs from 1 down to 1e-8 in factors of 10.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub value: f64,
    pub grad: DVector<f64>,
    /// `None` for affine constraints.
    pub hess: Option<DMatrix<f64>>,
}

pub(crate) trait Program {
    /// Value, gradient and Hessian of the objective.
    fn objective(&self, x: &DVector<f64>) -> (f64, DVector<f64>, DMatrix<f64>);
    fn objective_value(&self, x: &DVector<f64>) -> f64 {
        self.objective(x).0
    }
    fn constraints(&self, x: &DVector<f64>) -> Vec<Constraint>;
}

#[derive(Debug, Clone)]
pub(crate) struct BarrierOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    /// `max(|grad f + sum lambda_j grad g_j|_inf, max_j lambda_j |g_j|)` with
    /// nonnegative least-squares multipliers on the near-active constraints.
    pub kkt_residual: f64,
    pub converged: bool,
}

const MU_START: f64 = 1.0;
const MU_END: f64 = 1e-8;
const ARMIJO_C: f64 = 1e-4;
const MAX_NEWTON: usize = 1000;
/// Centering stops when the squared Newton decrement of the scaled barrier
/// `f / mu - sum log(-g)` falls below this.
const CENTER_TOL: f64 = 1e-12;

fn barrier_value<P: Program>(prog: &P, x: &DVector<f64>, mu: f64) -> Option<f64> {
    let mut phi = prog.objective_value(x);
    for c in prog.constraints(x) {
        if !(c.value < 0.0) {
            return None;
        }
        phi -= mu * (-c.value).ln();
    }
    phi.is_finite().then_some(phi)
}

fn barrier_derivatives<P: Program>(prog: &P, x: &DVector<f64>, mu: f64) -> (DVector<f64>, DMatrix<f64>) {
    let (_, mut g, mut h) = prog.objective(x);
    for c in prog.constraints(x) {
        let s = -c.value;
        g += &c.grad * (mu / s);
        h += &c.grad * c.grad.transpose() * (mu / (s * s));
        if let Some(ch) = &c.hess {
            h += ch * (mu / s);
        }
    }
    (g, h)
}

/// Newton direction, regularising the Hessian if it is not numerically
/// positive definite.
fn newton_direction(h: &DMatrix<f64>, g: &DVector<f64>) -> DVector<f64> {
    let n = h.nrows();
    let scale = (0..n).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut tau = 0.0;
    loop {
        let reg = h + DMatrix::<f64>::identity(n, n) * tau;
        if let Some(ch) = reg.cholesky() {
            return -ch.solve(g);
        }
        tau = if tau == 0.0 { 1e-12 * scale } else { tau * 10.0 };
    }
}

/// KKT residual at `x`. The barrier estimates `mu / -g_j` are valid
/// nonnegative multipliers with complementarity `mu`, but they are noisy
/// along stiff constraints such as a tight budget, so the multipliers of the
/// strongly active set are refit by least squares with the others held.
fn kkt_residual<P: Program>(prog: &P, x: &DVector<f64>, mu: f64) -> f64 {
    let (_, g, _) = prog.objective(x);
    let cons = prog.constraints(x);
    let mut lambda: Vec<f64> = cons.iter().map(|c| mu / -c.value).collect();
    let top = lambda.iter().cloned().fold(0.0, f64::max);
    let mut active: Vec<usize> = (0..cons.len()).filter(|&j| lambda[j] > 1e-3 * top).collect();
    let mut rest = g.clone();
    for (j, c) in cons.iter().enumerate() {
        if !active.contains(&j) {
            rest += &c.grad * lambda[j];
        }
    }
    let n = x.len();
    // drop constraints whose refit multiplier comes out negative
    while !active.is_empty() {
        let a = DMatrix::from_fn(n, active.len(), |i, j| cons[active[j]].grad[i]);
        let Ok(sol) = a.svd(true, true).solve(&(-&rest), 1e-12) else { break };
        if let Some(worst) = (0..active.len()).filter(|&j| sol[j] < 0.0).min_by(|&p, &q| sol[p].total_cmp(&sol[q])) {
            lambda[active.remove(worst)] = 0.0;
            continue;
        }
        for (j, &c) in active.iter().enumerate() {
            lambda[c] = sol[j];
        }
        break;
    }
    let mut r = g;
    let mut slack = 0.0f64;
    for (c, l) in cons.iter().zip(&lambda) {
        r += &c.grad * *l;
        slack = slack.max(l * c.value.abs());
    }
    r.amax().max(slack)
}

pub(crate) fn solve<P: Program>(prog: &P, x0: DVector<f64>) -> BarrierOutcome {
    let mut x = x0;
    let mut mu = MU_START;
    let mut iterations = 0;
    let mut converged = true;
    loop {
        let mut inner_done = false;
        for _ in 0..MAX_NEWTON {
            let (g, h) = barrier_derivatives(prog, &x, mu);
            let d = newton_direction(&h, &g);
            let slope = g.dot(&d);
            if -slope / mu <= CENTER_TOL || !slope.is_finite() {
                inner_done = true;
                break;
            }
            iterations += 1;
            let phi = barrier_value(prog, &x, mu).expect("iterate stays strictly feasible");
            let mut s = 1.0;
            let mut accepted = false;
            while s > 1e-30 {
                let trial = &x + &d * s;
                if let Some(v) = barrier_value(prog, &trial, mu) {
                    // the strict test rejects steps lost in rounding
                    if v <= phi + ARMIJO_C * s * slope && v < phi {
                        x = trial;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if !accepted {
                // no further decrease representable at this mu
                inner_done = true;
                break;
            }
        }
        if !inner_done {
            converged = false;
        }
        if mu <= MU_END * 1.000_001 {
            break;
        }
        mu /= 10.0;
    }
    let kkt = kkt_residual(prog, &x, mu);
    BarrierOutcome { x, iterations, kkt_residual: kkt, converged }
}
