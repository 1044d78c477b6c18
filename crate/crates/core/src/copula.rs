//! m-dependent attack times by a Gaussian copula.
//!
//! Latent standard normals `z_1..z_N` have a banded Toeplitz correlation with
//! the same value `r` at lags `1..=m` and zero beyond, so the sequence is
//! stationary and m-dependent. Each `z_i` maps to an attack time with
//! survival probability `Phi(-z_i)`. The latent `r` is calibrated so the
//! surviving-block counts of neighbouring sub-channels reach a target
//! correlation.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::{block_weights, surviving_from_time, AttackModel};
use crate::error::{Error, Result};
use crate::special::{bivariate_upper_orthant, norm_cdf, norm_quantile};

/// Calibration accepts an achieved correlation this close to the target.
pub const CALIBRATION_TOL: f64 = 0.02;

/// Largest latent correlation for which the banded matrix stays positive
/// definite at every size: `1 + 2 r sum_h cos(h w) >= 0` for all `w`.
pub fn max_latent_correlation(m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let g = |w: f64| -(1..=m).map(|h| (h as f64 * w).cos()).sum::<f64>();
    let n = 4096;
    let (mut best_w, mut best) = (0.0, f64::NEG_INFINITY);
    for j in 0..=n {
        let w = std::f64::consts::PI * j as f64 / n as f64;
        let v = g(w);
        if v > best {
            best = v;
            best_w = w;
        }
    }
    // polish around the grid maximum
    let h = std::f64::consts::PI / n as f64;
    let (mut a, mut b) = ((best_w - h).max(0.0), (best_w + h).min(std::f64::consts::PI));
    for _ in 0..100 {
        let c = a + (b - a) / 3.0;
        let d = b - (b - a) / 3.0;
        if g(c) < g(d) {
            a = c;
        } else {
            b = d;
        }
    }
    best = best.max(g(0.5 * (a + b)));
    (1.0 - 1e-9) / (2.0 * best)
}

/// Correlation of the surviving-block counts of two sub-channels whose
/// latent normals have correlation `r`.
///
/// `L >= j` exactly when `z >= tau_j = Phi^{-1}(1 - P(L >= j))`, so
/// `E[L1 L2] = sum_{j,l} P(z1 >= tau_j, z2 >= tau_l)`.
pub fn surviving_correlation(attack: &AttackModel, k: usize, r: f64) -> Result<f64> {
    let w = block_weights(attack, k)?;
    let (mu, var) = (w.mean(), w.variance());
    if var <= 1e-15 {
        return Ok(0.0);
    }
    let tau: Vec<f64> = (1..=k).map(|j| norm_quantile(1.0 - w.survival(j))).collect();
    let mut e = 0.0;
    for (j, &a) in tau.iter().enumerate() {
        for &b in &tau[j..] {
            let p = bivariate_upper_orthant(a, b, r);
            e += if a == b { p } else { 2.0 * p };
        }
    }
    Ok((e - mu * mu) / var)
}

/// Calibrated copula parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopulaCalibration {
    pub m: usize,
    pub target: f64,
    pub latent: f64,
    /// Model correlation of neighbouring surviving-block counts at `latent`.
    pub achieved: f64,
}

/// Find the latent correlation giving surviving-count correlation `target`.
pub fn calibrate(attack: &AttackModel, k: usize, m: usize, target: f64) -> Result<CopulaCalibration> {
    if !(0.0..1.0).contains(&target) {
        return Err(Error::precondition(format!("rho must lie in [0, 1), got {target}")));
    }
    let none = CopulaCalibration { m, target, latent: 0.0, achieved: 0.0 };
    if target == 0.0 {
        return Ok(none);
    }
    if m == 0 {
        return Err(Error::Calibration { target, achieved: 0.0 });
    }
    let cap = max_latent_correlation(m);
    let top = surviving_correlation(attack, k, cap)?;
    if top < target {
        if target - top <= CALIBRATION_TOL {
            return Ok(CopulaCalibration { m, target, latent: cap, achieved: top });
        }
        return Err(Error::Calibration { target, achieved: top });
    }
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if surviving_correlation(attack, k, mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let latent = 0.5 * (lo + hi);
    Ok(CopulaCalibration { m, target, latent, achieved: surviving_correlation(attack, k, latent)? })
}

/// Sampler for `N` m-dependent attack times, holding the banded Cholesky
/// factor of the latent correlation.
#[derive(Debug, Clone)]
pub struct MDependentSampler {
    n: usize,
    m: usize,
    /// Row `i` stores `chol[i][i-m..=i]`, left-padded with zeros.
    band: Vec<f64>,
}

impl MDependentSampler {
    pub fn new(n: usize, m: usize, latent: f64) -> Result<Self> {
        let mut c = DMatrix::<f64>::identity(n, n);
        for i in 0..n {
            for j in i.saturating_sub(m)..i {
                c[(i, j)] = latent;
                c[(j, i)] = latent;
            }
        }
        let chol = c
            .cholesky()
            .ok_or_else(|| Error::Model(format!("latent correlation {latent} is not positive definite")))?;
        let l = chol.l();
        let mut band = vec![0.0; n * (m + 1)];
        for i in 0..n {
            for j in i.saturating_sub(m)..=i {
                band[i * (m + 1) + (m + j - i)] = l[(i, j)];
            }
        }
        Ok(MDependentSampler { n, m, band })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Latent correlated normals; `eps` and `out` must have length `N`.
    pub fn latent<R: Rng + ?Sized>(&self, rng: &mut R, eps: &mut [f64], out: &mut [f64]) {
        for e in eps.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        let w = self.m + 1;
        for i in 0..self.n {
            let row = &self.band[i * w..(i + 1) * w];
            let start = i.saturating_sub(self.m);
            out[i] = row[w - (i - start + 1)..].iter().zip(&eps[start..=i]).map(|(a, b)| a * b).sum();
        }
    }

    /// Surviving-block counts of all sub-channels for one trial.
    pub fn surviving<R: Rng + ?Sized>(
        &self,
        attack: &AttackModel,
        k: usize,
        rng: &mut R,
        eps: &mut [f64],
        z: &mut [f64],
        out: &mut [usize],
    ) {
        self.latent(rng, eps, z);
        for (l, &zi) in out.iter_mut().zip(z.iter()) {
            *l = surviving_from_time(attack.survival_quantile(norm_cdf(-zi)), k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn latent_cap() {
        assert!((max_latent_correlation(1) - 0.5).abs() < 1e-8);
        // m = 2: max of -(cos w + cos 2w) is 9/8
        assert!((max_latent_correlation(2) - 4.0 / 9.0).abs() < 1e-8);
    }

    #[test]
    fn correlation_endpoints() {
        let a = AttackModel::with_mean(5.0).unwrap();
        assert!(surviving_correlation(&a, 5, 0.0).unwrap().abs() < 1e-9);
        let c1 = surviving_correlation(&a, 5, 0.2).unwrap();
        let c2 = surviving_correlation(&a, 5, 0.4).unwrap();
        assert!(0.0 < c1 && c1 < c2 && c2 < 0.4);
    }

    #[test]
    fn calibration_hits_reachable_targets() {
        let a = AttackModel::with_mean(5.0).unwrap();
        let c = calibrate(&a, 5, 1, 0.3).unwrap();
        assert!((c.achieved - 0.3).abs() < 1e-9);
        assert!(c.latent > 0.3 && c.latent < 0.5);
    }

    #[test]
    fn unreachable_target_reports_best() {
        let a = AttackModel::with_mean(5.0).unwrap();
        match calibrate(&a, 5, 1, 0.8) {
            Err(Error::Calibration { target, achieved }) => {
                assert_eq!(target, 0.8);
                assert!(achieved > 0.4 && achieved < 0.5);
            }
            other => panic!("expected calibration failure, got {other:?}"),
        }
    }

    #[test]
    fn sampler_reproduces_banded_correlation() {
        let s = MDependentSampler::new(6, 1, 0.45).unwrap();
        let stream = RngStream::new(3, 99);
        let (mut eps, mut z) = (vec![0.0; 6], vec![0.0; 6]);
        let n = 200_000;
        let (mut c1, mut c2, mut v) = (0.0, 0.0, 0.0);
        for t in 0..n {
            s.latent(&mut stream.trial(t), &mut eps, &mut z);
            c1 += z[2] * z[3];
            c2 += z[2] * z[4];
            v += z[3] * z[3];
        }
        let n = n as f64;
        assert!((c1 / n - 0.45).abs() < 0.01);
        assert!((c2 / n).abs() < 0.01);
        assert!((v / n - 1.0).abs() < 0.01);
    }
}
