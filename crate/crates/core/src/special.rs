//! Normal-distribution helpers. `erf`/`erfc` come from `libm` (musl port,
//! about 1 ulp); the quantile starts from `statrs` and is polished by Newton.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal CDF, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal quantile; returns ±inf at the endpoints.
pub fn norm_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        let mut x = Normal::standard().inverse_cdf(p);
        for _ in 0..2 {
            let d = norm_pdf(x);
            if d <= 0.0 {
                break;
            }
            x -= (norm_cdf(x) - p) / d;
        }
        x
    }
}

/// `P(Z1 > a, Z2 > b)` for standard normals with correlation `r`, by
/// composite Simpson quadrature over the first coordinate.
pub fn bivariate_upper_orthant(a: f64, b: f64, r: f64) -> f64 {
    if a == f64::INFINITY || b == f64::INFINITY {
        return 0.0;
    }
    if a == f64::NEG_INFINITY {
        return norm_cdf(-b);
    }
    if b == f64::NEG_INFINITY {
        return norm_cdf(-a);
    }
    if r == 0.0 {
        return norm_cdf(-a) * norm_cdf(-b);
    }
    let s = (1.0 - r * r).sqrt();
    let lo = a.max(-9.0);
    let hi = 9.0_f64;
    if lo >= hi {
        return 0.0;
    }
    let n = 2000;
    let h = (hi - lo) / n as f64;
    let g = |x: f64| norm_pdf(x) * norm_cdf((r * x - b) / s);
    let mut acc = g(lo) + g(hi);
    for i in 1..n {
        let x = lo + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
    }
    acc * h / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((norm_cdf(1.96) - 0.975_002_104_851_779_5).abs() < 1e-12);
        // tail, checked against mpmath
        assert!((norm_cdf(-6.0) / 9.865_876_450_376_946e-10 - 1.0).abs() < 1e-12);
        assert!((erf(0.5) - 0.520_499_877_813_046_5).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[1e-6, 0.01, 0.3, 0.5, 0.9, 0.999] {
            let e = (norm_cdf(norm_quantile(p)) - p).abs() / p;
            assert!(e < 1e-13, "p={p} rel err {e}");
        }
    }

    #[test]
    fn orthant_closed_forms() {
        // P(Z1>0, Z2>0) = 1/4 + asin(r)/(2 pi)
        for &r in &[-0.5f64, 0.2, 0.5, 0.9] {
            let exact = 0.25 + r.asin() / (2.0 * std::f64::consts::PI);
            assert!((bivariate_upper_orthant(0.0, 0.0, r) - exact).abs() < 1e-10);
        }
        let ind = bivariate_upper_orthant(0.3, -0.7, 0.0);
        assert!((ind - norm_cdf(-0.3) * norm_cdf(0.7)).abs() < 1e-15);
    }
}
