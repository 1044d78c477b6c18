use proptest::prelude::*;

use dying_channel::analytic::{outage_lower_bound, outage_upper_bound, SingleChannelConfig};
use dying_channel::channel::{AttackModel, FadingModel, PowerVector};
use dying_channel::montecarlo::{estimate_outage_single, sample_throughput_moments, McOptions};
use dying_channel::parallel::{
    gaussian_outage_indep, mgf_y, nu_m, outage_exponent_indep, outage_exponent_mdep, y_moments, ParallelConfig,
};
use dying_channel::power::{
    brute_force_power, check_monotone_cone, lognormal_min_budget, solve_high_snr_rayleigh, solve_lognormal_upper,
    BruteObjective, HighSnrProgram, SolveStatus,
};

fn rayleigh(k: usize, rate: f64, power: f64, lambda: f64) -> SingleChannelConfig {
    SingleChannelConfig::new(k, rate, power, FadingModel::unit_rayleigh(), AttackModel::exponential(lambda).unwrap())
        .unwrap()
}

#[test]
fn lower_bound_below_upper_on_grid() {
    for k in 1..=10 {
        for &r in &[0.25, 0.5, 1.0] {
            for &p in &[10.0, 100.0, 1000.0] {
                let cfg = rayleigh(k, r, p, 0.1);
                assert!(outage_lower_bound(&cfg).unwrap() <= outage_upper_bound(&cfg).unwrap() + 1e-15);
            }
        }
    }
}

#[test]
fn throughput_moments_match_simulation() {
    let setups = [(5, 5.0, 1.0), (3, 2.0, 1.0), (8, 10.0, 0.5), (1, 4.0, 2.0), (12, 3.0, 1.0), (5, 20.0, 1.5)];
    let n = 1_000_000;
    for (i, &(k, mean, rate)) in setups.iter().enumerate() {
        let f = FadingModel::rayleigh(rate).unwrap();
        let a = AttackModel::with_mean(mean).unwrap();
        let y = y_moments(&f, &a, k).unwrap();
        let (m, v) = sample_throughput_moments(&f, &a, k, &McOptions::new(n, 40 + i as u64)).unwrap();
        assert!((m - y.mean).abs() <= 3.0 * (y.variance / n as f64).sqrt(), "setup {i}: {m} vs {}", y.mean);
        // the fourth moment is not tracked; 1e6 draws pin the variance to well under 2%
        assert!((v / y.variance - 1.0).abs() < 0.02, "setup {i}: {v} vs {}", y.variance);
    }
}

#[test]
fn log_mgf_derivatives_give_moments() {
    let f = FadingModel::unit_rayleigh();
    for &mean in &[3.0, 5.0, 10.0] {
        let a = AttackModel::with_mean(mean).unwrap();
        let y = y_moments(&f, &a, 5).unwrap();
        let h = 1e-3;
        let lm = |s: f64| mgf_y(&f, &a, 5, s).unwrap().ln();
        let d1 = (lm(h) - lm(-h)) / (2.0 * h);
        let d2 = (lm(h) - 2.0 * lm(0.0) + lm(-h)) / (h * h);
        assert!((d1 / y.mean - 1.0).abs() < 1e-5);
        assert!((d2 / y.variance - 1.0).abs() < 1e-5);
    }
}

#[test]
fn lognormal_solver_matches_grid_at_k3() {
    let cfg =
        SingleChannelConfig::new(3, 0.5, 3.0, FadingModel::LogNormalStd, AttackModel::with_mean(4.0).unwrap()).unwrap();
    let rep = solve_lognormal_upper(&cfg).unwrap();
    let grid = brute_force_power(&cfg, BruteObjective::LogNormalUpper, 0.01).unwrap();
    assert!(rep.objective <= grid.objective + 1e-4);
    assert!((rep.objective - grid.objective).abs() <= 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn high_snr_solution_is_tight_and_ordered(k in 1usize..7, r in 0.25f64..2.0, lp in 2.0f64..4.0, lambda in 0.05f64..0.5) {
        let p = 10f64.powf(lp);
        let rep = solve_high_snr_rayleigh(&HighSnrProgram::new(&rayleigh(k, r, p, lambda)).unwrap()).unwrap();
        prop_assert!(check_monotone_cone(&rep.power));
        prop_assert!((rep.power.total() - k as f64 * p).abs() <= 1e-7 * k as f64 * p);
        prop_assert_eq!(rep.status, SolveStatus::Optimal);
        prop_assert!(rep.kkt_residual <= 1e-7);
    }

    #[test]
    fn lognormal_solution_is_feasible(k in 1usize..6, r in 0.1f64..1.0, slack in 1.05f64..4.0, mean in 2.0f64..10.0) {
        let p = lognormal_min_budget(k, r) * slack;
        let cfg = SingleChannelConfig::new(k, r, p, FadingModel::LogNormalStd, AttackModel::with_mean(mean).unwrap()).unwrap();
        let rep = solve_lognormal_upper(&cfg).unwrap();
        prop_assert!(check_monotone_cone(&rep.power));
        prop_assert!(rep.kkt_residual <= 1e-7);
        prop_assert!(rep.cumulative_slack.iter().all(|s| *s >= -1e-9));
    }

    #[test]
    fn independent_exponent_dominates_dependent(mean in 2.0f64..12.0, frac in 0.1f64..0.95, rho in 0.0f64..0.9) {
        let f = FadingModel::unit_rayleigh();
        let a = AttackModel::with_mean(mean).unwrap();
        let y = y_moments(&f, &a, 5).unwrap();
        prop_assert!(nu_m(&f, &a, 5, 1, rho).unwrap().long_run_variance >= y.variance - 1e-12);
        let t = frac * y.mean;
        let ind = outage_exponent_indep(&f, &a, 5, t).unwrap();
        let dep = outage_exponent_mdep(&f, &a, 5, 1, rho, t).unwrap();
        prop_assert!(ind.value >= dep.value - 1e-12);
        prop_assert!(ind.value >= 0.0);
    }

    #[test]
    fn gaussian_outage_falls_with_n_below_the_mean(n in 2usize..400, extra in 1usize..200, frac in 0.1f64..0.95) {
        let f = FadingModel::unit_rayleigh();
        let a = AttackModel::with_mean(5.0).unwrap();
        let p = 2.0;
        let rate = frac * y_moments(&f, &a, 5).unwrap().mean * p;
        let small = ParallelConfig::independent(n, 5, p, rate, f.clone(), a.clone()).unwrap();
        let big = small.with_n(n + extra).unwrap();
        prop_assert!(gaussian_outage_indep(&big).unwrap() <= gaussian_outage_indep(&small).unwrap() + 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn simulated_outage_monotone_on_common_draws(k in 1usize..5, r in 0.2f64..1.5, p in 1.0f64..50.0, dp in 0.5f64..20.0, seed in any::<u64>()) {
        let base = rayleigh(k, r, p, 0.2);
        let opts = McOptions::new(10_000, seed);
        let e0 = estimate_outage_single(&base, &PowerVector::uniform(k, p).unwrap(), &opts).unwrap();
        let more_p = base.with_power(p + dp).unwrap();
        let e1 = estimate_outage_single(&more_p, &PowerVector::uniform(k, p + dp).unwrap(), &opts).unwrap();
        prop_assert!(e1.outages <= e0.outages);
        let more_r = base.with_rate(r + 0.3).unwrap();
        let e2 = estimate_outage_single(&more_r, &PowerVector::uniform(k, p).unwrap(), &opts).unwrap();
        prop_assert!(e2.outages >= e0.outages);
    }

    #[test]
    fn thread_count_irrelevant(seed in any::<u64>(), threads in 2usize..9) {
        let cfg = rayleigh(3, 0.5, 10.0, 0.2);
        let pv = PowerVector::uniform(3, 10.0).unwrap();
        let one = estimate_outage_single(&cfg, &pv, &McOptions::new(10_000, seed).with_threads(1)).unwrap();
        let many = estimate_outage_single(&cfg, &pv, &McOptions::new(10_000, seed).with_threads(threads)).unwrap();
        prop_assert_eq!(one, many);
    }
}
