mod common;

use common::*;
use pfd_core::analytic::{
    availability_curve, pfd_average, pfd_average_no_partial, pfd_average_periodic,
    pfd_average_value, pfd_interval, system_availability, EvaluationMode,
};
use pfd_core::model::{periodic_schedule, Instant, SystemSpec, TestPolicy, TestSchedule};
use proptest::prelude::*;

const EXACT: EvaluationMode = EvaluationMode::Exact;
const APPROX: EvaluationMode = EvaluationMode::Approximate;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expanded_availability_matches_binomial_form(
        (system, policy) in scenario(12, 8),
        frac in 0.0f64..1.0,
    ) {
        let tau = policy.full_interval();
        let t = frac * tau;
        let schedule = policy.schedule();
        let i = schedule.times().partition_point(|&ti| ti <= t) + 1;
        let prev = schedule.start(i);
        let a = system_availability(t, &system, &policy, EXACT).unwrap();
        let oracle = oracle_availability(&system, &policy, prev, t);
        prop_assert!(rel(a, oracle) < 1e-10, "A = {a}, oracle = {oracle}");
        // left limit at each test instant
        for (i, start, end) in schedule.segments() {
            let a = system_availability(Instant::before(end), &system, &policy, EXACT).unwrap();
            let oracle = oracle_availability(&system, &policy, start, end);
            prop_assert!(rel(a, oracle) < 1e-10, "interval {i}");
        }
    }

    #[test]
    fn average_decomposes_over_intervals((system, policy) in scenario(12, 8)) {
        let report = pfd_average(&system, &policy, EXACT);
        let tau = policy.full_interval();
        let weighted: f64 = report
            .per_interval
            .iter()
            .map(|p| (p.end - p.start) * p.pfd)
            .sum::<f64>() / tau;
        prop_assert!((report.pfd_avg - weighted).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&report.pfd_avg));
    }

    #[test]
    fn zero_efficiency_telescopes((system, policy) in scenario(12, 8)) {
        let flat = TestPolicy::new(policy.schedule().clone(), 0.0).unwrap();
        let value = pfd_average_value(&system, &flat, EXACT);
        let none = pfd_average_no_partial(&system, flat.full_interval(), EXACT).unwrap();
        prop_assert!(rel(value, none) < 1e-12, "{value} vs {none}");
    }

    #[test]
    fn full_efficiency_renews_each_interval((system, policy) in scenario(12, 8)) {
        let renew = TestPolicy::new(policy.schedule().clone(), 1.0).unwrap();
        for (i, start, end) in renew.schedule().segments() {
            let pfd = pfd_interval(i, &system, &renew, EXACT).unwrap();
            let alone = pfd_average_no_partial(&system, end - start, EXACT).unwrap();
            prop_assert!(rel(pfd, alone) < 1e-12, "interval {i}: {pfd} vs {alone}");
        }
    }

    #[test]
    fn periodic_matches_general(
        m in 1u32..=6, extra in 0u32..=6, n in 1usize..=10,
        log_lambda_tau in -6.0f64..=0.0, e in 0.0f64..=1.0,
    ) {
        let lambda_tau = 10f64.powf(log_lambda_tau);
        let system = SystemSpec::new(m, m + extra, lambda_tau / 8760.0).unwrap();
        let policy = TestPolicy::new(periodic_schedule(n, 8760.0).unwrap(), e).unwrap();
        let general = pfd_average_value(&system, &policy, EXACT);
        let periodic = pfd_average_periodic(&system, e, n, 8760.0, EXACT).unwrap();
        prop_assert!(rel(periodic, general) < 1e-12, "{periodic} vs {general}");
        let general = pfd_average_value(&system, &policy, APPROX);
        let periodic = pfd_average_periodic(&system, e, n, 8760.0, APPROX).unwrap();
        prop_assert!(rel(periodic, general) < 1e-12);
    }

    #[test]
    fn pfd_matches_quadrature_of_binomial_form((system, policy) in scenario(6, 6)) {
        for i in 1..=policy.schedule().len() {
            let pfd = pfd_interval(i, &system, &policy, EXACT).unwrap();
            let oracle = oracle_pfd_interval(&system, &policy, i);
            prop_assert!((pfd - oracle).abs() <= 1e-9 * oracle + 1e-15, "interval {i}: {pfd} vs {oracle}");
        }
    }
}

#[test]
fn single_test_equals_no_partial() {
    for (m, n) in [(1, 1), (1, 2), (2, 3), (2, 6), (3, 4)] {
        let system = SystemSpec::new(m, n, 3e-5).unwrap();
        let policy = TestPolicy::new(periodic_schedule(1, 8760.0).unwrap(), 0.7).unwrap();
        let a = pfd_average_value(&system, &policy, EXACT);
        let b = pfd_average_no_partial(&system, 8760.0, EXACT).unwrap();
        assert!(rel(a, b) < 1e-14);
        let first = pfd_interval(1, &system, &policy, EXACT).unwrap();
        assert!(rel(first, b) < 1e-14);
    }
}

#[test]
fn periodic_renewal_matches_shorter_interval() {
    let system = SystemSpec::new(1, 1, 1e-6).unwrap();
    for n in 1..=6 {
        let v = pfd_average_periodic(&system, 1.0, n, 8760.0, EXACT).unwrap();
        let short = pfd_average_no_partial(&system, 8760.0 / n as f64, EXACT).unwrap();
        assert!(rel(v, short) < 1e-12);
        let lambda_tau = 1e-6 * 8760.0;
        assert!(rel(v, lambda_tau / (2.0 * n as f64)) < lambda_tau);
    }
}

#[test]
fn monotone_in_parameters() {
    let architectures = [(1, 1), (1, 2), (2, 3), (2, 4), (2, 6), (3, 5)];
    let rates = [1e-6, 1e-5, 6.1e-5, 2e-4];
    let efficiencies = [0.0, 0.2, 0.42, 0.7, 1.0];
    let tau = 8760.0;
    for (m, n) in architectures {
        for &lambda in &rates {
            let system = SystemSpec::new(m, n, lambda).unwrap();
            // non-increasing in E
            let mut prev = f64::INFINITY;
            for &e in &efficiencies {
                let v = pfd_average_periodic(&system, e, 4, tau, EXACT).unwrap();
                assert!((0.0..=1.0).contains(&v));
                assert!(v <= prev * (1.0 + 1e-12), "{m}oo{n} λ={lambda} E={e}");
                prev = v;
            }
            // non-increasing in n for periodic schedules
            for &e in &efficiencies[1..] {
                let mut prev = f64::INFINITY;
                for k in 1..=8 {
                    let v = pfd_average_periodic(&system, e, k, tau, EXACT).unwrap();
                    assert!(v <= prev * (1.0 + 1e-12), "{m}oo{n} λ={lambda} E={e} n={k}");
                    prev = v;
                }
            }
        }
        // non-decreasing in λ
        for &e in &efficiencies {
            let mut prev = 0.0;
            for &lambda in &rates {
                let system = SystemSpec::new(m, n, lambda).unwrap();
                let v = pfd_average_periodic(&system, e, 4, tau, EXACT).unwrap();
                assert!(v >= prev * (1.0 - 1e-12));
                prev = v;
            }
        }
    }
}

#[test]
fn approximation_converges_as_rate_shrinks() {
    let tau = 8760.0;
    let shape = [0.3, 0.55, 0.8, 1.0];
    let schedule = TestSchedule::new(shape.iter().map(|f| f * tau).collect()).unwrap();
    for (m, n) in [(1, 1), (1, 2), (2, 3), (1, 3), (3, 4), (2, 6), (2, 8)] {
        let mut prev_gap = f64::INFINITY;
        for lambda_tau in [1e-2, 1e-3, 1e-4] {
            let system = SystemSpec::new(m, n, lambda_tau / tau).unwrap();
            let policy = TestPolicy::new(schedule.clone(), 0.42).unwrap();
            let exact = pfd_average_value(&system, &policy, EXACT);
            let approx = pfd_average_value(&system, &policy, APPROX);
            let gap = rel(approx, exact);
            assert!(
                gap < prev_gap,
                "{m}oo{n} at λτ = {lambda_tau}: {gap} >= {prev_gap}"
            );
            prev_gap = gap;
        }
        assert!(prev_gap < 0.02, "{m}oo{n}: {prev_gap}");
    }
}

#[test]
fn curves_stay_in_unit_interval_and_rise_between_tests() {
    let cases = [
        (SystemSpec::new(2, 6, 6.1e-5).unwrap(), 0.42),
        (SystemSpec::new(1, 3, 3e-4).unwrap(), 0.8),
        (SystemSpec::new(3, 3, 1e-4).unwrap(), 0.0),
    ];
    let schedule = TestSchedule::new(vec![1000.0, 4000.0, 5000.0, 8760.0]).unwrap();
    for (system, e) in cases {
        let policy = TestPolicy::new(schedule.clone(), e).unwrap();
        for mode in [EXACT, APPROX] {
            let curve = availability_curve(&system, &policy, 50.0, mode).unwrap();
            for w in curve.windows(2) {
                assert!((0.0..=1.0).contains(&w[0].availability));
                if w[0].t < w[1].t {
                    assert!(w[1].unavailability >= w[0].unavailability - 1e-15);
                }
            }
            for p in &curve {
                let a = system_availability(p.t, &system, &policy, mode).unwrap();
                let is_test = schedule.times().contains(&p.t);
                if !is_test {
                    assert_eq!(p.availability, a);
                }
                assert_eq!(p.unavailability, 1.0 - p.availability);
            }
        }
    }
}
