use proptest::prelude::*;
use tricomi::exponents::*;

fn residual((a, b, c): (f64, f64, f64), x: f64) -> f64 {
    (a * x * x + b * x + c) / (a * x * x).abs().max(1.0)
}

#[test]
fn p_crit_below_p_conf_on_grid() {
    for m in 1..=10 {
        for n in 3..=10 {
            let r = ExponentReport::compute(m, n).unwrap();
            assert!(r.p_crit < r.p_conf, "m={m} n={n}");
            assert!(r.q0 > r.q_min, "m={m} n={n}");
            // q_min - 2 = 2(2 - m) / ((m+2)n - 2)
            let d = (m as f64 + 2.0) * n as f64;
            assert!((r.q_min - 2.0 - 2.0 * (2.0 - m as f64) / (d - 2.0)).abs() < 1e-14);
        }
    }
}

#[test]
fn undamped_limit_reproduces_strauss() {
    for n in 3..=10 {
        let a = p_crit(0, n).unwrap();
        let b = strauss_exponent(n).unwrap();
        assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
    }
}

#[test]
fn quadratic_roots_have_small_residuals() {
    for m in 0..=20 {
        for n in 3..=12 {
            let p = p_crit(m, n).unwrap();
            assert!(residual(p_crit_quadratic(m, n), p).abs() < 1e-12, "m={m} n={n}");
        }
    }
    for n in 2..=12 {
        let p = strauss_exponent(n).unwrap();
        assert!(residual(strauss_quadratic(n), p).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn gamma_window_is_open_across_the_range() {
    for m in 1..=10 {
        for n in 3..=10 {
            let (lo_p, hi_p) = (p_crit(m, n).unwrap(), p_conf(m, n));
            for k in 1..=200 {
                let p = lo_p + (hi_p - lo_p) * k as f64 / 201.0;
                let params = ModelParams::new(m, n, p, 0.1, 2.0).unwrap();
                let (lo, hi) = gamma_interval(&params).unwrap();
                assert!(lo < hi, "m={m} n={n} p={p}");
            }
        }
    }
}

#[test]
fn gamma_window_closes_at_p_crit() {
    // width shrinks monotonically as p decreases toward p_crit, and its zero
    // sits at p_crit: bisect the sign change of hi - lo independently
    let (m, n) = (1, 3);
    let pc = p_crit(m, n).unwrap();
    let width = |p: f64| {
        let (lo, hi) = gamma_window(m, n, p);
        hi - lo
    };
    let mut prev = width(pc + 1e-2);
    for k in 3..=9 {
        let w = width(pc + 10f64.powi(-k));
        assert!(w > 0.0 && w < prev, "k={k}");
        prev = w;
    }
    let (mut a, mut b) = (1.2, 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if width(mid) > 0.0 {
            b = mid;
        } else {
            a = mid;
        }
    }
    assert!((a - pc).abs() < 1e-12);
}

#[test]
fn gap_between_older_ranges_is_nonempty() {
    let (m, n) = (1, 3);
    let (lo, hi) = (p_crit(m, n).unwrap(), p_conf(m, n));
    let gap = (1..100)
        .map(|k| lo + (hi - lo) * k as f64 / 100.0)
        .filter(|&p| {
            let r = earlier_ranges(&ModelParams::new(m, n, p, 0.1, 2.0).unwrap());
            !r.global_conditions_hold && !r.blowup_range_holds
        })
        .count();
    assert!(gap > 0);
}

#[test]
fn damped_coefficients_increase_to_one() {
    let mut prev = -1.0;
    for m in 0..=64 {
        let (mu, alpha) = damped_wave_coeffs(m);
        assert!(mu > prev && mu < 1.0);
        assert_eq!(alpha, 2.0 * mu);
        prev = mu;
    }
}

proptest! {
    #[test]
    fn gamma_bound_increases_with_q(m in 1u32..8, n in 3u32..9, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (q_min, q0) = q_bounds(m, n);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-9);
        let q1 = q_min + 1e-6 + lo * 2.0 * (q0 - q_min);
        let q2 = q_min + 1e-6 + hi * 2.0 * (q0 - q_min);
        let g1 = strichartz_gamma_bound(m, n, q1).unwrap();
        let g2 = strichartz_gamma_bound(m, n, q2).unwrap();
        prop_assert!(g1 > 0.0 && g2 > g1);
    }

    #[test]
    fn out_of_window_p_is_rejected(m in 1u32..6, n in 3u32..8, t in 0.0f64..1.0) {
        let pc = p_crit(m, n).unwrap();
        let below = 1.0 + 1e-9 + t * (pc - 1.0 - 2e-9);
        let params = ModelParams::new(m, n, below, 0.1, 2.0).unwrap();
        let rejected = matches!(gamma_interval(&params), Err(ExponentError::ExponentOutOfRange { .. }));
        prop_assert!(rejected);
    }
}
