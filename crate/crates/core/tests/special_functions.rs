use proptest::prelude::*;
use tricomi::phase_geometry::PhaseFn;
use tricomi::special_functions::kummer::{kummer_asymptotic_parts, kummer_series};
use tricomi::special_functions::{
    compare_routes, fit_v1_envelope, fundamental_pair_ode, least_squares_fit, ModeIntegrator,
    SymbolEvaluator,
};

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn three_routes_agree() {
    let integ = ModeIntegrator::default();
    for m in 1..=3 {
        let phase = PhaseFn::new(m);
        let mut ws = vec![0.0];
        ws.extend(log_grid(1e-3, 100.0, 60));
        for w in ws {
            let t = phase.inverse(w);
            let cmp = compare_routes(m, t, 1.0, &integ).unwrap();
            let d = cmp.max_discrepancy(1e-7, 1e-9);
            assert!(d < 1e-7, "m={m} w={w} discrepancy {d:e} {cmp:?}");
            assert!(cmp.max_imaginary() < 1e-10, "m={m} w={w}");
        }
    }
}

#[test]
fn wronskian_at_t10() {
    let integ = ModeIntegrator::default();
    for m in 1..=3 {
        for lambda in [0.5, 3.0, 10.0] {
            let p = fundamental_pair_ode(&integ, m, 10.0, lambda).unwrap();
            assert!((p.wronskian() - 1.0).abs() < 1e-8);
            let b = SymbolEvaluator::new(m).unwrap().pair(10.0, lambda);
            assert!((b.wronskian() - 1.0).abs() < 1e-8);
        }
    }
}

#[test]
fn envelope_slope_matches_amplitude_exponent() {
    for m in 1..=3 {
        let fit = fit_v1_envelope(m, 10.0, 1000.0, 200_000, 40).unwrap();
        let target = -(m as f64) / (2.0 * (m as f64 + 2.0));
        assert!(
            (fit.slope - target).abs() <= 0.15 * target.abs(),
            "m={m} slope {} target {target}",
            fit.slope
        );
    }
}

#[test]
fn asymptotic_components_have_expected_slopes() {
    // |exp part| ~ w^{a-b} = w^{-a} (b = 2a) and |alg part| ~ w^{-a}
    for m in 1..=3u32 {
        let a = m as f64 / (2.0 * (m as f64 + 2.0));
        let mut e = Vec::new();
        let mut g = Vec::new();
        for y in log_grid(50.0, 5000.0, 30) {
            let parts = kummer_asymptotic_parts(a, 2.0 * a, y);
            e.push((y.ln(), parts.exp_part.norm().ln()));
            g.push((y.ln(), parts.alg_part.norm().ln()));
        }
        let (se, _) = least_squares_fit(&e);
        let (sg, _) = least_squares_fit(&g);
        assert!((se + a).abs() < 0.05 * a + 1e-3, "m={m} exp slope {se}");
        assert!((sg + a).abs() < 0.05 * a + 1e-3, "m={m} alg slope {sg}");
    }
}

proptest! {
    #[test]
    fn kummer_series_conjugate_symmetric(a in 0.05f64..2.0, y in 0.0f64..25.0) {
        let p = kummer_series(a, 2.0 * a, y).unwrap();
        let q = kummer_series(a, 2.0 * a, -y).unwrap();
        prop_assert!((p - q.conj()).norm() <= 1e-14 * p.norm().max(1.0));
    }

    #[test]
    fn bessel_pair_wronskian_is_one(m in 1u32..4, t in 0.0f64..30.0, lambda in 0.0f64..20.0) {
        let p = SymbolEvaluator::new(m).unwrap().pair(t, lambda);
        prop_assert!((p.wronskian() - 1.0).abs() < 1e-8);
    }
}
