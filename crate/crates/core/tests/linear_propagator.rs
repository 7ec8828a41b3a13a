use proptest::prelude::*;
use tricomi::linear_propagator::{
    decay_slope, fd_evolve, fd_oracle, fd_oracle_richardson, log_times, predicted_decay_exponent,
    solve_linear, weighted_field_norm, FdOptions, LinearSetup, NormAccumulator, RadialGrid,
    RadialProfile, SpaceTimeWeight,
};
use tricomi::phase_geometry::{PhaseFn, WeightSpec};
use tricomi::special_functions::evolve_mode;

/// Relative weighted-L² distance on the coarser grid; `stride` maps its nodes
/// onto the finer one.
fn rel_l2(coarse: &[f64], fine: &[f64], stride: usize, h: f64) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for (i, a) in coarse.iter().enumerate() {
        let r = i as f64 * h;
        let b = fine[i * stride];
        num += (a - b).powi(2) * r * r;
        den += b * b * r * r;
    }
    (num / den).sqrt()
}

#[test]
fn spectral_matches_richardson_fd_at_t10() {
    let m = 1;
    let big_m = 2.0;
    let f = RadialProfile::bump(1.0, big_m - 1.0);
    let g = RadialProfile::Zero;
    let times = [1.0, 2.5, 5.0, 10.0];
    let spec_setup = LinearSetup::new(m, big_m, RadialGrid::new(24.0, 2048).unwrap()).unwrap();
    let spectral = solve_linear(
        &spec_setup,
        &f.sample(&spec_setup.grid),
        &g.sample(&spec_setup.grid),
        &times,
    )
    .unwrap();
    // Richardson-extrapolated leapfrog on (h, h/2), h = 24/16384
    let fd_setup = LinearSetup::new(m, big_m, RadialGrid::new(24.0, 16384).unwrap()).unwrap();
    let fd = fd_oracle_richardson(&fd_setup, &f, &g, &times, FdOptions::default()).unwrap();
    for (s, o) in spectral.snapshots.iter().zip(&fd.snapshots) {
        let err = rel_l2(&s.u, &o.u, 8, spec_setup.grid.h());
        assert!(err < 1e-4, "t = {} rel L2 error {err:e}", s.t);
    }
    for i in 0..spectral.snapshots.len() {
        assert!(spectral.support_leak(i) < 1e-8);
    }
}

#[test]
fn fd_second_order_in_h() {
    let m = 1;
    let big_m = 2.0;
    let f = RadialProfile::bump(1.0, 1.0);
    let times = [3.0];
    let reference = {
        let s = LinearSetup::new(m, big_m, RadialGrid::new(8.0, 1024).unwrap()).unwrap();
        solve_linear(&s, &f.sample(&s.grid), &vec![0.0; 1025], &times).unwrap()
    };
    let mut errs = Vec::new();
    for n in [256usize, 512] {
        let s = LinearSetup::new(m, big_m, RadialGrid::new(8.0, n).unwrap()).unwrap();
        let fd = fd_oracle(&s, &f.sample(&s.grid), &vec![0.0; n + 1], &times, FdOptions::default())
            .unwrap();
        errs.push(rel_l2(&fd.snapshots[0].u, &reference.snapshots[0].u, 1024 / n, s.grid.h()));
    }
    let order = (errs[0] / errs[1]).log2();
    assert!((order - 2.0).abs() < 0.3, "observed order {order}");
}

#[test]
fn fd_single_mode_amplitude() {
    // w = sin(λ_k r) is a standing mode of the Dirichlet problem, so the FD
    // amplitude must follow V₁(t, λ_k).
    let m = 1;
    let n = 2000;
    let grid = RadialGrid::new(10.0, n).unwrap();
    let lambda = grid.lambda(5);
    let f: Vec<f64> = (0..=n)
        .map(|i| {
            let r = grid.r(i);
            if i == 0 {
                lambda
            } else {
                (lambda * r).sin() / r
            }
        })
        .collect();
    let setup = LinearSetup::new(m, 2.0, grid).unwrap();
    let t = 2.0;
    let fd = fd_evolve(&setup, &f, &vec![0.0; n + 1], &[t], FdOptions::default()).unwrap();
    let mode = evolve_mode(m, lambda, t, (1.0, 0.0)).unwrap();
    for i in [n / 7, n / 3, n / 2] {
        let r = grid.r(i);
        let expect = mode.v * (lambda * r).sin() / r;
        let got = fd.snapshots[0].u[i];
        assert!((got - expect).abs() < 1e-5, "r = {r}: {got} vs {expect}");
    }
}

fn decay_run(m: u32) -> f64 {
    let big_m = 2.0;
    let phase = PhaseFn::new(m);
    let t_lo = phase.inverse(10.0 * big_m);
    let t_hi = phase.inverse(200.0);
    let setup = LinearSetup::for_horizon(m, big_m, t_hi, 0.02, 5.0).unwrap();
    let f = RadialProfile::bump(1.0, big_m - 1.0).sample(&setup.grid);
    let g = vec![0.0; setup.grid.n + 1];
    let times = log_times(t_lo, t_hi, 16);
    let field = solve_linear(&setup, &f, &g, &times).unwrap();
    for i in 0..field.snapshots.len() {
        assert!(field.support_leak(i) < 1e-8);
    }
    decay_slope(&field, (t_lo, t_hi)).unwrap()
}

#[test]
fn sup_norm_decay_rates() {
    for m in [1u32, 2] {
        let target = -predicted_decay_exponent(m);
        let slope = decay_run(m);
        assert!(
            (slope - target).abs() <= 0.1 * target.abs(),
            "m={m}: slope {slope} target {target}"
        );
    }
}

#[test]
fn linearity() {
    let s = LinearSetup::new(1, 2.0, RadialGrid::new(16.0, 800).unwrap()).unwrap();
    let f1 = RadialProfile::bump(1.0, 1.0).sample(&s.grid);
    let f2 = RadialProfile::Bump {
        amplitude: 1.0,
        radius: 0.3,
        center: 0.5,
    }
    .sample(&s.grid);
    let z = vec![0.0; 801];
    let (a, b) = (0.7, -1.9);
    let mix: Vec<f64> = f1.iter().zip(&f2).map(|(x, y)| a * x + b * y).collect();
    let times = [0.5, 3.0, 6.0];
    let u1 = solve_linear(&s, &f1, &z, &times).unwrap();
    let u2 = solve_linear(&s, &f2, &z, &times).unwrap();
    let um = solve_linear(&s, &mix, &z, &times).unwrap();
    for k in 0..times.len() {
        let scale = um.sup_norm(k);
        for i in 0..=800 {
            let lin = a * u1.snapshots[k].u[i] + b * u2.snapshots[k].u[i];
            assert!((lin - um.snapshots[k].u[i]).abs() <= 1e-12 * scale.max(1.0));
        }
    }
}

#[test]
fn weighted_norm_properties() {
    let m = 1;
    let big_m = 2.0;
    let spec = WeightSpec {
        gamma: 0.25,
        q: 3.2,
        big_m,
    };
    let run = |n: usize, nt: usize| {
        let s = LinearSetup::new(m, big_m, RadialGrid::new(14.0, n).unwrap()).unwrap();
        let f = RadialProfile::bump(1.0, 1.0).sample(&s.grid);
        let g = RadialProfile::bump(0.5, 0.6).sample(&s.grid);
        let times: Vec<f64> = (0..=nt).map(|i| 5.0 * i as f64 / nt as f64).collect();
        solve_linear(&s, &f, &g, &times).unwrap()
    };
    let coarse = weighted_field_norm(&run(700, 200), &spec);
    let fine = weighted_field_norm(&run(1400, 400), &spec);
    assert!(((coarse - fine) / fine).abs() < 5e-3, "{coarse} vs {fine}");

    // γ = 0 against a direct space-time L^q sum
    let field = run(700, 100);
    let plain = weighted_field_norm(
        &field,
        &WeightSpec {
            gamma: 0.0,
            ..spec
        },
    );
    let phase = PhaseFn::new(m);
    let h = field.grid.h();
    let mut total = 0.0;
    for (j, s) in field.snapshots.iter().enumerate() {
        let reach = phase.eval(s.t) + big_m - 1.0;
        let last = ((reach / h).floor() as usize).min(field.grid.n);
        let mut inner = 0.0;
        for i in 0..=last {
            let r = i as f64 * h;
            let wgt = if i == 0 || i == last { 0.5 } else { 1.0 };
            inner += wgt * s.u[i].abs().powf(spec.q) * 4.0 * std::f64::consts::PI * r * r * h;
        }
        let tw = if j == 0 || j + 1 == field.snapshots.len() { 0.5 } else { 1.0 };
        total += tw * inner * 0.05;
    }
    let direct = total.powf(1.0 / spec.q);
    assert!(((plain - direct) / direct).abs() < 1e-12);

    let mut acc = NormAccumulator::new(m, field.grid, SpaceTimeWeight::Characteristic { big_m }, 0.1, 2.0);
    acc.push(0.0, &vec![0.0; field.grid.n + 1]);
    assert_eq!(acc.norm(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn parseval_on_random_bumps(a in 0.1f64..3.0, rad in 0.2f64..1.0, c in 0.0f64..0.8) {
        use tricomi::linear_propagator::{SineTransform, SpectralField};
        let grid = RadialGrid::new(6.0, 512).unwrap();
        let prof = RadialProfile::Bump { amplitude: a, radius: rad, center: c };
        let u = prof.sample(&grid);
        let tr = SineTransform::new(grid.n);
        let sf = SpectralField::from_radial(grid, &u, &tr);
        let e_grid: f64 = (1..grid.n).map(|i| (grid.r(i) * u[i]).powi(2)).sum::<f64>() * grid.h();
        prop_assert!((sf.coefficient_energy() - e_grid).abs() <= 1e-12 * e_grid);
    }
}
