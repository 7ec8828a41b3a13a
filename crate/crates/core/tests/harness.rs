use std::fs;
use std::process::Command;

use proptest::prelude::*;
use tricomi::harness::config::{
    DataConfig, DataKind, ExponentsConfig, FamilyKind, GeometryConfig, GridConfig, ModelConfig,
    SemilinearConfig, SolveLinearConfig, SolveMode, StrichartzConfig, SymbolsConfig,
};
use tricomi::harness::scenarios::EXPONENTS_HEADER;
use tricomi::harness::{emit_config, parse_config, run_scenario, HarnessError, RunConfig, Scenario};

const BIN: &str = env!("CARGO_BIN_EXE_tricomi");

fn model(m: u32) -> ModelConfig {
    ModelConfig { m, n: 3, p: None, eps: None, big_m: 2.0 }
}

fn data_config() -> impl Strategy<Value = DataConfig> {
    (
        prop_oneof![Just(DataKind::Bump), Just(DataKind::GaussianTruncated), Just(DataKind::TwoBump)],
        0.01f64..10.0,
        proptest::option::of(0.05f64..1.0),
        proptest::option::of(0.01f64..1.0),
    )
        .prop_map(|(profile, amplitude, radius, sigma)| DataConfig { profile, amplitude, radius, sigma })
}

fn grid_config() -> impl Strategy<Value = GridConfig> {
    prop_oneof![
        (1e-3f64..0.1, 0.5f64..10.0).prop_map(|(h, pad)| GridConfig { r_max: None, n: None, h: Some(h), pad }),
        (5.0f64..200.0, 64usize..100_000)
            .prop_map(|(r, n)| GridConfig { r_max: Some(r), n: Some(n), h: None, pad: 5.0 }),
    ]
}

fn semilinear_config() -> impl Strategy<Value = SemilinearConfig> {
    (
        (1.0f64..200.0, 0.1f64..0.9, data_config(), 1e-4f64..0.1, 0.01f64..0.5, 0.1f64..2.0),
        (
            proptest::option::of(0.01f64..1.0),
            any::<bool>(),
            1e-3f64..0.1,
            1usize..100,
            1e-14f64..1e-6,
            proptest::option::of(proptest::collection::vec(1.01f64..4.0, 1..6)),
        ),
    )
        .prop_map(|((horizon, t0, data, dt_max, cfl_nl, record_every), rest)| {
            let (gamma, store_field, picard_dt, picard_max_iters, picard_tol, p_grid) = rest;
            SemilinearConfig {
                horizon,
                mode: SolveMode::TimeMarch,
                t0,
                data,
                dt_max,
                cfl_nl,
                record_every,
                gamma,
                store_field,
                picard_dt,
                picard_max_iters,
                picard_tol,
                p_grid: p_grid.or_else(|| Some(vec![1.5])),
            }
        })
}

fn strichartz_config() -> impl Strategy<Value = StrichartzConfig> {
    (
        (
            proptest::option::of(2.5f64..4.0),
            proptest::option::of(0.01f64..0.3),
            proptest::option::of(0.01f64..0.5),
            3.0f64..500.0,
        ),
        (
            prop_oneof![
                Just(FamilyKind::Widths),
                Just(FamilyKind::Shifted),
                Just(FamilyKind::TwoBump),
                Just(FamilyKind::Dilation)
            ],
            proptest::collection::vec(0.05f64..1.0, 1..9),
            any::<bool>(),
            any::<bool>(),
            proptest::collection::vec(3.0f64..500.0, 1..4),
            5.0f64..60.0,
            10usize..300,
        ),
    )
        .prop_map(|((q, gamma, delta, t_max), (family, values, inh, neg, boxes, ppf, n_log))| {
            StrichartzConfig {
                q,
                gamma,
                delta,
                t_max,
                family,
                values,
                inhomogeneous: inh,
                negative_control: neg,
                boxes,
                points_per_feature: ppf,
                n_log,
            }
        })
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let scenario = prop_oneof![
        Just(Scenario::Exponents),
        Just(Scenario::SolveLinear),
        Just(Scenario::SolveSemilinear),
        Just(Scenario::SweepP),
        Just(Scenario::VerifyStrichartz),
        Just(Scenario::CheckGeometry),
        Just(Scenario::Symbols),
    ];
    let model = (1u32..6, proptest::option::of(1.05f64..6.0), proptest::option::of(1e-4f64..2.0), 1.1f64..10.0);
    (
        (scenario, "[a-z]{1,8}(/[a-z0-9_]{1,8}){0,2}", 0u64..i64::MAX as u64, model),
        (
            proptest::option::of(grid_config()),
            proptest::option::of((1u32..4, 3u32..6).prop_map(|(m, n)| ExponentsConfig {
                sweep_m: Some([m, m + 2]),
                sweep_n: Some([n, n + 3]),
            })),
            proptest::option::of((0.0f64..50.0, 1usize..50, data_config(), proptest::option::of(data_config())).prop_map(
                |(t_final, snapshots, data, velocity)| SolveLinearConfig { t_final, snapshots, data, velocity },
            )),
            proptest::option::of(semilinear_config()),
            proptest::option::of(strichartz_config()),
            proptest::option::of((0.05f64..0.95, proptest::option::of(0.0f64..2.0), 2.0f64..1e4, 2usize..500).prop_map(
                |(t0, nu, t_hi, n)| GeometryConfig { t0, nu, t_hi, n_t: n, n_r: n, n_random: 7 * n },
            )),
            proptest::option::of((0.1f64..100.0, 0.1f64..100.0, 1usize..400).prop_map(
                |(t_max, lambda_max, n)| SymbolsConfig { t_max, lambda_max, n },
            )),
        ),
    )
        .prop_map(|((scenario, dir, seed, (m, p, eps, big_m)), tables)| {
            let (grid, exponents, solve_linear, semilinear, strichartz, geometry, symbols) = tables;
            let needs_p = matches!(scenario, Scenario::SolveSemilinear | Scenario::SweepP);
            let model = ModelConfig {
                m,
                n: 3,
                p: if needs_p { Some(p.unwrap_or(1.5)) } else { p },
                eps: if needs_p { Some(eps.unwrap_or(0.1)) } else { eps },
                big_m,
            };
            let semilinear = match (scenario, semilinear) {
                (Scenario::SweepP, None) => Some(SemilinearConfig { p_grid: Some(vec![1.5]), ..Default::default() }),
                (_, s) => s,
            };
            RunConfig {
                scenario,
                output_dir: dir.into(),
                seed,
                model,
                grid,
                exponents,
                solve_linear,
                semilinear,
                strichartz,
                geometry,
                symbols,
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn configs_round_trip(config in run_config()) {
        let text = emit_config(&config).unwrap();
        let parsed = parse_config(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(parsed, config);
    }
}

#[test]
fn exponent_sweep_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::minimal(Scenario::Exponents, model(1));
    config.output_dir = dir.path().to_path_buf();
    config.exponents = Some(ExponentsConfig { sweep_m: Some([1, 6]), sweep_n: Some([3, 8]) });
    let manifest = run_scenario(&config).unwrap();
    assert_eq!(manifest.outputs.len(), 1);
    let text = fs::read_to_string(dir.path().join("exponents.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), EXPONENTS_HEADER.join(","));
    assert!(lines.next().unwrap().starts_with("1,3,,"));
    assert_eq!(text.lines().count(), 1 + 36);
}

#[test]
fn manifest_echoes_config_and_resolved_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::minimal(
        Scenario::SolveSemilinear,
        ModelConfig { p: Some(2.0), eps: Some(0.05), ..model(1) },
    );
    config.output_dir = dir.path().to_path_buf();
    config.semilinear = Some(SemilinearConfig { horizon: 3.0, ..Default::default() });
    run_scenario(&config).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"], "solve-semilinear");
    assert_eq!(manifest["config"]["model"]["p"], 2.0);
    assert!(manifest["resolved"]["gamma"].as_f64().unwrap() > 0.0);
    assert_eq!(manifest["checksum"].as_str().unwrap().len(), 64);
    assert!(manifest["wall_time_s"].as_f64().is_some());
}

fn semilinear_run(dir: &std::path::Path) -> RunConfig {
    let mut config = RunConfig::minimal(
        Scenario::SolveSemilinear,
        ModelConfig { p: Some(1.3), eps: Some(0.5), ..model(1) },
    );
    config.output_dir = dir.to_path_buf();
    config.semilinear = Some(SemilinearConfig { horizon: 5.0, store_field: true, ..Default::default() });
    config
}

#[test]
fn reruns_give_identical_checksums() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = run_scenario(&semilinear_run(a.path())).unwrap();
    let mb = run_scenario(&semilinear_run(b.path())).unwrap();
    assert_eq!(ma.checksum, mb.checksum);
    for f in &ma.outputs {
        assert_eq!(fs::read(a.path().join(&f.name)).unwrap(), fs::read(b.path().join(&f.name)).unwrap());
    }
}

fn checksum_with_threads(threads: usize, config: &std::path::Path, out: &std::path::Path) -> String {
    let status = Command::new(BIN)
        .args(["--threads", &threads.to_string(), "--output-dir"])
        .arg(out)
        .arg("run")
        .arg("--config")
        .arg(config)
        .status()
        .unwrap();
    assert!(status.success());
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    m["checksum"].as_str().unwrap().to_string()
}

#[test]
fn checksum_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "scenario = \"verify-strichartz\"\n[model]\nm = 1\n[strichartz]\nt_max = 10.0\nvalues = [0.3, 0.5, 0.7]\ninhomogeneous = false\nn_log = 30\n",
    )
    .unwrap();
    let one = checksum_with_threads(1, &cfg, &dir.path().join("t1"));
    let three = checksum_with_threads(3, &cfg, &dir.path().join("t3"));
    assert_eq!(one, three);
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(BIN).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_string()
    };
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let unknown = write("u.toml", "scenario = \"teleport\"\n[model]\nm = 1\n");
    assert_eq!(exit_code(&["run", "--config", &unknown, "--output-dir", out]), 2);
    let syntax = write("s.toml", "scenario = \"exponents\"\n[model\nm = 1\n");
    assert_eq!(exit_code(&["run", "--config", &syntax, "--output-dir", out]), 2);
    let picard = write(
        "p.toml",
        "scenario = \"solve-semilinear\"\n[model]\nm = 1\np = 5.0\neps = 0.01\n[semilinear]\nmode = \"picard\"\n",
    );
    assert_eq!(exit_code(&["run", "--config", &picard, "--output-dir", out]), 2);
    assert_eq!(exit_code(&["exponents", "--m", "1", "--n", "3", "--output-dir", out]), 0);
    assert_eq!(exit_code(&["exponents", "--sweep", "m=1..2", "n=x..4", "--output-dir", out]), 2);
    assert_eq!(exit_code(&["run", "--config", "/definitely/missing.toml"]), 1);
}

#[test]
fn cli_exponents_prints_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["exponents", "--m", "2", "--n", "4", "--p", "1.5", "--output-dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], EXPONENTS_HEADER.join(","));
    assert!(lines[1].starts_with("2,4,1.5"));
}

#[test]
fn sweep_p_accepts_grid_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    fs::write(&cfg, "scenario = \"sweep-p\"\n[model]\nm = 1\np = 1.5\neps = 0.05\n[semilinear]\nhorizon = 2.0\np_grid = [9.0]\n")
        .unwrap();
    let out = dir.path().join("out");
    let status = Command::new(BIN)
        .args(["sweep-p", "--p-grid", "1.2,2.0,3.0", "--config"])
        .arg(&cfg)
        .arg("--output-dir")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let lines = fs::read_to_string(out.join("outcome.json-lines")).unwrap();
    assert_eq!(lines.lines().count(), 3);
    for line in lines.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["kind"].is_string());
    }
}

#[test]
fn validation_errors_map_to_exit_two() {
    let mut config = RunConfig::minimal(Scenario::SweepP, ModelConfig { p: Some(1.5), eps: Some(0.1), ..model(1) });
    config.semilinear = Some(SemilinearConfig { p_grid: Some(vec![]), ..Default::default() });
    let err = run_scenario(&config).unwrap_err();
    assert!(matches!(err, HarnessError::Validation(_)));
    assert_eq!(err.exit_code(), 2);
}
