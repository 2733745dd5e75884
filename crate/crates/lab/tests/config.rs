use std::path::PathBuf;

use proptest::prelude::*;
use travwave::config::{
    BoundaryKind, DataConfig, ExperimentConfig, ExperimentKind, GridConfig, MotionKind, ProfileConfig, SweepConfig,
    SystemConfig,
};
use travwave::LabError;
use travwave_core::system::SYSTEM_CATALOG;

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

const MINIMAL: &str = r#"
experiment = "stability"
delta = 0.5

[system]
name = "semilinear-bilinear"

[profile]
name = "sech"
amplitude = 1.0

[grid]
x_min = -20.0
x_max = 20.0
nx = 201
t_end = 1.0
"#;

fn invalid(text: &str) -> String {
    match ExperimentConfig::from_toml(text) {
        Err(LabError::Config(msg)) => msg,
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn shipped_configs_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let again = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 9);
}

#[test]
fn defaults_fill_omitted_keys() {
    let cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
    assert_eq!(cfg.seed, 0);
    assert_eq!(cfg.output_every, 10);
    assert_eq!(cfg.system.kappa, 1.0);
    assert_eq!(cfg.grid.cfl, 0.4);
    assert_eq!(cfg.grid.boundary, BoundaryKind::Quiet);
    assert_eq!(cfg.data, DataConfig::default());
}

#[test]
fn unknown_keys_are_rejected() {
    let msg = invalid(&format!("colour = \"red\"\n{MINIMAL}"));
    assert!(msg.contains("colour"), "{msg}");
    let msg = invalid(&MINIMAL.replace("amplitude = 1.0", "amplitude = 1.0\nwidth = 2.0"));
    assert!(msg.contains("width"), "{msg}");
}

#[test]
fn invariants_are_enforced() {
    assert!(invalid(&MINIMAL.replace("delta = 0.5", "delta = 1.0")).contains("delta"));
    assert!(invalid(&MINIMAL.replace("delta = 0.5", "delta = 0.0")).contains("delta"));
    assert!(invalid(&format!("{MINIMAL}\n[data]\nepsilon = -1e-3\n")).contains("epsilon"));
    assert!(invalid(&MINIMAL.replace("semilinear-bilinear", "burgers")).contains("burgers"));
    assert!(invalid(&MINIMAL.replace("\"sech\"", "\"kink\"")).contains("kink"));
    assert!(invalid(&format!("{MINIMAL}\n[data]\nshape = \"square\"\n")).contains("square"));
    assert!(matches!(
        ExperimentConfig::from_toml(&MINIMAL.replace("nx = 201", "nx = 3")),
        Err(LabError::Core(_))
    ));
}

#[test]
fn experiment_tables_are_required_and_checked() {
    let conv = MINIMAL.replace("\"stability\"", "\"convergence\"");
    assert!(invalid(&conv).contains("[convergence]"));
    assert!(invalid(&format!("{conv}\n[convergence]\nnx = [101, 201]\n")).contains("three"));
    assert!(invalid(&format!("{conv}\n[convergence]\nnx = [401, 201, 801]\n")).contains("increasing"));

    let sweep = MINIMAL.replace("\"stability\"", "\"sweep\"");
    let capped = format!("{sweep}\n[sweep]\nepsilon = [1e-3, 2e-3, 4e-3]\namplitude = [0.1, 0.2]\nmax_runs = 5\n");
    assert!(invalid(&capped).contains("max_runs"));
    assert!(invalid(&format!("{sweep}\n[sweep]\nepsilon = [1e-3]\nrun = \"sweep\"\n")).contains("sweep.run"));

    let amp = MINIMAL.replace("\"stability\"", "\"amplification\"");
    assert!(invalid(&format!("{amp}\n[amplification]\nt_ends = []\n")).contains("t_ends"));
}

fn config_strategy() -> impl Strategy<Value = ExperimentConfig> {
    let kinds = prop::sample::select(vec![
        ExperimentKind::Stability,
        ExperimentKind::ZeroPerturbation,
        ExperimentKind::Violation,
        ExperimentKind::BoostEquivalence,
    ]);
    let motions = prop::sample::select(vec![MotionKind::Still, MotionKind::Right, MotionKind::Left]);
    (
        kinds,
        any::<u64>(),
        0.01..0.99f64,
        1usize..100,
        prop::sample::select(SYSTEM_CATALOG.to_vec()),
        prop::array::uniform4(-3.0..3.0f64),
        0.0..2.0f64,
        (-100.0..-10.0f64, 10.0..100.0f64, 20usize..2000, 0.1..50.0f64),
        (motions, -5.0..5.0f64, 0.1..5.0f64, 0.0..1.0f64, any::<bool>()),
    )
        .prop_map(|(experiment, seed, delta, output_every, name, p, amplitude, g, d)| ExperimentConfig {
            experiment,
            seed,
            delta,
            output_every,
            out: None,
            system: SystemConfig {
                name: name.to_string(),
                alpha: p[0],
                beta: p[1],
                gamma: p[2],
                kappa: p[3],
            },
            profile: ProfileConfig {
                name: "sech".into(),
                amplitude,
                direction: None,
            },
            grid: GridConfig {
                x_min: g.0,
                x_max: g.1,
                nx: g.2,
                t_end: g.3,
                cfl: 0.4,
                boundary: BoundaryKind::Quiet,
            },
            data: DataConfig {
                shape: "gaussian".into(),
                center: d.1,
                width: d.2,
                epsilon: d.3,
                normalize: d.4,
                motion: d.0,
                direction: None,
                file: None,
            },
            amplification: None,
            violation: None,
            boost: None,
            convergence: None,
            sweep: None,
        })
}

proptest! {
    #[test]
    fn parse_serialize_parse_is_identity(cfg in config_strategy()) {
        let text = cfg.to_toml().unwrap();
        let parsed = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&parsed, &cfg);
        prop_assert_eq!(ExperimentConfig::from_toml(&parsed.to_toml().unwrap()).unwrap(), parsed);
    }
}

#[test]
fn sweep_axes_expand_to_the_cross_product() {
    let mut cfg = ExperimentConfig::from_toml(MINIMAL).unwrap();
    cfg.experiment = ExperimentKind::Sweep;
    cfg.sweep = Some(SweepConfig {
        epsilon: vec![1e-3, 2e-3],
        amplitude: vec![0.1, 0.2, 0.3],
        run: ExperimentKind::Stability,
        max_runs: 6,
    });
    let points = travwave::sweep::expand(&cfg).unwrap();
    assert_eq!(points.len(), 6);
    assert_eq!((points[0].0, points[0].1), (1e-3, 0.1));
    assert_eq!((points[5].0, points[5].1), (2e-3, 0.3));
    for (e, a, c) in &points {
        assert_eq!(c.experiment, ExperimentKind::Stability);
        assert_eq!((c.data.epsilon, c.profile.amplitude), (*e, *a));
        assert!(c.sweep.is_none());
    }
}
