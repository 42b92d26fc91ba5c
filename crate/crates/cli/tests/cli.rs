use std::path::{Path, PathBuf};
use std::process::Command;

use topotrack::grid::{gen_gaussian_mixture, save_series, Grid, ScalarField, TimeSeries};
use topotrack::persistence::load_diagram;
use topotrack::persistence::PairClass;
use topotrack::tracking::EventKind;
use topotrack_cli::{
    cmd_bench, cmd_diagram, cmd_gen, cmd_track, BenchArgs, BenchMode, ClassArg, CliError, DiagramArgs, GenArgs,
    MetricArgs, Scenario, SolverArgs, ThresholdArgs, TrackArgs, Tracker,
};

fn gen(scenario: Scenario, out: &Path, timesteps: Option<usize>, noise: f64) -> serde_json::Value {
    cmd_gen(&GenArgs {
        scenario,
        out: out.to_path_buf(),
        timesteps,
        n: None,
        dims: None,
        noise,
        seed: 1,
    })
    .unwrap()
}

fn diagram_args(series: &Path, out: &Path, raw: bool) -> DiagramArgs {
    DiagramArgs {
        series: series.to_path_buf(),
        out: out.to_path_buf(),
        threshold: ThresholdArgs::default(),
        raw,
        workers: Some(2),
    }
}

fn track_args(input: &Path, out: &Path) -> TrackArgs {
    TrackArgs {
        input: input.to_path_buf(),
        out: Some(out.to_path_buf()),
        polyline: None,
        class: ClassArg::SaddleMax,
        tracker: Tracker::Wasserstein,
        metric: MetricArgs::default(),
        threshold: ThresholdArgs::default(),
        solver: SolverArgs::default(),
        epsilon: 0.0,
        stride: 1,
        workers: Some(2),
        raw: false,
    }
}

fn bench_args(mode: BenchMode) -> BenchArgs {
    BenchArgs {
        mode,
        out: None,
        pairs: 200,
        near_diagonal: 0.8,
        thresholds: vec![0.0, 0.01, 0.05],
        auction_accuracy: 1e-6,
        strides: vec![1, 5],
        threshold_fraction: 0.02,
        metric: MetricArgs::default(),
        seed: 3,
        workers: Some(2),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_topotrack"))
}

#[test]
fn gen_writes_steps_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let m = gen(Scenario::MergeFixture, &out, Some(1), 0.0);
    assert_eq!(m["scenario"], "merge_fixture");
    assert_eq!(m["timesteps"], 1);
    assert_eq!(m["files"], serde_json::json!(["step_0.json"]));
    let on_disk: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, m);
}

#[test]
fn gen_is_reproducible_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    gen(Scenario::Gaussians, &a, Some(3), 0.1);
    gen(Scenario::Gaussians, &b, Some(3), 0.1);
    for k in 0..3 {
        let name = format!("step_{k}.json");
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap()
        );
    }
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(
        cmd_gen(&GenArgs {
            scenario: Scenario::Whirling,
            out: dir.path().into(),
            timesteps: Some(0),
            n: None,
            dims: None,
            noise: 0.0,
            seed: 0,
        }),
        Err(CliError::Usage(_))
    ));
    let series = dir.path().join("s");
    gen(Scenario::Whirling, &series, Some(3), 0.0);
    let mut args = track_args(&series, &dir.path().join("t.json"));
    args.stride = 0;
    assert!(matches!(cmd_track(&args), Err(CliError::Usage(_))));
    let mut args = track_args(&series, &dir.path().join("t.json"));
    args.solver.auction_accuracy = Some(1e-3);
    assert!(matches!(cmd_track(&args), Err(CliError::Usage(_))));
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["gen", "nonsense", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let series = dir.path().join("s");
    let ok = bin()
        .args(["gen", "whirling", "--timesteps", "2", "--out"])
        .arg(&series)
        .output()
        .unwrap();
    assert!(ok.status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(manifest["timesteps"], 2);

    let bad = bin()
        .arg("track")
        .arg(&series)
        .args(["--solver", "full", "--auction-accuracy", "0.01"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
}

#[test]
fn diagram_rerun_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    gen(Scenario::Whirling, &series, Some(4), 0.05);
    let first = cmd_diagram(&diagram_args(&series, &dir.path().join("d1"), false)).unwrap();
    let second = cmd_diagram(&diagram_args(&series, &dir.path().join("d2"), false)).unwrap();
    assert_eq!(first.len(), 4);
    for (a, b) in first.iter().zip(&second) {
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }
}

#[test]
fn constant_field_gives_only_essential_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    let grid = Grid::<f64>::unit([6, 5, 1]).unwrap();
    let field = ScalarField::new(grid, vec![0.5; 30], 0).unwrap();
    save_series(&TimeSeries::new(vec![field]).unwrap(), &series).unwrap();
    let paths = cmd_diagram(&diagram_args(&series, &dir.path().join("d"), true)).unwrap();
    let d = load_diagram::<f64>(&paths[0]).unwrap();
    assert_eq!(d.pairs.len(), 2);
    assert!(d.pairs.iter().all(|p| p.essential && p.persistence == 0.0));
}

#[test]
fn four_gaussians_give_four_maxima_rows() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    let grid = Grid::<f64>::unit([65, 65, 1]).unwrap();
    let centers = [
        [0.25, 0.25, 0.0],
        [0.75, 0.25, 0.0],
        [0.25, 0.75, 0.0],
        [0.75, 0.75, 0.0],
    ];
    let field = gen_gaussian_mixture(grid, &centers, &[1.0, 0.8, 0.6, 0.4], &[0.06; 4]).unwrap();
    save_series(&TimeSeries::new(vec![field]).unwrap(), &series).unwrap();
    let mut args = diagram_args(&series, &dir.path().join("d"), true);
    args.threshold.threshold_fraction = Some(0.01);
    let paths = cmd_diagram(&args).unwrap();
    let d = load_diagram::<f64>(&paths[0]).unwrap();
    let maxima = d.class_pairs(PairClass::SaddleMax);
    assert_eq!(maxima.len(), 4);
    assert_eq!(maxima.iter().filter(|p| p.essential).count(), 1);
}

#[test]
fn diagonal_mode_accepts_long_names() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    gen(Scenario::Whirling, &series, Some(2), 0.0);
    for mode in ["lifted_eq8", "classical_projection", "lifted", "projection"] {
        let out = bin()
            .arg("track")
            .arg(&series)
            .args(["--diagonal-mode", mode, "--out"])
            .arg(dir.path().join("t.json"))
            .output()
            .unwrap();
        assert!(out.status.success(), "{mode}");
    }
}

#[test]
fn gamma_takes_comma_separated_weights() {
    let mut m = MetricArgs::default();
    m.gamma = Some(vec![1.0, 0.5, 0.0]);
    assert_eq!(m.params(PairClass::SaddleMax).unwrap().gamma, [1.0, 0.5, 0.0]);
    m.gamma = Some(vec![2.0, 3.0]);
    assert_eq!(m.params(PairClass::SaddleMax).unwrap().gamma, [2.0, 3.0, 0.0]);
    m.gamma = Some(vec![1.0]);
    assert!(matches!(m.params(PairClass::SaddleMax), Err(CliError::Usage(_))));

    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    gen(Scenario::Whirling, &series, Some(2), 0.0);
    let out = bin()
        .arg("track")
        .arg(&series)
        .args(["--gamma", "1,1,0", "--out"])
        .arg(dir.path().join("t.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn diagram_dir_and_series_track_alike() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    let diagrams = dir.path().join("d");
    gen(Scenario::Whirling, &series, Some(12), 0.05);
    cmd_diagram(&diagram_args(&series, &diagrams, false)).unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let mut args = track_args(&series, &a);
    args.threshold.threshold_fraction = Some(0.05);
    args.stride = 2;
    cmd_track(&args).unwrap();
    args.input = diagrams;
    args.out = Some(b.clone());
    cmd_track(&args).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn merge_events_need_a_positive_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    gen(Scenario::MergeFixture, &series, None, 0.0);
    let mut args = track_args(&series, &dir.path().join("t.json"));
    args.raw = true;
    args.threshold.threshold_fraction = Some(0.02);
    assert!(cmd_track(&args).unwrap().events.is_empty());
    args.epsilon = 0.4;
    let r = cmd_track(&args).unwrap();
    assert_eq!(r.events.len(), 1);
    assert_eq!(r.events[0].kind, EventKind::Merge);
}

#[test]
fn both_classes_and_polylines() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    gen(Scenario::Whirling, &series, Some(5), 0.0);
    let out = dir.path().join("t.json");
    let mut args = track_args(&series, &out);
    args.class = ClassArg::Both;
    args.polyline = Some(dir.path().join("t.vtk"));
    let r = cmd_track(&args).unwrap();
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let classes: Vec<&str> = json["trajectories"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["class"].as_str().unwrap())
        .collect();
    assert!(classes.contains(&"saddle_max") && classes.contains(&"min_saddle"));
    let ids: Vec<u64> = json["trajectories"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, (0..r.trajectories.len() as u64).collect::<Vec<_>>());
    let vtk = std::fs::read_to_string(dir.path().join("t.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile"));
}

#[test]
fn overlap_needs_a_series() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("s");
    let diagrams = dir.path().join("d");
    gen(Scenario::Translating, &series, Some(6), 0.0);
    cmd_diagram(&diagram_args(&series, &diagrams, false)).unwrap();
    let mut args = track_args(&diagrams, &dir.path().join("t.json"));
    args.tracker = Tracker::Overlap;
    assert!(matches!(cmd_track(&args), Err(CliError::Usage(_))));
    args.input = series;
    assert!(!cmd_track(&args).unwrap().trajectories.is_empty());
}

#[test]
fn bench_solvers_table() {
    let rows = cmd_bench(&bench_args(BenchMode::Solvers)).unwrap();
    assert_eq!(rows.len(), 9);
    for chunk in rows.chunks(3) {
        let names: Vec<&str> = chunk.iter().map(|r| r.solver.as_str()).collect();
        assert_eq!(names, ["reduced", "full", "auction"]);
        assert!((chunk[0].cost - chunk[1].cost).abs() < 1e-9);
        assert!(chunk[2].cost >= chunk[1].cost - 1e-9);
    }
    for w in rows.chunks(3).collect::<Vec<_>>().windows(2) {
        assert!(w[1][0].n_pairs_1 <= w[0][0].n_pairs_1);
        assert!(w[1][0].n_pairs_2 <= w[0][0].n_pairs_2);
    }
}

#[test]
fn bench_writes_csv_header() {
    let dir = tempfile::tempdir().unwrap();
    let out: PathBuf = dir.path().join("b.csv");
    let mut args = bench_args(BenchMode::Trackers);
    args.out = Some(out.clone());
    let rows = cmd_bench(&args).unwrap();
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "config_id,solver,n_pairs_1,n_pairs_2,threshold,cost,wall_ms"
    );
    assert_eq!(text.lines().count(), rows.len() + 1);
    let stride5: Vec<_> = rows.iter().filter(|r| r.config_id == "stride_5").collect();
    assert_eq!(stride5[0].solver, "wasserstein");
    assert_eq!((stride5[0].n_pairs_1, stride5[0].n_pairs_2), (3, 3));
    assert!(stride5[1].n_pairs_2 < 3);
}
