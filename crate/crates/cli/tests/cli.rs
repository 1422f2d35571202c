use std::fs;
use std::process::{Command, Output};

use composable_fabric::cost::sweep_from_csv;
use composable_fabric::{DemandMatrix, PlacementReport, Reason, Scenario, ThroughputReport};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_composable-fabric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_kind(out: &Output) -> String {
    assert!(!out.status.success());
    let v: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr is a JSON record");
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_owned()
}

#[test]
fn place_physical_rejects_g() {
    let out = run(&[
        "place",
        "--workloads",
        "table1",
        "--scenario",
        "rack_physical.json",
    ]);
    let report = PlacementReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.accepted_names(), ["A", "B", "C", "D", "E", "F"]);
    assert_eq!(report.rejected.len(), 1);
    assert_eq!(report.rejected[0].app, "G");
    assert_eq!(report.rejected[0].reason, Reason::Scope);
}

#[test]
fn mode_flag_overrides_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    fs::write(
        &path,
        composable_fabric::scenarios::pod_physical().to_json(),
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let accepted = |extra: &[&str]| {
        let mut args = vec!["place", "--scenario", p];
        args.extend_from_slice(extra);
        PlacementReport::from_json(&stdout(&run(&args)))
            .unwrap()
            .accepted
            .len()
    };
    assert_eq!(accepted(&[]), 6);
    assert_eq!(accepted(&["--physical-scale", "rack"]), 0);
    assert_eq!(
        accepted(&["--mode", "logical", "--physical-scale", "rack"]),
        6
    );
}

#[test]
fn cost_sweep_grid() {
    let out = run(&["cost-sweep", "--n", "2..64", "--y", "1..40"]);
    let rows = sweep_from_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 2520);
    for r in &rows {
        assert_eq!(r.ratio, (r.n - 1) as f64 / r.y);
    }
}

#[test]
fn throughput_of_zero_demand_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("zeros.csv");
    fs::write(&demand, DemandMatrix::zeros(4).to_csv()).unwrap();
    let out = run(&[
        "throughput",
        "--design",
        "targeted",
        "--demand",
        demand.to_str().unwrap(),
    ]);
    let report = ThroughputReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.carried_gbps_total, 0.0);
    assert!(report.schedule.is_empty());
}

#[test]
fn throughput_writes_schedule_csv() {
    let dir = tempfile::tempdir().unwrap();
    let demand = dir.path().join("d.csv");
    fs::write(&demand, "a,b\n0,150\n0,0\n").unwrap();
    let sched = dir.path().join("s.csv");
    let out = run(&[
        "throughput",
        "--demand",
        demand.to_str().unwrap(),
        "--t",
        "1",
        "--out",
        sched.to_str().unwrap(),
    ]);
    stdout(&out);
    assert_eq!(
        fs::read_to_string(&sched).unwrap(),
        "wavelength,source,dest,gbps\n1,a,b,100\n2,a,b,50\n"
    );

    let out = run(&[
        "throughput",
        "--design",
        "generic",
        "--demand",
        demand.to_str().unwrap(),
    ]);
    let report = ThroughputReport::from_json(&stdout(&out)).unwrap();
    assert_eq!(report.carried_gbps_total, 150.0);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    for args in [
        vec!["place", "--scenario", "rack_hybrid"],
        vec![
            "place",
            "--scenario",
            "pod_physical.json",
            "--format",
            "csv",
        ],
        vec![
            "cost-sweep",
            "--n",
            "2..10",
            "--y",
            "1..5",
            "--format",
            "json",
        ],
    ] {
        assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
    }
}

#[test]
fn scenarios_are_written_and_reload() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&run(&["scenarios", "--out", dir.path().to_str().unwrap()]));
    let mut names: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "pod_physical.json",
            "rack_hybrid.json",
            "rack_logical.json",
            "rack_physical.json",
            "rack_traditional.json",
            "table1.csv"
        ]
    );
    for (name, builtin) in composable_fabric::scenarios::builtin_scenarios() {
        let path = dir.path().join(name);
        assert_eq!(Scenario::load(&path).unwrap(), builtin);
        stdout(&run(&["validate", "--scenario", path.to_str().unwrap()]));
    }
    let table = dir.path().join("table1.csv");
    let out = run(&[
        "place",
        "--scenario",
        dir.path().join("rack_hybrid.json").to_str().unwrap(),
        "--workloads",
        table.to_str().unwrap(),
    ]);
    assert_eq!(
        PlacementReport::from_json(&stdout(&out))
            .unwrap()
            .accepted
            .len(),
        7
    );
}

#[test]
fn validate_reports_violations_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut s = composable_fabric::scenarios::rack_hybrid();
    s.disaggregation.mode = composable_fabric::Mode::Physical;
    fs::write(&path, s.to_json()).unwrap();
    let out = run(&["validate", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let findings: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(findings.as_array().unwrap().len(), 1);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("w.csv");
    fs::write(
        &bad,
        "name,cpu_units,ram_units,storage_units,latency_scope\nA,1,x,1,rack\n",
    )
    .unwrap();
    let out = run(&[
        "place",
        "--scenario",
        "rack_hybrid",
        "--workloads",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(error_kind(&out), "parse");

    assert_eq!(
        error_kind(&run(&["place", "--scenario", "missing.json"])),
        "io"
    );
    assert_eq!(
        error_kind(&run(&["cost-sweep", "--n", "1..4", "--y", "1"])),
        "invariant"
    );
    assert_eq!(
        error_kind(&run(&["cost-sweep", "--n", "9..4", "--y", "1"])),
        "usage"
    );

    let demand = dir.path().join("d.csv");
    fs::write(&demand, "a,b\n0,1\n").unwrap();
    assert_eq!(
        error_kind(&run(&["throughput", "--demand", demand.to_str().unwrap()])),
        "dimension"
    );
}

#[test]
fn oversized_placement_needs_allow_heuristic() {
    use composable_fabric::{
        DataCenter, DisaggregationConfig, Node, Pod, Rack, ResourceComponent, ResourceKind,
    };
    let nodes = (0..18)
        .map(|i| {
            Node::new(
                format!("n{i}"),
                vec![ResourceComponent::new(ResourceKind::ALL[i % 3], 4)],
            )
        })
        .collect();
    let s = Scenario {
        dc: DataCenter {
            pods: vec![Pod {
                id: "p".into(),
                racks: vec![Rack {
                    id: "r".into(),
                    nodes,
                }],
            }],
        },
        disaggregation: DisaggregationConfig::logical(),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("big.json");
    fs::write(&path, s.to_json()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(
        error_kind(&run(&["place", "--scenario", p])),
        "bound_exceeded"
    );
    let report = PlacementReport::from_json(&stdout(&run(&[
        "place",
        "--scenario",
        p,
        "--allow-heuristic",
    ])))
    .unwrap();
    assert!(report.heuristic);
}
