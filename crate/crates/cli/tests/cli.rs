use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planetrack"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn k4() -> String {
    use planetrack::plane_graph::{from_face_list, Face};
    let faces = [vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1], vec![1, 3, 2]].map(Face);
    from_face_list(4, &faces, vec![0, 1, 2]).unwrap().to_json()
}

#[test]
fn k4_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("k4.json"), k4()).unwrap();
    let out = bin(&["run", "k4.json", "-o", "out", "--svg", "--obj"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["layout.json", "metrics.json", "report.json", "tracks.json", "drawing.svg", "drawing.obj"] {
        assert!(dir.path().join("out").join(f).exists(), "{f} missing");
    }
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/metrics.json")).unwrap()).unwrap();
    for key in ["Q", "X", "D", "per_track_Q", "per_pair_X", "track_count", "queue_count"] {
        assert!(metrics.get(key).is_some(), "{key} missing");
    }
    assert!(metrics["violations"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_rotation_names_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let bad = r#"{"n":3,"edges":[[0,1],[1,2],[0,2]],"rotation":[[0,2],[0,1],[1,1]],"outer_face":[0,1,2]}"#;
    fs::write(dir.path().join("bad.json"), bad).unwrap();
    let out = bin(&["run", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex 2"));
}

#[test]
fn stop_after_reform_only_writes_reform() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin(&["run", "gen:triangulation:25", "--stop-after", "reform", "-o", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = fs::read_dir(dir.path().join("o"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names, vec!["reform.json".to_string()]);
}

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = bin(&["gen", "triangulation", "50", "--seed", "7", "-o", name], dir.path());
        assert!(out.status.success());
    }
    let (a, b) = (
        fs::read(dir.path().join("a.json")).unwrap(),
        fs::read(dir.path().join("b.json")).unwrap(),
    );
    assert_eq!(a, b);
    let g = planetrack::plane_graph::PlaneGraph::parse(std::str::from_utf8(&a).unwrap()).unwrap();
    assert!(g.validate_embedding().is_ok());
    assert_eq!(bin(&["gen", "cube", "8"], dir.path()).status.code(), Some(1));
}

#[test]
fn run_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for o in ["x", "y"] {
        assert!(bin(&["run", "gen:triangulation:40", "--seed", "3", "-o", o], dir.path()).status.success());
    }
    for f in ["layout.json", "metrics.json", "report.json", "drawing.json"] {
        assert_eq!(
            fs::read(dir.path().join("x").join(f)).unwrap(),
            fs::read(dir.path().join("y").join(f)).unwrap()
        );
    }
}

#[test]
fn oracle_values() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("p5.txt", "5 4\n0 1\n1 2\n2 3\n3 4\n".to_string(), 1),
        ("c6.txt", "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n".to_string(), 1),
        ("k4.json", k4(), 2),
    ];
    for (name, body, q) in cases {
        fs::write(dir.path().join(name), body).unwrap();
        let out = bin(&["oracle", name], dir.path());
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["queue_number"], q, "{name}");
    }
    let big: String = format!("10 9\n{}", (0..9).map(|i| format!("{i} {}\n", i + 1)).collect::<String>());
    fs::write(dir.path().join("p10.txt"), big).unwrap();
    assert_eq!(bin(&["oracle", "p10.txt"], dir.path()).status.code(), Some(1));
}

#[test]
fn wrap_refusal_exits_with_violation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("g.json"), planetrack::generate::grid(4, 5).unwrap().to_json()).unwrap();
    let out = bin(&["run", "g.json", "--strategy", "skeleton-regional"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(bin(&["run", "g.json", "-o", "ok"], dir.path()).status.success());
}
