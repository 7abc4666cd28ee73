use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use harmonia::corpus::{seed_from_env, Corpus};
use harmonia::{MassVector, Potential};
use harmonia_cli::csv::{diagnostics, format_number, read_trajectory};
use harmonia_cli::parse_scenario;

fn harmonia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_harmonia")).args(args).output().expect("binary runs")
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn simulate(scenario: &Path, out: &Path) -> Output {
    harmonia(&["simulate", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn theorem2_scenario_csv_has_constant_inertia() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rhombus.csv");
    let o = simulate(&scenario_path("rhombus.json"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let head: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(head.len(), 1 + 16 + 3);
    let col = head.iter().position(|c| *c == "I").unwrap();
    let inertia: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert!(inertia.len() > 600);
    assert!(inertia.iter().all(|i| (i - 1.0).abs() <= 1e-8));
}

#[test]
fn one_step_run_has_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "one.json",
        r#"{"masses": [1, 1], "positions": [[-1, 0], [1, 0]], "integrator": {"method": "verlet", "dt": 0.1, "t_end": 0.1}}"#,
    );
    let out = dir.path().join("one.csv");
    assert_eq!(simulate(&s, &out).status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("t,qx1,qy1,vx1,vy1,qx2,qy2,vx2,vy2,I,U,E\n"));
}

#[test]
fn newtonian_infall_exits_with_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("infall.csv");
    let o = simulate(&scenario_path("newtonian_infall.json"), &out);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("collision"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let s = scenario_path("rhombus.json");
    let (ra, rb) = (simulate(&s, &a), simulate(&s, &b));
    assert_eq!(ra.stdout, rb.stdout);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    for args in [&["reproduce", "theorem1"][..], &["family", "--k", "2.5", "--samples", "32"]] {
        assert_eq!(harmonia(args).stdout, harmonia(args).stdout);
    }
    let saari = ["saari", s.to_str().unwrap()];
    assert_eq!(harmonia(&saari).stdout, harmonia(&saari).stdout);
}

#[test]
fn csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = Corpus::new(seed_from_env());
    for (kind, potential) in [("harmonic", Potential::Harmonic), ("newtonian", Potential::Newtonian)] {
        let masses = corpus.masses(3, 2.0);
        let q = corpus.separated_configuration(3, 3.0, 1.0);
        let v = corpus.points(3, 0.3);
        let json = format!(
            r#"{{"masses": {:?}, "positions": {:?}, "velocities": {:?}, "potential": {{"kind": "{kind}"}},
                "integrator": {{"method": "rk4", "dt": 0.001, "t_end": 0.5, "stride": 3}}}}"#,
            masses.as_slice(),
            q.points().iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
            v.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>(),
        );
        let s = write(dir.path(), &format!("{kind}.json"), &json);
        let out = dir.path().join(format!("{kind}.csv"));
        assert_eq!(simulate(&s, &out).status.code(), Some(0));

        let text = fs::read_to_string(&out).unwrap();
        let masses = MassVector::new(masses.as_slice().to_vec()).unwrap();
        let (traj, emitted) = read_trajectory(&text, potential, masses.clone()).unwrap();
        assert_eq!(traj.len(), emitted.len());
        for (state, d) in traj.samples().iter().zip(&emitted) {
            let again = diagnostics(state, &potential, &masses).unwrap();
            for (x, y) in [(again.inertia, d.inertia), (again.potential, d.potential), (again.energy, d.energy)] {
                assert_eq!(format_number(x), format_number(y));
            }
        }
    }
}

#[test]
fn reproduce_exit_codes() {
    for which in ["theorem1", "theorem2"] {
        let o = harmonia(&["reproduce", which]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).ends_with("result: pass\n"));
    }
    let report = stdout(&harmonia(&["reproduce", "theorem1"]));
    assert!(report.contains("  samples           64\n"));
    assert!(report.contains("check central: pass"));
    let report = stdout(&harmonia(&["reproduce", "theorem2"]));
    assert!(report.contains("rigidity_defect") && report.contains("squared_swing"));
}

#[test]
fn cc_check_random_newtonian_reports_false() {
    let dir = tempfile::tempdir().unwrap();
    let mut corpus = Corpus::new(seed_from_env().wrapping_add(1));
    let q = corpus.separated_configuration(4, 5.0, 0.5);
    let json = format!(
        r#"{{"masses": [1, 2, 3, 4], "positions": {:?}, "potential": {{"kind": "newtonian"}}}}"#,
        q.points().iter().map(|p| [p.x, p.y]).collect::<Vec<_>>()
    );
    let s = write(dir.path(), "random.json", &json);
    let o = harmonia(&["cc-check", s.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("central_configuration  false"));
}

#[test]
fn cc_refine_lands_on_lagrange() {
    let path = scenario_path("lagrange_jittered.json");
    let o = harmonia(&["cc-refine", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let points: Vec<[f64; 2]> = text
        .lines()
        .filter_map(|l| l.trim().split_once(" = "))
        .map(|(_, v)| serde_json::from_str(v).unwrap())
        .collect();
    assert_eq!(points.len(), 3);
    let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let sides = [d(points[0], points[1]), d(points[1], points[2]), d(points[0], points[2])];
    assert!((sides[0] - sides[1]).abs() < 1e-8 && (sides[0] - sides[2]).abs() < 1e-8);
    // three equal unit masses with I = 1: side length sqrt(3 I / M) = 1
    assert!((sides[0] - 1.0).abs() < 1e-10);
}

#[test]
fn saari_classifies_shipped_scenarios() {
    let classify = |name: &str| {
        let o = harmonia(&["saari", scenario_path(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).lines().find(|l| l.trim_start().starts_with("classification")).unwrap().to_owned()
    };
    assert!(classify("rhombus.json").ends_with("constant_inertia_not_re"));
    assert!(classify("rotating_square.json").ends_with("relative_equilibrium"));
}

#[test]
fn bad_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"masses": [-1, 1], "positions": [[0, 0], [1, 0]]}"#, "masses[0]"),
        (r#"{"positions": [[0, 0], [1, 0]]}"#, "masses"),
        (r#"{"masses": [1, 1], "positions": [[0, 0], [1, 0]], "extra": 1}"#, "parse error"),
        ("not json", "parse error"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let s = write(dir.path(), &format!("bad{i}.json"), text);
        let o = harmonia(&["cc-check", s.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{text}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(needle), "{text}");
    }
    assert_eq!(harmonia(&["cc-check", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(harmonia(&["family", "--k", "1", "--samples", "1"]).status.code(), Some(1));
    assert_eq!(harmonia(&["reproduce", "theorem3"]).status.code(), Some(1));
    assert_eq!(harmonia(&[]).status.code(), Some(1));
    assert_eq!(harmonia(&["--help"]).status.code(), Some(0));
}

#[test]
fn parsed_scenarios_ship_valid() {
    for entry in fs::read_dir(scenario_path("")).unwrap() {
        let path = entry.unwrap().path();
        parse_scenario(&fs::read(&path).unwrap()).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}
