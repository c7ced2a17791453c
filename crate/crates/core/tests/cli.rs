use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn srfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srfid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(out: &Output) -> Vec<Vec<f64>> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("param"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn free_fidelity_at_contact_is_two() {
    let out = srfid(&["fidelity", "free", "--omega", "3.4753e15", "--x", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# srfid fidelity free "));
    assert!(lines[0].contains("omega=3.4753e15"));
    assert_eq!(lines[1], "param,sigma");
    assert_eq!(lines[2], "0,2");
    assert!(!text.contains('\r'));
}

#[test]
fn lossless_plane_reproduces_free_curve() {
    let sweep = "0:2e-6:80";
    let free = srfid(&["fidelity", "free", "--omega", "3.4753e15", "--sweep-x", sweep]);
    let plane = srfid(&[
        "fidelity", "plane", "--omega", "3.4753e15", "--z", "0.5e-9", "--sweep-x", sweep, "--eps",
        &data("vacuumlike.csv"),
    ]);
    assert!(free.status.success() && plane.status.success());
    assert_eq!(rows(&free), rows(&plane));
    assert_eq!(rows(&free).len(), 80);
}

#[test]
fn sphere_arc_sweep_has_a_decaying_head() {
    let out = srfid(&[
        "fidelity", "sphere", "--radius", "50e-9", "--z", "0.5e-9", "--omega", "3.4753e15", "--sweep-arc",
        "0:20e-9:200", "--eps", &data("argon_like.csv"),
    ]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 200);
    assert_eq!(r[0], vec![0.0, 2.0]);
    let min = (0..r.len()).min_by(|&a, &b| r[a][1].total_cmp(&r[b][1])).unwrap();
    assert!(r[min][0] < 5e-9);
    assert!(r[..=min].windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(r.iter().all(|v| v[1] > 0.0 && v[1] <= 2.0));
}

#[test]
fn rows_round_trip_exactly() {
    let out = srfid(&["fidelity", "free", "--ev", "2.2875", "--sweep-x", "1e-10:1e-5:40:log"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(2) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(srfid::cli::format_float(v), field);
        }
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "fidelity", "plane", "--omega", "3.4753e15", "--z", "0.5e-9", "--sweep-x", "0:3e-8:64", "--model",
        "lorentz:1:96.7,11.67,0.5",
    ];
    let a = srfid(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_srfid"))
        .args(args)
        .env("SRFID_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("srfid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let args = ["rate", "free", "--sweep-ev", "1:3:5", "--dipole", "0,1,0"];
    let stdout = srfid(&args);
    let mut with_file = args.to_vec();
    let p = path.display().to_string();
    with_file.extend(["--output", &p]);
    let quiet = srfid(&with_file);
    assert!(quiet.status.success() && quiet.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), stdout.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(srfid(&["fidelity", "free", "--bogus"]).status.code(), Some(2));
    let missing = srfid(&["fidelity", "plane", "--omega", "1e15", "--x", "0", "--z", "1e-9", "--eps", "/nonexistent.csv"]);
    assert_eq!(missing.status.code(), Some(3));
    assert!(!missing.stderr.is_empty());
    let range = srfid(&["fidelity", "plane", "--ev", "50", "--x", "0", "--z", "1e-9", "--eps", &data("argon_like.csv")]);
    assert_eq!(range.status.code(), Some(4));
    let capped = srfid(&[
        "fidelity", "sphere", "--radius", "50e-9", "--z", "0.5e-9", "--omega", "3.4753e15", "--arc", "1e-9",
        "--eps", &data("argon_like.csv"), "--lmax", "5",
    ]);
    assert_eq!(capped.status.code(), Some(5));
    let bad = srfid(&["fidelity", "free", "--omega", "1e15", "--x=-3"]);
    assert_eq!(bad.status.code(), Some(6));
    let unwritable = srfid(&["fidelity", "free", "--omega", "1e15", "--x", "0", "--output", "/nonexistent/dir/out.csv"]);
    assert_eq!(unwritable.status.code(), Some(7));
}

#[test]
fn retardation_warning_goes_to_stderr() {
    let out = srfid(&[
        "fidelity", "plane", "--omega", "3.4753e15", "--z", "0.5e-9", "--x", "1e-6", "--model", "lorentz:2",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stderr).unwrap().contains("warning"));
    let near = srfid(&[
        "fidelity", "plane", "--omega", "3.4753e15", "--z", "0.5e-9", "--x", "1e-9", "--model", "lorentz:2",
    ]);
    assert!(near.stderr.is_empty());
}

#[test]
fn inspect_lists_table_nodes() {
    let out = srfid(&["dielectric", "inspect", "--eps", &data("vacuumlike.csv")]);
    assert!(out.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 31);
    assert!(r.iter().all(|v| v[1] == 2.25 && v[2] == 0.0));
}
