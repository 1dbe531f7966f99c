use std::path::Path;
use std::process::{Command, Output};

fn qca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qca"))
        .args(args)
        .output()
        .expect("run qca")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_reference_values() {
    let o = qca(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let value = |key: &str| -> f64 {
        let line = out.lines().find(|l| l.starts_with(key)).unwrap();
        line[key.len()..].split_whitespace().next().unwrap().parse().unwrap()
    };
    let eo = value("E_o");
    assert!((0.417..=0.422).contains(&eo), "{eo}");
    let g = value("gamma_eff");
    assert!((g - 9.1).abs() < 0.7, "{g}");
    let n = value("null population");
    assert!(n <= 0.02 && n > 0.01, "{n}");
    assert!(out.trim_end().ends_with("OK"));
}

#[test]
fn validate_flags_a_weak_clock_geometry() {
    // A low elevation weakens the clock until the null state leaks in.
    let o = qca(&["validate", "--h", "0.05"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("null population"), "{}", stderr(&o));
}

#[test]
fn build_then_sweep_majority() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("m.layout");
    let csv = dir.path().join("m.csv");
    let o = qca(&["build", "majority", "--bits", "101", "-o", path_str(&layout)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let o = qca(&[
        "sweep", "-l", path_str(&layout), "--ey", "-0.5:0.5:5", "-o", path_str(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(
        header,
        [
            "ex_over_Eo", "ey_over_Eo", "e0_eV", "gap_eV", "p_pair_1", "p_pair_2", "p_pair_3",
            "p_pair_4", "p_pair_5", "p_pair_6", "p_out", "degenerate", "iters"
        ]
    );
    assert_eq!(text.lines().count(), 6);
    // M(1,0,1) = 1 at zero field.
    let zero = text.lines().nth(3).unwrap();
    let p_out: f64 = zero.split(',').nth(10).unwrap().parse().unwrap();
    assert!(p_out > 0.9);
}

#[test]
fn sweep_csv_is_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("f.layout");
    assert!(qca(&["build", "fanin", "-o", path_str(&layout)]).status.success());
    let mut outputs = Vec::new();
    for threads in ["1", "3", "1"] {
        let csv = dir.path().join(format!("f{}.csv", outputs.len()));
        let o = qca(&[
            "sweep", "-l", path_str(&layout), "--ex", "-0.2:0.2:2", "--ey", "-1:1:9",
            "--threads", threads, "-o", path_str(&csv),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(&csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn sweep_to_stdout_and_onset() {
    let dir = tempfile::tempdir().unwrap();
    let layout = dir.path().join("i.layout");
    assert!(qca(&["build", "inverter", "-o", path_str(&layout)]).status.success());
    let o = qca(&["sweep", "-l", path_str(&layout), "--ey", "-1.2:1.2:25", "-o", "-"]);
    assert!(o.status.success());
    let csv = dir.path().join("i.csv");
    std::fs::write(&csv, &o.stdout).unwrap();
    let o = qca(&["onset", "-i", path_str(&csv), "--axis", "ey"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("onset(+)") && out.contains("onset(-)"));
    assert!(out.contains("asymmetric yes"), "{out}");
    let o = qca(&["onset", "-i", path_str(&csv), "--axis", "ex"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn truth_table_rotated_passes_at_half_eo() {
    let o = qca(&["truth-table", "--rotated", "--ex", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("PASS").count(), 9);
    assert!(out.contains("8/8 PASS"));
}

#[test]
fn truth_table_failure_exits_one() {
    let o = qca(&["truth-table", "--rotated", "--ex", "2", "--ey", "-3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qca(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qca(&["build", "wire"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.layout");
    let o = qca(&["build", "majority", "--bits", "10", "-o", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--bits"));
    assert!(!out.exists());
    assert!(qca(&["build", "wire", "-o", path_str(&out)]).status.success());
    let o = qca(&["sweep", "-l", path_str(&out), "--ey", "1:0:3", "-o", "-"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_layout_file_is_a_validation_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.layout");
    std::fs::write(&path, "{\"format_version\": 1}").unwrap();
    let o = qca(&["sweep", "-l", path_str(&path), "-o", "-"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
    let o = qca(&["sweep", "-l", path_str(&dir.path().join("missing")), "-o", "-"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn large_layouts_warn() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.layout");
    let o = qca(&["build", "wire", "--pairs", "8", "-o", path_str(&path)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}
