use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn grinterp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grinterp"))
        .args(args)
        .current_dir(dir)
        .env_remove("GRINTERP_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn exp1_writes_grid_times_schemes_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(
        &[
            "exp1", "--seed", "42", "--n", "100", "--p", "5", "--grid", "101", "--out", "exp1.csv",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let csv = fs::read_to_string(dir.path().join("exp1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t_star,scheme,rel_error,feasibility"));
    assert_eq!(lines.count(), 101 * 6);
    let maxvol = fs::read_to_string(dir.path().join("exp1_maxvol.csv")).unwrap();
    assert_eq!(maxvol.lines().count(), 3);
}

#[test]
fn same_arguments_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["exp1", "--n", "40", "--p", "3", "--grid", "9", "--out", out];
    assert!(grinterp(&args("a.csv"), dir.path()).status.success());
    assert!(grinterp(&args("b.csv"), dir.path()).status.success());
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str, out: &str| {
        let o = grinterp(
            &[
                "exp1",
                "--n",
                "40",
                "--p",
                "3",
                "--grid",
                "17",
                "--threads",
                threads,
                "--out",
                out,
            ],
            dir.path(),
        );
        assert!(o.status.success());
        fs::read(dir.path().join(out)).unwrap()
    };
    assert_eq!(run("1", "one.csv"), run("4", "four.csv"));
}

#[test]
fn bounds_reports_phi_ceiling() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(&["bounds", "--seed", "7"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.contains("global bound 2.5811"))
        .expect("global dphi line");
    assert!(line.starts_with("PASS"));
    let observed: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(observed <= 2.5811);
    assert!(dir.path().join("bounds.csv").exists());
}

#[test]
fn maxvol_repairs_singular_leading_block() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("singular_block.txt"),
        "# span of the last two axes\n6 2\n0 0\n0 0\n0 0\n0 0\n1 0\n0 1\n",
    )
    .unwrap();
    let o = grinterp(&["maxvol", "--in", "singular_block.txt"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("pivot rows        [4, 5]"));
    let csv = fs::read_to_string(dir.path().join("maxvol.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], "inf");
    let after: f64 = row[4].parse().unwrap();
    assert!((after - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn convergence_recovers_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(&["convergence", "--out", "slopes.csv"], dir.path());
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("slopes.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let slope: f64 = f[1].parse().unwrap();
        let range = if f[0].ends_with("Hermite") {
            3.6..=4.6
        } else {
            1.8..=2.6
        };
        assert!(range.contains(&slope), "{line}");
    }
    let errors = fs::read_to_string(dir.path().join("slopes_errors.csv")).unwrap();
    assert_eq!(errors.lines().count(), 1 + 6 * 4);
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(&["exp1", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(&["exp1", "--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("[default: 101]"));
}

#[test]
fn precondition_violation_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = grinterp(&["exp1", "--n", "5", "--p", "10"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n ≥ p"));
    let o = grinterp(&["maxvol"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    // two equal columns: no orthonormal representative exists
    fs::write(dir.path().join("rank1.txt"), "3 2\n1 1\n2 2\n3 3\n").unwrap();
    let o = grinterp(&["maxvol", "--in", "rank1.txt"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn config_file_layers_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# small run\nn = 30\np = 2\ngrid = 5\nout = cfg.csv\n",
    )
    .unwrap();
    let o = grinterp(&["exp1", "--config", "run.cfg", "--grid", "7"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("cfg.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 7 * 6);

    fs::write(dir.path().join("bad.cfg"), "grid = 5\nwidth = 3\n").unwrap();
    let o = grinterp(&["exp1", "--config", "bad.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_grinterp"))
        .args(["exp1", "--n", "30", "--p", "2", "--grid", "3"])
        .current_dir(dir.path())
        .env("GRINTERP_OUT_DIR", "results")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("results/exp1.csv").exists());
    assert!(dir.path().join("results/exp1_maxvol.csv").exists());
}
