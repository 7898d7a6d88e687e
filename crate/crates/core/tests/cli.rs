use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sbp_ins(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbp-ins"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("case.toml");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn dump_operators_writes_sbp_matrices() {
    let out = sbp_ins(&["dump-operators", "--degree", "2", "--elements", "3", "--stretched"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("matrix,row,col,value"));
    let n = 7;
    let (mut q, mut b) = (vec![vec![0.0; n]; n], vec![0.0; n]);
    let mut names = std::collections::BTreeSet::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let (i, j, v): (usize, usize, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap());
        names.insert(f[0].to_string());
        match f[0] {
            "Q" => q[i][j] = v,
            "B" => b[i] = v,
            _ => {}
        }
    }
    for name in ["P", "Q", "D", "B", "Qxx", "Dxx", "Qxx_assembled", "Dxx_assembled"] {
        assert!(names.contains(name), "{name} missing");
    }
    for i in 0..n {
        for j in 0..n {
            let bij = if i == j { b[i] } else { 0.0 };
            assert!((q[i][j] + q[j][i] - bij).abs() < 1e-13);
        }
    }
    assert_eq!((b[0], b[n - 1]), (-1.0, 1.0));
}

#[test]
fn invalid_input_exits_with_one() {
    let out = sbp_ins(&["dump-operators", "--degree", "0", "--elements", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = \"cavity\"\ndegree = 9\nbc_north = \"lid\"\nfoo = 1\n");
    let out = sbp_ins(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("nothing");
    let out = sbp_ins(&["compare", "--run", missing.to_str().unwrap(), "--reference", data("ghia_re100_u_x0.5.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unsteady_run_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let cfg = write_config(
        dir.path(),
        &format!(
            "case = \"cavity\"\ndegree = 2\nelements_x = 3\nelements_y = 3\nmax_steps = 2\nsteady_tol = 1e-12\noutput_dir = {:?}\n",
            out_dir.to_str().unwrap()
        ),
    );
    let out = sbp_ins(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_then_compare_against_references() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("cavity");
    let cfg = write_config(
        dir.path(),
        &format!(
            "case = \"cavity\"\nre = 100.0\ndegree = 3\nelements_x = 6\nelements_y = 6\nsteady_tol = 1e-6\noutput_dir = {:?}\nreference_data = [{:?}]\n",
            out_dir.to_str().unwrap(),
            data("ghia_re100_u_x0.5.csv").to_str().unwrap()
        ),
    );
    let out = sbp_ins(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["run.toml", "fields.csv", "energy.csv", "profile_u_x0.5.csv", "profile_v_y0.5.csv"] {
        assert!(out_dir.join(file).is_file(), "{file} missing");
    }
    let meta: toml::Table = std::fs::read_to_string(out_dir.join("run.toml")).unwrap().parse().unwrap();
    assert_eq!(meta["case"].as_str(), Some("cavity"));
    assert_eq!(meta["steady"].as_bool(), Some(true));

    let run = out_dir.to_str().unwrap();
    let close = sbp_ins(&["compare", "--run", run, "--reference", data("ghia_re100_u_x0.5.csv").to_str().unwrap(), "--threshold", "0.05"]);
    assert_eq!(close.status.code(), Some(0), "{}", String::from_utf8_lossy(&close.stdout));
    let far = sbp_ins(&["compare", "--run", run, "--reference", data("ghia_re1000_u_x0.5.csv").to_str().unwrap()]);
    assert_eq!(far.status.code(), Some(3));
}
