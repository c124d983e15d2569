use std::process::{Command, Output};

fn mixel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixel")).args(args).output().expect("run mixel")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn single_level_has_no_orders() {
    let o = mixel(&["study", "--k", "4", "--levels", "1", "--quiet"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 1);
    let cols: Vec<&str> = rows[0].split_whitespace().collect();
    assert_eq!(cols, [cols[0], cols[1], cols[2], cols[3], "40", "78"]);

    let o = mixel(&["study", "--k", "4", "--levels", "1", "--format", "csv", "--quiet"]);
    let csv = stdout(&o);
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert_eq!((row[2], row[4], row[6]), ("", "", ""));
    assert_eq!((row[7], row[8]), ("40", "78"));
}

#[test]
fn final_row_of_the_cubic_study() {
    let o = mixel(&["study", "--k", "3", "--levels", "5", "--format", "json", "--quiet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let last = &rows[4];
    assert_eq!((last["dim_displacement"].as_u64(), last["dim_stress"].as_u64()), (Some(6144), Some(8675)));
    let u = last["displacement"].as_f64().unwrap();
    assert!((u - 0.000035).abs() < 5e-7, "{u}");
    assert!(rows[0]["orders"].is_null());
    assert!((last["orders"]["divergence"].as_f64().unwrap() - 2.99).abs() < 0.05);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let o = mixel(&["study", "--k", "5", "--levels", "2", "--format", "csv", "--quiet", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(o.stdout.is_empty());
    }
    let (a, b) = (std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn dumps_the_finest_system() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.mtx");
    let o = mixel(&["study", "--k", "3", "--levels", "2", "--quiet", "--dump-system", path.to_str().unwrap()]);
    assert!(o.status.success());
    let m = std::fs::read_to_string(&path).unwrap();
    assert!(m.starts_with("%%MatrixMarket matrix coordinate real symmetric"));
    // level 2: 163 stresses and 96 displacements
    assert!(m.lines().nth(1).unwrap().starts_with("259 259 "));
    let rhs = std::fs::read_to_string(dir.path().join("system_rhs.mtx")).unwrap();
    assert!(rhs.lines().nth(1).unwrap() == "259 1");
}

#[test]
fn invalid_flags_are_usage_errors() {
    for args in [
        &["study", "--k", "6", "--levels", "1"][..],
        &["study", "--k", "3", "--levels", "0"],
        &["study", "--k", "3", "--levels", "2", "--format", "xml"],
        &["verify", "--k", "3", "--level", "1", "--negative-control", "bogus"],
    ] {
        let o = mixel(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = mixel(&["study", "--k", "3", "--levels", "1", "--mu=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
}

#[test]
fn verify_passes_and_reports_nullity() {
    let o = mixel(&["verify", "--k", "3", "--level", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);

    let o = mixel(&["verify", "--k", "5", "--level", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["local_rank"]["nullity"], 3);
    assert_eq!(v["local_rank"]["rank"], 27);
}

#[test]
fn negative_controls_fail() {
    for (control, check) in [
        ("flip-sign", "hdiv-conformity"),
        ("bubble-normal", "hdiv-conformity"),
        ("projection-degree", "div-inclusion"),
        ("non-bubble", "rigid-motion-orthogonality"),
    ] {
        let o = mixel(&["verify", "--k", "3", "--level", "2", "--negative-control", control]);
        assert_eq!(o.status.code(), Some(1), "{control}");
        assert!(String::from_utf8_lossy(&o.stderr).contains(check), "{control}");
    }
}
