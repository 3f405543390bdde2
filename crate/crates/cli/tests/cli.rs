use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn circtrack(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circtrack"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn two_detections(dir: &Path) {
    fs::write(dir.join("a.csv"), "1,-1,10,20,4,6,0.9\n2,-1,11,20,4,6,0.9\n").unwrap();
}

#[test]
fn track_writes_one_track_of_two_rows() {
    let dir = tempfile::tempdir().unwrap();
    two_detections(dir.path());
    for solver in ["cinda", "ssp", "dssp"] {
        let out = circtrack(
            &["track", "--input", "a.csv", "--solver", solver, "--iters", "1", "--output", "t.csv", "--report", "r.txt"],
            dir.path(),
        );
        assert!(out.status.success(), "{solver}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(csv, "track_id,frame,detection_id,x,y\n1,1,0,12,23\n1,2,1,13,23\n");
        let report = fs::read_to_string(dir.path().join("r.txt")).unwrap();
        assert!(report.contains("trajectories = 1"), "{report}");
        assert!(report.contains(&format!("solver = {solver}")), "{report}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    two_detections(dir.path());
    fs::write(dir.path().join("c.cfg"), "input = a.csv\niterations = 0\nsolver = ssp\n").unwrap();
    let bad = circtrack(&["track", "--config", "c.cfg"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("iterations"));

    let ok = circtrack(&["track", "--config", "c.cfg", "--iters", "2", "--report", "r.txt"], dir.path());
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let report = fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert!(report.contains("[iteration 2]"));
    assert!(report.contains("solver = ssp"));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(circtrack(&["track", "--input", "missing.csv"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("bad.csv"), "1,-1,10,20,4,6,0.9\n2,-1,oops,20,4,6,0.9\n").unwrap();
    let out = circtrack(&["track", "--input", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.csv:2"));
    fs::write(dir.path().join("cfg"), "solver = simplex\n").unwrap();
    assert_eq!(circtrack(&["track", "--config", "cfg"], dir.path()).status.code(), Some(1));
}

#[test]
fn points_format() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "frame,x,y\n1,0,0\n2,0.5,0\n3,1,0\n").unwrap();
    let out = circtrack(
        &["track", "--input", "p.csv", "--format", "points-csv", "--output", "t.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("1,")), "{csv}");
}

#[test]
fn bench_prints_agreeing_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = circtrack(&["bench", "--solvers", "cinda,ssp,dssp", "--sizes", "200,400", "--seed", "7"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("solver,size,detections,arcs,seconds,cost"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for size in ["200", "400"] {
        let costs: Vec<&str> = rows.iter().filter(|r| r[1] == size).map(|r| r[5]).collect();
        assert_eq!(costs.len(), 3);
        assert!(costs.windows(2).all(|w| w[0] == w[1]), "{costs:?}");
    }
}

#[test]
fn validate_dump_round_trip_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let dump = circtrack(&["bench", "--sizes", "150", "--dump", "g.txt"], dir.path());
    assert!(dump.status.success());
    let ok = circtrack(&["validate", "--input", "g.txt"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("acyclic_without_dummy: ok"));

    // x1 -> x2 -> x1 without the dummy node
    fs::write(
        dir.path().join("cyc.txt"),
        "5 8\n0 1 1 enter\n1 2 -1 observation\n2 0 1 exit\n0 3 1 enter\n3 4 -1 observation\n4 0 1 exit\n2 3 0 transition\n4 1 0 transition\n",
    )
    .unwrap();
    let cyc = circtrack(&["validate", "--input", "cyc.txt"], dir.path());
    assert_eq!(cyc.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&cyc.stdout).contains("acyclic_without_dummy: FAILED"));

    fs::write(dir.path().join("junk.txt"), "3\n").unwrap();
    assert_eq!(circtrack(&["validate", "--input", "junk.txt"], dir.path()).status.code(), Some(1));
}
