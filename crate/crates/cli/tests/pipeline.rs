use std::path::Path;
use std::process::{Command, Output};

const EFFICIENT: &str = "[source]\nexcitation_probability = 0.5\ntransmission = 1.0\n[camera]\nquantum_efficiency = 1.0\n";

fn cospli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cospli"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn cospli")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = cospli(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Asserts a failure whose stderr is a single `error[category]: ...` line.
fn fails_with(dir: &Path, args: &[&str], category: &str) {
    let out = cospli(dir, args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let err = String::from_utf8_lossy(&out.stderr);
    let line = err.lines().last().unwrap_or("");
    assert!(line.starts_with(&format!("error[{category}]: ")), "{err}");
}

fn value(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {report}"))
        .parse()
        .unwrap()
}

#[test]
fn stages_run_end_to_end_and_rerun_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("run.toml"), EFFICIENT).unwrap();
    fn with<'a>(rest: &[&'a str]) -> Vec<&'a str> {
        [&["-q", "-c", "run.toml"][..], rest].concat()
    }

    ok(d, &with(&["simulate", "-n", "600", "--seed", "4", "-o", "s.cosp"]));
    ok(d, &with(&["simulate", "-n", "600", "--seed", "4", "-o", "s2.cosp"]));
    assert_eq!(std::fs::read(d.join("s.cosp")).unwrap(), std::fs::read(d.join("s2.cosp")).unwrap());

    ok(d, &with(&["calibrate", "-i", "s.cosp", "-o", "cal.toml", "--image", "acc.cosm"]));
    ok(d, &with(&["calibrate", "-i", "s.cosp", "--regions", "auto", "-o", "auto.toml"]));
    let report = ok(
        d,
        &with(&[
            "correlate", "-i", "s.cosp", "--calibration", "cal.toml", "-o", "raw.cosm",
            "--marginals", "marg.csv", "--report", "rate.txt", "--subtract-noise", "product",
        ]),
    );
    assert_eq!(value(&report, "frames"), 600.0);
    assert!(value(&report, "coincidence_frames") > 200.0);
    assert_eq!(std::fs::read_to_string(d.join("rate.txt")).unwrap(), report);
    for f in ["raw.csv", "raw.sub.cosm", "raw.sub.csv", "acc.cosm", "auto.toml"] {
        assert!(d.join(f).exists(), "{f}");
    }
    let marg = std::fs::read_to_string(d.join("marg.csv")).unwrap();
    assert_eq!(marg.lines().count(), 1 + 24 + 37);

    ok(d, &with(&["correlate", "-i", "s.cosp", "--calibration", "cal.toml", "-o", "raw2.cosm"]));
    assert_eq!(std::fs::read(d.join("raw.cosm")).unwrap(), std::fs::read(d.join("raw2.cosm")).unwrap());

    ok(d, &with(&["model", "-o", "model.cosm"]));
    ok(d, &with(&["restore", "-i", "raw.cosm", "-o", "rest.cosm"]));
    ok(d, &with(&["restore", "-i", "raw.cosm", "-o", "up.cosm", "--upsample", "4", "--keep-axis-lines"]));
    let cmp = ok(d, &["compare", "rest.cosm", "model.cosm", "--report", "cmp.txt"]);
    assert!(value(&cmp, "bhattacharyya") > 0.9, "{cmp}");
    ok(d, &["render", "-i", "up.cosm", "-o", "up.ppm"]);
    assert!(std::fs::read(d.join("up.ppm")).unwrap().starts_with(b"P6"));
}

#[test]
fn correlate_without_calibration_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    ok(d, &["-q", "simulate", "-n", "2", "-o", "s.cosp"]);
    fails_with(d, &["correlate", "-i", "s.cosp", "-o", "raw.cosm"], "calibration-missing");
    fails_with(
        d,
        &["correlate", "-i", "s.cosp", "--calibration", "nope.toml", "-o", "raw.cosm"],
        "calibration-missing",
    );
    assert!(!d.join("raw.cosm").exists());
}

#[test]
fn failing_stage_leaves_no_output() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("junk.cosp"), b"NOPE and some more bytes to read past the header.....").unwrap();
    fails_with(d, &["calibrate", "-i", "junk.cosp", "-o", "cal.toml", "--image", "acc.cosm"], "bad-magic");
    let names: Vec<_> = std::fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("junk.cosp")]);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    std::fs::write(d.join("bad.toml"), "[camera]\nquantum_efficency = 0.3\n").unwrap();
    fails_with(d, &["-c", "bad.toml", "simulate", "-n", "1", "-o", "s.cosp"], "config");
    std::fs::write(d.join("bad2.toml"), "[camera]\nquantum_efficiency = 1.5\n").unwrap();
    fails_with(d, &["-c", "bad2.toml", "model", "-o", "m.cosm"], "config");
    assert!(!d.join("s.cosp").exists());
}

#[test]
fn defaults_parse_back() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let text = ok(d, &["defaults"]);
    std::fs::write(d.join("d.toml"), &text).unwrap();
    assert_eq!(ok(d, &["-c", "d.toml", "defaults"]), text);
}
