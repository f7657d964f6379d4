use std::fs;
use std::path::Path;
use std::process::{Command, Output};

struct Run(Output);

impl Run {
    fn code(&self) -> i32 {
        self.0.status.code().unwrap()
    }
    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.0.stdout).into_owned()
    }
    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.0.stderr).into_owned()
    }
    fn ok(self) -> Run {
        assert_eq!(self.code(), 0, "stderr: {}", self.stderr());
        self
    }
}

fn qtheta<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Run(Command::new(env!("CARGO_BIN_EXE_qtheta"))
        .args(args)
        .output()
        .unwrap())
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn classes_summaries() {
    for (disc, line) in [
        ("2", "h=1 mass=1/12"),
        ("11", "h=2 mass=5/6"),
        ("37", "h=3 mass=3"),
    ] {
        let r = qtheta(["classes", "--n", disc, "--ramified", disc]).ok();
        assert!(
            r.stdout().starts_with(&format!("{line}\n")),
            "{}",
            r.stdout()
        );
    }
    let r = qtheta(["classes", "--n", "6", "--ramified", "2"]).ok();
    assert!(r.stdout().starts_with("h=1 mass=1/3\n"));
}

#[test]
fn composite_level_needs_ramification() {
    assert_eq!(qtheta(["classes", "--n", "6"]).code(), 1);
}

#[test]
fn eigen_level_11_has_the_cusp_system() {
    let v = json(&qtheta(["eigen", "--prime-bound", "13"]).ok().stdout());
    let cusp: Vec<_> = v
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["ap"]["2"] == "-2")
        .collect();
    assert_eq!(cusp.len(), 1);
    assert_eq!(cusp[0]["ap"]["3"], "-1");
    assert_eq!(cusp[0]["ap"]["13"], "4");
}

#[test]
fn eigen_level_37_contains_37a() {
    let v = json(
        &qtheta([
            "eigen",
            "--n",
            "37",
            "--ramified",
            "37",
            "--prime-bound",
            "7",
        ])
        .ok()
        .stdout(),
    );
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["ap"]["2"] == "-2" && s["ap"]["3"] == "-3"));
}

#[test]
fn eigen_without_rational_systems_is_empty() {
    let r = qtheta([
        "eigen",
        "--k",
        "1",
        "--ramified",
        "11",
        "--prime-bound",
        "5",
    ])
    .ok();
    assert_eq!(r.stdout(), "[]\n");
}

#[test]
fn hypothesis_violations_exit_2() {
    let r = qtheta(["lift", "--l", "-3", "--skew"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("Hl1"));
    let r = qtheta(["verify", "--l", "-7"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("Hl2"));
    let r = qtheta(["lift", "--l", "33"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("conductor"));
}

#[test]
fn lift_is_deterministic_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = path(&dir.path().join("cache"));
    let run = |out: &str| {
        let out = path(&dir.path().join(out));
        qtheta([
            "-v",
            "lift",
            "--d-bound",
            "80",
            "--cache-dir",
            &cache,
            "--output",
            &out,
        ])
        .ok()
        .stderr()
    };
    assert!(!run("a.json").contains("cache hit"));
    assert!(run("b.json").contains("cache hit"));
    let a = fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.json")).unwrap());

    let table: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(table["header"]["bound"], 80);
    assert!(table["records"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["lambda"] != "0"));

    for entry in fs::read_dir(&cache).unwrap() {
        let p = entry.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        fs::write(&p, text.replacen("lambda", "lambdb", 1)).unwrap();
    }
    let log = run("c.json");
    assert!(log.contains("corrupted"), "{log}");
    assert!(!log.contains("cache hit"));
    assert_eq!(a, fs::read(dir.path().join("c.json")).unwrap());
}

#[test]
fn uncached_lift_matches_cached() {
    let dir = tempfile::tempdir().unwrap();
    let plain = qtheta(["lift", "--d-bound", "40"]).ok().stdout();
    let cached = qtheta([
        "lift",
        "--d-bound",
        "40",
        "--workers",
        "2",
        "--cache-dir",
        &path(dir.path()),
    ])
    .ok()
    .stdout();
    assert_eq!(plain, cached);
}

#[test]
fn verify_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("report.tsv");
    fs::write(
        &cfg,
        format!(
            "# twisted regime at level 37\nN = 37\neps_g = 37:1\nexpected_ap = 2:-2,3:-3\nl = \"5/1\"\nD_bound = 120\ntolerance = 1e-5\noutput = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let r = qtheta(["verify", "--config", &path(&cfg)]).ok();
    assert!(r.stderr().contains("PASS"));
    let tsv = fs::read_to_string(&out).unwrap();
    assert!(tsv.starts_with("D\ta\tlambda\tL_l\tL_D\tratio\tdeviation\n"));
    let summary = json(&fs::read_to_string(out.with_extension("json")).unwrap());
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["l"], "5");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "N = 11\nramified = 11\n").unwrap();
    let r = qtheta([
        "classes",
        "--config",
        &path(&cfg),
        "--n",
        "37",
        "--ramified",
        "37",
    ])
    .ok();
    assert!(r.stdout().starts_with("h=3 mass=3\n"));
}

#[test]
fn verify_baseline_level_11() {
    let r = qtheta(["verify", "--d-bound", "100"]).ok();
    assert!(r.stdout().starts_with("D\ta\tlambda"));
    assert!(r.stderr().contains("zero_matches=all"));
}

#[test]
fn verify_fails_with_exit_3_on_wrong_target() {
    assert_eq!(
        qtheta(["verify", "--expected-ap", "2:1", "--d-bound", "40"]).code(),
        3
    );
}

#[test]
fn weights_dump_is_signed_on_the_cone() {
    let v = json(&qtheta(["weights", "--primes", "3,5"]).ok().stdout());
    let tables = v.as_array().unwrap();
    assert_eq!(tables.len(), 2);
    for t in tables {
        let p = t["p"].as_i64().unwrap();
        let cone = t["cone"].as_array().unwrap();
        // a nondegenerate ternary form mod p has p² − 1 nonzero isotropic vectors
        assert_eq!(cone.len() as i64, p * p - 1);
        assert!(cone.iter().all(|r| r[3].as_i64().unwrap().abs() == 1));
    }
}

#[test]
fn bad_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(qtheta(["classes", "--config", &path(&cfg)]).code(), 1);
}
