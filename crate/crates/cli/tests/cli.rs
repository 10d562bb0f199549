use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn jrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jrc"))
        .args(args)
        .output()
        .expect("spawn jrc")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .display()
        .to_string()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn num(cell: &str) -> f64 {
    cell.parse().unwrap()
}

#[test]
fn sweep_writes_feasible_rows_and_manifest() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "sweep.csv");
    let res = jrc(&["sweep", &scenario("table1.cfg"), "--r02", "0.7", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(
        "ar_sq,a1_sq,a2_sq,r1,r2,r_sum,sigma_eps_sq,sigma_eps_sq_norm,log10_norm,fairness\n"
    ));
    assert!(!text.contains('\r'));
    let rows = rows(&out);
    assert_eq!(rows.len(), 161);
    let last = num(&rows.last().unwrap()[0]);
    assert!(last > 0.79 && last < 0.8025, "{last}");
    assert!(String::from_utf8_lossy(&res.stdout).contains("0.802514"));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sweep.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["params"]["command"], "sweep");
    assert_eq!(manifest["scenario"]["h2_gain"], 1e-10);
    assert_eq!(manifest["outputs"][0], s(&out));
}

#[test]
fn numbers_have_nine_significant_digits() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "sweep.csv");
    assert_eq!(code(&jrc(&["sweep", &scenario("table1.cfg"), "--grid", "0.1:0.5:9", "--out", s(&out)])), 0);
    for row in rows(&out) {
        for cell in row {
            let (mant, exp) = cell.split_once('e').unwrap_or_else(|| panic!("{cell}"));
            let digits = mant.trim_start_matches('-');
            assert_eq!(digits.len(), 10, "{cell}");
            assert_eq!(&digits[1..2], ".");
            exp.parse::<i32>().unwrap();
        }
    }
}

#[test]
fn infeasible_grid_exits_2_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let res = jrc(&["sweep", &scenario("table1.cfg"), "--r02", "1.5", "--grid", "0.5:0.9:20", "--out", s(&out)]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("kappa_min = 0.578"), "{}", stderr(&res));
    assert!(!out.exists());
}

#[test]
fn bad_configuration_exits_3_without_output() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "x.csv");
    let cases: Vec<(&str, &str)> = vec![
        ("garbage.cfg", "h1_gain = oops\n"),
        ("unknown.cfg", "h1_gain = 1e-9\nfrequency = 3\n"),
        ("dup.cfg", "h1_gain = 1e-9\nh1_gain_db = -90\n"),
        ("order.cfg", "h1_gain = 1e-10\nh2_gain = 1e-9\n"),
    ];
    for (name, body) in cases {
        let cfg = path(&dir, name);
        fs::write(&cfg, body).unwrap();
        let res = jrc(&["sweep", s(&cfg), "--out", s(&out)]);
        assert_eq!(code(&res), 3, "{name}: {}", stderr(&res));
        assert!(!out.exists(), "{name}");
    }
    let res = jrc(&["sweep", s(&path(&dir, "missing.cfg")), "--out", s(&out)]);
    assert_eq!(code(&res), 3);
}

#[test]
fn usage_errors_exit_3_and_help_exits_0() {
    assert_eq!(code(&jrc(&["--help"])), 0);
    assert_eq!(code(&jrc(&["sweep", "--help"])), 0);
    assert_eq!(code(&jrc(&["--version"])), 0);
    assert_eq!(code(&jrc(&[])), 3);
    assert_eq!(code(&jrc(&["frobnicate"])), 3);
    let cfg = scenario("table1.cfg");
    assert_eq!(code(&jrc(&["sweep", &cfg])), 3);
    assert_eq!(code(&jrc(&["sweep", &cfg, "--grid", "0.9:0.1:5", "--out", "/dev/null/x"])), 3);
    assert_eq!(code(&jrc(&["sweep", &cfg, "--waveform", "chirp", "--out", "/dev/null/x"])), 3);
    assert_eq!(code(&jrc(&["sweep", &cfg, "--r02", "nan", "--out", "/dev/null/x"])), 3);
}

#[test]
fn outputs_are_not_overwritten_without_force() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    fs::write(&out, "keep me").unwrap();
    let args = ["starpoints", &scenario("table1.cfg"), "--out", s(&out)];
    let res = jrc(&args);
    assert_eq!(code(&res), 3);
    assert!(stderr(&res).contains("--force"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "keep me");
    assert!(!dir.path().join("s.csv.manifest.json").exists());

    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&jrc(&forced)), 0);
    assert!(fs::read_to_string(&out).unwrap().starts_with("r01,r02,"));
}

#[test]
fn starpoints_cover_the_default_qos_pairs() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "stars.csv");
    assert_eq!(code(&jrc(&["starpoints", &scenario("table1.cfg"), "--out", s(&out)])), 0);
    let rows = rows(&out);
    let ar: Vec<f64> = rows.iter().map(|r| num(&r[2])).collect();
    for (got, want) in ar.iter().zip([0.70858, 0.77043, 0.25826]) {
        assert!((got - want).abs() < 1e-4, "{got} vs {want}");
    }

    let res = jrc(&["starpoints", &scenario("table1.cfg"), "--qos", "5:5", "--out", s(&path(&dir, "b.csv"))]);
    assert_eq!(code(&res), 2);
    let res = jrc(&["starpoints", &scenario("table1.cfg"), "--qos", "", "--out", s(&path(&dir, "c.csv"))]);
    assert_eq!(code(&res), 3);
}

#[test]
fn fairness_curves_follow_the_requested_list() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "fair.csv");
    assert_eq!(code(&jrc(&["fairness", &scenario("table1.cfg"), "--r02", "0.7", "--out", s(&out)])), 0);
    let rows = rows(&out);
    assert_eq!(rows.len(), 161);
    assert!(rows.iter().all(|r| num(&r[0]) == 0.7));

    let res = jrc(&["fairness", &scenario("table1.cfg"), "--r02", "3", "--out", s(&path(&dir, "f3.csv"))]);
    assert_eq!(code(&res), 2);
}

#[test]
fn asymmetry_writes_one_csv_per_gap() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "asym.json");
    let res = jrc(&["asymmetry", &scenario("table1.cfg"), "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let counts: Vec<usize> = [5, 10, 15]
        .iter()
        .map(|g| rows(&dir.path().join(format!("asym_gap{g}db.csv"))).len())
        .collect();
    assert_eq!(counts, vec![189, 161, 75]);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["cases"].as_array().unwrap().len(), 3);
    assert_eq!(json["files"][1], "asym_gap10db.csv");

    let res = jrc(&["asymmetry", &scenario("table1.cfg"), "--gaps-db", "5,-1", "--out", s(&path(&dir, "n.json"))]);
    assert_eq!(code(&res), 3);
    assert!(!dir.path().join("n_gap5db.csv").exists());
}

#[test]
fn waveform_validation_passes_on_defaults() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "wf.csv");
    let res = jrc(&["waveform-validate", "--out", s(&out)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let rows = rows(&out);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(num(&r[7]) < 1e-6, "{r:?}");
        assert!(num(&r[8]) < 0.05, "{r:?}");
    }
    let res = jrc(&["waveform-validate", "--oversampling", "2", "--out", s(&path(&dir, "u.csv"))]);
    assert_eq!(code(&res), 3);
}

#[test]
fn mc_delay_reports_json_and_respects_the_snr_guard() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "mc.json");
    let args = [
        "mc-delay",
        &scenario("boosted_mc.cfg"),
        "--alloc",
        "0,0,0.999999",
        "--delay",
        "1.2345e-5",
        "--trials",
        "200",
        "--seed",
        "9",
        "--out",
        s(&out),
    ];
    let res = jrc(&args);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rep["trials"], 200);
    assert_eq!(rep["seed"], 9);
    let eff = rep["efficiency"].as_f64().unwrap();
    assert!(eff > 0.5 && eff < 2.0, "{eff}");

    let res = jrc(&[
        "mc-delay",
        &scenario("table1.cfg"),
        "--alloc",
        "0,0,0.999",
        "--delay",
        "1e-5",
        "--trials",
        "200",
        "--out",
        s(&path(&dir, "low.json")),
    ]);
    assert_eq!(code(&res), 2);
    assert!(stderr(&res).contains("guard"));

    let res = jrc(&[
        "mc-delay",
        &scenario("table1.cfg"),
        "--alloc",
        "0.6,0.6,0.2",
        "--delay",
        "1e-5",
        "--out",
        s(&path(&dir, "over.json")),
    ]);
    assert_eq!(code(&res), 3);
}

#[test]
fn sequential_and_parallel_runs_agree_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.csv");
    let b = path(&dir, "b.csv");
    let cfg = scenario("table1.cfg");
    assert_eq!(code(&jrc(&["region", &cfg, "--samples", "3000", "--seed", "5", "--out", s(&a)])), 0);
    assert_eq!(
        code(&jrc(&["--sequential", "region", &cfg, "--samples", "3000", "--seed", "5", "--out", s(&b)])),
        0
    );
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.csv");
    assert_eq!(code(&jrc(&["sweep", &scenario("table1.cfg"), "--r02", "1.0", "--out", s(&out)])), 0);
    let manifest = dir.path().join("s.csv.manifest.json");
    let again = path(&dir, "again.csv");
    let res = jrc(&["replay", s(&manifest), "--out", s(&again)]);
    assert_eq!(code(&res), 0, "{}", stderr(&res));
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());

    // Default target is the recorded output, which already exists.
    assert_eq!(code(&jrc(&["replay", s(&manifest)])), 3);
    let before = fs::read(&manifest).unwrap();
    assert_eq!(code(&jrc(&["replay", s(&manifest), "--force"])), 0);
    assert_eq!(fs::read(&manifest).unwrap(), before);

    let broken = path(&dir, "broken.json");
    fs::write(&broken, "{\"tool\": \"jrc\"}").unwrap();
    assert_eq!(code(&jrc(&["replay", s(&broken)])), 3);
}
