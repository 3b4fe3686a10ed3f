use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use percofpp::manifest::RunManifest;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_percofpp"));
    c.env_remove("PERCOFPP_SEED");
    c
}

fn run_dir(out: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8_lossy(&out.stdout).lines().next().expect("run directory on stdout").trim())
}

fn read_csv(dir: &Path, name: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(dir.join(name)).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn mu_on_the_deterministic_lattice() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["mu", "--dist", "dirac:1.0", "--p", "1.0", "--n", "32", "--replicas", "10", "--seed", "7", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = run_dir(&out);
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("mu-7-"));
    let rows = read_csv(&dir, "mu.csv");
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0][3].as_str(), rows[0][4].as_str()), ("1", "0"));

    let m = RunManifest::read(&dir).unwrap();
    assert_eq!(m.subcommand, "mu");
    assert_eq!(m.master_seed, 7);
    assert_eq!(m.replica_seeds.len(), 10);
    assert_eq!(m.config["dist"], "dirac:1.0");
    assert!(m.verify(&dir).unwrap().is_empty());
    let csvs = std::fs::read_dir(&dir).unwrap().filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "csv").count();
    assert_eq!(csvs, m.outputs.len());
}

#[test]
fn russo_report_on_builtin_square() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["russo", "--grid", "0.3,0.5,0.7", "--out"]).arg(tmp.path()).output().unwrap();
    assert!(out.status.success());
    let rows = read_csv(&run_dir(&out), "russo.csv");
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r[0], "2x2");
        assert!(r[6].parse::<f64>().unwrap() <= 1e-9);
    }
}

#[test]
fn replay_reproduces_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["lipschitz", "--p", "0.8,0.9,1.0", "--n", "16", "--replicas", "6", "--threads", "1", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let dir = run_dir(&out);
    let replay = bin().arg("replay").arg(&dir).args(["--threads", "3", "--out"]).arg(tmp.path()).output().unwrap();
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    let again = run_dir(&replay);
    assert_ne!(again, dir);
    for name in ["lipschitz_points.csv", "lipschitz_slopes.csv", "lipschitz_summary.csv"] {
        assert_eq!(std::fs::read(dir.join(name)).unwrap(), std::fs::read(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn replay_flags_tampered_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin().args(["animals", "--replicas", "5", "--out"]).arg(tmp.path()).output().unwrap();
    let dir = run_dir(&out);
    let path = dir.join("manifest.json");
    let mut m = RunManifest::read(&path).unwrap();
    m.outputs[0].sha256 = "0".repeat(64);
    m.write(&dir).unwrap();
    let replay = bin().arg("replay").arg(&path).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(replay.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&replay.stderr).contains("animals.csv"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("bad.conf");
    std::fs::write(&conf, "replicas = 3\nsede = 9\n").unwrap();
    let out = bin().arg("mu").arg("--config").arg(&conf).arg("--out").arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sede"));

    let out = bin().args(["mu", "--p", "0.3", "--out"]).arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["mu", "--set", "d=5", "--out"]).arg(tmp.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(std::fs::read_dir(tmp.path()).unwrap().all(|e| e.unwrap().path().is_file()));
}

#[test]
fn environment_sits_between_file_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let conf = tmp.path().join("run.conf");
    std::fs::write(&conf, "seed = 1\nreplicas = 2\np = 1.0\nn = 8\n").unwrap();
    let seed_of = |extra: &[&str], env: Option<&str>| {
        let mut c = bin();
        c.arg("mu").arg("--config").arg(&conf).args(extra).arg("--out").arg(tmp.path());
        if let Some(v) = env {
            c.env("PERCOFPP_SEED", v);
        }
        let out = c.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        RunManifest::read(&run_dir(&out)).unwrap().master_seed
    };
    assert_eq!(seed_of(&[], None), 1);
    assert_eq!(seed_of(&[], Some("2")), 2);
    assert_eq!(seed_of(&["--seed", "3"], Some("2")), 3);
}

#[test]
fn keys_lists_every_setting() {
    let out = bin().arg("keys").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for (k, _, _) in percofpp::config::KEYS {
        assert!(text.contains(k), "{k}");
    }
}
