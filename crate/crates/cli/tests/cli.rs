use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hjc(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hjc"));
    c.args(args);
    for key in ["HJC_CONFIG", "HJC_THREADS", "HJC_SEED", "HJC_OUT_DIR", "HJC_MODE", "HJC_DENSE_THRESHOLD"] {
        c.env_remove(key);
    }
    c.envs(envs.iter().copied());
    c.output().unwrap()
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SMALL_DISORDER: &str = r#"
[model]
n_molecules = 3
lambda_e = 1.0
[model.trunc]
m_sym_max = 4
m_nonsym_max = 2
[disorder]
sigma = 0.5
n_realizations = 12
[run]
seed = 9
ratios = [1.0, 4.0]
dense_threshold = 0
"#;

#[test]
fn missing_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hjc(&["--config", "/nonexistent/x.cfg", "--out-dir", s(&out), "p0-sweep"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    let o = hjc(&["--out-dir", s(&out), "p0-sweep"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_keys_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "[model]\nn_molecules = 2\nlamda_e = 1.0\n",
        "[model]\nn_molecules = 2\n[run]\nsed = 3\n",
        "[model]\nn_molecules = 2\n[model.trunc]\nm_sym_max = 1\nm_nonsym_max = 2\n",
    ] {
        let cfg = write_cfg(dir.path(), text);
        let o = hjc(&["--config", s(&cfg), "--out-dir", s(&dir.path().join("o")), "p0-sweep"], &[]);
        assert_eq!(o.status.code(), Some(2), "{text}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn p0_sweep_columns_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "[model]\nn_molecules = 2\nlambda_e = 1.0\n[run]\nn_values = [2, 3]\nomega_rabi_values = [2.0, 4.0]\n",
    );
    let out = dir.path().join("o");
    let o = hjc(&["--config", s(&cfg), "--out-dir", s(&out), "p0-sweep"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("p0_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for col in ["N", "omega_rabi", "p0", "bound", "residual", "dim", "ground_energy"] {
        assert!(header.contains(&col), "{col}");
    }
    assert_eq!(lines.count(), 4);
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("p0_sweep.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "ok");
    assert_eq!(m["outputs"][0]["bytes"].as_u64().unwrap() as usize, csv.len());
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["config"]["model"]["trunc"]["m_sym_max"], 6);
}

#[test]
fn et_rate_manifest_records_model_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig3a.cfg");
    let out = dir.path().join("o");
    let o = hjc(&["--config", cfg, "--out-dir", s(&out), "et-rate"], &[]);
    assert!(o.status.success());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("et_rate_fig3a.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["flags"]["lineshape"], "gaussian");
    assert_eq!(m["flags"]["include_stokes_shift"], true);
    let o = hjc(&["--config", cfg, "--out-dir", s(&out), "--mode", "fig9", "et-rate"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3_and_still_writes_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "[model]\nn_molecules = 3\nlambda_e = 1.0\nomega_rabi = 2.0\n[run]\nmax_iter = 5\ndense_threshold = 0\n",
    );
    let out = dir.path().join("o");
    let o = hjc(&["--config", s(&cfg), "--out-dir", s(&out), "p0-sweep"], &[]);
    assert_eq!(o.status.code(), Some(3));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("p0_sweep.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "not_converged");
    assert!(fs::read_to_string(out.join("p0_sweep.csv")).unwrap().contains("not_converged"));
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/fig3b.cfg");
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = hjc(&["--config", cfg, "--out-dir", s(&blocker.join("sub")), "et-rate"], &[]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn disorder_runs_are_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_DISORDER);
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "4", "1"].iter().enumerate() {
        let out = dir.path().join(format!("o{i}"));
        let o = hjc(
            &["--config", s(&cfg), "--out-dir", s(&out), "--threads", threads, "disorder-ensemble", "--dump-realizations"],
            &[],
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push((
            fs::read(out.join("disorder_ensemble.csv")).unwrap(),
            fs::read(out.join("disorder_realizations.csv")).unwrap(),
        ));
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);
}

#[test]
fn seed_comes_from_flag_then_environment_then_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), SMALL_DISORDER);
    let run = |name: &str, args: &[&str], env: &[(&str, &str)]| {
        let out = dir.path().join(name);
        let mut a = vec!["--config", s(&cfg), "--out-dir", s(&out)];
        a.extend_from_slice(args);
        a.push("disorder-ensemble");
        assert!(hjc(&a, env).status.success());
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("disorder_ensemble.manifest.json")).unwrap()).unwrap();
        (m["seed"].as_u64().unwrap(), fs::read(out.join("disorder_ensemble.csv")).unwrap())
    };
    let (a, csv_a) = run("a", &[], &[]);
    let (b, csv_b) = run("b", &[], &[("HJC_SEED", "77")]);
    let (c, _) = run("c", &["--seed", "5"], &[("HJC_SEED", "77")]);
    assert_eq!((a, b, c), (9, 77, 5));
    assert_ne!(csv_a, csv_b);
}
