use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn protolife(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_protolife"))
        .args(args)
        .env_remove("PROTOLIFE_SEED")
        .output()
        .expect("spawn protolife")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// A small world config written next to the run.
fn write_config(dir: &Path, seed: u64) -> String {
    let base = stdout(&protolife(&["config"]));
    let text: String = base
        .lines()
        .map(|l| {
            let key = l.split('=').next().unwrap_or("").trim();
            match key {
                "master_seed" => format!("master_seed = {seed}"),
                "world_radius" => "world_radius = 8.0".into(),
                "n_plants" => "n_plants = 16".into(),
                "n_protozoa" => "n_protozoa = 8".into(),
                "n_formations" => "n_formations = 2".into(),
                "grid_size" => "grid_size = 128".into(),
                "stats_interval" => "stats_interval = 50".into(),
                _ => l.to_string(),
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let path = dir.join(format!("cfg{seed}.toml"));
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn run(dir: &Path, name: &str, cfg: &str, steps: &str) -> std::path::PathBuf {
    let out = dir.join(name);
    let o = protolife(&[
        "run",
        "--config",
        cfg,
        "--steps",
        steps,
        "--snapshot-interval",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn run_writes_a_complete_record() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 1);
    let out = run(tmp.path(), "r", &cfg, "300");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["end_tick"], 300);
    assert_eq!(manifest["snapshots"].as_array().unwrap().len(), 4);
    let stats = fs::read_to_string(out.join("stats.csv")).unwrap();
    assert!(stats.starts_with("# protolife stats format 1"));
    let rows = stats.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 1 + 6);
    assert!(out.join("lineage.csv").exists());

    let s = protolife(&[
        "stats",
        out.to_str().unwrap(),
        "--series",
        tmp.path().join("series").to_str().unwrap(),
    ]);
    assert!(s.status.success());
    assert!(stdout(&s).contains("protozoa"));
    assert!(tmp.path().join("series/plants.csv").exists());
}

#[test]
fn seed_flag_overrides_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 1);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, seed) in [(&a, "1"), (&b, "2")] {
        let o = protolife(&[
            "run",
            "--config",
            &cfg,
            "--seed",
            seed,
            "--steps",
            "200",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_ne!(
        fs::read(a.join("stats.csv")).unwrap(),
        fs::read(b.join("stats.csv")).unwrap()
    );
}

#[test]
fn replay_passes_and_catches_substitution() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 3);
    let out = run(tmp.path(), "r", &cfg, "300");
    let m = out.to_str().unwrap();
    let ok = protolife(&["verify-replay", m, "--index", "1"]);
    assert!(ok.status.success(), "{}", stdout(&ok));
    assert!(stdout(&ok).starts_with("PASS"));

    // Swap in a snapshot from a different seed at the same tick.
    let other = run(tmp.path(), "o", &write_config(tmp.path(), 4), "300");
    let name = "snapshots/tick_0000000200.snap";
    fs::copy(other.join(name), out.join(name)).unwrap();
    let bad = protolife(&["verify-replay", m, "--index", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).starts_with("FAIL"));
}

#[test]
fn replay_refuses_foreign_snapshot_versions() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 5);
    let out = run(tmp.path(), "r", &cfg, "100");
    let path = out.join("manifest.json");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replace("\"snapshot_version\": 1", "\"snapshot_version\": 99");
    fs::write(&path, text).unwrap();
    let o = protolife(&["verify-replay", out.to_str().unwrap(), "--index", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("snapshot format 99"));
}

#[test]
fn render_and_dump_read_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), 6);
    let out = run(tmp.path(), "r", &cfg, "100");
    let snap = out.join("snapshots/tick_0000000100.snap");
    let ppm = tmp.path().join("f.ppm");
    let o = protolife(&[
        "render",
        snap.to_str().unwrap(),
        "--out",
        ppm.to_str().unwrap(),
        "--render-scale",
        "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(&ppm).unwrap();
    assert!(bytes.starts_with(b"P6\n"));
    let header = String::from_utf8_lossy(&bytes[..20]).into_owned();
    let dims: Vec<usize> = header
        .lines()
        .nth(1)
        .unwrap()
        .split(' ')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(
        bytes.len(),
        header.lines().take(3).map(|l| l.len() + 1).sum::<usize>() + dims[0] * dims[1] * 3
    );

    let d = protolife(&["dump", snap.to_str().unwrap()]);
    assert!(d.status.success());
    assert!(stdout(&d).starts_with("tick 100"));
}

#[test]
fn bad_input_exits_with_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "bogus = 1\n").unwrap();
    let o = protolife(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--steps",
        "1",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let junk = tmp.path().join("junk.snap");
    fs::write(&junk, b"not a snapshot").unwrap();
    let o = protolife(&["dump", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let text = stdout(&protolife(&["config"]));
    let path = tmp.path().join("d.toml");
    fs::write(&path, &text).unwrap();
    let o = protolife(&[
        "run",
        "--config",
        path.to_str().unwrap(),
        "--steps",
        "0",
        "--out",
        tmp.path().join("z").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}
