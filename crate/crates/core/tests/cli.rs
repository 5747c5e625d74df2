use std::path::Path;
use std::process::{Command, Output};

use doa_core::harness::{parse_csv, presets, ExperimentConfig, CSV_HEADER};

fn doa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn synth_then_estimate_with_each_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("x.doa1");
    let o = doa(&[
        "synth",
        "--sensors",
        "10",
        "--angles-deg",
        "-20,35",
        "--snr-db",
        "20",
        "--snapshots",
        "200",
        "--seed",
        "4",
        "--out",
        p(&file),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for alg in ["wlslp", "root_music", "unitary_esprit"] {
        let o = doa(&[
            "estimate",
            "--snapshots",
            p(&file),
            "--k",
            "2",
            "--algorithm",
            alg,
        ]);
        assert!(o.status.success(), "{alg}: {}", stderr(&o));
        let angles: Vec<f64> = stdout(&o)
            .trim()
            .split(',')
            .map(|s| s.parse().unwrap())
            .collect();
        assert_eq!(angles.len(), 2);
        assert!((angles[0] + 20.0).abs() < 0.5, "{alg}: {angles:?}");
        assert!((angles[1] - 35.0).abs() < 0.5, "{alg}: {angles:?}");
    }
}

#[test]
fn estimate_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.doa1");
    std::fs::write(&file, b"DOA1\x02\x00").unwrap();
    let o = doa(&["estimate", "--snapshots", p(&file), "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"), "{}", stderr(&o));

    let o = doa(&[
        "estimate",
        "--snapshots",
        p(&dir.path().join("missing")),
        "--k",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));

    let good = dir.path().join("x.doa1");
    let o = doa(&[
        "synth",
        "--sensors",
        "4",
        "--angles-deg",
        "0",
        "--snr-db",
        "10",
        "--snapshots",
        "20",
        "--out",
        p(&good),
    ]);
    assert!(o.status.success());
    let o = doa(&[
        "estimate",
        "--snapshots",
        p(&good),
        "--k",
        "1",
        "--algorithm",
        "music",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = doa(&["estimate", "--snapshots", p(&good), "--k", "4"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sweep_from_config_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.cfg");
    std::fs::write(
        &cfg,
        "sensors = 8\nangles_deg = 0, 30\nsnapshots = 40\ntrials = 10\n\
         algorithms = wlslp, unitary_esprit\nsweep.variable = snr_db\nsweep.values = 0, 10\n",
    )
    .unwrap();
    let out = dir.path().join("res/tiny");
    let o = doa(&[
        "sweep",
        "--config",
        p(&cfg),
        "--out",
        p(&out),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    let rows = parse_csv(&csv).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.n_trials == 10));
    let svg = std::fs::read_to_string(dir.path().join("res/tiny.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(dir.path().join("res/tiny.meta.txt").exists());
}

#[test]
fn sweep_preset_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4");
    let o = doa(&[
        "sweep",
        "--preset",
        "fig4",
        "--trials",
        "3",
        "--seed",
        "11",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_csv(&std::fs::read_to_string(out.with_extension("csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 12);

    let o = doa(&["sweep", "--preset", "fig9", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fig9"));
}

#[test]
fn crb_lists_every_point() {
    let cfg = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/fig4.cfg");
    let o = doa(&["crb", "--config", p(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "sweep_variable,sweep_value,crb_deg,crb_theta1_deg,crb_theta2_deg"
    );
    assert_eq!(lines.len(), 5);
    let crb: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    // The stochastic CRB scales exactly as 1/sqrt(N).
    assert!((crb[0] / crb[3] - 10f64.sqrt()).abs() < 1e-6);
}

#[test]
fn bad_config_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "sensors = 8\nsensors = 9\n").unwrap();
    let o = doa(&["crb", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
}

#[test]
fn shipped_configs_match_presets() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for name in ["fig1", "fig2", "fig3", "fig4", "fig5"] {
        let text = std::fs::read_to_string(root.join(format!("{name}.cfg"))).unwrap();
        let file = ExperimentConfig::parse(&text).unwrap();
        let preset = presets::by_name(name).unwrap();
        assert_eq!(file.n_trials, preset.n_trials, "{name}");
        assert_eq!(file.master_seed, preset.master_seed, "{name}");
        assert_eq!(file.algorithms, preset.algorithms, "{name}");
        assert_eq!(file.point_count(), preset.point_count(), "{name}");
        for i in 0..file.point_count() {
            let (a, b) = (file.point(i).unwrap(), preset.point(i).unwrap());
            assert_eq!(a.geometry, b.geometry, "{name} point {i}");
            assert_eq!(a.scenario, b.scenario, "{name} point {i}");
            assert_eq!(a.n_snapshots, b.n_snapshots, "{name} point {i}");
        }
    }
}
