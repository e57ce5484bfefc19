use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sagnac-qn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_in(dir: &Path, config: &str) -> Output {
    let path = dir.join("scenario.json");
    fs::write(&path, config).unwrap();
    bin().arg("--config").arg(&path).current_dir(dir).output().unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn loss_sweep_writes_one_budget_per_value() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("fig4");
    let out = run(&[
        "--preset",
        "glasgow",
        "--sweep",
        "arm_loss_ppm=0,15,25,50,100",
        "--points",
        "40",
        "--references",
        "michelson",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for v in ["0", "15", "25", "50", "100"] {
        assert!(dir.path().join(format!("fig4_arm_loss_ppm_{v}.csv")).exists());
    }
    assert!(dir.path().join("fig4_references.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig4_summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["sweep_parameter"], "arm_loss_ppm");
    assert_eq!(summary["runs"].as_array().unwrap().len(), 5);
    let slope = summary["runs"][4]["low_frequency_slope"].as_f64().unwrap();
    assert!((slope + 2.0).abs() < 0.1, "{slope}");
}

#[test]
fn csv_schema_and_row_additivity() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        r#"{"preset": "et-lf", "overrides": {"arm_loss_ppm": 25, "eta_bs": 0.01,
            "laser_noise_level": 10}, "grid": {"points": 30}, "zeta_optimal": true,
            "output_prefix": "budget"}"#,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("budget.csv")).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let (header, rows) = parse_csv(&text);
    let ports = [
        "i", "p", "n_ln", "n_rn", "n_le", "n_re", "m_i", "m_p", "m_o", "detection",
    ];
    let mut want = vec!["frequency_hz", "total_asd_m_rthz", "sql_asd_m_rthz"];
    let cols: Vec<String> = ports.iter().map(|p| format!("{p}_psd_m2hz")).collect();
    want.extend(cols.iter().map(String::as_str));
    assert_eq!(header, want);
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[0][0], 1.0);
    assert_eq!(rows[29][0], 1000.0);
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
        }
    }
    for r in &rows {
        let sum: f64 = r[3..].iter().sum();
        assert!(r[3..].iter().all(|v| *v >= 0.0));
        assert!(r[1] > 0.0 && r[2] > 0.0);
        assert!((sum / (r[1] * r[1]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let config = r#"{"preset": "glasgow", "grid": {"points": 25},
        "sweep": {"parameter": "eta_bs", "values": [0.0, 0.01]},
        "overrides": {"arm_loss_ppm": 25}, "zeta_optimal": true,
        "references": ["sql", "sagnac", "michelson"], "output_prefix": "out/fig5"}"#;
    let read = |dir: &Path| {
        let mut files: Vec<_> = fs::read_dir(dir.join("out"))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .iter()
            .map(|p| (p.file_name().unwrap().to_owned(), fs::read(p).unwrap()))
            .collect::<Vec<_>>()
    };
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert!(run_in(a.path(), config).status.success());
    assert!(run_in(b.path(), config).status.success());
    let (fa, fb) = (read(a.path()), read(b.path()));
    assert_eq!(fa.len(), 4);
    assert_eq!(fa, fb);
}

#[test]
fn zero_imperfection_matches_ideal_reference() {
    let dir = TempDir::new().unwrap();
    for preset in ["glasgow", "et-lf"] {
        let out = run_in(
            dir.path(),
            &format!(
                r#"{{"preset": "{preset}", "overrides": {{"bs_loss_ppm": 0, "eta_pd": 1}},
                    "sweep": {{"parameter": "arm_loss_ppm", "values": [0, 25]}},
                    "references": ["sagnac"], "output_prefix": "{preset}"}}"#
            ),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let read = |name: String| parse_csv(&fs::read_to_string(dir.path().join(name)).unwrap());
        let (_, budget) = read(format!("{preset}_arm_loss_ppm_0.csv"));
        let (header, reference) = read(format!("{preset}_references.csv"));
        assert_eq!(header, ["frequency_hz", "sagnac_asd_m_rthz"]);
        assert_eq!(budget.len(), 600);
        for (b, r) in budget.iter().zip(&reference) {
            assert_eq!(b[0], r[0]);
            assert!((b[1] / r[1] - 1.0).abs() < 1e-10, "{preset} {} Hz", b[0]);
        }
        let (_, lossy) = read(format!("{preset}_arm_loss_ppm_25.csv"));
        assert!(lossy[0][1] > budget[0][1]);
    }
}

#[test]
fn laser_noise_sweep_on_et() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("figb");
    let out = run(&[
        "--preset",
        "et-lf",
        "--sweep",
        "laser_noise_level=1,3,10,30",
        "--points",
        "10",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 5);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cases = [
        (r#"{"grid": {"f_min_hz": 0}}"#, "grid.f_min_hz"),
        (r#"{"grid": {"points": 1}}"#, "grid.points"),
        (r#"{"preset": "virgo"}"#, "unknown preset"),
        (r#"{"preset": "glasgow", "laser": 3}"#, "scenario.json:1:"),
        (
            "{\"preset\": \"glasgow\",\n \"grid\": {\"points\": }}",
            "scenario.json:2:",
        ),
        (
            r#"{"sweep": {"parameter": "eta_bs", "values": [0.3]}}"#,
            "sweep.values",
        ),
        (
            r#"{"sweep": {"parameter": "arm_loss_ppm", "values": [7000]}}"#,
            "sweep.values",
        ),
    ];
    for (config, needle) in cases {
        let out = run_in(dir.path(), config);
        assert_eq!(out.status.code(), Some(2), "{config}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{config}: {err}");
    }
    let out = run(&["--preset", "glasgow", "--sweep", "eta_bs"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--preset", "glasgow", "--zeta", "1", "--zeta-opt"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--config", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_errors_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        r#"{"overrides": {"p_in_w": 0}, "grid": {"points": 5}, "output_prefix": "dark"}"#,
    );
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("at 10 Hz"), "{err}");
}
