use std::fs;
use std::process::{Command, Output};

fn otto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_otto")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(otto(&["--help"]).status.code(), Some(0));
    assert_eq!(otto(&[]).status.code(), Some(1));
    assert_eq!(otto(&["launch"]).status.code(), Some(1));
    assert_eq!(otto(&["sweep", "--preset", "fig9", "--out", "x.csv"]).status.code(), Some(1));
    let both = otto(&["sweep", "--preset", "fig2a", "--axis", "tau1", "--out", "x.csv"]);
    assert_eq!(both.status.code(), Some(1));
    assert_eq!(otto(&["run", "--config", "/nonexistent/otto.toml"]).status.code(), Some(1));
}

#[test]
fn bad_config_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[protocol]\ntau1_ms = -0.2\n").unwrap();
    let out = otto(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("protocol.tau1"));

    fs::write(&path, "protocol.tau1_ms = 0.2\nengine.colour = \"red\"\n").unwrap();
    let out = otto(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("engine.colour"));
}

#[test]
fn numerical_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight.toml");
    fs::write(&path, "engine.tolerance = 1e-300\n").unwrap();
    let out = otto(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("converge"));
}

#[test]
fn run_reports_operating_point() {
    let out = otto(&["run"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "report.mode=heat_engine"));
    assert!(text.lines().any(|l| l == "config.exact_closure=false"));
    assert_eq!(text, stdout(&otto(&["run"])));

    let out = otto(&["run", "--exact-closure", "--dephased"]);
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "config.dephased=true"));
    let residuals: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("residual."))
        .map(|l| l.split_once('=').unwrap().1.parse().unwrap())
        .collect();
    assert!(!residuals.is_empty() && residuals.iter().all(|r| *r < 1e-8));
}

#[test]
fn explicit_axis_sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec![
            "sweep".to_string(),
            "--axis".into(),
            "tau_therm_h".into(),
            "--start".into(),
            "20".into(),
            "--stop".into(),
            "30".into(),
            "--points".into(),
            "41".into(),
            "--out".into(),
            p.to_str().unwrap().into(),
        ]
    };
    for p in [&a, &b] {
        let argv = args(p);
        let out = otto(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 43);
    assert!(lines[0].starts_with("# otto-sweep schema=1") && lines[0].contains("axis=tau_therm_h"));
    assert!(lines[2].starts_with("2.0000000000000000e1,4.6000000000000002e-1,2.0000000000000000e1,"));
    assert!(lines[42].starts_with("3.0000000000000000e1,"));
}

#[test]
fn sweep_from_config_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "[sweep]\naxis = \"tau1\"\nstart_ms = 0.4\nstop_ms = 0.5\npoints = 3\nvariants = [\"original\"]\nclosure = \"exact\"\n",
    )
    .unwrap();
    let out_path = dir.path().join("s.csv");
    let out = otto(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.lines().next().unwrap().contains("closure=exact"));
    let header = text.lines().nth(1).unwrap();
    assert!(header.split(',').any(|c| c.starts_with("orig_")));
    assert!(!header.split(',').any(|c| c.starts_with("deph_")));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn quick_validation() {
    let out = otto(&["validate", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() > 10);
    assert!(!text.contains("FAIL"));
}
