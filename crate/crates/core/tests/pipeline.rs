use otto_core::cycle::{compare_engines, Mode};
use otto_core::report::report_value;
use otto_core::sweep::{emit_csv, format_float, run_sweep, Axis, SweepSpec};
use otto_core::{emit_report, parse_config, run_cycle, CycleConfig};

#[test]
fn config_to_report() {
    let (cfg, _) = parse_config("protocol.tau1_ms = 0.46\nengine.exact_closure = true\n").unwrap();
    let (_, r) = run_cycle(&cfg).unwrap();
    assert_eq!(r.mode, Mode::HeatEngine);
    let text = emit_report(&cfg).unwrap();
    assert_eq!(report_value(&text, "report.eta"), Some(format_float(r.eta).as_str()));
    assert_eq!(report_value(&text, "report.mode"), Some("heat_engine"));
}

#[test]
fn coherence_changes_the_efficiency() {
    let c = compare_engines(&CycleConfig::reference_point()).unwrap();
    assert!(c.original.eta > 2.0 * c.dephased.eta);
    assert!(c.original.e_inter < 0.0);
    assert!(c.max_residual() < 1e-8);
}

#[test]
fn sweep_csv_parses_back() {
    let base = CycleConfig::reference_point();
    let mut spec = SweepSpec::default_for(&base, Axis::Tau1);
    spec.start = 0.2e-3;
    spec.stop = 0.6e-3;
    spec.points = 5;
    let rows = run_sweep(&base, &spec).unwrap();
    let mut buf = Vec::new();
    emit_csv(&rows, &spec, "pipeline", &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines().skip(1);
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let eta = header.iter().position(|h| *h == "orig_eta").unwrap();
    for (line, row) in lines.zip(&rows) {
        let cells: Vec<&str> = line.split(',').collect();
        let parsed: f64 = cells[eta].parse().unwrap();
        let expected = row.original.as_ref().unwrap().as_ref().unwrap().eta;
        assert_eq!(parsed.to_bits(), expected.to_bits());
    }
}
