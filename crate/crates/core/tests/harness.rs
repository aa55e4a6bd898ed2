use std::fs;
use std::path::{Path, PathBuf};

use chemotaxis_lab::config::{parse_config, Resolution, Scenario, ScenarioConfig};
use chemotaxis_lab::harness::{report, run, sweep, Axis, SweepSpec};
use chemotaxis_lab::{Error, Params};

fn small(scenario: Scenario, chi: f64) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(scenario, Params::new(chi, 1.0, 1.0, 100.0, 2.0).unwrap(), 1.0);
    c.grid.resolution = Resolution::Spacing(1.0 / 32.0);
    c.observer.sample_interval = Some(0.05);
    c
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().to_string()).collect()
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn identical_configs_give_identical_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::Chemotaxis, 8.0);
    c.observer.snapshot_times = vec![0.5];
    run(&c, &tmp.path().join("a")).unwrap();
    run(&c, &tmp.path().join("b")).unwrap();
    for name in ["mass_timeseries.csv", "reaction_time.csv", "snapshot_0.5.csv", "config.echo"] {
        assert_eq!(read(&tmp.path().join("a"), name), read(&tmp.path().join("b"), name), "{name}");
    }
    let header = read(&tmp.path().join("a"), "mass_timeseries.csv");
    assert!(header.starts_with("t,mass_rho1,mass_rho2,boundary_mass\n"));
    assert!(read(&tmp.path().join("a"), "snapshot_0.5.csv").starts_with("x,rho1,rho2,v\n"));
}

#[test]
fn no_reaction_reports_no_crossing() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::Chemotaxis, 8.0);
    c.params.eps = 0.0;
    run(&c, tmp.path()).unwrap();
    assert_eq!(column(&read(tmp.path(), "reaction_time.csv"), "crossed"), ["false"]);
}

#[test]
fn fast_diffusive_reaction_reports_case_one_ratio() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::Diffusive, 0.0);
    c.params.m0 = 1e3;
    c.t_end = 50.0;
    c.stop_at_quarter = true;
    let s = run(&c, tmp.path()).unwrap();
    let d = s.diffusive.unwrap();
    assert!(d.large_reaction);
    assert!(d.case1_ratio.unwrap() > 0.0);
    let stored = read(tmp.path(), "reaction_time.csv");
    assert_eq!(column(&stored, "crossed"), ["true"]);
    assert!(!column(&stored, "case1_ratio")[0].is_empty());
}

#[test]
fn mass_series_round_trips_through_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let c = small(Scenario::Chemotaxis, 8.0);
    let s = run(&c, tmp.path()).unwrap();
    let csv = read(tmp.path(), "mass_timeseries.csv");
    let t: Vec<f64> = column(&csv, "t").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(*t.last().unwrap(), s.t_final);
    // report regenerates the same reaction-time row.
    let before = read(tmp.path(), "reaction_time.csv");
    report(tmp.path()).unwrap();
    assert_eq!(before, read(tmp.path(), "reaction_time.csv"));
}

#[test]
fn failed_writes_leave_nothing_behind() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    fs::create_dir_all(out.join("mass_timeseries.csv")).unwrap();
    let err = run(&small(Scenario::Diffusive, 0.0), &out).unwrap_err();
    assert!(matches!(err, Error::Csv(_) | Error::Io { .. }), "{err}");
    assert!(!out.join("config.echo").exists());

    let fresh = tmp.path().join("fresh");
    let mut bad = small(Scenario::Chemotaxis, 8.0);
    bad.grid.half_width = Some(3.0);
    assert!(run(&bad, &fresh).is_err());
    assert!(!fresh.exists());
}

#[test]
fn sweep_is_independent_of_worker_count() {
    let tmp = tempfile::tempdir().unwrap();
    let mut base = small(Scenario::Chemotaxis, 8.0);
    base.stop_at_quarter = true;
    base.t_end = 20.0;
    let spec = |workers| SweepSpec {
        base: base.clone(),
        axes: vec![(Axis::L, vec![2.0, 3.0, 4.0]), (Axis::Chi, vec![4.0, 8.0])],
        workers: Some(workers),
    };
    let one = sweep(&spec(1), &tmp.path().join("one")).unwrap();
    let many = sweep(&spec(8), &tmp.path().join("many")).unwrap();
    assert_eq!(one, many);
    assert_eq!(one.rows.len(), 6);
    assert_eq!(one.fits.len(), 2);
    for name in ["sweep.csv", "fits.csv"] {
        assert_eq!(read(&tmp.path().join("one"), name), read(&tmp.path().join("many"), name));
    }
    let ls = column(&read(&tmp.path().join("one"), "sweep.csv"), "L");
    assert_eq!(ls, ["2", "2", "3", "3", "4", "4"]);

    // Regenerating fits from the stored rows reproduces them.
    let fits = read(&tmp.path().join("one"), "fits.csv");
    report(&tmp.path().join("one")).unwrap();
    assert_eq!(fits, read(&tmp.path().join("one"), "fits.csv"));
}

#[test]
fn single_point_sweep_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = small(Scenario::Chemotaxis, 8.0);
    c.stop_at_quarter = true;
    let summary = run(&c, &tmp.path().join("run")).unwrap();
    let report = sweep(
        &SweepSpec {
            base: c,
            axes: vec![(Axis::Eps, vec![1.0])],
            workers: None,
        },
        &tmp.path().join("sweep"),
    )
    .unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].summary, summary);
}

#[test]
fn failing_points_are_listed_without_aborting() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = SweepSpec {
        base: small(Scenario::Chemotaxis, 8.0),
        axes: vec![(Axis::Sigma, vec![1.0, -1.0, 2.0])],
        workers: Some(2),
    };
    let r = sweep(&spec, tmp.path()).unwrap();
    assert_eq!(r.rows.len(), 2);
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].0, 1);
    assert_eq!(read(tmp.path(), "sweep.csv").lines().count(), 3);
    assert!(read(tmp.path(), "failures.csv").contains("sigma"));
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(configs_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "cfg") {
            let c = parse_config(&fs::read_to_string(&path).unwrap()).unwrap();
            c.validate().unwrap();
            assert_eq!(parse_config(&c.to_text()).unwrap(), c, "{}", path.display());
            seen += 1;
        }
    }
    assert!(seen >= 6);
}

#[test]
fn config_errors_name_the_line_or_key() {
    match parse_config("[scenario]\nname = chemotaxis\nname = diffusive\n") {
        Err(Error::Syntax { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match parse_config("[params]\nchi = 1\neps = 1\nsigma = 1\nM0 = 1\nL = 4\n[scenario]\nname = chemotaxis\ncolour = red\n") {
        Err(Error::Validation { key, .. }) => assert_eq!(key, "scenario.colour"),
        other => panic!("{other:?}"),
    }
    match parse_config("scenario.name = chemotaxis\nparams.chi = 1\nparams.eps = 1\nparams.sigma = 1\nparams.M0 = 1\nparams.L = 30\ntime.t_end = 1\ngrid.half_width = 20\n") {
        Err(Error::Validation { key, .. }) => assert_eq!(key, "params.L"),
        other => panic!("{other:?}"),
    }
}
