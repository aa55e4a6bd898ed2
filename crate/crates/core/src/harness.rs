//! Scenario orchestration, sweeps and CSV persistence.
//!
//! Every output is a pure function of the configuration: no timestamps, no
//! randomness, and sweep rows are ordered by parameter point regardless of
//! the worker count.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::analytics::{
    decay_ratio, diffusive_bound_diagnostics, fit_power_law, pass_through_integral,
    quarter_mass_time, DiffusiveDiagnostics, MassSeries, PowerFit, ReactionTimeResult,
};
use crate::config::{parse_config, PotentialKind, Scenario, ScenarioConfig};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::initial::{build_rho2_initial, eta_profile, Params};
use crate::potentials::PotentialSpec;
use crate::system::{
    evolve_chemotaxis, evolve_diffusive, evolve_dual, evolve_fokker_planck, evolve_gsystem,
    evolve_no_reaction, Horizon, Observer, ObserverSpec, SystemState,
};

/// Environment variable holding the default sweep worker count.
pub const WORKERS_ENV: &str = "CHEMOLAB_WORKERS";

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scenario: Scenario,
    pub params: Params,
    pub grid: Grid,
    pub t_final: f64,
    pub steps: usize,
    pub reaction: Option<ReactionTimeResult>,
    pub diffusive: Option<DiffusiveDiagnostics>,
    pub boundary_warning: bool,
    pub max_boundary_mass: f64,
    /// Largest change of `||rho1|| - ||rho2||` over the samples.
    pub mass_difference_drift: f64,
    pub min_density: f64,
    /// Scenario-specific diagnostics.
    pub extra: Vec<(String, f64)>,
}

impl RunSummary {
    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }
}

/// A finished simulation held in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ScenarioConfig,
    pub observer: Observer,
    /// The no-reaction companion of a `pair_no_reaction` run.
    pub companion: Option<Observer>,
    pub initial: SystemState,
    pub summary: RunSummary,
}

fn observer_spec(config: &ScenarioConfig) -> ObserverSpec {
    ObserverSpec::every(config.sample_interval())
        .with_probes(config.observer.probes.clone())
        .with_radii(config.observer.radii.clone())
        .with_snapshots(config.observer.snapshot_times.clone())
}

fn horizon(config: &ScenarioConfig) -> Horizon {
    if config.stop_at_quarter {
        Horizon::quarter_mass_or(config.t_end)
    } else {
        Horizon::until(config.t_end)
    }
}

fn potential(config: &ScenarioConfig, grid: &Grid) -> Result<PotentialSpec> {
    let p = &config.params;
    match config.potential {
        PotentialKind::Weakest => PotentialSpec::weakest(p.gamma()),
        PotentialKind::Zero => Ok(PotentialSpec::Zero),
        PotentialKind::Field => PotentialSpec::from_field(p.chi, build_rho2_initial(grid, p.sigma)),
    }
}

/// Initial data of the dual scenario: a smooth even plateau of height 1 on
/// `[-d, d]`.
pub fn dual_initial(grid: &Grid, half_width: f64) -> Field {
    let w = (4.0 * grid.dx()).max(1e-3);
    Field::from_fn(*grid, |x| eta_profile(x / (2.0 * half_width), w / (2.0 * half_width)))
}

/// Runs the scenario without touching the file system.
pub fn simulate(config: &ScenarioConfig) -> Result<RunOutcome> {
    config.validate()?;
    let p = config.params;
    let grid = config.grid.build(p.l)?;
    let initial = SystemState::initial(&grid, &p, config.side)?;
    let cfg = &config.scheme;
    let spec = observer_spec(config);
    let mut obs = Observer::new(spec.clone());
    let mut companion = None;
    let mut extra = Vec::new();

    let final_rho2 = match config.scenario {
        Scenario::Chemotaxis => {
            Some(evolve_chemotaxis(initial.clone(), &p, cfg, horizon(config), &mut obs)?.rho2)
        }
        Scenario::Diffusive => {
            Some(evolve_diffusive(initial.clone(), &p, cfg, horizon(config), &mut obs)?.rho2)
        }
        Scenario::GSystem => {
            Some(evolve_gsystem(initial.clone(), &p, cfg, horizon(config), &mut obs)?.rho2)
        }
        Scenario::PairNoReaction => {
            let mut master = Observer::new(spec.clone().recording_trajectory());
            let out = evolve_chemotaxis(initial.clone(), &p, cfg, horizon(config), &mut master)?;
            let trajectory = master
                .take_trajectory()
                .ok_or_else(|| Error::Config("master run kept no trajectory".into()))?;
            let mut slave = Observer::new(spec.clone());
            evolve_no_reaction(initial.clone(), &trajectory, cfg, out.t, &mut slave)?;
            let mut gap = f64::INFINITY;
            for (a, b) in master.snapshots().iter().zip(slave.snapshots()) {
                for (r1, rt) in a.rho1.values().iter().zip(b.rho1.values()) {
                    gap = gap.min(rt - r1);
                }
            }
            if gap.is_finite() {
                extra.push(("min_tilde_minus_rho1".to_string(), gap));
            }
            let m_tilde = slave.samples().iter().map(|s| s.mass1);
            let m_first = slave.samples().first().map_or(0.0, |s| s.mass1);
            let drift = m_tilde.map(|m| (m - m_first).abs()).fold(0.0, f64::max);
            extra.push(("tilde_mass_drift".to_string(), drift));
            obs = master;
            companion = Some(slave);
            Some(out.rho2)
        }
        Scenario::FokkerPlanck => {
            let spec = potential(config, &grid)?;
            evolve_fokker_planck(&initial.rho1, &spec, cfg, config.t_end, &mut obs)?;
            None
        }
        Scenario::Dual => {
            let spec = potential(config, &grid)?;
            let f0 = dual_initial(&grid, config.dual_half_width);
            let f = evolve_dual(&f0, &spec, cfg, config.t_end, &mut obs)?;
            extra.push(("dual_min".to_string(), f.min_value()));
            extra.push(("dual_max".to_string(), f.max_value()));
            if let Some(c) =
                crate::analytics::dual_spread_constant(&f, p.gamma(), config.t_end, 1e6)
            {
                extra.push(("dual_spread_constant".to_string(), c));
            }
            None
        }
    };

    let series = obs.mass_series();
    let t_final = obs.last_sample().map_or(0.0, |s| s.t);
    let reaction = if config.scenario.reacts() {
        Some(quarter_mass_time(&series)?)
    } else {
        None
    };
    let diffusive = match (config.scenario, reaction) {
        (Scenario::Diffusive, Some(r)) if r.crossed => Some(diffusive_bound_diagnostics(&r, &p)?),
        _ => None,
    };
    if let (Some(rho2_t), Some(r)) = (final_rho2.as_ref(), reaction) {
        let t_cut = if r.crossed { r.t_quarter } else { t_final };
        let mut pass_min = f64::INFINITY;
        let mut decay_min = f64::INFINITY;
        for &x in &config.observer.probes {
            pass_min = pass_min.min(pass_through_integral(&obs, x, t_cut)?);
            if initial.rho2.sample(x) > 0.0 && initial.rho2.sample(-x) > 0.0 {
                let (a, b) = decay_ratio(&initial.rho2, rho2_t, x)?;
                decay_min = decay_min.min(a.min(b));
            }
        }
        if pass_min.is_finite() {
            let scaled = pass_min * p.gamma() / p.m0;
            extra.push(("pass_through_min".to_string(), pass_min));
            extra.push(("pass_through_min_scaled".to_string(), scaled));
        }
        if decay_min.is_finite() {
            extra.push(("decay_ratio_min".to_string(), decay_min));
        }
    }
    let d0 = series.mass1.first().copied().unwrap_or(0.0) - series.mass2.first().copied().unwrap_or(0.0);
    let mass_difference_drift = series
        .mass1
        .iter()
        .zip(&series.mass2)
        .map(|(a, b)| (a - b - d0).abs())
        .fold(0.0, f64::max);
    if obs.boundary_warning() {
        warn!(
            "boundary mass {:.3e} exceeded {:.0e} M0 in a {} run",
            obs.max_boundary_mass(),
            crate::system::BOUNDARY_WARN_FRACTION,
            config.scenario.name()
        );
    }
    let summary = RunSummary {
        scenario: config.scenario,
        params: p,
        grid,
        t_final,
        steps: obs.steps(),
        reaction,
        diffusive,
        boundary_warning: obs.boundary_warning(),
        max_boundary_mass: obs.max_boundary_mass(),
        mass_difference_drift,
        min_density: obs
            .samples()
            .iter()
            .map(|s| s.min_density)
            .fold(f64::INFINITY, f64::min),
        extra,
    };
    Ok(RunOutcome {
        config: config.clone(),
        observer: obs,
        companion,
        initial,
        summary,
    })
}

fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Shortest round-trip form, switching to exponent notation far from 1.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_num)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn mass_rows(obs: &Observer) -> Vec<Vec<String>> {
    obs.samples()
        .iter()
        .map(|s| {
            vec![
                fmt_num(s.t),
                fmt_num(s.mass1),
                fmt_num(s.mass2),
                fmt_num(s.boundary_mass),
            ]
        })
        .collect()
}

fn snapshot_rows(snap: &crate::system::Snapshot) -> Vec<Vec<String>> {
    let grid = snap.rho1.grid();
    (0..grid.n_cells())
        .map(|i| {
            let v = snap
                .velocity
                .as_ref()
                .map_or(0.0, |v| 0.5 * (v.values()[i] + v.values()[i + 1]));
            let r2 = snap.rho2.as_ref().map_or(0.0, |r| r.values()[i]);
            vec![
                fmt_num(grid.center(i)),
                fmt_num(snap.rho1.values()[i]),
                fmt_num(r2),
                fmt_num(v),
            ]
        })
        .collect()
}

const REACTION_HEADER: [&str; 9] = [
    "t_quarter",
    "crossed",
    "fraction_at_end",
    "gamma",
    "case1_ratio",
    "case2_ratio",
    "eps_m0",
    "boundary_warning",
    "max_boundary_mass",
];

fn reaction_row(summary: &RunSummary, r: &ReactionTimeResult) -> Vec<String> {
    let d = summary.diffusive.as_ref();
    vec![
        fmt_num(r.t_quarter),
        r.crossed.to_string(),
        fmt_num(r.fraction_at_end),
        fmt_num(summary.params.gamma()),
        fmt_opt(d.and_then(|d| d.case1_ratio)),
        fmt_opt(d.map(|d| d.case2_ratio)),
        fmt_opt(d.map(|d| d.eps_m0)),
        summary.boundary_warning.to_string(),
        fmt_num(summary.max_boundary_mass),
    ]
}

fn write_outputs(outcome: &RunOutcome, dir: &Path, written: &mut Vec<PathBuf>) -> Result<()> {
    let mut file = |name: String| {
        let path = dir.join(name);
        written.push(path.clone());
        path
    };
    let echo = file("config.echo".into());
    fs::write(&echo, outcome.config.to_text()).map_err(|e| Error::io(&echo, e))?;

    let header = strings(&["t", "mass_rho1", "mass_rho2", "boundary_mass"]);
    write_csv(&file("mass_timeseries.csv".into()), &header, mass_rows(&outcome.observer))?;

    let snap_header = strings(&["x", "rho1", "rho2", "v"]);
    for snap in outcome.observer.snapshots() {
        write_csv(&file(format!("snapshot_{}.csv", fmt_num(snap.t))), &snap_header, snapshot_rows(snap))?;
    }
    if let Some(r) = &outcome.summary.reaction {
        write_csv(
            &file("reaction_time.csv".into()),
            &strings(&REACTION_HEADER),
            [reaction_row(&outcome.summary, r)],
        )?;
    }
    let obs = &outcome.observer;
    if !obs.spec().probes.is_empty() {
        let mut header = vec!["t".to_string()];
        for x in &obs.spec().probes {
            for col in ["rho1_pos", "rho1_neg", "rho2_pos", "rho2_neg"] {
                header.push(format!("{col}_{x}"));
            }
        }
        let rows = obs.samples().iter().map(|s| {
            let mut row = vec![fmt_num(s.t)];
            for (a, b) in s.rho1_probes.iter().zip(&s.rho2_probes) {
                row.extend([a.0, a.1, b.0, b.1].iter().map(|v| fmt_num(*v)));
            }
            row
        });
        write_csv(&file("probes.csv".into()), &header, rows)?;
    }
    if !obs.spec().radii.is_empty() {
        let mut header = vec!["t".to_string()];
        header.extend(obs.spec().radii.iter().map(|r| format!("r_{r}")));
        let rows = obs.samples().iter().map(|s| {
            let mut row = vec![fmt_num(s.t)];
            row.extend(s.concentration1.iter().map(|v| fmt_num(*v)));
            row
        });
        write_csv(&file("concentration.csv".into()), &header, rows)?;
    }
    if let Some(c) = &outcome.companion {
        write_csv(&file("mass_timeseries_tilde.csv".into()), &header, mass_rows(c))?;
        for snap in c.snapshots() {
            write_csv(
                &file(format!("snapshot_tilde_{}.csv", fmt_num(snap.t))),
                &snap_header,
                snapshot_rows(snap),
            )?;
        }
    }
    if !outcome.summary.extra.is_empty() {
        let rows = outcome
            .summary
            .extra
            .iter()
            .map(|(k, v)| vec![k.clone(), fmt_num(*v)]);
        write_csv(&file("diagnostics.csv".into()), &strings(&["name", "value"]), rows)?;
    }
    Ok(())
}

/// Runs the scenario and writes its CSV outputs into `out`. Nothing is left
/// behind when a step fails.
pub fn run(config: &ScenarioConfig, out: &Path) -> Result<RunSummary> {
    let outcome = simulate(config)?;
    let created_dir = !out.exists();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let mut written = Vec::new();
    if let Err(e) = write_outputs(&outcome, out, &mut written) {
        for path in &written {
            let _ = fs::remove_file(path);
        }
        if created_dir {
            let _ = fs::remove_dir(out);
        }
        return Err(e);
    }
    info!(
        "{} run finished at t = {} after {} steps",
        config.scenario.name(),
        outcome.summary.t_final,
        outcome.summary.steps
    );
    Ok(outcome.summary)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    L,
    Chi,
    Eps,
    M0,
    Sigma,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::L => "L",
            Axis::Chi => "chi",
            Axis::Eps => "eps",
            Axis::M0 => "M0",
            Axis::Sigma => "sigma",
        }
    }

    fn apply(self, params: &mut Params, value: f64) {
        match self {
            Axis::L => params.l = value,
            Axis::Chi => params.chi = value,
            Axis::Eps => params.eps = value,
            Axis::M0 => params.m0 = value,
            Axis::Sigma => params.sigma = value,
        }
    }

    fn get(self, params: &Params) -> f64 {
        match self {
            Axis::L => params.l,
            Axis::Chi => params.chi,
            Axis::Eps => params.eps,
            Axis::M0 => params.m0,
            Axis::Sigma => params.sigma,
        }
    }

    const ALL: [Axis; 5] = [Axis::L, Axis::Chi, Axis::Eps, Axis::M0, Axis::Sigma];
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Axis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::validation("axis", format!("unknown sweep axis `{s}`")))
    }
}

/// Parses `key=v1,v2,...`.
pub fn parse_axis(text: &str) -> Result<(Axis, Vec<f64>)> {
    let (key, values) = text
        .split_once('=')
        .ok_or_else(|| Error::validation("axis", format!("expected key=v1,v2,..., got `{text}`")))?;
    let axis: Axis = key.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation(axis.name(), format!("`{v}` is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::validation(axis.name(), "empty axis"));
    }
    Ok((axis, values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: ScenarioConfig,
    pub axes: Vec<(Axis, Vec<f64>)>,
    /// `None` uses the rayon default.
    pub workers: Option<usize>,
}

impl SweepSpec {
    /// Cartesian product in axis order, last axis fastest.
    pub fn points(&self) -> Result<Vec<ScenarioConfig>> {
        let mut seen = Vec::new();
        for (axis, _) in &self.axes {
            if seen.contains(axis) {
                return Err(Error::validation(axis.name(), "axis given twice"));
            }
            seen.push(*axis);
        }
        let mut points = vec![self.base.clone()];
        for (axis, values) in &self.axes {
            points = points
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut c = c.clone();
                        axis.apply(&mut c.params, v);
                        c
                    })
                })
                .collect();
        }
        Ok(points)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisFit {
    pub axis: Axis,
    /// The fixed values of the other axes, as `key=value` pairs.
    pub group: String,
    pub n_points: usize,
    pub fit: PowerFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(usize, String)>,
    pub fits: Vec<AxisFit>,
}

const SWEEP_HEADER: [&str; 15] = [
    "index",
    "scenario",
    "L",
    "chi",
    "eps",
    "M0",
    "sigma",
    "gamma",
    "t_quarter",
    "crossed",
    "fraction_at_end",
    "case1_ratio",
    "case2_ratio",
    "pass_through_min_scaled",
    "boundary_warning",
];

fn sweep_row(row: &SweepRow) -> Vec<String> {
    let s = &row.summary;
    let p = &s.params;
    let r = s.reaction.as_ref();
    let d = s.diffusive.as_ref();
    vec![
        row.index.to_string(),
        s.scenario.name().to_string(),
        fmt_num(p.l),
        fmt_num(p.chi),
        fmt_num(p.eps),
        fmt_num(p.m0),
        fmt_num(p.sigma),
        fmt_num(p.gamma()),
        fmt_opt(r.map(|r| r.t_quarter)),
        r.map_or_else(String::new, |r| r.crossed.to_string()),
        fmt_opt(r.map(|r| r.fraction_at_end)),
        fmt_opt(d.and_then(|d| d.case1_ratio)),
        fmt_opt(d.map(|d| d.case2_ratio)),
        fmt_opt(s.extra("pass_through_min_scaled")),
        s.boundary_warning.to_string(),
    ]
}

/// A flattened sweep row, as stored in `sweep.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredRow {
    pub params: Params,
    pub t_quarter: Option<f64>,
    pub crossed: bool,
}

fn fits_for(axes: &[Axis], rows: &[StoredRow]) -> Vec<AxisFit> {
    let mut fits = Vec::new();
    for &axis in axes {
        let others: Vec<Axis> = Axis::ALL.into_iter().filter(|a| *a != axis).collect();
        let key = |p: &Params| {
            others
                .iter()
                .map(|a| format!("{}={}", a.name(), a.get(p)))
                .collect::<Vec<_>>()
                .join(";")
        };
        let mut groups: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for row in rows.iter().filter(|r| r.crossed) {
            let Some(t) = row.t_quarter else { continue };
            let k = key(&row.params);
            let point = (axis.get(&row.params), t);
            match groups.iter_mut().find(|(g, _)| *g == k) {
                Some((_, pts)) => pts.push(point),
                None => groups.push((k, vec![point])),
            }
        }
        for (group, pts) in groups {
            if pts.len() < 3 {
                continue;
            }
            if let Ok(fit) = fit_power_law(&pts) {
                fits.push(AxisFit {
                    axis,
                    group,
                    n_points: pts.len(),
                    fit,
                });
            }
        }
    }
    fits
}

fn write_fits(path: &Path, fits: &[AxisFit]) -> Result<()> {
    let header = strings(&["axis", "group", "n_points", "slope", "intercept", "r_squared"]);
    let rows = fits.iter().map(|f| {
        vec![
            f.axis.name().to_string(),
            f.group.clone(),
            f.n_points.to_string(),
            fmt_num(f.fit.slope),
            fmt_num(f.fit.intercept),
            fmt_num(f.fit.r_squared),
        ]
    });
    write_csv(path, &header, rows)
}

fn stored(rows: &[SweepRow]) -> Vec<StoredRow> {
    rows.iter()
        .map(|r| StoredRow {
            params: r.summary.params,
            t_quarter: r.summary.reaction.map(|x| x.t_quarter),
            crossed: r.summary.reaction.is_some_and(|x| x.crossed),
        })
        .collect()
}

/// Runs every parameter point in memory on a pool of `spec.workers` threads.
pub fn sweep_in_memory(spec: &SweepSpec) -> Result<SweepReport> {
    let points = spec.points()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = spec.workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<RunSummary>> = pool.install(|| {
        points
            .par_iter()
            .map(|c| simulate(c).map(|o| o.summary))
            .collect()
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (index, result) in results.into_iter().enumerate() {
        match result {
            Ok(summary) => rows.push(SweepRow { index, summary }),
            Err(e) => failures.push((index, e.to_string())),
        }
    }
    let axes: Vec<Axis> = spec.axes.iter().map(|(a, _)| *a).collect();
    let fits = fits_for(&axes, &stored(&rows));
    Ok(SweepReport {
        rows,
        failures,
        fits,
    })
}

/// Runs the sweep and writes `sweep.csv`, `fits.csv` and, when any point
/// failed, `failures.csv`.
pub fn sweep(spec: &SweepSpec, out: &Path) -> Result<SweepReport> {
    let report = sweep_in_memory(spec)?;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let echo = out.join("config.echo");
    fs::write(&echo, spec.base.to_text()).map_err(|e| Error::io(&echo, e))?;
    write_csv(
        &out.join("sweep.csv"),
        &strings(&SWEEP_HEADER),
        report.rows.iter().map(sweep_row),
    )?;
    write_fits(&out.join("fits.csv"), &report.fits)?;
    let failures = out.join("failures.csv");
    if report.failures.is_empty() {
        if failures.exists() {
            fs::remove_file(&failures).map_err(|e| Error::io(&failures, e))?;
        }
    } else {
        write_csv(
            &failures,
            &strings(&["index", "error"]),
            report
                .failures
                .iter()
                .map(|(i, e)| vec![i.to_string(), e.clone()]),
        )?;
    }
    Ok(report)
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|r| r.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<Vec<Vec<String>>, _>>()?;
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{} has no `{name}` column", path.display())))
}

fn parse_cell(text: &str, path: &Path) -> Result<f64> {
    text.parse()
        .map_err(|_| Error::Config(format!("bad number `{text}` in {}", path.display())))
}

/// Loads a stored mass time series.
pub fn read_mass_series(path: &Path) -> Result<MassSeries> {
    let (header, rows) = read_table(path)?;
    let (ct, c1, c2) = (
        column(&header, "t", path)?,
        column(&header, "mass_rho1", path)?,
        column(&header, "mass_rho2", path)?,
    );
    let mut series = MassSeries::default();
    for row in rows {
        series.times.push(parse_cell(&row[ct], path)?);
        series.mass1.push(parse_cell(&row[c1], path)?);
        series.mass2.push(parse_cell(&row[c2], path)?);
    }
    Ok(series)
}

/// Loads the rows of a stored `sweep.csv`.
pub fn read_sweep(path: &Path) -> Result<Vec<StoredRow>> {
    let (header, rows) = read_table(path)?;
    let idx = |n: &str| column(&header, n, path);
    let (il, ichi, ieps, im0, isig, it, ic) = (
        idx("L")?,
        idx("chi")?,
        idx("eps")?,
        idx("M0")?,
        idx("sigma")?,
        idx("t_quarter")?,
        idx("crossed")?,
    );
    rows.iter()
        .map(|row| {
            Ok(StoredRow {
                params: Params {
                    chi: parse_cell(&row[ichi], path)?,
                    eps: parse_cell(&row[ieps], path)?,
                    sigma: parse_cell(&row[isig], path)?,
                    m0: parse_cell(&row[im0], path)?,
                    l: parse_cell(&row[il], path)?,
                },
                t_quarter: if row[it].is_empty() {
                    None
                } else {
                    Some(parse_cell(&row[it], path)?)
                },
                crossed: row[ic] == "true",
            })
        })
        .collect()
}

/// Regenerates fits (sweep directories) or the reaction-time diagnostics
/// (run directories) from stored CSVs, rewrites them, and returns a readable
/// summary.
pub fn report(dir: &Path) -> Result<String> {
    let sweep_csv = dir.join("sweep.csv");
    if sweep_csv.exists() {
        let rows = read_sweep(&sweep_csv)?;
        let axes: Vec<Axis> = Axis::ALL
            .into_iter()
            .filter(|a| {
                let mut vals: Vec<f64> = rows.iter().map(|r| a.get(&r.params)).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                vals.len() >= 3
            })
            .collect();
        let fits = fits_for(&axes, &rows);
        write_fits(&dir.join("fits.csv"), &fits)?;
        let mut text = format!("{} sweep points\n", rows.len());
        for f in &fits {
            text.push_str(&format!(
                "fit over {} [{}]: slope {:.4}, intercept {:.4}, r^2 {:.5} ({} points)\n",
                f.axis.name(),
                f.group,
                f.fit.slope,
                f.fit.intercept,
                f.fit.r_squared,
                f.n_points
            ));
        }
        return Ok(text);
    }
    let mass_csv = dir.join("mass_timeseries.csv");
    if !mass_csv.exists() {
        return Err(Error::Config(format!(
            "{} holds neither sweep.csv nor mass_timeseries.csv",
            dir.display()
        )));
    }
    let config = load_config(&dir.join("config.echo"))?;
    let series = read_mass_series(&mass_csv)?;
    let r = quarter_mass_time(&series)?;
    let mut text = format!(
        "{} run: {} samples up to t = {}\n",
        config.scenario.name(),
        series.len(),
        series.times.last().copied().unwrap_or(0.0)
    );
    if !config.scenario.reacts() {
        return Ok(text);
    }
    text.push_str(&format!(
        "quarter-mass time {} (crossed: {}, fraction at end {:.6})\n",
        r.t_quarter, r.crossed, r.fraction_at_end
    ));
    let diffusive = if config.scenario == Scenario::Diffusive && r.crossed {
        Some(diffusive_bound_diagnostics(&r, &config.params)?)
    } else {
        None
    };
    if let Some(d) = &diffusive {
        text.push_str(&format!(
            "case-1 ratio {} (in regime: {}), case-2 ratio {}\n",
            fmt_opt(d.case1_ratio),
            d.case1_in_regime(),
            d.case2_ratio
        ));
    }
    // Monitor columns are carried over from the stored file when present.
    let stored = dir.join("reaction_time.csv");
    let (warn_flag, max_bd) = match read_table(&stored) {
        Ok((h, rows)) if !rows.is_empty() => {
            let w = column(&h, "boundary_warning", &stored)?;
            let m = column(&h, "max_boundary_mass", &stored)?;
            (rows[0][w] == "true", parse_cell(&rows[0][m], &stored)?)
        }
        _ => (false, 0.0),
    };
    let summary = RunSummary {
        scenario: config.scenario,
        params: config.params,
        grid: config.grid.build(config.params.l)?,
        t_final: series.times.last().copied().unwrap_or(0.0),
        steps: 0,
        reaction: Some(r),
        diffusive,
        boundary_warning: warn_flag,
        max_boundary_mass: max_bd,
        mass_difference_drift: 0.0,
        min_density: 0.0,
        extra: Vec::new(),
    };
    write_csv(&stored, &strings(&REACTION_HEADER), [reaction_row(&summary, &r)])?;
    Ok(text)
}
