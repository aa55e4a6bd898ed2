//! Scenario-level evolutions built on the step kernel.
//!
//! Every evolution advances with the largest admissible step, clipped so
//! that sample and snapshot times are hit exactly. The [`Observer`] records
//! what the analytics need; it never touches the evolving state.

use crate::error::{Error, Result};
use crate::grid::{concentration, integrate, FaceField, Field, Grid};
use crate::initial::{build_rho1_initial, build_rho2_initial, Params, Side};
use crate::nonlocal::drift_velocity;
use crate::potentials::{potential_gradient_faces, PotentialSpec};
use crate::scheme::{react_in_place, suggest_dt, SchemeConfig, Workspace};

/// Width of the strip at each end of the domain watched by the boundary
/// monitor.
pub const BOUNDARY_STRIP: f64 = 1.0;

/// Boundary mass above this fraction of the initial `rho1` mass raises the
/// warning flag.
pub const BOUNDARY_WARN_FRACTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub t: f64,
    pub rho1: Field,
    pub rho2: Field,
}

impl SystemState {
    pub fn new(t: f64, rho1: Field, rho2: Field) -> Result<Self> {
        if rho1.grid() != rho2.grid() {
            return Err(Error::Config("species live on different grids".into()));
        }
        if !rho1.is_nonnegative() || !rho2.is_nonnegative() {
            return Err(Error::Domain("densities must be nonnegative".into()));
        }
        Ok(Self { t, rho1, rho2 })
    }

    /// Initial data `rho1 = truncated Gaussian at L`, `rho2 = sigma eta`.
    pub fn initial(grid: &Grid, params: &Params, side: Side) -> Result<Self> {
        params.validate()?;
        let rho1 = build_rho1_initial(grid, params.m0, params.l, side)?;
        let rho2 = build_rho2_initial(grid, params.sigma);
        Self::new(0.0, rho1, rho2)
    }

    pub fn grid(&self) -> &Grid {
        self.rho1.grid()
    }

    /// `||rho1|| - ||rho2||`, conserved by the reaction.
    pub fn mass_difference(&self) -> f64 {
        self.rho1.total_mass() - self.rho2.total_mass()
    }
}

/// When an evolution stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub t_end: f64,
    /// Stop early once `||rho2||` falls below this fraction of its initial
    /// value.
    pub stop_below_mass2_fraction: Option<f64>,
}

impl Horizon {
    pub fn until(t_end: f64) -> Self {
        Self {
            t_end,
            stop_below_mass2_fraction: None,
        }
    }

    /// Runs until a quarter of `rho2` has reacted, or `t_end`.
    pub fn quarter_mass_or(t_end: f64) -> Self {
        Self {
            t_end,
            stop_below_mass2_fraction: Some(0.75),
        }
    }
}

impl From<f64> for Horizon {
    fn from(t_end: f64) -> Self {
        Horizon::until(t_end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverSpec {
    pub sample_interval: f64,
    /// Radii at which `int_{-r}^{r} rho1` is recorded.
    pub radii: Vec<f64>,
    /// Nonnegative locations `x`; `rho1` and `rho2` are recorded at `+x` and `-x`.
    pub probes: Vec<f64>,
    pub snapshot_times: Vec<f64>,
    /// Keep the `rho2` trajectory so a no-reaction companion can replay it.
    pub record_trajectory: bool,
}

impl ObserverSpec {
    pub fn every(sample_interval: f64) -> Self {
        Self {
            sample_interval,
            radii: Vec::new(),
            probes: Vec::new(),
            snapshot_times: Vec::new(),
            record_trajectory: false,
        }
    }

    pub fn with_radii(mut self, radii: Vec<f64>) -> Self {
        self.radii = radii;
        self
    }

    pub fn with_probes(mut self, probes: Vec<f64>) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn recording_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    /// `min(0.01 L / gamma, 0.1)`, or 0.1 without chemotaxis.
    pub fn default_interval(params: &Params) -> f64 {
        let gamma = params.gamma();
        if gamma > 0.0 {
            (0.01 * params.l / gamma).min(0.1)
        } else {
            0.1
        }
    }

    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return Err(Error::validation(
                "observer.sample_interval",
                "must be positive",
            ));
        }
        for &r in &self.radii {
            if !(r >= 0.0 && grid.contains(r)) {
                return Err(Error::validation(
                    "observer.radii",
                    format!("radius {r} outside [0, {}]", grid.half_width()),
                ));
            }
        }
        for &x in &self.probes {
            if !(x >= 0.0 && grid.contains(x)) {
                return Err(Error::validation(
                    "observer.probes",
                    format!("probe {x} outside [0, {}]", grid.half_width()),
                ));
            }
        }
        Ok(())
    }
}

/// One observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub mass1: f64,
    pub mass2: f64,
    pub boundary_mass: f64,
    /// `int_{-r}^{r} rho1` for every observer radius.
    pub concentration1: Vec<f64>,
    /// `rho1(+x)` and `rho1(-x)` for every probe.
    pub rho1_probes: Vec<(f64, f64)>,
    pub rho2_probes: Vec<(f64, f64)>,
    /// Smallest density value of either species.
    pub min_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub rho1: Field,
    pub rho2: Option<Field>,
    pub velocity: Option<FaceField>,
}

/// The attractant trajectory of a reacting run, stored on the (fixed)
/// support of the initial `rho2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rho2Trajectory {
    grid: Grid,
    t0: f64,
    chi: f64,
    first: usize,
    dts: Vec<f64>,
    /// `states[k]` is `rho2` at the start of step `k`; one extra entry holds
    /// the state after the last step.
    states: Vec<Vec<f64>>,
}

impl Rho2Trajectory {
    fn new(rho2: &Field, t0: f64, chi: f64) -> Self {
        let v = rho2.values();
        let first = v.iter().position(|&x| x > 0.0).unwrap_or(0);
        Self {
            grid: *rho2.grid(),
            t0,
            chi,
            first,
            dts: Vec::new(),
            states: Vec::new(),
        }
    }

    fn segment(&self, rho2: &Field) -> Vec<f64> {
        let v = rho2.values();
        let end = v
            .iter()
            .rposition(|&x| x > 0.0)
            .map_or(self.first, |i| i + 1)
            .max(self.first);
        v[self.first..end].to_vec()
    }

    fn push(&mut self, dt: f64, rho2: &Field) {
        // The state is already stored when the previous step closed it.
        if self.states.len() == self.dts.len() {
            self.states.push(self.segment(rho2));
        }
        self.dts.push(dt);
    }

    fn close(&mut self, rho2: &Field) {
        if self.states.len() == self.dts.len() {
            self.states.push(self.segment(rho2));
        }
    }

    /// Number of recorded steps.
    pub fn len(&self) -> usize {
        self.dts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dts.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_final(&self) -> f64 {
        self.t0 + self.dts.iter().sum::<f64>()
    }

    fn field_at(&self, k: usize) -> Field {
        let mut values = vec![0.0; self.grid.n_cells()];
        let seg = &self.states[k];
        values[self.first..self.first + seg.len()].copy_from_slice(seg);
        Field::from_values_unchecked(self.grid, values)
    }
}

#[derive(Debug, Clone)]
pub struct Observer {
    spec: ObserverSpec,
    samples: Vec<Sample>,
    snapshots: Vec<Snapshot>,
    /// Running `int rho1(+x) dt`, `int rho1(-x) dt` per probe (per-step trapezoid).
    probe_integrals: Vec<(f64, f64)>,
    last_probe_values: Vec<(f64, f64)>,
    last_t: f64,
    trajectory: Option<Rho2Trajectory>,
    t0: f64,
    next_sample: usize,
    next_snapshot: usize,
    initial_mass1: f64,
    boundary_warning: bool,
    steps: usize,
}

struct View<'a> {
    rho1: &'a Field,
    rho2: Option<&'a Field>,
    velocity: Option<&'a FaceField>,
}

impl Observer {
    pub fn new(mut spec: ObserverSpec) -> Self {
        spec.snapshot_times
            .sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
        let n = spec.probes.len();
        Self {
            spec,
            samples: Vec::new(),
            snapshots: Vec::new(),
            probe_integrals: vec![(0.0, 0.0); n],
            last_probe_values: vec![(0.0, 0.0); n],
            last_t: 0.0,
            trajectory: None,
            t0: 0.0,
            next_sample: 0,
            next_snapshot: 0,
            initial_mass1: 0.0,
            boundary_warning: false,
            steps: 0,
        }
    }

    pub fn spec(&self) -> &ObserverSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn probe_integrals(&self) -> &[(f64, f64)] {
        &self.probe_integrals
    }

    pub fn trajectory(&self) -> Option<&Rho2Trajectory> {
        self.trajectory.as_ref()
    }

    pub fn take_trajectory(&mut self) -> Option<Rho2Trajectory> {
        self.trajectory.take()
    }

    pub fn boundary_warning(&self) -> bool {
        self.boundary_warning
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn last_sample(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn mass_series(&self) -> crate::analytics::MassSeries {
        crate::analytics::MassSeries {
            times: self.samples.iter().map(|s| s.t).collect(),
            mass1: self.samples.iter().map(|s| s.mass1).collect(),
            mass2: self.samples.iter().map(|s| s.mass2).collect(),
        }
    }

    /// Largest boundary-strip mass seen over all samples.
    pub fn max_boundary_mass(&self) -> f64 {
        self.samples.iter().map(|s| s.boundary_mass).fold(0.0, f64::max)
    }

    fn begin(&mut self, t0: f64, view: View<'_>, chi: Option<f64>) -> Result<()> {
        self.spec.validate(view.rho1.grid())?;
        self.samples.clear();
        self.snapshots.clear();
        self.t0 = t0;
        self.last_t = t0;
        self.next_sample = 0;
        self.next_snapshot = self
            .spec
            .snapshot_times
            .iter()
            .position(|&s| s >= t0)
            .unwrap_or(self.spec.snapshot_times.len());
        self.steps = 0;
        self.initial_mass1 = view.rho1.total_mass();
        self.boundary_warning = false;
        self.probe_integrals.iter_mut().for_each(|p| *p = (0.0, 0.0));
        self.last_probe_values = self.probe_values(view.rho1);
        self.trajectory = match (self.spec.record_trajectory, view.rho2, chi) {
            (true, Some(rho2), Some(chi)) => Some(Rho2Trajectory::new(rho2, t0, chi)),
            _ => None,
        };
        self.observe(t0, &view, true)
    }

    fn probe_values(&self, field: &Field) -> Vec<(f64, f64)> {
        self.spec
            .probes
            .iter()
            .map(|&x| (field.sample(x), field.sample(-x)))
            .collect()
    }

    fn next_sample_time(&self) -> f64 {
        self.t0 + self.next_sample as f64 * self.spec.sample_interval
    }

    /// Next time the evolution must land on exactly.
    fn next_event(&self) -> f64 {
        let snap = self
            .spec
            .snapshot_times
            .get(self.next_snapshot)
            .copied()
            .unwrap_or(f64::INFINITY);
        self.next_sample_time().min(snap)
    }

    fn after_step(&mut self, t: f64, view: &View<'_>) {
        self.steps += 1;
        let now = self.probe_values(view.rho1);
        let dt = t - self.last_t;
        for ((acc, prev), cur) in self
            .probe_integrals
            .iter_mut()
            .zip(&self.last_probe_values)
            .zip(&now)
        {
            acc.0 += 0.5 * dt * (prev.0 + cur.0);
            acc.1 += 0.5 * dt * (prev.1 + cur.1);
        }
        self.last_probe_values = now;
        self.last_t = t;
    }

    fn time_tolerance(&self) -> f64 {
        1e-9 * self.spec.sample_interval
    }

    fn observe(&mut self, t: f64, view: &View<'_>, force: bool) -> Result<()> {
        let tol = self.time_tolerance();
        let due_sample = t + tol >= self.next_sample_time();
        if due_sample || force {
            self.record_sample(t, view)?;
            while self.next_sample_time() <= t + tol {
                self.next_sample += 1;
            }
        }
        while let Some(&ts) = self.spec.snapshot_times.get(self.next_snapshot) {
            if t + tol < ts {
                break;
            }
            self.snapshots.push(Snapshot {
                t,
                rho1: view.rho1.clone(),
                rho2: view.rho2.cloned(),
                velocity: view.velocity.cloned(),
            });
            self.next_snapshot += 1;
        }
        Ok(())
    }

    fn record_sample(&mut self, t: f64, view: &View<'_>) -> Result<()> {
        if self.samples.last().is_some_and(|s| s.t == t) {
            return Ok(());
        }
        let rho1 = view.rho1;
        let grid = rho1.grid();
        let hw = grid.half_width();
        let strip = BOUNDARY_STRIP.min(hw);
        let boundary_mass =
            integrate(rho1, -hw, -hw + strip)? + integrate(rho1, hw - strip, hw)?;
        if boundary_mass > BOUNDARY_WARN_FRACTION * self.initial_mass1 {
            self.boundary_warning = true;
        }
        let concentration1 = self
            .spec
            .radii
            .iter()
            .map(|&r| concentration(rho1, r.min(hw)))
            .collect::<Result<Vec<_>>>()?;
        let rho2_probes = match view.rho2 {
            Some(f) => self.probe_values(f),
            None => vec![(0.0, 0.0); self.spec.probes.len()],
        };
        let mut min_density = rho1.min_value();
        if let Some(r2) = view.rho2 {
            min_density = min_density.min(r2.min_value());
        }
        self.samples.push(Sample {
            t,
            mass1: rho1.total_mass(),
            mass2: view.rho2.map_or(0.0, Field::total_mass),
            boundary_mass,
            concentration1,
            rho1_probes: self.probe_values(rho1),
            rho2_probes,
            min_density,
        });
        Ok(())
    }
}

/// Step size for this iteration: the proposal, clipped to land on the next
/// observer event or the horizon.
fn clip_dt(t: f64, proposal: f64, horizon: f64, obs: &Observer) -> (f64, f64) {
    let target = obs.next_event().min(horizon);
    let remaining = target - t;
    // Snap onto the event whenever the observer would count the step as
    // having reached it, so events are recorded at their exact times.
    if t + proposal + obs.time_tolerance() >= target {
        (remaining, target)
    } else {
        (proposal, t + proposal)
    }
}

fn check_horizon(t0: f64, t_end: f64) -> Result<()> {
    if !(t_end.is_finite() && t_end >= t0) {
        return Err(Error::Config(format!(
            "end time {t_end} precedes start time {t0}"
        )));
    }
    Ok(())
}

/// The full system: `rho1` advected by `chi d/dx (-Delta)^{-1} rho2`,
/// diffused, and reacting with `rho2`.
pub fn evolve_chemotaxis(
    state: SystemState,
    params: &Params,
    cfg: &SchemeConfig,
    horizon: impl Into<Horizon>,
    obs: &mut Observer,
) -> Result<SystemState> {
    let horizon = horizon.into();
    params.validate()?;
    cfg.validate()?;
    check_horizon(state.t, horizon.t_end)?;
    let SystemState {
        mut t,
        mut rho1,
        mut rho2,
    } = state;
    let chi = params.chi;
    let eps = params.eps;
    let mut v = drift_velocity(&rho2, chi);
    obs.begin(
        t,
        View {
            rho1: &rho1,
            rho2: Some(&rho2),
            velocity: Some(&v),
        },
        Some(chi),
    )?;
    let initial_mass2 = rho2.total_mass();
    let stop_mass = horizon
        .stop_below_mass2_fraction
        .map(|f| f * initial_mass2);
    let mut ws = Workspace::default();

    while t < horizon.t_end {
        let (dt, t_next) = clip_dt(t, suggest_dt(&v, cfg), horizon.t_end, obs);
        if let Some(traj) = obs.trajectory.as_mut() {
            traj.push(dt, &rho2);
        }
        ws.transport(rho1.values_mut(), &v, dt)?;
        react_in_place(rho1.values_mut(), rho2.values_mut(), eps, dt);
        if let Some(traj) = obs.trajectory.as_mut() {
            traj.close(&rho2);
        }
        t = t_next;
        if chi != 0.0 {
            v = drift_velocity(&rho2, chi);
        }
        let view = View {
            rho1: &rho1,
            rho2: Some(&rho2),
            velocity: Some(&v),
        };
        obs.after_step(t, &view);
        let stop = stop_mass.is_some_and(|m| rho2.total_mass() < m);
        obs.observe(t, &view, stop || t >= horizon.t_end)?;
        if stop {
            break;
        }
    }
    Ok(SystemState { t, rho1, rho2 })
}

/// The purely diffusive system (`chi = 0`).
pub fn evolve_diffusive(
    state: SystemState,
    params: &Params,
    cfg: &SchemeConfig,
    horizon: impl Into<Horizon>,
    obs: &mut Observer,
) -> Result<SystemState> {
    let params = Params { chi: 0.0, ..*params };
    evolve_chemotaxis(state, &params, cfg, horizon, obs)
}

/// `rho1` without the reaction term, driven by the attractant trajectory
/// recorded from a reacting run that started from the same state.
pub fn evolve_no_reaction(
    state: SystemState,
    trajectory: &Rho2Trajectory,
    cfg: &SchemeConfig,
    t_end: f64,
    obs: &mut Observer,
) -> Result<SystemState> {
    cfg.validate()?;
    if state.grid() != &trajectory.grid {
        return Err(Error::Config("trajectory recorded on a different grid".into()));
    }
    let tol = 1e-9 * obs.spec.sample_interval.max(1e-300);
    if (state.t - trajectory.t0).abs() > tol {
        return Err(Error::Config(format!(
            "trajectory starts at t = {} but the state is at t = {}",
            trajectory.t0, state.t
        )));
    }
    check_horizon(state.t, t_end)?;
    let SystemState {
        mut t,
        mut rho1,
        rho2,
    } = state;
    let chi = trajectory.chi;
    let mut rho2_now = rho2;
    let mut v = drift_velocity(&rho2_now, chi);
    obs.begin(
        t,
        View {
            rho1: &rho1,
            rho2: Some(&rho2_now),
            velocity: Some(&v),
        },
        None,
    )?;
    let mut ws = Workspace::default();
    let mut k = 0;
    while t < t_end - tol {
        if k >= trajectory.len() {
            return Err(Error::Config(format!(
                "trajectory ends at t = {} before the requested t_end = {t_end}",
                trajectory.t_final()
            )));
        }
        let dt = trajectory.dts[k];
        v = drift_velocity(&rho2_now, chi);
        ws.transport(rho1.values_mut(), &v, dt)?;
        t += dt;
        k += 1;
        rho2_now = trajectory.field_at(k);
        let view = View {
            rho1: &rho1,
            rho2: Some(&rho2_now),
            velocity: Some(&v),
        };
        obs.after_step(t, &view);
        obs.observe(t, &view, t >= t_end - tol)?;
    }
    Ok(SystemState {
        t,
        rho1,
        rho2: rho2_now,
    })
}

/// The comparison system: `g1` follows the heat equation and `g2` decays
/// pointwise at rate `eps g1`.
pub fn evolve_gsystem(
    state: SystemState,
    params: &Params,
    cfg: &SchemeConfig,
    horizon: impl Into<Horizon>,
    obs: &mut Observer,
) -> Result<SystemState> {
    let horizon = horizon.into();
    params.validate()?;
    cfg.validate()?;
    check_horizon(state.t, horizon.t_end)?;
    let SystemState {
        mut t,
        rho1: mut g1,
        rho2: mut g2,
    } = state;
    let eps = params.eps;
    let dx = g1.grid().dx();
    obs.begin(
        t,
        View {
            rho1: &g1,
            rho2: Some(&g2),
            velocity: None,
        },
        None,
    )?;
    let stop_mass = horizon
        .stop_below_mass2_fraction
        .map(|f| f * g2.total_mass());
    let mut ws = Workspace::default();
    while t < horizon.t_end {
        let (dt, t_next) = clip_dt(t, cfg.dt_max, horizon.t_end, obs);
        ws.diffuse(g1.values_mut(), dt, dx);
        for (a, b) in g1.values().iter().zip(g2.values_mut()) {
            *b *= (-eps * a * dt).exp();
        }
        t = t_next;
        let view = View {
            rho1: &g1,
            rho2: Some(&g2),
            velocity: None,
        };
        obs.after_step(t, &view);
        let stop = stop_mass.is_some_and(|m| g2.total_mass() < m);
        obs.observe(t, &view, stop || t >= horizon.t_end)?;
        if stop {
            break;
        }
    }
    Ok(SystemState {
        t,
        rho1: g1,
        rho2: g2,
    })
}

/// `rho_t - rho_xx + (rho H')_x = 0` in a fixed potential.
pub fn evolve_fokker_planck(
    rho0: &Field,
    spec: &PotentialSpec,
    cfg: &SchemeConfig,
    t_end: f64,
    obs: &mut Observer,
) -> Result<Field> {
    let t0 = 0.0;
    cfg.validate()?;
    check_horizon(t0, t_end)?;
    let v = potential_gradient_faces(spec, rho0.grid());
    let proposal = suggest_dt(&v, cfg);
    let mut rho = rho0.clone();
    obs.begin(
        t0,
        View {
            rho1: &rho,
            rho2: None,
            velocity: Some(&v),
        },
        None,
    )?;
    let mut ws = Workspace::default();
    let mut t = t0;
    while t < t_end {
        let (dt, t_next) = clip_dt(t, proposal, t_end, obs);
        ws.transport(rho.values_mut(), &v, dt)?;
        t = t_next;
        let view = View {
            rho1: &rho,
            rho2: None,
            velocity: Some(&v),
        };
        obs.after_step(t, &view);
        obs.observe(t, &view, t >= t_end)?;
    }
    Ok(rho)
}

/// The dual flow `f_t = f_xx + H' f_x`.
pub fn evolve_dual(
    f0: &Field,
    spec: &PotentialSpec,
    cfg: &SchemeConfig,
    t_end: f64,
    obs: &mut Observer,
) -> Result<Field> {
    let t0 = 0.0;
    cfg.validate()?;
    check_horizon(t0, t_end)?;
    let v = potential_gradient_faces(spec, f0.grid());
    let proposal = suggest_dt(&v, cfg);
    let mut f = f0.clone();
    obs.begin(
        t0,
        View {
            rho1: &f,
            rho2: None,
            velocity: Some(&v),
        },
        None,
    )?;
    let mut ws = Workspace::default();
    let mut t = t0;
    while t < t_end {
        let (dt, t_next) = clip_dt(t, proposal, t_end, obs);
        ws.dual(f.values_mut(), &v, dt)?;
        t = t_next;
        let view = View {
            rho1: &f,
            rho2: None,
            velocity: Some(&v),
        };
        obs.after_step(t, &view);
        obs.observe(t, &view, t >= t_end)?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn small() -> (Grid, Params) {
        let params = Params::new(8.0, 1.0, 1.0, 50.0, 2.0).unwrap();
        (Grid::new(12.0, 1536).unwrap(), params)
    }

    #[test]
    fn no_chemotaxis_no_reaction_is_heat_flow() {
        let (g, p) = small();
        let p = Params { chi: 0.0, eps: 0.0, ..p };
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let mut obs = Observer::new(ObserverSpec::every(0.05));
        let cfg = SchemeConfig::default();
        let out = evolve_chemotaxis(s0.clone(), &p, &cfg, 0.2, &mut obs).unwrap();
        assert!(out.rho2 == s0.rho2);

        let mut heat = s0.rho1.clone();
        let mut ws = Workspace::default();
        let mut t = 0.0;
        while t < 0.2 - 1e-12 {
            let dt = cfg.dt_max.min(0.2 - t);
            ws.diffuse(heat.values_mut(), dt, g.dx());
            t += dt;
        }
        let diff = out.rho1.combine(1.0, &heat, -1.0).max_abs();
        assert!(diff < 1e-9 * heat.max_abs(), "{diff}");
    }

    #[test]
    fn masses_and_mass_difference() {
        let (g, p) = small();
        let cfg = SchemeConfig::default();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let d0 = s0.mass_difference();

        let mut obs = Observer::new(ObserverSpec::every(0.05));
        let p0 = Params { eps: 0.0, ..p };
        let out = evolve_chemotaxis(s0.clone(), &p0, &cfg, 0.3, &mut obs).unwrap();
        assert!((out.rho1.total_mass() - s0.rho1.total_mass()).abs() < 1e-10 * p.m0);
        assert_eq!(out.rho2.total_mass(), s0.rho2.total_mass());

        let mut obs = Observer::new(ObserverSpec::every(0.05));
        let out = evolve_chemotaxis(s0, &p, &cfg, 0.3, &mut obs).unwrap();
        assert!(out.rho2.total_mass() < 0.999 * p.sigma);
        for s in obs.samples() {
            assert!((s.mass1 - s.mass2 - d0).abs() <= 1e-8 * p.m0);
            assert!(s.min_density >= 0.0);
        }
        let m2: Vec<f64> = obs.samples().iter().map(|s| s.mass2).collect();
        assert!(m2.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn observer_hits_sample_times_exactly() {
        let (g, p) = small();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let mut obs = Observer::new(ObserverSpec::every(0.025).with_snapshots(vec![0.1, 0.05]));
        evolve_chemotaxis(s0, &p, &SchemeConfig::default(), 0.1, &mut obs).unwrap();
        let times: Vec<f64> = obs.samples().iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 5);
        for (k, t) in times.iter().enumerate() {
            assert!((t - 0.025 * k as f64).abs() < 1e-12, "{times:?}");
        }
        let snaps: Vec<f64> = obs.snapshots().iter().map(|s| s.t).collect();
        assert_eq!(snaps.len(), 2);
        assert!((snaps[0] - 0.05).abs() < 1e-12 && (snaps[1] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn quarter_mass_stop() {
        let (g, p) = small();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let m20 = s0.rho2.total_mass();
        let mut obs = Observer::new(ObserverSpec::every(0.01));
        let out = evolve_chemotaxis(
            s0,
            &p,
            &SchemeConfig::default(),
            Horizon::quarter_mass_or(10.0),
            &mut obs,
        )
        .unwrap();
        assert!(out.t < 10.0);
        assert!(out.rho2.total_mass() < 0.75 * m20);
        assert_eq!(obs.last_sample().unwrap().t, out.t);
    }

    #[test]
    fn no_reaction_companion_dominates_pointwise() {
        let (g, p) = small();
        let cfg = SchemeConfig::default();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let spec = ObserverSpec::every(0.05)
            .with_snapshots(vec![0.1, 0.2, 0.3])
            .recording_trajectory();
        let mut master = Observer::new(spec.clone());
        let out = evolve_chemotaxis(s0.clone(), &p, &cfg, 0.3, &mut master).unwrap();
        let traj = master.take_trajectory().unwrap();
        assert!((traj.t_final() - 0.3).abs() < 1e-12);

        let mut slave = Observer::new(spec);
        let tilde = evolve_no_reaction(s0.clone(), &traj, &cfg, 0.3, &mut slave).unwrap();
        for (a, b) in master.snapshots().iter().zip(slave.snapshots()) {
            assert!((a.t - b.t).abs() < 1e-12);
            for (r1, rt) in a.rho1.values().iter().zip(b.rho1.values()) {
                assert!(rt >= r1);
            }
        }
        assert!((tilde.rho1.total_mass() - p.m0).abs() < 1e-10 * p.m0);
        assert!(tilde.rho2 == out.rho2);
    }

    #[test]
    fn no_reaction_companion_equals_master_without_reaction() {
        let (g, p) = small();
        let p = Params { eps: 0.0, ..p };
        let cfg = SchemeConfig::default();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let spec = ObserverSpec::every(0.05).recording_trajectory();
        let mut master = Observer::new(spec.clone());
        let out = evolve_chemotaxis(s0.clone(), &p, &cfg, 0.2, &mut master).unwrap();
        let traj = master.take_trajectory().unwrap();
        let tilde =
            evolve_no_reaction(s0, &traj, &cfg, 0.2, &mut Observer::new(spec)).unwrap();
        assert!(tilde.rho1 == out.rho1);
    }

    #[test]
    fn misaligned_trajectory_is_rejected() {
        let (g, p) = small();
        let cfg = SchemeConfig::default();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let spec = ObserverSpec::every(0.05).recording_trajectory();
        let mut master = Observer::new(spec.clone());
        evolve_chemotaxis(s0.clone(), &p, &cfg, 0.1, &mut master).unwrap();
        let traj = master.take_trajectory().unwrap();

        let other = Grid::new(12.0, 1024).unwrap();
        let s_other = SystemState::initial(&other, &p, Side::Right).unwrap();
        let mut obs = Observer::new(spec.clone());
        assert!(evolve_no_reaction(s_other, &traj, &cfg, 0.1, &mut obs).is_err());

        let mut shifted = s0.clone();
        shifted.t = 0.5;
        assert!(evolve_no_reaction(shifted, &traj, &cfg, 0.6, &mut obs).is_err());
        assert!(evolve_no_reaction(s0, &traj, &cfg, 0.2, &mut obs).is_err());
    }

    #[test]
    fn gsystem_brackets_diffusive_run() {
        let (g, p) = small();
        let p = Params { chi: 0.0, ..p };
        let cfg = SchemeConfig::default();
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let snaps = vec![0.5, 1.0, 1.5];
        let mut obs_d = Observer::new(ObserverSpec::every(0.1).with_snapshots(snaps.clone()));
        evolve_diffusive(s0.clone(), &p, &cfg, 1.5, &mut obs_d).unwrap();
        let mut obs_g = Observer::new(ObserverSpec::every(0.1).with_snapshots(snaps));
        evolve_gsystem(s0, &p, &cfg, 1.5, &mut obs_g).unwrap();
        for (d, gs) in obs_d.snapshots().iter().zip(obs_g.snapshots()) {
            let r2 = d.rho2.as_ref().unwrap();
            let g2 = gs.rho2.as_ref().unwrap();
            for i in 0..g.n_cells() {
                assert!(gs.rho1.values()[i] >= d.rho1.values()[i]);
                assert!(g2.values()[i] <= r2.values()[i]);
            }
        }
    }

    #[test]
    fn gsystem_without_reaction_keeps_g2() {
        let (g, p) = small();
        let p = Params { eps: 0.0, ..p };
        let s0 = SystemState::initial(&g, &p, Side::Right).unwrap();
        let mut obs = Observer::new(ObserverSpec::every(0.1));
        let out = evolve_gsystem(s0.clone(), &p, &SchemeConfig::default(), 0.5, &mut obs).unwrap();
        assert!(out.rho2 == s0.rho2);
    }

    #[test]
    fn fokker_planck_zero_potential_is_heat_flow_and_keeps_evenness() {
        let g = Grid::new(8.0, 512).unwrap();
        let rho0 = Field::from_fn(g, |x| (-(x * x)).exp());
        let cfg = SchemeConfig::default();
        let mut obs = Observer::new(ObserverSpec::every(0.1));
        let out = evolve_fokker_planck(&rho0, &PotentialSpec::Zero, &cfg, 0.3, &mut obs)
            .unwrap();
        let mut heat = rho0.clone();
        let mut ws = Workspace::default();
        for _ in 0..300 {
            ws.diffuse(heat.values_mut(), 1e-3, g.dx());
        }
        assert!(out.combine(1.0, &heat, -1.0).max_abs() < 1e-12);

        let weak = PotentialSpec::weakest(16.0).unwrap();
        let out = evolve_fokker_planck(&rho0, &weak, &cfg, 0.3, &mut obs).unwrap();
        assert!(out.evenness_defect() < 1e-13 * out.max_abs());
        assert!((out.total_mass() - rho0.total_mass()).abs() < 1e-12 * rho0.total_mass());
    }

    #[test]
    fn dual_keeps_ones_and_unit_range() {
        let g = Grid::new(8.0, 512).unwrap();
        let spec = PotentialSpec::weakest(16.0).unwrap();
        let cfg = SchemeConfig::default();
        let mut obs = Observer::new(ObserverSpec::every(0.1));
        let one = Field::constant(g, 1.0);
        let out = evolve_dual(&one, &spec, &cfg, 0.5, &mut obs).unwrap();
        assert!(out.values().iter().all(|v| (v - 1.0).abs() < 1e-13));

        let bump = Field::from_fn(g, |x| if x.abs() < 0.2 { 1.0 } else { 0.0 });
        let out = evolve_dual(&bump, &spec, &cfg, 0.5, &mut obs).unwrap();
        assert!(out.min_value() >= 0.0 && out.max_value() <= 1.0 + 1e-14);
        assert!(out.evenness_defect() < 1e-13);
    }
}
