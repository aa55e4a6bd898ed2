//! Post-processing of run records: reaction times, duality defects,
//! pass-through integrals, decay ratios and power-law fits.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::initial::Params;
use crate::potentials::PotentialSpec;
use crate::scheme::SchemeConfig;
use crate::system::{evolve_dual, evolve_fokker_planck, Observer, ObserverSpec};

/// Fraction of the initial `rho2` mass left when "a quarter has reacted".
pub const QUARTER_REMAINING: f64 = 0.75;

/// Left edge of the pass-through annulus.
pub const ANNULUS_INNER: f64 = 6.0 / 25.0;
/// Right edge of the pass-through annulus (edge of the `rho2` support).
pub const ANNULUS_OUTER: f64 = 0.5;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MassSeries {
    pub times: Vec<f64>,
    pub mass1: Vec<f64>,
    pub mass2: Vec<f64>,
}

impl MassSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Domain("empty mass series".into()));
        }
        if self.mass1.len() != self.len() || self.mass2.len() != self.len() {
            return Err(Error::Domain("mass series columns differ in length".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("mass series times not strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionTimeResult {
    /// Interpolated crossing time, or the last sampled time when no crossing
    /// occurred.
    pub t_quarter: f64,
    /// `mass2(end) / mass2(0)`.
    pub fraction_at_end: f64,
    pub crossed: bool,
}

/// First time `values` reaches `threshold` from below (`rising`) or above,
/// by linear interpolation between samples. `None` if it never does.
pub fn crossing_time(times: &[f64], values: &[f64], threshold: f64, rising: bool) -> Option<f64> {
    let hit = |v: f64| if rising { v >= threshold } else { v <= threshold };
    let first = values.iter().position(|&v| hit(v))?;
    if first == 0 {
        return Some(times[0]);
    }
    let (t0, t1) = (times[first - 1], times[first]);
    let (v0, v1) = (values[first - 1], values[first]);
    if v1 == threshold {
        return Some(t1);
    }
    Some(t0 + (threshold - v0) / (v1 - v0) * (t1 - t0))
}

/// First time `mass2` falls to 75% of its initial value.
pub fn quarter_mass_time(series: &MassSeries) -> Result<ReactionTimeResult> {
    series.validate()?;
    let m0 = series.mass2[0];
    let last = series.len() - 1;
    let fraction_at_end = if m0 > 0.0 {
        series.mass2[last] / m0
    } else {
        1.0
    };
    let crossing = if m0 > 0.0 {
        crossing_time(&series.times, &series.mass2, QUARTER_REMAINING * m0, false)
    } else {
        None
    };
    Ok(match crossing {
        Some(t) => ReactionTimeResult {
            t_quarter: t,
            fraction_at_end,
            crossed: true,
        },
        None => ReactionTimeResult {
            t_quarter: series.times[last],
            fraction_at_end,
            crossed: false,
        },
    })
}

/// Evolves `rho0` forward and `f0` by the dual flow, and returns the largest
/// relative deviation of `int rho(s) f(t - s)` over `s = k t / n` from its
/// `s = 0` value.
pub fn duality_defect(
    rho0: &Field,
    f0: &Field,
    spec: &PotentialSpec,
    t: f64,
    n_samples: usize,
    cfg: &SchemeConfig,
) -> Result<f64> {
    if rho0.grid() != f0.grid() {
        return Err(Error::Config("rho0 and f0 live on different grids".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("pairing time {t} must be >= 0")));
    }
    if t == 0.0 || n_samples == 0 {
        return Ok(0.0);
    }
    let n = n_samples;
    let times: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
    let spec_obs = ObserverSpec::every(t).with_snapshots(times[1..].to_vec());

    let mut fwd = Observer::new(spec_obs.clone());
    evolve_fokker_planck(rho0, spec, cfg, t, &mut fwd)?;
    let mut dual = Observer::new(spec_obs);
    evolve_dual(f0, spec, cfg, t, &mut dual)?;

    // rho at s_k, f at t - s_k = s_{n-k}.
    let rho_at = |k: usize| if k == 0 { rho0 } else { &fwd.snapshots()[k - 1].rho1 };
    let f_at = |k: usize| if k == 0 { f0 } else { &dual.snapshots()[k - 1].rho1 };
    if fwd.snapshots().len() != n || dual.snapshots().len() != n {
        return Err(Error::Config("missing duality snapshots".into()));
    }
    let pairings: Vec<f64> = (0..=n).map(|k| rho_at(k).dot(f_at(n - k))).collect();
    let reference = pairings[0];
    if reference == 0.0 {
        return Err(Error::UndefinedRatio("pairing vanishes at s = 0".into()));
    }
    Ok(pairings
        .iter()
        .map(|p| ((p - reference) / reference).abs())
        .fold(0.0, f64::max))
}

/// Trapezoid rule over `(times, values)` on `[times[0], t_max]`, with the
/// last interval cut by linear interpolation.
pub fn trapezoid(times: &[f64], values: &[f64], t_max: f64) -> f64 {
    let mut acc = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t0 >= t_max {
            break;
        }
        let (v0, mut v1) = (values[k - 1], values[k]);
        let mut hi = t1;
        if t1 > t_max {
            v1 = v0 + (v1 - v0) * (t_max - t0) / (t1 - t0);
            hi = t_max;
        }
        acc += 0.5 * (hi - t0) * (v0 + v1);
    }
    acc
}

/// `int_0^T rho1(x, t) + rho1(-x, t) dt` from the observer's probe samples.
pub fn pass_through_integral(obs: &Observer, x: f64, t_max: f64) -> Result<f64> {
    let k = probe_index(obs, x)?;
    let samples = obs.samples();
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let values: Vec<f64> = samples
        .iter()
        .map(|s| s.rho1_probes[k].0 + s.rho1_probes[k].1)
        .collect();
    Ok(trapezoid(&times, &values, t_max))
}

fn probe_index(obs: &Observer, x: f64) -> Result<usize> {
    obs.spec()
        .probes
        .iter()
        .position(|&p| (p - x).abs() <= 1e-12 * x.abs().max(1.0))
        .ok_or_else(|| Error::Config(format!("no probe recorded at x = {x}")))
}

/// `n` equally spaced points strictly inside the pass-through annulus.
pub fn annulus_probes(n: usize) -> Vec<f64> {
    let h = (ANNULUS_OUTER - ANNULUS_INNER) / (n + 1) as f64;
    (1..=n).map(|k| ANNULUS_INNER + k as f64 * h).collect()
}

/// `(rho2(x, T) / rho2(x, 0), rho2(-x, T) / rho2(-x, 0))`.
pub fn decay_ratio(rho2_0: &Field, rho2_t: &Field, x: f64) -> Result<(f64, f64)> {
    if rho2_0.grid() != rho2_t.grid() {
        return Err(Error::Config("rho2 snapshots on different grids".into()));
    }
    let ratio = |x: f64| {
        let a = rho2_0.sample(x);
        if a <= 0.0 {
            return Err(Error::UndefinedRatio(format!("rho2(x = {x}, 0) = {a}")));
        }
        // Interpolation can round a hair above 1 for an untouched cell.
        Ok((rho2_t.sample(x) / a).clamp(0.0, 1.0))
    };
    Ok((ratio(x)?, ratio(-x)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl PowerFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Least squares on `(ln x, ln y)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerFit> {
    if points.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::Domain(format!("nonpositive point ({x}, {y})")));
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all x coordinates coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let ss_res: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        1.0 - ss_res / syy
    };
    Ok(PowerFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusiveDiagnostics {
    pub t_quarter: f64,
    /// `T_D log(M0 eps L) / L^2`; `None` when `M0 eps L <= 1`.
    pub case1_ratio: Option<f64>,
    /// `T_D (eps M0)^2`.
    pub case2_ratio: f64,
    pub eps_m0: f64,
    /// `eps M0 > 1`.
    pub large_reaction: bool,
}

impl DiffusiveDiagnostics {
    pub fn case1_in_regime(&self) -> bool {
        self.large_reaction && self.case1_ratio.is_some()
    }
}

pub fn diffusive_bound_diagnostics(
    result: &ReactionTimeResult,
    params: &Params,
) -> Result<DiffusiveDiagnostics> {
    if !result.crossed {
        return Err(Error::Domain(
            "diffusive diagnostics need a quarter-mass crossing".into(),
        ));
    }
    let t = result.t_quarter;
    let eps_m0 = params.eps * params.m0;
    let arg = eps_m0 * params.l;
    let case1_ratio = (arg > 1.0).then(|| t * arg.ln() / (params.l * params.l));
    Ok(DiffusiveDiagnostics {
        t_quarter: t,
        case1_ratio,
        case2_ratio: t * eps_m0 * eps_m0,
        eps_m0,
        large_reaction: eps_m0 > 1.0,
    })
}

/// Smallest `C >= 1` with `f >= 1/C` on `|x| <= (1 + gamma t) / C`, found by
/// bisection (the condition is monotone in `C`). `None` if no `C` up to
/// `c_max` works.
pub fn dual_spread_constant(f: &Field, gamma: f64, t: f64, c_max: f64) -> Option<f64> {
    let reach = 1.0 + gamma * t;
    let holds = |c: f64| {
        let r = reach / c;
        f.grid()
            .centers()
            .zip(f.values())
            .filter(|(x, _)| x.abs() <= r)
            .all(|(_, &v)| v >= 1.0 / c)
    };
    if !holds(c_max) {
        return None;
    }
    if holds(1.0) {
        return Some(1.0);
    }
    let (mut lo, mut hi) = (1.0_f64, c_max);
    while hi / lo > 1.0 + 1e-6 {
        let mid = (lo * hi).sqrt();
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Largest amount by which `other` out-concentrates `dominant` over the
/// observers' common samples with `t <= t_max`: `max (c_other - c_dominant)`
/// over all radii.
pub fn max_concentration_excess(dominant: &Observer, other: &Observer, t_max: f64) -> Result<f64> {
    if dominant.spec().radii != other.spec().radii {
        return Err(Error::Config("observers use different radii".into()));
    }
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in dominant.samples().iter().zip(other.samples()) {
        if (a.t - b.t).abs() > 1e-9 * a.t.abs().max(1.0) {
            return Err(Error::Config(format!(
                "observers sampled at different times ({} vs {})",
                a.t, b.t
            )));
        }
        if a.t > t_max + 1e-12 {
            break;
        }
        for (ca, cb) in a.concentration1.iter().zip(&b.concentration1) {
            worst = worst.max(cb - ca);
        }
    }
    Ok(worst)
}
