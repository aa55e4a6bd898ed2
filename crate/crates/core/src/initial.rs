//! Physical parameters and the initial-data builders.
//!
//! The target species `rho2` starts as `sigma * eta`, where `eta` is a smooth
//! even plateau squeezed between the indicators of `[-(1/2 - w), 1/2 - w]`
//! and `[-1/2, 1/2]`. The mobile species `rho1` starts as a truncated unit
//! Gaussian of total mass `M0` centred at distance `L` from the origin.

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Nominal width of the plateau shoulder.
pub const NOMINAL_SHOULDER: f64 = 1.0e-3;

/// The shoulder is widened to this many cells when the grid cannot resolve
/// the nominal width.
pub const SHOULDER_CELLS: f64 = 4.0;

/// Margin required between the far edge of the initial `rho1` bump and the
/// domain boundary.
pub const RHO1_BOUNDARY_MARGIN: f64 = 6.0;

/// Largest distance from the bump centre kept by the truncated Gaussian.
pub const RHO1_MAX_TRUNCATION: f64 = 6.0;

/// The normalized system's parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Chemotactic coupling.
    pub chi: f64,
    /// Reaction rate.
    pub eps: f64,
    /// Amplitude of the initial `rho2` plateau.
    pub sigma: f64,
    /// Initial mass of `rho1`.
    pub m0: f64,
    /// Initial separation.
    pub l: f64,
}

impl Params {
    pub fn new(chi: f64, eps: f64, sigma: f64, m0: f64, l: f64) -> Result<Self> {
        let p = Self {
            chi,
            eps,
            sigma,
            m0,
            l,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::validation(key, "must be finite"))
            }
        };
        finite("params.chi", self.chi)?;
        finite("params.eps", self.eps)?;
        finite("params.sigma", self.sigma)?;
        finite("params.M0", self.m0)?;
        finite("params.L", self.l)?;
        if self.chi < 0.0 {
            return Err(Error::validation("params.chi", "must be >= 0"));
        }
        if self.eps < 0.0 {
            return Err(Error::validation("params.eps", "must be >= 0"));
        }
        if self.sigma <= 0.0 {
            return Err(Error::validation("params.sigma", "must be > 0"));
        }
        if self.m0 <= 0.0 {
            return Err(Error::validation("params.M0", "must be > 0"));
        }
        if self.l < 1.0 {
            return Err(Error::validation("params.L", "must be >= 1"));
        }
        Ok(())
    }

    /// `gamma = sigma * chi`.
    pub fn gamma(&self) -> f64 {
        self.sigma * self.chi
    }

    pub fn regime(&self) -> RegimeFlags {
        let gamma = self.gamma();
        RegimeFlags {
            m0_eps_over_gamma: self.m0 * self.eps / gamma,
            m0_over_sigma: self.m0 / self.sigma,
            chi2_sigma_over_eps: self.chi * self.chi * self.sigma / self.eps,
            gamma,
        }
    }

    /// Default half width of the truncated domain, `2L + 8`.
    pub fn default_half_width(&self) -> f64 {
        2.0 * self.l + 8.0
    }
}

/// The dimensionless groups entering the main reaction-time estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeFlags {
    pub m0_eps_over_gamma: f64,
    pub m0_over_sigma: f64,
    pub chi2_sigma_over_eps: f64,
    pub gamma: f64,
}

impl RegimeFlags {
    /// Smallest of `M0 eps / gamma`, `gamma` and `M0 / sigma`.
    pub fn min_large_group(&self) -> f64 {
        self.m0_eps_over_gamma
            .min(self.gamma)
            .min(self.m0_over_sigma)
    }
}

/// Which side(s) of the origin the initial `rho1` mass sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    #[default]
    Right,
    Symmetric,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Side::Right),
            "symmetric" => Ok(Side::Symmetric),
            other => Err(Error::validation(
                "scenario.side",
                format!("expected `right` or `symmetric`, got `{other}`"),
            )),
        }
    }
}

/// `u^3 (10 - 15u + 6u^2)`, the C2 smoothstep on `[0, 1]`.
fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

/// Shoulder width used for `eta` on this grid, and whether it had to be
/// widened beyond the nominal value.
pub fn eta_shoulder_width(grid: &Grid) -> (f64, bool) {
    let resolved = SHOULDER_CELLS * grid.dx();
    if resolved > NOMINAL_SHOULDER {
        (resolved, true)
    } else {
        (NOMINAL_SHOULDER, false)
    }
}

/// Evaluates the plateau profile with shoulder width `w` at `x`.
pub fn eta_profile(x: f64, w: f64) -> f64 {
    let r = x.abs();
    if r >= 0.5 {
        0.0
    } else if r <= 0.5 - w {
        1.0
    } else {
        smoothstep((0.5 - r) / w)
    }
}

pub fn build_eta(grid: &Grid) -> Field {
    let (w, widened) = eta_shoulder_width(grid);
    if widened {
        warn!(
            "eta shoulder widened from {NOMINAL_SHOULDER} to {w:.3e} (dx = {:.3e})",
            grid.dx()
        );
    }
    Field::from_fn(*grid, |x| eta_profile(x, w))
}

pub fn build_rho2_initial(grid: &Grid, sigma: f64) -> Field {
    build_eta(grid).map(|v| sigma * v)
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Cell averages of a unit Gaussian centred at `center`, truncated to
/// `|x - center| <= half_support`, normalized to `mass`.
fn truncated_gaussian(grid: &Grid, center: f64, half_support: f64, mass: f64) -> Vec<f64> {
    let dx = grid.dx();
    let hw = grid.half_width();
    let lo_support = center - half_support;
    let hi_support = center + half_support;
    let mut values = vec![0.0; grid.n_cells()];
    let first = grid.cell_of(lo_support);
    let last = grid.cell_of(hi_support);
    for (i, v) in values.iter_mut().enumerate().take(last + 1).skip(first) {
        let lo = (-hw + i as f64 * dx).max(lo_support);
        let hi = (-hw + (i + 1) as f64 * dx).min(hi_support);
        if hi > lo {
            *v = (normal_cdf(hi - center) - normal_cdf(lo - center)) / dx;
        }
    }
    let discrete: f64 = values.iter().sum::<f64>() * dx;
    let scale = mass / discrete;
    values.iter_mut().for_each(|v| *v *= scale);
    values
}

/// Initial `rho1`: a unit-variance Gaussian bump of mass `m0` at `x = L`
/// (or two bumps of mass `m0 / 2` at `x = +-L`), truncated so that no mass
/// lies in `[-L/2, L/2]`. Cell values are exact cell averages.
pub fn build_rho1_initial(grid: &Grid, m0: f64, l: f64, side: Side) -> Result<Field> {
    if !(m0 > 0.0 && m0.is_finite()) {
        return Err(Error::validation("params.M0", "must be positive"));
    }
    if !(l >= 1.0 && l.is_finite()) {
        return Err(Error::validation("params.L", "must be >= 1"));
    }
    if grid.half_width() < l + RHO1_BOUNDARY_MARGIN {
        return Err(Error::Config(format!(
            "L = {l} is too close to the boundary: half_width {} < L + {RHO1_BOUNDARY_MARGIN}",
            grid.half_width()
        )));
    }
    let half_support = (0.5 * l).min(RHO1_MAX_TRUNCATION);
    let values = match side {
        Side::Right => truncated_gaussian(grid, l, half_support, m0),
        Side::Symmetric => {
            let mut right = truncated_gaussian(grid, l, half_support, 0.5 * m0);
            let n = right.len();
            for i in 0..n / 2 {
                right[i] = right[n - 1 - i];
            }
            right
        }
    };
    Field::from_values(*grid, values)
}
