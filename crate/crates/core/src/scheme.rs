//! Time-stepping kernel shared by every evolution.
//!
//! One step of the forward equation is Lie-split as explicit upwind
//! advection, then backward-Euler diffusion, then (for the reacting system)
//! the exact pointwise reaction. All substeps conserve mass (reaction aside)
//! and map nonnegative data to nonnegative data under the CFL restriction.
//! Both ends of the domain are no-flux.

use crate::error::{Error, Result};
use crate::grid::{FaceField, Field};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    /// Fraction of the advective CFL limit used per step, in `(0, 1]`.
    pub cfl_factor: f64,
    /// Upper bound on the step regardless of the drift.
    pub dt_max: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            cfl_factor: 0.4,
            dt_max: 1e-3,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 1.0) {
            return Err(Error::validation("time.cfl", "must lie in (0, 1]"));
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return Err(Error::validation("time.dt_max", "must be positive"));
        }
        Ok(())
    }
}

/// `min(dt_max, cfl * dx / max|v|)`.
pub fn suggest_dt(v: &FaceField, cfg: &SchemeConfig) -> f64 {
    let vmax = v.max_abs();
    if vmax == 0.0 {
        cfg.dt_max
    } else {
        cfg.dt_max.min(cfg.cfl_factor * v.grid().dx() / vmax)
    }
}

/// Largest step for which the upwind update keeps every diagonal
/// coefficient nonnegative: `dx / max_i (v+_{i+1} - v-_i)` over interior
/// faces. Always at least `dx / (2 max|v|)`.
pub fn positivity_limit(v: &FaceField) -> f64 {
    let vals = v.values();
    let n = vals.len() - 1;
    let face = |j: usize| if j == 0 || j == n { 0.0 } else { vals[j] };
    let worst = (0..n)
        .map(|i| face(i + 1).max(0.0) - face(i).min(0.0))
        .fold(0.0, f64::max);
    if worst == 0.0 {
        f64::INFINITY
    } else {
        v.grid().dx() / worst
    }
}

fn check_step(v: &FaceField, dt: f64) -> Result<()> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::StepSize {
            dt,
            limit: positivity_limit(v),
        });
    }
    let limit = positivity_limit(v);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize { dt, limit });
    }
    Ok(())
}

/// Conservative upwind update `rho_i -= dt/dx (F_{i+1} - F_i)` with
/// `F_j = v+_j rho_{j-1} + v-_j rho_j` and zero flux through the end faces.
pub(crate) fn advect_in_place(rho: &mut [f64], v: &[f64], dt: f64, dx: f64, flux: &mut Vec<f64>) {
    let n = rho.len();
    flux.clear();
    flux.resize(n + 1, 0.0);
    for j in 1..n {
        let vj = v[j];
        flux[j] = vj.max(0.0) * rho[j - 1] + vj.min(0.0) * rho[j];
    }
    let k = dt / dx;
    for i in 0..n {
        rho[i] -= k * (flux[i + 1] - flux[i]);
    }
}

/// Non-divergence upwind update for `f_t = v f_x`: the exact discrete
/// adjoint of [`advect_in_place`].
pub(crate) fn dual_advect_in_place(f: &mut [f64], v: &[f64], dt: f64, dx: f64, old: &mut Vec<f64>) {
    let n = f.len();
    old.clear();
    old.extend_from_slice(f);
    let k = dt / dx;
    for i in 0..n {
        let mut incr = 0.0;
        if i + 1 < n {
            incr += v[i + 1].max(0.0) * (old[i + 1] - old[i]);
        }
        if i > 0 {
            incr += v[i].min(0.0) * (old[i] - old[i - 1]);
        }
        f[i] = old[i] + k * incr;
    }
}

/// Solves `(I - dt D) u_new = u` in place, `D` the no-flux second
/// difference, by forward elimination and back substitution.
pub(crate) fn diffuse_in_place(u: &mut [f64], dt: f64, dx: f64, cprime: &mut Vec<f64>) {
    let n = u.len();
    let r = dt / (dx * dx);
    if r == 0.0 {
        return;
    }
    cprime.clear();
    cprime.resize(n, 0.0);
    // Off-diagonals are -r; the diagonal is 1 + 2r, or 1 + r in the end rows.
    let off = -r;
    let mut denom = 1.0 + r;
    cprime[0] = off / denom;
    u[0] /= denom;
    for i in 1..n {
        let diag = if i == n - 1 { 1.0 + r } else { 1.0 + 2.0 * r };
        denom = diag - off * cprime[i - 1];
        cprime[i] = off / denom;
        u[i] = (u[i] - off * u[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        u[i] -= cprime[i] * u[i + 1];
    }
}

/// Exact solution over `dt` of `a' = b' = -eps a b` for one cell.
///
/// The difference `a - b` is conserved, so the smaller density obeys a
/// logistic law with closed form
/// `p(dt) = d p / (p expm1(eps d dt) + d exp(eps d dt))`, `d = q - p >= 0`.
/// When `d` is negligible against the densities the `d -> 0` limit
/// `p / (1 + eps p dt)` with its first-order correction is used instead.
pub fn react_pair(a: f64, b: f64, eps: f64, dt: f64) -> (f64, f64) {
    if eps == 0.0 || dt == 0.0 || a == 0.0 || b == 0.0 {
        return (a, b);
    }
    let swapped = a > b;
    let (p, q) = if swapped { (b, a) } else { (a, b) };
    let d = q - p;
    let tau = eps * dt;
    let p_new = if d < 1e-8 * q {
        let base = p / (1.0 + p * tau);
        base * (1.0 - d * tau * (1.0 + 0.5 * p * tau) / (1.0 + p * tau))
    } else {
        let x = tau * d;
        let denom = p * x.exp_m1() + d * x.exp();
        if denom.is_finite() {
            d * p / denom
        } else {
            0.0
        }
    };
    let p_new = p_new.clamp(0.0, p);
    let q_new = (p_new + d).min(q);
    if swapped {
        (q_new, p_new)
    } else {
        (p_new, q_new)
    }
}

pub(crate) fn react_in_place(rho1: &mut [f64], rho2: &mut [f64], eps: f64, dt: f64) {
    for (a, b) in rho1.iter_mut().zip(rho2.iter_mut()) {
        let (na, nb) = react_pair(*a, *b, eps, dt);
        *a = na;
        *b = nb;
    }
}

/// Reusable scratch space for in-place steps.
#[derive(Debug, Default, Clone)]
pub struct Workspace {
    pub(crate) flux: Vec<f64>,
    pub(crate) cprime: Vec<f64>,
}

impl Workspace {
    /// Advection then diffusion, in place.
    pub(crate) fn transport(&mut self, rho: &mut [f64], v: &FaceField, dt: f64) -> Result<()> {
        check_step(v, dt)?;
        let dx = v.grid().dx();
        advect_in_place(rho, v.values(), dt, dx, &mut self.flux);
        diffuse_in_place(rho, dt, dx, &mut self.cprime);
        Ok(())
    }

    /// One dual step (advection along `+v`, then diffusion), in place.
    pub(crate) fn dual(&mut self, f: &mut [f64], v: &FaceField, dt: f64) -> Result<()> {
        check_step(v, dt)?;
        let dx = v.grid().dx();
        dual_advect_in_place(f, v.values(), dt, dx, &mut self.flux);
        diffuse_in_place(f, dt, dx, &mut self.cprime);
        Ok(())
    }

    pub(crate) fn diffuse(&mut self, u: &mut [f64], dt: f64, dx: f64) {
        diffuse_in_place(u, dt, dx, &mut self.cprime);
    }
}

pub fn step_advection(rho: &Field, v: &FaceField, dt: f64) -> Result<Field> {
    assert_eq!(rho.grid(), v.grid(), "field and velocity on different grids");
    check_step(v, dt)?;
    let mut out = rho.clone();
    advect_in_place(out.values_mut(), v.values(), dt, rho.grid().dx(), &mut Vec::new());
    Ok(out)
}

pub fn step_diffusion(rho: &Field, dt: f64) -> Result<Field> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::StepSize {
            dt,
            limit: f64::INFINITY,
        });
    }
    let mut out = rho.clone();
    diffuse_in_place(out.values_mut(), dt, rho.grid().dx(), &mut Vec::new());
    Ok(out)
}

pub fn step_reaction(rho1: &Field, rho2: &Field, eps: f64, dt: f64) -> (Field, Field) {
    assert_eq!(rho1.grid(), rho2.grid(), "species on different grids");
    let mut a = rho1.clone();
    let mut b = rho2.clone();
    react_in_place(a.values_mut(), b.values_mut(), eps, dt);
    (a, b)
}

/// One step of `f_t = f_xx + v f_x`: upwind first-order term, then implicit
/// diffusion.
pub fn step_dual(f: &Field, v: &FaceField, dt: f64) -> Result<Field> {
    assert_eq!(f.grid(), v.grid(), "field and velocity on different grids");
    let mut out = f.clone();
    Workspace::default().dual(out.values_mut(), v, dt)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn grid() -> Grid {
        Grid::new(4.0, 256).unwrap()
    }

    #[test]
    fn zero_velocity_is_identity() {
        let g = grid();
        let rho = Field::from_fn(g, |x| (-x * x).exp());
        let out = step_advection(&rho, &FaceField::zeros(g), 0.1).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn uniform_velocity_single_step() {
        let g = Grid::new(2.0, 64).unwrap();
        let dx = g.dx();
        let c = 1.5;
        let dt = 0.4 * dx / c;
        let rho = Field::from_fn(g, |x| if x.abs() < 0.5 { 1.0 } else { 0.0 });
        let v = FaceField::from_fn(g, |_| c);
        let out = step_advection(&rho, &v, dt).unwrap();
        let frac = c * dt / dx;
        // Leading cell gains frac, trailing cell loses frac, the rest is unchanged.
        for i in 0..g.n_cells() {
            let x = g.center(i);
            let expected = if (x - 0.5 - dx / 2.0).abs() < 1e-12 {
                frac
            } else if (x + 0.5 - dx / 2.0).abs() < 1e-12 {
                1.0 - frac
            } else {
                rho.values()[i]
            };
            assert!((out.values()[i] - expected).abs() < 1e-14, "cell {i} x {x}");
        }
        assert!((out.total_mass() - rho.total_mass()).abs() < 1e-14);
    }

    #[test]
    fn even_field_odd_velocity_stays_even() {
        let g = grid();
        let rho = Field::from_fn(g, |x| (-(x * x)).exp() * (1.0 + x.abs()));
        let v = FaceField::from_fn(g, |x| -3.0 * x.signum() * (1.0 - (-x.abs()).exp()));
        let dt = suggest_dt(&v, &SchemeConfig::default());
        let out = step_advection(&rho, &v, dt).unwrap();
        assert_eq!(out.evenness_defect(), 0.0);
    }

    #[test]
    fn cfl_violation_is_an_error() {
        let g = grid();
        let rho = Field::constant(g, 1.0);
        let v = FaceField::from_fn(g, |_| 10.0);
        let limit = positivity_limit(&v);
        assert!(step_advection(&rho, &v, 1.01 * limit).is_err());
        assert!(step_advection(&rho, &v, limit).is_ok());
    }

    #[test]
    fn diffusion_keeps_constants_and_mass() {
        let g = grid();
        let c = Field::constant(g, 2.5);
        let out = step_diffusion(&c, 0.7).unwrap();
        for v in out.values() {
            assert!((v - 2.5).abs() < 1e-13);
        }
        let rho = Field::from_fn(g, |x| (-(x - 1.0).powi(2)).exp());
        let out = step_diffusion(&rho, 0.05).unwrap();
        assert!((out.total_mass() - rho.total_mass()).abs() <= 1e-12 * rho.total_mass());
        assert!(out.is_nonnegative());
    }

    #[test]
    fn reaction_limits() {
        assert_eq!(react_pair(3.0, 2.0, 0.0, 1.0), (3.0, 2.0));
        assert_eq!(react_pair(3.0, 0.0, 5.0, 1.0), (3.0, 0.0));
        let c = 2.0;
        let (eps, dt) = (0.7, 0.3);
        let (a, b) = react_pair(c, c, eps, dt);
        let exact = c / (1.0 + eps * c * dt);
        assert!((a - exact).abs() < 1e-15 && (b - exact).abs() < 1e-15);
    }

    #[test]
    fn reaction_is_symmetric_and_conserves_difference() {
        let (a, b) = react_pair(5.0, 0.3, 1.3, 0.8);
        let (b2, a2) = react_pair(0.3, 5.0, 1.3, 0.8);
        assert_eq!((a, b), (a2, b2));
        assert!(((a - b) - 4.7).abs() < 1e-12 * 5.0);
        assert!(a <= 5.0 && b <= 0.3);
    }

    #[test]
    fn reaction_is_continuous_across_the_series_switch() {
        let (eps, dt) = (1.1, 0.4);
        let q = 2.0;
        let at = |f: f64| react_pair(q * (1.0 - f), q, eps, dt).0;
        // Secant slope from points well away from the switch at 1e-8.
        let slope = (at(2e-8) - at(0.5e-8)) / (1.5e-8 * q);
        let jump = at(0.99e-8) - at(1.01e-8);
        assert!((jump + slope * 0.02e-8 * q).abs() < 1e-14, "{jump}");
    }

    #[test]
    fn stiff_reaction_stays_bounded() {
        let (a, b) = react_pair(1e4, 1.0, 10.0, 10.0);
        assert!((0.0..1e-300).contains(&b));
        assert!((a - (1e4 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn dual_keeps_constants_and_matches_diffusion_without_drift() {
        let g = grid();
        let one = Field::constant(g, 1.0);
        let v = FaceField::from_fn(g, |x| -2.0 * x);
        let dt = suggest_dt(&v, &SchemeConfig::default());
        let out = step_dual(&one, &v, dt).unwrap();
        for val in out.values() {
            assert!((val - 1.0).abs() < 1e-14);
        }
        let f = Field::from_fn(g, |x| (-x * x).exp());
        let a = step_dual(&f, &FaceField::zeros(g), 0.01).unwrap();
        let b = step_diffusion(&f, 0.01).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dual_advection_is_adjoint_of_forward() {
        let g = Grid::new(3.0, 64).unwrap();
        let dx = g.dx();
        let v = FaceField::from_fn(g, |x| (2.0 * x).sin() * 3.0);
        let dt = 0.5 * positivity_limit(&v);
        let rho = Field::from_fn(g, |x| 1.0 + (x * 1.7).cos());
        let f = Field::from_fn(g, |x| (-x * x).exp());
        let mut a = rho.values().to_vec();
        advect_in_place(&mut a, v.values(), dt, dx, &mut Vec::new());
        let mut b = f.values().to_vec();
        dual_advect_in_place(&mut b, v.values(), dt, dx, &mut Vec::new());
        let lhs: f64 = a.iter().zip(f.values()).map(|(x, y)| x * y).sum();
        let rhs: f64 = rho.values().iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs());
    }

    #[test]
    fn suggested_steps() {
        let g = Grid::new(1.0, 512).unwrap();
        assert_eq!(g.dx(), 1.0 / 256.0);
        let cfg = SchemeConfig {
            cfl_factor: 0.4,
            dt_max: 1.0,
        };
        assert_eq!(suggest_dt(&FaceField::zeros(g), &cfg), 1.0);
        let v = FaceField::from_fn(g, |_| 16.0);
        assert!((suggest_dt(&v, &cfg) - 9.765625e-5).abs() < 1e-18);
        let v2 = v.scaled(2.0);
        assert!((suggest_dt(&v2, &cfg) - 0.5 * 9.765625e-5).abs() < 1e-18);
    }
}
