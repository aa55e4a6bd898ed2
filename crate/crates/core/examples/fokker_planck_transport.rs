//! Time for the weakest-potential flow to bring a fifth of the mass into
//! the inner annulus, for several separations.

use chemotaxis_lab::analytics::{crossing_time, fit_power_law, ANNULUS_INNER};
use chemotaxis_lab::system::{evolve_fokker_planck, Observer, ObserverSpec, SystemState};
use chemotaxis_lab::{Grid, Params, PotentialSpec, SchemeConfig, Side};

fn main() -> chemotaxis_lab::Result<()> {
    let gamma = 32.0;
    let mut points = Vec::new();
    for l in [4.0, 8.0, 16.0] {
        let p = Params::new(gamma, 1.0, 1.0, 1e3, l)?;
        let g = Grid::with_spacing(p.default_half_width(), 1.0 / 128.0)?;
        let s0 = SystemState::initial(&g, &p, Side::Right)?;
        let mut obs = Observer::new(ObserverSpec::every(0.01 * l / gamma).with_radii(vec![ANNULUS_INNER]));
        evolve_fokker_planck(&s0.rho1, &PotentialSpec::weakest(gamma)?, &SchemeConfig::default(), 6.0 * l / gamma, &mut obs)?;
        let t: Vec<f64> = obs.samples().iter().map(|s| s.t).collect();
        let c: Vec<f64> = obs.samples().iter().map(|s| s.concentration1[0]).collect();
        if let Some(tc) = crossing_time(&t, &c, 0.2 * p.m0, true) {
            println!("L = {l:>4}: t = {tc:.4}, gamma t / L = {:.3}", gamma * tc / l);
            points.push((l, tc));
        }
    }
    let fit = fit_power_law(&points)?;
    println!("slope {:.3} (r^2 {:.4})", fit.slope, fit.r_squared);
    Ok(())
}
