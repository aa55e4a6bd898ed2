//! One run of the full system, stopped once a quarter of rho2 has reacted.

use chemotaxis_lab::analytics::quarter_mass_time;
use chemotaxis_lab::system::{evolve_chemotaxis, Horizon, Observer, ObserverSpec, SystemState};
use chemotaxis_lab::{Grid, Params, SchemeConfig, Side};

fn main() -> chemotaxis_lab::Result<()> {
    let p = Params::new(32.0, 1.0, 1.0, 1e3, 8.0)?;
    let g = Grid::with_spacing(p.default_half_width(), 1.0 / 128.0)?;
    let s0 = SystemState::initial(&g, &p, Side::Right)?;
    let mut obs = Observer::new(ObserverSpec::every(ObserverSpec::default_interval(&p)));
    let end = evolve_chemotaxis(s0, &p, &SchemeConfig::default(), Horizon::quarter_mass_or(50.0), &mut obs)?;
    for s in obs.samples().iter().step_by(5) {
        println!("t = {:>8.4}  |rho1| = {:>10.4}  |rho2| = {:.6}", s.t, s.mass1, s.mass2);
    }
    let r = quarter_mass_time(&obs.mass_series())?;
    println!(
        "T_C = {:.5} (gamma T_C / L = {:.3}), stopped at t = {:.5} after {} steps",
        r.t_quarter,
        r.t_quarter * p.gamma() / p.l,
        end.t,
        obs.steps()
    );
    Ok(())
}
