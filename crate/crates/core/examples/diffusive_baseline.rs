//! Without chemotaxis the quarter-mass time grows like L^2 / log(M0 eps L).

use chemotaxis_lab::analytics::{diffusive_bound_diagnostics, quarter_mass_time};
use chemotaxis_lab::system::{evolve_diffusive, Horizon, Observer, ObserverSpec, SystemState};
use chemotaxis_lab::{Grid, Params, SchemeConfig, Side};

fn main() -> chemotaxis_lab::Result<()> {
    for l in [4.0, 8.0] {
        let p = Params::new(0.0, 1.0, 1.0, 1e3, l)?;
        let g = Grid::with_spacing(3.0 * l + 16.0, 1.0 / 64.0)?;
        let s0 = SystemState::initial(&g, &p, Side::Right)?;
        let mut obs = Observer::new(ObserverSpec::every(0.1));
        evolve_diffusive(s0, &p, &SchemeConfig::default(), Horizon::quarter_mass_or(1e3), &mut obs)?;
        let r = quarter_mass_time(&obs.mass_series())?;
        let d = diffusive_bound_diagnostics(&r, &p)?;
        println!(
            "L = {l}: T_D = {:.3}, case-1 ratio {:?}, case-2 ratio {:.3e}",
            r.t_quarter, d.case1_ratio, d.case2_ratio
        );
    }
    Ok(())
}
