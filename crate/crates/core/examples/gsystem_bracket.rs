//! The heat/decay system sandwiches a diffusive run: g1 >= rho1 and
//! g2 <= rho2 everywhere.

use chemotaxis_lab::system::{evolve_diffusive, evolve_gsystem, Observer, ObserverSpec, SystemState};
use chemotaxis_lab::{Grid, Params, SchemeConfig, Side};

fn main() -> chemotaxis_lab::Result<()> {
    let p = Params::new(0.0, 1.0, 1.0, 100.0, 4.0)?;
    let g = Grid::with_spacing(p.default_half_width(), 1.0 / 64.0)?;
    let s0 = SystemState::initial(&g, &p, Side::Right)?;
    let spec = ObserverSpec::every(0.5).with_snapshots(vec![1.0, 2.0, 4.0]);
    let cfg = SchemeConfig::default();
    let mut od = Observer::new(spec.clone());
    evolve_diffusive(s0.clone(), &p, &cfg, 4.0, &mut od)?;
    let mut og = Observer::new(spec);
    evolve_gsystem(s0, &p, &cfg, 4.0, &mut og)?;
    for (d, gs) in od.snapshots().iter().zip(og.snapshots()) {
        let gap1 = gs.rho1.combine(1.0, &d.rho1, -1.0).min_value();
        let (r2, g2) = (d.rho2.as_ref().unwrap(), gs.rho2.as_ref().unwrap());
        let gap2 = r2.combine(1.0, g2, -1.0).min_value();
        println!(
            "t = {}: min(g1 - rho1) = {gap1:.3e}, min(rho2 - g2) = {gap2:.3e}, |rho2| = {:.5}, |g2| = {:.5}",
            d.t,
            r2.total_mass(),
            g2.total_mass()
        );
    }
    Ok(())
}
