//! Replays the rho2 history of a full run for a rho1 that does not react.
//! The companion conserves mass and stays above rho1.

use chemotaxis_lab::system::{evolve_chemotaxis, evolve_no_reaction, Observer, ObserverSpec, SystemState};
use chemotaxis_lab::{Grid, Params, SchemeConfig, Side};

fn main() -> chemotaxis_lab::Result<()> {
    let p = Params::new(16.0, 1.0, 1.0, 100.0, 4.0)?;
    let g = Grid::with_spacing(p.default_half_width(), 1.0 / 64.0)?;
    let s0 = SystemState::initial(&g, &p, Side::Right)?;
    let cfg = SchemeConfig::default();
    let spec = ObserverSpec::every(0.1).with_snapshots(vec![0.5, 1.0, 1.5]);

    let mut master = Observer::new(spec.clone().recording_trajectory());
    let end = evolve_chemotaxis(s0.clone(), &p, &cfg, 1.5, &mut master)?;
    let trajectory = master.take_trajectory().expect("trajectory was requested");
    let mut slave = Observer::new(spec);
    evolve_no_reaction(s0, &trajectory, &cfg, end.t, &mut slave)?;

    for (a, b) in master.snapshots().iter().zip(slave.snapshots()) {
        let gap = b.rho1.combine(1.0, &a.rho1, -1.0).min_value();
        println!(
            "t = {}: |rho1| = {:.4}, |tilde rho1| = {:.10}, min(tilde - rho1) = {gap:.3e}",
            a.t,
            a.rho1.total_mass(),
            b.rho1.total_mass()
        );
    }
    Ok(())
}
