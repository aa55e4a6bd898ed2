//! Time-integrated rho1 at probes inside rho2's support, and how much of
//! rho2 is left there at the quarter-mass time.

use chemotaxis_lab::analytics::annulus_probes;
use chemotaxis_lab::config::{Scenario, ScenarioConfig};
use chemotaxis_lab::harness::simulate;
use chemotaxis_lab::Params;

fn main() -> chemotaxis_lab::Result<()> {
    let mut c = ScenarioConfig::new(Scenario::Chemotaxis, Params::new(32.0, 1.0, 1.0, 1e3, 8.0)?, 100.0);
    c.stop_at_quarter = true;
    c.observer.probes = annulus_probes(9);
    let out = simulate(&c)?;
    let t_c = out.summary.reaction.map(|r| r.t_quarter).unwrap_or(f64::NAN);
    println!("T_C = {t_c:.5}");
    for (x, (pos, neg)) in c.observer.probes.iter().zip(out.observer.probe_integrals()) {
        println!("x = {x:.3}: int rho1(+x) = {pos:.4}, int rho1(-x) = {neg:.4}");
    }
    for (k, v) in &out.summary.extra {
        println!("{k} = {v:.5}");
    }
    Ok(())
}
