//! A small L sweep of the full system on a thread pool, with the fitted
//! power law of T_C against L.

use chemotaxis_lab::config::{Scenario, ScenarioConfig};
use chemotaxis_lab::harness::{sweep_in_memory, Axis, SweepSpec};
use chemotaxis_lab::Params;

fn main() -> chemotaxis_lab::Result<()> {
    let mut base = ScenarioConfig::new(Scenario::Chemotaxis, Params::new(32.0, 1.0, 1.0, 1e3, 4.0)?, 100.0);
    base.stop_at_quarter = true;
    let spec = SweepSpec {
        base,
        axes: vec![(Axis::L, vec![4.0, 6.0, 8.0])],
        workers: Some(3),
    };
    let report = sweep_in_memory(&spec)?;
    for row in &report.rows {
        let r = row.summary.reaction.unwrap();
        println!("L = {}: T_C = {:.5}", row.summary.params.l, r.t_quarter);
    }
    for f in &report.fits {
        println!("T_C ~ L^{:.3} (r^2 {:.4})", f.fit.slope, f.fit.r_squared);
    }
    Ok(())
}
