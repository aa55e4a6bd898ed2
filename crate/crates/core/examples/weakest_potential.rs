//! The weakest potential against the drift of attractants that keep three
//! quarters of the plateau mass.

use chemotaxis_lab::nonlocal::drift_velocity;
use chemotaxis_lab::{build_rho2_initial, weakest_h, weakest_h_prime, Field, Grid};

fn main() -> chemotaxis_lab::Result<()> {
    let gamma = 16.0;
    let g = Grid::with_spacing(2.0, 1.0 / 256.0)?;
    let plateau = build_rho2_initial(&g, 1.0);
    let cut_left = Field::from_values(
        g,
        g.centers().zip(plateau.values()).map(|(x, v)| if x >= -0.25 { *v } else { 0.0 }).collect(),
    )?;
    let full = drift_velocity(&plateau, gamma);
    let cut = drift_velocity(&cut_left, gamma);
    println!("{:>7} {:>10} {:>10} {:>12} {:>12}", "x", "H", "H'", "v(plateau)", "v(cut)");
    for (j, x) in g.faces().enumerate().step_by(32) {
        println!(
            "{x:>7.3} {:>10.4} {:>10.4} {:>12.4} {:>12.4}",
            weakest_h(gamma, x),
            weakest_h_prime(gamma, x),
            full.values()[j],
            cut.values()[j]
        );
    }
    Ok(())
}
