//! Inverse Laplacian of an indicator and the chemotactic drift it induces.

use chemotaxis_lab::nonlocal::{drift_velocity, inv_laplacian};
use chemotaxis_lab::{Field, Grid};

fn main() -> chemotaxis_lab::Result<()> {
    let g = Grid::new(4.0, 1024)?;
    let f = Field::from_fn(g, |x| if x.abs() < 0.5 { 1.0 } else { 0.0 });
    let u = inv_laplacian(&f);
    let v = drift_velocity(&f, 1.0);
    println!("{:>8} {:>12} {:>12}", "x", "u", "v");
    for x in [-2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 2.0] {
        let j = g.faces().position(|y| (y - x).abs() < 1e-12).unwrap();
        println!("{x:>8} {:>12.6} {:>12.6}", u.sample(x), v.values()[j]);
    }
    // Far from the source u is linear with slope -mass / 2.
    println!("u(3) - u(2) = {:.6}", u.sample(3.0) - u.sample(2.0));
    Ok(())
}
