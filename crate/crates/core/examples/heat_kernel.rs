//! Pure diffusion of a unit Gaussian compared with the exact heat kernel.

use chemotaxis_lab::oracle::gaussian_cell_averages;
use chemotaxis_lab::system::{evolve_fokker_planck, Observer, ObserverSpec};
use chemotaxis_lab::{Field, Grid, PotentialSpec, SchemeConfig};

fn main() -> chemotaxis_lab::Result<()> {
    for n in [1024, 2048, 4096, 8192] {
        let g = Grid::new(20.0, n)?;
        let rho0 = Field::from_values(g, gaussian_cell_averages(&g, 0.0, 1.0))?;
        let mut obs = Observer::new(ObserverSpec::every(0.25));
        let out = evolve_fokker_planck(&rho0, &PotentialSpec::Zero, &SchemeConfig::default(), 1.0, &mut obs)?;
        let exact = gaussian_cell_averages(&g, 0.0, 3.0);
        let l1: f64 = out.values().iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum::<f64>() * g.dx();
        println!("N = {n:>5}: L1 error {l1:.3e}, mass {:.15}", out.total_mass());
    }
    Ok(())
}
