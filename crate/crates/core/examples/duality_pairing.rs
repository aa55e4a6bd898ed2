use chemotaxis_lab::analytics::duality_defect;
use chemotaxis_lab::oracle::gaussian_cell_averages;
use chemotaxis_lab::{Field, Grid, PotentialSpec, SchemeConfig};

fn main() -> chemotaxis_lab::Result<()> {
    let spec = PotentialSpec::weakest(8.0)?;
    for n in [1024, 2048, 4096] {
        let g = Grid::new(8.0, n)?;
        let rho0 = Field::from_values(g, gaussian_cell_averages(&g, 1.5, 1.0))?;
        let f0 = Field::from_fn(g, |x| (1.0 - (x / 2.0).powi(2)).max(0.0).powi(3));
        let d = duality_defect(&rho0, &f0, &spec, 1.0, 8, &SchemeConfig::default())?;
        println!("N = {n:>5}: pairing defect {d:.3e}");
    }
    Ok(())
}
