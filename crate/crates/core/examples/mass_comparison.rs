//! Concentration functionals of two Fokker-Planck flows whose drifts are
//! ordered: the flow with the stronger inward pull stays more concentrated.

use chemotaxis_lab::analytics::max_concentration_excess;
use chemotaxis_lab::oracle::gaussian_cell_averages;
use chemotaxis_lab::system::{evolve_fokker_planck, Observer, ObserverSpec};
use chemotaxis_lab::{Field, Grid, PotentialSpec, SchemeConfig};

fn main() -> chemotaxis_lab::Result<()> {
    let g = Grid::with_spacing(24.0, 1.0 / 64.0)?;
    let radii: Vec<f64> = (1..=48).map(|k| 0.5 * k as f64).collect();
    let spec = ObserverSpec::every(0.1).with_radii(radii);
    let narrow = Field::from_values(g, gaussian_cell_averages(&g, 0.0, 0.25))?;
    let wide = Field::from_values(g, gaussian_cell_averages(&g, 0.0, 1.0))?;
    let weakest = PotentialSpec::weakest(16.0)?;
    let cfg = SchemeConfig::default();

    let run = |u: &Field, h: &PotentialSpec| -> chemotaxis_lab::Result<Observer> {
        let mut obs = Observer::new(spec.clone());
        evolve_fokker_planck(u, h, &cfg, 4.0, &mut obs)?;
        Ok(obs)
    };
    let strong = run(&narrow, &weakest)?;
    let free = run(&wide, &PotentialSpec::Zero)?;
    println!("weakest(narrow) vs heat(wide): excess {:.3e}", max_concentration_excess(&strong, &free, 4.0)?);
    let free_narrow = run(&narrow, &PotentialSpec::Zero)?;
    let strong_wide = run(&wide, &weakest)?;
    println!("heat(narrow) vs weakest(wide): excess {:.3e}", max_concentration_excess(&free_narrow, &strong_wide, 4.0)?);
    Ok(())
}
