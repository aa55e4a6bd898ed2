//! The dual flow spreads a unit plateau outward at speed about gamma.

use chemotaxis_lab::analytics::dual_spread_constant;
use chemotaxis_lab::harness::dual_initial;
use chemotaxis_lab::system::{evolve_dual, Observer, ObserverSpec};
use chemotaxis_lab::{Grid, PotentialSpec, SchemeConfig};

fn main() -> chemotaxis_lab::Result<()> {
    let gamma = 16.0;
    let g = Grid::with_spacing(48.0, 1.0 / 64.0)?;
    let f0 = dual_initial(&g, 0.5);
    let spec = PotentialSpec::weakest(gamma)?;
    for t in [0.25, 0.5, 1.0, 2.0] {
        let mut obs = Observer::new(ObserverSpec::every(t));
        let f = evolve_dual(&f0, &spec, &SchemeConfig::default(), t, &mut obs)?;
        let c = dual_spread_constant(&f, gamma, t, 1e6);
        println!(
            "t = {t:>4}: f(0) = {:.4}, f(gamma t / 2) = {:.4}, spread constant {:?}",
            f.sample(0.0),
            f.sample(0.5 * gamma * t),
            c
        );
    }
    Ok(())
}
