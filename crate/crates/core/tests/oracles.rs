//! Solver output against closed forms that share no code with it.

use chemotaxis_lab::oracle::{adaptive_simpson, gaussian, gaussian_cell_averages, reaction_reference};
use chemotaxis_lab::potentials::potential_values;
use chemotaxis_lab::system::{evolve_dual, evolve_fokker_planck, Observer, ObserverSpec};
use chemotaxis_lab::{weakest_h, Field, Grid, PotentialSpec, SchemeConfig};

fn l1(a: &Field, b: &[f64]) -> f64 {
    a.values().iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * a.grid().dx()
}

fn heat_error(n: usize, t: f64, cfg: &SchemeConfig) -> f64 {
    let g = Grid::new(16.0, n).unwrap();
    let rho0 = Field::from_values(g, gaussian_cell_averages(&g, 0.5, 1.0)).unwrap();
    let mut obs = Observer::new(ObserverSpec::every(t));
    let out = evolve_fokker_planck(&rho0, &PotentialSpec::Zero, cfg, t, &mut obs).unwrap();
    l1(&out, &gaussian_cell_averages(&g, 0.5, 1.0 + 2.0 * t))
}

#[test]
fn heat_kernel_error_is_first_order_in_time() {
    let coarse = SchemeConfig { dt_max: 4e-3, ..SchemeConfig::default() };
    let fine = SchemeConfig { dt_max: 2e-3, ..SchemeConfig::default() };
    let e1 = heat_error(2048, 1.0, &coarse);
    let e2 = heat_error(2048, 1.0, &fine);
    assert!(e2 < 1e-3, "{e2}");
    assert!((e1 / e2 - 2.0).abs() < 0.2, "{e1} {e2}");
}

#[test]
fn heat_kernel_converges_in_space() {
    let cfg = SchemeConfig { dt_max: 2.5e-4, ..SchemeConfig::default() };
    let e = [256, 512, 1024].map(|n| heat_error(n, 0.5, &cfg));
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    assert!(e[2] < 1e-4, "{e:?}");
}

#[test]
fn erf_cell_averages_match_quadrature() {
    let g = Grid::new(5.0, 40).unwrap();
    let avg = gaussian_cell_averages(&g, 0.7, 0.6);
    for (i, a) in avg.iter().enumerate() {
        let q = adaptive_simpson(&|x| gaussian(x, 0.7, 0.6), g.face(i), g.face(i + 1), 1e-14) / g.dx();
        assert!((a - q).abs() < 1e-12, "cell {i}: {a} vs {q}");
    }
}

/// The Fokker-Planck flow relaxes to `exp(H) / Z`.
#[test]
fn weakest_flow_relaxes_to_exp_h() {
    let gamma = 6.0;
    let spec = PotentialSpec::weakest(gamma).unwrap();
    let mut errors = Vec::new();
    for n in [512, 1024] {
        let g = Grid::new(8.0, n).unwrap();
        let rho0 = Field::from_values(g, gaussian_cell_averages(&g, 2.0, 1.0)).unwrap();
        let mut obs = Observer::new(ObserverSpec::every(5.0));
        let out = evolve_fokker_planck(&rho0, &spec, &SchemeConfig::default(), 30.0, &mut obs).unwrap();
        let weight = |x: f64| weakest_h(gamma, x).exp();
        let z = adaptive_simpson(&weight, -8.0, 8.0, 1e-13);
        let exact: Vec<f64> = g.centers().map(|x| weight(x) / z).collect();
        errors.push(l1(&out, &exact));
    }
    assert!(errors[1] < 2e-2, "{errors:?}");
    assert!(errors[0] / errors[1] > 1.6, "{errors:?}");
}

/// Constants are stationary for the dual flow, and `exp(H)` is stationary
/// for the forward flow up to discretisation error.
#[test]
fn stationary_states() {
    let g = Grid::new(6.0, 1536).unwrap();
    let spec = PotentialSpec::weakest(4.0).unwrap();
    let ones = Field::constant(g, 1.0);
    let mut obs = Observer::new(ObserverSpec::every(1.0));
    let f = evolve_dual(&ones, &spec, &SchemeConfig::default(), 1.0, &mut obs).unwrap();
    let dev = f.values().iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-10, "{dev}");

    let h = potential_values(&spec, &g);
    let w = h.map(f64::exp);
    let w = w.map(|v| v / w.total_mass());
    let mut obs = Observer::new(ObserverSpec::every(1.0));
    let out = evolve_fokker_planck(&w, &spec, &SchemeConfig::default(), 1.0, &mut obs).unwrap();
    assert!(l1(&out, w.values()) < 1e-2);
}

#[test]
fn reaction_reference_matches_logistic_closed_form() {
    // With d = b - a > 0: a(t) = d a / (b exp(eps d t) - a).
    for &(a, b, eps, dt) in &[(1.0, 2.0, 1.0, 0.3), (0.2, 4.0, 3.0, 0.5), (3.0, 3.5, 0.1, 2.0)] {
        let d: f64 = b - a;
        let exact = d * a / (b * (eps * d * dt).exp() - a);
        let (x, y) = reaction_reference(a, b, eps, dt);
        assert!(((x - exact) / exact).abs() < 1e-11, "{x} {exact}");
        assert!((y - x - d).abs() < 1e-11);
    }
}
