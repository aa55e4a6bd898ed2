//! Drift potentials for the Fokker-Planck comparison flows.
//!
//! The "weakest" potential is the piecewise quadratic/linear profile
//!
//! ```text
//!   H(x) = -gamma x / 3                       x >= 1/2
//!   H(x) = -gamma (3 - 4x + 12x^2) / 24       0 <= x <= 1/2
//! ```
//!
//! extended evenly to `x < 0`. Its gradient coincides with that of
//! `gamma (-Delta)^{-1}` applied to the indicator of `[-1/6, 1/2]` on the
//! positive half line. The values differ from that potential by a constant
//! (`gamma / 18` for `x >= 1/2`); only the gradient enters any evolution.

use crate::error::{Error, Result};
use crate::grid::{FaceField, Field, Grid};
use crate::nonlocal::drift_velocity;

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    WeakestAnalytic { gamma: f64 },
    FromField { chi: f64, rho2: Field },
    Zero,
}

impl PotentialSpec {
    pub fn weakest(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::validation("gamma", "must be finite and >= 0"));
        }
        Ok(PotentialSpec::WeakestAnalytic { gamma })
    }

    pub fn from_field(chi: f64, rho2: Field) -> Result<Self> {
        if !(chi >= 0.0 && chi.is_finite()) {
            return Err(Error::validation("chi", "must be finite and >= 0"));
        }
        if !rho2.is_nonnegative() {
            return Err(Error::Domain("attractant density must be nonnegative".into()));
        }
        Ok(PotentialSpec::FromField { chi, rho2 })
    }

    /// True when the potential is even, so its gradient is odd.
    pub fn is_even(&self) -> bool {
        match self {
            PotentialSpec::WeakestAnalytic { .. } | PotentialSpec::Zero => true,
            PotentialSpec::FromField { rho2, .. } => rho2.evenness_defect() == 0.0,
        }
    }
}

pub fn weakest_h(gamma: f64, x: f64) -> f64 {
    let r = x.abs();
    if r >= 0.5 {
        -gamma * r / 3.0
    } else {
        -gamma / 24.0 * (3.0 - 4.0 * r + 12.0 * r * r)
    }
}

/// Derivative of [`weakest_h`]. The kink at `x = 0` returns 0 by convention.
pub fn weakest_h_prime(gamma: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let r = x.abs();
    let radial = if r >= 0.5 {
        -gamma / 3.0
    } else {
        gamma / 6.0 - gamma * r
    };
    radial * x.signum()
}

/// The potential's gradient on the faces of `grid`.
pub fn potential_gradient_faces(spec: &PotentialSpec, grid: &Grid) -> FaceField {
    match spec {
        PotentialSpec::Zero => FaceField::zeros(*grid),
        PotentialSpec::WeakestAnalytic { gamma } => {
            FaceField::from_fn(*grid, |x| weakest_h_prime(*gamma, x))
        }
        PotentialSpec::FromField { chi, rho2 } => {
            assert_eq!(rho2.grid(), grid, "potential field lives on another grid");
            drift_velocity(rho2, *chi)
        }
    }
}

/// Cell-centred values of the potential (needed for `e^H` weights).
pub fn potential_values(spec: &PotentialSpec, grid: &Grid) -> Field {
    match spec {
        PotentialSpec::Zero => Field::zeros(*grid),
        PotentialSpec::WeakestAnalytic { gamma } => Field::from_fn(*grid, |x| weakest_h(*gamma, x)),
        PotentialSpec::FromField { chi, rho2 } => {
            crate::nonlocal::inv_laplacian(rho2).map(|u| chi * u)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::build_rho2_initial;

    #[test]
    fn branch_values() {
        let g = 7.0;
        assert!((weakest_h(g, 0.5) + g / 6.0).abs() < 1e-15);
        assert!((weakest_h(g, 0.0) + g / 8.0).abs() < 1e-15);
        for x in [0.1, 0.37, 0.5, 1.2, 9.0] {
            assert_eq!(weakest_h(g, x), weakest_h(g, -x));
        }
    }

    #[test]
    fn branches_agree_at_half() {
        let g = 3.0;
        let outer = -g * 0.5 / 3.0;
        let inner = -g / 24.0 * (3.0 - 2.0 + 3.0);
        assert_eq!(outer, inner);
        let below = weakest_h(g, 0.5 - 1e-12);
        assert!((below - outer).abs() < 1e-11);
    }

    #[test]
    fn derivative_values() {
        let g = 12.0;
        assert!(weakest_h_prime(g, 1.0 / 6.0).abs() < 1e-14);
        assert_eq!(weakest_h_prime(g, 1.0), -g / 3.0);
        assert_eq!(weakest_h_prime(g, 0.0), 0.0);
        for x in [0.05, 0.3, 0.5, 2.0] {
            assert_eq!(weakest_h_prime(g, x), -weakest_h_prime(g, -x));
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let g = 5.0;
        let h = 1e-6;
        for x in [-3.0, -0.4, -0.1, 0.1, 0.2, 0.45, 0.7, 4.0] {
            let fd = (weakest_h(g, x + h) - weakest_h(g, x - h)) / (2.0 * h);
            assert!((fd - weakest_h_prime(g, x)).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn face_gradients_for_each_variant() {
        let grid = Grid::new(4.0, 512).unwrap();
        let zero = potential_gradient_faces(&PotentialSpec::Zero, &grid);
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let gamma = 9.0;
        let weak = potential_gradient_faces(&PotentialSpec::weakest(gamma).unwrap(), &grid);
        let j = ((1.0 + 4.0) / grid.dx()).round() as usize;
        assert_eq!(grid.face(j), 1.0);
        assert_eq!(weak.values()[j], -gamma / 3.0);

        let sigma = 1.5;
        let chi = 6.0;
        let ind = Field::from_fn(grid, |x| if x.abs() < 0.5 { sigma } else { 0.0 });
        let field = potential_gradient_faces(&PotentialSpec::from_field(chi, ind).unwrap(), &grid);
        assert!((field.values()[j] + sigma * chi / 2.0).abs() < 1e-12);
    }

    #[test]
    fn field_gradient_of_even_density_is_odd() {
        let grid = Grid::new(4.0, 512).unwrap();
        let rho2 = build_rho2_initial(&grid, 2.0);
        let spec = PotentialSpec::from_field(3.0, rho2).unwrap();
        assert!(spec.is_even());
        assert_eq!(potential_gradient_faces(&spec, &grid).oddness_defect(), 0.0);
    }
}
