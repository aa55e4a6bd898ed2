//! Pass/fail thresholds of the verification suites, in one place.

/// `||-Delta u - f||_inf / ||f||_inf` at the finest Poisson grid.
pub const POISSON_DEFECT: f64 = 5e-3;
/// Accepted range of the defect ratio when the cell count doubles.
pub const POISSON_REFINEMENT: (f64, f64) = (3.0, 5.0);

/// L1 distance between discrete and analytic heat kernels.
pub const HEAT_L1: f64 = 1e-3;

/// Relative error of the exact reaction step against the ODE reference.
pub const REACTION_RELATIVE: f64 = 1e-9;
/// Absolute change of `rho1 - rho2` over one reaction step.
pub const REACTION_DIFFERENCE: f64 = 1e-12;

/// Largest relative deviation of the forward/dual pairing.
pub const DUALITY_DEFECT: f64 = 5e-3;

/// Concentration slack of the mass comparison, as a fraction of the mass.
pub const COMPARISON_SLACK: f64 = 1e-4;

/// Slack of the chemotaxis-vs-Fokker-Planck bound, in units of `sigma`.
pub const FP_BOUND_SLACK: f64 = 0.25;
/// Extra numerical tolerance of that bound, in units of `sigma`.
pub const FP_BOUND_TOLERANCE: f64 = 1e-3;

/// Transport scaling: target slope, allowed deviation, and the largest
/// spread of `gamma t / L`.
pub const TRANSPORT_SLOPE: (f64, f64) = (1.0, 0.2);
pub const TRANSPORT_SPREAD: f64 = 2.0;
/// Fraction of `M0` that has to reach the inner annulus.
pub const TRANSPORT_FRACTION: f64 = 0.2;

/// Chemotactic reaction time: target slope, allowed deviation, spread.
pub const CHEMOTACTIC_SLOPE: (f64, f64) = (1.0, 0.25);
pub const CHEMOTACTIC_SPREAD: f64 = 3.0;

/// Spread of the diffusive case-1 diagnostic and the smallest accepted
/// `T_D / T_C` at the largest separation.
pub const DIFFUSIVE_SPREAD: f64 = 3.0;
pub const DIFFUSIVE_GAP: f64 = 5.0;

/// Spread of the scaled pass-through minimum, and the largest accepted
/// decay ratio of `rho2` at the probes.
pub const PASS_THROUGH_SPREAD: f64 = 3.0;
pub const DECAY_RATIO: f64 = 0.5;

/// Drift of `||rho1|| - ||rho2||` per unit time, in units of `M0`.
pub const MASS_DIFFERENCE_RATE: f64 = 1e-8;
/// Evenness defect of even runs relative to the field maximum.
pub const EVENNESS: f64 = 1e3 * f64::EPSILON;

/// Tolerance of the radial drift comparison, in units of `gamma dx`.
pub const DRIFT_COMPARISON: f64 = 1.0;
