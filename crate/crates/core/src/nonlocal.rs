//! The 1D inverse Laplacian and the chemotactic drift, both linear time.
//!
//! With the free-space Green's function `G(x) = -|x| / 2`, the potential of a
//! density is `u(x) = -1/2 int |x - y| f(y) dy` and its gradient splits the
//! mass of `f` at `x`: `u'(x) = 1/2 (mass right of x - mass left of x)`.
//! Both reduce to running sums over the cell masses.

use crate::grid::{Field, FaceField};

/// `(-Delta)^{-1} f` at cell centres for the piecewise-constant density `f`.
///
/// Off-diagonal cells are treated as point masses at their centres (exact
/// for `|x - y|` linear across the cell); the self-cell contributes its exact
/// integral `f_i dx^2 / 4`. The result's discrete Laplacian reproduces the
/// source to second order in `dx`.
pub fn inv_laplacian(source: &Field) -> Field {
    let grid = *source.grid();
    let dx = grid.dx();
    let n = grid.n_cells();
    let mass: Vec<f64> = source.values().iter().map(|v| v * dx).collect();

    // left[i] = sum_{j<i} (x_i - x_j) m_j, accumulated left to right.
    let mut left = vec![0.0; n];
    let mut cum = 0.0;
    for i in 1..n {
        cum += mass[i - 1];
        left[i] = left[i - 1] + dx * cum;
    }
    // right[i] = sum_{j>i} (x_j - x_i) m_j, accumulated right to left.
    let mut right = vec![0.0; n];
    cum = 0.0;
    for i in (0..n - 1).rev() {
        cum += mass[i + 1];
        right[i] = right[i + 1] + dx * cum;
    }

    let values = (0..n)
        .map(|i| -0.5 * (left[i] + right[i] + 0.25 * mass[i] * dx))
        .collect();
    Field::from_values_unchecked(grid, values)
}

/// Cumulative mass to the left and to the right of every face. Both sums are
/// accumulated from their own end so that mirrored faces of an even density
/// see bitwise-identical numbers.
fn face_mass_split(density: &Field) -> (Vec<f64>, Vec<f64>) {
    let grid = density.grid();
    let dx = grid.dx();
    let n = grid.n_cells();
    let v = density.values();
    let mut left = vec![0.0; n + 1];
    for j in 1..=n {
        left[j] = left[j - 1] + v[j - 1] * dx;
    }
    let mut right = vec![0.0; n + 1];
    for j in (0..n).rev() {
        right[j] = right[j + 1] + v[j] * dx;
    }
    (left, right)
}

/// `chi * d/dx (-Delta)^{-1} rho2` on faces:
/// `v = chi/2 (mass right of the face - mass left of the face)`.
pub fn drift_velocity(rho2: &Field, chi: f64) -> FaceField {
    let (left, right) = face_mass_split(rho2);
    let half_chi = 0.5 * chi;
    let values = left
        .iter()
        .zip(&right)
        .map(|(l, r)| half_chi * (r - l))
        .collect();
    FaceField::from_values_unchecked(*rho2.grid(), values)
}

/// Centred difference of a cell-centred potential onto interior faces;
/// boundary faces copy their single interior neighbour.
pub fn face_gradient(potential: &Field) -> FaceField {
    let grid = *potential.grid();
    let dx = grid.dx();
    let u = potential.values();
    let n = grid.n_cells();
    let mut values = vec![0.0; n + 1];
    for j in 1..n {
        values[j] = (u[j] - u[j - 1]) / dx;
    }
    values[0] = values[1];
    values[n] = values[n - 1];
    FaceField::from_values_unchecked(grid, values)
}

/// Discrete `-Delta u` at interior cells (zero at the two end cells).
pub fn neg_discrete_laplacian(u: &Field) -> Field {
    let grid = *u.grid();
    let dx2 = grid.dx() * grid.dx();
    let v = u.values();
    let n = v.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = -(v[i - 1] - 2.0 * v[i] + v[i + 1]) / dx2;
    }
    Field::from_values_unchecked(grid, out)
}
