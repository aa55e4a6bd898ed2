//! Uniform cell-centred grid on a symmetric interval and the per-cell and
//! per-face arrays that live on it.
//!
//! The domain is `[-half_width, half_width]` split into an even number of
//! cells, so `x = 0` is always a cell face. Centre and face coordinates are
//! computed so that mirrored entries are exact negatives of each other; the
//! solvers rely on this to keep even data bitwise even.

use crate::error::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    half_width: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(half_width: f64, n_cells: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::validation(
                "grid.half_width",
                format!("must be positive and finite, got {half_width}"),
            ));
        }
        if n_cells < MIN_CELLS || !n_cells.is_multiple_of(2) {
            return Err(Error::validation(
                "grid.n_cells",
                format!("must be even and at least {MIN_CELLS}, got {n_cells}"),
            ));
        }
        Ok(Self {
            half_width,
            n_cells,
            dx: 2.0 * half_width / n_cells as f64,
        })
    }

    /// Grid with the given half width and (approximately) the requested
    /// spacing. The cell count is rounded up to the next even integer.
    pub fn with_spacing(half_width: f64, dx: f64) -> Result<Self> {
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::validation("grid.dx", "must be positive"));
        }
        let mut n = (2.0 * half_width / dx).round() as usize;
        if n % 2 == 1 {
            n += 1;
        }
        Self::new(half_width, n.max(MIN_CELLS))
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_faces(&self) -> usize {
        self.n_cells + 1
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Centre of cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        debug_assert!(i < self.n_cells);
        let half = self.n_cells / 2;
        if i < half {
            -self.half_width + (i as f64 + 0.5) * self.dx
        } else {
            -self.center(self.n_cells - 1 - i)
        }
    }

    /// Position of face `j`; face `j` separates cells `j - 1` and `j`.
    pub fn face(&self, j: usize) -> f64 {
        debug_assert!(j <= self.n_cells);
        let half = self.n_cells / 2;
        if j == half {
            0.0
        } else if j < half {
            -self.half_width + j as f64 * self.dx
        } else {
            -self.face(self.n_cells - j)
        }
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.center(i))
    }

    pub fn faces(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n_cells).map(move |j| self.face(j))
    }

    /// Index of the cell whose closed extent contains `x` (clamped).
    pub fn cell_of(&self, x: f64) -> usize {
        let k = ((x + self.half_width) / self.dx).floor();
        (k.max(0.0) as usize).min(self.n_cells - 1)
    }

    pub fn contains(&self, x: f64) -> bool {
        x.abs() <= self.half_width * (1.0 + 1e-12)
    }
}

/// Cell-averaged values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_cells()],
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.n_cells()],
        }
    }

    /// Samples `f` at cell centres.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.centers().map(f).collect(),
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::Domain(format!(
                "field has {} values but grid has {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value in cell {i}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sum of cell values times `dx`.
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Field, beta: f64) -> Field {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        Field::from_values_unchecked(self.grid, values)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_values_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Linear interpolation between cell centres; constant extrapolation
    /// into the outermost half cells.
    pub fn sample(&self, x: f64) -> f64 {
        let g = &self.grid;
        let s = (x + g.half_width()) / g.dx() - 0.5;
        if s <= 0.0 {
            return self.values[0];
        }
        let last = g.n_cells() - 1;
        if s >= last as f64 {
            return self.values[last];
        }
        let i = s.floor() as usize;
        let w = s - i as f64;
        (1.0 - w) * self.values[i] + w * self.values[i + 1]
    }

    /// Largest `|f(x) - f(-x)|` over mirrored cell pairs.
    pub fn evenness_defect(&self) -> f64 {
        let n = self.values.len();
        (0..n / 2)
            .map(|i| (self.values[i] - self.values[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    }

    /// Pairing `sum f_i g_i dx`.
    pub fn dot(&self, other: &Field) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * self.grid.dx()
    }
}

/// Values on the `n_cells + 1` faces of a grid (velocities or potential
/// gradients).
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    grid: Grid,
    values: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n_faces()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid,
            values: grid.faces().map(f).collect(),
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_faces() {
            return Err(Error::Domain(format!(
                "face field has {} values but grid has {} faces",
                values.len(),
                grid.n_faces()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite face value".into()));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_values_unchecked(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_faces());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest magnitude over all faces.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude over interior faces (boundary faces carry no flux).
    pub fn max_abs_interior(&self) -> f64 {
        let n = self.values.len();
        self.values[1..n - 1]
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> FaceField {
        FaceField::from_values_unchecked(
            self.grid,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Largest `|v(x) + v(-x)|` over mirrored faces.
    pub fn oddness_defect(&self) -> f64 {
        let n = self.values.len() - 1;
        (0..=n / 2)
            .map(|j| (self.values[j] + self.values[n - j]).abs())
            .fold(0.0, f64::max)
    }
}

fn check_interval(grid: &Grid, a: f64, b: f64) -> Result<()> {
    let slack = 1e-12 * grid.half_width();
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if a > b {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    if a < -grid.half_width() - slack || b > grid.half_width() + slack {
        return Err(Error::Domain(format!(
            "interval [{a}, {b}] leaves the domain [-{hw}, {hw}]",
            hw = grid.half_width()
        )));
    }
    Ok(())
}

/// Integral of the piecewise-constant field over `[a, b]`. Cells cut by the
/// interval contribute in proportion to their overlap.
pub fn integrate(field: &Field, a: f64, b: f64) -> Result<f64> {
    let grid = field.grid();
    check_interval(grid, a, b)?;
    if a == b {
        return Ok(0.0);
    }
    let hw = grid.half_width();
    let dx = grid.dx();
    let first = grid.cell_of(a);
    let last = grid.cell_of(b);
    let mut full = 0.0;
    let mut partial = 0.0;
    for i in first..=last {
        let lo = -hw + i as f64 * dx;
        let hi = lo + dx;
        if lo >= a && hi <= b {
            full += field.values()[i];
        } else {
            let overlap = (hi.min(b) - lo.max(a)).max(0.0);
            partial += field.values()[i] * overlap;
        }
    }
    Ok(full * dx + partial)
}

/// Mass inside `[-r, r]`.
pub fn concentration(field: &Field, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    let hw = field.grid().half_width();
    if r > hw * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("radius {r} exceeds half width {hw}")));
    }
    let r = r.min(hw);
    integrate(field, -r, r)
}

/// Concentration at each radius of a ladder.
pub fn concentration_profile(field: &Field, radii: &[f64]) -> Result<Vec<f64>> {
    radii.iter().map(|&r| concentration(field, r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(2.0, 1024).unwrap()
    }

    #[test]
    fn rejects_odd_or_tiny_grids() {
        assert!(Grid::new(1.0, 15).is_err());
        assert!(Grid::new(1.0, 8).is_err());
        assert!(Grid::new(1.0, 17).is_err());
        assert!(Grid::new(0.0, 32).is_err());
        assert!(Grid::new(1.0, 32).is_ok());
    }

    #[test]
    fn centers_and_faces_are_mirror_exact() {
        let g = Grid::new(7.3, 998).unwrap();
        let n = g.n_cells();
        for i in 0..n {
            assert_eq!(g.center(i), -g.center(n - 1 - i));
        }
        for j in 0..=n {
            assert_eq!(g.face(j), -g.face(n - j));
        }
        assert_eq!(g.face(n / 2), 0.0);
        assert!(g.centers().zip(g.centers().skip(1)).all(|(a, b)| a < b));
    }

    #[test]
    fn indicator_mass() {
        let g = grid();
        let ind = Field::from_fn(g, |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 });
        let m = integrate(&ind, -0.5, 0.5).unwrap();
        assert!((m - 1.0).abs() <= g.dx());
        assert_eq!(integrate(&ind, 0.3, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn quarter_concentration_of_indicator() {
        let g = grid();
        let ind = Field::from_fn(g, |x| if x.abs() <= 0.5 { 1.0 } else { 0.0 });
        let c = concentration(&ind, 0.25).unwrap();
        assert!((c - 0.5).abs() <= g.dx());
        assert_eq!(concentration(&ind, 0.0).unwrap(), 0.0);
        let full = concentration(&ind, g.half_width()).unwrap();
        let direct = integrate(&ind, -g.half_width(), g.half_width()).unwrap();
        assert!((full - direct).abs() < 1e-14);
    }

    #[test]
    fn partial_cells_weighted_by_overlap() {
        let g = Grid::new(1.0, 16).unwrap();
        let ones = Field::constant(g, 1.0);
        // Arbitrary sub-interval of a constant field integrates to its length.
        let m = integrate(&ones, -0.31, 0.47).unwrap();
        assert!((m - 0.78).abs() < 1e-14);
    }

    #[test]
    fn out_of_domain_is_an_error() {
        let g = grid();
        let f = Field::zeros(g);
        assert!(integrate(&f, -3.0, 0.0).is_err());
        assert!(integrate(&f, 0.5, 0.1).is_err());
        assert!(concentration(&f, -0.1).is_err());
        assert!(concentration(&f, 2.5).is_err());
    }

    #[test]
    fn sample_interpolates_linearly() {
        let g = Grid::new(1.0, 16).unwrap();
        let f = Field::from_fn(g, |x| 3.0 * x + 1.0);
        assert!((f.sample(0.1) - 1.3).abs() < 1e-14);
        assert!((f.sample(-0.73) - (1.0 - 2.19)).abs() < 1e-14);
    }
}
