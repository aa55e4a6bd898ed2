//! Reference solutions that share no code with the solver: an adaptive
//! Dormand-Prince integrator, adaptive Simpson quadrature and closed-form
//! Gaussians.

use std::f64::consts::PI;

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub y: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(t, y)` from `0` to `t_end` with the Dormand-Prince 5(4)
/// pair and an elementary step-size controller.
pub fn dopri45(
    f: impl Fn(f64, &[f64], &mut [f64]),
    y0: &[f64],
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> OdeSolution {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let n = y0.len();
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    let mut t = 0.0;
    let mut h = if t_end > 0.0 { t_end.min(1e-3) } else { 0.0 };
    let (mut steps, mut rejected) = (0, 0);

    while t < t_end {
        h = h.min(t_end - t);
        for s in 0..7 {
            for i in 0..n {
                tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            f(t + C[s] * h, &tmp, &mut k[s]);
        }
        let mut err: f64 = 0.0;
        for i in 0..n {
            y5[i] = y[i] + h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>();
            let y4 = y[i] + h * (0..7).map(|s| B4[s] * k[s][i]).sum::<f64>();
            let scale = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4) / scale).abs());
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            steps += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    OdeSolution { y, steps, rejected }
}

/// `a' = b' = -eps a b` over `dt`, integrated in log variables so that
/// decayed states keep full relative accuracy.
pub fn reaction_reference(a: f64, b: f64, eps: f64, dt: f64) -> (f64, f64) {
    if a == 0.0 || b == 0.0 || eps == 0.0 || dt == 0.0 {
        return (a, b);
    }
    let sol = dopri45(
        |_, y, dy| {
            dy[0] = -eps * y[1].exp();
            dy[1] = -eps * y[0].exp();
        },
        &[a.ln(), b.ln()],
        dt,
        1e-14,
        1e-14,
    );
    (sol.y[0].exp(), sol.y[1].exp())
}

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Normal density with mean `mean` and variance `var`.
pub fn gaussian(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// `int N(x; m1, v1) N(x; m2, v2) dx`.
pub fn gaussian_overlap(m1: f64, v1: f64, m2: f64, v2: f64) -> f64 {
    gaussian(m1 - m2, 0.0, v1 + v2)
}

/// Cell averages of `N(mean, var)` on a grid: exact via `erf`.
pub fn gaussian_cell_averages(grid: &crate::grid::Grid, mean: f64, var: f64) -> Vec<f64> {
    let s = (2.0 * var).sqrt();
    let dx = grid.dx();
    (0..grid.n_cells())
        .map(|i| {
            let lo = grid.face(i);
            let hi = grid.face(i + 1);
            0.5 * (libm::erf((hi - mean) / s) - libm::erf((lo - mean) / s)) / dx
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dopri_on_exponential_and_oscillator() {
        let sol = dopri45(|_, y, dy| dy[0] = -y[0], &[1.0], 2.0, 1e-12, 1e-14);
        assert!((sol.y[0] - (-2.0f64).exp()).abs() < 1e-12);
        let sol = dopri45(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            &[0.0, 1.0],
            PI,
            1e-12,
            1e-14,
        );
        assert!(sol.y[0].abs() < 1e-10 && (sol.y[1] + 1.0).abs() < 1e-10);
    }

    #[test]
    fn reaction_reference_closed_forms() {
        // Equal arguments: a(t) = a / (1 + eps a t).
        let (a, b) = reaction_reference(2.0, 2.0, 3.0, 0.5);
        let exact = 2.0 / (1.0 + 3.0);
        assert!((a - exact).abs() < 1e-13 && (b - exact).abs() < 1e-13);
        // One side vanishing: nothing happens.
        assert_eq!(reaction_reference(0.0, 1.0, 3.0, 1.0), (0.0, 1.0));
    }

    #[test]
    fn simpson_integrates_gaussian() {
        let v = adaptive_simpson(&|x| gaussian(x, 0.0, 1.0), -1.0, 1.0, 1e-13);
        assert!((v - libm::erf(1.0 / 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn overlap_closed_form() {
        let direct = adaptive_simpson(
            &|x| gaussian(x, 0.3, 0.5) * gaussian(x, -1.0, 2.0),
            -30.0,
            30.0,
            1e-14,
        );
        assert!((direct - gaussian_overlap(0.3, 0.5, -1.0, 2.0)).abs() < 1e-12);
    }
}
