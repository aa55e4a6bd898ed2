//! The closed-form reaction step next to an adaptive ODE solve.

use chemotaxis_lab::oracle::reaction_reference;
use chemotaxis_lab::scheme::react_pair;

fn main() {
    let cases = [
        (1.0, 0.5, 1.0, 0.1),
        (2.0, 2.0, 3.0, 0.5),
        (5.0, 1e-3, 10.0, 0.5),
        (1.0, 1.0 + 1e-10, 0.1, 1e-4),
    ];
    println!("{:>8} {:>8} {:>6} {:>7} {:>24} {:>10}", "rho1", "rho2", "eps", "dt", "step", "rel err");
    for (a, b, eps, dt) in cases {
        let (x, y) = react_pair(a, b, eps, dt);
        let (ex, ey) = reaction_reference(a, b, eps, dt);
        let err = ((x - ex) / ex).abs().max(((y - ey) / ey).abs());
        println!("{a:>8} {b:>8} {eps:>6} {dt:>7} {:>11.6e},{:>11.6e} {err:>10.2e}", x, y);
    }
}
