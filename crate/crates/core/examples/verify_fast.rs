use chemotaxis_lab::verify::{run_suite, Suite};

fn main() {
    let report = run_suite(Suite::Fast, None);
    println!("{report}");
    if !report.passed() {
        std::process::exit(1);
    }
}
