//! Parses a configuration, runs it and writes the CSV outputs to a scratch
//! directory, then regenerates the summary from those files.

use chemotaxis_lab::config::parse_config;
use chemotaxis_lab::harness::{report, run};

const CONFIG: &str = "
[scenario]
name = diffusive

[params]
eps = 1
sigma = 1
M0 = 100
L = 4

[grid]
dx = 0.03125

[time]
t_end = 200
stop_at_quarter = true

[observer]
snapshot_times = 1, 2
";

fn main() -> chemotaxis_lab::Result<()> {
    let config = parse_config(CONFIG)?;
    let out = std::env::temp_dir().join("chemolab-config-example");
    let summary = run(&config, &out)?;
    println!("wrote {} after {} steps", out.display(), summary.steps);
    let mut names: Vec<_> = std::fs::read_dir(&out)
        .map_err(|e| chemotaxis_lab::Error::Io { path: out.clone(), source: e })?
        .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
        .collect();
    names.sort();
    println!("files: {}", names.join(", "));
    print!("{}", report(&out)?);
    Ok(())
}
