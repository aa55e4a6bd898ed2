//! Scenario configuration files.
//!
//! Line-oriented `key = value` pairs grouped under `[section]` headers, or
//! written fully qualified as `section.key = value`. `#` starts a comment.
//! Lists are comma separated.
//!
//! ```text
//! [scenario]
//! name = chemotaxis          # chemotaxis | diffusive | gsystem | fokker_planck | dual | pair_no_reaction
//! side = right               # right | symmetric
//!
//! [params]
//! chi = 32
//! eps = 1
//! sigma = 1
//! M0 = 1e3
//! L = 8
//!
//! grid.dx = 0.0078125        # or grid.n_cells; half_width defaults to 2 L + 8
//! time.t_end = 5
//! time.stop_at_quarter = true
//! observer.probes = 0.3, 0.4
//! ```

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::initial::{Params, Side};
use crate::scheme::SchemeConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Chemotaxis,
    Diffusive,
    GSystem,
    FokkerPlanck,
    Dual,
    PairNoReaction,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Chemotaxis => "chemotaxis",
            Scenario::Diffusive => "diffusive",
            Scenario::GSystem => "gsystem",
            Scenario::FokkerPlanck => "fokker_planck",
            Scenario::Dual => "dual",
            Scenario::PairNoReaction => "pair_no_reaction",
        }
    }

    /// Scenarios that evolve `rho2` and therefore have a reaction time.
    pub fn reacts(self) -> bool {
        !matches!(self, Scenario::FokkerPlanck | Scenario::Dual)
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "chemotaxis" => Scenario::Chemotaxis,
            "diffusive" => Scenario::Diffusive,
            "gsystem" => Scenario::GSystem,
            "fokker_planck" => Scenario::FokkerPlanck,
            "dual" => Scenario::Dual,
            "pair_no_reaction" => Scenario::PairNoReaction,
            other => {
                return Err(Error::validation(
                    "scenario.name",
                    format!("unknown scenario `{other}`"),
                ))
            }
        })
    }
}

/// Drift used by the `fokker_planck` and `dual` scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Weakest,
    Zero,
    /// `chi (-Delta)^{-1} rho2(0)`.
    Field,
}

impl FromStr for PotentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weakest" => Ok(PotentialKind::Weakest),
            "zero" => Ok(PotentialKind::Zero),
            "field" => Ok(PotentialKind::Field),
            other => Err(Error::validation(
                "scenario.potential",
                format!("expected weakest, zero or field, got `{other}`"),
            )),
        }
    }
}

impl PotentialKind {
    fn name(self) -> &'static str {
        match self {
            PotentialKind::Weakest => "weakest",
            PotentialKind::Zero => "zero",
            PotentialKind::Field => "field",
        }
    }
}

/// Grid resolution and extent. The half width is either fixed or
/// `per_l * L + margin`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub half_width: Option<f64>,
    pub half_width_per_l: f64,
    pub half_width_margin: f64,
    pub resolution: Resolution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Spacing(f64),
    Cells(usize),
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            half_width: None,
            half_width_per_l: 2.0,
            half_width_margin: 8.0,
            resolution: Resolution::Spacing(1.0 / 128.0),
        }
    }
}

impl GridSpec {
    pub fn half_width_for(&self, l: f64) -> f64 {
        self.half_width
            .unwrap_or(self.half_width_per_l * l + self.half_width_margin)
    }

    pub fn build(&self, l: f64) -> Result<Grid> {
        let hw = self.half_width_for(l);
        match self.resolution {
            Resolution::Spacing(dx) => Grid::with_spacing(hw, dx),
            Resolution::Cells(n) => Grid::new(hw, n),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObserverConfig {
    /// `None` selects `min(0.01 L / gamma, 0.1)`.
    pub sample_interval: Option<f64>,
    pub probes: Vec<f64>,
    pub radii: Vec<f64>,
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub side: Side,
    pub potential: PotentialKind,
    /// Half width of the initial plateau `0 <= f0 <= 1` in the `dual` scenario.
    pub dual_half_width: f64,
    pub params: Params,
    pub grid: GridSpec,
    pub scheme: SchemeConfig,
    pub t_end: f64,
    /// Stop once a quarter of `rho2` has reacted.
    pub stop_at_quarter: bool,
    pub observer: ObserverConfig,
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario, params: Params, t_end: f64) -> Self {
        Self {
            scenario,
            side: Side::Right,
            potential: PotentialKind::Weakest,
            dual_half_width: 0.5,
            params,
            grid: GridSpec::default(),
            scheme: SchemeConfig::default(),
            t_end,
            stop_at_quarter: false,
            observer: ObserverConfig::default(),
            output: None,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.params.gamma()
    }

    pub fn sample_interval(&self) -> f64 {
        self.observer
            .sample_interval
            .unwrap_or_else(|| crate::system::ObserverSpec::default_interval(&self.params))
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.scheme.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::validation("time.t_end", "must be positive"));
        }
        if let Some(s) = self.observer.sample_interval {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::validation(
                    "observer.sample_interval",
                    "must be positive",
                ));
            }
        }
        if self.dual_half_width.is_nan() || self.dual_half_width <= 0.0 {
            return Err(Error::validation("scenario.dual_half_width", "must be positive"));
        }
        let hw = self.grid.half_width_for(self.params.l);
        if !(hw > 0.0 && hw.is_finite()) {
            return Err(Error::validation("grid.half_width", "must be positive"));
        }
        if self.params.l + crate::initial::RHO1_BOUNDARY_MARGIN > hw {
            return Err(Error::validation(
                "params.L",
                format!(
                    "L = {} leaves less than {} between the bump and the boundary at {hw}",
                    self.params.l,
                    crate::initial::RHO1_BOUNDARY_MARGIN
                ),
            ));
        }
        match self.grid.resolution {
            Resolution::Spacing(dx) if !(dx > 0.0 && dx.is_finite()) => {
                return Err(Error::validation("grid.dx", "must be positive"));
            }
            _ => {}
        }
        for (key, list) in [
            ("observer.probes", &self.observer.probes),
            ("observer.radii", &self.observer.radii),
        ] {
            if let Some(x) = list.iter().find(|&&x| !(x >= 0.0 && x <= hw)) {
                return Err(Error::validation(
                    key,
                    format!("{x} lies outside [0, {hw}]"),
                ));
            }
        }
        if let Some(t) = self
            .observer
            .snapshot_times
            .iter()
            .find(|&&t| !(t >= 0.0 && t.is_finite()))
        {
            return Err(Error::validation(
                "observer.snapshot_times",
                format!("{t} is not a valid time"),
            ));
        }
        self.grid.build(self.params.l)?;
        Ok(())
    }

    /// Writes the configuration back in the file grammar. Parsing the result
    /// yields an equal configuration.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let _ = writeln!(s, "[scenario]");
        let _ = writeln!(s, "name = {}", self.scenario.name());
        let side = match self.side {
            Side::Right => "right",
            Side::Symmetric => "symmetric",
        };
        let _ = writeln!(s, "side = {side}");
        let _ = writeln!(s, "potential = {}", self.potential.name());
        let _ = writeln!(s, "dual_half_width = {}", self.dual_half_width);
        if let Some(out) = &self.output {
            let _ = writeln!(s, "output = {}", out.display());
        }
        let p = &self.params;
        let _ = writeln!(s, "\n[params]");
        let _ = writeln!(s, "chi = {}\neps = {}\nsigma = {}\nM0 = {}\nL = {}", p.chi, p.eps, p.sigma, p.m0, p.l);
        let _ = writeln!(s, "# gamma = {}", p.gamma());
        let _ = writeln!(s, "\n[grid]");
        match self.grid.half_width {
            Some(hw) => {
                let _ = writeln!(s, "half_width = {hw}");
            }
            None => {
                let _ = writeln!(
                    s,
                    "half_width_per_L = {}\nhalf_width_margin = {}",
                    self.grid.half_width_per_l, self.grid.half_width_margin
                );
            }
        }
        match self.grid.resolution {
            Resolution::Spacing(dx) => {
                let _ = writeln!(s, "dx = {dx}");
            }
            Resolution::Cells(n) => {
                let _ = writeln!(s, "n_cells = {n}");
            }
        }
        let _ = writeln!(s, "\n[time]");
        let _ = writeln!(
            s,
            "t_end = {}\nstop_at_quarter = {}\ncfl_factor = {}\ndt_max = {}",
            self.t_end, self.stop_at_quarter, self.scheme.cfl_factor, self.scheme.dt_max
        );
        let _ = writeln!(s, "\n[observer]");
        if let Some(si) = self.observer.sample_interval {
            let _ = writeln!(s, "sample_interval = {si}");
        }
        if !self.observer.probes.is_empty() {
            let _ = writeln!(s, "probes = {}", list(&self.observer.probes));
        }
        if !self.observer.radii.is_empty() {
            let _ = writeln!(s, "radii = {}", list(&self.observer.radii));
        }
        if !self.observer.snapshot_times.is_empty() {
            let _ = writeln!(s, "snapshot_times = {}", list(&self.observer.snapshot_times));
        }
        s
    }
}

impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

const SECTIONS: [&str; 5] = ["scenario", "params", "grid", "time", "observer"];

fn number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::validation(key, format!("`{value}` is not a number")))?;
    if !v.is_finite() {
        return Err(Error::validation(key, "must be finite"));
    }
    Ok(v)
}

fn number_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| number(key, v.trim())).collect()
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::validation(key, format!("expected true or false, got `{other}`"))),
    }
}

/// Splits a file into fully qualified `(line, key, value)` triples.
fn tokenize(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut section: Option<String> = None;
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Syntax {
                line: line_no,
                message: format!("unterminated section header `{line}`"),
            })?;
            let name = name.trim();
            if !SECTIONS.contains(&name) {
                return Err(Error::Syntax {
                    line: line_no,
                    message: format!("unknown section `[{name}]`"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Syntax {
            line: line_no,
            message: format!("expected `key = value`, found `{line}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Syntax {
                line: line_no,
                message: format!("malformed key `{key}`"),
            });
        }
        if value.is_empty() && !key.ends_with("probes") && !key.ends_with("radii") && !key.ends_with("snapshot_times") {
            return Err(Error::Syntax {
                line: line_no,
                message: format!("missing value for `{key}`"),
            });
        }
        let full = if key.contains('.') {
            key.to_string()
        } else {
            match &section {
                Some(s) => format!("{s}.{key}"),
                None => {
                    return Err(Error::Syntax {
                        line: line_no,
                        message: format!("key `{key}` outside any section"),
                    })
                }
            }
        };
        out.push((line_no, full, value.to_string()));
    }
    Ok(out)
}

pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let entries = tokenize(text)?;
    let mut scenario = None;
    let mut side = Side::Right;
    let mut potential = PotentialKind::Weakest;
    let mut dual_half_width = 0.5;
    let mut output = None;
    let (mut chi, mut eps, mut sigma, mut m0, mut l) = (None, None, None, None, None);
    let mut grid = GridSpec::default();
    let mut dx = None;
    let mut n_cells = None;
    let mut scheme = SchemeConfig::default();
    let mut t_end = None;
    let mut stop_at_quarter = false;
    let mut observer = ObserverConfig::default();
    let mut seen = std::collections::HashSet::new();

    for (line, key, value) in &entries {
        if !seen.insert(key.clone()) {
            return Err(Error::Syntax {
                line: *line,
                message: format!("duplicate key `{key}`"),
            });
        }
        let k = key.as_str();
        let v = value.as_str();
        match k {
            "scenario.name" => scenario = Some(v.parse::<Scenario>()?),
            "scenario.side" => side = v.parse()?,
            "scenario.potential" => potential = v.parse()?,
            "scenario.dual_half_width" => dual_half_width = number(k, v)?,
            "scenario.output" => output = Some(PathBuf::from(v)),
            "params.chi" => chi = Some(number(k, v)?),
            "params.eps" => eps = Some(number(k, v)?),
            "params.sigma" => sigma = Some(number(k, v)?),
            "params.M0" => m0 = Some(number(k, v)?),
            "params.L" => l = Some(number(k, v)?),
            "grid.half_width" => grid.half_width = Some(number(k, v)?),
            "grid.half_width_per_L" => grid.half_width_per_l = number(k, v)?,
            "grid.half_width_margin" => grid.half_width_margin = number(k, v)?,
            "grid.dx" => dx = Some(number(k, v)?),
            "grid.n_cells" => {
                n_cells = Some(v.parse::<usize>().map_err(|_| {
                    Error::validation(k, format!("`{v}` is not a cell count"))
                })?)
            }
            "time.t_end" => t_end = Some(number(k, v)?),
            "time.stop_at_quarter" => stop_at_quarter = boolean(k, v)?,
            "time.cfl_factor" => scheme.cfl_factor = number(k, v)?,
            "time.dt_max" => scheme.dt_max = number(k, v)?,
            "observer.sample_interval" => observer.sample_interval = Some(number(k, v)?),
            "observer.probes" => observer.probes = number_list(k, v)?,
            "observer.radii" => observer.radii = number_list(k, v)?,
            "observer.snapshot_times" => observer.snapshot_times = number_list(k, v)?,
            _ => {
                return Err(Error::validation(k, format!("unknown key (line {line})")));
            }
        }
    }

    let require = |key: &str, v: Option<f64>| {
        v.ok_or_else(|| Error::validation(key, "missing required key"))
    };
    let scenario = scenario.ok_or_else(|| Error::validation("scenario.name", "missing required key"))?;
    let chi = match scenario {
        Scenario::Diffusive | Scenario::GSystem => chi.unwrap_or(0.0),
        _ => require("params.chi", chi)?,
    };
    let params = Params {
        chi,
        eps: require("params.eps", eps)?,
        sigma: require("params.sigma", sigma)?,
        m0: require("params.M0", m0)?,
        l: require("params.L", l)?,
    };
    grid.resolution = match (dx, n_cells) {
        (Some(_), Some(_)) => {
            return Err(Error::validation("grid.dx", "give either grid.dx or grid.n_cells"))
        }
        (Some(dx), None) => Resolution::Spacing(dx),
        (None, Some(n)) => Resolution::Cells(n),
        (None, None) => grid.resolution,
    };
    let config = ScenarioConfig {
        scenario,
        side,
        potential,
        dual_half_width,
        params,
        grid,
        scheme,
        t_end: require("time.t_end", t_end)?,
        stop_at_quarter,
        observer,
        output,
    };
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
[scenario]
name = diffusive
[params]
eps = 1
sigma = 1
M0 = 1e3
L = 4
[time]
t_end = 2.5
";

    #[test]
    fn minimal_diffusive() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.scenario, Scenario::Diffusive);
        assert_eq!(c.params.chi, 0.0);
        assert_eq!(c.grid.half_width_for(4.0), 16.0);
        assert_eq!(c.t_end, 2.5);
    }

    #[test]
    fn dotted_keys_and_gamma_echo() {
        let text = "scenario.name = chemotaxis\nparams.chi = 32\nparams.sigma = 1\n\
                    params.eps = 1.0\nparams.M0 = 1000\nparams.L = 8 # comment\ntime.t_end = 1e1\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.gamma(), 32.0);
        assert!(c.to_text().contains("# gamma = 32"));
    }

    #[test]
    fn round_trip() {
        let text = format!(
            "{MINIMAL}[observer]\nprobes = 0.3, 0.4\nsnapshot_times = 0.5,1\n[grid]\nn_cells = 2048\nhalf_width = 20\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.observer.probes, vec![0.3, 0.4]);
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn l_beyond_domain() {
        let text = format!("{MINIMAL}grid.half_width = 5\n");
        match parse_config(&text) {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "params.L"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_name_line_or_key() {
        let bad = "[scenario]\nname diffusive\n";
        assert!(matches!(parse_config(bad), Err(Error::Syntax { line: 2, .. })));
        let bad = "[scenery]\n";
        assert!(matches!(parse_config(bad), Err(Error::Syntax { line: 1, .. })));
        let bad = format!("{MINIMAL}params.colour = 3\n");
        match parse_config(&bad) {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "params.colour"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace("M0 = 1e3", "M0 = lots");
        match parse_config(&bad) {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "params.M0"),
            other => panic!("{other:?}"),
        }
        let bad = MINIMAL.replace("name = diffusive", "name = swirl");
        assert!(matches!(parse_config(&bad), Err(Error::Validation { .. })));
        let bad = format!("{MINIMAL}time.t_end = 3\n");
        assert!(matches!(parse_config(&bad), Err(Error::Syntax { line: 10, .. })));
    }
}
