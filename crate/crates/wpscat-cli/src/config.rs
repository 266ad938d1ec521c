//! Parameter schemas, the key=value config file, and merged validation.
//!
//! File format:
//!
//! ```text
//! # comment
//! [global]
//! seed = 7
//! [scatter]
//! g = 0.02
//! p-initial = 0, 0, 0.8
//! ```
//!
//! Keys are the flag names without the leading dashes. A flag given on the
//! command line overrides the file, which overrides the default.

use serde_json::{json, Map, Value as Json};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Real,
    Positive,
    Count { min: usize },
    PowerOfTwo,
    Vec3,
    Choice(&'static [&'static str]),
    /// comma-separated reals
    List,
    /// positive real or "auto"
    AutoPositive,
    /// real or "auto"
    AutoReal,
    /// 3-vector or "auto"
    AutoVec3,
    Text,
    Path,
}

#[derive(Debug, Clone, Copy)]
pub struct Param {
    pub name: &'static str,
    pub kind: Kind,
    /// None: required
    pub default: Option<&'static str>,
    pub help: &'static str,
}

const fn p(name: &'static str, kind: Kind, default: &'static str, help: &'static str) -> Param {
    Param { name, kind, default: Some(default), help }
}

const fn opt(name: &'static str, kind: Kind, help: &'static str) -> Param {
    Param { name, kind, default: None, help }
}

use Kind::*;

pub const GLOBAL: &[Param] = &[
    opt("out", Path, "output path for the CSV table ('-' for stdout; the JSON summary then goes to stderr)"),
    p("tol", Positive, "1e-10", "absolute quadrature tolerance for oracle integrals"),
    p("threads", Count { min: 0 }, "0", "worker threads (0 = all cores)"),
    p("seed", Count { min: 0 }, "1", "seed for randomised check selection"),
];

pub struct Command {
    pub name: &'static str,
    pub about: &'static str,
    pub hidden: bool,
    pub params: &'static [Param],
}

const POTENTIALS_1D: &[&str] = &["free", "delta", "square_well"];

pub const COMMANDS: &[Command] = &[
    Command {
        name: "overlap",
        about: "Overlap of two 1D packets plus randomised packet-algebra checks",
        hidden: false,
        params: &[
            p("sigma", Positive, "1", "width of both packets (first packet if sigma2 is set)"),
            p("sigma2", AutoPositive, "auto", "width of the second packet"),
            p("p1", Real, "0", "momentum of packet 1"),
            p("x1", Real, "0", "centre of packet 1"),
            p("p2", Real, "0.5", "momentum of packet 2"),
            p("x2", Real, "1", "centre of packet 2"),
            p("pairs", Count { min: 1 }, "1000", "random pairs for the algebra checks"),
        ],
    },
    Command {
        name: "matrix",
        about: "Table of packet matrix elements <P1,X1|op|P2,X2>",
        hidden: false,
        params: &[
            p("sigma", Positive, "1", "packet width"),
            p("ops", Text, "identity,x,x2,p,p2,delta,1+p", "operators: identity, x, x2, x^n, p, p2, p^n, delta, plane:<k>, 1+p"),
            p("p-values", List, "0,0.5", "momenta used for both packets"),
            p("x-values", List, "0,1", "centres used for both packets"),
        ],
    },
    Command {
        name: "assoc",
        about: "Associativity defects of the A-chain and the delta_r(eps) samples",
        hidden: false,
        params: &[
            p("potential", Choice(&["free", "linear", "delta", "square_well"]), "delta", "potential"),
            p("g", Real, "1", "delta strength"),
            p("k", Positive, "1", "wavenumber k1 = k2"),
            p("c", Real, "0.5", "slope of the linear potential"),
            p("depth", Real, "1", "square-well depth"),
            p("a", Real, "-0.5", "square-well left edge"),
            p("b", Real, "0.5", "square-well right edge"),
            p("k2", Positive, "1.5", "second wavenumber for the delta_r samples"),
            p("eps", List, "0.1,0.05,0.025,0.0125", "regulator schedule, strictly decreasing"),
        ],
    },
    Command {
        name: "stationary",
        about: "Stationary state R, T and its packet projection",
        hidden: false,
        params: &[
            p("potential", Choice(POTENTIALS_1D), "delta", "potential"),
            p("g", Real, "1", "delta strength"),
            p("depth", Real, "1", "square-well depth"),
            p("a", Real, "-0.5", "square-well left edge"),
            p("b", Real, "0.5", "square-well right edge"),
            p("k", Positive, "1", "wavenumber"),
            p("sigma", Positive, "1", "packet width"),
            p("p", Real, "1", "packet momentum"),
            p("x", Real, "-2", "packet centre"),
        ],
    },
    Command {
        name: "scatter",
        about: "3D packet scattering: distributions, probability ladder, golden-rule slope",
        hidden: false,
        params: &[
            p("g", Real, "0.05", "potential strength"),
            p("sigma-e", Positive, "1", "packet width (initial and final)"),
            p("sigma-v", Positive, "2", "potential width"),
            p("p-initial", Vec3, "0,0,0.8", "initial momentum"),
            p("x-initial", Vec3, "0,0,-4", "initial centre at t0"),
            p("x-v", Vec3, "0,0,0", "potential centre"),
            p("t0", Real, "0", "window start"),
            p("t1", Real, "10", "window end"),
            p("grid", Count { min: 2 }, "12", "momentum points per axis of the ladder grid"),
            p("order", Choice(&["0", "1", "2"]), "2", "highest probability order"),
            p("region", Choice(&["on", "off", "all"]), "on", "distribution region"),
            p("table", Count { min: 1 }, "6", "momentum points per axis of the distribution table"),
            p("table-x", Count { min: 1 }, "3", "position points per axis of the distribution table"),
            p("bins", Count { min: 1 }, "16", "energy bins"),
            p("golden-p", AutoVec3, "auto", "final momentum for the golden-rule slope (auto: |P| (0.6, 0, 0.8) rotated onto P)"),
        ],
    },
    Command {
        name: "oracle",
        about: "Split-step reflection/transmission run",
        hidden: false,
        params: &[
            p("potential", Choice(&["delta", "gaussian", "zero"]), "delta", "potential"),
            p("g", Real, "1", "strength"),
            p("k0", Positive, "1", "mean momentum"),
            p("dk", Positive, "0.05", "momentum spread (std of |phi(p)|^2)"),
            p("w", AutoPositive, "auto", "delta width (auto: 0.02/k0)"),
            p("sigma-v", Positive, "0.5", "width of the gaussian potential"),
            p("points", PowerOfTwo, "16384", "grid points"),
            p("extent", Positive, "400", "grid half-width"),
            p("edges", Choice(&["absorbing", "periodic"]), "absorbing", "edge handling"),
            p("x-start", Real, "-60", "initial packet centre"),
            p("snapshot", Choice(&["false", "true"]), "false", "write the final state as CSV to --out"),
        ],
    },
    Command {
        name: "sweep",
        about: "One-parameter sweeps: delta-omega (Q1 and edge terms), k (delta R/T), window (golden rule)",
        hidden: false,
        params: &[
            p("param", Choice(&["delta-omega", "k", "window"]), "delta-omega", "swept parameter"),
            p("points", Count { min: 2 }, "200", "number of points"),
            p("from", AutoReal, "auto", "first value"),
            p("to", AutoReal, "auto", "last value"),
            p("sigma-t", Positive, "1", "sigma_t for delta-omega"),
            p("t-int", Real, "6", "interaction time for delta-omega"),
            p("t0", Real, "0", "window start for delta-omega"),
            p("t1", Real, "200", "window end for delta-omega"),
            p("g", Real, "1", "delta strength for k"),
        ],
    },
    Command {
        name: "selftest-erf",
        about: "CSV grid of (z, erf z, w z)",
        hidden: true,
        params: &[
            p("re-min", Real, "-6", ""),
            p("re-max", Real, "6", ""),
            p("im-min", Real, "-6", ""),
            p("im-max", Real, "6", ""),
            p("points", Count { min: 2 }, "25", "points per axis"),
        ],
    },
];

pub fn command(name: &str) -> Option<&'static Command> {
    COMMANDS.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Count(usize),
    Vec3([f64; 3]),
    List(Vec<f64>),
    Text(String),
    Auto,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
}

impl Source {
    fn as_str(&self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Flag => "flag",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub entries: Vec<(Param, Value, Source)>,
}

fn parse_real(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(v)
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_real).collect()
}

pub fn parse_value(kind: Kind, s: &str) -> Result<Value, String> {
    let s = s.trim();
    let auto = s == "auto";
    Ok(match kind {
        Real => Value::Real(parse_real(s)?),
        Positive => {
            let v = parse_real(s)?;
            if !(v > 0.0) {
                return Err(format!("must be > 0, got {v}"));
            }
            Value::Real(v)
        }
        AutoPositive if auto => Value::Auto,
        AutoPositive => parse_value(Positive, s)?,
        AutoReal if auto => Value::Auto,
        AutoReal => Value::Real(parse_real(s)?),
        AutoVec3 if auto => Value::Auto,
        AutoVec3 | Vec3 => {
            let v = parse_list(s)?;
            if v.len() != 3 {
                return Err(format!("needs three comma-separated components, got {}", v.len()));
            }
            Value::Vec3([v[0], v[1], v[2]])
        }
        Count { min } => {
            let v: usize = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
            if v < min {
                return Err(format!("must be >= {min}, got {v}"));
            }
            Value::Count(v)
        }
        PowerOfTwo => {
            let v: usize = s.parse().map_err(|_| format!("'{s}' is not a positive integer"))?;
            if v < 16 || !v.is_power_of_two() {
                return Err(format!("must be a power of two >= 16, got {v}"));
            }
            Value::Count(v)
        }
        Choice(opts) => {
            if !opts.contains(&s) {
                return Err(format!("must be one of {}, got '{s}'", opts.join(", ")));
            }
            Value::Text(s.to_string())
        }
        List => Value::List(parse_list(s)?),
        Text | Path => Value::Text(s.to_string()),
    })
}

/// section -> key -> (value text, line number)
pub type FileConfig = BTreeMap<String, BTreeMap<String, (String, usize)>>;

pub fn parse_file(text: &str) -> Result<FileConfig, Vec<String>> {
    let mut out: FileConfig = BTreeMap::new();
    let mut errors = Vec::new();
    let mut section = String::from("global");
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            match rest.strip_suffix(']') {
                Some(name) => {
                    let name = name.trim();
                    if name != "global" && command(name).is_none() {
                        errors.push(format!("line {ln}: unknown section [{name}]"));
                    }
                    section = name.to_string();
                }
                None => errors.push(format!("line {ln}: malformed section header")),
            }
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => {
                let k = k.trim().to_string();
                let known = if section == "global" {
                    GLOBAL.iter().any(|p| p.name == k)
                } else {
                    command(&section).map_or(true, |c| c.params.iter().chain(GLOBAL).any(|p| p.name == k))
                };
                if !known {
                    errors.push(format!("line {ln}: unknown key '{k}' in [{section}]"));
                }
                out.entry(section.clone()).or_default().insert(k, (v.trim().to_string(), ln));
            }
            None => errors.push(format!("line {ln}: expected key = value")),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

/// Merges flags over file over defaults and validates everything, collecting
/// every error rather than stopping at the first.
pub fn build(cmd: &'static Command, flags: &BTreeMap<String, String>, file: &FileConfig) -> Result<RunConfig, Vec<String>> {
    let mut errors = Vec::new();
    let mut entries = Vec::new();
    for prm in cmd.params.iter().chain(GLOBAL) {
        let from_file = file
            .get(cmd.name)
            .and_then(|s| s.get(prm.name))
            .or_else(|| file.get("global").and_then(|s| s.get(prm.name)));
        let (text, src, where_) = if let Some(v) = flags.get(prm.name) {
            (Some(v.clone()), Source::Flag, format!("--{}", prm.name))
        } else if let Some((v, ln)) = from_file {
            (Some(v.clone()), Source::File, format!("config line {ln} ({})", prm.name))
        } else {
            (prm.default.map(str::to_string), Source::Default, prm.name.to_string())
        };
        let value = match text {
            Some(t) => match parse_value(prm.kind, &t) {
                Ok(v) => v,
                Err(e) => {
                    errors.push(format!("{where_}: {e}"));
                    continue;
                }
            },
            None if prm.name == "out" => Value::Absent,
            None => {
                errors.push(format!("missing required parameter --{}", prm.name));
                continue;
            }
        };
        entries.push((*prm, value, src));
    }
    let cfg = RunConfig { command: cmd.name, entries };
    if errors.is_empty() {
        errors.extend(cross_checks(&cfg));
    }
    if errors.is_empty() {
        Ok(cfg)
    } else {
        Err(errors)
    }
}

fn cross_checks(c: &RunConfig) -> Vec<String> {
    let mut e = Vec::new();
    match c.command {
        "scatter" => {
            if !(c.real("t1") > c.real("t0")) {
                e.push(format!("--t1 must exceed --t0 (got t0 = {}, t1 = {})", c.real("t0"), c.real("t1")));
            }
            let pi = c.vec3("p-initial");
            if pi.iter().map(|x| x * x).sum::<f64>() == 0.0 {
                e.push("--p-initial must be nonzero".into());
            }
        }
        "assoc" => {
            let eps = c.list("eps");
            if eps.len() < 3 || eps.iter().any(|x| !(*x > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
                e.push("--eps must hold at least three positive, strictly decreasing values".into());
            }
            if c.text("potential") == "square_well" && !(c.real("a") < c.real("b")) {
                e.push("--a must be below --b".into());
            }
        }
        "stationary" => {
            if c.text("potential") == "square_well" && !(c.real("a") < c.real("b")) {
                e.push("--a must be below --b".into());
            }
        }
        "oracle" => {
            if !(c.real("dk") < c.real("k0")) {
                e.push("--dk must be below --k0".into());
            }
            if c.real("x-start").abs() >= c.real("extent") {
                e.push("--x-start must lie inside the grid".into());
            }
        }
        "sweep" => {
            if let (Some(a), Some(b)) = (c.auto_real("from"), c.auto_real("to")) {
                if !(b > a) {
                    e.push("--to must exceed --from".into());
                }
                if c.text("param") != "delta-omega" && !(a > 0.0) {
                    e.push("--from must be positive for k and window sweeps".into());
                }
            }
            if !(c.real("t1") > c.real("t0")) {
                e.push("--t1 must exceed --t0".into());
            }
        }
        "matrix" => {
            for op in c.text("ops").split(',') {
                if wpscat::packet_basis::OperatorKind::parse(op.trim()).is_err() {
                    e.push(format!("--ops: unknown operator '{}'", op.trim()));
                }
            }
        }
        "selftest-erf" => {
            if !(c.real("re-max") > c.real("re-min")) || !(c.real("im-max") > c.real("im-min")) {
                e.push("selftest-erf ranges must be increasing".into());
            }
        }
        _ => {}
    }
    e
}

impl RunConfig {
    fn get(&self, name: &str) -> &Value {
        &self.entries.iter().find(|(p, _, _)| p.name == name).unwrap_or_else(|| panic!("no parameter {name}")).1
    }

    pub fn real(&self, name: &str) -> f64 {
        match self.get(name) {
            Value::Real(v) => *v,
            v => panic!("{name} is not real: {v:?}"),
        }
    }

    pub fn auto_real(&self, name: &str) -> Option<f64> {
        match self.get(name) {
            Value::Real(v) => Some(*v),
            _ => None,
        }
    }

    pub fn count(&self, name: &str) -> usize {
        match self.get(name) {
            Value::Count(v) => *v,
            v => panic!("{name} is not a count: {v:?}"),
        }
    }

    pub fn vec3(&self, name: &str) -> [f64; 3] {
        match self.get(name) {
            Value::Vec3(v) => *v,
            v => panic!("{name} is not a vector: {v:?}"),
        }
    }

    pub fn auto_vec3(&self, name: &str) -> Option<[f64; 3]> {
        match self.get(name) {
            Value::Vec3(v) => Some(*v),
            _ => None,
        }
    }

    pub fn list(&self, name: &str) -> Vec<f64> {
        match self.get(name) {
            Value::List(v) => v.clone(),
            v => panic!("{name} is not a list: {v:?}"),
        }
    }

    pub fn text(&self, name: &str) -> &str {
        match self.get(name) {
            Value::Text(v) => v,
            v => panic!("{name} is not text: {v:?}"),
        }
    }

    pub fn out(&self) -> Option<&str> {
        match self.get("out") {
            Value::Text(v) => Some(v),
            _ => None,
        }
    }

    pub fn echo(&self) -> Json {
        let mut m = Map::new();
        for (p, v, s) in &self.entries {
            let val = match v {
                Value::Real(x) => json!(x),
                Value::Count(x) => json!(x),
                Value::Vec3(x) => json!(x),
                Value::List(x) => json!(x),
                Value::Text(x) => json!(x),
                Value::Auto => json!("auto"),
                Value::Absent => Json::Null,
            };
            m.insert(p.name.to_string(), json!({"value": val, "source": s.as_str()}));
        }
        Json::Object(m)
    }
}
