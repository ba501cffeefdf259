//! `key = value` run configuration with optional `[section]` headers.
//!
//! Keys before the first header are top-level. Keys inside a section are
//! addressed as `section.key` in `--override`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cutloc_core::obstacle::SolverConfig;
use serde::Serialize;

/// Reference text shown by `--help`; keep in sync with [`RunConfig::default`].
pub const REFERENCE: &str = "\
CONFIG FILE
  Lines are `key = value`; `#` starts a comment; `[section]` opens a section.
  Unknown keys, duplicate keys and malformed lines are errors.

  top level
    surface       = torus L1 L2 N1 N2 | sphere K | file PATH   (required)
    source        = 0            source vertex b
    m             = 1            load in the energy uᵀLu − m Σ mᵢuᵢ
    distance      = auto         auto | analytic | fast_marching
                                 (auto: analytic on torus/sphere, fast marching on files)
  [solver]
    omega         = 1.5          over-relaxation, in (0, 2)
    tol_update    = 1e-11        max per-sweep change at convergence
    tol_kkt       = 1e-8         scaled KKT residual at convergence
    tol_act_rel   = 1e-10        activity tolerance, relative to 1 + |d|
    max_sweeps    = 200000
  [detect]
    theta         = auto         noncontact threshold; auto = max(10·tol_kkt, 1e-6)
  [barrier]
    a             = 1, 10, 100   target Laplacian bounds A
    points        = 0.5 0; 0.5 0.25; 0.3 0.5   uv cut points
    radius        = 0.05         sampling disk radius (shrunk if needed)
    samples       = 10000
  [blowup]
    levels        = 2            refinements probed, starting at the configured surface
    r_min         = 0.5          sphere radial window for the cot(r) comparison
    r_max         = 2.6
  [smooth]
    passes        = 20           one-ring averaging passes

  Overrides use the same keys, prefixed by their section: --override solver.omega=1.2";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Torus { l1: f64, l2: f64, n1: usize, n2: usize },
    Sphere { subdivisions: usize },
    File { path: PathBuf },
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceSpec::Torus { l1, l2, n1, n2 } => write!(f, "torus {l1} {l2} {n1} {n2}"),
            SurfaceSpec::Sphere { subdivisions } => write!(f, "sphere {subdivisions}"),
            SurfaceSpec::File { path } => write!(f, "file {}", path.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceChoice {
    Auto,
    Analytic,
    FastMarching,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    pub source: usize,
    pub m: f64,
    pub distance: DistanceChoice,
    pub solver: SolverConfig,
    pub theta: Option<f64>,
    pub barrier_a: Vec<f64>,
    pub barrier_points: Vec<[f64; 2]>,
    pub barrier_radius: f64,
    pub barrier_samples: usize,
    pub blowup_levels: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub passes: usize,
}

impl RunConfig {
    fn with_surface(surface: SurfaceSpec) -> Self {
        RunConfig {
            surface,
            source: 0,
            m: 1.0,
            distance: DistanceChoice::Auto,
            solver: SolverConfig::default(),
            theta: None,
            barrier_a: vec![1.0, 10.0, 100.0],
            barrier_points: vec![[0.5, 0.0], [0.5, 0.25], [0.3, 0.5]],
            barrier_radius: 0.05,
            barrier_samples: 10_000,
            blowup_levels: 2,
            r_min: 0.5,
            r_max: 2.6,
            passes: cutloc_core::smoothing::DEFAULT_PASSES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.solver.validate().context("invalid [solver] settings")?;
        if !(self.m > 0.0 && self.m.is_finite()) {
            bail!("m = {} must be positive", self.m);
        }
        if let Some(t) = self.theta {
            if !(t > 0.0) {
                bail!("detect.theta = {t} must be positive");
            }
        }
        if self.barrier_a.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            bail!("barrier.a entries must be positive");
        }
        if !(self.barrier_radius > 0.0) || self.barrier_samples == 0 {
            bail!("barrier.radius and barrier.samples must be positive");
        }
        if self.blowup_levels < 2 {
            bail!("blowup.levels must be at least 2");
        }
        if !(self.r_min < self.r_max) {
            bail!("blowup.r_min must be below blowup.r_max");
        }
        Ok(())
    }
}

/// Raw `key → (value, line)` entries, keys fully qualified.
type Entries = BTreeMap<String, (String, usize)>;

const KEYS: &[&str] = &[
    "surface",
    "source",
    "m",
    "distance",
    "solver.omega",
    "solver.tol_update",
    "solver.tol_kkt",
    "solver.tol_act_rel",
    "solver.max_sweeps",
    "detect.theta",
    "barrier.a",
    "barrier.points",
    "barrier.radius",
    "barrier.samples",
    "blowup.levels",
    "blowup.r_min",
    "blowup.r_max",
    "smooth.passes",
];

pub fn parse_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_str(&text, base, overrides).with_context(|| format!("in config {}", path.display()))
}

pub fn parse_str(text: &str, base: &Path, overrides: &[String]) -> Result<RunConfig> {
    let mut entries = Entries::new();
    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| anyhow!("line {line_no}: malformed section header `{line}`"))?
                .trim();
            if !KEYS.iter().any(|k| k.starts_with(&format!("{name}."))) {
                bail!("line {line_no}: unknown section [{name}]");
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line_no}: expected `key = value`, got `{line}`"))?;
        let key = key.trim();
        let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
        insert(&mut entries, full, value.trim(), line_no)?;
    }
    for (k, ov) in overrides.iter().enumerate() {
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| anyhow!("override #{}: expected key=value, got `{ov}`", k + 1))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            bail!("override #{}: unknown key `{key}`", k + 1);
        }
        entries.insert(key.to_string(), (value.trim().to_string(), 0));
    }
    build(&entries, base)
}

fn insert(entries: &mut Entries, key: String, value: &str, line: usize) -> Result<()> {
    if !KEYS.contains(&key.as_str()) {
        bail!("line {line}: unknown key `{key}`");
    }
    if let Some((_, first)) = entries.get(&key) {
        bail!("line {line}: duplicate key `{key}` (first set on line {first})");
    }
    entries.insert(key, (value.to_string(), line));
    Ok(())
}

fn location(line: usize) -> String {
    if line == 0 {
        "override".to_string()
    } else {
        format!("line {line}")
    }
}

fn scalar<T: std::str::FromStr>(entries: &Entries, key: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    entries
        .get(key)
        .map(|(v, line)| {
            v.parse::<T>()
                .map_err(|e| anyhow!("{}: invalid value `{v}` for `{key}`: {e}", location(*line)))
        })
        .transpose()
}

fn parse_surface(value: &str, line: usize, base: &Path) -> Result<SurfaceSpec> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    let bad = || anyhow!("{}: invalid surface `{value}`", location(line));
    match parts.as_slice() {
        ["torus", l1, l2, n1, n2] => Ok(SurfaceSpec::Torus {
            l1: l1.parse().map_err(|_| bad())?,
            l2: l2.parse().map_err(|_| bad())?,
            n1: n1.parse().map_err(|_| bad())?,
            n2: n2.parse().map_err(|_| bad())?,
        }),
        ["sphere", k] => Ok(SurfaceSpec::Sphere {
            subdivisions: k.parse().map_err(|_| bad())?,
        }),
        ["file", path] => Ok(SurfaceSpec::File {
            path: base.join(path),
        }),
        _ => Err(bad()),
    }
}

fn build(entries: &Entries, base: &Path) -> Result<RunConfig> {
    let (surface, line) = entries
        .get("surface")
        .ok_or_else(|| anyhow!("missing required key `surface`"))?;
    let mut cfg = RunConfig::with_surface(parse_surface(surface, *line, base)?);

    if let Some(v) = scalar(entries, "source")? {
        cfg.source = v;
    }
    if let Some(v) = scalar(entries, "m")? {
        cfg.m = v;
    }
    if let Some((v, line)) = entries.get("distance") {
        cfg.distance = match v.as_str() {
            "auto" => DistanceChoice::Auto,
            "analytic" => DistanceChoice::Analytic,
            "fast_marching" => DistanceChoice::FastMarching,
            _ => bail!("{}: distance must be auto, analytic or fast_marching", location(*line)),
        };
    }
    let s = &mut cfg.solver;
    if let Some(v) = scalar(entries, "solver.omega")? {
        s.omega = v;
    }
    if let Some(v) = scalar(entries, "solver.tol_update")? {
        s.tol_update = v;
    }
    if let Some(v) = scalar(entries, "solver.tol_kkt")? {
        s.tol_kkt = v;
    }
    if let Some(v) = scalar(entries, "solver.tol_act_rel")? {
        s.tol_act_rel = v;
    }
    if let Some(v) = scalar(entries, "solver.max_sweeps")? {
        s.max_sweeps = v;
    }
    if let Some((v, line)) = entries.get("detect.theta") {
        cfg.theta = if v == "auto" {
            None
        } else {
            Some(v.parse().map_err(|e| anyhow!("{}: invalid theta `{v}`: {e}", location(*line)))?)
        };
    }
    if let Some((v, line)) = entries.get("barrier.a") {
        cfg.barrier_a = v
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| anyhow!("{}: invalid barrier.a `{v}`: {e}", location(*line)))?;
    }
    if let Some((v, line)) = entries.get("barrier.points") {
        cfg.barrier_points = v
            .split(';')
            .map(|p| {
                let xy: Vec<f64> = p
                    .split_whitespace()
                    .map(str::parse)
                    .collect::<std::result::Result<_, _>>()
                    .ok()?;
                (xy.len() == 2).then(|| [xy[0], xy[1]])
            })
            .collect::<Option<_>>()
            .ok_or_else(|| anyhow!("{}: barrier.points must be `x y; x y; ...`", location(*line)))?;
    }
    if let Some(v) = scalar(entries, "barrier.radius")? {
        cfg.barrier_radius = v;
    }
    if let Some(v) = scalar(entries, "barrier.samples")? {
        cfg.barrier_samples = v;
    }
    if let Some(v) = scalar(entries, "blowup.levels")? {
        cfg.blowup_levels = v;
    }
    if let Some(v) = scalar(entries, "blowup.r_min")? {
        cfg.r_min = v;
    }
    if let Some(v) = scalar(entries, "blowup.r_max")? {
        cfg.r_max = v;
    }
    if let Some(v) = scalar(entries, "smooth.passes")? {
        cfg.passes = v;
    }
    cfg.validate()?;
    Ok(cfg)
}
