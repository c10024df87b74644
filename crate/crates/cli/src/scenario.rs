//! Scenario files: versioned JSON run descriptions.

use std::path::Path;

use descent_core::lattice::{diamond, slab};
use descent_core::linalg::{parse_q, Q};
use descent_core::site::{Cover, Flavor};
use descent_core::{Pt, Region, Spacetime};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;
pub const MARGIN_ENV: &str = "DESCENT_WB_MARGIN";

/// A configuration problem; maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendSpec {
    Plane,
    Cylinder,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacetimeSpec {
    pub backend: BackendSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circumference: Option<i64>,
    pub window: (i64, i64),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<i64>,
}

impl SpacetimeSpec {
    pub fn plane(window: (i64, i64), span: (i64, i64)) -> Self {
        SpacetimeSpec { backend: BackendSpec::Plane, circumference: None, window, span: Some(span), margin: None }
    }

    pub fn cylinder(c: i64, window: (i64, i64)) -> Self {
        SpacetimeSpec { backend: BackendSpec::Cylinder, circumference: Some(c), window, span: None, margin: None }
    }

    pub fn build(&self) -> Result<Spacetime, ConfigError> {
        let (t0, t1) = self.window;
        if t1 < t0 {
            return Err(ConfigError(format!("empty window {t0}..{t1}")));
        }
        let st = match self.backend {
            BackendSpec::Plane => {
                if self.circumference.is_some() {
                    return Err(ConfigError("plane takes no circumference".into()));
                }
                let (x0, x1) = self.span.unwrap_or((t0, t1));
                Spacetime::plane(t0, t1).with_span(x0, x1)
            }
            BackendSpec::Cylinder => {
                let c = self
                    .circumference
                    .ok_or_else(|| ConfigError("cylinder needs a circumference".into()))?;
                Spacetime::cylinder(c, t0, t1).map_err(|e| ConfigError(e.to_string()))?
            }
        };
        Ok(st.with_margin(self.margin))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionSpec {
    Full,
    Diamond { bottom: (i64, i64), top: (i64, i64) },
    Slab((i64, i64)),
    Points(Vec<(i64, i64)>),
}

impl RegionSpec {
    pub fn build(&self, st: &Spacetime) -> Result<Region, ConfigError> {
        let r = match self {
            RegionSpec::Full => Ok(Region::Full),
            RegionSpec::Diamond { bottom, top } => {
                diamond(st, Pt::new(bottom.0, bottom.1), Pt::new(top.0, top.1), false)
            }
            RegionSpec::Slab((a, b)) => slab(st, *a, *b),
            RegionSpec::Points(v) => st.region(v.iter().map(|&(t, x)| Pt::new(t, x))),
        };
        r.map_err(|e| ConfigError(e.to_string()))
    }
}

/// An explicit descent instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    /// Index into `spacetimes`.
    #[serde(default)]
    pub spacetime: usize,
    pub base: RegionSpec,
    pub pieces: Vec<RegionSpec>,
    /// Region to test; defaults to the base.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RegionSpec>,
    #[serde(default = "both_flavors")]
    pub flavors: Vec<Flavor>,
}

fn both_flavors() -> Vec<Flavor> {
    vec![Flavor::Plain, Flavor::Localized]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UniverseSpec {
    /// Seeded universes for the localization oracle.
    pub universes: usize,
    /// Region cap per sampled universe.
    pub max_universe: usize,
    /// Random hulls for the causality checks.
    pub hulls: usize,
}

impl Default for UniverseSpec {
    fn default() -> Self {
        UniverseSpec { universes: 20, max_universe: 40, hulls: 200 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AqftSpec {
    /// Klein-Gordon mass squared as an exact rational.
    pub mass2: String,
    /// `k` in the indicator algebra `Q^k`.
    pub algebra_dim: usize,
    /// Seeded fields per Green's-operator property.
    pub fields: usize,
}

impl Default for AqftSpec {
    fn default() -> Self {
        AqftSpec { mass2: "1/4".into(), algebra_dim: 2, fields: 100 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the built-in lattices of the lattice-generic checks.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spacetimes: Vec<SpacetimeSpec>,
    #[serde(default)]
    pub universe: UniverseSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverSpec>,
    #[serde(default)]
    pub aqft: AqftSpec,
    pub checks: Vec<String>,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Scenario {
    pub fn new(name: &str, checks: &[&str]) -> Self {
        Scenario {
            schema: SCHEMA,
            name: name.into(),
            seed: 0,
            spacetimes: Vec::new(),
            universe: UniverseSpec::default(),
            covers: Vec::new(),
            aqft: AqftSpec::default(),
            checks: checks.iter().map(|s| s.to_string()).collect(),
            output: OutputSpec::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Scenario, ConfigError> {
        let s: Scenario = serde_json::from_str(text)
            .map_err(|e| ConfigError(format!("line {} column {}: {e}", e.line(), e.column())))?;
        if s.schema != SCHEMA {
            return Err(ConfigError(format!("unsupported schema {} (expected {SCHEMA})", s.schema)));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Scenario, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Scenario::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }
}

/// Command-line overrides applied on top of a scenario.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub window: Option<(i64, i64)>,
    pub max_universe: Option<usize>,
    pub margin: Option<i64>,
}

/// Parses `t0..t1`.
pub fn parse_window(s: &str) -> Result<(i64, i64), ConfigError> {
    let bad = || ConfigError(format!("window must look like t0..t1, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if b < a {
        return Err(bad());
    }
    Ok((a, b))
}

/// Reads the margin override from the environment, if set.
pub fn margin_from_env() -> Result<Option<i64>, ConfigError> {
    match std::env::var(MARGIN_ENV) {
        Ok(v) => v
            .trim()
            .parse::<i64>()
            .ok()
            .filter(|m| *m >= 0)
            .map(Some)
            .ok_or_else(|| ConfigError(format!("{MARGIN_ENV} must be a non-negative integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// A scenario with overrides applied and every spacetime built.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub scenario: Scenario,
    pub spacetimes: Vec<Spacetime>,
    pub covers: Vec<ResolvedCover>,
    pub mass2: Q,
    pub window: Option<(i64, i64)>,
    pub margin: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct ResolvedCover {
    pub name: String,
    pub spacetime: Spacetime,
    pub cover: Cover,
    pub target: Region,
    pub flavors: Vec<Flavor>,
}

impl Resolved {
    pub fn config_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(&self.scenario).expect("scenario serializes");
        v["resolved_margin"] = serde_json::json!(self.margin);
        v
    }
}

pub fn resolve(mut s: Scenario, o: &Overrides) -> Result<Resolved, ConfigError> {
    if let Some(seed) = o.seed {
        s.seed = seed;
    }
    if let Some(m) = o.max_universe {
        s.universe.max_universe = m;
    }
    if let Some(w) = o.window {
        for sp in &mut s.spacetimes {
            sp.window = w;
        }
    }
    if let Some(m) = o.margin {
        for sp in &mut s.spacetimes {
            sp.margin.get_or_insert(m);
        }
    }
    if s.checks.is_empty() {
        return Err(ConfigError("scenario lists no checks".into()));
    }
    for id in &s.checks {
        if crate::registry::lookup(id).is_none() {
            return Err(ConfigError(format!("unknown check id {id:?}")));
        }
    }
    let mass2 = parse_q(&s.aqft.mass2).map_err(|e| ConfigError(format!("aqft.mass2: {e}")))?;
    if s.aqft.algebra_dim == 0 {
        return Err(ConfigError("aqft.algebra_dim must be positive".into()));
    }
    let spacetimes = s
        .spacetimes
        .iter()
        .enumerate()
        .map(|(i, sp)| sp.build().map_err(|e| ConfigError(format!("spacetimes[{i}]: {}", e.0))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut covers = Vec::new();
    for (i, c) in s.covers.iter().enumerate() {
        let here = |e: ConfigError| ConfigError(format!("covers[{i}]: {}", e.0));
        let st = spacetimes
            .get(c.spacetime)
            .ok_or_else(|| here(ConfigError(format!("no spacetime {}", c.spacetime))))?
            .clone();
        let base = c.base.build(&st).map_err(here)?;
        let pieces = c.pieces.iter().map(|p| p.build(&st)).collect::<Result<Vec<_>, _>>().map_err(here)?;
        let target = match &c.target {
            Some(t) => t.build(&st).map_err(here)?,
            None => base.clone(),
        };
        let cover = Cover::new(base, pieces);
        cover.validate(&st).map_err(|e| here(ConfigError(e.to_string())))?;
        covers.push(ResolvedCover { name: format!("covers[{i}]"), spacetime: st, cover, target, flavors: c.flavors.clone() });
    }
    Ok(Resolved { window: o.window, margin: o.margin, scenario: s, spacetimes, covers, mass2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected_with_a_location() {
        let e = Scenario::parse("{\"schema\": 1, \"name\": \"x\", \"checks\": [], \"bogus\": 3}").unwrap_err();
        assert!(e.0.contains("line 1"), "{e}");
        assert!(e.0.contains("bogus"), "{e}");
    }

    #[test]
    fn truncated_input_is_a_config_error() {
        let e = Scenario::parse("{\"schema\": 1, \"name\": \"x\", \"chec").unwrap_err();
        assert!(e.0.starts_with("line 1"), "{e}");
    }

    #[test]
    fn windows_parse() {
        assert_eq!(parse_window("0..8").unwrap(), (0, 8));
        assert_eq!(parse_window("-3..2").unwrap(), (-3, 2));
        assert!(parse_window("4..1").is_err());
        assert!(parse_window("4").is_err());
    }

    #[test]
    fn region_specs_roundtrip() {
        let r = RegionSpec::Diamond { bottom: (0, 0), top: (4, 0) };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, "{\"diamond\":{\"bottom\":[0,0],\"top\":[4,0]}}");
        assert_eq!(serde_json::from_str::<RegionSpec>("\"full\"").unwrap(), RegionSpec::Full);
    }
}
