//! Curated scenarios with pinned seeds.

use descent_core::site::Flavor;

use crate::scenario::{CoverSpec, RegionSpec, Scenario, SpacetimeSpec};

pub const NAMES: [&str; 4] = ["kg-descent", "counterexamples", "localization-oracle", "cover-extension"];

fn dia(b: (i64, i64), t: (i64, i64)) -> RegionSpec {
    RegionSpec::Diamond { bottom: b, top: t }
}

/// Three covers, both flavors: four corner diamonds plus a central one, a
/// two-by-two light-cone grid, and the same grid on a cylinder.
fn kg_descent() -> Scenario {
    let mut s = Scenario::new("demo-kg-descent", &["kg.descent"]);
    s.spacetimes = vec![SpacetimeSpec::plane((0, 8), (-8, 8)), SpacetimeSpec::cylinder(12, (0, 8))];
    let both = vec![Flavor::Plain, Flavor::Localized];
    s.covers = vec![
        CoverSpec {
            spacetime: 0,
            base: dia((0, 0), (8, 0)),
            pieces: vec![dia((0, 0), (6, -2)), dia((0, 0), (6, 2)), dia((2, -2), (8, 0)), dia((2, 2), (8, 0)), dia((2, 0), (6, 0))],
            target: None,
            flavors: both.clone(),
        },
        CoverSpec {
            spacetime: 0,
            base: dia((0, 0), (8, 0)),
            pieces: vec![dia((0, 0), (4, 0)), dia((1, -1), (6, -2)), dia((1, 1), (6, 2)), dia((2, 0), (8, 0))],
            target: None,
            flavors: both.clone(),
        },
        CoverSpec {
            spacetime: 1,
            base: dia((0, 0), (8, 0)),
            pieces: vec![dia((0, 0), (4, 0)), dia((1, 11), (6, 10)), dia((1, 1), (6, 2)), dia((2, 0), (8, 0))],
            target: None,
            flavors: both,
        },
    ];
    s
}

pub fn scenario(name: &str) -> Option<Scenario> {
    Some(match name {
        "kg-descent" => kg_descent(),
        "counterexamples" => Scenario::new(
            "demo-counterexamples",
            &["aqft.prestack-failure", "aqft.epsilon-pullback", "kg.negative-control", "kg.thin-overlap", "site.refuse-non-d-stable"],
        ),
        "localization-oracle" => Scenario::new("demo-localization-oracle", &["site.localization-oracle"]),
        "cover-extension" => Scenario::new("demo-cover-extension", &["cover.extension"]),
        _ => return None,
    })
}
