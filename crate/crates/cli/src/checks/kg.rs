use std::collections::BTreeMap;

use descent_core::descent::*;
use descent_core::kg::{property_suite, time_slice_suite, KgModel};
use descent_core::lattice::slab;
use descent_core::linalg::{q, qf, Q};
use descent_core::site::{enumerate_universe, find_refinement, Cover, Flavor, SiteKind, UniverseConfig};
use descent_core::{Pt, Region, Result, Spacetime};
use serde_json::{json, Value};

use super::corpus::{kg_corpus, Family};
use super::{backend_name, first, lattices, Outcome};
use crate::scenario::Resolved;

pub fn property_lattices() -> Vec<(Spacetime, Q)> {
    vec![
        (Spacetime::plane(-10, 10).with_span(-10, 10), qf(1, 4)),
        (Spacetime::plane(-10, 10).with_span(-10, 10), q(0)),
        (Spacetime::cylinder(5, -10, 10).expect("c >= 3"), qf(1, 4)),
        (Spacetime::cylinder(7, -10, 10).expect("c >= 3"), q(0)),
    ]
}

pub fn properties(ctx: &Resolved) -> Result<Outcome> {
    let configs: Vec<(Spacetime, Q)> = if ctx.spacetimes.is_empty() {
        property_lattices()
    } else {
        ctx.spacetimes.iter().map(|s| (s.clone(), ctx.mass2.clone())).collect()
    };
    let mut witness = None;
    let mut rows = Vec::new();
    let mut min_total = usize::MAX;
    let mut bad = 0;
    for (i, (st, m2)) in configs.iter().enumerate() {
        let tallies = property_suite(st, m2.clone(), ctx.scenario.aqft.fields, ctx.scenario.seed + 40 + i as u64)?;
        let mut props = serde_json::Map::new();
        for t in &tallies {
            bad += t.failures;
            min_total = min_total.min(t.total);
            if let Some(f) = &t.first_failure {
                first(&mut witness, || format!("{}: {} fails on {f}", backend_name(st), t.name));
            }
            props.insert(t.name.to_string(), json!({ "total": t.total, "failures": t.failures }));
        }
        rows.push(json!({ "lattice": backend_name(st), "mass2": m2.to_string(), "properties": props }));
    }
    Ok(Outcome::new(bad == 0, witness, json!({ "fields": ctx.scenario.aqft.fields, "min_total": min_total, "lattices": rows })))
}

pub fn time_slice(ctx: &Resolved) -> Result<Outcome> {
    let cfg = UniverseConfig { bands: true, hulls: 30, max_hull_seed: 3, seed: ctx.scenario.seed + 5, ..Default::default() };
    let defaults = vec![Spacetime::plane(0, 5).with_span(-3, 3), Spacetime::cylinder(5, 0, 4)?];
    let mut witness = None;
    let mut rows = Vec::new();
    let mut ok = true;
    for st in lattices(ctx, defaults) {
        let u = enumerate_universe(&st, SiteKind::Rc, &cfg)?;
        let mut m = KgModel::new(&st, ctx.mass2.clone());
        let t = time_slice_suite(&mut m, &u)?;
        ok &= t.failures == 0 && t.cauchy_pairs > 0;
        if let Some(f) = &t.first_failure {
            first(&mut witness, || format!("{}: {f}", backend_name(&st)));
        }
        rows.push(json!({
            "lattice": backend_name(&st),
            "regions": t.regions,
            "data_complete": t.data_complete,
            "cauchy_pairs": t.cauchy_pairs,
            "failures": t.failures,
            "incomplete_examples": t.incomplete_examples.len(),
        }));
    }
    if ok && witness.is_none() && rows.iter().any(|r| r["cauchy_pairs"] == 0) {
        witness = Some("a lattice has no Cauchy pairs".into());
    }
    Ok(Outcome::new(ok, witness, json!({ "lattices": rows })))
}

/// Result of one descent instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceVerdict {
    /// Precondition fails; the reason names the offending point or piece.
    Skip(String),
    Pass,
    Fail(String),
}

/// Both counit checks, without the thickness gate.
pub fn counit_checks(model: &mut KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<std::result::Result<(), String>> {
    let g = generator_counit_check(model, cover, u, flavor)?;
    if !g.exact {
        return Ok(Err(format!("generator coequalizer not exact: {}", g.witness.unwrap_or_default())));
    }
    if g.kernel_sum == Some(false) {
        return Ok(Err("kernel-sum cross-check disagrees".into()));
    }
    let r = relation_counit_check(model, cover, u, flavor, true)?;
    if !r.equal || !r.consistent {
        return Ok(Err(format!("relation span rank {} of {}: {}", r.rank, r.expected, r.witness.unwrap_or_default())));
    }
    Ok(Ok(()))
}

pub fn run_instance(model: &mut KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<InstanceVerdict> {
    let st = model.site_st.clone();
    if flavor == Flavor::Localized && !cover.is_d_stable(&st)? {
        return Ok(InstanceVerdict::Skip("cover is not D-stable".into()));
    }
    if let Some(p) = stencil_thickness(model, cover, u, flavor)? {
        return Ok(InstanceVerdict::Skip(format!("not stencil-thick at {p}")));
    }
    Ok(match counit_checks(model, cover, u, flavor)? {
        Ok(()) => InstanceVerdict::Pass,
        Err(e) => InstanceVerdict::Fail(e),
    })
}

#[derive(Default)]
struct Tally {
    pass: usize,
    skip: usize,
    fail: usize,
}

fn flavor_key(st: &Spacetime, f: Flavor) -> String {
    let b = match st.backend {
        descent_core::Backend::Plane => "plane",
        descent_core::Backend::Cylinder(_) => "cylinder",
    };
    format!("{f:?}/{b}").to_lowercase()
}

pub fn descent(ctx: &Resolved) -> Result<Outcome> {
    let mut tallies: BTreeMap<String, Tally> = BTreeMap::new();
    let mut witness = None;
    let mut rows: Vec<Value> = Vec::new();
    let mut record = |name: String, st: &Spacetime, flavor: Flavor, v: InstanceVerdict, rows: &mut Vec<Value>| {
        let t = tallies.entry(flavor_key(st, flavor)).or_default();
        let (tag, why) = match v {
            InstanceVerdict::Pass => {
                t.pass += 1;
                ("pass", None)
            }
            InstanceVerdict::Skip(w) => {
                t.skip += 1;
                ("skip", Some(w))
            }
            InstanceVerdict::Fail(w) => {
                t.fail += 1;
                first(&mut witness, || format!("{name}: {w}"));
                ("fail", Some(w))
            }
        };
        rows.push(json!({ "instance": name, "verdict": tag, "reason": why }));
    };
    if ctx.covers.is_empty() {
        for fam in kg_corpus(&ctx.mass2)? {
            let mut model = KgModel::new(&fam.st, fam.mass2.clone());
            for inst in fam.instances() {
                let v = run_instance(&mut model, inst.cover(), &inst.target, inst.flavor)?;
                record(inst.name(), &fam.st, inst.flavor, v, &mut rows);
            }
        }
    } else {
        for rc in &ctx.covers {
            let mut model = KgModel::new(&rc.spacetime, ctx.mass2.clone());
            for &flavor in &rc.flavors {
                let v = run_instance(&mut model, &rc.cover, &rc.target, flavor)?;
                record(format!("{} / {flavor:?}", rc.name), &rc.spacetime, flavor, v, &mut rows);
            }
        }
    }
    let fails: usize = tallies.values().map(|t| t.fail).sum();
    let passed = |f: &str| -> usize { tallies.iter().filter(|(k, _)| k.starts_with(f)).map(|(_, t)| t.pass).sum() };
    let summary: serde_json::Map<String, Value> = tallies
        .iter()
        .map(|(k, t)| (k.clone(), json!({ "pass": t.pass, "skip": t.skip, "fail": t.fail })))
        .collect();
    let detail = json!({
        "plain_passed": passed("plain"),
        "localized_passed": passed("localized"),
        "by_flavor": summary,
        "instances": rows,
    });
    Ok(Outcome::new(fails == 0, witness, detail))
}

/// Two causally disjoint singletons; σ-relations withheld.
pub fn negative_control(ctx: &Resolved) -> Result<Outcome> {
    let st = Spacetime::plane(0, 4).with_span(-4, 4);
    let mut m = KgModel::new(&st, ctx.mass2.clone());
    let p = st.region([Pt::new(2, -1)])?;
    let r = st.region([Pt::new(2, 1)])?;
    let u = st.region([Pt::new(2, -1), Pt::new(2, 1)])?;
    let cover = Cover::new(u.clone(), vec![p, r]);
    let g = generator_counit_check(&mut m, &cover, &u, Flavor::Plain)?;
    let without = relation_counit_check(&mut m, &cover, &u, Flavor::Plain, false)?;
    let with = relation_counit_check(&mut m, &cover, &u, Flavor::Plain, true)?;
    let detected = g.exact && !without.equal && without.witness.is_some() && with.equal;
    Ok(Outcome::new(
        detected,
        without.witness.clone(),
        json!({
            "generators_exact": g.exact,
            "rank_without_perp": without.rank,
            "rank_with_perp": with.rank,
            "expected_rank": with.expected,
            "strict_inclusion": !without.equal,
        }),
    ))
}

/// A two-slab cover overlapping in one row. The verdict is exactness, which fails.
pub fn thin_overlap(ctx: &Resolved) -> Result<Outcome> {
    let st = Spacetime::cylinder(6, 0, 7)?;
    let mut m = KgModel::new(&st, ctx.mass2.clone());
    let base = slab(&st, 0, 5)?;
    let thin = Cover::new(base.clone(), vec![slab(&st, 0, 2)?, slab(&st, 2, 5)?]);
    let gate = stencil_thickness(&m, &thin, &base, Flavor::Plain)?;
    let g = generator_counit_check(&mut m, &thin, &base, Flavor::Plain)?;
    Ok(Outcome::new(
        g.exact,
        g.witness.clone(),
        json!({
            "thick": gate.is_none(),
            "kernel_sum": g.kernel_sum,
            "dim_target": g.dim_target,
            "dim_pieces": g.dim_pieces,
            "dim_overlaps": g.dim_overlaps,
        }),
    ))
}

/// All `(fine, coarse)` cover pairs of one family where `fine` refines `coarse`.
fn refinement_pairs(fam: &Family) -> Vec<(usize, usize)> {
    let n = fam.covers.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && find_refinement(&fam.covers[i].1, &fam.covers[j].1).is_some() {
                out.push((i, j));
            }
        }
    }
    out
}

/// Over the whole descent corpus: passing on a refinement implies passing on
/// the coarser cover. Verdicts are computed once per instance; a sample of
/// pairs is re-run through the core harness.
pub fn finer_coarser(ctx: &Resolved) -> Result<Outcome> {
    let mut witness = None;
    let mut pairs = 0;
    let mut premises = 0;
    let mut violations = 0;
    let mut harness_runs = 0;
    for fam in kg_corpus(&ctx.mass2)? {
        let mut model = KgModel::new(&fam.st, fam.mass2.clone());
        let refs = refinement_pairs(&fam);
        for (flavor, targets) in [(Flavor::Plain, &fam.plain_targets), (Flavor::Localized, &fam.localized_targets)] {
            let mut pass = vec![vec![false; targets.len()]; fam.covers.len()];
            for (c, (_, cover)) in fam.covers.iter().enumerate() {
                if flavor == Flavor::Localized && !cover.is_d_stable(&fam.st)? {
                    continue;
                }
                for (k, u) in targets.iter().enumerate() {
                    pass[c][k] = counit_checks(&mut model, cover, u, flavor)?.is_ok();
                }
            }
            for &(i, j) in &refs {
                pairs += 1;
                for (k, u) in targets.iter().enumerate() {
                    if pass[i][k] {
                        premises += 1;
                        if !pass[j][k] {
                            violations += 1;
                            first(&mut witness, || {
                                format!("{}: {} passes, {} fails at {}", fam.name, fam.covers[i].0, fam.covers[j].0, u.label())
                            });
                        }
                    }
                }
            }
            // The harness itself on the pairs whose coarse side is the trivial split.
            for &(i, j) in refs.iter().filter(|(_, j)| fam.covers[*j].0.contains("whole")).take(3) {
                if flavor == Flavor::Localized && !fam.covers[i].1.is_d_stable(&fam.st)? {
                    continue;
                }
                let h = finer_coarser_harness(&mut model, &fam.covers[i].1, &fam.covers[j].1, targets, flavor)?;
                harness_runs += 1;
                if let Some(v) = h.violations.first() {
                    violations += 1;
                    first(&mut witness, || format!("{}: harness violation at {v}", fam.name));
                }
            }
        }
    }
    Ok(Outcome::new(
        violations == 0,
        witness,
        json!({ "refinement_pairs": pairs, "premises": premises, "violations": violations, "harness_runs": harness_runs }),
    ))
}
