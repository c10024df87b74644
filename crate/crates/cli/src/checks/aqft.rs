use descent_core::algebra::{brute_force_hom_count, AlgebraValue, Table};
use descent_core::aqft::*;
use descent_core::descent::{prestack_failure_demo, PrestackVariant};
use descent_core::lattice::{diamond, slab};
use descent_core::site::{enumerate_universe, Flavor, Site, SiteKind, UniverseConfig};
use descent_core::{Embedding, Pt, Region, Result, Spacetime};
use serde_json::json;

use super::{first, Outcome};
use crate::scenario::Resolved;

/// Verdict is the prestack condition itself, which fails in every variant.
pub fn prestack_failure(ctx: &Resolved) -> Result<Outcome> {
    let k = ctx.scenario.aqft.algebra_dim;
    let table = Table::qpower(k);
    let brute = brute_force_hom_count(&table, &table);
    let mut rows = Vec::new();
    let mut holds = true;
    let mut witness = None;
    for v in PrestackVariant::ALL {
        let row = prestack_failure_demo(v, k)?;
        if row.exhibits_failure() {
            holds = false;
            first(&mut witness, || format!("{}: {} site homs vs {} descent homs", row.variant, row.site_homs, row.descent_homs));
        }
        rows.push(json!({
            "variant": row.variant,
            "site_homs": row.site_homs.to_string(),
            "descent_homs": row.descent_homs.to_string(),
            "pieces_initial": row.pieces_initial,
        }));
    }
    Ok(Outcome::new(holds, witness, json!({ "algebra_dim": k, "brute_force_homs": brute, "variants": rows })))
}

/// Verdict is the counit iso for the pulled-back indicator at `Full`.
pub fn epsilon_pullback(ctx: &Resolved) -> Result<Outcome> {
    let k = ctx.scenario.aqft.algebra_dim;
    let st = Spacetime::plane(0, 6).with_span(-4, 4);
    let cfg = UniverseConfig::default();
    let n = Site::new(&st, SiteKind::COpen, Flavor::Plain, enumerate_universe(&st, SiteKind::COpen, &cfg)?)?;
    let m_region = diamond(&st, Pt::new(1, 0), Pt::new(5, 0), false)?;
    let mst = st.sub(&m_region)?;
    let m = Site::new(&mst, SiteKind::COpen, Flavor::Plain, enumerate_universe(&mst, SiteKind::COpen, &cfg)?)?;
    let f = Embedding::new(mst, st.clone(), 0, 0);
    let a = build_indicator(&n, &Predicate::ContainsImage(f.image()), AlgebraValue::qpower(k))?;
    let mut on_n = 0;
    for v in 0..n.len() {
        if epsilon_iso_check(&n, &a, v)?.is_iso() {
            on_n += 1;
        }
    }
    let pb = pullback(&f, &m, &n, &a)?;
    let full = m.index(&Region::Full)?;
    let e = epsilon_iso_check(&m, &pb, full)?;
    let iso = e.is_iso();
    Ok(Outcome::new(
        iso,
        (!iso).then(|| format!("pullback at Full: colimit {} vs value {}", e.colimit.label(), e.value.label())),
        json!({
            "regions_on_n": n.len(),
            "iso_on_n": on_n,
            "full_value": e.value.label(),
            "full_colimit": e.colimit.label(),
            "colimit_initial": e.colimit.is_initial(),
            "diagram_size": e.diagram_size,
        }),
    ))
}

fn small_universe(st: &Spacetime, regions: &[((i64, i64), (i64, i64))]) -> Result<Vec<Region>> {
    regions
        .iter()
        .map(|&(b, t)| diamond(st, Pt::new(b.0, b.1), Pt::new(t.0, t.1), false))
        .collect()
}

/// Restriction along sub-lattices and translations (plane) and rotations
/// (cylinder), with the composite of two of them.
pub fn point_family(ctx: &Resolved, perturb: Option<usize>) -> Result<PointFamily> {
    let m2 = ctx.mass2.clone();
    let n = Spacetime::plane(0, 8).with_span(-6, 6);
    let dom = diamond(&n, Pt::new(0, 0), Pt::new(6, 0), false)?;
    let sub = n.sub(&dom)?;
    let shapes = [((0, 0), (2, 0)), ((0, 0), (4, 0)), ((1, -1), (4, 0)), ((2, 0), (6, 0)), ((0, 0), (6, 0))];
    let u_sub = small_universe(&sub, &shapes)?;
    let u_n = small_universe(&n, &[((0, 0), (2, 0)), ((1, 1), (5, 1)), ((2, 1), (4, 1)), ((1, 1), (7, 1))])?;
    let cyl = Spacetime::cylinder(6, 0, 5)?;
    let mut u_c = small_universe(&cyl, &[((0, 0), (2, 0)), ((1, 1), (4, 2))])?;
    u_c.push(slab(&cyl, 1, 2)?);
    u_c.push(slab(&cyl, 1, 3)?);
    let members = vec![
        member("sub", &sub, m2.clone(), u_sub),
        member("plane", &n, m2.clone(), u_n),
        member("cylinder", &cyl, m2, u_c),
    ];
    let embeddings = vec![
        (0, 1, Embedding::new(sub.clone(), n.clone(), 0, 0)),
        (1, 1, Embedding::new(n.clone(), n.clone(), 0, 0)),
        (1, 1, Embedding::new(n.clone(), n.clone(), 0, 1)),
        (2, 2, Embedding::new(cyl.clone(), cyl.clone(), 0, 2)),
        (2, 2, Embedding::new(cyl.clone(), cyl.clone(), 0, 4)),
        (0, 1, Embedding::new(sub, n, 0, 1)),
    ];
    Ok(PointFamily { members, embeddings, composites: vec![(3, 3, 4), (0, 2, 5), (0, 1, 0)], perturb })
}

pub fn point_family_check(ctx: &Resolved) -> Result<Outcome> {
    let coherent = point_family(ctx, None)?.verify_point()?;
    let perturbed = point_family(ctx, Some(2))?.verify_point()?;
    let components = match &coherent {
        PointVerdict::Coherent { components } => Some(*components),
        PointVerdict::Defect(_) => None,
    };
    let caught = match &perturbed {
        PointVerdict::Defect(d) => Some(d.clone()),
        PointVerdict::Coherent { .. } => None,
    };
    let ok = components.is_some() && caught.is_some();
    let witness = match (&coherent, &caught) {
        (PointVerdict::Defect(d), _) => Some(d.clone()),
        (_, None) => Some("sign-flipped component went unnoticed".into()),
        _ => None,
    };
    Ok(Outcome::new(ok, witness, json!({ "components": components, "perturbed_defect": caught })))
}
