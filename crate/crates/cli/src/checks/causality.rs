use descent_core::lattice::*;
use descent_core::{Embedding, Pt, PointSet, Region, Result, Spacetime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{backend_name, first, lattices, Outcome};
use crate::scenario::Resolved;

pub fn default_lattices() -> Vec<Spacetime> {
    vec![Spacetime::plane(0, 8).with_span(0, 8), Spacetime::cylinder(6, 0, 7).expect("c >= 3")]
}

/// Hull of 1..=5 random points of the window.
pub fn random_hull(st: &Spacetime, rng: &mut ChaCha8Rng) -> Region {
    let k = rng.gen_range(1..=5);
    let (t0, t1) = st.window;
    let (x0, x1) = st.span;
    let v: Vec<Pt> = (0..k)
        .map(|_| st.norm(Pt::new(rng.gen_range(t0..=t1), rng.gen_range(x0..=x1))))
        .collect();
    Region::Set(hull(st, &PointSet::from_vec(v)))
}

/// All diamonds of the window followed by the seeded hulls.
fn corpus(st: &Spacetime, hulls: usize, seed: u64) -> (Vec<Region>, Vec<Region>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hs = (0..hulls).map(|_| random_hull(st, &mut rng)).collect();
    (all_diamonds(st), hs)
}

/// Runs `cmp(D(U), U'')` over the corpus; returns per-lattice detail.
fn compare(ctx: &Resolved, cmp: fn(&Region, &Region) -> bool, what: &str) -> Result<Outcome> {
    let mut witness = None;
    let mut rows = Vec::new();
    let mut ok = true;
    for st in lattices(ctx, default_lattices()) {
        let (ds, hs) = corpus(&st, ctx.scenario.universe.hulls, ctx.scenario.seed);
        let mut bad = [0usize; 2];
        for (k, set) in [&ds, &hs].into_iter().enumerate() {
            for u in set {
                let d = cauchy_development(&st, u)?;
                let dc = double_complement(&st, u)?;
                if !cmp(&d, &dc) {
                    bad[k] += 1;
                    first(&mut witness, || format!("{}: {what} fails for U = {}", backend_name(&st), u.label()));
                }
            }
        }
        ok &= bad == [0, 0];
        rows.push(json!({
            "lattice": backend_name(&st),
            "diamonds": ds.len(),
            "diamond_mismatches": bad[0],
            "hulls": hs.len(),
            "hull_mismatches": bad[1],
        }));
    }
    Ok(Outcome::new(ok, witness, json!({ "lattices": rows })))
}

pub fn double_complement_agrees(ctx: &Resolved) -> Result<Outcome> {
    compare(ctx, |d, dc| d == dc, "D(U) = U''")
}

pub fn development_inside_complement(ctx: &Resolved) -> Result<Outcome> {
    compare(ctx, |d, dc| d.is_subset(dc), "D(U) in U''")
}

/// Sub-lattice embeddings of a lattice: a few D-stable and non-D-stable images.
fn sub_embeddings(st: &Spacetime) -> Result<Vec<Embedding>> {
    let (t0, t1) = st.window;
    let mid = match st.backend {
        descent_core::Backend::Plane => (st.span.0 + st.span.1) / 2,
        descent_core::Backend::Cylinder(_) => 0,
    };
    let h = (t1 - t0).min(6);
    let mut regions = vec![
        diamond(st, Pt::new(t0, mid), Pt::new(t0 + h, mid), false)?,
        diamond(st, Pt::new(t0, mid), Pt::new(t0 + h - 2, mid + 2), false)?,
    ];
    if st.circumference().is_some() {
        regions.push(slab(st, t0 + 1, t0 + 3)?);
    } else {
        let band = diamond(st, Pt::new(t0, mid), Pt::new(t0 + h, mid), false)?;
        let pts: Vec<Pt> = band.points()?.iter().filter(|p| p.t >= t0 + 1 && p.t <= t0 + 3).copied().collect();
        regions.push(st.region(pts)?);
    }
    regions
        .iter()
        .map(|r| Ok(Embedding::new(st.sub(r)?, st.clone(), 0, 0)))
        .collect()
}

/// Structural facts about developments, hulls and embeddings.
pub fn lemmas(ctx: &Resolved) -> Result<Outcome> {
    let mut witness = None;
    let mut rows = Vec::new();
    let mut ok = true;
    for st in lattices(ctx, default_lattices()) {
        let (ds, hs) = corpus(&st, ctx.scenario.universe.hulls, ctx.scenario.seed);
        let mut n = [0usize; 6];
        let fail = |k: usize, msg: String, n: &mut [usize; 6], w: &mut Option<String>| {
            n[k] += 1;
            first(w, || format!("{}: {msg}", backend_name(&st)));
        };
        let mut checked = 0;
        for u in ds.iter().chain(&hs) {
            checked += 1;
            let d = cauchy_development(&st, u)?;
            if !u.is_subset(&d) {
                fail(0, format!("U not in D(U) for {}", u.label()), &mut n, &mut witness);
            }
            if d.is_relatively_compact() && cauchy_development(&st, &d)? != d {
                fail(1, format!("D not idempotent at {}", u.label()), &mut n, &mut witness);
            }
            if !is_causally_convex(&st, u) || hull_region(&st, u) != *u {
                fail(2, format!("hull does not fix the convex region {}", u.label()), &mut n, &mut witness);
            }
            if d.is_relatively_compact() && !is_causally_convex(&st, &d) {
                fail(3, format!("D(U) not convex for {}", u.label()), &mut n, &mut witness);
            }
        }
        let embs = sub_embeddings(&st)?;
        let mut emb_checks = 0;
        for f in &embs {
            if !f.check_loc_morphism() {
                fail(4, format!("{} is not a morphism", f.image().label()), &mut n, &mut witness);
            }
            for u in all_diamonds(&f.source) {
                emb_checks += 1;
                if !f.verify_development_restriction(&u)? || !f.verify_development_containment(&u)? {
                    fail(5, format!("embedding of {} breaks at {}", f.image().label(), u.label()), &mut n, &mut witness);
                }
            }
        }
        ok &= n.iter().all(|&k| k == 0);
        rows.push(json!({
            "lattice": backend_name(&st),
            "regions": checked,
            "contains_failures": n[0],
            "idempotence_failures": n[1],
            "hull_failures": n[2],
            "convexity_failures": n[3],
            "embeddings": embs.len(),
            "embedding_checks": emb_checks,
            "morphism_failures": n[4],
            "embedding_failures": n[5],
        }));
    }
    Ok(Outcome::new(ok, witness, json!({ "lattices": rows })))
}
