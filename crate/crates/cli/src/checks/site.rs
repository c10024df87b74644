use descent_core::lattice::{diamond, slab};
use descent_core::site::*;
use descent_core::{Embedding, Error, Pt, Region, Result, Spacetime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{backend_name, first, lattices, Outcome};
use crate::scenario::Resolved;

pub fn default_lattices() -> Vec<Spacetime> {
    vec![Spacetime::plane(0, 6).with_span(0, 6), Spacetime::cylinder(6, 0, 5).expect("c >= 3")]
}

/// A seeded universe closed under the localization hulls, at most `cap` regions.
pub fn sample_universe(st: &Spacetime, seed: u64, cap: usize) -> Result<Vec<Region>> {
    let cfg = UniverseConfig { max_hull_seed: 3, hulls: 20, seed, ..Default::default() };
    let all = enumerate_universe(st, SiteKind::Rc, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = cap.clamp(1, 10);
    for _ in 0..1000 {
        let k = rng.gen_range(hi.min(8).max(1)..=hi);
        let pick: Vec<Region> = (0..k).map(|_| all[rng.gen_range(0..all.len())].clone()).collect();
        if let Ok(u) = close_universe(st, pick, cap) {
            return Ok(u);
        }
    }
    Err(Error::Invalid(format!("no closed universe within cap {cap}")))
}

pub fn localization_oracle(ctx: &Resolved) -> Result<Outcome> {
    let n = ctx.scenario.universe.universes;
    let cap = ctx.scenario.universe.max_universe;
    let mut witness = None;
    let mut rows = Vec::new();
    let mut bad = 0;
    for st in lattices(ctx, default_lattices()) {
        let mut sizes = Vec::new();
        let mut mism = 0;
        for k in 0..n as u64 {
            let u = sample_universe(&st, ctx.scenario.seed.wrapping_mul(1000).wrapping_add(k), cap)?;
            sizes.push(u.len());
            let site = Site::new(&st, SiteKind::Rc, Flavor::Plain, u)?;
            if let Some((a, b)) = compare_localization(&site)? {
                mism += 1;
                first(&mut witness, || format!("{}: universe {k} disagrees on {a} -> {b}", backend_name(&st)));
            }
        }
        bad += mism;
        rows.push(json!({
            "lattice": backend_name(&st),
            "universes": n,
            "max_size": sizes.iter().max(),
            "mismatches": mism,
        }));
    }
    Ok(Outcome::new(bad == 0, witness, json!({ "lattices": rows })))
}

/// Fixed embedding corpus: sub-lattices of both backends, translations and a
/// plane piece placed on a cylinder.
pub fn embedding_corpus() -> Result<Vec<(String, Embedding)>> {
    let mut out = Vec::new();
    let plane = Spacetime::plane(0, 6).with_span(-4, 4);
    let d = |st: &Spacetime, b: (i64, i64), t: (i64, i64)| diamond(st, Pt::new(b.0, b.1), Pt::new(t.0, t.1), false);
    let big = d(&plane, (0, 0), (6, 0))?;
    let band: Vec<Pt> = big.points()?.iter().filter(|p| (1..=3).contains(&p.t)).copied().collect();
    let plane_subs = vec![
        big.clone(),
        d(&plane, (1, 0), (5, 0))?,
        d(&plane, (0, 0), (4, 2))?,
        plane.region(band)?,
    ];
    for r in plane_subs {
        out.push((format!("plane sub-lattice {}", r.label()), Embedding::new(plane.sub(&r)?, plane.clone(), 0, 0)));
    }
    let cyl = Spacetime::cylinder(6, 0, 5)?;
    let cyl_subs = vec![d(&cyl, (0, 0), (4, 0))?, d(&cyl, (1, 2), (5, 2))?, slab(&cyl, 1, 3)?, slab(&cyl, 0, 5)?];
    for r in cyl_subs {
        out.push((format!("cylinder sub-lattice {}", r.label()), Embedding::new(cyl.sub(&r)?, cyl.clone(), 0, 0)));
    }
    let small = Spacetime::plane(0, 3).with_span(-2, 2);
    out.push(("plane translation (1,1)".into(), Embedding::new(small.clone(), plane.clone(), 1, 1)));
    out.push(("plane translation (2,-1)".into(), Embedding::new(small, plane.clone(), 2, -1)));
    out.push(("cylinder rotation 2".into(), Embedding::new(cyl.clone(), cyl.clone(), 0, 2)));
    let wide = Spacetime::plane(0, 5).with_span(0, 6);
    let cyl8 = Spacetime::cylinder(8, 0, 5)?;
    let piece = d(&wide, (0, 2), (4, 2))?;
    out.push(("plane piece on cylinder c=8".into(), Embedding::new(wide.sub(&piece)?, cyl8, 0, 0)));
    Ok(out)
}

/// `f_W` on a universe of the source: returns the first defect, if any.
fn check_embedding(f: &Embedding, cap: usize, seed: u64, flavor: Flavor) -> Result<Option<String>> {
    if !f.check_loc_morphism() {
        return Ok(Some("not a morphism of the lattice site".into()));
    }
    let cfg = UniverseConfig { slabs: f.source.circumference().is_some(), ..Default::default() };
    let mut src = enumerate_universe(&f.source, SiteKind::Rc, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    src.shuffle(&mut rng);
    src.truncate(cap);
    let m = Site::new(&f.source, SiteKind::Rc, flavor, src)?;
    let images: Vec<Region> = m.universe.iter().map(|u| f.apply(u)).collect();
    let n = Site::new(&f.target, SiteKind::Rc, flavor, images.clone())?;
    let map = images.iter().map(|r| n.index(r)).collect::<Result<Vec<_>>>()?;
    let (mc, nc) = (m.category(), n.category());
    let fun = SiteFunctor { source: &mc, target: &nc, map };
    if !fun.is_functor() {
        return Ok(Some("inclusions are not preserved".into()));
    }
    if let Some(d) = fun.check_fully_faithful().or_else(|| fun.check_reflects_orthogonality()) {
        return Ok(Some(d.describe()));
    }
    Ok(None)
}

pub fn embedding_faithful(ctx: &Resolved) -> Result<Outcome> {
    let cap = ctx.scenario.universe.max_universe;
    let mut witness = None;
    let mut rows = Vec::new();
    let mut bad = 0;
    for (k, (name, f)) in embedding_corpus()?.into_iter().enumerate() {
        for flavor in [Flavor::Plain, Flavor::Localized] {
            let defect = check_embedding(&f, cap, ctx.scenario.seed + k as u64, flavor)?;
            if let Some(d) = &defect {
                bad += 1;
                first(&mut witness, || format!("{name} ({flavor:?}): {d}"));
            }
            rows.push(json!({ "embedding": name, "flavor": flavor, "ok": defect.is_none() }));
        }
    }
    let embeddings = rows.len() / 2;
    Ok(Outcome::new(bad == 0, witness, json!({ "embeddings": embeddings, "failures": bad, "instances": rows })))
}

/// Random (cover, universe) instances inside a D-stable diamond.
pub fn precostack_corpus(seeds: u64, seed0: u64) -> Result<Vec<(Spacetime, Flavor, Cover, Vec<Region>)>> {
    let plane = Spacetime::plane(0, 6).with_span(0, 6);
    // c = 8 keeps the height-6 base diamond D-stable
    let cyl = Spacetime::cylinder(8, 0, 6)?;
    let mut out = Vec::new();
    for st in [plane, cyl] {
        let base = diamond(&st, Pt::new(0, 3), Pt::new(6, 3), false)?;
        let cfg = UniverseConfig { slabs: false, ..Default::default() };
        let inside: Vec<Region> = enumerate_universe(&st, SiteKind::Rc, &cfg)?
            .into_iter()
            .filter(|r| r.is_subset(&base))
            .collect();
        let stable: Vec<Region> = inside
            .iter()
            .filter(|r| descent_core::lattice::is_d_stable(&st, r).unwrap_or(false))
            .cloned()
            .collect();
        for s in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed0.wrapping_mul(7919).wrapping_add(s));
            for flavor in [Flavor::Plain, Flavor::Localized] {
                let pool = if flavor == Flavor::Plain { &inside } else { &stable };
                let k = rng.gen_range(2..=4);
                let pieces: Vec<Region> = (0..k).map(|_| pool[rng.gen_range(0..pool.len())].clone()).chain([base.clone()]).collect();
                let cover = Cover::new(base.clone(), pieces);
                let uni: Vec<Region> = (0..30).map(|_| inside[rng.gen_range(0..inside.len())].clone()).chain(cover.pieces.clone()).collect();
                out.push((st.clone(), flavor, cover, uni));
            }
        }
    }
    Ok(out)
}

pub fn precostack(ctx: &Resolved) -> Result<Outcome> {
    let corpus = precostack_corpus(15, ctx.scenario.seed)?;
    let mut witness = None;
    let mut counts = [0usize; 2];
    let mut bad = 0;
    for (k, (st, flavor, cover, uni)) in corpus.iter().enumerate() {
        let site = Site::new(st, SiteKind::Rc, *flavor, uni.clone())?;
        let cc = build_cover_category(&site, cover)?;
        let amb = site.category();
        let j = SiteFunctor { source: &cc.generated, target: &amb, map: cc.j_map() };
        let defect = if !j.is_functor() {
            Some("j is not a functor".to_string())
        } else if !cc.descriptions_agree() {
            Some("generated and simplified cover categories differ".to_string())
        } else {
            j.check_fully_faithful().or_else(|| j.check_reflects_orthogonality()).map(|d| d.describe())
        };
        counts[(*flavor == Flavor::Localized) as usize] += 1;
        if let Some(d) = defect {
            bad += 1;
            first(&mut witness, || format!("instance {k} on {} ({flavor:?}): {d}", backend_name(st)));
        }
    }
    Ok(Outcome::new(
        bad == 0,
        witness,
        json!({ "instances": corpus.len(), "plain": counts[0], "localized": counts[1], "failures": bad }),
    ))
}

/// A localized cover with a single-row piece must be refused.
pub fn refuse_non_d_stable(_ctx: &Resolved) -> Result<Outcome> {
    let cyl = Spacetime::cylinder(6, 0, 3)?;
    let row = slab(&cyl, 1, 1)?;
    let cover = Cover::new(Region::Full, vec![Region::Full, row.clone()]);
    let site = Site::new(&cyl, SiteKind::COpen, Flavor::Localized, vec![row, Region::Full])?;
    let refused = build_cover_category(&site, &cover);
    let plain = build_cover_category(&site.with_flavor(Flavor::Plain), &cover);
    let ok = matches!(refused, Err(Error::Refused(_))) && plain.is_ok();
    let msg = match &refused {
        Err(e) => e.to_string(),
        Ok(_) => "accepted".into(),
    };
    Ok(Outcome::new(ok, (!ok).then(|| msg.clone()), json!({ "localized": msg, "plain_accepted": plain.is_ok() })))
}

/// `(embedding name, f, cover of the source, targets U)` for the extension check.
pub fn extension_corpus() -> Result<Vec<(String, Embedding, Vec<Cover>, Vec<Region>)>> {
    use super::corpus::rect;
    let mut out = Vec::new();
    for n in [Spacetime::plane(0, 8).with_span(-6, 6), Spacetime::cylinder(8, 0, 7)?] {
        let dom = diamond(&n, Pt::new(1, 0), Pt::new(7, 0), false)?;
        let m = n.sub(&dom)?;
        let b = Pt::new(1, 0);
        let halves = [vec![(0, 6)], vec![(0, 4), (2, 6)]];
        let mut covers = Vec::new();
        for us in &halves {
            for vs in &halves {
                let mut pieces = Vec::new();
                for &u in us {
                    for &v in vs {
                        pieces.push(rect(&m, b, u, v)?);
                    }
                }
                covers.push(Cover::new(Region::Full, pieces));
            }
        }
        let targets = vec![
            diamond(&m, Pt::new(1, 0), Pt::new(5, 0), false)?,
            diamond(&m, Pt::new(2, 0), Pt::new(5, 1), false)?,
            diamond(&m, Pt::new(3, 0), Pt::new(7, 0), false)?,
            super::corpus::band(&m, &dom, 3, 4)?,
        ];
        let targets = targets.into_iter().map(|t| m.region(m.materialize(&t).iter().copied())).collect::<Result<Vec<_>>>()?;
        out.push((backend_name(&n), Embedding::new(m, n, 0, 0), covers, targets));
    }
    Ok(out)
}

pub fn cover_extension(_ctx: &Resolved) -> Result<Outcome> {
    let mut witness = None;
    let mut counts = [0usize; 2];
    let mut bad = [0usize; 2];
    for (name, f, covers, targets) in extension_corpus()? {
        for (ci, cover) in covers.iter().enumerate() {
            for u in &targets {
                for (k, mode) in [ExtendMode::Plain, ExtendMode::DStable].into_iter().enumerate() {
                    counts[k] += 1;
                    let keep = match mode {
                        ExtendMode::Plain => u.clone(),
                        ExtendMode::DStable => descent_core::lattice::cauchy_development(&f.source, u)?,
                    };
                    let problem = match extend_cover(&f, cover, u, mode) {
                        Err(e) => Some(e.to_string()),
                        Ok(out) => {
                            let kept = f.apply(&keep);
                            let added_ok = out.pieces[cover.pieces.len()..]
                                .iter()
                                .all(|p| descent_core::lattice::intersect(&f.target, p, &kept).is_none());
                            if out.validate(&f.target).is_err() {
                                Some("not a cover of the target".into())
                            } else if !restriction_property(&f, cover, &out, &keep) {
                                Some("restriction property fails".into())
                            } else if !added_ok {
                                Some("an added piece meets the kept image".into())
                            } else if mode == ExtendMode::DStable && !out.is_d_stable(&f.target)? {
                                Some("extended cover is not D-stable".into())
                            } else {
                                None
                            }
                        }
                    };
                    if let Some(p) = problem {
                        bad[k] += 1;
                        first(&mut witness, || format!("{name} cover {ci} {mode:?} at {}: {p}", u.label()));
                    }
                }
            }
        }
    }
    Ok(Outcome::new(
        bad == [0, 0],
        witness,
        json!({ "plain": counts[0], "d_stable": counts[1], "plain_failures": bad[0], "d_stable_failures": bad[1] }),
    ))
}
