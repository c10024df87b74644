//! Seeded and structured descent instances for the Klein-Gordon checks.

use descent_core::lattice::{diamond, slab};
use descent_core::linalg::{q, Q};
use descent_core::site::{Cover, Flavor};
use descent_core::{Pt, Region, Result, Spacetime};

/// One lattice, one base region and a list of covers of it, each to be
/// tested against several target regions.
pub struct Family {
    pub name: String,
    pub st: Spacetime,
    pub mass2: Q,
    pub base: Region,
    pub covers: Vec<(String, Cover)>,
    pub plain_targets: Vec<Region>,
    pub localized_targets: Vec<Region>,
}

pub struct Instance<'a> {
    pub family: &'a Family,
    pub cover: usize,
    pub target: Region,
    pub flavor: Flavor,
}

impl Family {
    pub fn instances(&self) -> Vec<Instance<'_>> {
        let mut out = Vec::new();
        for c in 0..self.covers.len() {
            for (flavor, ts) in [(Flavor::Plain, &self.plain_targets), (Flavor::Localized, &self.localized_targets)] {
                for t in ts {
                    out.push(Instance { family: self, cover: c, target: t.clone(), flavor });
                }
            }
        }
        out
    }
}

impl Instance<'_> {
    pub fn name(&self) -> String {
        format!("{} / {} / {:?} / |U|={}", self.family.name, self.family.covers[self.cover].0, self.flavor, self.target.len().unwrap_or(0))
    }

    pub fn cover(&self) -> &Cover {
        &self.family.covers[self.cover].1
    }
}

/// Interval covers of `[0, l]` with even cut points; the last entry has a
/// zero-width overlap and is not stencil-thick.
pub fn splits(l: i64) -> Vec<(String, Vec<(i64, i64)>)> {
    let mut out = vec![("whole".to_string(), vec![(0, l)])];
    for a in (2..=l - 4).step_by(2) {
        out.push((format!("2@{a}"), vec![(0, a + 2), (a, l)]));
    }
    if l >= 8 {
        out.push(("2@2w".into(), vec![(0, l - 2), (2, l)]));
        out.push(("3".into(), vec![(0, l / 2), (l / 2 - 2, l / 2 + 2), (l / 2, l)]));
    }
    out.push(("thin".into(), vec![(0, l / 2), (l / 2, l)]));
    out
}

/// Lattice points of the light-cone rectangle `[u0,u1] x [v0,v1]` above `b`.
pub fn rect(st: &Spacetime, b: Pt, u: (i64, i64), v: (i64, i64)) -> Result<Region> {
    let at = |uu: i64, vv: i64| st.norm(Pt::new(b.t + (uu + vv) / 2, b.x + (uu - vv) / 2));
    diamond(st, at(u.0, v.0), at(u.1, v.1), false)
}

/// Product covers of the diamond of side `l` above `b`. Thin splits are only
/// paired with the whole interval.
fn product_covers(st: &Spacetime, b: Pt, l: i64, keep: &[&str]) -> Result<Vec<(String, Cover)>> {
    let base = rect(st, b, (0, l), (0, l))?;
    let sp: Vec<_> = splits(l).into_iter().filter(|(n, _)| keep.is_empty() || keep.contains(&n.as_str())).collect();
    let mut out = Vec::new();
    for (nu, us) in &sp {
        for (nv, vs) in &sp {
            let thin = nu == "thin" || nv == "thin";
            if thin && !(nu == "whole" || nv == "whole") {
                continue;
            }
            let mut pieces = Vec::new();
            for &u in us {
                for &v in vs {
                    pieces.push(rect(st, b, u, v)?);
                }
            }
            out.push((format!("u:{nu} v:{nv}"), Cover::new(base.clone(), pieces)));
        }
    }
    Ok(out)
}

/// Rows `t0..=t1` of a region.
pub fn band(st: &Spacetime, r: &Region, t0: i64, t1: i64) -> Result<Region> {
    st.region(r.points()?.iter().filter(|p| p.t >= t0 && p.t <= t1).copied())
}

fn diamond_family(name: &str, st: Spacetime, mass2: Q, l: i64, keep: &[&str]) -> Result<Family> {
    let b = Pt::new(0, 0);
    let base = rect(&st, b, (0, l), (0, l))?;
    let covers = product_covers(&st, b, l, keep)?;
    let h = l / 2;
    let plain_targets = vec![base.clone(), band(&st, &base, h - 2, h + 1)?];
    let localized_targets = vec![base.clone(), band(&st, &base, h - 1, h)?, band(&st, &base, h - 2, h + 1)?];
    Ok(Family { name: name.into(), st, mass2, base, covers, plain_targets, localized_targets })
}

fn slab_family(c: i64, mass2: Q) -> Result<Family> {
    let st = Spacetime::cylinder(c, 0, 7)?;
    let base = slab(&st, 0, 5)?;
    let rows: Vec<(&str, Vec<(i64, i64)>)> = vec![
        ("whole", vec![(0, 5)]),
        ("[0,3][2,5]", vec![(0, 3), (2, 5)]),
        ("[0,2][1,5]", vec![(0, 2), (1, 5)]),
        ("[0,4][1,5]", vec![(0, 4), (1, 5)]),
        ("[0,2][1,4][3,5]", vec![(0, 2), (1, 4), (3, 5)]),
        ("thin [0,2][2,5]", vec![(0, 2), (2, 5)]),
        ("disjoint [0,2][3,5]", vec![(0, 2), (3, 5)]),
    ];
    let covers = rows
        .into_iter()
        .map(|(n, rs)| {
            let pieces = rs.iter().map(|&(a, b)| slab(&st, a, b)).collect::<Result<Vec<_>>>()?;
            Ok((n.to_string(), Cover::new(base.clone(), pieces)))
        })
        .collect::<Result<Vec<_>>>()?;
    let plain_targets = vec![base.clone(), slab(&st, 1, 4)?, diamond(&st, Pt::new(0, 3), Pt::new(5, 4), false)?];
    Ok(Family { name: format!("cylinder c={c} slabs"), st, mass2, base, covers, plain_targets, localized_targets: vec![] })
}

/// The full corpus. Diamond families carry both flavors, slab families only
/// the plain one (slabs develop to the whole cylinder).
pub fn kg_corpus(mass2: &Q) -> Result<Vec<Family>> {
    Ok(vec![
        diamond_family("plane diamond h=8", Spacetime::plane(0, 8).with_span(-8, 8), mass2.clone(), 8, &[])?,
        diamond_family(
            "cylinder c=12 diamond h=8",
            Spacetime::cylinder(12, 0, 8)?,
            mass2.clone(),
            8,
            &["whole", "2@2", "3", "thin"],
        )?,
        slab_family(6, mass2.clone())?,
        slab_family(4, q(0))?,
    ])
}
