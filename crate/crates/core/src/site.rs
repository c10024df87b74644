//! Thin orthogonal categories of regions, covers and cover categories.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    all_diamonds, are_causally_disjoint, cauchy_development, contains_cauchy_surface_of,
    development_in, find_d_stable_neighborhood, hull, intersect, is_causally_convex, is_d_stable,
    slab, Embedding, PointSet, Pt, Region, Spacetime,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SiteKind {
    /// Relatively compact regions only.
    Rc,
    /// Also admits `Full`.
    COpen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Plain,
    Localized,
}

/// Square bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits {
    n: usize,
    w: usize,
    v: Vec<u64>,
}

impl Bits {
    pub fn new(n: usize) -> Self {
        let w = n.div_ceil(64).max(1);
        Bits {
            n,
            w,
            v: vec![0; n * w],
        }
    }

    pub fn get(&self, a: usize, b: usize) -> bool {
        self.v[a * self.w + b / 64] >> (b % 64) & 1 == 1
    }

    pub fn set(&mut self, a: usize, b: usize) {
        self.v[a * self.w + b / 64] |= 1 << (b % 64);
    }

    /// Reflexive-transitive closure.
    pub fn close(&mut self) {
        for i in 0..self.n {
            self.set(i, i);
        }
        for k in 0..self.n {
            let rowk: Vec<u64> = self.v[k * self.w..(k + 1) * self.w].to_vec();
            for i in 0..self.n {
                if self.get(i, k) {
                    for (x, y) in self.v[i * self.w..(i + 1) * self.w].iter_mut().zip(&rowk) {
                        *x |= y;
                    }
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.v.iter().map(|x| x.count_ones() as usize).sum()
    }
}

/// A materialized thin orthogonal category.
#[derive(Clone, Debug)]
pub struct ThinCat {
    pub labels: Vec<String>,
    hom: Bits,
    /// `orth[c]` holds pairs `(a, b)` with `(a→c) ⊥ (b→c)`.
    orth: Vec<Bits>,
}

impl ThinCat {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn hom(&self, a: usize, b: usize) -> bool {
        self.hom.get(a, b)
    }

    pub fn orth(&self, a: usize, b: usize, c: usize) -> bool {
        self.orth[c].get(a, b)
    }

    pub fn hom_count(&self) -> usize {
        self.hom.count()
    }

    /// Full subcategory on `objs`, in that order.
    pub fn restrict(&self, objs: &[usize]) -> ThinCat {
        let n = objs.len();
        let mut hom = Bits::new(n);
        let mut orth: Vec<Bits> = (0..n).map(|_| Bits::new(n)).collect();
        for (x, &i) in objs.iter().enumerate() {
            for (y, &j) in objs.iter().enumerate() {
                if self.hom(i, j) {
                    hom.set(x, y);
                }
                for (z, &k) in objs.iter().enumerate() {
                    if self.orth(i, j, k) {
                        orth[z].set(x, y);
                    }
                }
            }
        }
        ThinCat {
            labels: objs.iter().map(|&i| self.labels[i].clone()).collect(),
            hom,
            orth,
        }
    }

    /// Orthogonality is symmetric and stable under composition.
    pub fn check_orthogonality_axioms(&self) -> bool {
        let n = self.len();
        for c in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if !self.orth(a, b, c) {
                        continue;
                    }
                    if !self.hom(a, c) || !self.hom(b, c) || !self.orth(b, a, c) {
                        return false;
                    }
                    for d in 0..n {
                        if self.hom(c, d) && !self.orth(a, b, d) {
                            return false;
                        }
                        if self.hom(d, a) && !self.orth(d, b, c) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorDefect {
    Hom { a: String, b: String, source: bool },
    Orth { a: String, b: String, c: String },
}

impl FunctorDefect {
    pub fn describe(&self) -> String {
        match self {
            FunctorDefect::Hom { a, b, source } => {
                let side = if *source { "source" } else { "target" };
                format!("hom {a} -> {b} only in {side}")
            }
            FunctorDefect::Orth { a, b, c } => format!("orthogonality of {a},{b} over {c}"),
        }
    }
}

/// A functor between materialized thin categories, given by its object map.
pub struct SiteFunctor<'a> {
    pub source: &'a ThinCat,
    pub target: &'a ThinCat,
    pub map: Vec<usize>,
}

impl SiteFunctor<'_> {
    /// A functor must send homs to homs.
    pub fn is_functor(&self) -> bool {
        let n = self.source.len();
        (0..n).all(|a| {
            (0..n).all(|b| !self.source.hom(a, b) || self.target.hom(self.map[a], self.map[b]))
        })
    }

    pub fn check_fully_faithful(&self) -> Option<FunctorDefect> {
        let n = self.source.len();
        for a in 0..n {
            for b in 0..n {
                let s = self.source.hom(a, b);
                if s != self.target.hom(self.map[a], self.map[b]) {
                    return Some(FunctorDefect::Hom {
                        a: self.source.labels[a].clone(),
                        b: self.source.labels[b].clone(),
                        source: s,
                    });
                }
            }
        }
        None
    }

    fn orth_scan(&self, reflect: bool) -> Option<FunctorDefect> {
        let n = self.source.len();
        let m = &self.map;
        for c in 0..n {
            for a in (0..n).filter(|&a| self.source.hom(a, c)) {
                for b in (0..n).filter(|&b| self.source.hom(b, c)) {
                    let s = self.source.orth(a, b, c);
                    let t = self.target.orth(m[a], m[b], m[c]);
                    let bad = if reflect { t && !s } else { s && !t };
                    if bad {
                        return Some(FunctorDefect::Orth {
                            a: self.source.labels[a].clone(),
                            b: self.source.labels[b].clone(),
                            c: self.source.labels[c].clone(),
                        });
                    }
                }
            }
        }
        None
    }

    pub fn check_reflects_orthogonality(&self) -> Option<FunctorDefect> {
        self.orth_scan(true)
    }

    pub fn check_preserves_orthogonality(&self) -> Option<FunctorDefect> {
        self.orth_scan(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct UniverseConfig {
    pub diamonds: bool,
    pub slabs: bool,
    /// Two-row horizontal bands of every diamond.
    pub bands: bool,
    /// Largest seed set whose hull is added.
    pub max_hull_seed: usize,
    /// How many random seed sets.
    pub hulls: usize,
    pub seed: u64,
    pub cap: usize,
}

impl Default for UniverseConfig {
    fn default() -> Self {
        UniverseConfig {
            diamonds: true,
            slabs: true,
            bands: false,
            max_hull_seed: 0,
            hulls: 0,
            seed: 0,
            cap: 5000,
        }
    }
}

/// Deterministic, deduplicated, sorted list of causally convex regions.
pub fn enumerate_universe(st: &Spacetime, kind: SiteKind, cfg: &UniverseConfig) -> Result<Vec<Region>> {
    let mut set: BTreeSet<Region> = BTreeSet::new();
    if cfg.diamonds {
        set.extend(all_diamonds(st));
    }
    if cfg.bands {
        for d in all_diamonds(st) {
            let Some(pts) = d.set() else { continue };
            let (a, b) = pts.t_range();
            for t in a..b {
                if let Some(r) = st.region_opt(pts.iter().filter(|p| p.t == t || p.t == t + 1).copied()) {
                    set.insert(r);
                }
            }
        }
    }
    if cfg.slabs && st.circumference().is_some() {
        let (t0, t1) = st.window;
        for a in t0..=t1 {
            for b in a..=t1 {
                if let Ok(s) = slab(st, a, b) {
                    set.insert(s);
                }
            }
        }
    }
    if cfg.max_hull_seed > 0 {
        let pts = st.full_points();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.hulls {
            let k = rng.gen_range(1..=cfg.max_hull_seed);
            let seed: Vec<Pt> = (0..k)
                .map(|_| pts.as_slice()[rng.gen_range(0..pts.len())])
                .collect();
            let h = hull(st, &PointSet::from_vec(seed));
            if h.iter().all(|p| st.in_window(p)) {
                set.insert(st.region(h.iter().copied())?);
            }
        }
    }
    match kind {
        SiteKind::COpen => {
            set.insert(Region::Full);
        }
        SiteKind::Rc => {
            set.remove(&Region::Full);
        }
    }
    if set.len() > cfg.cap {
        return Err(Error::Invalid(format!(
            "universe of {} regions exceeds cap {}",
            set.len(),
            cfg.cap
        )));
    }
    Ok(set.into_iter().collect())
}

/// A finite materialized piece of a plain or localized region site.
#[derive(Clone, Debug)]
pub struct Site {
    pub st: Spacetime,
    pub kind: SiteKind,
    pub flavor: Flavor,
    pub universe: Vec<Region>,
    dev: Vec<Region>,
}

impl Site {
    pub fn new(st: &Spacetime, kind: SiteKind, flavor: Flavor, universe: Vec<Region>) -> Result<Site> {
        let set: BTreeSet<Region> = universe.into_iter().collect();
        let universe: Vec<Region> = set.into_iter().collect();
        for u in &universe {
            if u.is_full() && kind == SiteKind::Rc {
                return Err(Error::Invalid("Full is not relatively compact".into()));
            }
            if u.set().is_some_and(|s| s.is_empty()) {
                return Err(Error::Invalid("empty region".into()));
            }
            if !is_causally_convex(st, u) {
                return Err(Error::NotConvex(u.label()));
            }
        }
        let dev = universe
            .iter()
            .map(|u| cauchy_development(st, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(Site {
            st: st.clone(),
            kind,
            flavor,
            universe,
            dev,
        })
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Site {
        Site {
            flavor,
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn index_of(&self, u: &Region) -> Option<usize> {
        self.universe.binary_search(u).ok()
    }

    pub fn index(&self, u: &Region) -> Result<usize> {
        self.index_of(u).ok_or_else(|| Error::MissingRegion(u.label()))
    }

    pub fn development(&self, i: usize) -> &Region {
        &self.dev[i]
    }

    pub fn hom_exists(&self, i: usize, j: usize) -> bool {
        let u = &self.universe[i];
        match self.flavor {
            Flavor::Plain => u.is_subset(&self.universe[j]),
            Flavor::Localized => u.is_subset(&self.dev[j]),
        }
    }

    pub fn disjoint(&self, i: usize, j: usize) -> bool {
        are_causally_disjoint(&self.st, &self.universe[i], &self.universe[j])
    }

    pub fn orthogonal(&self, i1: usize, i2: usize, j: usize) -> bool {
        self.hom_exists(i1, j) && self.hom_exists(i2, j) && self.disjoint(i1, i2)
    }

    /// Plain inclusion `U ⊆ V` with `D(U) = D(V)`.
    pub fn is_cauchy(&self, i: usize, j: usize) -> bool {
        self.universe[i].is_subset(&self.universe[j]) && self.dev[i] == self.dev[j]
    }

    pub fn category(&self) -> ThinCat {
        let n = self.len();
        let mut hom = Bits::new(n);
        for i in 0..n {
            for j in 0..n {
                if self.hom_exists(i, j) {
                    hom.set(i, j);
                }
            }
        }
        let mut dis = Bits::new(n);
        for i in 0..n {
            for j in 0..n {
                if self.disjoint(i, j) {
                    dis.set(i, j);
                }
            }
        }
        let orth = (0..n)
            .map(|c| {
                let mut b = Bits::new(n);
                for x in (0..n).filter(|&x| hom.get(x, c)) {
                    for y in (0..n).filter(|&y| hom.get(y, c)) {
                        if dis.get(x, y) {
                            b.set(x, y);
                        }
                    }
                }
                b
            })
            .collect();
        ThinCat {
            labels: self.universe.iter().map(|u| u.label()).collect(),
            hom,
            orth,
        }
    }
}

/// Zigzag saturation: plain inclusions plus formal inverses of Cauchy inclusions.
///
/// The Cauchy test here is the relative one, `D_V(U) = V`, so it shares no
/// code path with the closed-form rule.
pub fn localize_by_saturation(site: &Site) -> Result<Bits> {
    let n = site.len();
    let mut g = Bits::new(n);
    for i in 0..n {
        for j in 0..n {
            let (u, v) = (&site.universe[i], &site.universe[j]);
            if u.is_subset(v) {
                g.set(i, j);
                if contains_cauchy_surface_of(&site.st, u, v)? {
                    g.set(j, i);
                }
            }
        }
    }
    g.close();
    Ok(g)
}

/// First pair where the closed-form localized rule and saturation disagree.
pub fn compare_localization(site: &Site) -> Result<Option<(String, String)>> {
    let loc = site.with_flavor(Flavor::Localized);
    let sat = localize_by_saturation(site)?;
    for i in 0..site.len() {
        for j in 0..site.len() {
            if loc.hom_exists(i, j) != sat.get(i, j) {
                return Ok(Some((site.universe[i].label(), site.universe[j].label())));
            }
        }
    }
    Ok(None)
}

/// Adds `hull(U ∪ V)` for every pair with `U ⊆ D(V)` until nothing changes.
pub fn close_universe(st: &Spacetime, universe: Vec<Region>, cap: usize) -> Result<Vec<Region>> {
    let mut set: BTreeSet<Region> = universe.into_iter().collect();
    loop {
        let v: Vec<Region> = set.iter().cloned().collect();
        let devs = v
            .iter()
            .map(|u| cauchy_development(st, u))
            .collect::<Result<Vec<_>>>()?;
        let mut added = false;
        for (i, u) in v.iter().enumerate() {
            for (j, w) in v.iter().enumerate() {
                if i == j || !u.is_subset(&devs[j]) || u.is_subset(w) {
                    continue;
                }
                let h = match (u, w) {
                    (Region::Set(a), Region::Set(b)) => {
                        st.region(hull(st, &a.union(b)).iter().copied())?
                    }
                    _ => Region::Full,
                };
                if set.insert(h) {
                    added = true;
                }
            }
        }
        if set.len() > cap {
            return Err(Error::Invalid(format!("closed universe exceeds cap {cap}")));
        }
        if !added {
            return Ok(set.into_iter().collect());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    pub base: Region,
    pub pieces: Vec<Region>,
}

impl Cover {
    pub fn new(base: Region, pieces: Vec<Region>) -> Self {
        Cover { base, pieces }
    }

    pub fn trivial(base: Region) -> Self {
        Cover {
            pieces: vec![base.clone()],
            base,
        }
    }

    /// Convex nonempty pieces whose union is the base, checked on materialized points.
    pub fn validate(&self, st: &Spacetime) -> Result<()> {
        if self.pieces.is_empty() {
            return Err(Error::Invalid("cover without pieces".into()));
        }
        for p in &self.pieces {
            if p.set().is_some_and(|s| s.is_empty()) {
                return Err(Error::Invalid("empty cover piece".into()));
            }
            if !is_causally_convex(st, p) {
                return Err(Error::NotConvex(p.label()));
            }
            if !p.is_subset(&self.base) {
                return Err(Error::Invalid(format!("piece {} leaves the base", p.label())));
            }
        }
        if self.pieces.iter().any(|p| p.is_full()) {
            return Ok(());
        }
        let base = st.materialize(&self.base);
        let mut union = PointSet::from_vec(vec![]);
        for p in &self.pieces {
            union = union.union(&st.materialize(p));
        }
        if !base.is_subset(&union) {
            let miss = base.difference(&union);
            return Err(Error::Invalid(format!(
                "pieces miss {} of the base",
                miss.as_slice()[0]
            )));
        }
        Ok(())
    }

    pub fn is_cover(&self, st: &Spacetime) -> bool {
        self.validate(st).is_ok()
    }

    pub fn is_d_stable(&self, st: &Spacetime) -> Result<bool> {
        for p in &self.pieces {
            if !is_d_stable(st, p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Nonempty `U_ij` for `i < j`.
    pub fn intersections(&self, st: &Spacetime) -> Vec<(usize, usize, Region)> {
        let mut out = Vec::new();
        for i in 0..self.pieces.len() {
            for j in i + 1..self.pieces.len() {
                if let Some(r) = intersect(st, &self.pieces[i], &self.pieces[j]) {
                    out.push((i, j, r));
                }
            }
        }
        out
    }

    /// Nonempty `U_ijk` for `i < j < k`.
    pub fn triples(&self, st: &Spacetime) -> Vec<(usize, usize, usize, Region)> {
        let mut out = Vec::new();
        for (i, j, r) in self.intersections(st) {
            for k in j + 1..self.pieces.len() {
                if let Some(t) = intersect(st, &r, &self.pieces[k]) {
                    out.push((i, j, k, t));
                }
            }
        }
        out
    }

    /// `U_i ∩ W` for every piece, dropping empties; indices kept.
    pub fn restrict(&self, st: &Spacetime, w: &Region) -> Vec<(usize, Region)> {
        self.pieces
            .iter()
            .enumerate()
            .filter_map(|(i, p)| intersect(st, p, w).map(|r| (i, r)))
            .collect()
    }
}

/// The thin category of a cover, both from generators and from the closed form.
#[derive(Clone, Debug)]
pub struct CoverCategory {
    /// `(piece index, universe index)`.
    pub objects: Vec<(usize, usize)>,
    pub generated: ThinCat,
    pub simplified: ThinCat,
}

pub fn build_cover_category(site: &Site, cover: &Cover) -> Result<CoverCategory> {
    let st = &site.st;
    cover.validate(st)?;
    if site.flavor == Flavor::Localized && !cover.is_d_stable(st)? {
        let bad = cover
            .pieces
            .iter()
            .find(|p| !is_d_stable(st, p).unwrap_or(false))
            .map(|p| p.label())
            .unwrap_or_default();
        return Err(Error::Refused(format!(
            "localized cover category needs D-stable pieces; {bad} is not"
        )));
    }
    let mut objects = Vec::new();
    for (i, p) in cover.pieces.iter().enumerate() {
        for (k, u) in site.universe.iter().enumerate() {
            if u.is_subset(p) {
                objects.push((i, k));
            }
        }
    }
    let n = objects.len();
    let labels: Vec<String> = objects
        .iter()
        .map(|&(i, k)| format!("{i}:{}", site.universe[k].label()))
        .collect();
    // intrinsic homs of each C(U_i)
    let mut intrinsic = Bits::new(n);
    for (a, &(i, k)) in objects.iter().enumerate() {
        for (b, &(j, l)) in objects.iter().enumerate() {
            if i != j {
                continue;
            }
            let u = &site.universe[k];
            let ok = match site.flavor {
                Flavor::Plain => u.is_subset(&site.universe[l]),
                Flavor::Localized => {
                    let piece = &cover.pieces[i];
                    let dv = development_in(st, &site.universe[l], piece)?;
                    u.is_subset(&dv)
                }
            };
            if ok {
                intrinsic.set(a, b);
            }
        }
    }
    let mut hom = intrinsic.clone();
    for (a, &(i, k)) in objects.iter().enumerate() {
        for (b, &(j, l)) in objects.iter().enumerate() {
            if k == l && i != j {
                hom.set(a, b);
            }
        }
    }
    hom.close();
    // generated orthogonality
    let mut orth: Vec<Bits> = (0..n).map(|_| Bits::new(n)).collect();
    for (o, &(i, _)) in objects.iter().enumerate() {
        let below: Vec<usize> = (0..n).filter(|&x| intrinsic.get(x, o)).collect();
        for &x in &below {
            for &y in &below {
                if objects[x].0 != i || objects[y].0 != i {
                    continue;
                }
                if !site.disjoint(objects[x].1, objects[y].1) {
                    continue;
                }
                for a in (0..n).filter(|&a| hom.get(a, x)) {
                    for b in (0..n).filter(|&b| hom.get(b, y)) {
                        for c in (0..n).filter(|&c| hom.get(o, c)) {
                            orth[c].set(a, b);
                            orth[c].set(b, a);
                        }
                    }
                }
            }
        }
    }
    let generated = ThinCat {
        labels: labels.clone(),
        hom,
        orth,
    };
    // closed form
    let mut shom = Bits::new(n);
    for (a, &(_, k)) in objects.iter().enumerate() {
        for (b, &(_, l)) in objects.iter().enumerate() {
            if site.hom_exists(k, l) {
                shom.set(a, b);
            }
        }
    }
    let sorth = (0..n)
        .map(|c| {
            let mut bits = Bits::new(n);
            for a in (0..n).filter(|&a| shom.get(a, c)) {
                for b in (0..n).filter(|&b| shom.get(b, c)) {
                    if site.disjoint(objects[a].1, objects[b].1) {
                        bits.set(a, b);
                    }
                }
            }
            bits
        })
        .collect();
    Ok(CoverCategory {
        objects,
        generated,
        simplified: ThinCat {
            labels,
            hom: shom,
            orth: sorth,
        },
    })
}

impl CoverCategory {
    /// Object map of `j : (i, U) ↦ U` into the ambient site category.
    pub fn j_map(&self) -> Vec<usize> {
        self.objects.iter().map(|&(_, k)| k).collect()
    }

    /// The generated category agrees with the closed-form description.
    pub fn descriptions_agree(&self) -> bool {
        let n = self.objects.len();
        (0..n).all(|a| {
            (0..n).all(|b| {
                self.generated.hom(a, b) == self.simplified.hom(a, b)
                    && (0..n).all(|c| self.generated.orth(a, b, c) == self.simplified.orth(a, b, c))
            })
        })
    }

    pub fn object_index(&self, piece: usize, k: usize) -> Option<usize> {
        self.objects.iter().position(|&o| o == (piece, k))
    }
}

/// Object map of `(i, U) ↦ (α(i), U)`; errors unless every `U_i ⊆ U'_{α(i)}`.
pub fn refinement_map(
    from: &Cover,
    to: &Cover,
    alpha: &[usize],
    cat_from: &CoverCategory,
    cat_to: &CoverCategory,
) -> Result<Vec<usize>> {
    if alpha.len() != from.pieces.len() {
        return Err(Error::Invalid("refinement map has the wrong length".into()));
    }
    for (i, &a) in alpha.iter().enumerate() {
        let ok = to.pieces.get(a).is_some_and(|p| from.pieces[i].is_subset(p));
        if !ok {
            return Err(Error::Invalid(format!("piece {i} is not inside target piece {a}")));
        }
    }
    cat_from
        .objects
        .iter()
        .map(|&(i, k)| {
            cat_to
                .object_index(alpha[i], k)
                .ok_or_else(|| Error::Construction("refined object missing".into()))
        })
        .collect()
}

/// First index map witnessing that `from` refines `to`.
pub fn find_refinement(from: &Cover, to: &Cover) -> Option<Vec<usize>> {
    from.pieces
        .iter()
        .map(|p| to.pieces.iter().position(|q| p.is_subset(q)))
        .collect()
}

/// `f⁻¹(𝒱)` with empty preimages discarded.
pub fn pullback_cover(f: &Embedding, v: &Cover) -> Option<Cover> {
    let base = f.preimage(&v.base)?;
    let pieces: Vec<Region> = v.pieces.iter().filter_map(|p| f.preimage(p)).collect();
    if pieces.is_empty() {
        None
    } else {
        Some(Cover { base, pieces })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendMode {
    Plain,
    DStable,
}

/// Extends a cover of `M` along `f` to a cover of the target window.
///
/// The added pieces avoid `f(U)` (plain) or `f(D_M(U))` (D-stable), so
/// `f⁻¹𝒱` restricted there equals `𝒰` restricted there.
pub fn extend_cover(f: &Embedding, cover: &Cover, u: &Region, mode: ExtendMode) -> Result<Cover> {
    let (m, n) = (&f.source, &f.target);
    cover.validate(m)?;
    if !u.is_relatively_compact() || !is_causally_convex(m, u) {
        return Err(Error::Invalid("U must be relatively compact and causally convex".into()));
    }
    let keep = match mode {
        ExtendMode::Plain => u.clone(),
        ExtendMode::DStable => {
            if !f.check_d_stable_image()? || !cover.is_d_stable(m)? {
                return Err(Error::Invalid("D-stable mode needs D-stable image and pieces".into()));
            }
            cauchy_development(m, u)?
        }
    };
    let avoid = n.materialize(&f.apply(&keep));
    let mut pieces: Vec<Region> = cover.pieces.iter().map(|p| f.apply(p)).collect();
    let rest = n.full_points().difference(&avoid);
    let mut covered: BTreeSet<Pt> = BTreeSet::new();
    for p in &pieces {
        covered.extend(n.materialize(p).iter().copied());
    }
    if !rest.is_empty() {
        let rest_region = Region::Set(rest.clone());
        for p in rest.iter() {
            if covered.contains(p) {
                continue;
            }
            let w = match mode {
                ExtendMode::DStable => find_d_stable_neighborhood(n, *p, &rest_region)?,
                ExtendMode::Plain => convex_neighborhood(n, *p, &rest),
            };
            covered.extend(n.materialize(&w).iter().copied());
            pieces.push(w);
        }
    }
    let out = Cover {
        base: Region::Full,
        pieces,
    };
    out.validate(n)
        .map_err(|e| Error::Construction(format!("extended family is not a cover: {e}")))?;
    if mode == ExtendMode::DStable && !out.is_d_stable(n)? {
        return Err(Error::Construction("extended cover is not D-stable".into()));
    }
    if !restriction_property(f, cover, &out, &keep) {
        return Err(Error::Construction("restriction property violated".into()));
    }
    Ok(out)
}

/// Largest centred diamond around `p` inside `rest`, D-stability not required.
fn convex_neighborhood(n: &Spacetime, p: Pt, rest: &PointSet) -> Region {
    let mut best = Region::Set(PointSet::from_vec(vec![n.norm(p)]));
    for r in 1.. {
        let d = match crate::lattice::diamond(n, Pt::new(p.t - r, p.x), Pt::new(p.t + r, p.x), false) {
            Ok(d) => d,
            Err(_) => break,
        };
        match d.set() {
            Some(s) if s.is_subset(rest) => best = d,
            _ => break,
        }
    }
    best
}

/// `f⁻¹𝒱|_W = 𝒰|_W` as families of nonempty regions.
pub fn restriction_property(f: &Embedding, u_cover: &Cover, v_cover: &Cover, w: &Region) -> bool {
    let m = &f.source;
    let lhs: BTreeSet<Region> = v_cover
        .pieces
        .iter()
        .filter_map(|p| f.preimage(p))
        .filter_map(|p| intersect(m, &p, w))
        .collect();
    let rhs: BTreeSet<Region> = u_cover.pieces.iter().filter_map(|p| intersect(m, p, w)).collect();
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::diamond;

    fn d(st: &Spacetime, b: (i64, i64), t: (i64, i64)) -> Region {
        diamond(st, Pt::new(b.0, b.1), Pt::new(t.0, t.1), false).unwrap()
    }

    #[test]
    fn tiny_universe() {
        let st = Spacetime::plane(0, 2).with_span(0, 2);
        let cfg = UniverseConfig {
            slabs: false,
            ..Default::default()
        };
        let u = enumerate_universe(&st, SiteKind::Rc, &cfg).unwrap();
        assert!(u.iter().filter(|r| r.len() == Some(1)).count() == 9);
        let cyl = Spacetime::cylinder(4, 0, 3).unwrap();
        let u = enumerate_universe(&cyl, SiteKind::Rc, &UniverseConfig::default()).unwrap();
        let slabs = (0..4).filter(|&t| u.contains(&slab(&cyl, t, t).unwrap())).count();
        assert_eq!(slabs, 4);
    }

    #[test]
    fn localized_slab_hom() {
        let cyl = Spacetime::cylinder(6, 0, 5).unwrap();
        let a = slab(&cyl, 2, 3).unwrap();
        let b = slab(&cyl, 0, 1).unwrap();
        let site = Site::new(&cyl, SiteKind::Rc, Flavor::Localized, vec![a.clone(), b.clone()]).unwrap();
        let (i, j) = (site.index(&a).unwrap(), site.index(&b).unwrap());
        assert!(site.hom_exists(i, j) && site.hom_exists(j, i));
        assert!(!site.with_flavor(Flavor::Plain).hom_exists(i, j));
    }

    #[test]
    fn broken_functor_is_detected() {
        let st = Spacetime::plane(0, 4).with_span(-4, 4);
        let a = d(&st, (0, -3), (1, -3));
        let b = d(&st, (0, 3), (1, 3));
        let site = Site::new(&st, SiteKind::Rc, Flavor::Plain, vec![a, b]).unwrap();
        let cat = site.category();
        let f = SiteFunctor {
            source: &cat,
            target: &cat,
            map: vec![0, 0],
        };
        assert!(f.check_fully_faithful().is_some());
        let id = SiteFunctor {
            source: &cat,
            target: &cat,
            map: vec![0, 1],
        };
        assert!(id.check_fully_faithful().is_none());
        assert!(id.check_reflects_orthogonality().is_none());
    }

    #[test]
    fn cover_category_of_two_diamonds() {
        let st = Spacetime::plane(0, 6).with_span(-4, 8);
        let u1 = d(&st, (0, 0), (4, 0));
        let u2 = d(&st, (0, 2), (4, 2));
        let base = crate::lattice::union(&st, &u1, &u2);
        let base = crate::lattice::hull_region(&st, &base);
        let k = intersect(&st, &u1, &u2).unwrap();
        let cover = Cover::new(base.clone(), vec![u1.clone(), u2.clone(), base.clone()]);
        let site = Site::new(&st, SiteKind::Rc, Flavor::Plain, vec![u1, u2, k.clone(), base]).unwrap();
        let cc = build_cover_category(&site, &cover).unwrap();
        assert!(cc.descriptions_agree());
        let ki = site.index(&k).unwrap();
        let (a, b) = (cc.object_index(0, ki).unwrap(), cc.object_index(1, ki).unwrap());
        assert!(cc.generated.hom(a, b) && cc.generated.hom(b, a));
        assert!(cc.generated.check_orthogonality_axioms());
    }

    #[test]
    fn non_d_stable_localized_cover_is_refused() {
        let cyl = Spacetime::cylinder(6, 0, 3).unwrap();
        let row = slab(&cyl, 1, 1).unwrap();
        let site = Site::new(&cyl, SiteKind::COpen, Flavor::Localized, vec![row.clone(), Region::Full]).unwrap();
        let cover = Cover::new(Region::Full, vec![Region::Full, row]);
        let err = build_cover_category(&site, &cover).unwrap_err();
        assert!(matches!(err, Error::Refused(_)), "{err:?}");
    }

    #[test]
    fn saturation_matches_closed_form_on_cauchy_slabs() {
        let cyl = Spacetime::cylinder(5, 0, 4).unwrap();
        let u: Vec<Region> = (0..3).map(|k| slab(&cyl, 1, 1 + k).unwrap()).collect();
        let site = Site::new(&cyl, SiteKind::Rc, Flavor::Plain, u).unwrap();
        assert_eq!(compare_localization(&site).unwrap(), None);
        let sat = localize_by_saturation(&site).unwrap();
        assert_eq!(sat.count(), 9);
    }
}
