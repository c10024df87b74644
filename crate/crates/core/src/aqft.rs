//! Indicator field theories with values in {I, A}, natural transformations
//! between assignments on thin categories, and generator-level families of
//! Klein-Gordon theories indexed by embeddings.

use num_traits::{One, Zero};

use crate::algebra::{enumerate_homs, two_valued_colimit, AlgebraValue, Table, TwoValuedDiagram};
use crate::error::{Error, Result};
use crate::kg::{Field, KgModel};
use crate::lattice::{Embedding, Region, Spacetime};
use crate::linalg::{inverse, RationalMatrix, Q};
use crate::site::{Site, ThinCat};

/// Which regions an indicator theory marks with the algebra `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Predicate {
    EqualsFull,
    /// `D(U)` is the whole spacetime.
    ContainsCauchySurface,
    /// `U` contains the given region (typically the image of an embedding).
    ContainsImage(Region),
    /// Exactly one region; violates monotonicity and is rejected.
    EqualsRegion(Region),
}

impl Predicate {
    pub fn eval(&self, site: &Site, i: usize) -> bool {
        let u = &site.universe[i];
        match self {
            Predicate::EqualsFull => u.is_full(),
            Predicate::ContainsCauchySurface => site.development(i).is_full(),
            Predicate::ContainsImage(r) => r.is_subset(u),
            Predicate::EqualsRegion(r) => u == r,
        }
    }
}

/// A two-valued assignment `U ↦ I` or `A` over a site universe.
#[derive(Clone, Debug)]
pub struct Indicator {
    pub algebra: AlgebraValue,
    pub active: Vec<bool>,
}

impl Indicator {
    pub fn value(&self, i: usize) -> AlgebraValue {
        if self.active[i] {
            self.algebra.clone()
        } else {
            AlgebraValue::Initial
        }
    }

    pub fn values(&self) -> Vec<AlgebraValue> {
        (0..self.active.len()).map(|i| self.value(i)).collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

/// Checks that `active` is upward closed along the homs of `cat`.
pub fn check_monotone(cat: &ThinCat, active: &[bool]) -> Option<(usize, usize)> {
    let n = cat.len();
    for a in 0..n {
        for b in 0..n {
            if cat.hom(a, b) && active[a] && !active[b] {
                return Some((a, b));
            }
        }
    }
    None
}

fn is_commutative(t: &Table) -> bool {
    let e = |i: usize| {
        let mut v = vec![Q::zero(); t.dim];
        v[i] = Q::one();
        v
    };
    (0..t.dim).all(|i| (0..t.dim).all(|j| t.mul(&e(i), &e(j)) == t.mul(&e(j), &e(i))))
}

/// Images of orthogonal pairs must commute. With both images in `A` this
/// asks for commutativity of `A`; otherwise one side is the unit.
pub fn check_perp(cat: &ThinCat, ind: &Indicator) -> Result<Option<(usize, usize, usize)>> {
    let n = cat.len();
    let commutative = match &ind.algebra {
        AlgebraValue::Table(t) => is_commutative(t),
        AlgebraValue::Initial => true,
        _ => false,
    };
    if commutative {
        return Ok(None);
    }
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                if cat.orth(a, b, c) && ind.active[a] && ind.active[b] {
                    return Ok(Some((a, b, c)));
                }
            }
        }
    }
    Ok(None)
}

/// Builds the indicator theory of `pred`; non-monotone or ⊥-violating
/// assignments are construction errors.
pub fn build_indicator(site: &Site, pred: &Predicate, algebra: AlgebraValue) -> Result<Indicator> {
    let active: Vec<bool> = (0..site.len()).map(|i| pred.eval(site, i)).collect();
    let cat = site.category();
    if let Some((a, b)) = check_monotone(&cat, &active) {
        return Err(Error::Construction(format!(
            "morphism {} -> {} would need a map A -> I",
            site.universe[a].label(),
            site.universe[b].label()
        )));
    }
    let ind = Indicator { algebra, active };
    if let Some((a, b, c)) = check_perp(&cat, &ind)? {
        return Err(Error::Construction(format!(
            "images of {} and {} in {} do not commute",
            site.universe[a].label(),
            site.universe[b].label(),
            site.universe[c].label()
        )));
    }
    Ok(ind)
}

/// `f*𝔄 (U) = 𝔄(f(U))`.
pub fn pullback(f: &Embedding, source: &Site, target: &Site, ind: &Indicator) -> Result<Indicator> {
    let active = source
        .universe
        .iter()
        .map(|u| {
            let img = f.apply(u);
            target
                .index_of(&img)
                .map(|j| ind.active[j])
                .ok_or_else(|| Error::MissingRegion(img.label()))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(Indicator {
        algebra: ind.algebra.clone(),
        active,
    })
}

/// First Cauchy morphism whose two ends carry different values.
pub fn check_time_slice(site: &Site, ind: &Indicator) -> Option<(usize, usize)> {
    let n = site.len();
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && site.is_cauchy(i, j) && ind.active[i] != ind.active[j])
}

/// Outcome of comparing `𝔄(V)` with the colimit over explicit regions inside `V`.
#[derive(Clone, Debug)]
pub struct EpsilonCheck {
    pub value: AlgebraValue,
    pub colimit: AlgebraValue,
    pub diagram_size: usize,
}

impl EpsilonCheck {
    pub fn is_iso(&self) -> bool {
        self.value.same_as(&self.colimit)
    }
}

/// The counit at `V`: colimit of `𝔄` over the relatively compact regions of
/// the universe with a morphism into `V`.
pub fn epsilon_iso_check(site: &Site, ind: &Indicator, v: usize) -> Result<EpsilonCheck> {
    let objs: Vec<usize> = (0..site.len())
        .filter(|&u| site.universe[u].is_relatively_compact() && site.hom_exists(u, v))
        .collect();
    let mut edges = Vec::new();
    for (a, &u) in objs.iter().enumerate() {
        for (b, &w) in objs.iter().enumerate() {
            if a != b && site.hom_exists(u, w) {
                edges.push((a, b));
            }
        }
    }
    let d = TwoValuedDiagram {
        edges,
        is_a: objs.iter().map(|&u| ind.active[u]).collect(),
    };
    Ok(EpsilonCheck {
        value: ind.value(v),
        colimit: two_valued_colimit(&d, &ind.algebra)?,
        diagram_size: objs.len(),
    })
}

/// Structure map `value(U) → value(V)`: identity, or the unit when `U ↦ I`.
fn transition(from: &AlgebraValue, to: &AlgebraValue) -> Result<RationalMatrix> {
    let tt = to.as_table()?;
    if from.is_initial() {
        return Ok(RationalMatrix::from_cols(vec![tt.unit.clone()], tt.dim));
    }
    if from.same_as(to) {
        return Ok(RationalMatrix::identity(tt.dim));
    }
    Err(Error::Construction(format!(
        "no structure map {} -> {}",
        from.label(),
        to.label()
    )))
}

struct NatProblem {
    n: usize,
    cand: Vec<Vec<RationalMatrix>>,
    /// `(U, V, α_UV, β_UV)` for every non-identity hom.
    squares: Vec<(usize, usize, RationalMatrix, RationalMatrix)>,
}

impl NatProblem {
    fn new(cat: &ThinCat, a: &[AlgebraValue], b: &[AlgebraValue]) -> Result<NatProblem> {
        let n = cat.len();
        let mut cand = Vec::with_capacity(n);
        for i in 0..n {
            cand.push(enumerate_homs(&a[i].as_table()?, &b[i].as_table()?)?);
        }
        let mut squares = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u != v && cat.hom(u, v) {
                    squares.push((u, v, transition(&a[u], &a[v])?, transition(&b[u], &b[v])?));
                }
            }
        }
        Ok(NatProblem { n, cand, squares })
    }

    fn square_ok(&self, eta: &[Option<RationalMatrix>], s: usize) -> bool {
        let (u, v, al, be) = &self.squares[s];
        match (&eta[*u], &eta[*v]) {
            (Some(eu), Some(ev)) => ev.mul(al) == be.mul(eu),
            _ => true,
        }
    }
}

/// Number of natural transformations between two assignments of
/// `{I} ∪ {ℚᵏ}` values on `cat`. Each connected block of the hom graph is
/// counted by backtracking in BFS order, so every square is checked as soon
/// as both of its ends are assigned; in practice one choice per block
/// determines the rest.
pub fn count_nat_transforms(cat: &ThinCat, a: &[AlgebraValue], b: &[AlgebraValue]) -> Result<u128> {
    let p = NatProblem::new(cat, a, b)?;
    let n = p.n;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (s, (u, v, _, _)) in p.squares.iter().enumerate() {
        adj[*u].push((*v, s));
        adj[*v].push((*u, s));
    }
    let mut seen = vec![false; n];
    let mut total: u128 = 1;
    let mut eta: Vec<Option<RationalMatrix>> = vec![None; n];
    for root in 0..n {
        if seen[root] {
            continue;
        }
        let mut comp = vec![root];
        seen[root] = true;
        let mut k = 0;
        while k < comp.len() {
            let x = comp[k];
            k += 1;
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                }
            }
        }
        let count = count_block(&p, &adj, &comp, 0, &mut eta);
        total = total.saturating_mul(count);
        if total == 0 {
            return Ok(0);
        }
    }
    Ok(total)
}

fn count_block(
    p: &NatProblem,
    adj: &[Vec<(usize, usize)>],
    comp: &[usize],
    k: usize,
    eta: &mut Vec<Option<RationalMatrix>>,
) -> u128 {
    if k == comp.len() {
        return 1;
    }
    let x = comp[k];
    let mut count = 0;
    for c in &p.cand[x] {
        eta[x] = Some(c.clone());
        if adj[x].iter().all(|&(_, s)| p.square_ok(eta, s)) {
            count += count_block(p, adj, comp, k + 1, eta);
        }
    }
    eta[x] = None;
    count
}

/// Exhaustive count over all component choices; for cross-checking.
pub fn brute_force_nat_count(cat: &ThinCat, a: &[AlgebraValue], b: &[AlgebraValue], limit: u64) -> Result<Option<u64>> {
    let p = NatProblem::new(cat, a, b)?;
    let total: u128 = p.cand.iter().map(|c| c.len() as u128).product();
    if total > limit as u128 {
        return Ok(None);
    }
    let mut count = 0u64;
    let mut idx = vec![0usize; p.n];
    loop {
        let eta: Vec<Option<RationalMatrix>> = (0..p.n).map(|i| Some(p.cand[i][idx[i]].clone())).collect();
        if (0..p.squares.len()).all(|s| p.square_ok(&eta, s)) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == p.n {
                return Ok(Some(count));
            }
            idx[i] += 1;
            if idx[i] < p.cand[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// One Klein-Gordon theory of a family: a lattice and its regions.
pub struct FamilyMember {
    pub name: String,
    pub model: KgModel,
    pub universe: Vec<Region>,
}

/// A generator-level point of the family functor: isomorphisms
/// `α_f,U : 𝔏_M(U) → 𝔏_N(f(U))` for each embedding.
pub struct PointFamily {
    pub members: Vec<FamilyMember>,
    /// `(source member, target member, embedding)`.
    pub embeddings: Vec<(usize, usize, Embedding)>,
    /// `(f, g, g∘f)` by embedding index.
    pub composites: Vec<(usize, usize, usize)>,
    /// Flip the sign of one component of `α` for the given embedding.
    pub perturb: Option<usize>,
}

/// Result of checking a point family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointVerdict {
    Coherent { components: usize },
    Defect(String),
}

impl PointFamily {
    fn alpha(&mut self, e: usize, u: &Region) -> Result<RationalMatrix> {
        let (s, t, f) = (self.embeddings[e].0, self.embeddings[e].1, self.embeddings[e].2.clone());
        let src = self.members[s].model.space(u);
        let img = f.apply(u);
        let dst = self.members[t].model.space(&img);
        let mut cols = Vec::new();
        for p in src.basis_points() {
            let c = dst
                .class(&Field::delta(f.map_pt(p)))
                .ok_or_else(|| Error::Invalid(format!("{p} leaves the image")))?;
            cols.push(c);
        }
        let mut m = RationalMatrix::from_cols(cols, dst.dim());
        if self.perturb == Some(e) && m.cols > 0 {
            for r in 0..m.rows {
                let v = -m.get(r, 0).clone();
                m.set(r, 0, v);
            }
        }
        Ok(m)
    }

    pub fn verify_point(&mut self) -> Result<PointVerdict> {
        let mut components = 0;
        for e in 0..self.embeddings.len() {
            let (s, t, f) = (self.embeddings[e].0, self.embeddings[e].1, self.embeddings[e].2.clone());
            let universe = self.members[s].universe.clone();
            for (k, u) in universe.iter().enumerate() {
                let a = self.alpha(e, u)?;
                if inverse(&a).is_none() {
                    return Ok(PointVerdict::Defect(format!("alpha_{e} at {} is not invertible", u.label())));
                }
                let pu = self.members[s].model.points(u);
                let pf = self.members[t].model.points(&f.apply(u));
                let sm = self.members[s].model.sigma_matrix(&pu)?;
                let sn = self.members[t].model.sigma_matrix(&pf)?;
                if a.transpose().mul(&sn).mul(&a) != sm {
                    return Ok(PointVerdict::Defect(format!("alpha_{e} at {} does not preserve sigma", u.label())));
                }
                for v in &universe[k + 1..] {
                    if !u.is_subset(v) {
                        continue;
                    }
                    let pv = self.members[s].model.points(v);
                    let pfv = self.members[t].model.points(&f.apply(v));
                    let em = self.members[s].model.extension(&pu, &pv)?;
                    let en = self.members[t].model.extension(&pf, &pfv)?;
                    let av = self.alpha(e, v)?;
                    if av.mul(&em) != en.mul(&a) {
                        return Ok(PointVerdict::Defect(format!(
                            "alpha_{e} is not natural on {} -> {}",
                            u.label(),
                            v.label()
                        )));
                    }
                }
                if f.dt == 0 && f.dx == 0 && s == t && a != RationalMatrix::identity(a.rows) {
                    return Ok(PointVerdict::Defect(format!("alpha_{e} is not the identity at {}", u.label())));
                }
                components += 1;
            }
        }
        for &(fi, gi, hi) in &self.composites.clone() {
            let universe = self.members[self.embeddings[fi].0].universe.clone();
            let f = self.embeddings[fi].2.clone();
            for u in &universe {
                let af = self.alpha(fi, u)?;
                let ag = self.alpha(gi, &f.apply(u))?;
                let ah = self.alpha(hi, u)?;
                if ag.mul(&af) != ah {
                    return Ok(PointVerdict::Defect(format!(
                        "composition square fails for {gi} after {fi} at {}",
                        u.label()
                    )));
                }
            }
        }
        Ok(PointVerdict::Coherent { components })
    }
}

/// Convenience constructor for a family member.
pub fn member(name: &str, st: &Spacetime, mass2: Q, universe: Vec<Region>) -> FamilyMember {
    FamilyMember {
        name: name.to_string(),
        model: KgModel::new(st, mass2),
        universe,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{diamond, slab, Pt};
    use crate::site::{enumerate_universe, Flavor, SiteKind, UniverseConfig};

    fn cyl_site(kind: SiteKind, flavor: Flavor) -> Site {
        let st = Spacetime::cylinder(4, 0, 3).unwrap();
        let u = enumerate_universe(&st, kind, &UniverseConfig::default()).unwrap();
        Site::new(&st, kind, flavor, u).unwrap()
    }

    #[test]
    fn monotone_indicator_and_rejection() {
        let site = cyl_site(SiteKind::COpen, Flavor::Plain);
        let ind = build_indicator(&site, &Predicate::ContainsCauchySurface, AlgebraValue::qpower(2)).unwrap();
        assert!(ind.active_count() > 1);
        let s = slab(&site.st, 1, 2).unwrap();
        let err = build_indicator(&site, &Predicate::EqualsRegion(s), AlgebraValue::qpower(2));
        assert!(matches!(err, Err(Error::Construction(_))));
    }

    #[test]
    fn nat_counts_match_brute_force() {
        let site = cyl_site(SiteKind::Rc, Flavor::Plain);
        let cat = site.category();
        let a = build_indicator(&site, &Predicate::ContainsCauchySurface, AlgebraValue::qpower(2)).unwrap();
        let b = build_indicator(&site, &Predicate::ContainsCauchySurface, AlgebraValue::qpower(3)).unwrap();
        let n = count_nat_transforms(&cat, &a.values(), &b.values()).unwrap();
        assert_eq!(n, 8);
        let mut small: Vec<usize> = (0..site.len()).filter(|&i| !a.active[i]).take(10).collect();
        small.extend((0..site.len()).filter(|&i| a.active[i]).take(4));
        let sub = cat.restrict(&small);
        let av: Vec<_> = small.iter().map(|&i| a.value(i)).collect();
        let bv: Vec<_> = small.iter().map(|&i| b.value(i)).collect();
        let fast = count_nat_transforms(&sub, &av, &bv).unwrap();
        let slow = brute_force_nat_count(&sub, &av, &bv, 1_000_000).unwrap().unwrap();
        assert_eq!(fast as u64, slow);
    }

    #[test]
    fn epsilon_fails_for_pullback_to_full() {
        let st = Spacetime::plane(0, 6).with_span(-4, 4);
        let cfg = UniverseConfig::default();
        let n = Site::new(&st, SiteKind::COpen, Flavor::Plain, enumerate_universe(&st, SiteKind::COpen, &cfg).unwrap()).unwrap();
        let m_region = diamond(&st, Pt::new(1, 0), Pt::new(5, 0), false).unwrap();
        let mst = st.sub(&m_region).unwrap();
        let m = Site::new(&mst, SiteKind::COpen, Flavor::Plain, enumerate_universe(&mst, SiteKind::COpen, &cfg).unwrap()).unwrap();
        let f = Embedding::new(mst.clone(), st.clone(), 0, 0);
        let a = build_indicator(&n, &Predicate::ContainsImage(f.image()), AlgebraValue::qpower(2)).unwrap();
        for v in 0..n.len() {
            assert!(epsilon_iso_check(&n, &a, v).unwrap().is_iso());
        }
        let pb = pullback(&f, &m, &n, &a).unwrap();
        let full = m.index(&Region::Full).unwrap();
        let e = epsilon_iso_check(&m, &pb, full).unwrap();
        assert!(!e.is_iso());
        assert!(e.colimit.is_initial());
    }
}
