//! Lattice Klein-Gordon operator, leapfrog Green's operators and the
//! generator spaces `𝔏(W) = ℚ^W / P(K(W))`.
//!
//! `K(W)` is the space of fields supported in `W` whose image under `P`
//! stays in `W`. Finitely supported preimages are unique and live in the
//! causal hull of the source, so this is the lattice analogue of
//! `P C_c(W)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cauchy_development, hull, Backend, Dir, Pt, PointSet, Region, Spacetime};
use crate::linalg::{
    inverse, quotient_and_induced_map, rank_kernel, Echelon, QuotientSpace, RationalMatrix, Q,
};

/// Finitely supported lattice field; zero values are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Field(pub BTreeMap<Pt, Q>);

impl Field {
    pub fn delta(p: Pt) -> Field {
        let mut m = BTreeMap::new();
        m.insert(p, Q::one());
        Field(m)
    }

    pub fn get(&self, p: &Pt) -> Q {
        self.0.get(p).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_at(&mut self, p: Pt, v: &Q) {
        if v.is_zero() {
            return;
        }
        let e = self.0.entry(p).or_insert_with(Q::zero);
        *e += v;
        if e.is_zero() {
            self.0.remove(&p);
        }
    }

    pub fn axpy(&mut self, a: &Q, other: &Field) {
        for (p, v) in &other.0 {
            self.add_at(*p, &(a * v));
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        let mut r = self.clone();
        r.axpy(&-Q::one(), other);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn support(&self) -> Vec<Pt> {
        self.0.keys().copied().collect()
    }

    pub fn t_range(&self) -> Option<(i64, i64)> {
        let a = self.0.keys().map(|p| p.t).min()?;
        let b = self.0.keys().map(|p| p.t).max()?;
        Some((a, b))
    }

    pub fn supported_in(&self, s: &PointSet) -> bool {
        self.0.keys().all(|p| s.contains(p))
    }

    /// Coordinates in `ℚ^s`; the support must lie in `s`.
    pub fn coords(&self, s: &PointSet) -> Option<Vec<Q>> {
        let mut v = vec![Q::zero(); s.len()];
        for (p, x) in &self.0 {
            v[s.index_of(p)?] = x.clone();
        }
        Some(v)
    }

    pub fn from_coords(s: &PointSet, v: &[Q]) -> Field {
        let mut f = Field::default();
        for (p, x) in s.iter().zip(v) {
            f.add_at(*p, x);
        }
        f
    }

    pub fn dot(&self, other: &Field) -> Q {
        let mut acc = Q::zero();
        for (p, v) in &self.0 {
            if let Some(w) = other.0.get(p) {
                acc += v * w;
            }
        }
        acc
    }
}

/// The operator `P = -∂ₜ² + ∂ₓ² + m²` on a lattice.
#[derive(Clone, Debug)]
pub struct KleinGordon {
    pub st: Spacetime,
    pub mass2: Q,
}

impl KleinGordon {
    pub fn new(st: &Spacetime, mass2: Q) -> Self {
        KleinGordon {
            st: st.parent_lattice(),
            mass2,
        }
    }

    fn norm(&self, t: i64, x: i64) -> Pt {
        self.st.norm(Pt::new(t, x))
    }

    /// `(P δ_p)` as `(point, coefficient)` pairs.
    pub fn stencil(&self, p: Pt) -> [(Pt, Q); 5] {
        let m1 = -Q::one();
        [
            (p, self.mass2.clone()),
            (self.norm(p.t + 1, p.x), m1.clone()),
            (self.norm(p.t - 1, p.x), m1),
            (self.norm(p.t, p.x + 1), Q::one()),
            (self.norm(p.t, p.x - 1), Q::one()),
        ]
    }

    pub fn apply_p(&self, f: &Field) -> Field {
        let mut out = Field::default();
        for (p, v) in &f.0 {
            for (q, c) in self.stencil(*p) {
                out.add_at(q, &(v * c));
            }
        }
        out
    }

    /// Retarded (`Future`) or advanced (`Past`) Green's operator applied to
    /// `f`, evaluated on all rows between the support of `f` and `t_end`.
    pub fn green(&self, f: &Field, dir: Dir, t_end: i64) -> Result<Field> {
        let Some((a, b)) = f.t_range() else {
            return Ok(Field::default());
        };
        let (start, sign) = match dir {
            Dir::Future => (a, 1i64),
            Dir::Past => (b, -1i64),
        };
        if (t_end - start) * sign < 0 {
            return Ok(Field::default());
        }
        let steps = (t_end - start) * sign + 1;
        let (x0, width) = match self.st.backend {
            Backend::Cylinder(c) => (0, c),
            Backend::Plane => {
                let lo = f.0.keys().map(|p| p.x).min().unwrap() - steps - 1;
                let hi = f.0.keys().map(|p| p.x).max().unwrap() + steps + 1;
                (lo, hi - lo + 1)
            }
        };
        let w = width as usize;
        let idx = |x: i64| -> Option<usize> {
            match self.st.backend {
                Backend::Cylinder(c) => Some(x.rem_euclid(c) as usize),
                Backend::Plane => {
                    let i = x - x0;
                    (0..width).contains(&i).then_some(i as usize)
                }
            }
        };
        let src_row = |t: i64| -> Vec<Q> {
            let mut r = vec![Q::zero(); w];
            for (p, v) in f.0.range(Pt::new(t, i64::MIN)..=Pt::new(t, i64::MAX)) {
                r[idx(p.x).expect("source inside box")] = v.clone();
            }
            r
        };
        let mut out = Field::default();
        let mut prev = vec![Q::zero(); w];
        let mut cur = vec![Q::zero(); w];
        let mut t = start;
        while t != t_end {
            let src = src_row(t);
            let mut next = vec![Q::zero(); w];
            for (i, slot) in next.iter_mut().enumerate() {
                let x = x0 + i as i64;
                let mut v = -src[i].clone() - &prev[i] + &self.mass2 * &cur[i];
                if let Some(j) = idx(x + 1) {
                    v += &cur[j];
                }
                if let Some(j) = idx(x - 1) {
                    v += &cur[j];
                }
                *slot = v;
            }
            t += sign;
            for (i, v) in next.iter().enumerate() {
                out.add_at(self.norm(t, x0 + i as i64), v);
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Ok(out)
    }

    /// `G φ = G⁺φ - G⁻φ` on rows `lo..=hi`.
    pub fn propagator(&self, f: &Field, lo: i64, hi: i64) -> Result<Field> {
        let mut g = self.green(f, Dir::Future, hi)?;
        g.axpy(&-Q::one(), &self.green(f, Dir::Past, lo)?);
        g.0.retain(|p, _| p.t >= lo && p.t <= hi);
        Ok(g)
    }

    /// `σ(φ, ψ) = Σ φ · Gψ`.
    pub fn pairing(&self, f: &Field, g: &Field) -> Result<Q> {
        let Some((lo, hi)) = f.t_range() else {
            return Ok(Q::zero());
        };
        Ok(f.dot(&self.propagator(g, lo, hi)?))
    }

    /// Computes `𝔏(W)` for an explicit point set.
    pub fn generator_space(&self, w: &PointSet) -> GenSpace {
        let mut boundary: BTreeMap<Pt, usize> = BTreeMap::new();
        for p in w.iter() {
            for (q, _) in self.stencil(*p) {
                if !w.contains(&q) {
                    let n = boundary.len();
                    boundary.entry(q).or_insert(n);
                }
            }
        }
        let mut m = RationalMatrix::zeros(boundary.len(), w.len());
        for (j, p) in w.iter().enumerate() {
            for (q, c) in self.stencil(*p) {
                if let Some(&i) = boundary.get(&q) {
                    let v = m.get(i, j) + c;
                    m.set(i, j, v);
                }
            }
        }
        let (_, ker) = rank_kernel(&m);
        let mut sub = Echelon::new(w.len());
        for k in &ker {
            let pk = self.apply_p(&Field::from_coords(w, k));
            sub.insert(&pk.coords(w).expect("P K(W) stays in W"));
        }
        GenSpace {
            pts: w.clone(),
            kernel_dim: ker.len(),
            quot: QuotientSpace::new(sub),
        }
    }
}

/// `𝔏(W)` together with its presentation data.
#[derive(Clone, Debug)]
pub struct GenSpace {
    pub pts: PointSet,
    pub kernel_dim: usize,
    pub quot: QuotientSpace,
}

impl GenSpace {
    pub fn dim(&self) -> usize {
        self.quot.dim()
    }

    /// Class of a field supported in `W`.
    pub fn class(&self, f: &Field) -> Option<Vec<Q>> {
        Some(self.quot.project(&f.coords(&self.pts)?))
    }

    pub fn point_class(&self, p: &Pt) -> Option<Vec<Q>> {
        self.class(&Field::delta(*p))
    }

    /// Basis representatives `δ_p` for the free points `p`.
    pub fn basis_points(&self) -> Vec<Pt> {
        self.quot.free.iter().map(|&i| self.pts.as_slice()[i]).collect()
    }

    /// Representative field of a coordinate vector.
    pub fn section(&self, coords: &[Q]) -> Field {
        Field::from_coords(&self.pts, &self.quot.section(coords))
    }

    /// `P K(W)` as a subspace of `ℚ^W`.
    pub fn relations(&self) -> &Echelon {
        &self.quot.sub
    }
}

/// Cached generator spaces and maps for one lattice.
pub struct KgModel {
    pub kg: KleinGordon,
    /// The lattice on which regions are interpreted (may be a sub-lattice).
    pub site_st: Spacetime,
    cache: HashMap<PointSet, Arc<GenSpace>>,
    full_dim: Option<usize>,
}

impl KgModel {
    pub fn new(st: &Spacetime, mass2: Q) -> Self {
        KgModel {
            kg: KleinGordon::new(st, mass2),
            site_st: st.clone(),
            cache: HashMap::new(),
            full_dim: None,
        }
    }

    /// Explicit points of a region; `Full` is materialized on the window.
    pub fn points(&self, r: &Region) -> PointSet {
        self.site_st.materialize(r)
    }

    pub fn space_of(&mut self, w: &PointSet) -> Arc<GenSpace> {
        if let Some(g) = self.cache.get(w) {
            return g.clone();
        }
        let g = Arc::new(self.kg.generator_space(w));
        self.cache.insert(w.clone(), g.clone());
        g
    }

    pub fn space(&mut self, r: &Region) -> Arc<GenSpace> {
        let pts = self.points(r);
        self.space_of(&pts)
    }

    /// Dimension of the space of solutions on the whole cylinder, `None` on the plane.
    pub fn full_dim(&mut self) -> Option<usize> {
        if self.site_st.domain.is_some() {
            return None;
        }
        let c = self.kg.st.circumference()?;
        if let Some(d) = self.full_dim {
            return Some(d);
        }
        let pts: Vec<Pt> = (0..2).flat_map(|t| (0..c).map(move |x| Pt::new(t, x))).collect();
        let d = self.space_of(&PointSet::from_vec(pts)).dim();
        self.full_dim = Some(d);
        Some(d)
    }

    /// Extension map `𝔏(U) → 𝔏(V)` for `U ⊆ V`.
    pub fn extension(&mut self, u: &PointSet, v: &PointSet) -> Result<RationalMatrix> {
        if !u.is_subset(v) {
            return Err(Error::Invalid(format!("{u:?} is not inside {v:?}")));
        }
        let gu = self.space_of(u);
        let gv = self.space_of(v);
        let mut incl = RationalMatrix::zeros(v.len(), u.len());
        for (j, p) in u.iter().enumerate() {
            incl.set(v.index_of(p).unwrap(), j, Q::one());
        }
        quotient_and_induced_map(&gu.quot, &gv.quot, &incl)
    }

    /// `dim 𝔏(W) = dim 𝔏(D(W))`: the region carries complete Cauchy data.
    pub fn is_data_complete(&mut self, r: &Region) -> Result<bool> {
        let d = cauchy_development(&self.site_st, r)?;
        let here = self.space(r).dim();
        match (&d, self.site_st.domain.is_some()) {
            (Region::Full, false) => match self.full_dim() {
                Some(n) => Ok(here == n),
                None => Ok(false),
            },
            _ => {
                let there = self.space(&d).dim();
                Ok(here == there)
            }
        }
    }

    /// `𝔏(U) → 𝔏(V)` for `U ⊆ D(V)`: extend both into `hull(U ∪ V)` and
    /// invert the (iso) extension of `V`.
    pub fn localized_map(&mut self, u: &PointSet, v: &PointSet) -> Result<RationalMatrix> {
        if u.is_subset(v) {
            return self.extension(u, v);
        }
        let w = hull(&self.site_st, &u.union(v));
        let eu = self.extension(u, &w)?;
        let ev = self.extension(v, &w)?;
        let inv = inverse(&ev).ok_or_else(|| {
            Error::IllDefined(vec![
                format!("{v:?}"),
                format!("extension into {w:?} is not invertible"),
            ])
        })?;
        Ok(inv.mul(&eu))
    }

    /// The time-slice map `[φ] ↦ [P(χ₊ Gφ)]` with a step of `χ₊` between rows
    /// `t*` and `t*+1`; the first `t*` whose images stay in `V` is used.
    pub fn timeslice_map(&mut self, u: &PointSet, v: &PointSet) -> Result<Option<RationalMatrix>> {
        let gu = self.space_of(u);
        let gv = self.space_of(v);
        let (vlo, vhi) = v.t_range();
        let (ulo, uhi) = u.t_range();
        'outer: for ts in vlo - 1..=vhi {
            let mut cols = Vec::new();
            for p in gu.basis_points() {
                let phi = Field::delta(p);
                let lo = ts.min(ulo) - 1;
                let hi = (ts + 2).max(uhi) + 1;
                let g = self.kg.propagator(&phi, lo, hi)?;
                let img = self.step_source(&g, ts);
                let Some(c) = gv.class(&img) else {
                    continue 'outer;
                };
                cols.push(c);
            }
            return Ok(Some(RationalMatrix::from_cols(cols, gv.dim())));
        }
        Ok(None)
    }

    /// `P(χ₊ g)` for a solution `g`, where `χ₊` is the indicator of `t > ts`.
    pub fn step_source(&self, g: &Field, ts: i64) -> Field {
        let mut cut = g.clone();
        cut.0.retain(|p, _| p.t > ts);
        let mut out = self.kg.apply_p(&cut);
        out.0.retain(|p, _| p.t == ts || p.t == ts + 1);
        out
    }

    /// Matrix of `σ` on the basis of `𝔏(W)`.
    pub fn sigma_matrix(&mut self, w: &PointSet) -> Result<RationalMatrix> {
        let g = self.space_of(w);
        let pts = g.basis_points();
        let (lo, hi) = w.t_range();
        let mut m = RationalMatrix::zeros(pts.len(), pts.len());
        for (l, q) in pts.iter().enumerate() {
            let gq = self.kg.propagator(&Field::delta(*q), lo, hi)?;
            for (k, p) in pts.iter().enumerate() {
                m.set(k, l, gq.get(p));
            }
        }
        Ok(m)
    }

    /// `σ` on two classes of `𝔏(W)` given by coordinates.
    pub fn sigma(&mut self, w: &PointSet, a: &[Q], b: &[Q]) -> Result<Q> {
        let g = self.space_of(w);
        let fa = g.section(a);
        let fb = g.section(b);
        self.kg.pairing(&fa, &fb)
    }
}

/// Pass count of one property over a batch of seeded inputs.
#[derive(Clone, Debug, Serialize)]
pub struct PropertyTally {
    pub name: &'static str,
    pub total: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl PropertyTally {
    fn new(name: &'static str) -> Self {
        PropertyTally {
            name,
            total: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

/// Random field with 1 to 4 support points in a 3×5 box at `(t0, x0)`.
pub fn random_field(rng: &mut ChaCha8Rng, st: &Spacetime, t0: i64, x0: i64) -> Field {
    let mut f = Field::default();
    let n = rng.gen_range(1..=4);
    for _ in 0..n {
        let p = st.norm(Pt::new(t0 + rng.gen_range(0..3), x0 + rng.gen_range(0..5)));
        let v = Q::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into());
        f.add_at(p, &v);
    }
    if f.is_zero() {
        f.add_at(st.norm(Pt::new(t0, x0)), &Q::one());
    }
    f
}

fn restrict_rows(f: &Field, lo: i64, hi: i64) -> Field {
    let mut g = f.clone();
    g.0.retain(|p, _| p.t >= lo && p.t <= hi);
    g
}

/// Green's operator identities, cone support and the properties of `σ` on
/// `fields` seeded random fields.
pub fn property_suite(st: &Spacetime, mass2: Q, fields: usize, seed: u64) -> Result<Vec<PropertyTally>> {
    let kg = KleinGordon::new(st, mass2);
    let st = &kg.st;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names = [
        "P G+ = id",
        "P G- = id",
        "G+ P = id",
        "G- P = id",
        "cone support",
        "P G = 0",
        "P symmetric",
        "sigma antisymmetric",
        "sigma degenerate on P",
        "sigma causal support",
    ];
    let mut tallies: Vec<PropertyTally> = names.iter().map(|n| PropertyTally::new(n)).collect();
    for k in 0..fields {
        let phi = random_field(&mut rng, st, 0, 0);
        let (dt, dx) = (rng.gen_range(-1..=1), rng.gen_range(-2..=2));
        let psi = random_field(&mut rng, st, dt, dx);
        let chi = random_field(&mut rng, st, 1, 1);
        let (a, b) = phi.t_range().unwrap();
        let horizon = 6;
        let gp = kg.green(&phi, Dir::Future, b + horizon)?;
        let gm = kg.green(&phi, Dir::Past, a - horizon)?;
        let lbl = || format!("field #{k}: {:?}", phi.0);
        tallies[0].record(restrict_rows(&kg.apply_p(&gp), a - 1, b + horizon - 1) == phi, lbl);
        tallies[1].record(restrict_rows(&kg.apply_p(&gm), a - horizon + 1, b + 1) == phi, lbl);
        let pphi = kg.apply_p(&phi);
        tallies[2].record(kg.green(&pphi, Dir::Future, b + horizon)? == phi, lbl);
        tallies[3].record(kg.green(&pphi, Dir::Past, a - horizon)? == phi, lbl);
        let src = phi.support();
        let in_cone = gp.0.keys().all(|q| src.iter().any(|p| st.causal(p, q)))
            && gm.0.keys().all(|q| src.iter().any(|p| st.causal(q, p)));
        tallies[4].record(in_cone, lbl);
        let g = kg.propagator(&phi, a - horizon, b + horizon)?;
        let pg = restrict_rows(&kg.apply_p(&g), a - horizon + 1, b + horizon - 1);
        tallies[5].record(pg.is_zero(), lbl);
        tallies[6].record(kg.apply_p(&phi).dot(&psi) == phi.dot(&kg.apply_p(&psi)), lbl);
        let s1 = kg.pairing(&phi, &psi)?;
        let s2 = kg.pairing(&psi, &phi)?;
        tallies[7].record(s1 == -s2 && kg.pairing(&phi, &phi)?.is_zero(), lbl);
        tallies[8].record(kg.pairing(&kg.apply_p(&chi), &psi)?.is_zero(), lbl);
        // a field spacelike to all of supp φ; on a narrow cylinder φ may see
        // every point, and then its first support point stands in
        let (near, far) = match st.backend {
            Backend::Plane => {
                let mut f = psi.clone();
                f.0 = f.0.into_iter().map(|(p, v)| (Pt::new(p.t, p.x + 40), v)).collect();
                (phi.clone(), f)
            }
            Backend::Cylinder(c) => {
                let spacelike = |src: &[Pt]| -> Vec<Pt> {
                    (a..=b)
                        .flat_map(|t| (0..c).map(move |x| Pt::new(t, x)))
                        .filter(|q| src.iter().all(|p| !st.related(p, q)))
                        .collect()
                };
                let mut near = phi.clone();
                let mut cands = spacelike(&src);
                if cands.is_empty() {
                    near = Field::delta(src[0]);
                    cands = spacelike(&src[..1]);
                }
                (near, Field::delta(cands[rng.gen_range(0..cands.len())]))
            }
        };
        tallies[9].record(kg.pairing(&near, &far)?.is_zero(), lbl);
    }
    Ok(tallies)
}

/// Outcome of the time-slice check on a universe.
#[derive(Clone, Debug, Default, Serialize)]
pub struct TimeSliceTally {
    pub regions: usize,
    pub data_complete: usize,
    pub cauchy_pairs: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    /// Data-incomplete regions lattice-Cauchy in a data-complete one.
    pub incomplete_examples: Vec<String>,
}

/// Every Cauchy pair `U ⊆ V` of data-complete regions has an invertible
/// extension map, equal to the time-slice map when one is admissible.
pub fn time_slice_suite(model: &mut KgModel, universe: &[Region]) -> Result<TimeSliceTally> {
    let st = model.site_st.clone();
    let mut out = TimeSliceTally {
        regions: universe.len(),
        ..Default::default()
    };
    let mut complete = Vec::new();
    let mut incomplete = Vec::new();
    for u in universe.iter().filter(|u| u.is_relatively_compact()) {
        let d = cauchy_development(&st, u)?;
        if model.is_data_complete(u)? {
            complete.push((u.clone(), d));
        } else {
            incomplete.push(u.clone());
        }
    }
    out.data_complete = complete.len();
    for u in incomplete.iter().take(3) {
        out.incomplete_examples.push(u.label());
    }
    for (u, du) in &complete {
        for (v, dv) in &complete {
            if u == v || !u.is_subset(v) || du != dv {
                continue;
            }
            out.cauchy_pairs += 1;
            let (pu, pv) = (model.points(u), model.points(v));
            let e = model.extension(&pu, &pv)?;
            let mut ok = e.rows == e.cols && inverse(&e).is_some();
            if ok {
                if let Some(ts) = model.timeslice_map(&pu, &pv)? {
                    ok = ts == e;
                }
            }
            if !ok {
                out.failures += 1;
                if out.first_failure.is_none() {
                    out.first_failure = Some(format!("{} -> {}", u.label(), v.label()));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{diamond, slab};
    use crate::linalg::{q, qf};

    #[test]
    fn stencil_of_delta() {
        let st = Spacetime::plane(-3, 3);
        let kg = KleinGordon::new(&st, q(0));
        let pd = kg.apply_p(&Field::delta(Pt::new(0, 0)));
        assert_eq!(pd.get(&Pt::new(1, 0)), q(-1));
        assert_eq!(pd.get(&Pt::new(-1, 0)), q(-1));
        assert_eq!(pd.get(&Pt::new(0, 1)), q(1));
        assert_eq!(pd.get(&Pt::new(0, 0)), q(0));
        assert_eq!(pd.0.len(), 4);
    }

    #[test]
    fn green_inverts_p() {
        let st = Spacetime::cylinder(5, 0, 10).unwrap();
        let kg = KleinGordon::new(&st, qf(1, 4));
        let mut f = Field::delta(Pt::new(2, 1));
        f.add_at(Pt::new(3, 3), &q(2));
        let g = kg.green(&f, Dir::Future, 9).unwrap();
        let pg = kg.apply_p(&g);
        for t in 1..=8 {
            for x in 0..5 {
                let p = Pt::new(t, x);
                assert_eq!(pg.get(&p), f.get(&p), "at {p}");
            }
        }
        assert_eq!(g.get(&Pt::new(3, 1)), q(-1));
    }

    #[test]
    fn generator_dims_on_slabs() {
        let st = Spacetime::cylinder(4, 0, 6).unwrap();
        let mut m = KgModel::new(&st, qf(1, 4));
        let row = slab(&st, 2, 2).unwrap();
        assert_eq!(m.space(&row).dim(), 4);
        for h in 1..4 {
            let s = slab(&st, 1, 1 + h).unwrap();
            assert_eq!(m.space(&s).dim(), 8);
        }
        assert_eq!(m.full_dim(), Some(8));
    }

    #[test]
    fn timeslice_agrees_with_localized_map() {
        let st = Spacetime::cylinder(4, 0, 8).unwrap();
        let mut m = KgModel::new(&st, qf(1, 4));
        let u = m.points(&slab(&st, 5, 6).unwrap());
        let v = m.points(&slab(&st, 1, 2).unwrap());
        let loc = m.localized_map(&u, &v).unwrap();
        let ts = m.timeslice_map(&u, &v).unwrap().unwrap();
        assert_eq!(loc, ts);
        let st = Spacetime::plane(0, 8).with_span(-6, 6);
        let mut m = KgModel::new(&st, q(0));
        let big = diamond(&st, Pt::new(0, 0), Pt::new(8, 0), false).unwrap();
        let small = diamond(&st, Pt::new(3, 0), Pt::new(5, 0), false).unwrap();
        let (b, s) = (m.points(&big), m.points(&small));
        assert_eq!(m.localized_map(&s, &b).unwrap(), m.timeslice_map(&s, &b).unwrap().unwrap());
    }
}
