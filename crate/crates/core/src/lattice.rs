//! Discrete 1+1 dimensional causal lattices.
//!
//! Points are `(t, x)` pairs. A causal step goes from `(t, x)` to `(t + 1, x')`
//! with `|x' - x| <= 1`, the spatial distance being cyclic on the cylinder.
//! A spacetime may also be a finite causally convex piece of a plane or
//! cylinder (a sub-lattice), which is how embeddings with proper images are
//! modelled.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pt {
    pub t: i64,
    pub x: i64,
}

impl Pt {
    pub const fn new(t: i64, x: i64) -> Self {
        Pt { t, x }
    }
}

impl fmt::Display for Pt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t, self.x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Plane,
    Cylinder(i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    Future,
    Past,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strictness {
    Causal,
    Chronological,
}

/// Sorted, deduplicated, shared point list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet(Arc<Vec<Pt>>);

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

impl PointSet {
    pub fn from_vec(mut v: Vec<Pt>) -> Self {
        v.sort_unstable();
        v.dedup();
        PointSet(Arc::new(v))
    }

    pub fn as_slice(&self) -> &[Pt] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Pt> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &Pt) -> bool {
        self.0.binary_search(p).is_ok()
    }

    pub fn index_of(&self, p: &Pt) -> Option<usize> {
        self.0.binary_search(p).ok()
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let (mut i, mut j) = (0, 0);
        let (a, b) = (self.as_slice(), other.as_slice());
        while i < a.len() {
            if j >= b.len() {
                return false;
            }
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Less => return false,
            }
        }
        true
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet(Arc::new(
            self.iter().filter(|p| other.contains(p)).copied().collect(),
        ))
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut v: Vec<Pt> = self.iter().chain(other.iter()).copied().collect();
        v.sort_unstable();
        v.dedup();
        PointSet(Arc::new(v))
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet(Arc::new(
            self.iter().filter(|p| !other.contains(p)).copied().collect(),
        ))
    }

    pub fn t_range(&self) -> (i64, i64) {
        let a = self.0.first().map(|p| p.t).unwrap_or(0);
        let b = self.0.last().map(|p| p.t).unwrap_or(0);
        (a, b)
    }

    pub fn x_range(&self) -> (i64, i64) {
        let lo = self.iter().map(|p| p.x).min().unwrap_or(0);
        let hi = self.iter().map(|p| p.x).max().unwrap_or(0);
        (lo, hi)
    }

    /// Points of the set lying on row `t`, in increasing `x`.
    pub fn row(&self, t: i64) -> &[Pt] {
        let lo = self.0.partition_point(|p| p.t < t);
        let hi = self.0.partition_point(|p| p.t <= t);
        &self.0[lo..hi]
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// The whole spacetime. For a sub-lattice this is the domain itself.
    Full,
    Set(PointSet),
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Full => write!(f, "Full"),
            Region::Set(s) => write!(f, "{s:?}"),
        }
    }
}

impl Region {
    pub fn is_full(&self) -> bool {
        matches!(self, Region::Full)
    }

    pub fn is_relatively_compact(&self) -> bool {
        !self.is_full()
    }

    pub fn set(&self) -> Option<&PointSet> {
        match self {
            Region::Full => None,
            Region::Set(s) => Some(s),
        }
    }

    pub fn points(&self) -> Result<&PointSet> {
        self.set()
            .ok_or_else(|| Error::Invalid("operation needs an explicit region".into()))
    }

    pub fn len(&self) -> Option<usize> {
        self.set().map(|s| s.len())
    }

    pub fn contains(&self, p: &Pt) -> bool {
        match self {
            Region::Full => true,
            Region::Set(s) => s.contains(p),
        }
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        match (self, other) {
            (_, Region::Full) => true,
            (Region::Full, Region::Set(_)) => false,
            (Region::Set(a), Region::Set(b)) => a.is_subset(b),
        }
    }

    /// Compact textual form used in digests and reports.
    pub fn label(&self) -> String {
        format!("{self:?}")
    }
}

/// A lattice spacetime: backend, computation window and optional finite domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spacetime {
    pub backend: Backend,
    /// Time interval used for materialized computations.
    pub window: (i64, i64),
    /// Spatial interval materialized on the plane (ignored on the cylinder).
    pub span: (i64, i64),
    /// When present the spacetime is this causally convex sub-lattice.
    pub domain: Option<PointSet>,
    /// Overrides the default margin used for developments and complements.
    pub margin: Option<i64>,
}

impl Spacetime {
    pub fn plane(t0: i64, t1: i64) -> Self {
        Spacetime {
            backend: Backend::Plane,
            window: (t0, t1),
            span: (t0, t1),
            domain: None,
            margin: None,
        }
    }

    pub fn cylinder(c: i64, t0: i64, t1: i64) -> Result<Self> {
        if c < 3 {
            return Err(Error::Invalid(format!("circumference {c} < 3")));
        }
        Ok(Spacetime {
            backend: Backend::Cylinder(c),
            window: (t0, t1),
            span: (0, c - 1),
            domain: None,
            margin: None,
        })
    }

    pub fn with_span(mut self, x0: i64, x1: i64) -> Self {
        if self.backend == Backend::Plane {
            self.span = (x0, x1);
        }
        self
    }

    pub fn with_margin(mut self, m: Option<i64>) -> Self {
        self.margin = m;
        self
    }

    /// The sub-lattice spacetime on a causally convex region of `self`.
    pub fn sub(&self, region: &Region) -> Result<Spacetime> {
        let pts = region.points()?.clone();
        if pts.is_empty() {
            return Err(Error::Invalid("empty domain".into()));
        }
        if !is_causally_convex(self, region) {
            return Err(Error::NotConvex(region.label()));
        }
        let (t0, t1) = pts.t_range();
        let (x0, x1) = pts.x_range();
        Ok(Spacetime {
            backend: self.backend,
            window: (t0, t1),
            span: (x0, x1),
            domain: Some(pts),
            margin: self.margin,
        })
    }

    /// Same backend, no domain restriction.
    pub fn parent_lattice(&self) -> Spacetime {
        Spacetime {
            domain: None,
            ..self.clone()
        }
    }

    pub fn circumference(&self) -> Option<i64> {
        match self.backend {
            Backend::Plane => None,
            Backend::Cylinder(c) => Some(c),
        }
    }

    pub fn norm(&self, p: Pt) -> Pt {
        match self.backend {
            Backend::Plane => p,
            Backend::Cylinder(c) => Pt::new(p.t, p.x.rem_euclid(c)),
        }
    }

    pub fn dist(&self, x1: i64, x2: i64) -> i64 {
        match self.backend {
            Backend::Plane => (x1 - x2).abs(),
            Backend::Cylinder(c) => {
                let d = (x1 - x2).rem_euclid(c);
                d.min(c - d)
            }
        }
    }

    /// `p <= q` in the causal order.
    pub fn causal(&self, p: &Pt, q: &Pt) -> bool {
        let dt = q.t - p.t;
        dt >= 0 && self.dist(p.x, q.x) <= dt
    }

    /// `p << q`: reachable along a path with at least one interior step.
    pub fn chrono(&self, p: &Pt, q: &Pt) -> bool {
        let dt = q.t - p.t;
        dt > 0 && self.dist(p.x, q.x) < dt
    }

    pub fn related(&self, p: &Pt, q: &Pt) -> bool {
        self.causal(p, q) || self.causal(q, p)
    }

    pub fn in_domain(&self, p: &Pt) -> bool {
        match &self.domain {
            None => true,
            Some(d) => d.contains(p),
        }
    }

    pub fn in_window(&self, p: &Pt) -> bool {
        match &self.domain {
            Some(d) => d.contains(p),
            None => {
                let tw = p.t >= self.window.0 && p.t <= self.window.1;
                match self.backend {
                    Backend::Plane => tw && p.x >= self.span.0 && p.x <= self.span.1,
                    Backend::Cylinder(_) => tw,
                }
            }
        }
    }

    /// Immediate causal neighbours one step in `dir`, within the domain.
    pub fn steps(&self, p: Pt, dir: Dir) -> impl Iterator<Item = Pt> + '_ {
        let dt = match dir {
            Dir::Future => 1,
            Dir::Past => -1,
        };
        (-1..=1)
            .map(move |dx| self.norm(Pt::new(p.t + dt, p.x + dx)))
            .filter(move |q| self.in_domain(q))
    }

    /// Normalizes a point list into a region of this spacetime.
    pub fn region(&self, pts: impl IntoIterator<Item = Pt>) -> Result<Region> {
        let v: Vec<Pt> = pts.into_iter().map(|p| self.norm(p)).collect();
        let set = PointSet::from_vec(v);
        if set.is_empty() {
            return Err(Error::Invalid("empty region".into()));
        }
        if let Some(d) = &self.domain {
            if !set.is_subset(d) {
                return Err(Error::Invalid(format!(
                    "region {set:?} leaves the domain of the spacetime"
                )));
            }
            if set.len() == d.len() {
                return Ok(Region::Full);
            }
        }
        Ok(Region::Set(set))
    }

    /// Like `region` but an empty input gives `None`.
    pub fn region_opt(&self, pts: impl IntoIterator<Item = Pt>) -> Option<Region> {
        self.region(pts).ok()
    }

    /// Materialized points of the whole spacetime.
    pub fn full_points(&self) -> PointSet {
        if let Some(d) = &self.domain {
            return d.clone();
        }
        let (t0, t1) = self.window;
        let (x0, x1) = match self.backend {
            Backend::Plane => self.span,
            Backend::Cylinder(c) => (0, c - 1),
        };
        let mut v = Vec::new();
        for t in t0..=t1 {
            for x in x0..=x1 {
                v.push(Pt::new(t, x));
            }
        }
        PointSet::from_vec(v)
    }

    /// Explicit point set of a region, materializing `Full` on the window.
    pub fn materialize(&self, r: &Region) -> PointSet {
        match r {
            Region::Full => self.full_points(),
            Region::Set(s) => s.clone(),
        }
    }

    pub fn default_margin(&self, s: &PointSet) -> i64 {
        if let Some(m) = self.margin {
            return m;
        }
        let (a, b) = s.t_range();
        let (x0, x1) = s.x_range();
        let diam = match self.backend {
            Backend::Plane => x1 - x0,
            Backend::Cylinder(c) => (x1 - x0).min(c) + c,
        };
        (b - a) + diam + 1
    }
}

/// Diamond `J+(bottom) ∩ J-(top)`, or the strict `I+(bottom) ∩ I-(top)`.
pub fn diamond(st: &Spacetime, bottom: Pt, top: Pt, strict: bool) -> Result<Region> {
    let (b, t) = if strict {
        (Pt::new(bottom.t + 1, bottom.x), Pt::new(top.t - 1, top.x))
    } else {
        (bottom, top)
    };
    if !st.causal(&b, &t) {
        return Err(Error::Invalid(format!("empty diamond {bottom}..{top}")));
    }
    let mut v = Vec::new();
    for tt in b.t..=t.t {
        let r = tt - b.t;
        match st.backend {
            Backend::Plane => {
                for x in (b.x - r)..=(b.x + r) {
                    let p = Pt::new(tt, x);
                    if st.causal(&p, &t) {
                        v.push(p);
                    }
                }
            }
            Backend::Cylinder(c) => {
                for x in 0..c {
                    let p = Pt::new(tt, x);
                    if st.causal(&b, &p) && st.causal(&p, &t) {
                        v.push(p);
                    }
                }
            }
        }
    }
    let v: Vec<Pt> = v.into_iter().filter(|p| st.in_domain(p)).collect();
    st.region(v)
}

/// Every strict and non-strict diamond lying inside the materialized window.
pub fn all_diamonds(st: &Spacetime) -> Vec<Region> {
    let pts = st.full_points();
    let mut out = Vec::new();
    for b in pts.iter() {
        for t in pts.iter() {
            if !st.causal(b, t) {
                continue;
            }
            for strict in [false, true] {
                if let Ok(d) = diamond(st, *b, *t, strict) {
                    if d.set().is_some_and(|s| s.iter().all(|p| st.in_window(p))) {
                        out.push(d);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Rows `t0..=t1` of the cylinder.
pub fn slab(st: &Spacetime, t0: i64, t1: i64) -> Result<Region> {
    let c = st
        .circumference()
        .ok_or_else(|| Error::Invalid("slabs exist only on the cylinder".into()))?;
    if t1 < t0 {
        return Err(Error::Invalid(format!("empty slab {t0}..{t1}")));
    }
    let mut v = Vec::new();
    for t in t0..=t1 {
        for x in 0..c {
            let p = Pt::new(t, x);
            if st.in_domain(&p) {
                v.push(p);
            }
        }
    }
    st.region(v)
}

fn dilate(st: &Spacetime, row: &BTreeSet<i64>) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for &x in row {
        for dx in -1..=1 {
            out.insert(st.norm(Pt::new(0, x + dx)).x);
        }
    }
    out
}

/// `J±(S)` or `I±(S)`, truncated at time `horizon`.
pub fn cone(
    st: &Spacetime,
    s: &Region,
    dir: Dir,
    strict: Strictness,
    horizon: i64,
) -> Result<Region> {
    let s = match s {
        Region::Full => return Ok(Region::Full),
        Region::Set(s) => s,
    };
    let (a, b) = s.t_range();
    let ok = match dir {
        Dir::Future => horizon >= b,
        Dir::Past => horizon <= a,
    };
    if !ok {
        return Err(Error::WindowTooSmall(format!(
            "horizon {horizon} does not reach the input rows {a}..{b}"
        )));
    }
    let shift = match (dir, strict) {
        (_, Strictness::Causal) => 0,
        (Dir::Future, Strictness::Chronological) => 1,
        (Dir::Past, Strictness::Chronological) => -1,
    };
    let rows: Vec<i64> = match dir {
        Dir::Future => (a..=horizon).collect(),
        Dir::Past => (horizon..=b).rev().collect(),
    };
    let mut cur: BTreeSet<i64> = BTreeSet::new();
    let mut out = Vec::new();
    for (k, &t) in rows.iter().enumerate() {
        if k > 0 {
            cur = dilate(st, &cur);
        }
        for p in s.row(t - shift) {
            cur.insert(p.x);
        }
        if let Some(d) = &st.domain {
            cur.retain(|x| d.contains(&Pt::new(t, *x)));
        }
        out.extend(cur.iter().map(|&x| Pt::new(t, x)));
    }
    Ok(st.region_opt(out).unwrap_or_else(|| Region::Set(PointSet::from_vec(vec![]))))
}

/// `J+(S) ∩ J-(S)`.
pub fn hull(st: &Spacetime, s: &PointSet) -> PointSet {
    let (a, b) = s.t_range();
    let mut fwd: Vec<BTreeSet<i64>> = Vec::with_capacity((b - a + 1) as usize);
    let mut cur = BTreeSet::new();
    for t in a..=b {
        if t > a {
            cur = dilate(st, &cur);
        }
        cur.extend(s.row(t).iter().map(|p| p.x));
        fwd.push(cur.clone());
    }
    let mut out = Vec::new();
    let mut back = BTreeSet::new();
    for t in (a..=b).rev() {
        if t < b {
            back = dilate(st, &back);
        }
        back.extend(s.row(t).iter().map(|p| p.x));
        for x in fwd[(t - a) as usize].intersection(&back) {
            let p = Pt::new(t, *x);
            if st.in_domain(&p) {
                out.push(p);
            }
        }
    }
    PointSet::from_vec(out)
}

pub fn hull_region(st: &Spacetime, s: &Region) -> Region {
    match s {
        Region::Full => Region::Full,
        Region::Set(p) => st
            .region(hull(st, p).iter().copied())
            .unwrap_or_else(|_| s.clone()),
    }
}

pub fn is_causally_convex(st: &Spacetime, u: &Region) -> bool {
    match u {
        Region::Full => true,
        Region::Set(s) => hull(st, s).len() == s.len(),
    }
}

/// Dense boolean grid over a box of rows; the cylinder box spans every `x`.
struct Grid {
    t0: i64,
    nt: i64,
    x0: i64,
    nx: i64,
    cyl: Option<i64>,
    v: Vec<bool>,
}

impl Grid {
    fn new(st: &Spacetime, t0: i64, t1: i64, x0: i64, x1: i64) -> Grid {
        let cyl = st.circumference();
        let (x0, nx) = match cyl {
            Some(c) => (0, c),
            None => (x0, x1 - x0 + 1),
        };
        let nt = t1 - t0 + 1;
        Grid {
            t0,
            nt,
            x0,
            nx,
            cyl,
            v: vec![false; (nt.max(0) * nx.max(0)) as usize],
        }
    }

    fn idx(&self, t: i64, x: i64) -> Option<usize> {
        let x = match self.cyl {
            Some(c) => x.rem_euclid(c),
            None => x,
        };
        let (dt, dx) = (t - self.t0, x - self.x0);
        if dt < 0 || dt >= self.nt || dx < 0 || dx >= self.nx {
            None
        } else {
            Some((dt * self.nx + dx) as usize)
        }
    }

    fn get(&self, t: i64, x: i64, outside: bool) -> bool {
        self.idx(t, x).map(|i| self.v[i]).unwrap_or(outside)
    }

    fn set(&mut self, t: i64, x: i64, val: bool) {
        if let Some(i) = self.idx(t, x) {
            self.v[i] = val;
        }
    }

    fn xs(&self) -> std::ops::Range<i64> {
        self.x0..self.x0 + self.nx
    }

    fn row_full(&self, t: i64) -> bool {
        self.xs().all(|x| self.get(t, x, false))
    }
}

fn full_if_row(st: &Spacetime, pts: Vec<Pt>, rows: (i64, i64), grid: &Grid) -> Region {
    if st.circumference().is_some() && (rows.0..=rows.1).any(|t| grid.row_full(t)) {
        return Region::Full;
    }
    Region::Set(PointSet::from_vec(pts))
}

/// Development of `u` on the unrestricted lattice, looking `m` rows beyond `u`.
fn development_abs(st: &Spacetime, u: &PointSet, m: i64) -> Region {
    let (a, b) = u.t_range();
    let (xl, xr) = u.x_range();
    let (lo, hi) = (a - m, b + m);
    let mut inu = Grid::new(st, a, b, xl - 1, xr + 1);
    for p in u.iter() {
        inu.set(p.t, p.x, true);
    }
    let mut avoid_f = Grid::new(st, lo, b + 1, xl - 1, xr + 1);
    for x in avoid_f.xs() {
        avoid_f.set(b + 1, x, true);
    }
    for t in (lo..=b).rev() {
        for x in avoid_f.xs() {
            let v = !inu.get(t, x, false) && (-1..=1).any(|d| avoid_f.get(t + 1, x + d, true));
            avoid_f.set(t, x, v);
        }
    }
    let mut avoid_p = Grid::new(st, a - 1, hi, xl - 1, xr + 1);
    for x in avoid_p.xs() {
        avoid_p.set(a - 1, x, true);
    }
    for t in a..=hi {
        for x in avoid_p.xs() {
            let v = !inu.get(t, x, false) && (-1..=1).any(|d| avoid_p.get(t - 1, x + d, true));
            avoid_p.set(t, x, v);
        }
    }
    let mut res = Grid::new(st, lo, hi, xl - 1, xr + 1);
    let mut pts = Vec::new();
    for t in lo..=hi {
        for x in res.xs() {
            let inside = inu.get(t, x, false)
                || (t <= b && !avoid_f.get(t, x, true))
                || (t >= a && !avoid_p.get(t, x, true));
            if inside {
                res.set(t, x, true);
                pts.push(Pt::new(t, x));
            }
        }
    }
    full_if_row(st, pts, (lo, hi), &res)
}

/// `D_V(U)`: points of `v` all of whose paths meet `u` before leaving `v`.
///
/// A path may step out of `v` from any point that has a neighbour outside,
/// as an open subset would allow; this keeps `D_V(U) = D(U) ∩ V` for
/// causally convex `v`.
pub fn development_within(st: &Spacetime, u: &PointSet, v: &PointSet) -> Result<PointSet> {
    if !u.is_subset(v) {
        return Err(Error::Invalid("relative development needs U ⊆ V".into()));
    }
    let pts = v.as_slice();
    let n = pts.len();
    let inu: Vec<bool> = pts.iter().map(|p| u.contains(p)).collect();
    // successor indices, plus whether some step leaves `v`
    let succ = |p: Pt, dir: Dir| -> (Vec<usize>, bool) {
        let dt = if dir == Dir::Future { 1 } else { -1 };
        let mut out = Vec::with_capacity(3);
        let mut exits = false;
        for dx in -1..=1 {
            match v.index_of(&st.norm(Pt::new(p.t + dt, p.x + dx))) {
                Some(j) => out.push(j),
                None => exits = true,
            }
        }
        (out, exits)
    };
    let mut avoid_f = vec![false; n];
    for i in (0..n).rev() {
        if inu[i] {
            continue;
        }
        let (s, exits) = succ(pts[i], Dir::Future);
        avoid_f[i] = exits || s.iter().any(|&j| avoid_f[j]);
    }
    let mut avoid_p = vec![false; n];
    for i in 0..n {
        if inu[i] {
            continue;
        }
        let (s, exits) = succ(pts[i], Dir::Past);
        avoid_p[i] = exits || s.iter().any(|&j| avoid_p[j]);
    }
    Ok(PointSet::from_vec(
        (0..n)
            .filter(|&i| inu[i] || !avoid_f[i] || !avoid_p[i])
            .map(|i| pts[i])
            .collect(),
    ))
}

/// Recomputes with doubled margins until two consecutive results agree.
pub fn stabilized<F>(m0: i64, what: &str, f: F) -> Result<Region>
where
    F: Fn(i64) -> Region,
{
    let m0 = m0.max(1);
    let r0 = f(m0);
    let r1 = f(2 * m0);
    if r0 == r1 {
        return Ok(r1);
    }
    let r2 = f(4 * m0);
    if r1 == r2 {
        Ok(r2)
    } else {
        Err(Error::Unstable(format!("{what} still changing at margin {}", 4 * m0)))
    }
}

/// True iff the result at margin `m` survives one doubling.
pub fn stabilization_check<F>(m: i64, f: F) -> bool
where
    F: Fn(i64) -> Region,
{
    f(m) == f((2 * m).max(1))
}

fn wrap(st: &Spacetime, s: PointSet) -> Region {
    match &st.domain {
        Some(d) if d.len() == s.len() => Region::Full,
        _ => Region::Set(s),
    }
}

/// `D(U)` at an explicit margin; `cauchy_development` stabilizes this.
pub fn development_at_margin(st: &Spacetime, u: &PointSet, m: i64) -> Region {
    match &st.domain {
        Some(d) => wrap(st, development_within(st, u, d).expect("region inside domain")),
        None => development_abs(st, u, m),
    }
}

pub fn cauchy_development(st: &Spacetime, u: &Region) -> Result<Region> {
    let s = match u {
        Region::Full => return Ok(Region::Full),
        Region::Set(s) => s,
    };
    if let Some(d) = &st.domain {
        return Ok(wrap(st, development_within(st, s, d)?));
    }
    stabilized(st.default_margin(s), "development", |m| development_abs(st, s, m))
}

/// `D_V(U)` for `U ⊆ V`, either region possibly `Full`.
pub fn development_in(st: &Spacetime, u: &Region, v: &Region) -> Result<Region> {
    match v {
        Region::Full => cauchy_development(st, u),
        Region::Set(vs) => {
            let us = u
                .set()
                .ok_or_else(|| Error::Invalid("Full is not inside an explicit region".into()))?;
            let d = development_within(st, us, vs)?;
            Ok(if st.domain.as_ref().map(|dm| dm.len()) == Some(d.len()) {
                Region::Full
            } else {
                Region::Set(d)
            })
        }
    }
}

fn double_complement_abs(st: &Spacetime, u: &PointSet, m: i64) -> Region {
    let (a, b) = u.t_range();
    let (xl, xr) = u.x_range();
    let tt = b - a;
    let (lo, hi) = (a - m, b + m);
    let pad = 2 * tt + 2 * m + 2;
    let mut j = Grid::new(st, lo, hi, xl - pad, xr + pad);
    let mut cur: BTreeSet<i64> = BTreeSet::new();
    for t in a..=hi {
        if t > a {
            cur = dilate(st, &cur);
        }
        cur.extend(u.row(t).iter().map(|p| p.x));
        for &x in &cur {
            j.set(t, x, true);
        }
    }
    cur.clear();
    for t in (lo..=b).rev() {
        if t < b {
            cur = dilate(st, &cur);
        }
        cur.extend(u.row(t).iter().map(|p| p.x));
        for &x in &cur {
            j.set(t, x, true);
        }
    }
    // per-row prefix sums for interval containment on the plane
    let nx = j.nx as usize;
    let mut pre = vec![0u32; (j.nt as usize) * (nx + 1)];
    for r in 0..j.nt as usize {
        for c in 0..nx {
            pre[r * (nx + 1) + c + 1] = pre[r * (nx + 1) + c] + j.v[r * nx + c] as u32;
        }
    }
    let covered = |t: i64, x: i64, rad: i64| -> bool {
        match st.circumference() {
            Some(c) => {
                if 2 * rad + 1 >= c {
                    (0..c).all(|y| j.get(t, y, false))
                } else {
                    (x - rad..=x + rad).all(|y| j.get(t, y, false))
                }
            }
            None => {
                let (l, r) = (x - rad - j.x0, x + rad - j.x0);
                if l < 0 || r >= j.nx {
                    return false;
                }
                let row = ((t - j.t0) as usize) * (nx + 1);
                let s = pre[row + r as usize + 1] - pre[row + l as usize];
                s as i64 == 2 * rad + 1
            }
        }
    };
    let (cx0, cx1) = (xl - tt - 1, xr + tt + 1);
    let mut res = Grid::new(st, lo, hi, cx0, cx1);
    let mut pts = Vec::new();
    for tp in lo..=hi {
        for xp in res.xs() {
            let (r0, r1) = (tp.min(a), tp.max(b));
            let ok = (r0..=r1).all(|t| covered(t, xp, (t - tp).abs()));
            if ok {
                res.set(tp, xp, true);
                pts.push(Pt::new(tp, xp));
            }
        }
    }
    full_if_row(st, pts, (lo, hi), &res)
}

fn double_complement_within(st: &Spacetime, u: &PointSet, d: &PointSet) -> PointSet {
    let in_j = |q: &Pt| u.iter().any(|p| st.related(p, q));
    let outside: Vec<Pt> = d.iter().filter(|q| !in_j(q)).copied().collect();
    PointSet::from_vec(
        d.iter()
            .filter(|p| !outside.iter().any(|q| st.related(p, q)))
            .copied()
            .collect(),
    )
}

pub fn double_complement_at_margin(st: &Spacetime, u: &PointSet, m: i64) -> Region {
    match &st.domain {
        Some(d) => wrap(st, double_complement_within(st, u, d)),
        None => double_complement_abs(st, u, m),
    }
}

/// `U''`, computed as the points `p` with `J(p) ⊆ J(U)`.
pub fn double_complement(st: &Spacetime, u: &Region) -> Result<Region> {
    let s = match u {
        Region::Full => return Ok(Region::Full),
        Region::Set(s) => s,
    };
    if !is_causally_convex(st, u) {
        return Err(Error::NotConvex(u.label()));
    }
    if let Some(d) = &st.domain {
        return Ok(wrap(st, double_complement_within(st, s, d)));
    }
    stabilized(st.default_margin(s), "double complement", |m| {
        double_complement_abs(st, s, m)
    })
}

pub fn is_d_stable(st: &Spacetime, u: &Region) -> Result<bool> {
    Ok(cauchy_development(st, u)? == *u)
}

pub fn is_cauchy_morphism(st: &Spacetime, u: &Region, v: &Region) -> Result<bool> {
    Ok(u.is_subset(v) && cauchy_development(st, u)? == cauchy_development(st, v)?)
}

pub fn are_causally_disjoint(st: &Spacetime, u1: &Region, u2: &Region) -> bool {
    match (u1, u2) {
        (Region::Set(a), Region::Set(b)) => {
            !a.iter().any(|p| b.iter().any(|q| st.related(p, q)))
        }
        _ => false,
    }
}

/// `D_V(U) = V`.
pub fn contains_cauchy_surface_of(st: &Spacetime, u: &Region, v: &Region) -> Result<bool> {
    Ok(development_in(st, u, v)? == *v)
}

/// Largest centred diamond around `p` inside `u` that is D-stable.
pub fn find_d_stable_neighborhood(st: &Spacetime, p: Pt, u: &Region) -> Result<Region> {
    let p = st.norm(p);
    if !u.contains(&p) {
        return Err(Error::Invalid(format!("{p} not in region")));
    }
    let single = st.region([p])?;
    let rmax = match u {
        Region::Set(s) => {
            let (a, b) = s.t_range();
            b - a
        }
        Region::Full => (st.window.1 - st.window.0) / 2,
    };
    let mut best = single;
    for r in 1..=rmax {
        let d = match diamond(st, Pt::new(p.t - r, p.x), Pt::new(p.t + r, p.x), false) {
            Ok(d) => d,
            Err(_) => break,
        };
        if !d.is_subset(u) {
            break;
        }
        if !is_d_stable(st, &d)? {
            break;
        }
        best = d;
    }
    Ok(best)
}

/// Affine embedding `(t, x) ↦ (t + dt, x + dx)` of a spacetime into another.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub source: Spacetime,
    pub target: Spacetime,
    pub dt: i64,
    pub dx: i64,
}

impl Embedding {
    pub fn new(source: Spacetime, target: Spacetime, dt: i64, dx: i64) -> Self {
        Embedding {
            source,
            target,
            dt,
            dx,
        }
    }

    pub fn identity(st: &Spacetime) -> Self {
        Embedding::new(st.clone(), st.clone(), 0, 0)
    }

    pub fn map_pt(&self, p: Pt) -> Pt {
        self.target.norm(Pt::new(p.t + self.dt, p.x + self.dx))
    }

    pub fn unmap_pt(&self, q: Pt) -> Pt {
        self.source.norm(Pt::new(q.t - self.dt, q.x - self.dx))
    }

    /// Image of the whole source.
    pub fn image(&self) -> Region {
        self.apply(&Region::Full)
    }

    pub fn apply(&self, u: &Region) -> Region {
        match u {
            Region::Full => match &self.source.domain {
                None => Region::Full,
                Some(d) => self
                    .target
                    .region(d.iter().map(|p| self.map_pt(*p)))
                    .unwrap_or(Region::Full),
            },
            Region::Set(s) => self
                .target
                .region(s.iter().map(|p| self.map_pt(*p)))
                .unwrap_or_else(|_| Region::Set(PointSet::from_vec(vec![]))),
        }
    }

    /// `f⁻¹(V)`, or `None` when empty.
    pub fn preimage(&self, v: &Region) -> Option<Region> {
        match (&self.source.domain, v) {
            (None, Region::Full) => Some(Region::Full),
            (None, Region::Set(s)) => self.source.region_opt(s.iter().map(|q| self.unmap_pt(*q))),
            (Some(d), _) => {
                let pts: Vec<Pt> = d.iter().filter(|p| v.contains(&self.map_pt(**p))).copied().collect();
                self.source.region_opt(pts)
            }
        }
    }

    /// Injective, causal in both directions onto its image, convex image.
    pub fn check_loc_morphism(&self) -> bool {
        let same = match (self.source.backend, self.target.backend) {
            (Backend::Plane, Backend::Plane) => true,
            (Backend::Cylinder(a), Backend::Cylinder(b)) => a == b,
            _ => false,
        };
        if !same && self.source.domain.is_none() {
            return false;
        }
        match &self.source.domain {
            None => self.target.domain.is_none(),
            Some(d) => {
                let img: Vec<Pt> = d.iter().map(|p| self.map_pt(*p)).collect();
                let set = PointSet::from_vec(img.clone());
                if set.len() != d.len() || !img.iter().all(|q| self.target.in_domain(q)) {
                    return false;
                }
                let pts = d.as_slice();
                for i in 0..pts.len() {
                    for k in 0..pts.len() {
                        if self.source.causal(&pts[i], &pts[k])
                            != self.target.causal(&img[i], &img[k])
                        {
                            return false;
                        }
                    }
                }
                is_causally_convex(&self.target, &Region::Set(set))
            }
        }
    }

    pub fn check_d_stable_image(&self) -> Result<bool> {
        is_d_stable(&self.target, &self.image())
    }

    /// `f(D_M(U)) = D_N(f(U)) ∩ f(M)`.
    pub fn verify_development_restriction(&self, u: &Region) -> Result<bool> {
        let lhs = self.apply(&cauchy_development(&self.source, u)?);
        let dn = cauchy_development(&self.target, &self.apply(u))?;
        let rhs = intersect(&self.target, &dn, &self.image());
        Ok(rhs == Some(lhs))
    }

    /// `D_N(f(U)) ⊆ f(M)` whenever the image is D-stable.
    pub fn verify_development_containment(&self, u: &Region) -> Result<bool> {
        if !self.check_d_stable_image()? {
            return Ok(true);
        }
        let dn = cauchy_development(&self.target, &self.apply(u))?;
        Ok(dn.is_subset(&self.image()))
    }
}

/// Intersection inside `st`; `None` when empty.
pub fn intersect(st: &Spacetime, a: &Region, b: &Region) -> Option<Region> {
    match (a, b) {
        (Region::Full, x) | (x, Region::Full) => Some(x.clone()),
        (Region::Set(p), Region::Set(q)) => st.region_opt(p.intersection(q).iter().copied()),
    }
}

pub fn union(st: &Spacetime, a: &Region, b: &Region) -> Region {
    match (a, b) {
        (Region::Full, _) | (_, Region::Full) => Region::Full,
        (Region::Set(p), Region::Set(q)) => st
            .region(p.union(q).iter().copied())
            .expect("union of nonempty sets"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(st: &Spacetime, v: &[(i64, i64)]) -> Region {
        st.region(v.iter().map(|&(t, x)| Pt::new(t, x))).unwrap()
    }

    #[test]
    fn future_cone_of_origin() {
        let st = Spacetime::plane(0, 6);
        let o = pts(&st, &[(0, 0)]);
        let j = cone(&st, &o, Dir::Future, Strictness::Causal, 5).unwrap();
        let s = j.set().unwrap();
        for t in 0..=5 {
            for x in -7..=7 {
                assert_eq!(s.contains(&Pt::new(t, x)), t >= x.abs());
            }
        }
        let i = cone(&st, &o, Dir::Future, Strictness::Chronological, 5).unwrap();
        let s = i.set().unwrap();
        for t in 0..=5 {
            for x in -7..=7 {
                assert_eq!(s.contains(&Pt::new(t, x)), t > x.abs());
            }
        }
    }

    #[test]
    fn cylinder_cone_wraps_at_slice_three() {
        let st = Spacetime::cylinder(6, 0, 6).unwrap();
        let o = pts(&st, &[(0, 0)]);
        let j = cone(&st, &o, Dir::Future, Strictness::Causal, 3).unwrap();
        assert_eq!(j.set().unwrap().row(3).len(), 6);
        assert_eq!(j.set().unwrap().row(2).len(), 5);
    }

    #[test]
    fn cone_errors() {
        let st = Spacetime::plane(0, 6);
        let o = pts(&st, &[(2, 0)]);
        assert!(matches!(
            cone(&st, &o, Dir::Future, Strictness::Causal, 1),
            Err(Error::WindowTooSmall(_))
        ));
        assert_eq!(
            cone(&st, &Region::Full, Dir::Past, Strictness::Causal, 0).unwrap(),
            Region::Full
        );
    }

    #[test]
    fn convexity_examples() {
        let st = Spacetime::plane(0, 8);
        assert!(!is_causally_convex(&st, &pts(&st, &[(0, 0), (2, 0)])));
        let h = hull_region(&st, &pts(&st, &[(0, 0), (4, 0)]));
        let s = h.set().unwrap();
        assert_eq!(s.len(), 1 + 3 + 5 + 3 + 1);
        for p in s.iter() {
            assert!(p.x.abs() <= p.t.min(4 - p.t));
        }
        let cyl = Spacetime::cylinder(6, 0, 4).unwrap();
        assert!(is_causally_convex(&cyl, &slab(&cyl, 0, 0).unwrap()));
    }

    #[test]
    fn developments() {
        let st = Spacetime::plane(0, 8);
        let p = pts(&st, &[(3, 3)]);
        assert_eq!(cauchy_development(&st, &p).unwrap(), p);
        let d = diamond(&st, Pt::new(0, 0), Pt::new(4, 0), true).unwrap();
        assert_eq!(cauchy_development(&st, &d).unwrap(), d);
        let cyl = Spacetime::cylinder(6, 0, 4).unwrap();
        let row = slab(&cyl, 0, 0).unwrap();
        assert_eq!(cauchy_development(&cyl, &row).unwrap(), Region::Full);
        let two = slab(&cyl, 0, 1).unwrap();
        assert_eq!(double_complement(&cyl, &two).unwrap(), Region::Full);
    }

    #[test]
    fn row_segment_develops_to_diamond() {
        let st = Spacetime::plane(-4, 4);
        let seg = st.region((-2..=2).map(|x| Pt::new(0, x))).unwrap();
        let d = cauchy_development(&st, &seg).unwrap();
        let expect = diamond(&st, Pt::new(-2, 0), Pt::new(2, 0), false).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn punctured_row_needs_margin() {
        let cyl = Spacetime::cylinder(6, -3, 3).unwrap();
        let u = cyl.region((1..=5).map(|x| Pt::new(0, x))).unwrap();
        let s = u.set().unwrap().clone();
        assert!(!stabilization_check(0, |m| development_at_margin(&cyl, &s, m)));
        assert!(stabilization_check(8, |m| development_at_margin(&cyl, &s, m)));
        let d = cauchy_development(&cyl, &u).unwrap();
        let (a, b) = d.set().unwrap().t_range();
        assert_eq!((a, b), (-2, 2));
    }

    #[test]
    fn predicates() {
        let cyl = Spacetime::cylinder(6, 0, 4).unwrap();
        let s01 = slab(&cyl, 0, 1).unwrap();
        let s03 = slab(&cyl, 0, 3).unwrap();
        assert!(is_cauchy_morphism(&cyl, &s01, &s03).unwrap());
        let st = Spacetime::plane(-4, 4);
        assert!(are_causally_disjoint(
            &st,
            &pts(&st, &[(0, -3)]),
            &pts(&st, &[(0, 3)])
        ));
        let d = diamond(&cyl, Pt::new(0, 0), Pt::new(4, 0), false).unwrap();
        assert!(!contains_cauchy_surface_of(&cyl, &d, &Region::Full).unwrap());
    }

    #[test]
    fn neighbourhoods() {
        let st = Spacetime::plane(0, 8);
        let p = Pt::new(2, 0);
        let one = pts(&st, &[(2, 0)]);
        assert_eq!(find_d_stable_neighborhood(&st, p, &one).unwrap(), one);
        let u = diamond(&st, Pt::new(0, 0), Pt::new(4, 0), false).unwrap();
        let v = find_d_stable_neighborhood(&st, p, &u).unwrap();
        assert_eq!(v, u);
    }

    #[test]
    fn sub_lattice_embedding() {
        let n = Spacetime::plane(0, 10);
        let dom = diamond(&n, Pt::new(0, 0), Pt::new(8, 0), false).unwrap();
        let m = n.sub(&dom).unwrap();
        let f = Embedding::new(m.clone(), n.clone(), 0, 0);
        assert!(f.check_loc_morphism());
        assert!(f.check_d_stable_image().unwrap());
        let u = diamond(&m, Pt::new(2, 0), Pt::new(5, 1), false).unwrap();
        assert!(f.verify_development_restriction(&u).unwrap());
        assert!(f.verify_development_containment(&u).unwrap());
        assert_eq!(m.region(dom.set().unwrap().iter().copied()).unwrap(), Region::Full);
    }
}
