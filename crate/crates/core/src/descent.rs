//! Descent data over covers, counit checks for the Klein-Gordon presentation
//! and for indicator theories, and the prestack counterexamples.

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{consistency_check, relation_element, wedge_dim, AlgebraValue};
use crate::aqft::{build_indicator, count_nat_transforms, Indicator, Predicate};
use crate::error::{Error, Result};
use crate::kg::KgModel;
use crate::lattice::{are_causally_disjoint, cauchy_development, diamond, Pt, PointSet, Region, Spacetime};
use crate::linalg::{fmt_vec, is_exact_coequalizer, is_zero_vec, Echelon, RationalMatrix, Q};
use crate::site::{build_cover_category, enumerate_universe, find_refinement, Cover, Flavor, Site, SiteKind, UniverseConfig};

/// An indicator theory restricted to the pieces of a cover, glued by identities.
#[derive(Clone, Debug)]
pub struct DescentDatum {
    pub cover: Cover,
    /// `(piece, universe index)` as in the cover category.
    pub objects: Vec<(usize, usize)>,
    pub values: Vec<AlgebraValue>,
    /// Identities on overlaps are legitimate and compose on triple overlaps.
    pub cocycle_ok: bool,
}

impl DescentDatum {
    pub fn all_initial(&self) -> bool {
        self.values.iter().all(|v| v.is_initial())
    }
}

pub fn restrict_to_cover(site: &Site, ind: &Indicator, cover: &Cover) -> Result<DescentDatum> {
    let cat = build_cover_category(site, cover)?;
    let values: Vec<AlgebraValue> = cat.objects.iter().map(|&(_, k)| ind.value(k)).collect();
    // φ_ij = id is only meaningful when both restrictions agree on the overlap
    let mut cocycle_ok = true;
    for (a, &(i, k)) in cat.objects.iter().enumerate() {
        for (b, &(j, l)) in cat.objects.iter().enumerate() {
            if k == l && i != j && !values[a].same_as(&values[b]) {
                cocycle_ok = false;
            }
        }
    }
    Ok(DescentDatum {
        cover: cover.clone(),
        objects: cat.objects,
        values,
        cocycle_ok,
    })
}

/// Generator-level outcome for one `(cover, U)`.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorOutcome {
    pub exact: bool,
    pub witness: Option<String>,
    /// `P K(U) = Σ P K(Uᵢ ∩ U)`, computed independently (plain flavor only).
    pub kernel_sum: Option<bool>,
    pub dim_target: usize,
    pub dim_pieces: usize,
    pub dim_overlaps: usize,
}

/// Pieces `Uᵢ ∩ U` (plain) or `Uᵢ ∩ D(U)` (localized), dropping empty ones.
fn restricted_pieces(model: &KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<Vec<(usize, PointSet)>> {
    let st = &model.site_st;
    let against = match flavor {
        Flavor::Plain => u.clone(),
        Flavor::Localized => cauchy_development(st, u)?,
    };
    let base = model.points(&against);
    let mut out = Vec::new();
    for (i, p) in cover.pieces.iter().enumerate() {
        let x = model.points(p).intersection(&base);
        if !x.is_empty() {
            out.push((i, x));
        }
    }
    Ok(out)
}

fn map_into_target(model: &mut KgModel, x: &PointSet, target: &PointSet, flavor: Flavor) -> Result<RationalMatrix> {
    match flavor {
        Flavor::Plain => model.extension(x, target),
        Flavor::Localized => model.localized_map(x, target),
    }
}

/// Lattice stand-in for a subordinate partition of unity: every point of
/// `W` and of its stencil boundary sees its stencil inside `W` within one piece.
/// `W` is `U` (plain) or `D(U)` (localized). Returns the first offending point.
pub fn stencil_thickness(model: &KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<Option<Pt>> {
    let st = &model.site_st;
    let w = match flavor {
        Flavor::Plain => model.points(u),
        Flavor::Localized => model.points(&cauchy_development(st, u)?),
    };
    let pieces = restricted_pieces(model, cover, u, flavor)?;
    let mut probe: Vec<Pt> = Vec::new();
    for p in w.iter() {
        for (q, _) in model.kg.stencil(*p) {
            probe.push(q);
        }
    }
    probe.sort();
    probe.dedup();
    for q in probe {
        let nbhd: Vec<Pt> = model.kg.stencil(q).iter().map(|(r, _)| *r).filter(|r| w.contains(r)).collect();
        if !pieces.iter().any(|(_, x)| nbhd.iter().all(|r| x.contains(r))) {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

/// Exactness of `⊕ 𝔏(Xᵢⱼ) ⇉ ⊕ 𝔏(Xᵢ) → 𝔏(U)`.
pub fn generator_counit_check(model: &mut KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<GeneratorOutcome> {
    let target = model.points(u);
    let pieces = restricted_pieces(model, cover, u, flavor)?;
    let gt = model.space_of(&target);
    let mut q_blocks = Vec::new();
    let mut piece_dims = Vec::new();
    for (_, x) in &pieces {
        q_blocks.push(map_into_target(model, x, &target, flavor)?);
        piece_dims.push(model.space_of(x).dim());
    }
    let mut pairs = Vec::new();
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            let x = pieces[a].1.intersection(&pieces[b].1);
            if !x.is_empty() {
                pairs.push((a, b, x));
            }
        }
    }
    let dim_b: usize = piece_dims.iter().sum();
    let mut offsets = vec![0];
    for d in &piece_dims {
        offsets.push(offsets.last().unwrap() + d);
    }
    let mut r1_cols: Vec<Vec<Q>> = Vec::new();
    let mut r2_cols: Vec<Vec<Q>> = Vec::new();
    for (a, b, x) in &pairs {
        let ea = model.extension(x, &pieces[*a].1)?;
        let eb = model.extension(x, &pieces[*b].1)?;
        for c in 0..ea.cols {
            let mut v1 = vec![Q::zero(); dim_b];
            let mut v2 = vec![Q::zero(); dim_b];
            for r in 0..ea.rows {
                v1[offsets[*a] + r] = ea.get(r, c).clone();
            }
            for r in 0..eb.rows {
                v2[offsets[*b] + r] = eb.get(r, c).clone();
            }
            r1_cols.push(v1);
            r2_cols.push(v2);
        }
    }
    let dim_a = r1_cols.len();
    let r1 = RationalMatrix::from_cols(r1_cols, dim_b);
    let r2 = RationalMatrix::from_cols(r2_cols, dim_b);
    let mut qm = RationalMatrix::zeros(gt.dim(), 0);
    for blk in &q_blocks {
        qm = qm.hstack(blk);
    }
    let (exact, witness) = if dim_b == 0 {
        (gt.dim() == 0, None)
    } else if dim_a == 0 {
        let r = RationalMatrix::zeros(dim_b, 0);
        is_exact_coequalizer(&r, &r, &qm)?
    } else {
        is_exact_coequalizer(&r1, &r2, &qm)?
    };
    let kernel_sum = match flavor {
        Flavor::Plain => {
            let mut sum = Echelon::new(target.len());
            for (_, x) in &pieces {
                let gx = model.space_of(x);
                for rel in gx.relations().basis() {
                    let mut v = vec![Q::zero(); target.len()];
                    for (p, c) in x.iter().zip(&rel) {
                        v[target.index_of(p).expect("piece inside target")] = c.clone();
                    }
                    sum.insert(&v);
                }
            }
            Some(sum.same_span(gt.relations()))
        }
        Flavor::Localized => None,
    };
    Ok(GeneratorOutcome {
        exact,
        witness: witness.map(|w| w.describe()),
        kernel_sum,
        dim_target: gt.dim(),
        dim_pieces: dim_b,
        dim_overlaps: dim_a,
    })
}

/// A two-row band of `U` split into vertical dominoes, each assigned to a
/// piece containing it.
#[derive(Clone, Debug, Serialize)]
pub struct AdaptedCover {
    pub t_star: i64,
    pub dominoes: Vec<Vec<Pt>>,
    /// Piece index per domino: the integer partition of unity over the band.
    pub owner: Vec<usize>,
}

/// Finds the lowest band whose point classes span `𝔏(U)` and whose dominoes
/// satisfy the union property against the restricted pieces.
pub fn build_adapted_cover(model: &mut KgModel, cover: &Cover, u: &Region, flavor: Flavor) -> Result<Option<AdaptedCover>> {
    let target = model.points(u);
    let gt = model.space_of(&target);
    let pieces = restricted_pieces(model, cover, u, flavor)?;
    let st = model.site_st.clone();
    let (lo, hi) = target.t_range();
    for ts in lo..hi {
        let band: Vec<Pt> = target.iter().filter(|p| p.t == ts || p.t == ts + 1).copied().collect();
        let mut span = Echelon::new(gt.dim());
        for p in &band {
            span.insert(&gt.point_class(p).expect("band inside U"));
        }
        if span.rank() < gt.dim() {
            continue;
        }
        let mut cols: Vec<i64> = band.iter().map(|p| p.x).collect();
        cols.sort();
        cols.dedup();
        let dominoes: Vec<Vec<Pt>> = cols
            .iter()
            .map(|&x| band.iter().filter(|p| p.x == x).copied().collect())
            .collect();
        let owner_of = |pts: &[Pt]| pieces.iter().find(|(_, x)| pts.iter().all(|p| x.contains(p))).map(|(i, _)| *i);
        let owner: Option<Vec<usize>> = dominoes.iter().map(|d| owner_of(d)).collect();
        let Some(owner) = owner else {
            continue;
        };
        let mut union_ok = true;
        'pairs: for a in 0..dominoes.len() {
            for b in a + 1..dominoes.len() {
                let ra = Region::Set(PointSet::from_vec(dominoes[a].clone()));
                let rb = Region::Set(PointSet::from_vec(dominoes[b].clone()));
                if are_causally_disjoint(&st, &ra, &rb) {
                    continue;
                }
                let both: Vec<Pt> = dominoes[a].iter().chain(&dominoes[b]).copied().collect();
                if owner_of(&both).is_none() {
                    union_ok = false;
                    break 'pairs;
                }
            }
        }
        if union_ok {
            return Ok(Some(AdaptedCover {
                t_star: ts,
                dominoes,
                owner,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanStrategy {
    AdaptedCover,
    DirectSpan,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationOutcome {
    pub strategy: SpanStrategy,
    pub equal: bool,
    pub consistent: bool,
    pub rank: usize,
    pub expected: usize,
    pub witness: Option<String>,
}

/// Compares the relations generated by the pieces (and, unless withheld,
/// commutation of causally disjoint points) with the full CCR on `𝔏(U)`.
pub fn relation_counit_check(
    model: &mut KgModel,
    cover: &Cover,
    u: &Region,
    flavor: Flavor,
    with_perp: bool,
) -> Result<RelationOutcome> {
    let target = model.points(u);
    let gt = model.space_of(&target);
    let n = gt.dim();
    let sigma_u = model.sigma_matrix(&target)?;
    let st = model.site_st.clone();
    let pieces = restricted_pieces(model, cover, u, flavor)?;
    let mut rels: Vec<(Vec<Q>, Vec<Q>, Q)> = Vec::new();
    let adapted = if with_perp {
        build_adapted_cover(model, cover, u, flavor)?
    } else {
        None
    };
    let strategy = if let Some(ad) = &adapted {
        let band: Vec<Pt> = ad.dominoes.iter().flatten().copied().collect();
        let classes: Vec<Vec<Q>> = band.iter().map(|p| gt.point_class(p).unwrap()).collect();
        for a in 0..band.len() {
            for b in a + 1..band.len() {
                let c = model.kg.pairing(&crate::kg::Field::delta(band[a]), &crate::kg::Field::delta(band[b]))?;
                rels.push((classes[a].clone(), classes[b].clone(), c));
            }
        }
        SpanStrategy::AdaptedCover
    } else {
        for (_, x) in &pieces {
            let img = map_into_target(model, x, &target, flavor)?;
            let sx = model.sigma_matrix(x)?;
            for k in 0..img.cols {
                for l in k + 1..img.cols {
                    rels.push((img.col(k), img.col(l), sx.get(k, l).clone()));
                }
            }
        }
        if with_perp {
            let pts: Vec<Pt> = target.iter().copied().collect();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    if !st.related(&pts[a], &pts[b]) {
                        rels.push((gt.point_class(&pts[a]).unwrap(), gt.point_class(&pts[b]).unwrap(), Q::zero()));
                    }
                }
            }
        }
        SpanStrategy::DirectSpan
    };
    let expected = wedge_dim(n);
    let pair = |a: &[Q], b: &[Q]| -> Q {
        let sb = sigma_u.apply(b);
        a.iter().zip(&sb).map(|(x, y)| x * y).sum()
    };
    let mut span = Echelon::new(expected + 1);
    let mut bad = None;
    for (a, b, c) in &rels {
        if is_zero_vec(a) || is_zero_vec(b) {
            continue;
        }
        if &pair(a, b) != c && bad.is_none() {
            bad = Some(format!("relation [{}, {}] = {} disagrees with the pairing on U", fmt_vec(a), fmt_vec(b), c));
        }
        if span.rank() < expected || bad.is_some() {
            span.insert(&relation_element(a, b, c));
        }
    }
    let consistent = bad.is_none() && consistency_check(&span);
    let rank = span.rank().min(expected);
    let equal = consistent && span.rank() == expected;
    let witness = if let Some(b) = bad {
        Some(b)
    } else if !equal {
        // first basis relation of the full CCR outside the generated span
        let mut w = None;
        'find: for i in 0..n {
            for j in i + 1..n {
                let mut ei = vec![Q::zero(); n];
                let mut ej = vec![Q::zero(); n];
                ei[i] = num_traits::One::one();
                ej[j] = num_traits::One::one();
                let r = relation_element(&ei, &ej, sigma_u.get(i, j));
                if !span.contains(&r) {
                    w = Some(format!("missing relation {}", fmt_vec(&r)));
                    break 'find;
                }
            }
        }
        w
    } else {
        None
    };
    Ok(RelationOutcome {
        strategy,
        equal,
        consistent,
        rank,
        expected,
        witness,
    })
}

/// Implication check between a refinement and the cover it refines.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FinerCoarser {
    pub checked: usize,
    pub both_passed: usize,
    pub violations: Vec<String>,
}

/// For every `U`, passing both counit checks on `fine` must imply passing
/// them on `coarse`.
pub fn finer_coarser_harness(
    model: &mut KgModel,
    fine: &Cover,
    coarse: &Cover,
    us: &[Region],
    flavor: Flavor,
) -> Result<FinerCoarser> {
    if find_refinement(fine, coarse).is_none() {
        return Err(Error::Invalid("the finer family does not refine the coarser one".into()));
    }
    let mut out = FinerCoarser::default();
    for u in us {
        out.checked += 1;
        let pass = |m: &mut KgModel, c: &Cover| -> Result<bool> {
            let g = generator_counit_check(m, c, u, flavor)?;
            if !g.exact {
                return Ok(false);
            }
            Ok(relation_counit_check(m, c, u, flavor, true)?.equal)
        };
        if pass(model, fine)? {
            out.both_passed += 1;
            if !pass(model, coarse)? {
                out.violations.push(u.label());
            }
        }
    }
    Ok(out)
}

/// One counterexample variant: hom counts on the site and on a cover.
#[derive(Clone, Debug, Serialize)]
pub struct PrestackRow {
    pub variant: String,
    pub site_homs: u128,
    pub descent_homs: u128,
    pub pieces_initial: bool,
}

impl PrestackRow {
    pub fn exhibits_failure(&self) -> bool {
        self.site_homs != self.descent_homs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrestackVariant {
    Plain,
    TimeSliced,
    RelativelyCompact,
    RelativelyCompactTimeSliced,
}

impl PrestackVariant {
    pub const ALL: [PrestackVariant; 4] = [
        PrestackVariant::Plain,
        PrestackVariant::TimeSliced,
        PrestackVariant::RelativelyCompact,
        PrestackVariant::RelativelyCompactTimeSliced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PrestackVariant::Plain => "plain",
            PrestackVariant::TimeSliced => "time-sliced",
            PrestackVariant::RelativelyCompact => "rc",
            PrestackVariant::RelativelyCompactTimeSliced => "rc-time-sliced",
        }
    }
}

/// Vertical two-point diamonds tiling an even-height window.
fn dominoes(st: &Spacetime) -> Result<Vec<Region>> {
    let mut out = Vec::new();
    for p in st.full_points().iter().filter(|p| (p.t - st.window.0) % 2 == 0) {
        out.push(diamond(st, *p, Pt::new(p.t + 1, p.x), false)?);
    }
    Ok(out)
}

/// Builds `𝔄 = 𝔅` with `A = ℚᵏ` per variant and counts homs over the site
/// and over a cover none of whose pieces carries `A`.
pub fn prestack_failure_demo(variant: PrestackVariant, k: usize) -> Result<PrestackRow> {
    let cfg = UniverseConfig::default();
    let (st, kind, flavor, pred, pieces) = match variant {
        PrestackVariant::Plain => {
            let st = Spacetime::plane(0, 3).with_span(-2, 2);
            let pieces = dominoes(&st)?;
            (st, SiteKind::COpen, Flavor::Plain, Predicate::EqualsFull, pieces)
        }
        v => {
            let st = Spacetime::cylinder(4, 0, 3)?;
            let pieces = dominoes(&st)?;
            let (kind, flavor) = match v {
                PrestackVariant::TimeSliced => (SiteKind::COpen, Flavor::Localized),
                PrestackVariant::RelativelyCompact => (SiteKind::Rc, Flavor::Plain),
                _ => (SiteKind::Rc, Flavor::Localized),
            };
            (st, kind, flavor, Predicate::ContainsCauchySurface, pieces)
        }
    };
    let universe = enumerate_universe(&st, kind, &cfg)?;
    let site = Site::new(&st, kind, flavor, universe)?;
    let a = build_indicator(&site, &pred, AlgebraValue::qpower(k))?;
    let b = a.clone();
    let site_homs = count_nat_transforms(&site.category(), &a.values(), &b.values())?;
    let cover = Cover::new(Region::Full, pieces);
    let datum = restrict_to_cover(&site, &a, &cover)?;
    if !datum.cocycle_ok {
        return Err(Error::Construction("restricted datum violates the cocycle condition".into()));
    }
    let cat = build_cover_category(&site, &cover)?;
    let descent_homs = count_nat_transforms(&cat.generated, &datum.values, &datum.values)?;
    Ok(PrestackRow {
        variant: variant.name().to_string(),
        site_homs,
        descent_homs,
        pieces_initial: datum.all_initial(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::slab;
    use crate::linalg::{q, qf};

    #[test]
    fn prestack_counts() {
        for v in PrestackVariant::ALL {
            let row = prestack_failure_demo(v, 2).unwrap();
            assert_eq!((row.site_homs, row.descent_homs), (4, 1), "{v:?}");
            assert!(row.pieces_initial);
        }
    }

    #[test]
    fn single_piece_cover_is_exact() {
        let st = Spacetime::plane(0, 6).with_span(-4, 4);
        let mut m = KgModel::new(&st, q(0));
        let u = diamond(&st, Pt::new(0, 0), Pt::new(4, 0), false).unwrap();
        let cover = Cover::trivial(u.clone());
        let g = generator_counit_check(&mut m, &cover, &u, Flavor::Plain).unwrap();
        assert!(g.exact && g.kernel_sum == Some(true));
        let r = relation_counit_check(&mut m, &cover, &u, Flavor::Plain, true).unwrap();
        assert!(r.equal, "{r:?}");
    }

    #[test]
    fn two_slab_cylinder_cover() {
        let st = Spacetime::cylinder(4, 0, 6).unwrap();
        let mut m = KgModel::new(&st, qf(1, 4));
        let base = slab(&st, 0, 5).unwrap();
        let cover = Cover::new(base.clone(), vec![slab(&st, 0, 3).unwrap(), slab(&st, 2, 5).unwrap()]);
        let g = generator_counit_check(&mut m, &cover, &base, Flavor::Plain).unwrap();
        assert!(g.exact, "{g:?}");
        assert_eq!(g.kernel_sum, Some(true));
        let r = relation_counit_check(&mut m, &cover, &base, Flavor::Plain, true).unwrap();
        assert!(r.equal && r.strategy == SpanStrategy::AdaptedCover, "{r:?}");
    }

    #[test]
    fn withheld_perp_relations_are_detected() {
        let st = Spacetime::plane(0, 4).with_span(-4, 4);
        let mut m = KgModel::new(&st, q(1));
        let p = st.region([Pt::new(2, -1)]).unwrap();
        let r = st.region([Pt::new(2, 1)]).unwrap();
        let u = st.region([Pt::new(2, -1), Pt::new(2, 1)]).unwrap();
        let cover = Cover::new(u.clone(), vec![p, r]);
        let g = generator_counit_check(&mut m, &cover, &u, Flavor::Plain).unwrap();
        assert!(g.exact);
        let without = relation_counit_check(&mut m, &cover, &u, Flavor::Plain, false).unwrap();
        assert!(!without.equal && without.witness.is_some());
        let with = relation_counit_check(&mut m, &cover, &u, Flavor::Plain, true).unwrap();
        assert!(with.equal);
    }
}
