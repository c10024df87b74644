use descent_core::kg::KgModel;
use descent_core::lattice::*;
use descent_core::linalg::*;
use descent_core::{Pt, PointSet, Region, Spacetime};
use proptest::prelude::*;

fn lattice(cyl: bool) -> Spacetime {
    if cyl {
        Spacetime::cylinder(6, 0, 7).unwrap()
    } else {
        Spacetime::plane(0, 7).with_span(0, 7)
    }
}

fn pts() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((0i64..8, 0i64..8), 1..5)
}

fn hull_of(st: &Spacetime, v: &[(i64, i64)]) -> PointSet {
    hull(st, &PointSet::from_vec(v.iter().map(|&(t, x)| st.norm(Pt::new(t, x))).collect()))
}

fn matrix() -> impl Strategy<Value = RationalMatrix> {
    (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| {
            RationalMatrix::from_rows(v.chunks(c).map(|row| row.iter().map(|&x| q(x)).collect()).collect(), c)
        })
    })
}

/// Product of elementary column operations on `n` columns: always invertible.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> RationalMatrix {
    let mut m = RationalMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = RationalMatrix::identity(n);
        e.set(i, j, q(k));
        m = m.mul(&e);
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_is_a_closure(cyl: bool, v in pts()) {
        let st = lattice(cyl);
        let h = hull_of(&st, &v);
        let s = PointSet::from_vec(v.iter().map(|&(t, x)| st.norm(Pt::new(t, x))).collect());
        prop_assert!(s.is_subset(&h));
        prop_assert_eq!(hull(&st, &h), h.clone());
        prop_assert!(is_causally_convex(&st, &Region::Set(h)));
    }

    #[test]
    fn development_is_extensive_idempotent_and_monotone(cyl: bool, v in pts(), w in pts()) {
        let st = lattice(cyl);
        let u = Region::Set(hull_of(&st, &v));
        let mut both = v.clone();
        both.extend(w);
        let big = Region::Set(hull_of(&st, &both));
        let du = cauchy_development(&st, &u).unwrap();
        prop_assert!(u.is_subset(&du));
        if du.is_relatively_compact() {
            prop_assert_eq!(cauchy_development(&st, &du).unwrap(), du.clone());
        }
        prop_assert!(du.is_subset(&cauchy_development(&st, &big).unwrap()));
        prop_assert!(du.is_subset(&double_complement(&st, &u).unwrap()));
    }

    #[test]
    fn rank_plus_nullity(a in matrix()) {
        let (r, ker) = rank_kernel(&a);
        prop_assert_eq!(r + ker.len(), a.cols);
        prop_assert_eq!(r, a.transpose().rank());
        for k in &ker {
            prop_assert!(is_zero_vec(&a.apply(k)));
        }
    }

    #[test]
    fn rank_and_span_survive_basis_change(a in matrix(), ops in prop::collection::vec((0usize..5, 0usize..5, -2i64..=2), 0..6)) {
        let p = unimodular(a.cols, &ops);
        let ap = a.mul(&p);
        prop_assert_eq!(a.rank(), ap.rank());
        prop_assert!(a.column_space().same_span(&ap.column_space()));
        let pinv = inverse(&p).unwrap();
        prop_assert_eq!(p.mul(&pinv), RationalMatrix::identity(a.cols));
        let qa = QuotientSpace::new(a.column_space());
        let qb = QuotientSpace::new(ap.column_space());
        prop_assert_eq!(qa.dim(), qb.dim());
    }

    #[test]
    fn pairing_matrix_is_antisymmetric(cyl: bool, t in 0i64..3, x in 0i64..4, h in 1i64..4) {
        let st = if cyl { Spacetime::cylinder(8, 0, 8).unwrap() } else { Spacetime::plane(0, 8).with_span(-2, 10) };
        let d = diamond(&st, Pt::new(t, x), Pt::new(t + h, x), false).unwrap();
        let mut m = KgModel::new(&st, qf(1, 4));
        let w = m.points(&d);
        let s = m.sigma_matrix(&w).unwrap();
        prop_assert_eq!(s.transpose(), s.scale(&q(-1)));
    }
}
