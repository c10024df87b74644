use descent_core::descent::{generator_counit_check, stencil_thickness};
use descent_core::kg::{property_suite, time_slice_suite, KgModel};
use descent_core::lattice::{diamond, slab, Pt, Spacetime};
use descent_core::linalg::{q, qf};
use descent_core::site::{enumerate_universe, Cover, Flavor, SiteKind, UniverseConfig};

#[test]
fn green_and_pairing_properties_hold_on_both_backends() {
    let backends = [
        (Spacetime::plane(-10, 10).with_span(-10, 10), qf(1, 4)),
        (Spacetime::plane(-10, 10).with_span(-10, 10), q(0)),
        (Spacetime::cylinder(5, -10, 10).unwrap(), qf(1, 4)),
        (Spacetime::cylinder(7, -10, 10).unwrap(), q(0)),
    ];
    for (i, (st, m2)) in backends.iter().enumerate() {
        for t in property_suite(st, m2.clone(), 100, 40 + i as u64).unwrap() {
            assert_eq!(t.total, 100, "{}", t.name);
            assert_eq!(t.failures, 0, "{}: {:?}", t.name, t.first_failure);
        }
    }
}

#[test]
fn cauchy_pairs_give_isomorphisms() {
    let cfg = UniverseConfig {
        bands: true,
        hulls: 30,
        max_hull_seed: 3,
        seed: 5,
        ..Default::default()
    };
    let plane = Spacetime::plane(0, 5).with_span(-3, 3);
    let cyl = Spacetime::cylinder(5, 0, 4).unwrap();
    for st in [plane, cyl] {
        let u = enumerate_universe(&st, SiteKind::Rc, &cfg).unwrap();
        let mut m = KgModel::new(&st, qf(1, 4));
        let t = time_slice_suite(&mut m, &u).unwrap();
        assert!(t.cauchy_pairs > 0);
        assert_eq!(t.failures, 0, "{:?}", t.first_failure);
    }
}

#[test]
fn single_row_is_lattice_cauchy_but_data_incomplete() {
    let st = Spacetime::cylinder(5, 0, 4).unwrap();
    let mut m = KgModel::new(&st, qf(1, 4));
    let row = slab(&st, 2, 2).unwrap();
    assert!(!m.is_data_complete(&row).unwrap());
    assert_eq!(m.space(&row).dim(), 5);
    assert!(m.is_data_complete(&slab(&st, 2, 3).unwrap()).unwrap());
}

#[test]
fn one_row_overlap_breaks_exactness() {
    let st = Spacetime::cylinder(6, 0, 7).unwrap();
    let mut m = KgModel::new(&st, qf(1, 4));
    let base = slab(&st, 0, 5).unwrap();
    let thin = Cover::new(base.clone(), vec![slab(&st, 0, 2).unwrap(), slab(&st, 2, 5).unwrap()]);
    assert!(stencil_thickness(&m, &thin, &base, Flavor::Plain).unwrap().is_some());
    let g = generator_counit_check(&mut m, &thin, &base, Flavor::Plain).unwrap();
    assert!(!g.exact && g.witness.is_some());
    assert_eq!(g.kernel_sum, Some(false));
    let thick = Cover::new(base.clone(), vec![slab(&st, 0, 3).unwrap(), slab(&st, 2, 5).unwrap()]);
    assert!(stencil_thickness(&m, &thick, &base, Flavor::Plain).unwrap().is_none());
    assert!(generator_counit_check(&mut m, &thick, &base, Flavor::Plain).unwrap().exact);
}

#[test]
fn four_diamond_cover_of_a_diamond() {
    let st = Spacetime::plane(0, 8).with_span(-8, 8);
    let mut m = KgModel::new(&st, qf(1, 4));
    let b = diamond(&st, Pt::new(0, 0), Pt::new(8, 0), false).unwrap();
    let mut pieces = vec![
        diamond(&st, Pt::new(0, 0), Pt::new(6, -2), false).unwrap(),
        diamond(&st, Pt::new(0, 0), Pt::new(6, 2), false).unwrap(),
        diamond(&st, Pt::new(2, -2), Pt::new(8, 0), false).unwrap(),
        diamond(&st, Pt::new(2, 2), Pt::new(8, 0), false).unwrap(),
    ];
    let crossing = Cover::new(b.clone(), pieces.clone());
    assert_eq!(stencil_thickness(&m, &crossing, &b, Flavor::Plain).unwrap(), Some(Pt::new(4, 0)));
    pieces.push(diamond(&st, Pt::new(2, 0), Pt::new(6, 0), false).unwrap());
    let patched = Cover::new(b.clone(), pieces);
    for flavor in [Flavor::Plain, Flavor::Localized] {
        assert!(stencil_thickness(&m, &patched, &b, flavor).unwrap().is_none());
        assert!(generator_counit_check(&mut m, &patched, &b, flavor).unwrap().exact);
    }
}
