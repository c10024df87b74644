use descent_core::lattice::*;
use descent_core::site::*;
use descent_core::{Pt, Region, Spacetime};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sample_universe(st: &Spacetime, seed: u64) -> Vec<Region> {
    let cfg = UniverseConfig { max_hull_seed: 3, hulls: 20, seed, ..Default::default() };
    let all = enumerate_universe(st, SiteKind::Rc, &cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let k = rng.gen_range(8..=10);
        let pick: Vec<Region> = (0..k).map(|_| all[rng.gen_range(0..all.len())].clone()).collect();
        if let Ok(u) = close_universe(st, pick, 40) {
            return u;
        }
    }
}

#[test]
fn localization_oracle_agrees() {
    let plane = Spacetime::plane(0, 6).with_span(0, 6);
    let cyl = Spacetime::cylinder(6, 0, 5).unwrap();
    for st in [plane, cyl] {
        for seed in 0..20 {
            let u = sample_universe(&st, seed);
            let site = Site::new(&st, SiteKind::Rc, Flavor::Plain, u).unwrap();
            assert_eq!(compare_localization(&site).unwrap(), None, "seed {seed} {:?}", st.backend);
        }
    }
}

#[test]
fn cover_categories_are_precostack_instances() {
    let plane = Spacetime::plane(0, 6).with_span(0, 6);
    let cyl = Spacetime::cylinder(6, 0, 5).unwrap();
    let mut n = 0;
    for st in [plane, cyl] {
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = diamond(&st, Pt::new(0, 3), Pt::new(6, 3), false).unwrap();
            let p1 = diamond(&st, Pt::new(0, 3), Pt::new(rng.gen_range(3..6), rng.gen_range(1..3)), false).unwrap();
            let _ = p1;
            let cfg = UniverseConfig { slabs: false, ..Default::default() };
            let inside: Vec<Region> = enumerate_universe(&st, SiteKind::Rc, &cfg).unwrap().into_iter().filter(|r| r.is_subset(&base)).collect();
            let pieces: Vec<Region> = (0..3).map(|_| inside[rng.gen_range(0..inside.len())].clone()).chain([base.clone()]).collect();
            let cover = Cover::new(base.clone(), pieces);
            let uni: Vec<Region> = (0..30).map(|_| inside[rng.gen_range(0..inside.len())].clone()).chain(cover.pieces.clone()).collect();
            for flavor in [Flavor::Plain, Flavor::Localized] {
                let site = Site::new(&st, SiteKind::Rc, flavor, uni.clone()).unwrap();
                let cc = match build_cover_category(&site, &cover) { Ok(c) => c, Err(e) => { eprintln!("{e}"); continue } };
                let amb = site.category();
                let j = SiteFunctor { source: &cc.generated, target: &amb, map: cc.j_map() };
                assert!(j.is_functor());
                assert_eq!(j.check_fully_faithful(), None);
                assert_eq!(j.check_reflects_orthogonality(), None);
                assert!(cc.descriptions_agree(), "{seed} {flavor:?}");
                n += 1;
            }
        }
    }
    eprintln!("{n} instances");
}
