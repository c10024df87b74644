//! Fixtures shared by the benches.

use descent_core::kg::KgModel;
use descent_core::lattice::diamond;
use descent_core::linalg::qf;
use descent_core::site::{enumerate_universe, Cover, Site, SiteKind, UniverseConfig, Flavor};
use descent_core::{Pt, Region, Spacetime};

pub fn plane() -> Spacetime {
    Spacetime::plane(0, 8).with_span(-8, 8)
}

pub fn cylinder() -> Spacetime {
    Spacetime::cylinder(6, 0, 7).expect("c >= 3")
}

/// Diamond of height `h` above the origin.
pub fn tall_diamond(st: &Spacetime, h: i64) -> Region {
    diamond(st, Pt::new(0, 0), Pt::new(h, 0), false).expect("fits the window")
}

/// The height-8 plane diamond with its four corner pieces and central piece.
pub fn five_piece_cover(st: &Spacetime) -> Cover {
    let d = |b: (i64, i64), t: (i64, i64)| diamond(st, Pt::new(b.0, b.1), Pt::new(t.0, t.1), false).expect("fits");
    Cover::new(
        tall_diamond(st, 8),
        vec![d((0, 0), (6, -2)), d((0, 0), (6, 2)), d((2, -2), (8, 0)), d((2, 2), (8, 0)), d((2, 0), (6, 0))],
    )
}

pub fn model(st: &Spacetime) -> KgModel {
    KgModel::new(st, qf(1, 4))
}

pub fn site(st: &Spacetime, flavor: Flavor) -> Site {
    let u = enumerate_universe(st, SiteKind::Rc, &UniverseConfig::default()).expect("universe");
    Site::new(st, SiteKind::Rc, flavor, u).expect("site")
}
