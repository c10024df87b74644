//! The fixed check registry: ids, reference tags and expected verdicts.

use descent_core::report::Verdict;

use crate::checks::{self, Outcome};
use crate::scenario::Resolved;

pub type CheckFn = fn(&Resolved) -> descent_core::Result<Outcome>;

pub struct CheckSpec {
    pub id: &'static str,
    /// Stable tag naming the property under test.
    pub reference: &'static str,
    /// Verdicts that do not count as unexpected.
    pub expected: &'static [Verdict],
    pub about: &'static str,
    pub run: CheckFn,
}

const PASS: &[Verdict] = &[Verdict::Pass];
const FAIL: &[Verdict] = &[Verdict::Fail];

pub static REGISTRY: &[CheckSpec] = &[
    CheckSpec {
        id: "causality.double-complement",
        reference: "lattice/development-equals-double-complement",
        expected: PASS,
        about: "D(U) by path enumeration equals U'' by cones, diamonds and random hulls",
        run: checks::causality::double_complement_agrees,
    },
    CheckSpec {
        id: "causality.development-inside-complement",
        reference: "lattice/development-inside-double-complement",
        expected: PASS,
        about: "D(U) is contained in U''",
        run: checks::causality::development_inside_complement,
    },
    CheckSpec {
        id: "causality.lemmas",
        reference: "lattice/development-and-embedding-lemmas",
        expected: PASS,
        about: "U in D(U), D idempotent, hulls fix convex sets, embeddings commute with D",
        run: checks::causality::lemmas,
    },
    CheckSpec {
        id: "site.localization-oracle",
        reference: "site/localization-closed-form",
        expected: PASS,
        about: "closed-form localized homs agree with zigzag saturation",
        run: checks::site::localization_oracle,
    },
    CheckSpec {
        id: "site.embedding-faithful",
        reference: "site/embedding-fully-faithful",
        expected: PASS,
        about: "embedding functors are fully faithful and reflect orthogonality",
        run: checks::site::embedding_faithful,
    },
    CheckSpec {
        id: "site.precostack",
        reference: "site/precostack",
        expected: PASS,
        about: "cover categories embed fully faithfully and reflect orthogonality",
        run: checks::site::precostack,
    },
    CheckSpec {
        id: "site.refuse-non-d-stable",
        reference: "site/localized-cover-needs-d-stable",
        expected: PASS,
        about: "a localized cover with a non-D-stable piece is refused",
        run: checks::site::refuse_non_d_stable,
    },
    CheckSpec {
        id: "cover.extension",
        reference: "site/cover-extension-restriction",
        expected: PASS,
        about: "extended covers restrict back to the original cover in both modes",
        run: checks::site::cover_extension,
    },
    CheckSpec {
        id: "aqft.prestack-failure",
        reference: "aqft/indicator-not-a-prestack",
        expected: FAIL,
        about: "prestack condition for indicator theories; fails with counts (4, 1)",
        run: checks::aqft::prestack_failure,
    },
    CheckSpec {
        id: "aqft.epsilon-pullback",
        reference: "aqft/counit-fails-after-pullback",
        expected: FAIL,
        about: "counit iso for the pulled-back image indicator at Full; fails with colimit Initial",
        run: checks::aqft::epsilon_pullback,
    },
    CheckSpec {
        id: "kg.properties",
        reference: "kg/green-operators-and-pairing",
        expected: PASS,
        about: "Green's operator identities, cone support and pairing properties",
        run: checks::kg::properties,
    },
    CheckSpec {
        id: "kg.time-slice",
        reference: "kg/time-slice",
        expected: PASS,
        about: "Cauchy pairs of data-complete regions give isomorphisms",
        run: checks::kg::time_slice,
    },
    CheckSpec {
        id: "kg.descent",
        reference: "kg/descent-coequalizer",
        expected: PASS,
        about: "generator coequalizer exact and relation spans equal on thick covers",
        run: checks::kg::descent,
    },
    CheckSpec {
        id: "kg.negative-control",
        reference: "kg/withheld-commutation-relations",
        expected: PASS,
        about: "withholding commutation of disjoint pieces is detected as a strict inclusion",
        run: checks::kg::negative_control,
    },
    CheckSpec {
        id: "kg.thin-overlap",
        reference: "kg/thin-overlap-cover",
        expected: FAIL,
        about: "exactness on a cover overlapping in a single row; fails",
        run: checks::kg::thin_overlap,
    },
    CheckSpec {
        id: "kg.point-family",
        reference: "kg/point-coherence",
        expected: PASS,
        about: "generator isomorphisms along embeddings are natural and compose",
        run: checks::aqft::point_family_check,
    },
    CheckSpec {
        id: "descent.finer-coarser",
        reference: "descent/finer-implies-coarser",
        expected: PASS,
        about: "passing on a refinement implies passing on the coarser cover",
        run: checks::kg::finer_coarser,
    },
];

pub fn lookup(id: &str) -> Option<&'static CheckSpec> {
    REGISTRY.iter().find(|c| c.id == id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_and_refs_are_unique() {
        let mut ids: Vec<_> = REGISTRY.iter().map(|c| c.id).collect();
        let mut refs: Vec<_> = REGISTRY.iter().map(|c| c.reference).collect();
        ids.sort();
        ids.dedup();
        refs.sort();
        refs.dedup();
        assert_eq!(ids.len(), REGISTRY.len());
        assert_eq!(refs.len(), REGISTRY.len());
    }
}
