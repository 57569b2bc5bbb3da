//! Property tests over the builtin links with random framings and charges.

use proptest::prelude::*;
use tsw_core::abgroup::GroupElement;
use tsw_core::diagram::{builtin_links, BuiltinLink};
use tsw_core::linkdata::{conway_table_validate, ConwayTable};
use tsw_core::surgery::{surgered_homology, SurgeryPresentation};
use tsw_core::sw::{default_direction, torsion_duality_check};

fn pick(i: usize) -> BuiltinLink {
    let all = builtin_links();
    all[i % all.len()].clone()
}

/// A charge of the right parity built from arbitrary integers.
fn charge(p: &SurgeryPresentation, raw: &[i64]) -> Vec<i64> {
    let k0 = p.link.parity_charge();
    k0.iter().zip(raw).map(|(a, r)| a + 2 * r).collect()
}

fn direction(p: &SurgeryPresentation) -> Option<GroupElement> {
    (p.b1 == 1).then(|| default_direction(p).unwrap_or_else(|_| p.h.free_unit(0)))
}

fn setup(i: usize, f: &[i64]) -> (SurgeryPresentation, ConwayTable) {
    let b = pick(i);
    let l = b.link.with_framings(&f[..b.link.m()]);
    (surgered_homology(&l), b.table)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn torsion_identities(i in 0usize..7, f in prop::collection::vec(-3i64..=3, 3),
                          raw in prop::collection::vec(-3i64..=3, 3),
                          v in prop::collection::vec(-2i64..=2, 3)) {
        let (p, t) = setup(i, &f);
        let k = charge(&p, &raw);
        for c in [p.duality_check(&k, &t), p.cross_check(&k, &t),
                  p.equivariance_check(&k, &v[..p.m()], &t)] {
            prop_assert!(c.ok, "{}: {}", c.name, c.detail);
        }
        if p.b1 >= 1 {
            let c = p.projection_check(&k, &t);
            prop_assert!(c.ok, "{}: {}", c.name, c.detail);
        }
        if p.link.is_algebraically_split() {
            let c = p.fast_path_check(&k, &t);
            prop_assert!(c.ok, "{}: {}", c.name, c.detail);
        }
        let d = direction(&p);
        let c = torsion_duality_check(&p, &k, &t, d.as_ref());
        prop_assert!(c.ok, "{}: {}", c.name, c.detail);
    }

    #[test]
    fn charge_classes(i in 0usize..7, f in prop::collection::vec(-3i64..=3, 3),
                      raw in prop::collection::vec(-4i64..=4, 3)) {
        let (p, _) = setup(i, &f);
        let k = charge(&p, &raw);
        let c = p.canonicalize(&k).unwrap();
        prop_assert!(p.same_class(&k, &c.0).unwrap());
        // the inverse class has the inverse charge; Chern classes add up to the trivial class
        let g = p.class_element(&k).unwrap();
        let gi = p.class_element(&SurgeryPresentation::inverse_charge(&k)).unwrap();
        let c1 = p.chern(&k).unwrap();
        let c2 = p.chern(&SurgeryPresentation::inverse_charge(&k)).unwrap();
        prop_assert!(p.h.add(&c1, &c2).is_identity());
        prop_assert_eq!(p.h.add(&g, &gi), p.class_element(&SurgeryPresentation::inverse_charge(&p.link.parity_charge())).unwrap());
    }

    #[test]
    fn table_validation_is_framing_independent(i in 0usize..7, f in prop::collection::vec(-3i64..=3, 3)) {
        let b = pick(i);
        let l = b.link.with_framings(&f[..b.link.m()]);
        prop_assert!(conway_table_validate(&l, &b.table).ok());
    }
}
