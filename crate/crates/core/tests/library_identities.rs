//! Identity checks for surgeries on the builtin links under several framings.

use tsw_core::diagram::builtin;
use tsw_core::linkdata::{conway_table_validate, ConwayTable, FramedLink};
use tsw_core::surgery::{surgered_homology, SurgeryPresentation};

fn cases() -> Vec<(&'static str, Vec<i64>)> {
    vec![
        ("unknot", vec![0]),
        ("unknot", vec![5]),
        ("trefoil", vec![0]),
        ("trefoil", vec![-1]),
        ("trefoil", vec![3]),
        ("figure-eight", vec![0]),
        ("figure-eight", vec![2]),
        ("hopf", vec![0, 0]),
        ("hopf", vec![1, 1]),
        ("hopf", vec![2, 3]),
        ("hopf", vec![0, 4]),
        ("torus-2-4", vec![0, 0]),
        ("torus-2-4", vec![2, 2]),
        ("torus-2-4", vec![1, 3]),
        ("whitehead", vec![0, 0]),
        ("whitehead", vec![1, 0]),
        ("whitehead", vec![2, -3]),
        ("borromean", vec![0, 0, 0]),
        ("borromean", vec![1, 0, 0]),
        ("borromean", vec![1, -1, 0]),
        ("borromean", vec![1, 1, 2]),
    ]
}

fn setup(name: &str, f: &[i64]) -> (SurgeryPresentation, ConwayTable) {
    let b = builtin(name).unwrap();
    let l: FramedLink = b.link.with_framings(f);
    assert!(conway_table_validate(&l, &b.table).ok());
    (surgered_homology(&l), b.table)
}

fn charges(p: &SurgeryPresentation) -> Vec<Vec<i64>> {
    let w = if p.b1 >= 2 { 1 } else { 2 };
    p.enumerate(Some(w)).unwrap().into_iter().map(|c| c.0).take(6).collect()
}

#[test]
fn torsion_identities_on_library() {
    for (name, f) in cases() {
        let (p, t) = setup(name, &f);
        for k in charges(&p) {
            let tag = format!("{name} f={f:?} k={k:?}");
            p.tau(&k, &t).unwrap_or_else(|e| panic!("{tag}: {e}"));
            for c in [p.cross_check(&k, &t), p.duality_check(&k, &t)] {
                assert!(c.ok, "{tag}: {} {}", c.name, c.detail);
            }
            let v: Vec<i64> = (0..p.m()).map(|i| if i == 0 { 1 } else { 0 }).collect();
            let c = p.equivariance_check(&k, &v, &t);
            assert!(c.ok, "{tag}: {} {}", c.name, c.detail);
            if p.b1 >= 1 {
                let c = p.projection_check(&k, &t);
                assert!(c.ok, "{tag}: {} {}", c.name, c.detail);
            }
            if p.link.is_algebraically_split() {
                let c = p.fast_path_check(&k, &t);
                assert!(c.ok, "{tag}: {} {}", c.name, c.detail);
            }
        }
    }
}
