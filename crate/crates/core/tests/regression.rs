//! Frozen dimensions and homology blocks, recomputed by the brute-force
//! oracle and by the library.

mod oracle;

use std::collections::BTreeMap;

use bsfh::arc_diagram::canonical;
use bsfh::gf2::{homology, ChainComplexGf2, Gf2Matrix};
use bsfh::{AlgebraModel, PairSet};

type Blocks = BTreeMap<(Vec<usize>, Vec<usize>), usize>;

pub const DIM_Z2: usize = 16;

fn frozen_blocks(name: &str) -> Blocks {
    let rows: &[(&[usize], &[usize], usize)] = match name {
        "z0" => &[(&[], &[], 1)],
        "z1" => &[(&[], &[], 1), (&[0], &[0], 2)],
        "z2" => &[
            (&[], &[], 1),
            (&[0], &[0], 2),
            (&[0], &[1], 3),
            (&[0, 1], &[0, 1], 1),
            (&[1], &[0], 1),
            (&[1], &[1], 2),
        ],
        _ => unreachable!(),
    };
    rows.iter().map(|(l, r, d)| ((l.to_vec(), r.to_vec()), *d)).collect()
}

fn library_blocks(am: &AlgebraModel) -> Blocks {
    let k = am.rank();
    let mut out = Blocks::new();
    for i in PairSet::all(k) {
        for j in PairSet::all(k) {
            let ids: Vec<usize> =
                (0..am.dim()).filter(|&x| am.left_idem(x) == i && am.right_idem(x) == j).collect();
            let pos: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(a, &b)| (b, a)).collect();
            let cols = ids.iter().map(|&x| am.diff_basis(x).iter().map(|y| pos[&y]).collect()).collect();
            let d = Gf2Matrix::from_columns(ids.len(), cols).unwrap();
            let c = ChainComplexGf2::new(ids.iter().map(|x| x.to_string()).collect(), d).unwrap();
            let h = homology(&c).dimension;
            if h > 0 {
                let idx = |s: PairSet| s.iter().collect::<Vec<_>>();
                out.insert((idx(i), idx(j)), h);
            }
        }
    }
    out
}

#[test]
fn oracle_matches_frozen_constants() {
    let cases = [("z0", vec![], 1), ("z1", vec![vec![0, 0]], 3), ("z2", vec![vec![0, 1, 0, 1]], DIM_Z2)];
    for (name, arcs, dim) in cases {
        let s = oracle::summarize(&oracle::Points::new(&arcs, false));
        assert_eq!(s.dim, dim, "{name}");
        assert_eq!(s.blocks, frozen_blocks(name), "{name}");
        let down = oracle::summarize(&oracle::Points::new(&arcs, true));
        assert_eq!(down.dim, dim, "{name} beta");
        let transposed: Blocks = s.blocks.iter().map(|((l, r), d)| ((r.clone(), l.clone()), *d)).collect();
        assert_eq!(down.blocks, transposed, "{name} beta");
    }
}

#[test]
fn library_matches_frozen_constants() {
    for (name, z, dim) in [
        ("z0", canonical::z0(), 1),
        ("z1", canonical::z1(), 3),
        ("z2", canonical::z2(), DIM_Z2),
    ] {
        let am = AlgebraModel::new(&z).unwrap();
        assert_eq!(am.dim(), dim, "{name}");
        assert_eq!(library_blocks(&am), frozen_blocks(name), "{name}");
        let beta = AlgebraModel::new(&z.flip_type()).unwrap();
        // Mirroring reverses products, so blocks transpose.
        let transposed: Blocks =
            frozen_blocks(name).into_iter().map(|((l, r), d)| ((r, l), d)).collect();
        assert_eq!(library_blocks(&beta), transposed, "{name} beta");
    }
}

#[test]
fn oracle_agrees_on_assorted_diagrams() {
    let cases: Vec<(Vec<Vec<usize>>, Vec<Vec<&str>>)> = vec![
        (vec![vec![0, 1], vec![0, 1]], vec![vec!["p0", "p1"], vec!["p2", "p3"]]),
        (vec![vec![0, 1, 2, 0, 1, 2]], vec![vec!["p0", "p1", "p2", "p3", "p4", "p5"]]),
        (vec![vec![0, 1, 0, 2], vec![1, 2]], vec![vec!["p0", "p1", "p2", "p3"], vec!["p4", "p5"]]),
    ];
    for (arcs, names) in cases {
        let mut pairs: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for (a, arc) in arcs.iter().enumerate() {
            for (i, &p) in arc.iter().enumerate() {
                pairs.entry(p).or_default().push(names[a][i]);
            }
        }
        let z = bsfh::ArcDiagram::new(
            bsfh::Kind::Alpha,
            names.clone(),
            pairs.values().map(|v| (v[0], v[1])).collect(),
        );
        let am = AlgebraModel::new(&z).unwrap();
        let s = oracle::summarize(&oracle::Points::new(&arcs, false));
        assert_eq!(am.dim(), s.dim, "{arcs:?}");
        assert_eq!(library_blocks(&am), s.blocks, "{arcs:?}");
    }
}
