//! Brute-force recomputation of strands algebra dimensions and homology
//! blocks, sharing no code with the library's algebra engine.
//!
//! A plain strand diagram is a partial map `source point -> target point`.
//! Crossings are found by intersecting straight segments in the plane.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

pub struct Points {
    /// (arc, position) per point.
    pub place: Vec<(usize, usize)>,
    pub pair: Vec<usize>,
    pub k: usize,
    pub downward: bool,
}

impl Points {
    /// `arcs` lists pair numbers (zero-based) per point along each arc.
    pub fn new(arcs: &[Vec<usize>], downward: bool) -> Points {
        let mut place = Vec::new();
        let mut pair = Vec::new();
        for (a, arc) in arcs.iter().enumerate() {
            for (i, &p) in arc.iter().enumerate() {
                place.push((a, i));
                pair.push(p);
            }
        }
        let k = pair.iter().map(|p| p + 1).max().unwrap_or(0);
        Points { place, pair, k, downward }
    }

    fn y(&self, p: usize) -> f64 {
        let (a, i) = self.place[p];
        let h = if self.downward { -(i as f64) } else { i as f64 };
        1000.0 * a as f64 + h
    }
}

type Diagram = Vec<Option<usize>>;

/// Every partial injection allowed in the idempotent-truncated algebra:
/// strands stay on their arc and never go down, and the pairs of sources,
/// as well as the pairs of targets, are distinct.
pub fn plain_diagrams(pts: &Points) -> Vec<Diagram> {
    let n = pts.place.len();
    let mut out = Vec::new();
    let mut cur: Diagram = vec![None; n];
    fn go(pts: &Points, p: usize, cur: &mut Diagram, out: &mut Vec<Diagram>) {
        let n = cur.len();
        if p == n {
            out.push(cur.clone());
            return;
        }
        go(pts, p + 1, cur, out);
        for t in 0..n {
            if pts.place[t].0 != pts.place[p].0 || pts.y(t) < pts.y(p) {
                continue;
            }
            cur[p] = Some(t);
            if admissible(pts, cur) {
                go(pts, p + 1, cur, out);
            }
            cur[p] = None;
        }
    }
    go(pts, 0, &mut cur, &mut out);
    out
}

fn admissible(pts: &Points, d: &Diagram) -> bool {
    let mut src = BTreeSet::new();
    let mut tgt = BTreeSet::new();
    let mut tpts = BTreeSet::new();
    for (s, t) in d.iter().enumerate() {
        if let Some(t) = *t {
            if !src.insert(pts.pair[s]) || !tgt.insert(pts.pair[t]) || !tpts.insert(t) {
                return false;
            }
        }
    }
    true
}

/// Symmetrization class: movers plus the set of pairs carried horizontally.
pub type Class = (Vec<(usize, usize)>, BTreeSet<usize>);

pub fn class_of(pts: &Points, d: &Diagram) -> Class {
    let mut movers = Vec::new();
    let mut hor = BTreeSet::new();
    for (s, t) in d.iter().enumerate() {
        if let Some(t) = *t {
            if s == t {
                hor.insert(pts.pair[s]);
            } else {
                movers.push((s, t));
            }
        }
    }
    (movers, hor)
}

pub fn classes(pts: &Points) -> BTreeMap<Class, Vec<Diagram>> {
    let mut out: BTreeMap<Class, Vec<Diagram>> = BTreeMap::new();
    for d in plain_diagrams(pts) {
        out.entry(class_of(pts, &d)).or_default().push(d);
    }
    out
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Proper intersection of two segments (distinct endpoints assumed).
fn segments_cross(p: ((f64, f64), (f64, f64)), q: ((f64, f64), (f64, f64))) -> bool {
    let d1 = orient(q.0, q.1, p.0);
    let d2 = orient(q.0, q.1, p.1);
    let d3 = orient(p.0, p.1, q.0);
    let d4 = orient(p.0, p.1, q.1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

pub fn crossing_count(pts: &Points, d: &Diagram) -> usize {
    let segs: Vec<_> = d
        .iter()
        .enumerate()
        .filter_map(|(s, t)| t.map(|t| ((0.0, pts.y(s)), (1.0, pts.y(t)))))
        .collect();
    let mut n = 0;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if segments_cross(segs[i], segs[j]) {
                n += 1;
            }
        }
    }
    n
}

/// Differential of a plain diagram: swap the targets of two crossing
/// strands and keep the result when exactly one crossing disappears.
fn plain_diff(pts: &Points, d: &Diagram) -> Vec<Diagram> {
    let c = crossing_count(pts, d);
    let strands: Vec<(usize, usize)> =
        d.iter().enumerate().filter_map(|(s, t)| t.map(|t| (s, t))).collect();
    let mut out = Vec::new();
    for i in 0..strands.len() {
        for j in i + 1..strands.len() {
            let (s1, t1) = strands[i];
            let (s2, t2) = strands[j];
            let seg = |s: usize, t: usize| ((0.0, pts.y(s)), (1.0, pts.y(t)));
            if !segments_cross(seg(s1, t1), seg(s2, t2)) {
                continue;
            }
            let mut e = d.clone();
            e[s1] = Some(t2);
            e[s2] = Some(t1);
            if pts.y(t2) >= pts.y(s1) && pts.y(t1) >= pts.y(s2) && crossing_count(pts, &e) + 1 == c {
                out.push(e);
            }
        }
    }
    out
}

/// Differential on classes, indexed by position in `basis`.
pub fn class_differential(pts: &Points, basis: &[Class], members: &BTreeMap<Class, Vec<Diagram>>) -> Vec<BTreeSet<usize>> {
    let pos: BTreeMap<&Class, usize> = basis.iter().enumerate().map(|(i, c)| (c, i)).collect();
    basis
        .iter()
        .map(|c| {
            let mut acc: BTreeMap<Diagram, bool> = BTreeMap::new();
            for d in &members[c] {
                for e in plain_diff(pts, d) {
                    let v = acc.entry(e).or_insert(false);
                    *v = !*v;
                }
            }
            let mut hits: BTreeMap<Class, usize> = BTreeMap::new();
            for (e, odd) in acc {
                if odd {
                    *hits.entry(class_of(pts, &e)).or_default() += 1;
                }
            }
            hits.into_iter()
                .map(|(cl, n)| {
                    assert_eq!(n, members[&cl].len(), "differential not symmetric");
                    pos[&cl]
                })
                .collect()
        })
        .collect()
}

fn idems(pts: &Points, c: &Class) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let mut l = c.1.clone();
    let mut r = c.1.clone();
    for &(s, t) in &c.0 {
        l.insert(pts.pair[s]);
        r.insert(pts.pair[t]);
    }
    (l, r)
}

/// Rank over the two-element field by dense elimination on bool rows.
fn rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c]) else { continue };
        rows.swap(r, p);
        for i in 0..rows.len() {
            if i != r && rows[i][c] {
                let pivot = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    r
}

pub struct Summary {
    pub dim: usize,
    /// (left pairs, right pairs) -> homology dimension, zero blocks omitted.
    pub blocks: BTreeMap<(Vec<usize>, Vec<usize>), usize>,
}

pub fn summarize(pts: &Points) -> Summary {
    let members = classes(pts);
    let basis: Vec<Class> = members.keys().cloned().collect();
    let d = class_differential(pts, &basis, &members);
    let mut by_block: BTreeMap<(Vec<usize>, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for (i, c) in basis.iter().enumerate() {
        let (l, r) = idems(pts, c);
        by_block
            .entry((l.into_iter().collect(), r.into_iter().collect()))
            .or_default()
            .push(i);
    }
    let mut blocks = BTreeMap::new();
    for (key, ids) in by_block {
        let local: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(j, &i)| (i, j)).collect();
        let rows: Vec<Vec<bool>> = ids
            .iter()
            .map(|&i| {
                let mut row = vec![false; ids.len()];
                for t in &d[i] {
                    row[local[t]] = true;
                }
                row
            })
            .collect();
        let h = ids.len() - 2 * rank(rows);
        if h > 0 {
            blocks.insert(key, h);
        }
    }
    Summary { dim: basis.len(), blocks }
}
