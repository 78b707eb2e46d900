//! Arc diagrams: oriented arcs carrying points matched in pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Alpha,
    Beta,
}

impl Kind {
    pub fn flipped(self) -> Kind {
        match self {
            Kind::Alpha => Kind::Beta,
            Kind::Beta => Kind::Alpha,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Alpha => "alpha",
            Kind::Beta => "beta",
        }
    }
}

/// A subset of the matched pairs `{1..k}`, stored as a bitmask (bit `i`
/// stands for pair `i + 1`).
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairSet(pub u32);

impl PairSet {
    pub const EMPTY: PairSet = PairSet(0);

    pub fn full(k: usize) -> PairSet {
        PairSet(((1u64 << k) - 1) as u32)
    }

    /// Pair indices are zero-based here.
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> PairSet {
        PairSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> PairSet {
        PairSet(self.0 & !(1 << i))
    }

    pub fn complement(self, k: usize) -> PairSet {
        PairSet(!self.0 & PairSet::full(k).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: PairSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }

    /// Sorted one-based indices, the order used for basis sorting.
    pub fn indices(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// All subsets of `{1..k}` in bitmask order.
    pub fn all(k: usize) -> impl Iterator<Item = PairSet> {
        (0..1u32 << k).map(PairSet)
    }

    /// Parses `{1,3}`, `{}` or `∅`; checks indices against the rank.
    pub fn parse(s: &str, k: usize) -> Result<PairSet> {
        let s = s.trim();
        if s == "∅" {
            return Ok(PairSet::EMPTY);
        }
        let inner = s
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::Descriptor(format!("expected a set like {{1,2}}, got `{s}`")))?;
        let mut out = PairSet::EMPTY;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let i: usize = part
                .parse()
                .map_err(|_| Error::Descriptor(format!("bad pair index `{part}`")))?;
            if i == 0 || i > k {
                return Err(Error::Descriptor(format!(
                    "pair index {i} outside 1..={k}"
                )));
            }
            out = out.with(i - 1);
        }
        Ok(out)
    }
}

impl fmt::Display for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for PairSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// One `match i: p q` line. Raw data: validation decides if it is sensible.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Match {
    pub index: usize,
    pub points: Vec<String>,
}

/// An arc diagram as written down. It may violate the arc diagram
/// conditions; [`ArcDiagram::validate`] reports how.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcDiagram {
    pub kind: Kind,
    /// Point names along each arc, in orientation order.
    pub arcs: Vec<Vec<String>>,
    pub matches: Vec<Match>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicatePoint(String),
    NotTwoToOne { pair: usize, count: usize },
    BadPairIndices(Vec<usize>),
    UnknownPoint(String),
    UnmatchedPoint(String),
    MatchedTwice(String),
    /// Surgery on the matched pairs leaves a circle; the names are the points
    /// at which the circle meets the arcs.
    ClosedComponent(Vec<String>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicatePoint(p) => write!(f, "point {p} appears more than once on the arcs"),
            Violation::NotTwoToOne { pair, count } => {
                write!(f, "matching not 2-to-1: pair {pair} has {count} points")
            }
            Violation::BadPairIndices(v) => write!(f, "pair indices {v:?} are not exactly 1..k"),
            Violation::UnknownPoint(p) => write!(f, "matched point {p} is on no arc"),
            Violation::UnmatchedPoint(p) => write!(f, "point {p} is not matched"),
            Violation::MatchedTwice(p) => write!(f, "point {p} is matched more than once"),
            Violation::ClosedComponent(ps) => write!(
                f,
                "surgery leaves a closed component through {}",
                ps.join(" ")
            ),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SurfaceStats {
    pub euler_characteristic: i64,
    pub num_sutures: usize,
}

/// Resolved indexing of a well-formed diagram. Points are numbered along
/// the arcs in order; pairs are zero-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub kind: Kind,
    pub names: Vec<String>,
    pub arc_of: Vec<usize>,
    pub pos: Vec<usize>,
    pub pair_of: Vec<usize>,
    pub arcs: Vec<Vec<usize>>,
    pub pairs: Vec<[usize; 2]>,
}

impl Layout {
    pub fn rank(&self) -> usize {
        self.pairs.len()
    }

    pub fn num_points(&self) -> usize {
        self.names.len()
    }

    /// Position along the arc measured in the veering direction: movers go
    /// from lower to higher height.
    pub fn height(&self, p: usize) -> isize {
        match self.kind {
            Kind::Alpha => self.pos[p] as isize,
            Kind::Beta => -(self.pos[p] as isize),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl ArcDiagram {
    pub fn new(kind: Kind, arcs: Vec<Vec<&str>>, pairs: Vec<(&str, &str)>) -> ArcDiagram {
        ArcDiagram {
            kind,
            arcs: arcs
                .into_iter()
                .map(|a| a.into_iter().map(String::from).collect())
                .collect(),
            matches: pairs
                .into_iter()
                .enumerate()
                .map(|(i, (p, q))| Match {
                    index: i + 1,
                    points: vec![p.to_string(), q.to_string()],
                })
                .collect(),
        }
    }

    pub fn empty() -> ArcDiagram {
        ArcDiagram::new(Kind::Alpha, vec![], vec![])
    }

    pub fn rank(&self) -> usize {
        self.matches.len()
    }

    /// Structural problems only: everything the algebra needs.
    pub fn structural_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut on_arcs = BTreeSet::new();
        for p in self.arcs.iter().flatten() {
            if !on_arcs.insert(p.clone()) {
                out.push(Violation::DuplicatePoint(p.clone()));
            }
        }
        let mut indices: Vec<usize> = self.matches.iter().map(|m| m.index).collect();
        indices.sort_unstable();
        if indices != (1..=self.matches.len()).collect::<Vec<_>>() {
            out.push(Violation::BadPairIndices(indices));
        }
        let mut matched: BTreeMap<&str, usize> = BTreeMap::new();
        for m in &self.matches {
            let distinct: BTreeSet<&String> = m.points.iter().collect();
            if m.points.len() != 2 || distinct.len() != 2 {
                out.push(Violation::NotTwoToOne {
                    pair: m.index,
                    count: distinct.len(),
                });
            }
            for p in &m.points {
                *matched.entry(p.as_str()).or_default() += 1;
                if !on_arcs.contains(p) {
                    out.push(Violation::UnknownPoint(p.clone()));
                }
            }
        }
        for (p, c) in &matched {
            if *c > 1 {
                out.push(Violation::MatchedTwice(p.to_string()));
            }
        }
        for p in &on_arcs {
            if !matched.contains_key(p.as_str()) {
                out.push(Violation::UnmatchedPoint(p.clone()));
            }
        }
        out
    }

    /// Every violated condition, including closed components after
    /// surgery; empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = self.structural_violations();
        if out.is_empty() {
            let layout = self.layout().expect("structurally sound");
            out.extend(closed_components(&layout).into_iter().map(|c| {
                Violation::ClosedComponent(c.into_iter().map(|p| layout.names[p].clone()).collect())
            }));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Indexing for a structurally sound diagram. The surgery condition is
    /// not required: the strands algebra only needs the 2-to-1 matching.
    pub fn layout(&self) -> Result<Layout> {
        let v = self.structural_violations();
        if let Some(first) = v.first() {
            return Err(Error::Malformed(first.to_string()));
        }
        let mut names = Vec::new();
        let mut arc_of = Vec::new();
        let mut pos = Vec::new();
        let mut arcs = Vec::new();
        for (a, arc) in self.arcs.iter().enumerate() {
            let mut ids = Vec::new();
            for (i, p) in arc.iter().enumerate() {
                ids.push(names.len());
                names.push(p.clone());
                arc_of.push(a);
                pos.push(i);
            }
            arcs.push(ids);
        }
        let mut pair_of = vec![0; names.len()];
        let mut pairs = vec![[0, 0]; self.matches.len()];
        for m in &self.matches {
            let mut ends: Vec<usize> = m
                .points
                .iter()
                .map(|p| names.iter().position(|n| n == p).expect("checked"))
                .collect();
            ends.sort_unstable();
            for &e in &ends {
                pair_of[e] = m.index - 1;
            }
            pairs[m.index - 1] = [ends[0], ends[1]];
        }
        Ok(Layout {
            kind: self.kind,
            names,
            arc_of,
            pos,
            pair_of,
            arcs,
            pairs,
        })
    }

    /// Reverses the orientation of every arc.
    pub fn reverse(&self) -> ArcDiagram {
        ArcDiagram {
            kind: self.kind,
            arcs: self
                .arcs
                .iter()
                .map(|a| a.iter().rev().cloned().collect())
                .collect(),
            matches: self.matches.clone(),
        }
    }

    pub fn flip_type(&self) -> ArcDiagram {
        ArcDiagram {
            kind: self.kind.flipped(),
            ..self.clone()
        }
    }

    pub fn surface_stats(&self) -> SurfaceStats {
        SurfaceStats {
            euler_characteristic: self.arcs.len() as i64 - self.rank() as i64,
            num_sutures: 2 * self.arcs.len(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("type: {}\n", self.kind.name());
        for arc in &self.arcs {
            s.push_str("arc:");
            for p in arc {
                s.push(' ');
                s.push_str(p);
            }
            s.push('\n');
        }
        let mut ms: Vec<&Match> = self.matches.iter().collect();
        ms.sort_by_key(|m| m.index);
        for m in ms {
            s.push_str(&format!("match {}:", m.index));
            for p in &m.points {
                s.push(' ');
                s.push_str(p);
            }
            s.push('\n');
        }
        s
    }

    /// Parses the line format. Blank lines and `#` comments are skipped;
    /// the `type:` line must come first, then arcs, then matches.
    pub fn parse(text: &str) -> Result<ArcDiagram> {
        let mut kind = None;
        let mut arcs = Vec::new();
        let mut matches = Vec::new();
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("type:") {
                if kind.is_some() {
                    return Err(err(line_no, "duplicate type line".into()));
                }
                kind = Some(match rest.trim() {
                    "alpha" => Kind::Alpha,
                    "beta" => Kind::Beta,
                    other => return Err(err(line_no, format!("unknown type `{other}`"))),
                });
                continue;
            }
            if kind.is_none() {
                return Err(err(line_no, "expected `type: alpha` or `type: beta` first".into()));
            }
            if let Some(rest) = line.strip_prefix("arc:") {
                if !matches.is_empty() {
                    return Err(err(line_no, "arc line after match lines".into()));
                }
                arcs.push(rest.split_whitespace().map(String::from).collect());
            } else if let Some(rest) = line.strip_prefix("match") {
                let (idx, pts) = rest
                    .split_once(':')
                    .ok_or_else(|| err(line_no, "expected `match i: p q`".into()))?;
                let index: usize = idx
                    .trim()
                    .parse()
                    .map_err(|_| err(line_no, format!("bad pair index `{}`", idx.trim())))?;
                matches.push(Match {
                    index,
                    points: pts.split_whitespace().map(String::from).collect(),
                });
            } else {
                return Err(err(line_no, format!("unrecognized line `{line}`")));
            }
        }
        let kind = kind.ok_or_else(|| err(0, "missing type line".into()))?;
        Ok(ArcDiagram { kind, arcs, matches })
    }
}

/// Components of the surgered 1-manifold that never reach an arc end.
///
/// Each arc is cut at its points into segments. Surgery on a pair `{p, q}`
/// with an orientable handle joins the segment below `p` to the segment
/// above `q` and vice versa.
fn closed_components(layout: &Layout) -> Vec<Vec<usize>> {
    // Segment ids: arc a with n points has segments base[a] .. base[a] + n.
    let mut base = Vec::new();
    let mut total = 0;
    for arc in &layout.arcs {
        base.push(total);
        total += arc.len() + 1;
    }
    let below = |p: usize| base[layout.arc_of[p]] + layout.pos[p];
    let above = |p: usize| base[layout.arc_of[p]] + layout.pos[p] + 1;
    let mut parent: Vec<usize> = (0..total).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    };
    for &[p, q] in &layout.pairs {
        union(below(p), above(q));
        union(below(q), above(p));
    }
    let mut open = BTreeSet::new();
    for (a, arc) in layout.arcs.iter().enumerate() {
        open.insert(find(&mut parent, base[a]));
        open.insert(find(&mut parent, base[a] + arc.len()));
    }
    let mut comps: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for p in 0..layout.num_points() {
        for s in [below(p), above(p)] {
            let r = find(&mut parent, s);
            if !open.contains(&r) {
                comps.entry(r).or_default().insert(p);
            }
        }
    }
    comps.into_values().map(|s| s.into_iter().collect()).collect()
}

/// The diagrams used throughout the tests and examples.
pub mod canonical {
    use super::*;

    pub fn z0() -> ArcDiagram {
        ArcDiagram::empty()
    }

    /// One arc with its two points matched. Surgery leaves a circle, so this
    /// is not a valid arc diagram, but its algebra is still well defined and
    /// is the smallest one with a moving strand.
    pub fn z1() -> ArcDiagram {
        ArcDiagram::new(Kind::Alpha, vec![vec!["a1", "a2"]], vec![("a1", "a2")])
    }

    /// One arc, interleaved pairs: the smallest valid diagram with crossings.
    pub fn z2() -> ArcDiagram {
        ArcDiagram::new(
            Kind::Alpha,
            vec![vec!["a1", "a2", "a3", "a4"]],
            vec![("a1", "a3"), ("a2", "a4")],
        )
    }

    /// The smallest valid diagram with a moving strand: two points on one
    /// arc matched to two points on another.
    pub fn z_two_arcs() -> ArcDiagram {
        ArcDiagram::new(
            Kind::Alpha,
            vec![vec!["a1", "a2"], vec!["a3", "a4"]],
            vec![("a1", "a3"), ("a2", "a4")],
        )
    }

    pub fn by_name(name: &str) -> Option<ArcDiagram> {
        match name {
            "Z0" => Some(z0()),
            "Z1" => Some(z1()),
            "Z2" => Some(z2()),
            _ => None,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::canonical::*;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn validate_examples() {
        let bad = ArcDiagram {
            kind: Kind::Alpha,
            arcs: vec![vec!["a1".into(), "a2".into(), "a3".into()]],
            matches: vec![Match {
                index: 1,
                points: vec!["a1".into(), "a2".into(), "a3".into()],
            }],
        };
        assert!(bad
            .validate()
            .contains(&Violation::NotTwoToOne { pair: 1, count: 3 }));
        assert!(z_two_arcs().validate().is_empty());
        assert!(z2().validate().is_empty());
        assert!(z0().validate().is_empty());
    }

    #[test]
    fn adjacent_pair_on_one_arc_leaves_a_circle() {
        assert_eq!(
            z1().validate(),
            vec![Violation::ClosedComponent(vec!["a1".into(), "a2".into()])]
        );
        assert!(z1().structural_violations().is_empty());
    }

    #[test]
    fn nested_pairs_are_invalid() {
        let z = ArcDiagram::new(
            Kind::Alpha,
            vec![vec!["a", "b", "c", "d"]],
            vec![("a", "d"), ("b", "c")],
        );
        assert!(!z.is_valid());
    }

    #[test]
    fn reverse_and_flip() {
        assert_eq!(z1().reverse().arcs, vec![vec!["a2".to_string(), "a1".to_string()]]);
        assert_eq!(z2().reverse().reverse(), z2());
        assert_eq!(
            z2().reverse().arcs[0],
            vec!["a4", "a3", "a2", "a1"].iter().map(|s| s.to_string()).collect::<Vec<_>>()
        );
        assert_eq!(z1().flip_type().kind, Kind::Beta);
        assert_eq!(z1().flip_type().flip_type(), z1());
        assert_eq!(z1().flip_type().reverse(), z1().reverse().flip_type());
    }

    #[test]
    fn stats() {
        assert_eq!(
            z1().surface_stats(),
            SurfaceStats { euler_characteristic: 0, num_sutures: 2 }
        );
        assert_eq!(
            z2().surface_stats(),
            SurfaceStats { euler_characteristic: -1, num_sutures: 2 }
        );
        assert_eq!(
            z0().surface_stats(),
            SurfaceStats { euler_characteristic: 0, num_sutures: 0 }
        );
    }

    #[test]
    fn text_round_trip() {
        for z in [z0(), z1(), z2(), z_two_arcs()] {
            let t = z.to_text();
            let back = ArcDiagram::parse(&t).unwrap();
            assert_eq!(back, z);
            assert_eq!(back.to_text(), t);
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = ArcDiagram::parse("type: alpha\narc: a b\nbogus\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, msg: "unrecognized line `bogus`".into() });
        let e = ArcDiagram::parse("arc: a b\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn pairset_parse_and_display() {
        assert_eq!(PairSet::parse("{1,3}", 3).unwrap(), PairSet(0b101));
        assert_eq!(PairSet::parse("∅", 3).unwrap(), PairSet::EMPTY);
        assert_eq!(PairSet(0b101).to_string(), "{1,3}");
        assert!(PairSet::parse("{4}", 3).is_err());
    }

    /// Random structurally sound diagrams: shuffle 2k points onto arcs.
    pub(crate) fn arb_diagram(max_rank: usize) -> impl Strategy<Value = ArcDiagram> {
        (0..=max_rank, 1usize..4, any::<bool>(), any::<u64>()).prop_map(|(k, narcs, beta, seed)| {
            random_diagram(k, narcs, beta, seed)
        })
    }

    pub(crate) fn random_diagram(k: usize, narcs: usize, beta: bool, seed: u64) -> ArcDiagram {
        let mut s = seed | 1;
        let mut next = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s
        };
        let mut pts: Vec<usize> = (0..2 * k).collect();
        for i in (1..pts.len()).rev() {
            let j = (next() % (i as u64 + 1)) as usize;
            pts.swap(i, j);
        }
        let mut arcs = vec![Vec::new(); narcs];
        for (i, &p) in pts.iter().enumerate() {
            let a = if i == 0 { 0 } else { (next() % narcs as u64) as usize };
            arcs[a].push(format!("p{p}"));
        }
        ArcDiagram {
            kind: if beta { Kind::Beta } else { Kind::Alpha },
            arcs,
            matches: (0..k)
                .map(|i| Match {
                    index: i + 1,
                    points: vec![format!("p{}", 2 * i), format!("p{}", 2 * i + 1)],
                })
                .collect(),
        }
    }

    proptest! {
        #[test]
        fn validity_is_symmetric(z in arb_diagram(4)) {
            let v = z.is_valid();
            prop_assert_eq!(z.reverse().is_valid(), v);
            prop_assert_eq!(z.flip_type().is_valid(), v);
        }

        #[test]
        fn klein_four_orbit(z in arb_diagram(4)) {
            prop_assert_eq!(z.reverse().reverse(), z.clone());
            prop_assert_eq!(z.flip_type().flip_type(), z.clone());
            prop_assert_eq!(z.reverse().flip_type(), z.flip_type().reverse());
        }

        #[test]
        fn euler_characteristic(z in arb_diagram(4)) {
            let s = z.surface_stats();
            prop_assert_eq!(s.euler_characteristic, z.arcs.len() as i64 - z.rank() as i64);
        }
    }
}
