//! Explicit planar nice diagrams for twisting slices and caps, with domain
//! counting done on rational coordinates.
//!
//! Each arc of the diagram gets a square `[0,N]²`. A point `p` at height
//! rank `r` sits at `T = 4(r+1)`: on the left edge at `(0,T)`, on the right
//! edge at `(N,N-T)` and on the top edge near `(N-T,N)`. The α-segment of
//! `p` runs from the left mark to `(N-T-1,N)`, the β-segment from the right
//! mark to `(N-T+1,N)`; the top interval between them is the foot of the
//! handle for the pair of `p`. Inside a handle the α- and β-arcs of the pair
//! cross once. When drawing polygons the handle corner is placed at
//! `(N-T,N+1)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Ratio;

use crate::ainf::{Key, Module, Side, Table, Term};
use crate::arc_diagram::{ArcDiagram, Layout, PairSet};
use crate::error::{Error, Result};
use crate::strands::{ABasisElem, AlgebraModel};

type Q = Ratio<i64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pt {
    pub x: Q,
    pub y: Q,
}

impl Pt {
    fn int(x: i64, y: i64) -> Pt {
        Pt { x: Q::from_integer(x), y: Q::from_integer(y) }
    }
}

fn cross(o: Pt, a: Pt, b: Pt) -> Q {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn sign(q: Q) -> i32 {
    if q > Q::from_integer(0) {
        1
    } else if q < Q::from_integer(0) {
        -1
    } else {
        0
    }
}

fn on_segment(p: Pt, a: Pt, b: Pt) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segments share a point.
fn segments_meet(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let (d1, d2, d3, d4) = (sign(cross(c, d, a)), sign(cross(c, d, b)), sign(cross(a, b, c)), sign(cross(a, b, d)));
    if d1 * d2 < 0 && d3 * d4 < 0 {
        return true;
    }
    (d1 == 0 && on_segment(a, c, d))
        || (d2 == 0 && on_segment(b, c, d))
        || (d3 == 0 && on_segment(c, a, b))
        || (d4 == 0 && on_segment(d, a, b))
}

/// The crossing of two segments when it is a transverse point interior to
/// both.
fn transverse(a: Pt, b: Pt, c: Pt, d: Pt) -> Option<Pt> {
    let (d1, d2, d3, d4) = (sign(cross(c, d, a)), sign(cross(c, d, b)), sign(cross(a, b, c)), sign(cross(a, b, d)));
    if d1 * d2 >= 0 || d3 * d4 >= 0 {
        return None;
    }
    let t = cross(c, d, a) / (cross(c, d, a) - cross(c, d, b));
    Some(Pt { x: a.x + (b.x - a.x) * t, y: a.y + (b.y - a.y) * t })
}

fn signed_area(poly: &[Pt]) -> Q {
    let n = poly.len();
    (0..n).fold(Q::from_integer(0), |acc, i| {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        acc + p.x * q.y - q.x * p.y
    })
}

/// Strict interior test: points on an edge are outside.
fn inside(poly: &[Pt], p: Pt) -> bool {
    let n = poly.len();
    if (0..n).any(|i| sign(cross(poly[i], poly[(i + 1) % n], p)) == 0 && on_segment(p, poly[i], poly[(i + 1) % n])) {
        return false;
    }
    let mut odd = false;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                odd = !odd;
            }
        }
    }
    odd
}

fn is_simple(poly: &[Pt]) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_meet(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Slice,
    Cap(PairSet),
}

#[derive(Clone, Debug)]
pub struct Square {
    pub arc: usize,
    pub size: i64,
    /// Points of the arc, bottom to top.
    pub marks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Handle {
    pub pair: usize,
    pub feet: [usize; 2],
}

/// A straight piece of an α- or β-arc inside one square, from its mark on
/// the side edge to its foot on the top edge.
#[derive(Clone, Debug)]
pub struct Segment {
    pub point: usize,
    pub pair: usize,
    pub square: usize,
    pub start: Pt,
    pub end: Pt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    /// α-segment of the first point against β-segment of the second.
    Square { alpha: usize, beta: usize, at: Pt },
    Handle(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPoint {
    pub alpha: usize,
    pub beta: usize,
    pub crossing: Crossing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeLabel {
    Alpha(usize),
    Beta(usize),
    Left,
    Right,
    Top,
    Bottom,
    Foot(usize),
}

impl EdgeLabel {
    fn is_boundary(self) -> bool {
        matches!(self, EdgeLabel::Left | EdgeLabel::Right | EdgeLabel::Top | EdgeLabel::Bottom)
    }
}

#[derive(Clone, Debug)]
pub struct Region {
    pub square: Option<usize>,
    pub boundary: bool,
    pub corners: usize,
    pub vertices: Vec<Pt>,
    pub edges: Vec<EdgeLabel>,
    pub neighbors: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct PlanarDiagram {
    pub family: Family,
    pub layout: Layout,
    pub squares: Vec<Square>,
    pub handles: Vec<Handle>,
    /// Indexed by point.
    pub alpha: Vec<Segment>,
    /// Indexed by point; empty for caps.
    pub beta: Vec<Segment>,
    /// Pairs carrying a β-circle (caps only).
    pub beta_circles: Vec<usize>,
    pub points: Vec<IntersectionPoint>,
    pub regions: Vec<Region>,
    /// Height of each point's marks on the side edges.
    pub levels: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DiagramGenerator {
    pub points: Vec<usize>,
}

struct Frame {
    size: Vec<i64>,
    level: Vec<i64>,
}

fn frame(layout: &Layout) -> (Vec<Square>, Frame) {
    let n = layout.num_points();
    let mut level = vec![0; n];
    let mut squares = Vec::new();
    let mut size = Vec::new();
    for (arc, pts) in layout.arcs.iter().enumerate() {
        let mut marks = pts.clone();
        marks.sort_by_key(|&p| layout.height(p));
        for (r, &p) in marks.iter().enumerate() {
            level[p] = 4 * (r as i64 + 1);
        }
        let s = 4 * (marks.len() as i64 + 1);
        size.push(s);
        squares.push(Square { arc, size: s, marks });
    }
    (squares, Frame { size, level })
}

impl Frame {
    fn phi(&self, _: &Layout, p: usize) -> Pt {
        Pt::int(0, self.level[p])
    }
    fn phi_prime(&self, l: &Layout, p: usize) -> Pt {
        let n = self.size[l.arc_of[p]];
        Pt::int(n, n - self.level[p])
    }
    fn foot_alpha(&self, l: &Layout, p: usize) -> Pt {
        let n = self.size[l.arc_of[p]];
        Pt::int(n - self.level[p] - 1, n)
    }
    fn foot_beta(&self, l: &Layout, p: usize) -> Pt {
        let n = self.size[l.arc_of[p]];
        Pt::int(n - self.level[p] + 1, n)
    }
    fn apex(&self, l: &Layout, p: usize) -> Pt {
        let n = self.size[l.arc_of[p]];
        Pt::int(n - self.level[p], n + 1)
    }
}

fn handles(layout: &Layout) -> Vec<Handle> {
    layout.pairs.iter().enumerate().map(|(i, &feet)| Handle { pair: i, feet }).collect()
}

/// The twisting-slice diagram of `z`.
pub fn build_twisting_slice_diagram(z: &ArcDiagram) -> Result<PlanarDiagram> {
    let layout = z.layout()?;
    let (squares, fr) = frame(&layout);
    let n = layout.num_points();
    let alpha: Vec<Segment> = (0..n)
        .map(|p| Segment {
            point: p,
            pair: layout.pair_of[p],
            square: layout.arc_of[p],
            start: fr.phi(&layout, p),
            end: fr.foot_alpha(&layout, p),
        })
        .collect();
    let beta: Vec<Segment> = (0..n)
        .map(|p| Segment {
            point: p,
            pair: layout.pair_of[p],
            square: layout.arc_of[p],
            start: fr.phi_prime(&layout, p),
            end: fr.foot_beta(&layout, p),
        })
        .collect();
    let mut points: Vec<IntersectionPoint> = (0..layout.rank())
        .map(|i| IntersectionPoint { alpha: i, beta: i, crossing: Crossing::Handle(i) })
        .collect();
    for a in &alpha {
        for b in &beta {
            if a.square != b.square {
                continue;
            }
            if let Some(at) = transverse(a.start, a.end, b.start, b.end) {
                points.push(IntersectionPoint {
                    alpha: a.pair,
                    beta: b.pair,
                    crossing: Crossing::Square { alpha: a.point, beta: b.point, at },
                });
            }
        }
    }
    let mut d = PlanarDiagram {
        family: Family::Slice,
        handles: handles(&layout),
        layout,
        squares,
        alpha,
        beta,
        beta_circles: Vec::new(),
        points,
        regions: Vec::new(),
        levels: fr.level.clone(),
    };
    d.regions = regions(&d, &fr);
    check_niceness(&d)?;
    Ok(d)
}

/// The cap diagram for `set`: α-arcs as in the slice, no β-arcs, and a
/// β-circle around the core of each handle whose pair is not in `set`.
pub fn build_cap_diagram(z: &ArcDiagram, set: PairSet) -> Result<PlanarDiagram> {
    let layout = z.layout()?;
    if set.iter().any(|i| i >= layout.rank()) {
        return Err(Error::Diagram(format!("{set} is not a subset of the pairs")));
    }
    let (squares, fr) = frame(&layout);
    let alpha = (0..layout.num_points())
        .map(|p| Segment {
            point: p,
            pair: layout.pair_of[p],
            square: layout.arc_of[p],
            start: fr.phi(&layout, p),
            end: fr.foot_alpha(&layout, p),
        })
        .collect();
    let circles: Vec<usize> = set.complement(layout.rank()).iter().collect();
    let points = circles
        .iter()
        .map(|&i| IntersectionPoint { alpha: i, beta: i, crossing: Crossing::Handle(i) })
        .collect();
    let mut d = PlanarDiagram {
        family: Family::Cap(set),
        handles: handles(&layout),
        layout,
        squares,
        alpha,
        beta: Vec::new(),
        beta_circles: circles,
        points,
        regions: Vec::new(),
        levels: fr.level.clone(),
    };
    d.regions = regions(&d, &fr);
    check_niceness(&d)?;
    Ok(d)
}

/// Direction comparison for the angular order around a vertex.
fn angle_key(o: Pt, p: Pt) -> (u8, Pt) {
    let (dx, dy) = (p.x - o.x, p.y - o.y);
    let zero = Q::from_integer(0);
    let half = if dy > zero || (dy == zero && dx > zero) { 0 } else { 1 };
    (half, Pt { x: dx, y: dy })
}

fn angle_cmp(o: Pt, a: Pt, b: Pt) -> std::cmp::Ordering {
    let (ha, da) = angle_key(o, a);
    let (hb, db) = angle_key(o, b);
    ha.cmp(&hb).then_with(|| {
        let c = da.x * db.y - da.y * db.x;
        Q::from_integer(0).cmp(&c)
    })
}

/// Faces of each square's arrangement, plus the side regions of the
/// handles. Triangles of a handle between the α- and β-arc are merged into
/// the square face under the foot.
fn regions(d: &PlanarDiagram, fr: &Frame) -> Vec<Region> {
    let mut out = Vec::new();
    let l = &d.layout;
    for (s, sq) in d.squares.iter().enumerate() {
        let n = sq.size;
        let mut edges: Vec<(Pt, Pt, EdgeLabel)> = Vec::new();
        let mut chain = |mut pts: Vec<Pt>, key: &dyn Fn(&Pt) -> Q, label: &dyn Fn(Pt, Pt) -> EdgeLabel| {
            pts.sort_by_key(|p| key(p));
            pts.dedup();
            for w in pts.windows(2) {
                edges.push((w[0], w[1], label(w[0], w[1])));
            }
        };
        let crossings_on = |alpha: Option<usize>, beta: Option<usize>| -> Vec<Pt> {
            d.points
                .iter()
                .filter_map(|ip| match ip.crossing {
                    Crossing::Square { alpha: a, beta: b, at } if Some(a) == alpha || Some(b) == beta => Some(at),
                    _ => None,
                })
                .collect()
        };
        for &p in &sq.marks {
            let seg = &d.alpha[p];
            let mut pts = crossings_on(Some(p), None);
            pts.push(seg.start);
            pts.push(seg.end);
            chain(pts, &|q: &Pt| q.x, &|_, _| EdgeLabel::Alpha(p));
            if let Some(seg) = d.beta.get(p) {
                let mut pts = crossings_on(None, Some(p));
                pts.push(seg.start);
                pts.push(seg.end);
                chain(pts, &|q: &Pt| q.x, &|_, _| EdgeLabel::Beta(p));
            }
        }
        let corners = [Pt::int(0, 0), Pt::int(n, 0), Pt::int(n, n), Pt::int(0, n)];
        let mut left = vec![corners[0], corners[3]];
        let mut right = vec![corners[1], corners[2]];
        let mut top = vec![corners[2], corners[3]];
        let mut feet = BTreeMap::new();
        for &p in &sq.marks {
            left.push(fr.phi(l, p));
            top.push(fr.foot_alpha(l, p));
            if !d.beta.is_empty() {
                right.push(fr.phi_prime(l, p));
                top.push(fr.foot_beta(l, p));
                feet.insert(fr.foot_alpha(l, p), p);
            }
        }
        chain(left, &|q: &Pt| q.y, &|_, _| EdgeLabel::Left);
        chain(right, &|q: &Pt| q.y, &|_, _| EdgeLabel::Right);
        chain(top, &|q: &Pt| q.x, &|a, _| match feet.get(&a) {
            Some(&p) => EdgeLabel::Foot(p),
            None => EdgeLabel::Top,
        });
        chain(vec![corners[0], corners[1]], &|q: &Pt| q.x, &|_, _| EdgeLabel::Bottom);

        let mut around: HashMap<Pt, Vec<Pt>> = HashMap::new();
        let mut label: HashMap<(Pt, Pt), EdgeLabel> = HashMap::new();
        for &(a, b, lab) in &edges {
            around.entry(a).or_default().push(b);
            around.entry(b).or_default().push(a);
            label.insert((a, b), lab);
            label.insert((b, a), lab);
        }
        for (o, nb) in around.iter_mut() {
            nb.sort_by(|a, b| angle_cmp(*o, *a, *b));
        }
        let crossing_pts: BTreeSet<Pt> = d
            .points
            .iter()
            .filter_map(|ip| match ip.crossing {
                Crossing::Square { at, .. } => Some(at),
                _ => None,
            })
            .collect();
        let mut face_of: HashMap<(Pt, Pt), usize> = HashMap::new();
        let mut faces: Vec<Vec<Pt>> = Vec::new();
        let mut keys: Vec<(Pt, Pt)> = label.keys().copied().collect();
        keys.sort();
        for start in keys {
            if face_of.contains_key(&start) {
                continue;
            }
            let id = faces.len();
            let mut cyc = Vec::new();
            let (mut u, mut v) = start;
            loop {
                face_of.insert((u, v), id);
                cyc.push(u);
                let nb = &around[&v];
                let k = nb.iter().position(|&w| w == u).expect("edge is recorded at both ends");
                let w = nb[(k + nb.len() - 1) % nb.len()];
                u = v;
                v = w;
                if (u, v) == start {
                    break;
                }
            }
            faces.push(cyc);
        }
        let base = out.len();
        let mut kept = BTreeMap::new();
        for (id, cyc) in faces.iter().enumerate() {
            if signed_area(cyc) <= Q::from_integer(0) {
                continue;
            }
            let labs: Vec<EdgeLabel> = (0..cyc.len()).map(|i| label[&(cyc[i], cyc[(i + 1) % cyc.len()])]).collect();
            let corners = cyc.iter().filter(|p| crossing_pts.contains(p)).count()
                + labs.iter().filter(|e| matches!(e, EdgeLabel::Foot(_))).count();
            kept.insert(id, base + kept.len());
            out.push(Region {
                square: Some(s),
                boundary: labs.iter().any(|e| e.is_boundary()),
                corners,
                vertices: cyc.clone(),
                edges: labs,
                neighbors: BTreeSet::new(),
            });
        }
        for (&(a, b), &f) in &face_of {
            if let (Some(&x), Some(&y)) = (kept.get(&f), face_of.get(&(b, a)).and_then(|g| kept.get(g))) {
                out[x].neighbors.insert(y);
            }
        }
    }
    for h in &d.handles {
        let pieces = match d.family {
            Family::Slice => 2,
            Family::Cap(_) if d.beta_circles.contains(&h.pair) => 4,
            Family::Cap(_) => 2,
        };
        for _ in 0..pieces {
            out.push(Region {
                square: None,
                boundary: true,
                corners: usize::from(pieces == 4 || d.family == Family::Slice),
                vertices: Vec::new(),
                edges: Vec::new(),
                neighbors: BTreeSet::new(),
            });
        }
    }
    out
}

/// Embedded curves, transverse crossings, and every region away from the
/// boundary a bigon or a rectangle.
pub fn check_niceness(d: &PlanarDiagram) -> Result<()> {
    for family in [&d.alpha, &d.beta] {
        for (i, a) in family.iter().enumerate() {
            for b in &family[i + 1..] {
                if a.square == b.square && segments_meet(a.start, a.end, b.start, b.end) {
                    return Err(Error::Diagram(format!("segments of points {} and {} meet", a.point, b.point)));
                }
            }
        }
    }
    for a in &d.alpha {
        for b in &d.beta {
            if a.square == b.square
                && segments_meet(a.start, a.end, b.start, b.end)
                && transverse(a.start, a.end, b.start, b.end).is_none()
            {
                return Err(Error::Diagram(format!("non-transverse meeting at points {} and {}", a.point, b.point)));
            }
        }
    }
    for (i, r) in d.regions.iter().enumerate() {
        if !r.boundary && r.corners != 2 && r.corners != 4 {
            return Err(Error::Diagram(format!("interior region {i} has {} corners", r.corners)));
        }
    }
    Ok(())
}

/// Sets of intersection points using each α-arc and each β-arc at most
/// once and every β-circle exactly once.
pub fn enumerate_generators(d: &PlanarDiagram) -> Vec<DiagramGenerator> {
    let k = d.layout.rank();
    let mut by_alpha: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, ip) in d.points.iter().enumerate() {
        by_alpha[ip.alpha].push(i);
    }
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn go(
        d: &PlanarDiagram,
        by_alpha: &[Vec<usize>],
        arc: usize,
        used_beta: PairSet,
        chosen: &mut Vec<usize>,
        out: &mut Vec<DiagramGenerator>,
    ) {
        if arc == by_alpha.len() {
            if d.beta_circles.iter().all(|&c| used_beta.contains(c)) {
                let mut points = chosen.clone();
                points.sort_unstable();
                out.push(DiagramGenerator { points });
            }
            return;
        }
        go(d, by_alpha, arc + 1, used_beta, chosen, out);
        for &i in &by_alpha[arc] {
            let b = d.points[i].beta;
            if !used_beta.contains(b) {
                chosen.push(i);
                go(d, by_alpha, arc + 1, used_beta.with(b), chosen, out);
                chosen.pop();
            }
        }
    }
    go(d, &by_alpha, 0, PairSet::EMPTY, &mut chosen, &mut out);
    out.sort();
    out
}

impl DiagramGenerator {
    pub fn alpha_arcs(&self, d: &PlanarDiagram) -> PairSet {
        self.points.iter().fold(PairSet::EMPTY, |s, &i| s.with(d.points[i].alpha))
    }

    pub fn beta_arcs(&self, d: &PlanarDiagram) -> PairSet {
        self.points.iter().fold(PairSet::EMPTY, |s, &i| s.with(d.points[i].beta))
    }

    pub fn label(&self, d: &PlanarDiagram) -> String {
        let names: Vec<String> = self
            .points
            .iter()
            .map(|&i| match d.points[i].crossing {
                Crossing::Handle(p) => format!("x{}", p + 1),
                Crossing::Square { alpha, beta, .. } => {
                    format!("y({},{})", d.layout.names[alpha], d.layout.names[beta])
                }
            })
            .collect();
        format!("{{{}}}", names.join(","))
    }

    /// The strands element this generator stands for in a slice diagram.
    pub fn strands(&self, d: &PlanarDiagram) -> ABasisElem {
        let mut movers = Vec::new();
        let mut occupied = PairSet::EMPTY;
        for &i in &self.points {
            match d.points[i].crossing {
                Crossing::Handle(p) => occupied = occupied.with(p),
                Crossing::Square { alpha, beta, .. } => movers.push((alpha, beta)),
            }
        }
        movers.sort_unstable();
        ABasisElem { movers, occupied }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Edge {
    Alpha,
    Beta,
    Left,
    Right,
}

#[derive(Clone, Copy, Debug)]
struct Vertex {
    at: Pt,
    corner: Option<usize>,
    mark: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Interior,
    Left,
    Right,
}

/// An embedded polygon with its corners split into those of the source
/// and target generator, and the chord it covers on a side edge.
#[derive(Clone, Debug)]
pub struct Domain {
    pub kind: DomainKind,
    pub square: usize,
    pub from: Vec<usize>,
    pub to: Vec<usize>,
    pub chord: Option<(usize, usize)>,
    pub polygon: Vec<Pt>,
}

fn make_domain(square: usize, verts: Vec<Vertex>, edges: Vec<Edge>) -> Option<Domain> {
    let poly: Vec<Pt> = verts.iter().map(|v| v.at).collect();
    if !is_simple(&poly) {
        return None;
    }
    let area = signed_area(&poly);
    if area == Q::from_integer(0) {
        return None;
    }
    let n = verts.len();
    let ccw = area > Q::from_integer(0);
    let (mut from, mut to) = (Vec::new(), Vec::new());
    let mut chord = None;
    let mut kind = DomainKind::Interior;
    for i in 0..n {
        let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
        let leaving = if ccw { edges[i] } else { edges[prev] };
        if let Some(c) = verts[i].corner {
            let turn = cross(poly[prev], poly[i], poly[next]);
            if (turn > Q::from_integer(0)) != ccw {
                return None;
            }
            match leaving {
                Edge::Alpha => from.push(c),
                Edge::Beta => to.push(c),
                _ => return None,
            }
        }
        if matches!(edges[i], Edge::Left | Edge::Right) {
            let (p, q) = (verts[i].mark?, verts[next].mark?);
            // the chord runs against the counterclockwise boundary
            chord = Some(if ccw { (q, p) } else { (p, q) });
            kind = if edges[i] == Edge::Left { DomainKind::Left } else { DomainKind::Right };
        }
    }
    from.sort_unstable();
    to.sort_unstable();
    Some(Domain { kind, square, from, to, chord, polygon: poly })
}

/// Every candidate rectangle of the diagram, independent of generators.
pub fn domains(d: &PlanarDiagram) -> Vec<Domain> {
    if !d.beta_circles.is_empty() || d.beta.is_empty() {
        return Vec::new();
    }
    let l = &d.layout;
    let (_, fr) = frame(l);
    let mut at: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, ip) in d.points.iter().enumerate() {
        if let Crossing::Square { alpha, beta, .. } = ip.crossing {
            at.insert((alpha, beta), i);
        }
    }
    let pos = |i: usize| match d.points[i].crossing {
        Crossing::Square { at, .. } => at,
        Crossing::Handle(_) => unreachable!(),
    };
    let cr = |a: usize, b: usize| at.get(&(a, b)).map(|&i| Vertex { at: pos(i), corner: Some(i), mark: None });
    let mark = |p: Pt, m: usize| Vertex { at: p, corner: None, mark: Some(m) };
    let plain = |p: Pt| Vertex { at: p, corner: None, mark: None };
    let apex = |h: usize| Vertex { at: fr.apex(l, h), corner: Some(l.pair_of[h]), mark: None };
    // the handle corner followed along β from the foot, then back along α
    let through = |h: usize| [plain(fr.foot_beta(l, h)), apex(h), plain(fr.foot_alpha(l, h))];

    let mut out = Vec::new();
    for (s, sq) in d.squares.iter().enumerate() {
        let m = &sq.marks;
        for &a in m {
            for &b in m {
                for &c in m {
                    for &e in m {
                        if a < b && c < e {
                            if let (Some(ac), Some(ae), Some(be), Some(bc)) = (cr(a, c), cr(a, e), cr(b, e), cr(b, c)) {
                                out.extend(make_domain(
                                    s,
                                    vec![ac, ae, be, bc],
                                    vec![Edge::Alpha, Edge::Beta, Edge::Alpha, Edge::Beta],
                                ));
                            }
                        }
                    }
                    // rectangles reaching into the handle at the foot of b
                    if let (Some(ab), Some(ac), Some(bc)) = (cr(a, b), cr(a, c), cr(b, c)) {
                        let [fb, x, fa] = through(b);
                        out.extend(make_domain(
                            s,
                            vec![ab, fb, x, fa, bc, ac],
                            vec![Edge::Beta, Edge::Beta, Edge::Alpha, Edge::Alpha, Edge::Beta, Edge::Alpha],
                        ));
                    }
                    if a != b {
                        if let (Some(ac), Some(bc)) = (cr(a, c), cr(b, c)) {
                            out.extend(make_domain(
                                s,
                                vec![mark(fr.phi(l, a), a), ac, bc, mark(fr.phi(l, b), b)],
                                vec![Edge::Alpha, Edge::Beta, Edge::Alpha, Edge::Left],
                            ));
                        }
                        if let (Some(ca), Some(cb)) = (cr(c, a), cr(c, b)) {
                            out.extend(make_domain(
                                s,
                                vec![ca, mark(fr.phi_prime(l, a), a), mark(fr.phi_prime(l, b), b), cb],
                                vec![Edge::Beta, Edge::Right, Edge::Beta, Edge::Alpha],
                            ));
                        }
                    }
                }
                if a != b {
                    if let Some(ab) = cr(a, b) {
                        let [fb, x, fa] = through(b);
                        out.extend(make_domain(
                            s,
                            vec![mark(fr.phi(l, a), a), ab, fb, x, fa, mark(fr.phi(l, b), b)],
                            vec![Edge::Alpha, Edge::Beta, Edge::Beta, Edge::Alpha, Edge::Alpha, Edge::Left],
                        ));
                        let [fa2, x2, fa_alpha] = through(a);
                        out.extend(make_domain(
                            s,
                            vec![fa2, mark(fr.phi_prime(l, a), a), mark(fr.phi_prime(l, b), b), ab, fa_alpha, x2],
                            vec![Edge::Beta, Edge::Right, Edge::Beta, Edge::Alpha, Edge::Alpha, Edge::Beta],
                        ));
                    }
                }
            }
        }
    }
    out
}

/// No point of `g` other than the domain's own corners lies inside it.
fn is_empty(d: &PlanarDiagram, g: &DiagramGenerator, dom: &Domain) -> bool {
    g.points.iter().all(|&p| {
        dom.from.contains(&p)
            || match d.points[p].crossing {
                Crossing::Square { at, alpha, .. } => {
                    d.layout.arc_of[alpha] != d.squares[dom.square].arc || !inside(&dom.polygon, at)
                }
                Crossing::Handle(_) => true,
            }
    })
}

/// Applies every domain to every generator: the target generator, or
/// nothing when the domain is not empty or its corners are missing.
fn transitions(d: &PlanarDiagram, gens: &[DiagramGenerator], doms: &[Domain]) -> Vec<(usize, usize, usize)> {
    let index: HashMap<&[usize], usize> = gens.iter().enumerate().map(|(i, g)| (g.points.as_slice(), i)).collect();
    let mut out = Vec::new();
    for (gi, g) in gens.iter().enumerate() {
        for (di, dom) in doms.iter().enumerate() {
            if !dom.from.iter().all(|c| g.points.contains(c)) {
                continue;
            }
            if !is_empty(d, g, dom) {
                continue;
            }
            let mut pts: Vec<usize> = g.points.iter().copied().filter(|p| !dom.from.contains(p)).collect();
            pts.extend(&dom.to);
            pts.sort_unstable();
            if let Some(&t) = index.get(pts.as_slice()) {
                out.push((gi, di, t));
            }
        }
    }
    out
}

/// Multiplicity of a domain at a generator point, averaged over the four
/// quadrants.
fn multiplicity(d: &PlanarDiagram, dom: &Domain, p: usize) -> Q {
    let n = dom.polygon.len();
    match d.points[p].crossing {
        Crossing::Handle(_) if dom.from.contains(&p) || dom.to.contains(&p) => Q::new(1, 4),
        Crossing::Handle(_) => Q::from_integer(0),
        Crossing::Square { alpha, at, .. } => {
            if d.layout.arc_of[alpha] != d.squares[dom.square].arc {
                Q::from_integer(0)
            } else if dom.polygon.contains(&at) {
                Q::new(1, 4)
            } else if (0..n).any(|i| {
                let (a, b) = (dom.polygon[i], dom.polygon[(i + 1) % n]);
                sign(cross(a, b, at)) == 0 && on_segment(at, a, b)
            }) {
                Q::new(1, 2)
            } else if inside(&dom.polygon, at) {
                Q::from_integer(1)
            } else {
                Q::from_integer(0)
            }
        }
    }
}

/// Linking of two chords on the same edge, from their mark heights.
fn linking(d: &PlanarDiagram, a: (usize, usize), b: (usize, usize)) -> Q {
    let arc = &d.layout.arc_of;
    if arc[a.0] != arc[b.0] {
        return Q::from_integer(0);
    }
    let lv = |p: usize| d.levels[p];
    let (lo, hi) = (lv(b.0).min(lv(b.1)), lv(b.0).max(lv(b.1)));
    let m = |h: i64| {
        if h > lo && h < hi {
            Q::from_integer(1)
        } else if h == lo || h == hi {
            Q::new(1, 2)
        } else {
            Q::from_integer(0)
        }
    };
    let l = m(lv(a.1)) - m(lv(a.0));
    if l < Q::from_integer(0) {
        -l
    } else {
        l
    }
}

/// Applies a set of boundary rectangles, one per chord of `e`, to `x` at
/// once. The points left in place must lie outside every piece, and two
/// pieces may only meet each other's corners as much as their chords link.
fn act(
    d: &PlanarDiagram,
    gens: &[DiagramGenerator],
    doms: &[Domain],
    kind: DomainKind,
    e: &ABasisElem,
    x: usize,
) -> Option<usize> {
    let g = &gens[x];
    let mut picked = Vec::new();
    for &chord in &e.movers {
        let dom = doms
            .iter()
            .find(|dom| dom.kind == kind && dom.chord == Some(chord) && dom.from.iter().all(|c| g.points.contains(c)))?;
        picked.push(dom);
    }
    let moved: BTreeSet<usize> = picked.iter().flat_map(|dom| dom.from.iter().copied()).collect();
    if moved.len() != picked.iter().map(|dom| dom.from.len()).sum::<usize>() {
        return None;
    }
    let staying = DiagramGenerator { points: g.points.iter().copied().filter(|p| !moved.contains(p)).collect() };
    if !picked.iter().all(|dom| is_empty(d, &staying, dom)) {
        return None;
    }
    for (i, r) in picked.iter().enumerate() {
        for s in &picked[i + 1..] {
            let meet: Q = r.from.iter().chain(&r.to).map(|&p| multiplicity(d, s, p)).sum::<Q>()
                + s.from.iter().chain(&s.to).map(|&p| multiplicity(d, r, p)).sum::<Q>();
            if meet != linking(d, r.chord?, s.chord?) {
                return None;
            }
        }
    }
    let mut pts = staying.points;
    pts.extend(picked.iter().flat_map(|dom| dom.to.iter().copied()));
    pts.sort_unstable();
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    gens.iter().position(|h| h.points == pts)
}

/// The bimodule counted from a slice diagram, or the one-sided module of a
/// cap diagram.
pub fn count_domains(d: &PlanarDiagram, am: &Arc<AlgebraModel>) -> Result<Module> {
    let gens = enumerate_generators(d);
    let mgens: Vec<_> = gens
        .iter()
        .map(|g| Module::simple_gen(g.label(d), g.alpha_arcs(d), g.beta_arcs(d)))
        .collect();
    let doms = domains(d);
    let mut table = Table::new();
    for (x, di, y) in transitions(d, &gens, &doms) {
        if doms[di].kind == DomainKind::Interior {
            table.toggle(Key::bare(x), Term { left: None, gen: y, right: None });
        }
    }
    if let Family::Cap(_) = d.family {
        let gens = mgens.into_iter().map(|mut g| {
            g.right = PairSet::EMPTY;
            g
        });
        return Ok(Module::unchecked("BSA(cap)", Side::A(am.clone()), Side::None, gens.collect(), table));
    }
    for a in 0..am.dim() {
        if am.is_idempotent(a) {
            continue;
        }
        let e = am.elem(a);
        for (x, g) in gens.iter().enumerate() {
            if am.right_idem(a) == g.alpha_arcs(d) {
                if let Some(y) = act(d, &gens, &doms, DomainKind::Left, e, x) {
                    table.toggle(Key { left: vec![a], gen: x, right: vec![] }, Term { left: None, gen: y, right: None });
                }
            }
            if am.left_idem(a) == g.beta_arcs(d) {
                if let Some(y) = act(d, &gens, &doms, DomainKind::Right, e, x) {
                    table.toggle(Key { left: vec![], gen: x, right: vec![a] }, Term { left: None, gen: y, right: None });
                }
            }
        }
    }
    Ok(Module::unchecked("BSAA(slice)", Side::A(am.clone()), Side::A(am.clone()), mgens, table))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Diagram generator `i` corresponds to generator `bijection[i]`.
    Isomorphic { bijection: Vec<usize> },
    Mismatch(String),
}

impl Verdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Verdict::Isomorphic { .. })
    }
}

/// Matches diagram generators with the generators of `m` and compares the
/// full tables. Slice generators are matched through their strands
/// element; a cap has a single generator.
pub fn compare_with_algebra(d: &PlanarDiagram, counted: &Module, m: &Module) -> Verdict {
    let gens = enumerate_generators(d);
    if gens.len() != m.dim() || counted.dim() != m.dim() {
        return Verdict::Mismatch(format!("{} diagram generators against {}", gens.len(), m.dim()));
    }
    let bijection: Vec<usize> = match d.family {
        Family::Slice => {
            let Some(am) = m.left.algebra() else {
                return Verdict::Mismatch("target is not a bimodule over the algebra".into());
            };
            let mut out = Vec::new();
            for g in &gens {
                match am.index_of(&g.strands(d)) {
                    Some(i) => out.push(i),
                    None => return Verdict::Mismatch(format!("{} has no strands counterpart", g.label(d))),
                }
            }
            out
        }
        Family::Cap(_) => (0..gens.len()).collect(),
    };
    let mut seen = vec![false; m.dim()];
    for (i, &j) in bijection.iter().enumerate() {
        if std::mem::replace(&mut seen[j], true) {
            return Verdict::Mismatch(format!("two generators map to {}", m.gens[j].label));
        }
        let (a, b) = (&counted.gens[i], &m.gens[j]);
        if a.left != b.left || a.right != b.right {
            return Verdict::Mismatch(format!("idempotents differ at {}", a.label));
        }
    }
    let mut moved = Table::new();
    for (k, terms) in counted.table.iter() {
        for t in terms {
            moved.toggle(
                Key { left: k.left.clone(), gen: bijection[k.gen], right: k.right.clone() },
                Term { left: t.left, gen: bijection[t.gen], right: t.right },
            );
        }
    }
    if moved != m.table {
        let mut diff = moved.clone();
        diff.add(&m.table);
        let witness = diff.iter().next().map(|(k, _)| m.show_key(k)).unwrap_or_default();
        return Verdict::Mismatch(format!("tables differ at {witness}"));
    }
    Verdict::Isomorphic { bijection }
}

impl PlanarDiagram {
    /// Plain-text dump: curves, intersection points and regions with their
    /// neighbours.
    pub fn to_text(&self) -> String {
        let l = &self.layout;
        let mut s = String::new();
        let fam = match self.family {
            Family::Slice => "slice".to_string(),
            Family::Cap(set) => format!("cap {set}"),
        };
        let _ = writeln!(s, "# {fam}: {} squares, {} handles", self.squares.len(), self.handles.len());
        for (i, sq) in self.squares.iter().enumerate() {
            let names: Vec<&str> = sq.marks.iter().map(|&p| l.names[p].as_str()).collect();
            let _ = writeln!(s, "square {i} size {} marks {}", sq.size, names.join(" "));
        }
        for h in &self.handles {
            let _ = writeln!(s, "handle {} feet {} {}", h.pair + 1, l.names[h.feet[0]], l.names[h.feet[1]]);
        }
        for (name, segs) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            for g in segs {
                let _ = writeln!(
                    s,
                    "{name} {} pair {} ({},{}) -> ({},{})",
                    l.names[g.point],
                    g.pair + 1,
                    g.start.x,
                    g.start.y,
                    g.end.x,
                    g.end.y
                );
            }
        }
        for c in &self.beta_circles {
            let _ = writeln!(s, "beta-circle pair {}", c + 1);
        }
        for (i, ip) in self.points.iter().enumerate() {
            match ip.crossing {
                Crossing::Handle(p) => {
                    let _ = writeln!(s, "point {i} handle {}", p + 1);
                }
                Crossing::Square { alpha, beta, at } => {
                    let _ = writeln!(s, "point {i} y({},{}) at ({},{})", l.names[alpha], l.names[beta], at.x, at.y);
                }
            }
        }
        for (i, r) in self.regions.iter().enumerate() {
            let nb: Vec<String> = r.neighbors.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(
                s,
                "region {i} {} corners {} {} neighbours [{}]",
                r.square.map_or("handle".to_string(), |q| format!("square {q}")),
                r.corners,
                if r.boundary { "boundary" } else { "interior" },
                nb.join(",")
            );
        }
        s
    }
}
