//! The strands algebra of an arc diagram.
//!
//! Basis elements are stored symmetrized: a set of moving strands plus a set
//! of matched pairs carried by horizontal strands. Products and
//! differentials expand into plain strand diagrams, one horizontal point
//! chosen per occupied pair, and regroup afterwards.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::arc_diagram::{ArcDiagram, Layout, PairSet};
use crate::error::{Error, Result};
use crate::gf2::Gf2Vector;

/// A symmetrized basis element. Points are layout indices; movers are
/// sorted by source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ABasisElem {
    pub movers: Vec<(usize, usize)>,
    pub occupied: PairSet,
}

impl ABasisElem {
    pub fn is_idempotent(&self) -> bool {
        self.movers.is_empty()
    }
}

/// A plain strand diagram: strands `(source, target)` sorted by source,
/// horizontals included as `(h, h)`.
type Strands = Vec<(usize, usize)>;

pub struct AlgebraModel {
    diagram: ArcDiagram,
    layout: Layout,
    basis: Vec<ABasisElem>,
    index: HashMap<ABasisElem, usize>,
    left: Vec<PairSet>,
    right: Vec<PairSet>,
    idems: Vec<usize>,
    mult: HashMap<(usize, usize), Gf2Vector>,
    diff: Vec<Gf2Vector>,
    diff_pre: Vec<Vec<usize>>,
    mult_pre: Vec<Vec<(usize, usize)>>,
    by_left: Vec<Vec<usize>>,
}

impl fmt::Debug for AlgebraModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraModel")
            .field("rank", &self.rank())
            .field("dim", &self.dim())
            .finish()
    }
}

impl PartialEq for AlgebraModel {
    fn eq(&self, other: &Self) -> bool {
        self.diagram == other.diagram
    }
}

impl Eq for AlgebraModel {}

impl AlgebraModel {
    /// Builds the basis and all tables. The diagram only needs to be
    /// structurally sound.
    pub fn new(diagram: &ArcDiagram) -> Result<AlgebraModel> {
        let layout = diagram.layout()?;
        let mut basis = enumerate(&layout);
        basis.sort_by(|a, b| {
            (a.occupied.indices(), &a.movers).cmp(&(b.occupied.indices(), &b.movers))
        });
        let index: HashMap<ABasisElem, usize> =
            basis.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let k = layout.rank();
        let left: Vec<PairSet> = basis.iter().map(|e| left_idem(&layout, e)).collect();
        let right: Vec<PairSet> = basis.iter().map(|e| right_idem(&layout, e)).collect();
        let mut idems = vec![usize::MAX; 1 << k];
        for (i, e) in basis.iter().enumerate() {
            if e.is_idempotent() {
                idems[e.occupied.0 as usize] = i;
            }
        }
        let mut by_left = vec![Vec::new(); 1 << k];
        for (i, l) in left.iter().enumerate() {
            by_left[l.0 as usize].push(i);
        }
        let expansions: Vec<Vec<Strands>> = basis.iter().map(|e| expand(&layout, e)).collect();

        let lookup = |acc: HashMap<Strands, bool>| -> Result<Gf2Vector> {
            let elems = regroup(&layout, acc)?;
            elems
                .into_iter()
                .map(|e| {
                    index
                        .get(&e)
                        .copied()
                        .ok_or_else(|| Error::Symmetrize(format!("{e:?} is not a basis element")))
                })
                .collect::<Result<Vec<_>>>()
                .map(|v| v.into_iter().collect())
        };

        let mut diff = Vec::with_capacity(basis.len());
        for ex in &expansions {
            let mut acc = HashMap::new();
            for s in ex {
                for t in resolve_crossings(&layout, s) {
                    toggle(&mut acc, t);
                }
            }
            diff.push(lookup(acc)?);
        }

        let mut mult = HashMap::new();
        for x in 0..basis.len() {
            for &y in &by_left[right[x].0 as usize] {
                let mut acc = HashMap::new();
                for a in &expansions[x] {
                    for b in &expansions[y] {
                        if let Some(c) = concat(&layout, a, b) {
                            toggle(&mut acc, c);
                        }
                    }
                }
                let v = lookup(acc)?;
                if !v.is_empty() {
                    mult.insert((x, y), v);
                }
            }
        }

        let mut diff_pre = vec![Vec::new(); basis.len()];
        for (b, v) in diff.iter().enumerate() {
            for c in v.iter() {
                diff_pre[c].push(b);
            }
        }
        let mut mult_pre = vec![Vec::new(); basis.len()];
        let mut keys: Vec<&(usize, usize)> = mult.keys().collect();
        keys.sort();
        for &(a, b) in keys {
            if basis[a].is_idempotent() || basis[b].is_idempotent() {
                continue;
            }
            for c in mult[&(a, b)].iter() {
                mult_pre[c].push((a, b));
            }
        }

        Ok(AlgebraModel {
            diagram: diagram.clone(),
            layout,
            basis,
            index,
            left,
            right,
            idems,
            mult,
            diff,
            diff_pre,
            mult_pre,
            by_left,
        })
    }

    pub fn diagram(&self) -> &ArcDiagram {
        &self.diagram
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn rank(&self) -> usize {
        self.layout.rank()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ABasisElem] {
        &self.basis
    }

    pub fn elem(&self, i: usize) -> &ABasisElem {
        &self.basis[i]
    }

    pub fn index_of(&self, e: &ABasisElem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn left_idem(&self, i: usize) -> PairSet {
        self.left[i]
    }

    pub fn right_idem(&self, i: usize) -> PairSet {
        self.right[i]
    }

    pub fn is_idempotent(&self, i: usize) -> bool {
        self.basis[i].is_idempotent()
    }

    /// Basis index of the idempotent for `set`.
    pub fn idem_index(&self, set: PairSet) -> usize {
        self.idems[set.0 as usize]
    }

    pub fn idempotent(&self, set: PairSet) -> Gf2Vector {
        Gf2Vector::unit(self.idem_index(set))
    }

    pub fn unit(&self) -> Gf2Vector {
        self.idems.iter().copied().collect()
    }

    /// Basis elements with the given left idempotent.
    pub fn with_left(&self, set: PairSet) -> &[usize] {
        &self.by_left[set.0 as usize]
    }

    pub fn mul_basis(&self, x: usize, y: usize) -> Gf2Vector {
        self.mult.get(&(x, y)).cloned().unwrap_or_default()
    }

    pub fn mul(&self, x: &Gf2Vector, y: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::new();
        for a in x.iter() {
            for b in y.iter() {
                if let Some(v) = self.mult.get(&(a, b)) {
                    out += v;
                }
            }
        }
        out
    }

    pub fn diff_basis(&self, x: usize) -> &Gf2Vector {
        &self.diff[x]
    }

    pub fn diff(&self, x: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::new();
        for a in x.iter() {
            out += &self.diff[a];
        }
        out
    }

    /// The `b` with `c` in `d(b)`.
    pub fn diff_preimages(&self, c: usize) -> &[usize] {
        &self.diff_pre[c]
    }

    /// The non-idempotent pairs `(a, b)` with `c` in `a b`.
    pub fn mult_preimages(&self, c: usize) -> &[(usize, usize)] {
        &self.mult_pre[c]
    }

    /// All nonzero products of basis elements, sorted.
    pub fn products(&self) -> BTreeMap<(usize, usize), Gf2Vector> {
        self.mult.iter().map(|(k, v)| (*k, v.clone())).collect()
    }

    /// Left-to-right product; the empty tuple gives the unit.
    pub fn assoc_mult(&self, xs: &[Gf2Vector]) -> Gf2Vector {
        let mut acc = self.unit();
        for x in xs {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// One-mover basis elements, grouped by mover.
    pub fn chords(&self) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.dim())
            .filter(|&i| self.basis[i].movers.len() == 1)
            .collect();
        out.sort_by_key(|&i| (self.basis[i].movers[0], self.basis[i].occupied));
        out
    }

    /// The algebra of the reversed diagram with the bijection turning
    /// strands upside down. It reverses products.
    pub fn rotate180(&self) -> Result<(AlgebraModel, Vec<usize>)> {
        self.transported(&self.diagram.reverse())
    }

    /// The algebra of the flipped-type diagram with the mirror bijection. It
    /// reverses products.
    pub fn reflect(&self) -> Result<(AlgebraModel, Vec<usize>)> {
        self.transported(&self.diagram.flip_type())
    }

    /// Both symmetries map a mover `s -> t` to `t -> s` in the target
    /// diagram, matching points by name.
    fn transported(&self, target: &ArcDiagram) -> Result<(AlgebraModel, Vec<usize>)> {
        let other = AlgebraModel::new(target)?;
        let rename: Vec<usize> = self
            .layout
            .names
            .iter()
            .map(|n| other.layout.index_of(n).expect("same points"))
            .collect();
        let map = self
            .basis
            .iter()
            .map(|e| {
                let mut movers: Vec<(usize, usize)> =
                    e.movers.iter().map(|&(s, t)| (rename[t], rename[s])).collect();
                movers.sort_unstable();
                let image = ABasisElem { movers, occupied: e.occupied };
                other
                    .index_of(&image)
                    .ok_or_else(|| Error::Symmetrize(format!("{image:?} missing after transport")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((other, map))
    }

    pub fn describe(&self, i: usize) -> String {
        let e = &self.basis[i];
        let movers: Vec<String> = e
            .movers
            .iter()
            .map(|&(s, t)| format!("{}->{}", self.layout.names[s], self.layout.names[t]))
            .collect();
        if movers.is_empty() {
            format!("i{}", e.occupied)
        } else {
            format!("{}{}", movers.join(","), if e.occupied.is_empty() { String::new() } else { format!("|{}", e.occupied) })
        }
    }

    pub fn basis_tsv(&self) -> String {
        let mut s = String::new();
        for (i, e) in self.basis.iter().enumerate() {
            let movers: Vec<String> = e
                .movers
                .iter()
                .map(|&(a, b)| format!("{}->{}", self.layout.names[a], self.layout.names[b]))
                .collect();
            s.push_str(&format!(
                "{i}\t{}\t{}\t{}\t{}\n",
                e.occupied,
                if movers.is_empty() { "-".to_string() } else { movers.join(",") },
                self.left[i],
                self.right[i]
            ));
        }
        s
    }

    pub fn mult_tsv(&self) -> String {
        let mut s = String::new();
        for ((i, j), v) in self.products() {
            s.push_str(&format!("{i}\t{j}\t{}\n", join_indices(&v)));
        }
        s
    }

    pub fn diff_tsv(&self) -> String {
        let mut s = String::new();
        for (i, v) in self.diff.iter().enumerate() {
            if !v.is_empty() {
                s.push_str(&format!("{i}\t{}\n", join_indices(v)));
            }
        }
        s
    }
}

/// Checks d^2 = 0, the Leibniz rule, associativity and that every basis
/// element sits in exactly one idempotent block, exhaustively.
pub fn check_dga(am: &AlgebraModel) -> Result<()> {
    let fail = |msg: String| Err(Error::Structure(msg));
    let n = am.dim();
    for x in 0..n {
        if !am.diff(am.diff_basis(x)).is_empty() {
            return fail(format!("d^2 {} != 0", am.describe(x)));
        }
        let blocks = PairSet::all(am.rank())
            .flat_map(|i| PairSet::all(am.rank()).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let e = Gf2Vector::unit(x);
                am.mul(&am.mul(&am.idempotent(i), &e), &am.idempotent(j)) == e
            })
            .collect::<Vec<_>>();
        if blocks != vec![(am.left_idem(x), am.right_idem(x))] {
            return fail(format!("{} lies in blocks {blocks:?}", am.describe(x)));
        }
    }
    for x in 0..n {
        for &y in am.with_left(am.right_idem(x)) {
            let (ex, ey) = (Gf2Vector::unit(x), Gf2Vector::unit(y));
            let xy = am.mul_basis(x, y);
            let lhs = am.diff(&xy);
            let rhs = am.mul(am.diff_basis(x), &ey) + &am.mul(&ex, am.diff_basis(y));
            if lhs != rhs {
                return fail(format!("Leibniz fails on {} * {}", am.describe(x), am.describe(y)));
            }
            if xy.is_empty() {
                continue;
            }
            for &z in am.with_left(am.right_idem(y)) {
                let ez = Gf2Vector::unit(z);
                if am.mul(&xy, &ez) != am.mul(&ex, &am.mul_basis(y, z)) {
                    return fail(format!(
                        "associativity fails on {}, {}, {}",
                        am.describe(x),
                        am.describe(y),
                        am.describe(z)
                    ));
                }
            }
        }
        // Triples whose first product vanishes still need x(yz) = 0.
        for &y in am.with_left(am.right_idem(x)) {
            if !am.mul_basis(x, y).is_empty() {
                continue;
            }
            for &z in am.with_left(am.right_idem(y)) {
                if !am.mul(&Gf2Vector::unit(x), &am.mul_basis(y, z)).is_empty() {
                    return fail(format!("associativity fails on {x}, {y}, {z}"));
                }
            }
        }
    }
    Ok(())
}

/// Checks that `map` is a bijection onto `target` commuting with d,
/// preserving products (or reversing them when `anti`), and sending
/// idempotents to idempotents with the same pair set.
pub fn check_transport(src: &AlgebraModel, target: &AlgebraModel, map: &[usize], anti: bool) -> Result<()> {
    let fail = |msg: String| Err(Error::Structure(msg));
    let mut seen = vec![false; target.dim()];
    if map.len() != src.dim() || target.dim() != src.dim() {
        return fail("dimension mismatch".into());
    }
    for &m in map {
        if std::mem::replace(&mut seen[m], true) {
            return fail("map is not injective".into());
        }
    }
    let image = |v: &Gf2Vector| -> Gf2Vector { v.iter().map(|i| map[i]).collect() };
    for x in 0..src.dim() {
        if src.is_idempotent(x) && map[x] != target.idem_index(src.elem(x).occupied) {
            return fail(format!("idempotent {} moved", src.describe(x)));
        }
        if image(src.diff_basis(x)) != *target.diff_basis(map[x]) {
            return fail(format!("d not preserved at {}", src.describe(x)));
        }
        for y in 0..src.dim() {
            let lhs = image(&src.mul_basis(x, y));
            let rhs = if anti {
                target.mul_basis(map[y], map[x])
            } else {
                target.mul_basis(map[x], map[y])
            };
            if lhs != rhs {
                return fail(format!("product of {} and {} not preserved", src.describe(x), src.describe(y)));
            }
        }
    }
    Ok(())
}

pub(crate) fn join_indices(v: &Gf2Vector) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

fn left_idem(layout: &Layout, e: &ABasisElem) -> PairSet {
    e.movers
        .iter()
        .fold(e.occupied, |acc, &(s, _)| acc.with(layout.pair_of[s]))
}

fn right_idem(layout: &Layout, e: &ABasisElem) -> PairSet {
    e.movers
        .iter()
        .fold(e.occupied, |acc, &(_, t)| acc.with(layout.pair_of[t]))
}

fn enumerate(layout: &Layout) -> Vec<ABasisElem> {
    let n = layout.num_points();
    let k = layout.rank();
    let mut out = Vec::new();
    let mut movers = Vec::new();
    fn rec(
        layout: &Layout,
        p: usize,
        n: usize,
        k: usize,
        src: PairSet,
        tgt: PairSet,
        movers: &mut Vec<(usize, usize)>,
        out: &mut Vec<ABasisElem>,
    ) {
        if p == n {
            let free = PairSet(src.0 | tgt.0).complement(k);
            for o in PairSet::all(k) {
                if o.0 & !free.0 == 0 {
                    out.push(ABasisElem { movers: movers.clone(), occupied: o });
                }
            }
            return;
        }
        rec(layout, p + 1, n, k, src, tgt, movers, out);
        let ps = layout.pair_of[p];
        if src.contains(ps) {
            return;
        }
        for &t in &layout.arcs[layout.arc_of[p]] {
            let pt = layout.pair_of[t];
            if layout.height(t) <= layout.height(p)
                || tgt.contains(pt)
                || movers.iter().any(|&(_, u)| u == t)
            {
                continue;
            }
            movers.push((p, t));
            rec(layout, p + 1, n, k, src.with(ps), tgt.with(pt), movers, out);
            movers.pop();
        }
    }
    rec(layout, 0, n, k, PairSet::EMPTY, PairSet::EMPTY, &mut movers, &mut out);
    out
}

/// All plain diagrams in the symmetrized sum.
fn expand(layout: &Layout, e: &ABasisElem) -> Vec<Strands> {
    let pairs: Vec<usize> = e.occupied.iter().collect();
    let mut out = Vec::with_capacity(1 << pairs.len());
    for choice in 0..1usize << pairs.len() {
        let mut s = e.movers.clone();
        for (j, &i) in pairs.iter().enumerate() {
            let h = layout.pairs[i][choice >> j & 1];
            s.push((h, h));
        }
        s.sort_unstable();
        out.push(s);
    }
    out
}

fn crosses(layout: &Layout, a: (usize, usize), b: (usize, usize)) -> bool {
    layout.arc_of[a.0] == layout.arc_of[b.0]
        && (layout.height(a.0) - layout.height(b.0)) * (layout.height(a.1) - layout.height(b.1)) < 0
}

fn inversions(layout: &Layout, s: &Strands) -> usize {
    let mut n = 0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if crosses(layout, s[i], s[j]) {
                n += 1;
            }
        }
    }
    n
}

/// Concatenation, or `None` if endpoints mismatch or a pair of strands
/// would cross twice.
fn concat(layout: &Layout, a: &Strands, b: &Strands) -> Option<Strands> {
    if a.len() != b.len() {
        return None;
    }
    let mut out = Vec::with_capacity(a.len());
    for &(s, m) in a {
        let &(_, t) = b.iter().find(|&&(u, _)| u == m)?;
        out.push((s, t));
    }
    out.sort_unstable();
    (inversions(layout, &out) == inversions(layout, a) + inversions(layout, b)).then_some(out)
}

fn resolve_crossings(layout: &Layout, s: &Strands) -> Vec<Strands> {
    let inv = inversions(layout, s);
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in 0..s.len() {
            let (a, b) = (s[i], s[j]);
            if layout.arc_of[a.0] != layout.arc_of[b.0]
                || layout.height(a.0) >= layout.height(b.0)
                || layout.height(a.1) <= layout.height(b.1)
            {
                continue;
            }
            let mut r = s.clone();
            r[i] = (a.0, b.1);
            r[j] = (b.0, a.1);
            r.sort_unstable();
            if inversions(layout, &r) + 1 == inv {
                out.push(r);
            }
        }
    }
    out
}

fn toggle(acc: &mut HashMap<Strands, bool>, s: Strands) {
    let e = acc.entry(s).or_insert(false);
    *e = !*e;
}

/// Groups plain diagrams back into symmetrized elements, insisting that
/// each element appears with all of its summands.
fn regroup(layout: &Layout, acc: HashMap<Strands, bool>) -> Result<Vec<ABasisElem>> {
    let mut counts: BTreeMap<ABasisElem, usize> = BTreeMap::new();
    for (s, odd) in acc {
        if !odd {
            continue;
        }
        let mut movers = Vec::new();
        let mut occupied = PairSet::EMPTY;
        for &(a, b) in &s {
            if a == b {
                let p = layout.pair_of[a];
                if occupied.contains(p) {
                    return Err(Error::Symmetrize(format!("pair {} doubly occupied", p + 1)));
                }
                occupied = occupied.with(p);
            } else {
                movers.push((a, b));
            }
        }
        *counts.entry(ABasisElem { movers, occupied }).or_default() += 1;
    }
    let mut out = Vec::new();
    for (e, c) in counts {
        if c != 1 << e.occupied.len() {
            return Err(Error::Symmetrize(format!(
                "{e:?} appears with {c} of {} summands",
                1 << e.occupied.len()
            )));
        }
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::*;

    fn find(am: &AlgebraModel, movers: &[(&str, &str)], occupied: PairSet) -> usize {
        let l = am.layout();
        let mut m: Vec<(usize, usize)> = movers
            .iter()
            .map(|(s, t)| (l.index_of(s).unwrap(), l.index_of(t).unwrap()))
            .collect();
        m.sort_unstable();
        am.index_of(&ABasisElem { movers: m, occupied }).unwrap()
    }

    #[test]
    fn small_dimensions() {
        assert_eq!(AlgebraModel::new(&z0()).unwrap().dim(), 1);
        let a1 = AlgebraModel::new(&z1()).unwrap();
        assert_eq!(a1.dim(), 3);
        assert_eq!(a1.describe(0), "i{}");
        assert_eq!(a1.describe(1), "a1->a2");
        assert_eq!(a1.describe(2), "i{1}");
    }

    #[test]
    fn z1_products() {
        let a = AlgebraModel::new(&z1()).unwrap();
        let s = find(&a, &[("a1", "a2")], PairSet::EMPTY);
        let i1 = a.idem_index(PairSet(1));
        let i0 = a.idem_index(PairSet::EMPTY);
        assert_eq!(a.mul_basis(i1, s), Gf2Vector::unit(s));
        assert_eq!(a.mul_basis(s, i1), Gf2Vector::unit(s));
        assert!(a.mul_basis(s, s).is_empty());
        assert!(a.mul_basis(i0, i1).is_empty());
        assert!(a.diff_basis(s).is_empty());
        let args = [Gf2Vector::unit(i1), Gf2Vector::unit(s), Gf2Vector::unit(i1)];
        assert_eq!(a.assoc_mult(&args), Gf2Vector::unit(s));
        assert_eq!(a.assoc_mult(&[]), a.unit());
        assert_eq!(a.chords(), vec![s]);
    }

    #[test]
    fn z2_crossing_resolves() {
        let a = AlgebraModel::new(&z2()).unwrap();
        let x = find(&a, &[("a1", "a4"), ("a2", "a3")], PairSet::EMPTY);
        let y = find(&a, &[("a1", "a3"), ("a2", "a4")], PairSet::EMPTY);
        assert_eq!(a.diff_basis(x), &Gf2Vector::unit(y));
        assert!(a.diff_basis(y).is_empty());
    }

    #[test]
    fn z2_chords() {
        let a = AlgebraModel::new(&z2()).unwrap();
        let movers: std::collections::BTreeSet<(usize, usize)> =
            a.chords().iter().map(|&c| a.elem(c).movers[0]).collect();
        assert_eq!(movers.len(), 6);
    }

    #[test]
    fn idempotents_are_units() {
        let a = AlgebraModel::new(&z2()).unwrap();
        for x in 0..a.dim() {
            let e = Gf2Vector::unit(x);
            assert_eq!(a.mul(&a.unit(), &e), e);
            assert_eq!(a.mul(&e, &a.unit()), e);
            let l = a.idempotent(a.left_idem(x));
            let r = a.idempotent(a.right_idem(x));
            assert_eq!(a.mul(&a.mul(&l, &e), &r), e);
        }
    }

    #[test]
    fn rotate_sends_mover_to_reversed_mover() {
        let a = AlgebraModel::new(&z1()).unwrap();
        let (b, r) = a.rotate180().unwrap();
        let s = find(&a, &[("a1", "a2")], PairSet::EMPTY);
        assert_eq!(b.describe(r[s]), "a2->a1");
        for set in PairSet::all(1) {
            assert_eq!(r[a.idem_index(set)], b.idem_index(set));
        }
    }

    #[test]
    fn canonical_algebras_are_dgas() {
        for z in [z0(), z1(), z2(), z_two_arcs()] {
            let a = AlgebraModel::new(&z).unwrap();
            check_dga(&a).unwrap();
            check_dga(&AlgebraModel::new(&z.flip_type()).unwrap()).unwrap();
        }
    }

    #[test]
    fn symmetries_of_z2() {
        let a = AlgebraModel::new(&z2()).unwrap();
        let (rot, r) = a.rotate180().unwrap();
        check_transport(&a, &rot, &r, true).unwrap();
        let (refl, f) = a.reflect().unwrap();
        check_transport(&a, &refl, &f, true).unwrap();
        let (both, g) = refl.rotate180().unwrap();
        let composite: Vec<usize> = f.iter().map(|&i| g[i]).collect();
        check_transport(&a, &both, &composite, false).unwrap();
        let (back, h) = refl.reflect().unwrap();
        assert!(back == a);
        assert!((0..a.dim()).all(|i| h[f[i]] == i));
    }

    #[test]
    fn broken_product_is_caught() {
        let a = AlgebraModel::new(&z2()).unwrap();
        let (rot, r) = a.rotate180().unwrap();
        assert!(check_transport(&a, &rot, &r, false).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(40))]
        #[test]
        fn random_diagrams_are_dgas(
            z in crate::arc_diagram::tests::arb_diagram(3)
        ) {
            let a = AlgebraModel::new(&z).unwrap();
            proptest::prop_assert!(check_dga(&a).is_ok());
            let (rot, r) = a.rotate180().unwrap();
            proptest::prop_assert!(check_transport(&a, &rot, &r, true).is_ok());
            let (refl, f) = a.reflect().unwrap();
            proptest::prop_assert!(check_transport(&a, &refl, &f, true).is_ok());
        }
    }

    #[test]
    fn tsv_dump_lines() {
        let a = AlgebraModel::new(&z1()).unwrap();
        assert_eq!(a.basis_tsv(), "0\t{}\t-\t{}\t{}\n1\t{}\ta1->a2\t{1}\t{1}\n2\t{1}\t-\t{1}\t{1}\n");
        assert_eq!(a.diff_tsv(), "");
    }
}
