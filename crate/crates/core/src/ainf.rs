//! Typed A-infinity modules and bimodules over strands algebras.
//!
//! A module has a left and a right side, each absent, type A (algebra
//! inputs) or type D (one algebra output). Every structure map and every
//! morphism is a finite table from input keys to sets of output terms, so
//! the structure equation, morphism differential and composition all come
//! from one composition routine.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::arc_diagram::PairSet;
use crate::error::{Error, Result};
use crate::gf2::{self, ChainComplexGf2, Gf2Matrix, Gf2Vector};
use crate::strands::AlgebraModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SideKind {
    None,
    A,
    D,
}

#[derive(Clone, Debug)]
pub enum Side {
    None,
    A(Arc<AlgebraModel>),
    D(Arc<AlgebraModel>),
}

impl Side {
    pub fn kind(&self) -> SideKind {
        match self {
            Side::None => SideKind::None,
            Side::A(_) => SideKind::A,
            Side::D(_) => SideKind::D,
        }
    }

    pub fn algebra(&self) -> Option<&Arc<AlgebraModel>> {
        match self {
            Side::None => None,
            Side::A(a) | Side::D(a) => Some(a),
        }
    }

    pub fn is_a(&self) -> bool {
        matches!(self, Side::A(_))
    }

    pub fn is_d(&self) -> bool {
        matches!(self, Side::D(_))
    }

    fn letter(&self) -> &'static str {
        match self {
            Side::None => "",
            Side::A(_) => "A",
            Side::D(_) => "D",
        }
    }

    /// Same kind over the same algebra.
    pub fn same_as(&self, other: &Side) -> bool {
        self.kind() == other.kind() && same_algebra(self.algebra(), other.algebra())
    }
}

fn same_algebra(a: Option<&Arc<AlgebraModel>>, b: Option<&Arc<AlgebraModel>>) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => Arc::ptr_eq(x, y) || **x == **y,
        _ => false,
    }
}

/// A generator. `parts` records the base-module generators it was built
/// from, so that carriers of different bracketings can be identified.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gen {
    pub label: String,
    pub left: PairSet,
    pub right: PairSet,
    pub parts: Vec<(u64, usize)>,
}

/// Table input: algebra inputs on the left (written order, outermost
/// first), a generator, and algebra inputs on the right (written order).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub left: Vec<usize>,
    pub gen: usize,
    pub right: Vec<usize>,
}

impl Key {
    pub fn bare(gen: usize) -> Key {
        Key { left: Vec::new(), gen, right: Vec::new() }
    }

    pub fn input_len(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Table output: a generator with algebra outputs on the type-D sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub left: Option<usize>,
    pub gen: usize,
    pub right: Option<usize>,
}

#[derive(Clone, Default, PartialEq, Eq)]
pub struct Table {
    entries: BTreeMap<Key, BTreeSet<Term>>,
}

impl fmt::Debug for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.entries.iter()).finish()
    }
}

impl Table {
    pub fn new() -> Table {
        Table::default()
    }

    pub fn toggle(&mut self, key: Key, term: Term) {
        self.toggle_all(&key, [term]);
    }

    fn toggle_all(&mut self, key: &Key, terms: impl IntoIterator<Item = Term>) {
        let set = self.entries.entry(key.clone()).or_default();
        for t in terms {
            if !set.remove(&t) {
                set.insert(t);
            }
        }
        if set.is_empty() {
            self.entries.remove(key);
        }
    }

    pub fn add(&mut self, other: &Table) {
        for (k, v) in &other.entries {
            self.toggle_all(k, v.iter().copied());
        }
    }

    pub fn sum(mut self, other: &Table) -> Table {
        self.add(other);
        self
    }

    pub fn get(&self, key: &Key) -> Option<&BTreeSet<Term>> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Key, &BTreeSet<Term>)> {
        self.entries.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of (key, term) pairs.
    pub fn len(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }

    pub fn max_left_len(&self) -> usize {
        self.entries.keys().map(|k| k.left.len()).max().unwrap_or(0)
    }

    pub fn max_right_len(&self) -> usize {
        self.entries.keys().map(|k| k.right.len()).max().unwrap_or(0)
    }

    pub fn max_input_len(&self) -> usize {
        self.entries.keys().map(|k| k.input_len()).max().unwrap_or(0)
    }

    fn by_gen(&self) -> BTreeMap<usize, Vec<(&Key, &BTreeSet<Term>)>> {
        let mut out: BTreeMap<usize, Vec<_>> = BTreeMap::new();
        for (k, v) in &self.entries {
            out.entry(k.gen).or_default().push((k, v));
        }
        out
    }

    /// Entries indexed by (generator, right inputs).
    pub(crate) fn by_gen_right(&self) -> BTreeMap<(usize, &[usize]), Vec<(&[usize], &BTreeSet<Term>)>> {
        let mut out: BTreeMap<(usize, &[usize]), Vec<_>> = BTreeMap::new();
        for (k, v) in &self.entries {
            out.entry((k.gen, k.right.as_slice())).or_default().push((k.left.as_slice(), v));
        }
        out
    }

    /// Entries indexed by (generator, left inputs).
    pub(crate) fn by_gen_left(&self) -> BTreeMap<(usize, &[usize]), Vec<(&[usize], &BTreeSet<Term>)>> {
        let mut out: BTreeMap<(usize, &[usize]), Vec<_>> = BTreeMap::new();
        for (k, v) in &self.entries {
            out.entry((k.gen, k.left.as_slice())).or_default().push((k.right.as_slice(), v));
        }
        out
    }

    pub fn with_entry(mut self, key: Key, term: Term) -> Table {
        self.toggle(key, term);
        self
    }
}

static NEXT_UID: AtomicU64 = AtomicU64::new(1);

pub(crate) fn fresh_uid() -> u64 {
    NEXT_UID.fetch_add(1, Ordering::Relaxed)
}

/// A finite module or bimodule structure.
#[derive(Clone, Debug)]
pub struct Module {
    pub name: String,
    pub uid: u64,
    pub left: Side,
    pub right: Side,
    pub gens: Vec<Gen>,
    pub table: Table,
}

impl Module {
    /// Builds a module, checking idempotent compatibility and the structure
    /// equation.
    pub fn new(name: impl Into<String>, left: Side, right: Side, gens: Vec<Gen>, table: Table) -> Result<Module> {
        let m = Module::unchecked(name, left, right, gens, table);
        m.check_idempotents()?;
        if let Some(bad) = check_structure(&m) {
            return Err(Error::Structure(format!("{}: structure equation fails at {}", m.name, m.show_key(&bad))));
        }
        Ok(m)
    }

    /// Builds a module without any checks. Base generators get fresh parts.
    pub fn unchecked(name: impl Into<String>, left: Side, right: Side, mut gens: Vec<Gen>, table: Table) -> Module {
        let uid = fresh_uid();
        for (i, g) in gens.iter_mut().enumerate() {
            if g.parts.is_empty() {
                g.parts = vec![(uid, i)];
            }
        }
        Module { name: name.into(), uid, left, right, gens, table }
    }

    /// Generators with no recorded parts get `(uid, index)`.
    pub fn simple_gen(label: impl Into<String>, left: PairSet, right: PairSet) -> Gen {
        Gen { label: label.into(), left, right, parts: Vec::new() }
    }

    pub fn kind(&self) -> String {
        let s = format!("{}{}", self.left.letter(), self.right.letter());
        if s.is_empty() {
            "complex".to_string()
        } else {
            s
        }
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    /// True when every structure map has at most one algebra input.
    pub fn is_dg_type(&self) -> bool {
        self.table.iter().all(|(k, _)| k.input_len() <= 1)
    }

    fn check_idempotents(&self) -> Result<()> {
        for (k, terms) in self.table.iter() {
            for t in terms {
                if let Err(e) = key_term_compatible(self, self, k, t) {
                    return Err(Error::Malformed(format!("{}: {} -> {}: {e}", self.name, self.show_key(k), self.show_term(t))));
                }
            }
        }
        Ok(())
    }

    pub fn show_key(&self, k: &Key) -> String {
        show_key(&self.left, &self.right, &self.gens, k)
    }

    pub fn show_term(&self, t: &Term) -> String {
        show_term(&self.left, &self.right, &self.gens, t)
    }

    /// The underlying chain complex, for modules without sides.
    pub fn complex(&self) -> Result<ChainComplexGf2> {
        if self.left.kind() != SideKind::None || self.right.kind() != SideKind::None {
            return Err(Error::Incompatible(format!("{} is a {} module, not a complex", self.name, self.kind())));
        }
        let mut d = Gf2Matrix::zero(self.dim(), self.dim());
        for (k, terms) in self.table.iter() {
            for t in terms {
                d.toggle(t.gen, k.gen);
            }
        }
        ChainComplexGf2::new(self.gens.iter().map(|g| g.label.clone()).collect(), d)
    }

    /// Lines `L:a,b|x|R:c<TAB>outputs`, with algebra basis indices.
    pub fn to_tsv(&self) -> String {
        let mut s = format!("# kind\t{}\n# name\t{}\n", self.kind(), self.name);
        for (i, g) in self.gens.iter().enumerate() {
            s.push_str(&format!("# gen\t{i}\t{}\t{}\t{}\n", g.label, g.left, g.right));
        }
        let idx = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
        for (k, terms) in self.table.iter() {
            let outs: Vec<String> = terms
                .iter()
                .map(|t| {
                    let l = t.left.map(|a| format!("{a}*")).unwrap_or_default();
                    let r = t.right.map(|a| format!("*{a}")).unwrap_or_default();
                    format!("{l}{}{r}", t.gen)
                })
                .collect();
            s.push_str(&format!("L:{}|{}|R:{}\t{}\n", idx(&k.left), k.gen, idx(&k.right), outs.join(" ")));
        }
        s
    }
}

fn show_key(left: &Side, right: &Side, gens: &[Gen], k: &Key) -> String {
    let alg = |s: &Side, v: &[usize]| -> String {
        match s.algebra() {
            Some(a) => v.iter().map(|&i| a.describe(i)).collect::<Vec<_>>().join(" "),
            None => String::new(),
        }
    };
    format!("({} | {} | {})", alg(left, &k.left), gens[k.gen].label, alg(right, &k.right))
}

fn show_term(left: &Side, right: &Side, gens: &[Gen], t: &Term) -> String {
    let out = |s: &Side, a: Option<usize>| -> String {
        match (s.algebra(), a) {
            (Some(al), Some(i)) => al.describe(i),
            _ => String::new(),
        }
    };
    format!("{} {} {}", out(left, t.left), gens[t.gen].label, out(right, t.right))
}

/// Idempotent compatibility of a table entry whose key lives on `src` and
/// whose term lives on `dst`.
fn key_term_compatible(src: &Module, dst: &Module, k: &Key, t: &Term) -> std::result::Result<(), String> {
    let x = &src.gens[k.gen];
    let y = &dst.gens[t.gen];
    let left_in = chain_in(&src.left, &k.left, x.left, true)?;
    let right_in = chain_in(&src.right, &k.right, x.right, false)?;
    match (&src.left, t.left) {
        (Side::D(a), Some(o)) => {
            if a.left_idem(o) != x.left || a.right_idem(o) != y.left {
                return Err("left output idempotents".into());
            }
        }
        (Side::D(_), None) => return Err("missing left output".into()),
        (_, Some(_)) => return Err("unexpected left output".into()),
        (_, None) => {
            if y.left != left_in {
                return Err("left idempotent".into());
            }
        }
    }
    match (&src.right, t.right) {
        (Side::D(a), Some(o)) => {
            if a.right_idem(o) != x.right || a.left_idem(o) != y.right {
                return Err("right output idempotents".into());
            }
        }
        (Side::D(_), None) => return Err("missing right output".into()),
        (_, Some(_)) => return Err("unexpected right output".into()),
        (_, None) => {
            if y.right != right_in {
                return Err("right idempotent".into());
            }
        }
    }
    Ok(())
}

/// Checks that inputs chain up to the generator and returns the outer
/// idempotent.
fn chain_in(side: &Side, inputs: &[usize], at: PairSet, left: bool) -> std::result::Result<PairSet, String> {
    if inputs.is_empty() {
        return Ok(at);
    }
    let a = match side {
        Side::A(a) => a,
        _ => return Err("inputs on a side without type A".into()),
    };
    if inputs.iter().any(|&i| a.is_idempotent(i)) {
        return Err("idempotent input".into());
    }
    if left {
        for w in inputs.windows(2) {
            if a.right_idem(w[0]) != a.left_idem(w[1]) {
                return Err("left inputs do not chain".into());
            }
        }
        if a.right_idem(*inputs.last().unwrap()) != at {
            return Err("left inputs do not meet the generator".into());
        }
        Ok(a.left_idem(inputs[0]))
    } else {
        for w in inputs.windows(2) {
            if a.right_idem(w[0]) != a.left_idem(w[1]) {
                return Err("right inputs do not chain".into());
            }
        }
        if a.left_idem(inputs[0]) != at {
            return Err("right inputs do not meet the generator".into());
        }
        Ok(a.right_idem(*inputs.last().unwrap()))
    }
}

fn mul_opt(side: &Side, first: Option<usize>, second: Option<usize>) -> Vec<Option<usize>> {
    match (side, first, second) {
        (Side::D(a), Some(x), Some(y)) => a.mul_basis(x, y).iter().map(Some).collect(),
        _ => vec![None],
    }
}

/// Apply `p` first and `q` second. Left type-D outputs multiply in
/// application order, right ones in reverse order.
pub(crate) fn compose_tables(left: &Side, right: &Side, p: &Table, q: &Table) -> Table {
    let qi = q.by_gen();
    let mut out = Table::new();
    for (pk, pterms) in p.iter() {
        for pt in pterms {
            let Some(qs) = qi.get(&pt.gen) else { continue };
            for (qk, qterms) in qs {
                let key = Key {
                    left: [qk.left.as_slice(), pk.left.as_slice()].concat(),
                    gen: pk.gen,
                    right: [pk.right.as_slice(), qk.right.as_slice()].concat(),
                };
                for qt in qterms.iter() {
                    for lo in mul_opt(left, pt.left, qt.left) {
                        for ro in mul_opt(right, qt.right, pt.right) {
                            out.toggle(key.clone(), Term { left: lo, gen: qt.gen, right: ro });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Differential applied to type-D outputs.
pub(crate) fn d_out(left: &Side, right: &Side, t: &Table) -> Table {
    let mut out = Table::new();
    for (k, terms) in t.iter() {
        for term in terms {
            if let (Side::D(a), Some(o)) = (left, term.left) {
                for c in a.diff_basis(o).iter() {
                    out.toggle(k.clone(), Term { left: Some(c), ..*term });
                }
            }
            if let (Side::D(a), Some(o)) = (right, term.right) {
                for c in a.diff_basis(o).iter() {
                    out.toggle(k.clone(), Term { right: Some(c), ..*term });
                }
            }
        }
    }
    out
}

/// Differential and products applied inside type-A inputs.
pub(crate) fn d_in(left: &Side, right: &Side, t: &Table) -> Table {
    let mut out = Table::new();
    let expand = |a: &AlgebraModel, seq: &[usize], mut emit: Box<dyn FnMut(Vec<usize>) + '_>| {
        for i in 0..seq.len() {
            for &b in a.diff_preimages(seq[i]) {
                let mut s = seq.to_vec();
                s[i] = b;
                emit(s);
            }
            for &(x, y) in a.mult_preimages(seq[i]) {
                let mut s = seq[..i].to_vec();
                s.push(x);
                s.push(y);
                s.extend_from_slice(&seq[i + 1..]);
                emit(s);
            }
        }
    };
    for (k, terms) in t.iter() {
        if let Side::A(a) = left {
            expand(a, &k.left, Box::new(|s| {
                out.toggle_all(&Key { left: s, ..k.clone() }, terms.iter().copied());
            }));
        }
        if let Side::A(a) = right {
            expand(a, &k.right, Box::new(|s| {
                out.toggle_all(&Key { right: s, ..k.clone() }, terms.iter().copied());
            }));
        }
    }
    out
}

/// Returns a key at which the structure equation fails, if any.
pub fn check_structure(m: &Module) -> Option<Key> {
    let eq = structure_equation(m);
    let first = eq.iter().next().map(|(k, _)| k.clone());
    first
}

/// The full left-hand side of the structure equation as a table.
pub fn structure_equation(m: &Module) -> Table {
    compose_tables(&m.left, &m.right, &m.table, &m.table)
        .sum(&d_out(&m.left, &m.right, &m.table))
        .sum(&d_in(&m.left, &m.right, &m.table))
}

/// Iterated type-D map of a module with left type D and right type A:
/// all ways of feeding `args` through successive structure maps, with at
/// most `depth` steps.
pub fn delta_bar(m: &Module, x: usize, args: &[usize], depth: usize) -> Result<Vec<(Vec<usize>, usize)>> {
    if !m.left.is_d() {
        return Err(Error::Incompatible(format!("{} has no left type-D side", m.name)));
    }
    let idx = m.table.by_gen_left();
    let mut done: BTreeMap<(Vec<usize>, usize), bool> = BTreeMap::new();
    let mut frontier: BTreeMap<(Vec<usize>, usize, usize), bool> = BTreeMap::new();
    frontier.insert((Vec::new(), x, 0), true);
    for step in 0..=depth {
        let mut next: BTreeMap<(Vec<usize>, usize, usize), bool> = BTreeMap::new();
        for ((outs, g, used), odd) in frontier {
            if !odd {
                continue;
            }
            if used == args.len() {
                let e = done.entry((outs.clone(), g)).or_insert(false);
                *e = !*e;
            }
            let Some(entries) = idx.get(&(g, &[][..])) else { continue };
            for (right, terms) in entries {
                if args[used..].starts_with(right) {
                    if step == depth {
                        return Err(Error::Unbounded(format!("iteration continues past depth {depth}")));
                    }
                    for t in terms.iter() {
                        let mut o = outs.clone();
                        o.push(t.left.expect("type-D output"));
                        let e = next.entry((o, t.gen, used + right.len())).or_insert(false);
                        *e = !*e;
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(done.into_iter().filter(|(_, odd)| *odd).map(|(k, _)| k).collect())
}

/// The dual module: generators become dual generators, sides swap and every
/// entry is read backwards. Dual generators keep the parts of the originals.
pub fn dualize(m: &Module) -> Module {
    let gens = m
        .gens
        .iter()
        .map(|g| Gen {
            label: dual_label(&g.label),
            left: g.right,
            right: g.left,
            parts: g.parts.clone(),
        })
        .collect();
    let mut table = Table::new();
    for (k, terms) in m.table.iter() {
        for t in terms {
            let mut l = k.right.clone();
            l.reverse();
            let mut r = k.left.clone();
            r.reverse();
            table.toggle(Key { left: l, gen: t.gen, right: r }, Term { left: t.right, gen: k.gen, right: t.left });
        }
    }
    Module::unchecked(format!("dual({})", m.name), m.right.clone(), m.left.clone(), gens, table)
}

fn dual_label(s: &str) -> String {
    match s.strip_suffix('^') {
        Some(base) => base.to_string(),
        None => format!("{s}^"),
    }
}

/// The mirror module over the mirrored algebras. `mirrors` supplies, for
/// each algebra, its mirror and the basis bijection.
pub fn oppositize(m: &Module, mirror: &dyn Fn(&Arc<AlgebraModel>) -> (Arc<AlgebraModel>, Arc<Vec<usize>>)) -> Module {
    let flip = |s: &Side| -> (Side, Option<Arc<Vec<usize>>>) {
        match s {
            Side::None => (Side::None, None),
            Side::A(a) => {
                let (b, f) = mirror(a);
                (Side::A(b), Some(f))
            }
            Side::D(a) => {
                let (b, f) = mirror(a);
                (Side::D(b), Some(f))
            }
        }
    };
    let (new_right, fl) = flip(&m.left);
    let (new_left, fr) = flip(&m.right);
    let map = |f: &Option<Arc<Vec<usize>>>, i: usize| f.as_ref().map_or(i, |f| f[i]);
    let gens = m
        .gens
        .iter()
        .map(|g| Gen { label: g.label.clone(), left: g.right, right: g.left, parts: g.parts.clone() })
        .collect();
    let mut table = Table::new();
    for (k, terms) in m.table.iter() {
        let left: Vec<usize> = k.right.iter().rev().map(|&i| map(&fr, i)).collect();
        let right: Vec<usize> = k.left.iter().rev().map(|&i| map(&fl, i)).collect();
        for t in terms {
            table.toggle(
                Key { left: left.clone(), gen: k.gen, right: right.clone() },
                Term { left: t.right.map(|i| map(&fr, i)), gen: t.gen, right: t.left.map(|i| map(&fl, i)) },
            );
        }
    }
    Module::unchecked(format!("op({})", m.name), new_left, new_right, gens, table)
}

/// A morphism between modules with matching sides.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub src: Arc<Module>,
    pub dst: Arc<Module>,
    pub table: Table,
}

impl Morphism {
    pub fn new(src: Arc<Module>, dst: Arc<Module>, table: Table) -> Result<Morphism> {
        if !src.left.same_as(&dst.left) || !src.right.same_as(&dst.right) {
            return Err(Error::Incompatible(format!("{} and {} have different sides", src.name, dst.name)));
        }
        for (k, terms) in table.iter() {
            for t in terms {
                if let Err(e) = key_term_compatible(&src, &dst, k, t) {
                    return Err(Error::Malformed(format!("morphism entry {}: {e}", src.show_key(k))));
                }
            }
        }
        Ok(Morphism { src, dst, table })
    }

    pub fn zero(src: Arc<Module>, dst: Arc<Module>) -> Morphism {
        Morphism { src, dst, table: Table::new() }
    }

    pub fn identity(m: Arc<Module>) -> Morphism {
        let mut table = Table::new();
        for (i, g) in m.gens.iter().enumerate() {
            let lo = m.left.algebra().filter(|_| m.left.is_d()).map(|a| a.idem_index(g.left));
            let ro = m.right.algebra().filter(|_| m.right.is_d()).map(|a| a.idem_index(g.right));
            table.toggle(Key::bare(i), Term { left: lo, gen: i, right: ro });
        }
        Morphism { src: m.clone(), dst: m, table }
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn plus(&self, other: &Morphism) -> Morphism {
        Morphism { src: self.src.clone(), dst: self.dst.clone(), table: self.table.clone().sum(&other.table) }
    }

    /// The part with no algebra inputs and idempotent outputs, as a matrix.
    pub fn scalar_matrix(&self) -> Gf2Matrix {
        let mut f = Gf2Matrix::zero(self.dst.dim(), self.src.dim());
        for (k, terms) in self.table.iter() {
            if k.input_len() > 0 {
                continue;
            }
            for t in terms {
                if output_is_unit(&self.src, t) {
                    f.toggle(t.gen, k.gen);
                }
            }
        }
        f
    }
}

fn output_is_unit(m: &Module, t: &Term) -> bool {
    let ok = |s: &Side, o: Option<usize>| match (s, o) {
        (Side::D(a), Some(i)) => a.is_idempotent(i),
        _ => true,
    };
    ok(&m.left, t.left) && ok(&m.right, t.right)
}

/// The differential of a morphism.
pub fn morphism_diff(f: &Morphism) -> Morphism {
    let (l, r) = (&f.src.left, &f.src.right);
    let table = compose_tables(l, r, &f.table, &f.dst.table)
        .sum(&compose_tables(l, r, &f.src.table, &f.table))
        .sum(&d_out(l, r, &f.table))
        .sum(&d_in(l, r, &f.table));
    Morphism { src: f.src.clone(), dst: f.dst.clone(), table }
}

/// `g` after `f`.
pub fn morphism_compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    if !same_carrier(&f.dst, &g.src) {
        return Err(Error::Incompatible(format!("cannot compose: {} is not {}", f.dst.name, g.src.name)));
    }
    Ok(Morphism {
        src: f.src.clone(),
        dst: g.dst.clone(),
        table: compose_tables(&f.src.left, &f.src.right, &f.table, &g.table),
    })
}

fn same_carrier(a: &Module, b: &Module) -> bool {
    a.uid == b.uid
        || (a.left.same_as(&b.left)
            && a.right.same_as(&b.right)
            && a.dim() == b.dim()
            && a.gens.iter().zip(&b.gens).all(|(x, y)| x.left == y.left && x.right == y.right))
}

pub fn is_homomorphism(f: &Morphism) -> bool {
    morphism_diff(f).is_zero()
}

/// Scalar part of a structure: no inputs, idempotent outputs.
fn scalar_complex(m: &Module) -> Result<ChainComplexGf2> {
    let mut d = Gf2Matrix::zero(m.dim(), m.dim());
    for (k, terms) in m.table.iter() {
        if k.input_len() > 0 {
            continue;
        }
        for t in terms {
            if output_is_unit(m, t) {
                d.toggle(t.gen, k.gen);
            }
        }
    }
    ChainComplexGf2::new(m.gens.iter().map(|g| g.label.clone()).collect(), d)
}

/// Compares the maps induced on homology by the scalar parts.
pub fn homology_level_equal(f: &Morphism, g: &Morphism) -> Result<bool> {
    let src = scalar_complex(&f.src)?;
    let dst = scalar_complex(&f.dst)?;
    let hf = gf2::induced_map_on_homology(&f.scalar_matrix(), &src, &dst)?;
    let hg = gf2::induced_map_on_homology(&g.scalar_matrix(), &src, &dst)?;
    Ok(hf == hg)
}

/// All sequences of non-idempotent basis elements of length `1..=n` that
/// chain together, ending (for left sides) or starting (for right sides)
/// at the idempotent `at`.
fn input_sequences(a: &AlgebraModel, at: PairSet, n: usize, left: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for seq in &frontier {
            for x in 0..a.dim() {
                if a.is_idempotent(x) {
                    continue;
                }
                let fits = if left {
                    a.right_idem(x) == seq.first().map_or(at, |&f| a.left_idem(f))
                } else {
                    a.left_idem(x) == seq.last().map_or(at, |&l| a.right_idem(l))
                };
                if fits {
                    let mut s = seq.clone();
                    if left {
                        s.insert(0, x);
                    } else {
                        s.push(x);
                    }
                    next.push(s);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Every single-entry morphism with at most `max_len` algebra inputs.
pub fn morphism_space(src: &Module, dst: &Module, max_len: usize) -> Vec<(Key, Term)> {
    let mut out = Vec::new();
    for (g, x) in src.gens.iter().enumerate() {
        let mut lefts = vec![Vec::new()];
        if let Side::A(a) = &src.left {
            lefts.extend(input_sequences(a, x.left, max_len, true));
        }
        let mut rights = vec![Vec::new()];
        if let Side::A(a) = &src.right {
            rights.extend(input_sequences(a, x.right, max_len, false));
        }
        for l in &lefts {
            for r in &rights {
                if l.len() + r.len() > max_len {
                    continue;
                }
                let key = Key { left: l.clone(), gen: g, right: r.clone() };
                for y in 0..dst.dim() {
                    let louts: Vec<Option<usize>> = match &src.left {
                        Side::D(a) => (0..a.dim()).map(Some).collect(),
                        _ => vec![None],
                    };
                    let routs: Vec<Option<usize>> = match &src.right {
                        Side::D(a) => (0..a.dim()).map(Some).collect(),
                        _ => vec![None],
                    };
                    for &lo in &louts {
                        for &ro in &routs {
                            let t = Term { left: lo, gen: y, right: ro };
                            if key_term_compatible(src, dst, &key, &t).is_ok() {
                                out.push((key.clone(), t));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Looks for `h` with at most `max_len` inputs and `dh = f + g`. `None`
/// means the search was inconclusive, not that no homotopy exists.
pub fn bounded_homotopy_search(f: &Morphism, g: &Morphism, max_len: usize) -> Option<Morphism> {
    let target = f.table.clone().sum(&g.table);
    let space = morphism_space(&f.src, &f.dst, max_len);
    let mut rows: BTreeMap<(Key, Term), usize> = BTreeMap::new();
    let row_of = |k: &Key, t: &Term, rows: &mut BTreeMap<(Key, Term), usize>| -> usize {
        let n = rows.len();
        *rows.entry((k.clone(), *t)).or_insert(n)
    };
    let mut cols = Vec::with_capacity(space.len());
    for (k, t) in &space {
        let h = Morphism { src: f.src.clone(), dst: f.dst.clone(), table: Table::new().with_entry(k.clone(), *t) };
        let dh = morphism_diff(&h);
        let mut col = Gf2Vector::new();
        for (dk, dts) in dh.table.iter() {
            for dt in dts {
                col.toggle(row_of(dk, dt, &mut rows));
            }
        }
        cols.push(col);
    }
    let mut b = Gf2Vector::new();
    for (k, ts) in target.iter() {
        for t in ts {
            b.toggle(row_of(k, t, &mut rows));
        }
    }
    let m = Gf2Matrix::from_columns(rows.len(), cols).ok()?;
    let x = gf2::solve(&m, &b)?;
    let mut table = Table::new();
    for j in x.iter() {
        table.toggle(space[j].0.clone(), space[j].1);
    }
    Some(Morphism { src: f.src.clone(), dst: f.dst.clone(), table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::*;

    fn alg_z1() -> Arc<AlgebraModel> {
        Arc::new(AlgebraModel::new(&z1()).unwrap())
    }

    /// The algebra as a bimodule over itself.
    fn regular(a: &Arc<AlgebraModel>) -> Module {
        let gens = (0..a.dim())
            .map(|i| Module::simple_gen(a.describe(i), a.left_idem(i), a.right_idem(i)))
            .collect();
        let mut t = Table::new();
        for x in 0..a.dim() {
            for c in a.diff_basis(x).iter() {
                t.toggle(Key::bare(x), Term { left: None, gen: c, right: None });
            }
        }
        for ((x, y), v) in a.products() {
            for c in v.iter() {
                if !a.is_idempotent(x) {
                    t.toggle(Key { left: vec![x], gen: y, right: vec![] }, Term { left: None, gen: c, right: None });
                }
                if !a.is_idempotent(y) {
                    t.toggle(Key { left: vec![], gen: x, right: vec![y] }, Term { left: None, gen: c, right: None });
                }
            }
        }
        Module::unchecked("A", Side::A(a.clone()), Side::A(a.clone()), gens, t)
    }

    #[test]
    fn regular_bimodule_satisfies_structure() {
        for z in [alg_z1(), Arc::new(AlgebraModel::new(&z2()).unwrap())] {
            let m = regular(&z);
            assert_eq!(check_structure(&m), None);
            assert_eq!(check_structure(&dualize(&m)), None);
        }
    }

    #[test]
    fn deleting_a_product_breaks_structure() {
        let a = Arc::new(AlgebraModel::new(&z2()).unwrap());
        let m = regular(&a);
        let (k, t) = m
            .table
            .iter()
            .find(|(k, _)| k.left.len() == 1)
            .map(|(k, t)| (k.clone(), *t.iter().next().unwrap()))
            .unwrap();
        let mut broken = m.table.clone();
        broken.toggle(k, t);
        let bad = Module::unchecked("broken", m.left.clone(), m.right.clone(), m.gens.clone(), broken);
        assert!(check_structure(&bad).is_some());
    }

    #[test]
    fn double_dual_is_identity() {
        let a = alg_z1();
        let m = regular(&a);
        let dd = dualize(&dualize(&m));
        assert_eq!(dd.table, m.table);
        assert_eq!(
            dd.gens.iter().map(|g| (&g.label, g.left, g.right)).collect::<Vec<_>>(),
            m.gens.iter().map(|g| (&g.label, g.left, g.right)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn identity_morphism_is_a_cycle() {
        let a = Arc::new(AlgebraModel::new(&z2()).unwrap());
        let m = Arc::new(regular(&a));
        let id = Morphism::identity(m.clone());
        assert!(is_homomorphism(&id));
        let twice = morphism_compose(&id, &id).unwrap();
        assert_eq!(twice.table, id.table);
        assert!(is_homomorphism(&Morphism::zero(m.clone(), m)));
    }

    #[test]
    fn boundary_is_found_again() {
        let a = alg_z1();
        let m = Arc::new(regular(&a));
        let space = morphism_space(&m, &m, 2);
        let mut t = Table::new();
        for (k, term) in space.iter().step_by(3) {
            t.toggle(k.clone(), *term);
        }
        let h0 = Morphism::new(m.clone(), m.clone(), t).unwrap();
        let f = morphism_diff(&h0);
        assert!(is_homomorphism(&f));
        let h = bounded_homotopy_search(&f, &Morphism::zero(m.clone(), m.clone()), 3).unwrap();
        assert_eq!(morphism_diff(&h).table, f.table);
        let zero = Morphism::zero(m.clone(), m.clone());
        assert!(homology_level_equal(&f, &zero).unwrap());
        assert!(!homology_level_equal(&Morphism::identity(m.clone()), &zero).unwrap());
    }
}
