//! Box tensor products, one-sided external tensor products and the
//! morphisms they induce.
//!
//! One factor meets the other with a type-A side and the other with a type-D
//! side. The type-D factor is iterated, its algebra outputs are collected in
//! order, and the type-A factor consumes them in a single operation.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::ainf::{Gen, Key, Module, Morphism, Side, Table, Term};
use crate::error::{Error, Result};

/// A box product with a record of how it was formed.
#[derive(Clone, Debug)]
pub struct BoxProduct {
    pub result: Module,
    pub left: String,
    pub right: String,
    /// `"A|D"` when the left factor meets with type A, `"D|A"` otherwise.
    pub variant: &'static str,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    /// The morphism is the left factor.
    Left,
    /// The morphism is the right factor.
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orientation {
    /// Left factor type A on the right, right factor type D on the left.
    AD,
    DA,
}

fn orientation(x: &Module, y: &Module) -> Result<Orientation> {
    let (xa, ya) = match (&x.right, &y.left) {
        (Side::A(a), Side::D(b)) => (a, b),
        (Side::D(a), Side::A(b)) => (a, b),
        _ => {
            return Err(Error::Incompatible(format!(
                "cannot box {} ({}) with {} ({}): need type A against type D",
                x.name,
                x.kind(),
                y.name,
                y.kind()
            )))
        }
    };
    if !(Arc::ptr_eq(xa, ya) || **xa == **ya) {
        return Err(Error::Incompatible(format!("{} and {} are over different algebras", x.name, y.name)));
    }
    Ok(if x.right.is_a() { Orientation::AD } else { Orientation::DA })
}

fn pair_gens(x: &Module, y: &Module) -> (Vec<Gen>, HashMap<(usize, usize), usize>) {
    let mut gens = Vec::new();
    let mut index = HashMap::new();
    for (i, a) in x.gens.iter().enumerate() {
        for (j, b) in y.gens.iter().enumerate() {
            if a.right == b.left {
                index.insert((i, j), gens.len());
                gens.push(Gen {
                    label: format!("{}⊠{}", a.label, b.label),
                    left: a.left,
                    right: b.right,
                    parts: [a.parts.as_slice(), b.parts.as_slice()].concat(),
                });
            }
        }
    }
    (gens, index)
}

/// The type-A factor: its table and whether the strict unit rule applies
/// (it does for structure maps, not for morphisms).
struct AFactor<'a> {
    table: &'a Table,
    src: &'a Module,
    unit: bool,
}

/// The type-D factor: structure maps of `src`, optionally one application of
/// a morphism, then structure maps of `dst`.
struct DChain<'a> {
    src: &'a Module,
    map: Option<&'a Table>,
    dst: &'a Module,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct ChainState {
    done: bool,
    gen: usize,
    outs: Vec<usize>,
    inputs: Vec<usize>,
    out: Option<usize>,
}

/// Iterates the type-D factor from `start`. `facing_left` is true when its
/// type-D side faces left (it is the right factor). Returns end states with
/// odd multiplicity.
fn run_chain(ch: &DChain, start: usize, max_outs: usize, facing_left: bool) -> Vec<ChainState> {
    let (far, near) = if facing_left { (&ch.src.right, &ch.src.left) } else { (&ch.src.left, &ch.src.right) };
    let near_alg = near.algebra().expect("type-D side");
    let mut finals: BTreeMap<ChainState, bool> = BTreeMap::new();
    let mut frontier: BTreeMap<ChainState, bool> = BTreeMap::new();
    frontier.insert(
        ChainState { done: ch.map.is_none(), gen: start, outs: vec![], inputs: vec![], out: None },
        true,
    );
    while !frontier.is_empty() {
        let mut next: BTreeMap<ChainState, bool> = BTreeMap::new();
        for (st, odd) in frontier {
            if !odd {
                continue;
            }
            if st.done {
                let e = finals.entry(st.clone()).or_insert(false);
                *e = !*e;
            }
            if st.outs.len() == max_outs {
                continue;
            }
            let mut steps: Vec<(&Table, bool)> = Vec::new();
            if st.done {
                steps.push((&ch.dst.table, true));
            } else {
                steps.push((&ch.src.table, false));
                steps.push((ch.map.expect("pending map"), true));
            }
            for (table, done) in steps {
                for (k, terms) in table.iter() {
                    if k.gen != st.gen {
                        continue;
                    }
                    let far_inputs = if facing_left { &k.right } else { &k.left };
                    for t in terms {
                        let (near_out, far_out) = if facing_left { (t.left, t.right) } else { (t.right, t.left) };
                        let a = near_out.expect("type-D output");
                        let mut outs = st.outs.clone();
                        outs.push(a);
                        if outs.len() >= 2 && outs.iter().any(|&o| near_alg.is_idempotent(o)) {
                            continue;
                        }
                        let inputs = if facing_left {
                            [st.inputs.as_slice(), far_inputs].concat()
                        } else {
                            [far_inputs.as_slice(), st.inputs.as_slice()].concat()
                        };
                        let outs_far: Vec<Option<usize>> = match (far, st.out, far_out) {
                            (Side::D(alg), Some(prev), Some(new)) => {
                                let prod = if facing_left { alg.mul_basis(new, prev) } else { alg.mul_basis(prev, new) };
                                prod.iter().map(Some).collect()
                            }
                            (_, None, new) => vec![new],
                            (_, prev, _) => vec![prev],
                        };
                        for out in outs_far {
                            let s = ChainState { done: st.done || done, gen: t.gen, outs: outs.clone(), inputs: inputs.clone(), out };
                            let e = next.entry(s).or_insert(false);
                            *e = !*e;
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    finals.into_iter().filter(|(_, o)| *o).map(|(s, _)| s).collect()
}

fn unit_out(side: &Side, set: crate::PairSet) -> Option<usize> {
    match side {
        Side::D(a) => Some(a.idem_index(set)),
        _ => None,
    }
}

/// Table of `A ⊠ D` (orientation AD) with the A factor on the left.
fn table_ad(
    af: &AFactor,
    ch: &DChain,
    src_idx: &HashMap<(usize, usize), usize>,
    dst_idx: &HashMap<(usize, usize), usize>,
) -> Table {
    let alg = af.src.right.algebra().expect("type A").clone();
    let max_outs = af.table.max_right_len().max(1);
    let lookup = af.table.by_gen_right();
    let mut out = Table::new();
    let mut by_start: BTreeMap<usize, Vec<ChainState>> = BTreeMap::new();
    let mut pairs: Vec<(&(usize, usize), &usize)> = src_idx.iter().collect();
    pairs.sort();
    for (&(x, y), &g) in pairs {
        let chains = by_start.entry(y).or_insert_with(|| run_chain(ch, y, max_outs, true));
        for c in chains.iter() {
            let ro = c.out.or_else(|| unit_out(&ch.dst.right, ch.dst.gens[c.gen].right));
            if af.unit && c.outs.len() == 1 && alg.is_idempotent(c.outs[0]) {
                if let Some(&d) = dst_idx.get(&(x, c.gen)) {
                    let lo = unit_out(&af.src.left, af.src.gens[x].left);
                    out.toggle(
                        Key { left: vec![], gen: g, right: c.inputs.clone() },
                        Term { left: lo, gen: d, right: ro },
                    );
                }
                continue;
            }
            let Some(entries) = lookup.get(&(x, c.outs.as_slice())) else { continue };
            for (left, terms) in entries {
                for t in terms.iter() {
                    let Some(&d) = dst_idx.get(&(t.gen, c.gen)) else { continue };
                    out.toggle(
                        Key { left: left.to_vec(), gen: g, right: c.inputs.clone() },
                        Term { left: t.left, gen: d, right: ro },
                    );
                }
            }
        }
    }
    out
}

/// Table of `D ⊠ A` (orientation DA) with the A factor on the right.
fn table_da(
    ch: &DChain,
    af: &AFactor,
    src_idx: &HashMap<(usize, usize), usize>,
    dst_idx: &HashMap<(usize, usize), usize>,
) -> Table {
    let alg = af.src.left.algebra().expect("type A").clone();
    let max_outs = af.table.max_left_len().max(1);
    let lookup = af.table.by_gen_left();
    let mut out = Table::new();
    let mut by_start: BTreeMap<usize, Vec<ChainState>> = BTreeMap::new();
    let mut pairs: Vec<(&(usize, usize), &usize)> = src_idx.iter().collect();
    pairs.sort();
    for (&(x, y), &g) in pairs {
        let chains = by_start.entry(x).or_insert_with(|| run_chain(ch, x, max_outs, false));
        for c in chains.iter() {
            let lo = c.out.or_else(|| unit_out(&ch.dst.left, ch.dst.gens[c.gen].left));
            if af.unit && c.outs.len() == 1 && alg.is_idempotent(c.outs[0]) {
                if let Some(&d) = dst_idx.get(&(c.gen, y)) {
                    let ro = unit_out(&af.src.right, af.src.gens[y].right);
                    out.toggle(
                        Key { left: c.inputs.clone(), gen: g, right: vec![] },
                        Term { left: lo, gen: d, right: ro },
                    );
                }
                continue;
            }
            let fed: Vec<usize> = c.outs.iter().rev().copied().collect();
            let Some(entries) = lookup.get(&(y, fed.as_slice())) else { continue };
            for (right, terms) in entries {
                for t in terms.iter() {
                    let Some(&d) = dst_idx.get(&(c.gen, t.gen)) else { continue };
                    out.toggle(
                        Key { left: c.inputs.clone(), gen: g, right: right.to_vec() },
                        Term { left: lo, gen: d, right: t.right },
                    );
                }
            }
        }
    }
    out
}

fn box_table(
    x: &Module,
    y: &Module,
    xmap: Option<(&Table, &Module)>,
    ymap: Option<(&Table, &Module)>,
    src_idx: &HashMap<(usize, usize), usize>,
    dst_idx: &HashMap<(usize, usize), usize>,
) -> Result<Table> {
    let o = orientation(x, y)?;
    
    Ok(match o {
        Orientation::AD => {
            let af = AFactor { table: xmap.map_or(&x.table, |m| m.0), src: x, unit: xmap.is_none() };
            let ch = DChain { src: y, map: ymap.map(|m| m.0), dst: ymap.map_or(y, |m| m.1) };
            table_ad(&af, &ch, src_idx, dst_idx)
        }
        Orientation::DA => {
            let af = AFactor { table: ymap.map_or(&y.table, |m| m.0), src: y, unit: ymap.is_none() };
            let ch = DChain { src: x, map: xmap.map(|m| m.0), dst: xmap.map_or(x, |m| m.1) };
            table_da(&ch, &af, src_idx, dst_idx)
        }
    })
}

/// `x ⊠ y`, checked against the structure equation.
pub fn box_product(x: &Module, y: &Module) -> Result<Module> {
    let m = box_unchecked(x, y)?;
    Module::new(m.name.clone(), m.left.clone(), m.right.clone(), m.gens, m.table)
}

/// `x ⊠ y` without re-checking the structure equation.
pub fn box_unchecked(x: &Module, y: &Module) -> Result<Module> {
    let (gens, idx) = pair_gens(x, y);
    let table = box_table(x, y, None, None, &idx, &idx)?;
    Ok(Module::unchecked(format!("{}⊠{}", x.name, y.name), x.left.clone(), y.right.clone(), gens, table))
}

pub fn box_tensor(x: &Module, y: &Module) -> Result<BoxProduct> {
    let variant = match orientation(x, y)? {
        Orientation::AD => "A|D",
        Orientation::DA => "D|A",
    };
    Ok(BoxProduct { result: box_product(x, y)?, left: x.name.clone(), right: y.name.clone(), variant })
}

/// `f ⊠ id` or `id ⊠ f`, between freshly built products.
pub fn induced(f: &Morphism, other: &Module, pos: Position) -> Result<Morphism> {
    let (src, dst) = match pos {
        Position::Left => (box_unchecked(&f.src, other)?, box_unchecked(&f.dst, other)?),
        Position::Right => (box_unchecked(other, &f.src)?, box_unchecked(other, &f.dst)?),
    };
    induced_between(f, other, pos, Arc::new(src), Arc::new(dst))
}

/// As [`induced`], with the products supplied by the caller. They must be
/// the products of the same factors.
pub fn induced_between(f: &Morphism, other: &Module, pos: Position, src: Arc<Module>, dst: Arc<Module>) -> Result<Morphism> {
    let (src_idx, dst_idx, table) = match pos {
        Position::Left => {
            let (_, si) = pair_gens(&f.src, other);
            let (_, di) = pair_gens(&f.dst, other);
            let t = box_table(&f.src, other, Some((&f.table, &f.dst)), None, &si, &di)?;
            (si, di, t)
        }
        Position::Right => {
            let (_, si) = pair_gens(other, &f.src);
            let (_, di) = pair_gens(other, &f.dst);
            let t = box_table(other, &f.src, None, Some((&f.table, &f.dst)), &si, &di)?;
            (si, di, t)
        }
    };
    if src.dim() != src_idx.len() || dst.dim() != dst_idx.len() {
        return Err(Error::Incompatible("supplied products do not match the factors".into()));
    }
    Ok(Morphism { src, dst, table })
}

/// Tensor product of a module with only a left side and one with only a
/// right side. The actions do not interact, so the structure equation holds
/// without any DG-type assumption. A type-D side idles with its idempotent
/// while the other factor acts.
pub fn external_tensor(m: &Module, n: &Module) -> Result<Module> {
    if !matches!(m.right, Side::None) || !matches!(n.left, Side::None) {
        return Err(Error::Incompatible(format!(
            "external tensor needs a left module and a right module, got {} and {}",
            m.kind(),
            n.kind()
        )));
    }
    let mut gens = Vec::new();
    let mut index = HashMap::new();
    for (i, a) in m.gens.iter().enumerate() {
        for (j, b) in n.gens.iter().enumerate() {
            index.insert((i, j), gens.len());
            gens.push(Gen {
                label: format!("{}⊗{}", a.label, b.label),
                left: a.left,
                right: b.right,
                parts: [a.parts.as_slice(), b.parts.as_slice()].concat(),
            });
        }
    }
    let mut table = Table::new();
    for (k, terms) in m.table.iter() {
        for j in 0..n.dim() {
            for t in terms {
                table.toggle(
                    Key { left: k.left.clone(), gen: index[&(k.gen, j)], right: vec![] },
                    Term { left: t.left, gen: index[&(t.gen, j)], right: unit_out(&n.right, n.gens[j].right) },
                );
            }
        }
    }
    for (k, terms) in n.table.iter() {
        for i in 0..m.dim() {
            for t in terms {
                table.toggle(
                    Key { left: vec![], gen: index[&(i, k.gen)], right: k.right.clone() },
                    Term { left: unit_out(&m.left, m.gens[i].left), gen: index[&(i, t.gen)], right: t.right },
                );
            }
        }
    }
    Module::new(format!("{}⊗{}", m.name, n.name), m.left.clone(), n.right.clone(), gens, table)
}
