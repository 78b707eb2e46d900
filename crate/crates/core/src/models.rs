//! Standard modules: elementary modules for caps, the algebra and its dual
//! as bimodules, the identity bimodules and the idempotent block complexes.
//!
//! Caps are represented by elementary modules: the type-D module of a cap
//! sits at `ι_I` and its type-A module at `ι_{I^c}`. Twisting slices are
//! represented by `A` and `A^∨` as bimodules over themselves.

use std::sync::Arc;

use crate::ainf::{check_structure, dualize, Gen, Key, Module, Side, Table, Term};
use crate::arc_diagram::PairSet;
use crate::conventions::{DdConvention, DD_CONVENTION};
use crate::error::{Error, Result};
use crate::gf2::{ChainComplexGf2, Gf2Matrix};
use crate::strands::{ABasisElem, AlgebraModel};
use crate::tensor::box_product;

/// Which side of a one-sided module carries the action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hand {
    Left,
    Right,
}

fn one_sided(hand: Hand, side: Side) -> (Side, Side) {
    match hand {
        Hand::Left => (side, Side::None),
        Hand::Right => (Side::None, side),
    }
}

fn gen_at(label: String, hand: Hand, set: PairSet) -> Gen {
    match hand {
        Hand::Left => Module::simple_gen(label, set, PairSet::EMPTY),
        Hand::Right => Module::simple_gen(label, PairSet::EMPTY, set),
    }
}

/// The type-D module of the cap for `I`: one generator at `ι_I`, `δ = 0`.
pub fn elementary_d(am: &Arc<AlgebraModel>, set: PairSet, hand: Hand) -> Module {
    let (l, r) = one_sided(hand, Side::D(am.clone()));
    Module::unchecked(format!("elemD{set}"), l, r, vec![gen_at(format!("x{set}"), hand, set)], Table::new())
}

/// The type-A module of the cap for `I`: one generator at `ι_{I^c}` and no
/// operations.
pub fn elementary_a(am: &Arc<AlgebraModel>, set: PairSet, hand: Hand) -> Module {
    let c = set.complement(am.rank());
    let (l, r) = one_sided(hand, Side::A(am.clone()));
    Module::unchecked(format!("elemA{set}"), l, r, vec![gen_at(format!("y{c}"), hand, c)], Table::new())
}

/// The algebra as a bimodule over itself: differential and both products.
pub fn alg_as_aa(am: &Arc<AlgebraModel>) -> Module {
    let gens = (0..am.dim()).map(|i| Module::simple_gen(am.describe(i), am.left_idem(i), am.right_idem(i))).collect();
    let mut t = Table::new();
    for x in 0..am.dim() {
        for c in am.diff_basis(x).iter() {
            t.toggle(Key::bare(x), Term { left: None, gen: c, right: None });
        }
    }
    for ((x, y), v) in am.products() {
        for c in v.iter() {
            if !am.is_idempotent(x) {
                t.toggle(Key { left: vec![x], gen: y, right: vec![] }, Term { left: None, gen: c, right: None });
            }
            if !am.is_idempotent(y) {
                t.toggle(Key { left: vec![], gen: x, right: vec![y] }, Term { left: None, gen: c, right: None });
            }
        }
    }
    Module::unchecked("A", Side::A(am.clone()), Side::A(am.clone()), gens, t)
}

/// `A·ι_I` as a left module (`hand = Left`) or `ι_I·A` as a right module.
pub fn alg_one_sided(am: &Arc<AlgebraModel>, set: PairSet, hand: Hand) -> Module {
    let picked: Vec<usize> = (0..am.dim())
        .filter(|&i| match hand {
            Hand::Left => am.right_idem(i) == set,
            Hand::Right => am.left_idem(i) == set,
        })
        .collect();
    let pos = |x: usize| picked.iter().position(|&p| p == x);
    let gens = picked
        .iter()
        .map(|&i| {
            let at = match hand {
                Hand::Left => am.left_idem(i),
                Hand::Right => am.right_idem(i),
            };
            gen_at(am.describe(i), hand, at)
        })
        .collect();
    let mut t = Table::new();
    for (g, &x) in picked.iter().enumerate() {
        for c in am.diff_basis(x).iter() {
            t.toggle(Key::bare(g), Term { left: None, gen: pos(c).expect("block closed under d"), right: None });
        }
    }
    for ((x, y), v) in am.products() {
        let (acting, on) = match hand {
            Hand::Left => (x, y),
            Hand::Right => (y, x),
        };
        let Some(g) = pos(on) else { continue };
        if am.is_idempotent(acting) {
            continue;
        }
        for c in v.iter() {
            let key = match hand {
                Hand::Left => Key { left: vec![acting], gen: g, right: vec![] },
                Hand::Right => Key { left: vec![], gen: g, right: vec![acting] },
            };
            t.toggle(key, Term { left: None, gen: pos(c).expect("block closed under products"), right: None });
        }
    }
    let (l, r) = one_sided(hand, Side::A(am.clone()));
    let name = match hand {
        Hand::Left => format!("A·i{set}"),
        Hand::Right => format!("i{set}·A"),
    };
    Module::unchecked(name, l, r, gens, t)
}

pub fn dual_alg_as_aa(am: &Arc<AlgebraModel>) -> Module {
    let mut m = dualize(&alg_as_aa(am));
    m.name = "A^".into();
    m
}

/// The type DA identity: generators `*_I` and `δ(*, a) = a ⊗ *`.
pub fn da_identity(am: &Arc<AlgebraModel>) -> Module {
    let sets: Vec<PairSet> = PairSet::all(am.rank()).collect();
    let gens = sets.iter().map(|&s| Module::simple_gen(format!("*{s}"), s, s)).collect();
    let at = |s: PairSet| sets.iter().position(|&x| x == s).expect("all subsets");
    let mut t = Table::new();
    for a in 0..am.dim() {
        if am.is_idempotent(a) {
            continue;
        }
        t.toggle(
            Key { left: vec![], gen: at(am.left_idem(a)), right: vec![a] },
            Term { left: Some(a), gen: at(am.right_idem(a)), right: None },
        );
    }
    Module::unchecked("I_DA", Side::D(am.clone()), Side::A(am.clone()), gens, t)
}

/// The chord `s -> t` whose occupied set is the complement of the chord's
/// occupied set and the two moving pairs.
fn complementary_chord(am: &AlgebraModel, c: usize) -> Option<usize> {
    let e = am.elem(c);
    let (s, t) = e.movers[0];
    let lay = am.layout();
    let (ps, pt) = (lay.pair_of[s], lay.pair_of[t]);
    if ps == pt {
        return None;
    }
    let occupied = e.occupied.with(ps).with(pt).complement(am.rank());
    am.index_of(&ABasisElem { movers: e.movers.clone(), occupied })
}

/// Type DD identity candidate for a convention, without validation.
pub fn dd_identity_candidate(am: &Arc<AlgebraModel>, conv: DdConvention) -> Result<Module> {
    let k = am.rank();
    let sets: Vec<PairSet> = PairSet::all(k).collect();
    let at = |s: PairSet| sets.iter().position(|&x| x == s).expect("all subsets");
    let mut t = Table::new();
    match conv {
        DdConvention::Complement => {
            let gens = sets.iter().map(|&s| Module::simple_gen(format!("*{s}"), s, s.complement(k))).collect();
            for c in am.chords() {
                if let Some(cc) = complementary_chord(am, c) {
                    t.toggle(
                        Key::bare(at(am.left_idem(c))),
                        Term { left: Some(c), gen: at(am.right_idem(c)), right: Some(cc) },
                    );
                }
            }
            Ok(Module::unchecked("I_DD", Side::D(am.clone()), Side::D(am.clone()), gens, t))
        }
        DdConvention::Same => {
            let (rot, map) = am.rotate180()?;
            let gens = sets.iter().map(|&s| Module::simple_gen(format!("*{s}"), s, s)).collect();
            for c in am.chords() {
                t.toggle(
                    Key::bare(at(am.left_idem(c))),
                    Term { left: Some(c), gen: at(am.right_idem(c)), right: Some(map[c]) },
                );
            }
            Ok(Module::unchecked("I_DD", Side::D(am.clone()), Side::D(Arc::new(rot)), gens, t))
        }
    }
}

/// The type DD identity under the locked convention. Fails if the
/// structure equation does not hold.
pub fn dd_identity(am: &Arc<AlgebraModel>) -> Result<Module> {
    let m = dd_identity_candidate(am, DD_CONVENTION)?;
    if let Some(bad) = check_structure(&m) {
        return Err(Error::Structure(format!("DD identity fails at {}", m.show_key(&bad))));
    }
    Ok(m)
}

/// The basis elements from `ι_I` to `ι_J` with the restricted differential.
pub fn gamma_block(am: &AlgebraModel, from: PairSet, to: PairSet) -> Result<ChainComplexGf2> {
    let picked: Vec<usize> = (0..am.dim()).filter(|&i| am.left_idem(i) == from && am.right_idem(i) == to).collect();
    let mut d = Gf2Matrix::zero(picked.len(), picked.len());
    for (j, &x) in picked.iter().enumerate() {
        for c in am.diff_basis(x).iter() {
            let i = picked.iter().position(|&p| p == c).expect("d preserves idempotents");
            d.toggle(i, j);
        }
    }
    ChainComplexGf2::new(picked.iter().map(|&i| am.describe(i)).collect(), d)
}

/// The same block computed as `x_I ⊠ A ⊠ x_J` with elementary type-D
/// modules on both sides.
pub fn gamma_block_boxed(am: &Arc<AlgebraModel>, from: PairSet, to: PairSet) -> Result<Module> {
    let left = box_product(&elementary_d(am, from, Hand::Right), &alg_as_aa(am))?;
    box_product(&left, &elementary_d(am, to, Hand::Left))
}

/// Parsed standard model descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Descriptor {
    ElementaryA(PairSet, Option<Hand>),
    ElementaryD(PairSet, Option<Hand>),
    Alg,
    AlgOneSided(PairSet, Option<Hand>),
    DualAlg,
    DaIdentity,
    DdIdentity,
    Gamma(PairSet, PairSet),
    /// Box product of the factors, left to right.
    Chain(Vec<Descriptor>),
}

fn parse_hand(s: Option<&str>) -> Result<Option<Hand>> {
    match s {
        None => Ok(None),
        Some("left") | Some("L") => Ok(Some(Hand::Left)),
        Some("right") | Some("R") => Ok(Some(Hand::Right)),
        Some(o) => Err(Error::Descriptor(format!("unknown hand `{o}`"))),
    }
}

fn set_arg(s: Option<&str>, k: usize, what: &str) -> Result<PairSet> {
    let s = s.ok_or_else(|| Error::Descriptor(format!("{what} needs a subset like {{1,2}}")))?;
    PairSet::parse(s, k).map_err(|e| Error::Descriptor(e.to_string()))
}

impl Descriptor {
    /// Parses `elementary:D:{1,3}`, `elementary:A:{}:right`, `alg`,
    /// `alg:{1}`, `dualalg`, `id:DA`, `id:DD`, `gamma:{1}:{1,2}`, or box
    /// products of these joined by `*`.
    pub fn parse(s: &str, rank: usize) -> Result<Descriptor> {
        let s = s.trim();
        if s.contains('*') {
            let parts = s.split('*').map(|p| Descriptor::parse(p, rank)).collect::<Result<Vec<_>>>()?;
            return Ok(Descriptor::Chain(parts));
        }
        let fields: Vec<&str> = s.split(':').collect();
        let d = match fields[0] {
            "elementary" => {
                let set = set_arg(fields.get(2).copied(), rank, "elementary")?;
                let hand = parse_hand(fields.get(3).copied())?;
                match fields.get(1).copied() {
                    Some("A") => Descriptor::ElementaryA(set, hand),
                    Some("D") => Descriptor::ElementaryD(set, hand),
                    _ => return Err(Error::Descriptor(format!("`{s}`: expected elementary:A or elementary:D"))),
                }
            }
            "alg" if fields.len() == 1 => Descriptor::Alg,
            "alg" => Descriptor::AlgOneSided(set_arg(fields.get(1).copied(), rank, "alg")?, parse_hand(fields.get(2).copied())?),
            "dualalg" => Descriptor::DualAlg,
            "id" => match fields.get(1).copied() {
                Some("DA") => Descriptor::DaIdentity,
                Some("DD") => Descriptor::DdIdentity,
                _ => return Err(Error::Descriptor(format!("`{s}`: expected id:DA or id:DD"))),
            },
            "gamma" => Descriptor::Gamma(
                set_arg(fields.get(1).copied(), rank, "gamma")?,
                set_arg(fields.get(2).copied(), rank, "gamma")?,
            ),
            other => return Err(Error::Descriptor(format!("unknown family `{other}`"))),
        };
        let max_fields = match d {
            Descriptor::ElementaryA(..) | Descriptor::ElementaryD(..) => 4,
            Descriptor::AlgOneSided(..) | Descriptor::Gamma(..) => 3,
            Descriptor::DaIdentity | Descriptor::DdIdentity => 2,
            _ => 1,
        };
        if fields.len() > max_fields {
            return Err(Error::Descriptor(format!("`{s}`: too many fields")));
        }
        Ok(d)
    }

    fn with_default_hand(&self, hand: Hand) -> Descriptor {
        match self {
            Descriptor::ElementaryA(s, None) => Descriptor::ElementaryA(*s, Some(hand)),
            Descriptor::ElementaryD(s, None) => Descriptor::ElementaryD(*s, Some(hand)),
            Descriptor::AlgOneSided(s, None) => Descriptor::AlgOneSided(*s, Some(hand)),
            d => d.clone(),
        }
    }

    /// Builds the module. One-sided families without an explicit hand take
    /// `hand` when standing alone; in a product the first factor acts on
    /// the right and the last on the left.
    pub fn build(&self, am: &Arc<AlgebraModel>, hand: Hand) -> Result<Module> {
        match self {
            Descriptor::ElementaryA(s, h) => Ok(elementary_a(am, *s, h.unwrap_or(hand))),
            Descriptor::ElementaryD(s, h) => Ok(elementary_d(am, *s, h.unwrap_or(hand))),
            Descriptor::Alg => Ok(alg_as_aa(am)),
            Descriptor::AlgOneSided(s, h) => Ok(alg_one_sided(am, *s, h.unwrap_or(hand))),
            Descriptor::DualAlg => Ok(dual_alg_as_aa(am)),
            Descriptor::DaIdentity => Ok(da_identity(am)),
            Descriptor::DdIdentity => dd_identity(am),
            Descriptor::Gamma(i, j) => gamma_block_boxed(am, *i, *j),
            Descriptor::Chain(parts) => {
                let n = parts.len();
                let mut acc: Option<Module> = None;
                for (i, p) in parts.iter().enumerate() {
                    let h = if i == 0 && n > 1 { Hand::Right } else { Hand::Left };
                    let m = p.with_default_hand(h).build(am, h)?;
                    acc = Some(match acc {
                        None => m,
                        Some(a) => box_product(&a, &m)?,
                    });
                }
                acc.ok_or_else(|| Error::Descriptor("empty product".into()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::*;
    use crate::conventions::DdConvention;

    fn algs() -> Vec<Arc<AlgebraModel>> {
        [z0(), z1(), z2()].iter().map(|z| Arc::new(AlgebraModel::new(z).unwrap())).collect()
    }

    fn set(s: &str, k: usize) -> PairSet {
        PairSet::parse(s, k).unwrap()
    }

    #[test]
    fn every_standard_model_satisfies_structure() {
        for am in algs() {
            let k = am.rank();
            let mut ms = vec![alg_as_aa(&am), dual_alg_as_aa(&am), da_identity(&am), dd_identity(&am).unwrap()];
            for s in PairSet::all(k) {
                for h in [Hand::Left, Hand::Right] {
                    ms.push(elementary_a(&am, s, h));
                    ms.push(elementary_d(&am, s, h));
                    ms.push(alg_one_sided(&am, s, h));
                }
            }
            for m in ms {
                assert_eq!(check_structure(&m), None, "{} over rank {k}", m.name);
                Module::new(m.name.clone(), m.left.clone(), m.right.clone(), m.gens.clone(), m.table.clone()).unwrap();
            }
        }
    }

    #[test]
    fn elementary_idempotents() {
        let am = &algs()[1];
        let d = elementary_d(am, set("{1}", 1), Hand::Left);
        assert_eq!(d.gens[0].left, set("{1}", 1));
        assert!(d.table.is_empty());
        let a = elementary_a(am, set("{1}", 1), Hand::Left);
        assert_eq!(a.gens[0].left, PairSet::EMPTY);
    }

    #[test]
    fn dd_conventions() {
        for am in algs() {
            let c = dd_identity_candidate(&am, DdConvention::Complement).unwrap();
            assert_eq!(check_structure(&c), None);
            assert_eq!(c.dim(), 1 << am.rank());
        }
        let z1 = &algs()[1];
        assert!(dd_identity(z1).unwrap().table.is_empty());
        assert!(dd_identity(&algs()[0]).unwrap().table.is_empty());
        let z2 = &algs()[2];
        assert!(!dd_identity(z2).unwrap().table.is_empty());
    }

    #[test]
    fn block_partition_and_examples() {
        for am in algs() {
            let k = am.rank();
            let mut total = 0;
            for i in PairSet::all(k) {
                for j in PairSet::all(k) {
                    let b = gamma_block(&am, i, j).unwrap();
                    let boxed = gamma_block_boxed(&am, i, j).unwrap();
                    assert_eq!(b.dim(), boxed.dim());
                    assert_eq!(boxed.complex().unwrap().differential(), b.differential());
                    total += b.dim();
                }
            }
            assert_eq!(total, am.dim());
        }
        let z1 = &algs()[1];
        let full = set("{1}", 1);
        let b = gamma_block(z1, full, full).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(crate::gf2::homology(&b).dimension, 2);
        assert_eq!(gamma_block(z1, PairSet::EMPTY, full).unwrap().dim(), 0);
        assert_eq!(gamma_block(z1, PairSet::EMPTY, PairSet::EMPTY).unwrap().dim(), 1);
    }

    #[test]
    fn caps_pair_compatibly() {
        let am = &algs()[2];
        for i in PairSet::all(2) {
            for j in PairSet::all(2) {
                let b = box_product(&elementary_a(am, i, Hand::Right), &elementary_d(am, j, Hand::Left)).unwrap();
                assert_eq!(b.dim(), usize::from(i.complement(2) == j));
            }
        }
    }

    #[test]
    fn descriptors() {
        assert_eq!(
            Descriptor::parse("elementary:D:{1,2}", 2).unwrap(),
            Descriptor::ElementaryD(set("{1,2}", 2), None)
        );
        assert_eq!(Descriptor::parse("gamma:{1}:{}", 1).unwrap(), Descriptor::Gamma(set("{1}", 1), PairSet::EMPTY));
        assert!(Descriptor::parse("elementary:X:{1}", 1).is_err());
        assert!(Descriptor::parse("alg:{3}", 1).is_err());
        assert!(Descriptor::parse("id:DD:extra", 1).is_err());
        let am = &algs()[1];
        let m = Descriptor::parse("elementary:D:{1}*alg*id:DD", 1).unwrap().build(am, Hand::Left).unwrap();
        assert_eq!(m.kind(), "D");
        assert_eq!(m.right.kind(), crate::ainf::SideKind::D);
    }
}
