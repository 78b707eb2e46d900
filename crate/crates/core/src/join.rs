//! Join maps. `∇_M` pairs a left type-A module with its dual into `A^∨`;
//! boxing it with type-D modules on both sides gives the gluing map
//! `Ψ: (U⊠M) ⊗ (M^∨⊠V) → U⊠A^∨⊠V`. Also the double of a module, its
//! diagonal element, the cancellation map `c_A`, and the self-join.
//!
//! Carriers of different bracketings are identified through generator
//! parts, so everything that must be compared is built from the modules
//! held by one [`Joiner`].

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::ainf::{dualize, is_homomorphism, oppositize, Gen, Key, Module, Morphism, Side, Table, Term};
use crate::arc_diagram::PairSet;
use crate::error::{Error, Result};
use crate::gf2::{ChainComplexGf2, Gf2Matrix, Gf2Vector};
use crate::models::{alg_as_aa, da_identity, dd_identity};
use crate::strands::AlgebraModel;
use crate::tensor::{box_product, box_unchecked, external_tensor, induced, induced_between, Position};

pub type Part = (u64, usize);

/// A gluing map with its carriers. The domain is the tensor product of the
/// complexes `first = U⊠M` and `second = M^∨⊠V`, indexed `i * dim(second) + j`.
#[derive(Clone, Debug)]
pub struct JoinInstance {
    pub algebra: Arc<AlgebraModel>,
    pub m: Arc<Module>,
    pub u: Arc<Module>,
    pub v: Arc<Module>,
    pub first: Arc<Module>,
    pub second: Arc<Module>,
    pub target: Arc<Module>,
    pub domain: ChainComplexGf2,
    pub codomain: ChainComplexGf2,
    pub map: Gf2Matrix,
}

impl JoinInstance {
    pub fn domain_parts(&self, i: usize) -> Vec<Part> {
        let n = self.second.dim();
        [self.first.gens[i / n].parts.as_slice(), self.second.gens[i % n].parts.as_slice()].concat()
    }

    pub fn is_chain_map(&self) -> bool {
        self.codomain.differential().compose(&self.map) == self.map.compose(self.domain.differential())
    }
}

fn parts_index(m: &Module) -> HashMap<&[Part], usize> {
    m.gens.iter().enumerate().map(|(i, g)| (g.parts.as_slice(), i)).collect()
}

fn require_side(m: &Module, left: fn(&Side) -> bool, right: fn(&Side) -> bool, what: &str) -> Result<()> {
    if left(&m.left) && right(&m.right) {
        Ok(())
    } else {
        Err(Error::Incompatible(format!("{} is {}, expected {what}", m.name, m.kind())))
    }
}

fn none(s: &Side) -> bool {
    matches!(s, Side::None)
}

/// The standard bimodules over one algebra, built once so that parts agree
/// across every construction.
#[derive(Clone, Debug)]
pub struct Joiner {
    pub am: Arc<AlgebraModel>,
    pub alg: Arc<Module>,
    pub dual: Arc<Module>,
    pub dd: Arc<Module>,
    pub da: Arc<Module>,
}

impl Joiner {
    pub fn new(am: Arc<AlgebraModel>) -> Result<Joiner> {
        let alg = alg_as_aa(&am);
        let mut dual = dualize(&alg);
        dual.name = "A^".into();
        Ok(Joiner {
            dd: Arc::new(dd_identity(&am)?),
            da: Arc::new(da_identity(&am)),
            alg: Arc::new(alg),
            dual: Arc::new(dual),
            am,
        })
    }

    fn check_left_a(&self, m: &Module) -> Result<()> {
        require_side(m, Side::is_a, none, "a left type-A module")
    }

    /// `∇_M: M ⊗ M^∨ → A^∨`. Every action `m(λ, p) ∋ q` with `λ` split as
    /// `(a', a'', a)` gives the entry `(a | p⊗q^∨ | a') ↦ a''^∨`; the unit
    /// gives `p⊗p^∨ ↦ ι^∨`.
    pub fn nabla(&self, m: &Module) -> Result<Morphism> {
        self.check_left_a(m)?;
        let ext = Arc::new(external_tensor(m, &dualize(m))?);
        let n = m.dim();
        let mut t = Table::new();
        for p in 0..n {
            t.toggle(Key::bare(p * n + p), Term { left: None, gen: self.am.idem_index(m.gens[p].left), right: None });
        }
        for (k, terms) in m.table.iter() {
            for q in terms {
                for s in 0..k.left.len() {
                    t.toggle(
                        Key { left: k.left[s + 1..].to_vec(), gen: k.gen * n + q.gen, right: k.left[..s].to_vec() },
                        Term { left: None, gen: k.left[s], right: None },
                    );
                }
            }
        }
        Morphism::new(ext, self.dual.clone(), t)
    }

    fn carriers(&self, u: &Module, m: &Module, v: &Module) -> Result<(Module, Module)> {
        require_side(u, none, Side::is_d, "a right type-D module")?;
        require_side(v, Side::is_d, none, "a left type-D module")?;
        self.check_left_a(m)?;
        Ok((box_product(u, m)?, box_product(&dualize(m), v)?))
    }

    fn instance(&self, u: &Module, m: &Module, v: &Module, first: Module, second: Module, target: Module, map: Gf2Matrix) -> Result<JoinInstance> {
        let inst = JoinInstance {
            algebra: self.am.clone(),
            m: Arc::new(m.clone()),
            u: Arc::new(u.clone()),
            v: Arc::new(v.clone()),
            domain: first.complex()?.tensor(&second.complex()?),
            codomain: target.complex()?,
            first: Arc::new(first),
            second: Arc::new(second),
            target: Arc::new(target),
            map,
        };
        if !inst.is_chain_map() {
            return Err(Error::NotChainMap);
        }
        Ok(inst)
    }

    fn target(&self, u: &Module, v: &Module) -> Result<Module> {
        box_product(&box_product(u, &self.dual)?, v)
    }

    /// `Ψ_M = id_U ⊠ ∇_M ⊠ id_V`, with the domain carrier identified with
    /// `(U⊠M) ⊗ (M^∨⊠V)`.
    pub fn join_general(&self, u: &Module, m: &Module, v: &Module) -> Result<JoinInstance> {
        let (first, second) = self.carriers(u, m, v)?;
        let nabla = self.nabla(m)?;
        let x1 = Arc::new(box_unchecked(u, &nabla.src)?);
        let y1 = Arc::new(box_unchecked(u, &self.dual)?);
        let dom = Arc::new(box_unchecked(&x1, v)?);
        let cod = Arc::new(box_unchecked(&y1, v)?);
        let f1 = induced_between(&nabla, u, Position::Right, x1, y1)?;
        let f2 = induced_between(&f1, v, Position::Left, dom.clone(), cod.clone())?;
        let target = self.target(u, v)?;
        let cod_parts = parts_index(&target);
        let n2 = second.dim();
        let mut pos: HashMap<Vec<Part>, usize> = HashMap::new();
        for i in 0..first.dim() {
            for j in 0..n2 {
                pos.insert([first.gens[i].parts.as_slice(), second.gens[j].parts.as_slice()].concat(), i * n2 + j);
            }
        }
        let dom_to = |g: &Gen| pos.get(&g.parts).copied().ok_or_else(|| Error::Incompatible("domain generator not in the tensor carrier".into()));
        let perm: Vec<usize> = dom.gens.iter().map(dom_to).collect::<Result<_>>()?;
        if perm.len() != pos.len() {
            return Err(Error::Incompatible("domain carriers differ in size".into()));
        }
        let mut d = Gf2Matrix::zero(pos.len(), pos.len());
        for (k, terms) in dom.table.iter() {
            for t in terms {
                d.toggle(perm[t.gen], perm[k.gen]);
            }
        }
        let expected = first.complex()?.tensor(&second.complex()?);
        if &d != expected.differential() {
            return Err(Error::Incompatible("box of the external tensor differs from the tensor complex".into()));
        }
        let mut map = Gf2Matrix::zero(target.dim(), pos.len());
        let f = f2.scalar_matrix();
        for (r, c) in f.entries() {
            let row = cod_parts[cod.gens[r].parts.as_slice()];
            map.toggle(row, perm[c]);
        }
        self.instance(u, m, v, first, second, target, map)
    }

    /// The DG-type formula `Ψ(u⊠p ⊗ q^∨⊠v) = Σ_a ⟨m(a, p), q^∨⟩ u⊠a^∨⊠v`,
    /// where `a` runs over the whole basis, idempotents included.
    pub fn join_dg(&self, u: &Module, m: &Module, v: &Module) -> Result<JoinInstance> {
        if !m.is_dg_type() {
            return Err(Error::NotDgType(m.name.clone()));
        }
        let (first, second) = self.carriers(u, m, v)?;
        let target = self.target(u, v)?;
        let cod = parts_index(&target);
        let a_uid = self.alg.uid;
        let mut action: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for p in 0..m.dim() {
            action.entry((p, p)).or_default().push(self.am.idem_index(m.gens[p].left));
        }
        for (k, terms) in m.table.iter() {
            if let [a] = k.left.as_slice() {
                for t in terms {
                    action.entry((k.gen, t.gen)).or_default().push(*a);
                }
            }
        }
        let split = |g: &Gen, n: usize| (g.parts[..g.parts.len() - n].to_vec(), g.parts[g.parts.len() - n..].to_vec());
        let m_parts = m.gens.first().map_or(0, |g| g.parts.len());
        let index_of = |parts: &[Part]| m.gens.iter().position(|g| g.parts == parts);
        let n2 = second.dim();
        let mut map = Gf2Matrix::zero(target.dim(), first.dim() * n2);
        for (i, g1) in first.gens.iter().enumerate() {
            let (up, pp) = split(g1, m_parts);
            let Some(p) = index_of(&pp) else { continue };
            for (j, g2) in second.gens.iter().enumerate() {
                let qp = &g2.parts[..m_parts];
                let vp = &g2.parts[m_parts..];
                let Some(q) = index_of(qp) else { continue };
                for &a in action.get(&(p, q)).into_iter().flatten() {
                    let key = [up.as_slice(), &[(a_uid, a)], vp].concat();
                    if let Some(&row) = cod.get(key.as_slice()) {
                        map.toggle(row, i * n2 + j);
                    }
                }
            }
        }
        self.instance(u, m, v, first, second, target, map)
    }

    /// The join along the cap for `I`: `M` is the elementary type-A module
    /// at `ι_{I^c}` and `u⊠m ⊗ m^∨⊠v ↦ u⊠ι^∨⊠v`.
    pub fn join_elementary(&self, u: &Module, set: PairSet, v: &Module) -> Result<JoinInstance> {
        let m = crate::models::elementary_a(&self.am, set, crate::models::Hand::Left);
        let (first, second) = self.carriers(u, &m, v)?;
        let target = self.target(u, v)?;
        let cod = parts_index(&target);
        let iota = (self.alg.uid, self.am.idem_index(set.complement(self.am.rank())));
        let n2 = second.dim();
        let mut map = Gf2Matrix::zero(target.dim(), first.dim() * n2);
        for (i, g1) in first.gens.iter().enumerate() {
            let up = &g1.parts[..g1.parts.len() - 1];
            for (j, g2) in second.gens.iter().enumerate() {
                let key = [up, &[iota], &g2.parts[1..]].concat();
                if let Some(&row) = cod.get(key.as_slice()) {
                    map.toggle(row, i * n2 + j);
                }
            }
        }
        self.instance(u, &m, v, first, second, target, map)
    }

    /// `𝕀 ⊠ A ⊠ 𝕀 ⊠ M`, the type-D module that pairs with `M^∨` to form the
    /// double.
    pub fn double_partner(&self, m: &Module) -> Result<Module> {
        box_product(&box_product(&box_product(&self.dd, &self.alg)?, &self.dd)?, m)
    }

    /// The double `M^∨ ⊠ 𝕀 ⊠ A ⊠ 𝕀 ⊠ M` as a complex module.
    pub fn double_module(&self, m: &Module) -> Result<Module> {
        self.check_left_a(m)?;
        box_product(&dualize(m), &self.double_partner(m)?)
    }

    /// The diagonal element: generators `m_i^∨ ⊠ * ⊠ ι ⊠ * ⊠ m_i`.
    pub fn diagonal(&self, m: &Module, double: &Module) -> Gf2Vector {
        let k = m.gens.first().map_or(0, |g| g.parts.len());
        double
            .gens
            .iter()
            .enumerate()
            .filter(|(_, g)| {
                let p = &g.parts;
                let a = p[k + 1];
                p.len() == 2 * k + 3 && p[..k] == p[k + 3..] && a.0 == self.alg.uid && self.am.is_idempotent(a.1)
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// `W = 𝕀 ⊠ A^∨ ⊠ 𝕀 ⊠ A`, the source of `c_A`.
    pub fn cancel_source(&self) -> Result<Module> {
        box_product(&box_product(&box_product(&self.dd, &self.dual)?, &self.dd)?, &self.alg)
    }

    /// `c_A: 𝕀⊠A^∨⊠𝕀⊠A → 𝕀`, sending `*⊠a^∨⊠*⊠b` to `b ⊗ *` when `a` is
    /// an idempotent and to zero otherwise.
    pub fn cancel_ca(&self) -> Result<Morphism> {
        let w = Arc::new(self.cancel_source()?);
        let mut t = Table::new();
        for (i, g) in w.gens.iter().enumerate() {
            let (a, b) = (g.parts[1].1, g.parts[3].1);
            if self.am.is_idempotent(a) {
                let gen = self.da.gens.iter().position(|d| d.left == self.am.right_idem(b)).expect("all subsets");
                t.toggle(Key::bare(i), Term { left: Some(b), gen, right: None });
            }
        }
        Morphism::new(w, self.da.clone(), t)
    }

    /// Checks `(id_U ⊠ c_A ⊠ id) ∘ Ψ_M ∘ (· ⊗ Δ_M) = id` on `U ⊠ 𝕀 ⊠ M`.
    /// `U` is a right type-A module so that `U ⊠ 𝕀` is right type-D.
    pub fn join_identity_check(&self, u: &Module, m: &Module) -> Result<IdentityVerdict> {
        require_side(u, none, Side::is_a, "a right type-A module")?;
        self.check_left_a(m)?;
        let u1 = box_product(u, &self.dd)?;
        let partner = self.double_partner(m)?;
        let psi = self.join_general(&u1, m, &partner)?;
        let delta = self.diagonal(m, &psi.second);
        let n = box_product(&self.dd, m)?;
        let ca = self.cancel_ca()?;
        let f = induced(&induced(&ca, &n, Position::Left)?, u, Position::Right)?;
        let src = parts_index(&f.src);
        let fm = f.scalar_matrix();
        let c = &psi.first;
        let c_parts = parts_index(c);
        let u_parts = u.gens.first().map_or(0, |g| g.parts.len());
        let n2 = psi.second.dim();
        let mut composite = Gf2Matrix::zero(c.dim(), c.dim());
        for z in 0..c.dim() {
            let input: Gf2Vector = delta.iter().map(|j| z * n2 + j).collect();
            let out = psi.map.apply(&input);
            let moved: Gf2Vector = out
                .iter()
                .map(|r| {
                    src.get(psi.target.gens[r].parts.as_slice())
                        .copied()
                        .ok_or_else(|| Error::Incompatible("join output outside the cancellation source".into()))
                })
                .collect::<Result<_>>()?;
            for r in fm.apply(&moved).iter() {
                let p = &f.dst.gens[r].parts;
                let dropped = [&p[..u_parts], &p[u_parts + 1..]].concat();
                let row = c_parts
                    .get(dropped.as_slice())
                    .copied()
                    .ok_or_else(|| Error::Incompatible("cancelled output outside U⊠𝕀⊠M".into()))?;
                composite.toggle(row, z);
            }
        }
        Ok(IdentityVerdict { dim: c.dim(), is_identity: composite == Gf2Matrix::identity(c.dim()), composite })
    }

    /// The self-join of a type DD bimodule `X` along `M`: the map
    /// `M^∨⊠X⊠M → X ⊠ A^∨` (closed up) induced by `∇_M`. `M` must be
    /// DG-type, so each side of a term takes at most one algebra element.
    pub fn self_join(&self, x: &Module, m: &Module) -> Result<SelfJoin> {
        require_side(x, Side::is_d, Side::is_d, "a type DD bimodule")?;
        if !m.is_dg_type() {
            return Err(Error::NotDgType(m.name.clone()));
        }
        let nabla = self.nabla(m)?;
        let ext = &nabla.src;
        let domain_mod = box_product(&box_product(&dualize(m), x)?, m)?;
        let src = trace(x, ext)?;
        let dst = trace(x, &self.dual)?;
        let k = m.gens.first().map_or(0, |g| g.parts.len());
        let xk = x.gens.first().map_or(0, |g| g.parts.len());
        // q^∨ ⊠ x ⊠ p  <->  x ⊠ (p ⊗ q^∨)
        let dom_parts = parts_index(&domain_mod);
        let perm: Vec<usize> = src
            .gens
            .iter()
            .map(|g| {
                let (xp, rest) = g.parts.split_at(xk);
                let (pp, qp) = rest.split_at(k);
                let key = [qp, xp, pp].concat();
                dom_parts.get(key.as_slice()).copied().ok_or_else(|| Error::Incompatible("trace generator not in M^∨⊠X⊠M".into()))
            })
            .collect::<Result<_>>()?;
        let domain = domain_mod.complex()?;
        let mut d = Gf2Matrix::zero(src.dim(), src.dim());
        for (k2, terms) in src.table.iter() {
            for t in terms {
                d.toggle(perm[t.gen], perm[k2.gen]);
            }
        }
        if &d != domain.differential() {
            return Err(Error::Incompatible("closed-up carrier differs from M^∨⊠X⊠M".into()));
        }
        let mut map = Gf2Matrix::zero(dst.dim(), src.dim());
        let dst_idx: HashMap<(usize, usize), usize> = dst.gens.iter().enumerate().map(|(i, g)| (trace_origin(g), i)).collect();
        for (i, g) in src.gens.iter().enumerate() {
            let (xi, e) = trace_origin(g);
            for (kk, terms) in nabla.table.iter() {
                if kk.gen != e || kk.input_len() > 0 {
                    continue;
                }
                for t in terms {
                    if let Some(&row) = dst_idx.get(&(xi, t.gen)) {
                        map.toggle(row, perm[i]);
                    }
                }
            }
        }
        let codomain = dst.complex()?;
        let sj = SelfJoin { domain, codomain, domain_module: Arc::new(domain_mod), target: Arc::new(dst), map };
        if sj.codomain.differential().compose(&sj.map) != sj.map.compose(sj.domain.differential()) {
            return Err(Error::NotChainMap);
        }
        Ok(sj)
    }
}

/// Trace generators carry their factor indices in the label suffix.
fn trace_origin(g: &Gen) -> (usize, usize) {
    let (_, idx) = g.label.rsplit_once('#').expect("trace label");
    let (a, b) = idx.split_once(',').expect("trace label");
    (a.parse().expect("index"), b.parse().expect("index"))
}

/// `(id ⊠ c_A ⊠ id) ∘ Ψ ∘ (· ⊗ Δ)` as a matrix on `U⊠𝕀⊠M`.
#[derive(Clone, Debug)]
pub struct IdentityVerdict {
    pub dim: usize,
    pub is_identity: bool,
    pub composite: Gf2Matrix,
}

#[derive(Clone, Debug)]
pub struct SelfJoin {
    pub domain: ChainComplexGf2,
    pub codomain: ChainComplexGf2,
    pub domain_module: Arc<Module>,
    pub target: Arc<Module>,
    pub map: Gf2Matrix,
}

/// Closes up a type DD bimodule `x` against a DG-type bimodule `b` with type
/// A on both sides: generators `x ⊠ b` whose idempotents match around the
/// circle. A step of `x` with an idempotent on one side feeds the other
/// output to `b`; a step with both outputs idempotent acts as the identity.
pub fn trace(x: &Module, b: &Module) -> Result<Module> {
    let alg = match (&x.left, &x.right, &b.left, &b.right) {
        (Side::D(p), Side::D(q), Side::A(r), Side::A(s)) if Arc::ptr_eq(p, q) && p == r && p == s => p.clone(),
        _ => return Err(Error::Incompatible(format!("cannot close {} ({}) against {} ({})", x.name, x.kind(), b.name, b.kind()))),
    };
    if !b.is_dg_type() {
        return Err(Error::NotDgType(b.name.clone()));
    }
    let mut gens = Vec::new();
    let mut idx: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, g) in x.gens.iter().enumerate() {
        for (j, h) in b.gens.iter().enumerate() {
            if g.right == h.left && h.right == g.left {
                idx.insert((i, j), gens.len());
                gens.push(Gen {
                    label: format!("{}⊠{}#{i},{j}", g.label, h.label),
                    left: PairSet::EMPTY,
                    right: PairSet::EMPTY,
                    parts: [g.parts.as_slice(), h.parts.as_slice()].concat(),
                });
            }
        }
    }
    let mut pairs: Vec<(&(usize, usize), &usize)> = idx.iter().collect();
    pairs.sort();
    let mut t = Table::new();
    let emit = |from: usize, to: Option<&usize>, t: &mut Table| {
        if let Some(&to) = to {
            t.toggle(Key::bare(from), Term { left: None, gen: to, right: None });
        }
    };
    for (&(i, j), &g) in pairs {
        for (k, terms) in b.table.iter() {
            if k.gen == j && k.input_len() == 0 {
                for o in terms {
                    emit(g, idx.get(&(i, o.gen)), &mut t);
                }
            }
        }
        for (k, terms) in x.table.iter() {
            if k.gen != i {
                continue;
            }
            for o in terms {
                let (lo, ro) = (o.left.expect("left output"), o.right.expect("right output"));
                match (alg.is_idempotent(lo), alg.is_idempotent(ro)) {
                    (true, true) => emit(g, idx.get(&(o.gen, j)), &mut t),
                    (true, false) => {
                        if let Some(outs) = b.table.get(&Key { left: vec![ro], gen: j, right: vec![] }) {
                            for bo in outs {
                                emit(g, idx.get(&(o.gen, bo.gen)), &mut t);
                            }
                        }
                    }
                    (false, true) => {
                        if let Some(outs) = b.table.get(&Key { left: vec![], gen: j, right: vec![lo] }) {
                            for bo in outs {
                                emit(g, idx.get(&(o.gen, bo.gen)), &mut t);
                            }
                        }
                    }
                    (false, false) => {}
                }
            }
        }
    }
    let m = Module::unchecked(format!("tr({}⊠{})", x.name, b.name), Side::None, Side::None, gens, t);
    m.complex()?;
    Ok(m)
}

/// `∂∇_M = 0`.
pub fn nabla_is_cycle(j: &Joiner, m: &Module) -> Result<bool> {
    Ok(is_homomorphism(&j.nabla(m)?))
}

type Chain = BTreeSet<Vec<Part>>;

fn toggle(v: &mut Chain, p: Vec<Part>) {
    if !v.remove(&p) {
        v.insert(p);
    }
}

fn part_len(m: &Module) -> usize {
    m.gens.first().map_or(0, |g| g.parts.len())
}

impl JoinInstance {
    /// Images of a domain generator given by parts, as target parts.
    fn image(&self, index: &HashMap<Vec<Part>, usize>, parts: &[Part]) -> Result<Vec<Vec<Part>>> {
        let c = *index
            .get(parts)
            .ok_or_else(|| Error::Incompatible("generator outside the join domain".into()))?;
        Ok(self.map.column(c).iter().map(|r| self.target.gens[r].parts.clone()).collect())
    }

    fn domain_index(&self) -> HashMap<Vec<Part>, usize> {
        (0..self.domain.dim()).map(|i| (self.domain_parts(i), i)).collect()
    }
}

/// Applies `inst ⊗ id` (or `id ⊗ inst`) to a chain whose generators have
/// the instance's domain parts starting at `offset`.
fn apply_join(inst: &JoinInstance, offset: usize, input: &Chain) -> Result<Chain> {
    let index = inst.domain_index();
    let width = part_len(&inst.first) + part_len(&inst.second);
    let mut out = Chain::new();
    for p in input {
        let (head, rest) = p.split_at(offset);
        let (mid, tail) = rest.split_at(width);
        for img in inst.image(&index, mid)? {
            toggle(&mut out, [head, img.as_slice(), tail].concat());
        }
    }
    Ok(out)
}

/// Units and one-input actions of a DG-type left module, keyed by
/// (input generator, output generator).
fn dg_action(am: &AlgebraModel, m: &Module) -> Result<HashMap<(usize, usize), Vec<usize>>> {
    if !m.is_dg_type() {
        return Err(Error::NotDgType(m.name.clone()));
    }
    let mut action: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for p in 0..m.dim() {
        action.entry((p, p)).or_default().push(am.idem_index(m.gens[p].left));
    }
    for (k, terms) in m.table.iter() {
        if let [a] = k.left.as_slice() {
            for t in terms {
                action.entry((k.gen, t.gen)).or_default().push(*a);
            }
        }
    }
    Ok(action)
}

/// The three ways of joining `U⊠M`, `M^∨⊠X⊠N` and `N^∨⊠V`, each as a
/// chain-level map on the domain basis. `M` and `N` must be DG-type.
#[derive(Clone, Debug)]
pub struct Associativity {
    pub domain_dim: usize,
    pub first_then_second: Vec<Chain>,
    pub second_then_first: Vec<Chain>,
    pub simultaneous: Vec<Chain>,
}

impl Associativity {
    pub fn holds(&self) -> bool {
        self.first_then_second == self.second_then_first && self.second_then_first == self.simultaneous
    }
}

impl Joiner {
    pub fn associativity(&self, u: &Module, m: &Module, x: &Module, n: &Module, v: &Module) -> Result<Associativity> {
        require_side(x, Side::is_d, Side::is_d, "a type DD bimodule")?;
        let xn = box_product(x, n)?;
        let c1 = box_product(u, m)?;
        let c2 = box_product(&dualize(m), &xn)?;
        let c3 = box_product(&dualize(n), v)?;
        let (lu, lm, lx, ln) = (part_len(u), part_len(m), part_len(x), part_len(n));

        let j1 = self.join_general(u, m, &xn)?;
        let uax = box_product(&box_product(u, &self.dual)?, x)?;
        let j2 = self.join_general(&uax, n, v)?;

        let mdx = box_product(&dualize(m), x)?;
        let j3 = self.join_general(&mdx, n, v)?;
        let xbv = box_product(&box_product(x, &self.dual)?, v)?;
        let j4 = self.join_general(u, m, &xbv)?;

        let am_ = dg_action(&self.am, m)?;
        let an_ = dg_action(&self.am, n)?;
        let m_index = |p: &[Part]| m.gens.iter().position(|g| g.parts == p);
        let n_index = |p: &[Part]| n.gens.iter().position(|g| g.parts == p);

        let mut out = Associativity { domain_dim: 0, first_then_second: vec![], second_then_first: vec![], simultaneous: vec![] };
        for g1 in &c1.gens {
            for g2 in &c2.gens {
                for g3 in &c3.gens {
                    let parts = [g1.parts.as_slice(), &g2.parts, &g3.parts].concat();
                    let start: Chain = [parts.clone()].into_iter().collect();
                    out.first_then_second.push(apply_join(&j2, 0, &apply_join(&j1, 0, &start)?)?);
                    out.second_then_first.push(apply_join(&j4, 0, &apply_join(&j3, lu + lm, &start)?)?);
                    // [u, p, p', x, n, n', v]
                    let (up, rest) = parts.split_at(lu);
                    let (pp, rest) = rest.split_at(lm);
                    let (qp, rest) = rest.split_at(lm);
                    let (xp, rest) = rest.split_at(lx);
                    let (np, rest) = rest.split_at(ln);
                    let (op, vp) = rest.split_at(ln);
                    let mut sim = Chain::new();
                    if let (Some(p), Some(q), Some(a), Some(b)) = (m_index(pp), m_index(qp), n_index(np), n_index(op)) {
                        for &ea in am_.get(&(p, q)).into_iter().flatten() {
                            for &eb in an_.get(&(a, b)).into_iter().flatten() {
                                let t = [up, &[(self.alg.uid, ea)], xp, &[(self.alg.uid, eb)], vp].concat();
                                toggle(&mut sim, t);
                            }
                        }
                    }
                    out.simultaneous.push(sim);
                    out.domain_dim += 1;
                }
            }
        }
        let target = box_product(&box_product(&uax, &self.dual)?, v)?;
        let valid: BTreeSet<&[Part]> = target.gens.iter().map(|g| g.parts.as_slice()).collect();
        if out.simultaneous.iter().flatten().any(|p| !valid.contains(p.as_slice())) {
            return Err(Error::Incompatible("simultaneous join leaves the target carrier".into()));
        }
        Ok(out)
    }

    /// Compares the join of `(U, M, V)` with the join of the mirrored data
    /// `(V*, (M^∨)*, U*)` over the rotated algebra. `mirror` is a joiner over
    /// that algebra and `map` the basis bijection.
    pub fn symmetry(&self, mirror: &Joiner, map: &Arc<Vec<usize>>, u: &Module, m: &Module, v: &Module) -> Result<bool> {
        let flip = |a: &Arc<AlgebraModel>| -> (Arc<AlgebraModel>, Arc<Vec<usize>>) {
            debug_assert!(Arc::ptr_eq(a, &self.am));
            (mirror.am.clone(), map.clone())
        };
        let ur = oppositize(v, &flip);
        let mr = oppositize(&dualize(m), &flip);
        let vr = oppositize(u, &flip);
        let j = self.join_general(u, m, v)?;
        let jr = mirror.join_general(&ur, &mr, &vr)?;
        let (lu, lm, lv) = (part_len(u), part_len(m), part_len(v));
        let index = jr.domain_index();
        for c in 0..j.domain.dim() {
            let p = j.domain_parts(c);
            let (up, rest) = p.split_at(lu);
            let (pp, rest) = rest.split_at(lm);
            let (qp, vp) = rest.split_at(lm);
            let reflected = [vp, qp, pp, up].concat();
            let images: Chain = j
                .map
                .column(c)
                .iter()
                .map(|r| {
                    let t = &j.target.gens[r].parts;
                    let a = t[lu];
                    [&t[lu + 1..lu + 1 + lv], &[(mirror.alg.uid, map[a.1])], &t[..lu]].concat()
                })
                .collect();
            let mirrored: Chain = jr.image(&index, &reflected)?.into_iter().collect();
            if images != mirrored {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl Joiner {
    /// Self-join of `X = V ⊗ U` against the ordinary join of `U` and `V`:
    /// the two must agree once `q^∨⊠v⊠u⊠p` is read as `u⊠p ⊗ q^∨⊠v` and
    /// `v⊠u⊠a^∨` as `u⊠a^∨⊠v`.
    pub fn self_join_matches_join(&self, u: &Module, m: &Module, v: &Module) -> Result<bool> {
        let x = external_tensor(v, u)?;
        let s = self.self_join(&x, m)?;
        let j = self.join_general(u, m, v)?;
        let (lu, lm, lv) = (part_len(u), part_len(m), part_len(v));
        if s.map.rows() != j.map.rows() || s.map.cols() != j.map.cols() {
            return Ok(false);
        }
        let index = j.domain_index();
        for c in 0..s.domain.dim() {
            let p = &s.domain_module.gens[c].parts;
            let (qp, rest) = p.split_at(lm);
            let (vp, rest) = rest.split_at(lv);
            let (up, pp) = rest.split_at(lu);
            let ours: Chain = s
                .map
                .column(c)
                .iter()
                .map(|r| {
                    let t = &s.target.gens[r].parts;
                    [&t[lv..lv + lu], &t[lv + lu..], &t[..lv]].concat()
                })
                .collect();
            let theirs: Chain = j.image(&index, &[up, pp, qp, vp].concat())?.into_iter().collect();
            if ours != theirs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::*;
    use crate::models::{alg_one_sided, elementary_a, elementary_d, Hand};
    use crate::tensor::box_product;

    fn joiner(z: crate::ArcDiagram) -> Joiner {
        Joiner::new(Arc::new(AlgebraModel::new(&z).unwrap())).unwrap()
    }

    struct Family {
        us: Vec<Module>,
        ms: Vec<Module>,
        vs: Vec<Module>,
    }

    fn family(j: &Joiner) -> Family {
        let am = &j.am;
        let mut f = Family { us: vec![], ms: vec![], vs: vec![] };
        for s in PairSet::all(am.rank()) {
            f.us.push(elementary_d(am, s, Hand::Right));
            f.us.push(box_product(&alg_one_sided(am, s, Hand::Right), &j.dd).unwrap());
            f.vs.push(elementary_d(am, s, Hand::Left));
            f.vs.push(box_product(&j.dd, &alg_one_sided(am, s, Hand::Left)).unwrap());
            f.ms.push(elementary_a(am, s, Hand::Left));
            f.ms.push(alg_one_sided(am, s, Hand::Left));
        }
        f
    }

    #[test]
    fn nabla_of_elementary_is_the_unit() {
        let j = joiner(z1());
        let m = elementary_a(&j.am, PairSet::full(1), Hand::Left);
        let nb = j.nabla(&m).unwrap();
        assert_eq!(nb.table.len(), 1);
        let (k, t) = nb.table.iter().next().unwrap();
        assert_eq!(k.input_len(), 0);
        assert!(j.am.is_idempotent(t.iter().next().unwrap().gen));
    }

    #[test]
    fn nabla_and_diagonal_are_cycles() {
        for z in [z1(), z2()] {
            let j = joiner(z);
            for m in family(&j).ms {
                assert!(nabla_is_cycle(&j, &m).unwrap(), "{}", m.name);
                let dbl = j.double_module(&m).unwrap();
                let delta = j.diagonal(&m, &dbl);
                assert!(!delta.is_empty());
                assert!(dbl.complex().unwrap().differential().apply(&delta).is_empty(), "{}", m.name);
            }
        }
    }

    #[test]
    fn dropping_a_nabla_term_breaks_it() {
        let j = joiner(z1());
        let m = alg_one_sided(&j.am, PairSet::full(1), Hand::Left);
        let mut nb = j.nabla(&m).unwrap();
        let (k, t) = nb.table.iter().find(|(_, t)| t.iter().any(|x| !j.am.is_idempotent(x.gen))).map(|(k, t)| (k.clone(), *t.iter().next().unwrap())).unwrap();
        nb.table.toggle(k, t);
        assert!(!is_homomorphism(&nb));
    }

    #[test]
    fn diagonal_ignores_basis_order() {
        let j = joiner(z2());
        let m = alg_one_sided(&j.am, PairSet::full(2), Hand::Left);
        let n = m.dim();
        let perm: Vec<usize> = (0..n).rev().collect();
        let gens = perm.iter().map(|&i| m.gens[i].clone()).collect();
        let inv = |i: usize| n - 1 - i;
        let mut t = Table::new();
        for (k, terms) in m.table.iter() {
            for x in terms {
                t.toggle(Key { gen: inv(k.gen), ..k.clone() }, Term { gen: inv(x.gen), ..*x });
            }
        }
        let p = Module::new("perm", m.left.clone(), m.right.clone(), gens, t).unwrap();
        let collect = |m: &Module| -> BTreeSet<Vec<Part>> {
            let dbl = j.double_module(m).unwrap();
            j.diagonal(m, &dbl).iter().map(|i| dbl.gens[i].parts.clone()).collect()
        };
        assert_eq!(collect(&m), collect(&p));
    }

    #[test]
    fn cancellation_is_a_homomorphism() {
        for z in [z1(), z2()] {
            let j = joiner(z);
            let ca = j.cancel_ca().unwrap();
            assert!(is_homomorphism(&ca));
            let entries: Vec<(Key, Term)> = ca.table.iter().flat_map(|(k, t)| t.iter().map(move |x| (k.clone(), *x))).collect();
            let breaks = entries.iter().any(|(k, t)| {
                let mut broken = ca.clone();
                broken.table.toggle(k.clone(), *t);
                !is_homomorphism(&broken)
            });
            assert!(breaks);
        }
    }

    #[test]
    fn joins_agree_and_are_chain_maps() {
        for z in [z1(), z2()] {
            let j = joiner(z);
            let f = family(&j);
            let mut nonzero = 0;
            for u in &f.us {
                for m in &f.ms {
                    for v in &f.vs {
                        let g = j.join_general(u, m, v).unwrap();
                        assert!(g.is_chain_map());
                        assert_eq!(g.map, j.join_dg(u, m, v).unwrap().map);
                        nonzero += usize::from(!g.map.is_zero());
                    }
                }
            }
            assert!(nonzero > 0);
        }
    }

    #[test]
    fn elementary_join_examples() {
        let j = joiner(z1());
        let am = &j.am;
        for s in PairSet::all(1) {
            let u = elementary_d(am, s.complement(1), Hand::Right);
            let v = elementary_d(am, s.complement(1), Hand::Left);
            let e = j.join_elementary(&u, s, &v).unwrap();
            assert_eq!(e.domain.dim(), 1);
            let (row, col) = e.map.entries()[0];
            assert_eq!((e.map.entries().len(), col), (1, 0));
            assert!(e.target.gens[row].label.contains(&format!("i{}^", s.complement(1))));
            let m = elementary_a(am, s, Hand::Left);
            assert_eq!(e.map, j.join_general(&u, &m, &v).unwrap().map);
            let w = elementary_d(am, s, Hand::Left);
            assert_eq!(j.join_elementary(&u, s, &w).unwrap().domain.dim(), 0);
        }
    }

    #[test]
    fn dg_join_example_on_the_full_block() {
        let j = joiner(z1());
        let am = &j.am;
        let full = PairSet::full(1);
        let u = elementary_d(am, full, Hand::Right);
        let v = elementary_d(am, full, Hand::Left);
        let m = alg_one_sided(am, full, Hand::Left);
        let g = j.join_dg(&u, &m, &v).unwrap();
        // u⊠ι ⊗ ι^∨⊠v goes to u⊠ι^∨⊠v, and u⊠ι ⊗ σ^∨⊠v to u⊠σ^∨⊠v.
        assert_eq!((g.domain.dim(), g.codomain.dim()), (4, 2));
        assert_eq!(g.map.entries().len(), 3);
    }

    #[test]
    fn non_dg_modules_are_rejected() {
        let j = joiner(z1());
        let m = elementary_a(&j.am, PairSet::EMPTY, Hand::Left);
        let mut t = m.table.clone();
        t.toggle(Key { left: vec![0, 0], gen: 0, right: vec![] }, Term { left: None, gen: 0, right: None });
        let bad = Module::unchecked("long", m.left.clone(), m.right.clone(), m.gens.clone(), t);
        let u = elementary_d(&j.am, PairSet::full(1), Hand::Right);
        let v = elementary_d(&j.am, PairSet::full(1), Hand::Left);
        assert!(matches!(j.join_dg(&u, &bad, &v), Err(Error::NotDgType(_))));
    }

    #[test]
    fn identity_symmetry_self_join() {
        for z in [z1(), z2()] {
            let j = joiner(z);
            let (rot, map) = j.am.rotate180().unwrap();
            let jr = Joiner::new(Arc::new(rot)).unwrap();
            let map = Arc::new(map);
            let f = family(&j);
            for m in &f.ms {
                for s in PairSet::all(j.am.rank()) {
                    for u in [elementary_a(&j.am, s, Hand::Right), alg_one_sided(&j.am, s, Hand::Right)] {
                        assert!(j.join_identity_check(&u, m).unwrap().is_identity);
                    }
                }
                for u in &f.us {
                    for v in &f.vs {
                        assert!(j.symmetry(&jr, &map, u, m, v).unwrap());
                        assert!(j.self_join_matches_join(u, m, v).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn associativity_three_ways() {
        let j = joiner(z1());
        let f = family(&j);
        let am = &j.am;
        let mut xs = vec![j.dd.as_ref().clone()];
        for s in PairSet::all(1) {
            for t in PairSet::all(1) {
                xs.push(external_tensor(&elementary_d(am, s, Hand::Left), &elementary_d(am, t, Hand::Right)).unwrap());
            }
        }
        for u in &f.us {
            for m in &f.ms {
                for x in &xs {
                    for n in &f.ms {
                        for v in &f.vs {
                            assert!(j.associativity(u, m, x, n, v).unwrap().holds());
                        }
                    }
                }
            }
        }
        let j2 = joiner(z2());
        let f2 = family(&j2);
        let mut nonzero = 0;
        for u in f2.us.iter().step_by(2) {
            for m in &f2.ms {
                for n in f2.ms.iter().step_by(2) {
                    let v = &f2.vs[1];
                    let r = j2.associativity(u, m, &j2.dd, n, v).unwrap();
                    assert!(r.holds());
                    nonzero += r.first_then_second.iter().filter(|c| !c.is_empty()).count();
                }
            }
        }
        assert!(nonzero > 0);
    }
}
