//! Homology blocks of the algebra and of right modules, the products they
//! carry, and the same products recovered by gluing along caps.
//!
//! Bilinear maps `X ⊗ Y → Z` are matrices whose column `i * dim(Y) + j`
//! holds the image of the `i`th basis vector of `X` tensored with the `j`th
//! of `Y`. On homology the bases are the chosen representatives.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::ainf::{Key, Module, Side};
use crate::arc_diagram::PairSet;
use crate::error::{Error, Result};
use crate::gf2::{homology, ChainComplexGf2, Gf2Matrix, Gf2Vector};
use crate::join::{Joiner, Part};
use crate::models::{alg_one_sided, elementary_a, elementary_d, gamma_block, Hand};
use crate::strands::AlgebraModel;
use crate::tensor::{box_product, induced, Position};

pub type BlockTable = BTreeMap<(PairSet, PairSet), usize>;

/// Homology dimension of every block `ι_I·A·ι_J`, zero blocks included.
pub fn homology_blocks(am: &AlgebraModel) -> Result<BlockTable> {
    let k = am.rank();
    let mut out = BlockTable::new();
    for i in PairSet::all(k) {
        for j in PairSet::all(k) {
            out.insert((i, j), homology(&gamma_block(am, i, j)?).dimension);
        }
    }
    Ok(out)
}

/// The whole algebra as a chain complex.
pub fn algebra_complex(am: &AlgebraModel) -> Result<ChainComplexGf2> {
    let cols = (0..am.dim()).map(|x| am.diff_basis(x).clone()).collect();
    ChainComplexGf2::new((0..am.dim()).map(|i| am.describe(i)).collect(), Gf2Matrix::from_columns(am.dim(), cols)?)
}

fn block_indices(am: &AlgebraModel, from: PairSet, to: PairSet) -> Vec<usize> {
    (0..am.dim()).filter(|&x| am.left_idem(x) == from && am.right_idem(x) == to).collect()
}

/// A bilinear chain map on homology: representative classes are multiplied
/// at chain level and the product classified.
pub fn bilinear_on_homology(
    p: &Gf2Matrix,
    x: &ChainComplexGf2,
    y: &ChainComplexGf2,
    z: &ChainComplexGf2,
) -> Result<Gf2Matrix> {
    let xy = x.tensor(y);
    if p.cols() != xy.dim() || p.rows() != z.dim() {
        return Err(Error::Dimension(format!("bilinear map is {}x{}, expected {}x{}", p.rows(), p.cols(), z.dim(), xy.dim())));
    }
    if p.compose(xy.differential()) != z.differential().compose(p) {
        return Err(Error::NotChainMap);
    }
    let (hx, hy, hz) = (homology(x), homology(y), homology(z));
    let mut cols = Vec::with_capacity(hx.dimension * hy.dimension);
    for rx in &hx.representatives {
        for ry in &hy.representatives {
            let v: Gf2Vector = rx.iter().flat_map(|a| ry.iter().map(move |b| a * y.dim() + b)).collect();
            cols.push(hz.classify(&p.apply(&v)).expect("a bilinear chain map sends cycles to cycles"));
        }
    }
    Gf2Matrix::from_columns(hz.dimension, cols)
}

/// Chain-level multiplication `ι_I·A·ι_J ⊗ ι_J·A·ι_K → ι_I·A·ι_K` in the
/// bases of [`gamma_block`].
pub fn block_product(am: &AlgebraModel, i: PairSet, j: PairSet, k: PairSet) -> Gf2Matrix {
    let (x, y, z) = (block_indices(am, i, j), block_indices(am, j, k), block_indices(am, i, k));
    let pos: HashMap<usize, usize> = z.iter().enumerate().map(|(r, &c)| (c, r)).collect();
    let mut p = Gf2Matrix::zero(z.len(), x.len() * y.len());
    for (a, &u) in x.iter().enumerate() {
        for (b, &v) in y.iter().enumerate() {
            for c in am.mul_basis(u, v).iter() {
                p.toggle(pos[&c], a * y.len() + b);
            }
        }
    }
    p
}

/// Multiplication on homology blocks. Blocks with different middle subsets
/// multiply to zero, so only the matched case needs a matrix.
pub fn mu_h(am: &AlgebraModel, i: PairSet, j: PairSet, k: PairSet) -> Result<Gf2Matrix> {
    let (x, y, z) = (gamma_block(am, i, j)?, gamma_block(am, j, k)?, gamma_block(am, i, k)?);
    bilinear_on_homology(&block_product(am, i, j, k), &x, &y, &z)
}

/// `μ_H` on `H(ι_I A ι_J) ⊗ H(ι_J' A ι_K)`; zero unless `j == j2`.
pub fn mu_h_general(am: &AlgebraModel, (i, j): (PairSet, PairSet), (j2, k): (PairSet, PairSet)) -> Result<Gf2Matrix> {
    if j == j2 {
        return mu_h(am, i, j, k);
    }
    let h = |a, b| gamma_block(am, a, b).map(|c| homology(&c).dimension);
    Ok(Gf2Matrix::zero(h(i, k)?, h(i, j)? * h(j2, k)?))
}

/// Coordinates of `[ι_I]` in the representative basis of `H(ι_I A ι_I)`.
pub fn unit_class(am: &AlgebraModel, set: PairSet) -> Result<Gf2Vector> {
    let block = block_indices(am, set, set);
    let at = block.iter().position(|&x| x == am.idem_index(set)).expect("idempotent lies in its block");
    homology(&gamma_block(am, set, set)?)
        .classify(&Gf2Vector::unit(at))
        .ok_or_else(|| Error::Structure(format!("ι{set} is not a cycle")))
}

fn apply_bilinear(p: &Gf2Matrix, x: &Gf2Vector, y: &Gf2Vector, ny: usize) -> Gf2Vector {
    let v: Gf2Vector = x.iter().flat_map(|a| y.iter().map(move |b| a * ny + b)).collect();
    p.apply(&v)
}

/// `([x][y])[z] = [x]([y][z])` for all basis classes and all subsets.
pub fn mu_h_associative(am: &AlgebraModel) -> Result<bool> {
    let k = am.rank();
    let sets: Vec<PairSet> = PairSet::all(k).collect();
    let mut dims = HashMap::new();
    let mut mats = HashMap::new();
    for &a in &sets {
        for &b in &sets {
            dims.insert((a, b), homology(&gamma_block(am, a, b)?).dimension);
            for &c in &sets {
                mats.insert((a, b, c), mu_h(am, a, b, c)?);
            }
        }
    }
    for &a in &sets {
        for &b in &sets {
            for &c in &sets {
                for &d in &sets {
                    let (nab, nbc, ncd) = (dims[&(a, b)], dims[&(b, c)], dims[&(c, d)]);
                    for x in 0..nab {
                        for y in 0..nbc {
                            let xy = apply_bilinear(&mats[&(a, b, c)], &Gf2Vector::unit(x), &Gf2Vector::unit(y), nbc);
                            for z in 0..ncd {
                                let uz = Gf2Vector::unit(z);
                                let left = apply_bilinear(&mats[&(a, c, d)], &xy, &uz, ncd);
                                let yz = apply_bilinear(&mats[&(b, c, d)], &Gf2Vector::unit(y), &uz, ncd);
                                let right = apply_bilinear(&mats[&(a, b, d)], &Gf2Vector::unit(x), &yz, dims[&(b, d)]);
                                if left != right {
                                    return Ok(false);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// `[ι_I]` is a two-sided unit for every block it can multiply.
pub fn mu_h_unital(am: &AlgebraModel) -> Result<bool> {
    let k = am.rank();
    for i in PairSet::all(k) {
        let e = unit_class(am, i)?;
        let ni = homology(&gamma_block(am, i, i)?).dimension;
        for j in PairSet::all(k) {
            let n = homology(&gamma_block(am, i, j)?).dimension;
            let m = homology(&gamma_block(am, j, i)?).dimension;
            let left = mu_h(am, i, i, j)?;
            let right = mu_h(am, j, i, i)?;
            for x in 0..n {
                if apply_bilinear(&left, &e, &Gf2Vector::unit(x), n) != Gf2Vector::unit(x) {
                    return Ok(false);
                }
            }
            for x in 0..m {
                if apply_bilinear(&right, &Gf2Vector::unit(x), &e, ni) != Gf2Vector::unit(x) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One block `u·ι_I` of a right type-A module.
#[derive(Clone, Debug)]
pub struct BsaBlock {
    pub set: PairSet,
    pub complex: ChainComplexGf2,
    pub homology_dim: usize,
}

fn require_right_a(u: &Module) -> Result<&Arc<AlgebraModel>> {
    match (&u.left, &u.right) {
        (Side::None, Side::A(am)) => Ok(am),
        _ => Err(Error::Incompatible(format!("{} is {}, expected a right type-A module", u.name, u.kind()))),
    }
}

/// `u ⊠ x_I` for every subset, with its homology.
pub fn bsa_blocks(u: &Module) -> Result<Vec<BsaBlock>> {
    let am = require_right_a(u)?;
    PairSet::all(am.rank())
        .map(|set| {
            let complex = box_product(u, &elementary_d(am, set, Hand::Left))?.complex()?;
            let homology_dim = homology(&complex).dimension;
            Ok(BsaBlock { set, complex, homology_dim })
        })
        .collect()
}

fn right_block(u: &Module, set: PairSet) -> Vec<usize> {
    (0..u.dim()).filter(|&g| u.gens[g].right == set).collect()
}

/// The subcomplex of `u` on generators with right idempotent `set`.
pub fn restricted_block(u: &Module, set: PairSet) -> Result<ChainComplexGf2> {
    let ids = right_block(u, set);
    let pos: HashMap<usize, usize> = ids.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    let mut d = Gf2Matrix::zero(ids.len(), ids.len());
    for (c, &g) in ids.iter().enumerate() {
        for t in u.table.get(&Key::bare(g)).into_iter().flatten() {
            let r = pos.get(&t.gen).ok_or_else(|| Error::Structure("differential leaves its idempotent block".into()))?;
            d.toggle(*r, c);
        }
    }
    ChainComplexGf2::new(ids.iter().map(|&g| u.gens[g].label.clone()).collect(), d)
}

/// Chain-level `m_{1|1}`: `u·ι_I ⊗ ι_I A ι_J → u·ι_J` in the bases of
/// [`restricted_block`] and [`gamma_block`].
pub fn action_product(u: &Module, i: PairSet, j: PairSet) -> Result<Gf2Matrix> {
    let am = require_right_a(u)?;
    let (x, y, z) = (right_block(u, i), block_indices(am, i, j), right_block(u, j));
    let pos: HashMap<usize, usize> = z.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    let mut p = Gf2Matrix::zero(z.len(), x.len() * y.len());
    for (a, &g) in x.iter().enumerate() {
        for (b, &e) in y.iter().enumerate() {
            let col = a * y.len() + b;
            if am.is_idempotent(e) {
                p.toggle(pos[&g], col);
                continue;
            }
            let key = Key { left: vec![], gen: g, right: vec![e] };
            for t in u.table.get(&key).into_iter().flatten() {
                let r = pos.get(&t.gen).ok_or_else(|| Error::Structure("action leaves its idempotent block".into()))?;
                p.toggle(*r, col);
            }
        }
    }
    Ok(p)
}

/// The action on homology, `H(u·ι_I) ⊗ H(ι_I A ι_J) → H(u·ι_J)`.
pub fn m_h(u: &Module, i: PairSet, j: PairSet) -> Result<Gf2Matrix> {
    let am = require_right_a(u)?;
    let (x, y, z) = (restricted_block(u, i)?, gamma_block(am, i, j)?, restricted_block(u, j)?);
    bilinear_on_homology(&action_product(u, i, j)?, &x, &y, &z)
}

/// The product computed directly and through the cap gluing, in the same
/// bases, at chain level and on homology.
#[derive(Clone, Debug)]
pub struct GluedProduct {
    pub direct: Gf2Matrix,
    pub glued: Gf2Matrix,
    pub direct_homology: Gf2Matrix,
    pub glued_homology: Gf2Matrix,
}

impl GluedProduct {
    pub fn chain_level_equal(&self) -> bool {
        self.direct == self.glued
    }

    pub fn homology_equal(&self) -> bool {
        self.direct_homology == self.glued_homology
    }
}

fn parts_index(m: &Module) -> HashMap<&[Part], usize> {
    m.gens.iter().enumerate().map(|(i, g)| (g.parts.as_slice(), i)).collect()
}

fn missing(what: &str) -> Error {
    Error::Incompatible(format!("glued carrier does not match {what}"))
}

/// `m_H` through the gluing: join `(u⊠𝕀)⊠M_I` with `M_I^∨⊠𝕀⊠A⊠𝕀⊠M_J`
/// along the cap for `I`, cancel the `A^∨⊠𝕀⊠A` in the middle with `c_A`
/// and read the result in `u⊠𝕀⊠M_J`.
pub fn m_h_via_join(joiner: &Joiner, u: &Module, i: PairSet, j: PairSet) -> Result<GluedProduct> {
    let am = require_right_a(u)?;
    if !Arc::ptr_eq(am, &joiner.am) && **am != *joiner.am {
        return Err(Error::Incompatible("module and joiner use different algebras".into()));
    }
    let u1 = box_product(u, &joiner.dd)?;
    let mj = elementary_a(am, j, Hand::Left);
    let partner = joiner.double_partner(&mj)?;
    let psi = joiner.join_elementary(&u1, i, &partner)?;
    let n = box_product(&joiner.dd, &mj)?;
    let ca = joiner.cancel_ca()?;
    let f = induced(&induced(&ca, &n, Position::Left)?, u, Position::Right)?;
    let fm = f.scalar_matrix();
    let src = parts_index(&f.src);
    let out = box_product(&u1, &mj)?;
    let out_parts = parts_index(&out);
    let k = u.gens.first().map_or(0, |g| g.parts.len());
    let u_index = parts_index(u);

    // Carriers back to native bases: u generators and algebra elements.
    let (xs, ys, zs) = (right_block(u, i), block_indices(am, i, j), right_block(u, j));
    let xpos: HashMap<usize, usize> = xs.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    let ypos: HashMap<usize, usize> = ys.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    let zpos: HashMap<usize, usize> = zs.iter().enumerate().map(|(r, &g)| (g, r)).collect();
    let first: Vec<usize> = psi
        .first
        .gens
        .iter()
        .map(|g| u_index.get(&g.parts[..k]).and_then(|x| xpos.get(x).copied()).ok_or_else(|| missing("u·ι_I")))
        .collect::<Result<_>>()?;
    let second: Vec<usize> = psi
        .second
        .gens
        .iter()
        .map(|g| match g.parts.get(2) {
            Some(&(uid, a)) if uid == joiner.alg.uid => ypos.get(&a).copied().ok_or_else(|| missing("ι_I A ι_J")),
            _ => Err(missing("ι_I A ι_J")),
        })
        .collect::<Result<_>>()?;
    let third: Vec<usize> = out
        .gens
        .iter()
        .map(|g| u_index.get(&g.parts[..k]).and_then(|x| zpos.get(x).copied()).ok_or_else(|| missing("u·ι_J")))
        .collect::<Result<_>>()?;
    if first.len() != xs.len() || second.len() != ys.len() || third.len() != zs.len() {
        return Err(missing("the block sizes"));
    }

    let n2 = psi.second.dim();
    let mut glued = Gf2Matrix::zero(zs.len(), xs.len() * ys.len());
    for (a, &fa) in first.iter().enumerate() {
        for (b, &sb) in second.iter().enumerate() {
            let image = psi.map.apply(&Gf2Vector::unit(a * n2 + b));
            let moved: Gf2Vector = image
                .iter()
                .map(|r| src.get(psi.target.gens[r].parts.as_slice()).copied().ok_or_else(|| missing("the cancellation source")))
                .collect::<Result<_>>()?;
            for r in fm.apply(&moved).iter() {
                let p = &f.dst.gens[r].parts;
                let dropped = [&p[..k], &p[k + 1..]].concat();
                let row = out_parts.get(dropped.as_slice()).ok_or_else(|| missing("u⊠𝕀⊠M_J"))?;
                glued.toggle(third[*row], fa * ys.len() + sb);
            }
        }
    }

    let direct = action_product(u, i, j)?;
    let (x, y, z) = (restricted_block(u, i)?, gamma_block(am, i, j)?, restricted_block(u, j)?);
    let direct_homology = bilinear_on_homology(&direct, &x, &y, &z)?;
    let glued_homology = bilinear_on_homology(&glued, &x, &y, &z)?;
    Ok(GluedProduct { direct, glued, direct_homology, glued_homology })
}

/// `μ_H` through the gluing, taking `u = ι_I·A`. Its blocks `u·ι_J` are the
/// algebra blocks `ι_I A ι_J` in the same basis order.
pub fn mu_h_via_join(joiner: &Joiner, i: PairSet, j: PairSet, k: PairSet) -> Result<GluedProduct> {
    let u = alg_one_sided(&joiner.am, i, Hand::Right);
    let g = m_h_via_join(joiner, &u, j, k)?;
    let direct = block_product(&joiner.am, i, j, k);
    let direct_homology = mu_h(&joiner.am, i, j, k)?;
    if direct != g.direct || direct_homology != g.direct_homology {
        return Err(Error::Structure("ι_I·A blocks disagree with the algebra blocks".into()));
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::canonical::{z0, z1, z2};
    use crate::models::alg_as_aa;

    fn models() -> Vec<Arc<AlgebraModel>> {
        [z0(), z1(), z2()].iter().map(|z| Arc::new(AlgebraModel::new(z).unwrap())).collect()
    }

    fn set(am: &AlgebraModel, s: &str) -> PairSet {
        PairSet::parse(s, am.rank()).unwrap()
    }

    #[test]
    fn block_totals_match_the_algebra() {
        for am in models() {
            let blocks = homology_blocks(&am).unwrap();
            let total: usize = blocks.values().sum();
            assert_eq!(total, homology(&algebra_complex(&am).unwrap()).dimension);
        }
    }

    #[test]
    fn z1_blocks() {
        let am = &models()[1];
        let blocks = homology_blocks(am).unwrap();
        let (e, one) = (PairSet::EMPTY, set(am, "{1}"));
        assert_eq!(blocks[&(e, e)], 1);
        assert_eq!(blocks[&(one, one)], 2);
        assert_eq!(blocks.values().sum::<usize>(), 3);
    }

    #[test]
    fn z1_unit_times_sigma() {
        let am = &models()[1];
        let one = set(am, "{1}");
        let mu = mu_h(am, one, one, one).unwrap();
        // Both classes of the block times the unit are themselves.
        let e = unit_class(am, one).unwrap();
        for x in 0..2 {
            assert_eq!(apply_bilinear(&mu, &e, &Gf2Vector::unit(x), 2), Gf2Vector::unit(x));
        }
        let reps = homology(&gamma_block(am, one, one).unwrap()).representatives;
        let sigma = (0..2).find(|&x| Gf2Vector::unit(x) != e).unwrap();
        assert!(!reps[sigma].is_empty());
    }

    #[test]
    fn mismatched_middles_vanish() {
        let am = &models()[2];
        let (a, b) = (set(am, "{1}"), set(am, "{2}"));
        assert!(mu_h_general(am, (a, a), (b, b)).unwrap().is_zero());
        assert_eq!(mu_h_general(am, (a, b), (b, b)).unwrap(), mu_h(am, a, b, b).unwrap());
    }

    #[test]
    fn associative_and_unital() {
        for am in models() {
            assert!(mu_h_associative(&am).unwrap());
            assert!(mu_h_unital(&am).unwrap());
        }
    }

    #[test]
    fn glued_multiplication_matches() {
        for am in models() {
            let joiner = Joiner::new(am.clone()).unwrap();
            let mut nonzero = 0;
            for i in PairSet::all(am.rank()) {
                for j in PairSet::all(am.rank()) {
                    for k in PairSet::all(am.rank()) {
                        let g = mu_h_via_join(&joiner, i, j, k).unwrap();
                        assert!(g.chain_level_equal(), "{i} {j} {k}");
                        assert!(g.homology_equal(), "{i} {j} {k}");
                        nonzero += g.glued.entries().len();
                    }
                }
            }
            assert!(nonzero >= am.dim());
        }
    }

    #[test]
    fn glued_action_matches_for_other_modules() {
        for am in models() {
            let joiner = Joiner::new(am.clone()).unwrap();
            let mut us = vec![alg_one_sided(&am, PairSet::EMPTY, Hand::Right)];
            for s in PairSet::all(am.rank()) {
                us.push(elementary_a(&am, s, Hand::Right));
            }
            for u in &us {
                for i in PairSet::all(am.rank()) {
                    for j in PairSet::all(am.rank()) {
                        let g = m_h_via_join(&joiner, u, i, j).unwrap();
                        assert!(g.homology_equal(), "{} {i} {j}", u.name);
                        assert_eq!(g.direct_homology, m_h(u, i, j).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn bsa_blocks_partition_the_module() {
        for am in models() {
            let a = alg_as_aa(&am);
            let right = alg_one_sided(&am, PairSet::EMPTY, Hand::Right);
            let blocks = bsa_blocks(&right).unwrap();
            assert_eq!(blocks.iter().map(|b| b.complex.dim()).sum::<usize>(), right.dim());
            for b in &blocks {
                assert_eq!(b.complex.dim(), right_block(&right, b.set).len());
                assert_eq!(b.homology_dim, homology(&restricted_block(&right, b.set).unwrap()).dimension);
            }
            assert!(bsa_blocks(&a).is_err());
            let e = elementary_a(&am, PairSet::EMPTY, Hand::Right);
            let dims: Vec<usize> = bsa_blocks(&e).unwrap().iter().map(|b| b.homology_dim).collect();
            assert_eq!(dims.iter().sum::<usize>(), 1);
        }
    }

    #[test]
    fn idempotent_acts_as_identity() {
        for am in models() {
            for i in PairSet::all(am.rank()) {
                let u = alg_one_sided(&am, i, Hand::Right);
                for s in PairSet::all(am.rank()) {
                    let mh = m_h(&u, s, s).unwrap();
                    let e = unit_class(&am, s).unwrap();
                    let n = homology(&gamma_block(&am, s, s).unwrap()).dimension;
                    for x in 0..homology(&restricted_block(&u, s).unwrap()).dimension {
                        assert_eq!(apply_bilinear(&mh, &Gf2Vector::unit(x), &e, n), Gf2Vector::unit(x));
                    }
                }
            }
        }
    }
}
