//! Exact linear algebra over the two-element field.
//!
//! Vectors are sparse sets of basis indices; elimination runs on packed
//! bit rows with the pivot at the lowest set index, so results only depend
//! on the declared basis order.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};

/// A vector over GF(2): the set of basis indices with coefficient one.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vector {
    entries: BTreeSet<usize>,
}

impl Gf2Vector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(i);
        v
    }

    /// Adds `e_i`; a second toggle cancels the first.
    pub fn toggle(&mut self, i: usize) {
        if !self.entries.remove(&i) {
            self.entries.insert(i);
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.entries.contains(&i)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.iter().next_back().copied()
    }
}

impl FromIterator<usize> for Gf2Vector {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut v = Self::new();
        for i in iter {
            v.toggle(i);
        }
        v
    }
}

impl AddAssign<&Gf2Vector> for Gf2Vector {
    fn add_assign(&mut self, rhs: &Gf2Vector) {
        for i in rhs.iter() {
            self.toggle(i);
        }
    }
}

impl Add<&Gf2Vector> for Gf2Vector {
    type Output = Gf2Vector;
    fn add(mut self, rhs: &Gf2Vector) -> Gf2Vector {
        self += rhs;
        self
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.entries.iter()).finish()
    }
}

/// Packed bit row used inside elimination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct BitVec {
    words: Vec<u64>,
}

impl BitVec {
    pub(crate) fn zeros(n: usize) -> Self {
        BitVec {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub(crate) fn from_vector(n: usize, v: &Gf2Vector) -> Self {
        let mut b = Self::zeros(n);
        for i in v.iter() {
            b.flip(i);
        }
        b
    }

    pub(crate) fn to_vector(&self) -> Gf2Vector {
        let mut out = Gf2Vector::new();
        for (w, &word) in self.words.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let t = x.trailing_zeros() as usize;
                out.entries.insert(w * 64 + t);
                x &= x - 1;
            }
        }
        out
    }

    pub(crate) fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub(crate) fn xor(&mut self, other: &BitVec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Lowest set index at or above `from`.
    pub(crate) fn next_set(&self, from: usize) -> Option<usize> {
        let mut w = from / 64;
        if w >= self.words.len() {
            return None;
        }
        let mut word = self.words[w] & (!0u64 << (from % 64));
        loop {
            if word != 0 {
                return Some(w * 64 + word.trailing_zeros() as usize);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            word = self.words[w];
        }
    }
}

/// Incremental row echelon form with combination tracking.
///
/// Each stored row remembers which inserted tags it is a sum of, so a
/// reduction also reports how to write the input in terms of the tags.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    n: usize,
    tags: usize,
    rows: Vec<(BitVec, BitVec)>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub(crate) fn new(n: usize, tags: usize) -> Self {
        Echelon {
            n,
            tags,
            rows: Vec::new(),
            pivot_row: vec![None; n],
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Returns the remainder and the tag combination that was subtracted.
    pub(crate) fn reduce(&self, v: &BitVec) -> (BitVec, BitVec) {
        let mut rem = v.clone();
        let mut combo = BitVec::zeros(self.tags);
        let mut pos = 0;
        while let Some(p) = rem.next_set(pos) {
            match self.pivot_row[p] {
                Some(r) => {
                    rem.xor(&self.rows[r].0);
                    combo.xor(&self.rows[r].1);
                }
                None => pos = p + 1,
            }
        }
        (rem, combo)
    }

    /// Inserts `v` carrying `combo`; returns false if `v` was dependent.
    pub(crate) fn insert(&mut self, v: &BitVec, combo: BitVec) -> bool {
        let (rem, sub) = self.reduce(v);
        if rem.is_zero() {
            return false;
        }
        let mut c = combo;
        c.xor(&sub);
        let p = rem.next_set(0).expect("nonzero remainder");
        self.pivot_row[p] = Some(self.rows.len());
        self.rows.push((rem, c));
        true
    }

    pub(crate) fn dim(&self) -> usize {
        self.n
    }
}

/// A matrix over GF(2), stored by columns: column `j` is the image of `e_j`.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    columns: Vec<Gf2Vector>,
}

impl Gf2Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Gf2Matrix {
            rows,
            columns: vec![Gf2Vector::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Gf2Matrix {
            rows: n,
            columns: (0..n).map(Gf2Vector::unit).collect(),
        }
    }

    /// Builds a matrix from its columns; fails if an entry is out of range.
    pub fn from_columns(rows: usize, columns: Vec<Gf2Vector>) -> Result<Self> {
        for (j, c) in columns.iter().enumerate() {
            if let Some(r) = c.max_index() {
                if r >= rows {
                    return Err(Error::Dimension(format!(
                        "column {j} has row {r} but the matrix has {rows} rows"
                    )));
                }
            }
        }
        Ok(Gf2Matrix { rows, columns })
    }

    /// Builds a matrix from its rows.
    pub fn from_rows(cols: usize, rows: &[Gf2Vector]) -> Result<Self> {
        let mut m = Gf2Matrix::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for j in r.iter() {
                if j >= cols {
                    return Err(Error::Dimension(format!(
                        "row {i} has column {j} but the matrix has {cols} columns"
                    )));
                }
                m.columns[j].toggle(i);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &Gf2Vector {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.columns[j].contains(i)
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        assert!(i < self.rows, "row out of range");
        self.columns[j].toggle(i);
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Gf2Vector::is_empty)
    }

    pub fn apply(&self, x: &Gf2Vector) -> Gf2Vector {
        let mut out = Gf2Vector::new();
        for j in x.iter() {
            out += &self.columns[j];
        }
        out
    }

    /// The product `self * rhs`.
    pub fn compose(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.cols(), rhs.rows, "dimension mismatch in product");
        Gf2Matrix {
            rows: self.rows,
            columns: rhs.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add(&self, rhs: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!((self.rows, self.cols()), (rhs.rows, rhs.cols()));
        Gf2Matrix {
            rows: self.rows,
            columns: self
                .columns
                .iter()
                .zip(&rhs.columns)
                .map(|(a, b)| a.clone() + b)
                .collect(),
        }
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zero(self.cols(), self.rows);
        for (j, c) in self.columns.iter().enumerate() {
            for i in c.iter() {
                t.columns[i].toggle(j);
            }
        }
        t
    }

    /// Nonzero entries as `(row, col)` in column-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            out.extend(c.iter().map(|i| (i, j)));
        }
        out
    }

    fn column_echelon(&self) -> Echelon {
        let mut e = Echelon::new(self.rows, self.cols());
        for (j, c) in self.columns.iter().enumerate() {
            let mut tag = BitVec::zeros(self.cols());
            tag.flip(j);
            e.insert(&BitVec::from_vector(self.rows, c), tag);
        }
        e
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols())?;
        for i in 0..self.rows {
            let row: String = (0..self.cols())
                .map(|j| if self.get(i, j) { '1' } else { '.' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Rank over GF(2).
pub fn rank(m: &Gf2Matrix) -> usize {
    m.column_echelon().rank()
}

/// Some `x` with `m x = b`, if one exists.
pub fn solve(m: &Gf2Matrix, b: &Gf2Vector) -> Option<Gf2Vector> {
    if b.max_index().is_some_and(|r| r >= m.rows) {
        return None;
    }
    let e = m.column_echelon();
    let (rem, combo) = e.reduce(&BitVec::from_vector(m.rows, b));
    rem.is_zero().then(|| combo.to_vector())
}

/// An ungraded chain complex over GF(2) whose differential squares to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplexGf2 {
    labels: Vec<String>,
    d: Gf2Matrix,
}

impl ChainComplexGf2 {
    pub fn new(labels: Vec<String>, d: Gf2Matrix) -> Result<Self> {
        if d.rows() != labels.len() || d.cols() != labels.len() {
            return Err(Error::Dimension(format!(
                "differential is {}x{} on a basis of size {}",
                d.rows(),
                d.cols(),
                labels.len()
            )));
        }
        if !d.compose(&d).is_zero() {
            return Err(Error::NotAComplex);
        }
        Ok(ChainComplexGf2 { labels, d })
    }

    pub fn zero(labels: Vec<String>) -> Self {
        let n = labels.len();
        ChainComplexGf2 {
            labels,
            d: Gf2Matrix::zero(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn differential(&self) -> &Gf2Matrix {
        &self.d
    }

    /// Tensor product with differential `d ⊗ 1 + 1 ⊗ d`; basis `(i, j)` sits
    /// at index `i * other.dim() + j`.
    pub fn tensor(&self, other: &ChainComplexGf2) -> ChainComplexGf2 {
        let m = other.dim();
        let mut labels = Vec::with_capacity(self.dim() * m);
        for a in &self.labels {
            for b in &other.labels {
                labels.push(format!("{a} ⊗ {b}"));
            }
        }
        let mut d = Gf2Matrix::zero(labels.len(), labels.len());
        for i in 0..self.dim() {
            for j in 0..m {
                let col = i * m + j;
                for r in self.d.column(i).iter() {
                    d.toggle(r * m + j, col);
                }
                for r in other.d.column(j).iter() {
                    d.toggle(i * m + r, col);
                }
            }
        }
        ChainComplexGf2 { labels, d }
    }
}

/// Homology with chosen representatives and a way to classify cycles.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dimension: usize,
    pub representatives: Vec<Gf2Vector>,
    classifier: Echelon,
}

impl Homology {
    /// Coordinates of the class of `cycle` in the representative basis.
    pub fn classify(&self, cycle: &Gf2Vector) -> Option<Gf2Vector> {
        let n = self.classifier.dim();
        if cycle.max_index().is_some_and(|r| r >= n) {
            return None;
        }
        let (rem, combo) = self.classifier.reduce(&BitVec::from_vector(n, cycle));
        rem.is_zero().then(|| combo.to_vector())
    }
}

pub fn homology(c: &ChainComplexGf2) -> Homology {
    let n = c.dim();
    let d = &c.d;
    let mut image = Echelon::new(n, n);
    let mut kernel = Vec::new();
    for j in 0..n {
        let mut tag = BitVec::zeros(n);
        tag.flip(j);
        let col = BitVec::from_vector(n, d.column(j));
        let (rem, combo) = image.reduce(&col);
        if rem.is_zero() {
            let mut k = combo;
            k.flip(j);
            kernel.push(k);
        } else {
            image.insert(&col, tag);
        }
    }
    // Representatives: kernel vectors independent modulo the image. The
    // classifier tracks only representative tags.
    let mut classifier = Echelon::new(n, n);
    for j in 0..n {
        classifier.insert(&BitVec::from_vector(n, d.column(j)), BitVec::zeros(n));
    }
    let mut reps = Vec::new();
    for k in kernel {
        let mut tag = BitVec::zeros(n);
        tag.flip(reps.len());
        if classifier.insert(&k, tag) {
            reps.push(k.to_vector());
        }
    }
    let mut tags = Echelon::new(n, reps.len());
    // Shrink tag width to the number of representatives.
    for (v, t) in classifier.rows.drain(..) {
        let mut narrow = BitVec::zeros(reps.len());
        for i in t.to_vector().iter() {
            narrow.flip(i);
        }
        let p = v.next_set(0).expect("nonzero row");
        tags.pivot_row[p] = Some(tags.rows.len());
        tags.rows.push((v, narrow));
    }
    Homology {
        dimension: reps.len(),
        representatives: reps,
        classifier: tags,
    }
}

/// Matrix of the map induced by the chain map `f: src -> dst` in the chosen
/// representative bases.
pub fn induced_map_on_homology(
    f: &Gf2Matrix,
    src: &ChainComplexGf2,
    dst: &ChainComplexGf2,
) -> Result<Gf2Matrix> {
    if f.cols() != src.dim() || f.rows() != dst.dim() {
        return Err(Error::Dimension(format!(
            "map is {}x{} between complexes of size {} and {}",
            f.rows(),
            f.cols(),
            src.dim(),
            dst.dim()
        )));
    }
    if f.compose(src.differential()) != dst.differential().compose(f) {
        return Err(Error::NotChainMap);
    }
    let hs = homology(src);
    let hd = homology(dst);
    let mut cols = Vec::with_capacity(hs.dimension);
    for rep in &hs.representatives {
        let image = f.apply(rep);
        cols.push(hd.classify(&image).expect("image of a cycle is a cycle"));
    }
    Gf2Matrix::from_columns(hd.dimension, cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[usize]) -> Gf2Vector {
        xs.iter().copied().collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Gf2Matrix::zero(3, 3)), 0);
        assert_eq!(rank(&Gf2Matrix::identity(3)), 3);
        let m = Gf2Matrix::from_rows(3, &[v(&[0, 1]), v(&[1, 2]), v(&[0, 2])]).unwrap();
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn solve_examples() {
        assert_eq!(solve(&Gf2Matrix::identity(3), &v(&[0])), Some(v(&[0])));
        assert_eq!(solve(&Gf2Matrix::zero(3, 3), &v(&[0])), None);
        let m = Gf2Matrix::from_rows(2, &[v(&[0, 1])]).unwrap();
        let x = solve(&m, &v(&[0])).unwrap();
        assert_eq!(m.apply(&x), v(&[0]));
    }

    #[test]
    fn homology_examples() {
        let one = ChainComplexGf2::zero(vec!["x".into()]);
        assert_eq!(homology(&one).dimension, 1);
        let mut d = Gf2Matrix::zero(2, 2);
        d.toggle(1, 0);
        let pair = ChainComplexGf2::new(vec!["x".into(), "y".into()], d).unwrap();
        assert_eq!(homology(&pair).dimension, 0);
    }

    #[test]
    fn rejects_non_complex() {
        let mut d = Gf2Matrix::zero(2, 2);
        d.toggle(1, 0);
        d.toggle(0, 1);
        assert!(matches!(
            ChainComplexGf2::new(vec!["x".into(), "y".into()], d),
            Err(Error::NotAComplex)
        ));
    }

    #[test]
    fn induced_map_examples() {
        let c = ChainComplexGf2::zero(vec!["a".into(), "b".into()]);
        let id = induced_map_on_homology(&Gf2Matrix::identity(2), &c, &c).unwrap();
        assert_eq!(id, Gf2Matrix::identity(2));
        let z = induced_map_on_homology(&Gf2Matrix::zero(2, 2), &c, &c).unwrap();
        assert!(z.is_zero());

        let mut d = Gf2Matrix::zero(2, 2);
        d.toggle(1, 0);
        let pair = ChainComplexGf2::new(vec!["x".into(), "y".into()], d).unwrap();
        let one = ChainComplexGf2::zero(vec!["g".into()]);
        // x -> g, y -> 0 commutes with the differentials (both sides vanish);
        // y -> g does not, since f(d x) = g.
        let mut f = Gf2Matrix::zero(1, 2);
        f.toggle(0, 0);
        let induced = induced_map_on_homology(&f, &pair, &one).unwrap();
        assert_eq!((induced.rows(), induced.cols()), (1, 0));
        let mut f = Gf2Matrix::zero(1, 2);
        f.toggle(0, 1);
        assert!(matches!(
            induced_map_on_homology(&f, &pair, &one),
            Err(Error::NotChainMap)
        ));
    }

    fn arb_matrix(n: usize, m: usize) -> impl Strategy<Value = Gf2Matrix> {
        proptest::collection::vec(proptest::collection::btree_set(0..n, 0..n), m).prop_map(
            move |cols| {
                Gf2Matrix::from_columns(n, cols.into_iter().map(|c| c.into_iter().collect()).collect())
                    .unwrap()
            },
        )
    }

    /// Random complex: arrows only run from the "high" half to the "low"
    /// half of a random split, so `d^2 = 0` by construction.
    fn arb_complex() -> impl Strategy<Value = ChainComplexGf2> {
        (1usize..9, any::<u64>()).prop_map(|(n, seed)| {
            let mut s = seed;
            let mut next = || {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                s
            };
            let mut d = Gf2Matrix::zero(n, n);
            let low: Vec<bool> = (0..n).map(|_| next() % 2 == 0).collect();
            for j in 0..n {
                if low[j] {
                    continue;
                }
                for i in 0..n {
                    if low[i] && next() % 3 == 0 {
                        d.toggle(i, j);
                    }
                }
            }
            ChainComplexGf2::new((0..n).map(|i| format!("e{i}")).collect(), d).unwrap()
        })
    }

    proptest! {
        #[test]
        fn rank_is_permutation_invariant(m in arb_matrix(6, 5), shift in 0usize..5) {
            let cols: Vec<_> = (0..m.cols()).map(|j| m.column((j + shift) % m.cols()).clone()).collect();
            let p = Gf2Matrix::from_columns(m.rows(), cols).unwrap();
            prop_assert_eq!(rank(&m), rank(&p));
            prop_assert_eq!(rank(&m), rank(&m.transpose()));
        }

        #[test]
        fn solve_succeeds_on_consistent_systems(m in arb_matrix(5, 6), x in proptest::collection::btree_set(0usize..6, 0..6)) {
            let x: Gf2Vector = x.into_iter().collect();
            let b = m.apply(&x);
            let y = solve(&m, &b).expect("consistent system");
            prop_assert_eq!(m.apply(&y), b);
        }

        #[test]
        fn homology_dimension_formula(c in arb_complex()) {
            let h = homology(&c);
            let r = rank(c.differential());
            prop_assert_eq!(h.dimension, c.dim() - 2 * r);
            for rep in &h.representatives {
                prop_assert!(c.differential().apply(rep).is_empty());
            }
        }

        #[test]
        fn identity_induces_identity(c in arb_complex()) {
            let f = induced_map_on_homology(&Gf2Matrix::identity(c.dim()), &c, &c).unwrap();
            let h = homology(&c).dimension;
            prop_assert_eq!(f, Gf2Matrix::identity(h));
        }
    }
}
