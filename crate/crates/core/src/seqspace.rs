//! Eventually constant sequences in `c` and `c₀`, their signed-permutation
//! isometries, Euclidean block sums, and the invariant strictly convex norms
//! built on them.
//!
//! All radicands are exact rationals; only the final square roots carry an
//! enclosure radius.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::Vector;
use crate::numerics::{
    fmt_rational, pow2, rational_str, rational_vec, sqrt_at, CertReal, NumericsError, Precision,
    Rational,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SeqError {
    #[error("sequence has nonzero limit {0}; a c₀ element is required")]
    NonZeroTail(String),
    #[error("blocks of class {class} have lengths {expected} and {found}")]
    ClassLengthMismatch {
        class: u32,
        expected: usize,
        found: usize,
    },
    #[error("norm requires a {expected} vector")]
    WrongAmbient { expected: &'static str },
    #[error("block map {block} is not orthogonal")]
    NotOrthogonal { block: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("block {from} (class {from_class}) sent to block {to} (class {to_class})")]
    ClassNotPreserved {
        from: usize,
        to: usize,
        from_class: u32,
        to_class: u32,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, SeqError>;

fn quarter_power(i: usize) -> Rational {
    pow2(-2 * i as i64)
}

/// An eventually constant sequence `(x_1, …, x_k, t, t, …)`.
///
/// Positions are 1-based. The canonical form has no trailing prefix entry
/// equal to the tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CSeq {
    #[serde(with = "rational_vec")]
    prefix: Vec<Rational>,
    #[serde(with = "rational_str")]
    tail: Rational,
}

impl CSeq {
    pub fn new(mut prefix: Vec<Rational>, tail: Rational) -> Self {
        while prefix.last().is_some_and(|v| *v == tail) {
            prefix.pop();
        }
        CSeq { prefix, tail }
    }

    pub fn c0(prefix: Vec<Rational>) -> Self {
        CSeq::new(prefix, Rational::zero())
    }

    pub fn zero() -> Self {
        CSeq::c0(Vec::new())
    }

    pub fn constant(v: Rational) -> Self {
        CSeq::new(Vec::new(), v)
    }

    /// The unit vector `e_n`.
    pub fn unit(n: usize) -> Self {
        assert!(n >= 1, "positions are 1-based");
        let mut p = vec![Rational::zero(); n];
        p[n - 1] = Rational::one();
        CSeq::c0(p)
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn tail(&self) -> &Rational {
        &self.tail
    }

    pub fn is_c0(&self) -> bool {
        self.tail.is_zero()
    }

    pub fn get(&self, n: usize) -> &Rational {
        assert!(n >= 1, "positions are 1-based");
        self.prefix.get(n - 1).unwrap_or(&self.tail)
    }

    /// `x − lim(x)·𝟙`, an element of `c₀`.
    pub fn minus_limit(&self) -> CSeq {
        CSeq::c0(self.prefix.iter().map(|v| v - &self.tail).collect())
    }

    fn padded(&self, len: usize) -> Vec<Rational> {
        (1..=len).map(|n| self.get(n).clone()).collect()
    }
}

impl fmt::Display for CSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.prefix.iter().map(fmt_rational).collect();
        write!(f, "({}; tail {})", entries.join(", "), fmt_rational(&self.tail))
    }
}

impl Vector for CSeq {
    fn add(&self, other: &Self) -> Self {
        let n = self.prefix.len().max(other.prefix.len());
        CSeq::new(
            (1..=n).map(|i| self.get(i) + other.get(i)).collect(),
            &self.tail + &other.tail,
        )
    }

    fn scale(&self, c: &Rational) -> Self {
        CSeq::new(
            self.prefix.iter().map(|v| v * c).collect(),
            &self.tail * c,
        )
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let n = self.prefix.len().max(other.prefix.len());
        let mut a = self.padded(n);
        let mut b = other.padded(n);
        a.push(self.tail.clone());
        b.push(other.tail.clone());
        (a, b)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// `‖x‖_∞`, which is both the `c` and the `c₀` norm.
pub fn sup_norm(x: &CSeq) -> Rational {
    x.prefix
        .iter()
        .chain(std::iter::once(&x.tail))
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rational::zero)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn apply(self, q: &Rational) -> Rational {
        match self {
            Sign::Plus => q.clone(),
            Sign::Minus => -q,
        }
    }
}

/// A signed permutation `(π, f)` of `ℕ` with finite support, acting on `c` by
/// `(g·x)(n) = f(n)·x(π⁻¹(n))`.
///
/// `f` equals `tail_sign` off the finite set `sign_dev`, which is the
/// continuity of `f` at the limit point of `ℕ ∪ {∞}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IsoCElem {
    /// `n ↦ π(n)` on the points moved by `π`.
    perm: BTreeMap<usize, usize>,
    sign_dev: BTreeSet<usize>,
    tail_sign: Sign,
}

impl IsoCElem {
    pub fn identity() -> Self {
        IsoCElem {
            perm: BTreeMap::new(),
            sign_dev: BTreeSet::new(),
            tail_sign: Sign::Plus,
        }
    }

    /// Builds the element from disjoint cycles written as in `(1 2 5)`.
    pub fn from_cycles(
        cycles: &[Vec<usize>],
        sign_dev: impl IntoIterator<Item = usize>,
        tail_sign: Sign,
    ) -> Result<Self> {
        let mut perm = BTreeMap::new();
        for cycle in cycles {
            for (i, &a) in cycle.iter().enumerate() {
                let b = cycle[(i + 1) % cycle.len()];
                if a == 0 || perm.insert(a, b).is_some() {
                    return Err(SeqError::InvalidPermutation(format!(
                        "cycles {cycles:?} are not disjoint cycles on positive positions"
                    )));
                }
            }
        }
        perm.retain(|a, b| a != b);
        Self::from_map(perm, sign_dev, tail_sign)
    }

    /// Builds the element from its image list: position `i + 1` goes to `images[i]`.
    pub fn from_images(
        images: &[usize],
        sign_dev: impl IntoIterator<Item = usize>,
        tail_sign: Sign,
    ) -> Result<Self> {
        let perm = images
            .iter()
            .enumerate()
            .filter(|(i, &b)| i + 1 != b)
            .map(|(i, &b)| (i + 1, b))
            .collect();
        Self::from_map(perm, sign_dev, tail_sign)
    }

    fn from_map(
        perm: BTreeMap<usize, usize>,
        sign_dev: impl IntoIterator<Item = usize>,
        tail_sign: Sign,
    ) -> Result<Self> {
        let domain: BTreeSet<usize> = perm.keys().copied().collect();
        let range: BTreeSet<usize> = perm.values().copied().collect();
        if domain != range || range.len() != perm.len() {
            return Err(SeqError::InvalidPermutation(format!(
                "{perm:?} is not a bijection of its support"
            )));
        }
        let sign_dev: BTreeSet<usize> = sign_dev.into_iter().collect();
        if sign_dev.contains(&0) {
            return Err(SeqError::InvalidPermutation(
                "sign deviation at position 0".into(),
            ));
        }
        Ok(IsoCElem {
            perm,
            sign_dev,
            tail_sign,
        })
    }

    pub fn tail_sign(&self) -> Sign {
        self.tail_sign
    }

    pub fn sign_at(&self, n: usize) -> Sign {
        if self.sign_dev.contains(&n) {
            self.tail_sign.flip()
        } else {
            self.tail_sign
        }
    }

    pub fn image(&self, n: usize) -> usize {
        self.perm.get(&n).copied().unwrap_or(n)
    }

    pub fn preimage(&self, n: usize) -> usize {
        self.perm
            .iter()
            .find(|(_, &b)| b == n)
            .map(|(&a, _)| a)
            .unwrap_or(n)
    }

    /// Largest position at which the element differs from `x ↦ tail_sign·x`.
    pub fn support_max(&self) -> usize {
        let p = self.perm.keys().next_back().copied().unwrap_or(0);
        let s = self.sign_dev.iter().next_back().copied().unwrap_or(0);
        p.max(s)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IsoCElem) -> IsoCElem {
        let n = self.support_max().max(other.support_max());
        let mut perm = BTreeMap::new();
        let mut sign_dev = BTreeSet::new();
        let tail_sign = self.tail_sign.times(other.tail_sign);
        for m in 1..=n {
            let img = self.image(other.image(m));
            if img != m {
                perm.insert(m, img);
            }
            let s = self.sign_at(m).times(other.sign_at(self.preimage(m)));
            if s != tail_sign {
                sign_dev.insert(m);
            }
        }
        IsoCElem {
            perm,
            sign_dev,
            tail_sign,
        }
    }

    pub fn inverse(&self) -> IsoCElem {
        let perm = self.perm.iter().map(|(&a, &b)| (b, a)).collect();
        let n = self.support_max();
        let sign_dev = (1..=n)
            .filter(|&m| self.sign_at(self.image(m)) != self.tail_sign)
            .collect();
        IsoCElem {
            perm,
            sign_dev,
            tail_sign: self.tail_sign,
        }
    }
}

/// `(g·x)(n) = sign(n)·x(π⁻¹(n))`.
pub fn act_c(g: &IsoCElem, x: &CSeq) -> CSeq {
    let n = x.prefix.len().max(g.support_max());
    CSeq::new(
        (1..=n)
            .map(|m| g.sign_at(m).apply(x.get(g.preimage(m))))
            .collect(),
        g.tail_sign.apply(&x.tail),
    )
}

/// The element rearranging `x` so that `|x|` becomes nonincreasing.
pub fn sorting_element(x: &CSeq) -> IsoCElem {
    let mut order: Vec<usize> = (1..=x.prefix.len()).collect();
    order.sort_by_key(|&a| std::cmp::Reverse(x.get(a).abs()));
    let mut images = vec![0; order.len()];
    for (pos, &src) in order.iter().enumerate() {
        images[src - 1] = pos + 1;
    }
    IsoCElem::from_images(&images, [], Sign::Plus).unwrap_or_else(|_| IsoCElem::identity())
}

/// Exact parts `(‖x‖_∞, Σ x_i²/4^i)` of the weighted norm, without sorting.
pub fn weighted_parts(x: &CSeq) -> Result<(Rational, Rational)> {
    if !x.is_c0() {
        return Err(SeqError::NonZeroTail(fmt_rational(&x.tail)));
    }
    let radicand = x
        .prefix
        .iter()
        .enumerate()
        .map(|(i, v)| v * v * quarter_power(i + 1))
        .sum();
    Ok((sup_norm(x), radicand))
}

/// `‖x‖_∞ + (Σ x_i²/4^i)^{1/2}`: the strictly convex base norm, not invariant.
pub fn weighted_sc_norm(x: &CSeq, prec: Precision) -> Result<CertReal> {
    let (sup, radicand) = weighted_parts(x)?;
    Ok(CertReal::exact(sup) + sqrt_at(&radicand, prec)?)
}

/// Exact parts `(‖x‖_∞, Σ y_i²/4^i)` with `y` the nonincreasing rearrangement of `|x|`.
pub fn sorted_sc_parts(x: &CSeq) -> Result<(Rational, Rational)> {
    if !x.is_c0() {
        return Err(SeqError::NonZeroTail(fmt_rational(&x.tail)));
    }
    let mut mags: Vec<Rational> = x.prefix.iter().map(Signed::abs).collect();
    mags.sort_by(|a, b| b.cmp(a));
    let radicand = mags
        .iter()
        .enumerate()
        .map(|(i, v)| v * v * quarter_power(i + 1))
        .sum();
    Ok((sup_norm(x), radicand))
}

/// The `Iso(c₀)`-invariant strictly convex norm: the weighted norm of the
/// decreasing rearrangement, i.e. the supremum of the weighted norm over the
/// group, attained by [`sorting_element`].
pub fn sorted_sc_norm(x: &CSeq, prec: Precision) -> Result<CertReal> {
    let (sup, radicand) = sorted_sc_parts(x)?;
    Ok(CertReal::exact(sup) + sqrt_at(&radicand, prec)?)
}

/// Image of `x ∈ c` in `c₀ ⊕_{ℓ₂} ℝ` under `x ↦ (x − lim x) ⊕ lim x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CSplit {
    pub c0: CSeq,
    #[serde(with = "rational_str")]
    pub limit: Rational,
}

impl Vector for CSplit {
    fn add(&self, other: &Self) -> Self {
        CSplit {
            c0: self.c0.add(&other.c0),
            limit: &self.limit + &other.limit,
        }
    }

    fn scale(&self, c: &Rational) -> Self {
        CSplit {
            c0: self.c0.scale(c),
            limit: &self.limit * c,
        }
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let (mut a, mut b) = self.c0.common_coords(&other.c0);
        a.push(self.limit.clone());
        b.push(other.limit.clone());
        (a, b)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

pub fn c_split(x: &CSeq) -> CSplit {
    CSplit {
        c0: x.minus_limit(),
        limit: x.tail.clone(),
    }
}

/// Action on `c₀ ⊕ ℝ`: the signed permutation on the first summand, the tail
/// sign on the second.
pub fn act_csplit(g: &IsoCElem, s: &CSplit) -> CSplit {
    CSplit {
        c0: act_c(g, &s.c0),
        limit: g.tail_sign.apply(&s.limit),
    }
}

/// `(sorted_sc_norm(c0)² + limit²)^{1/2}`.
pub fn csplit_norm(s: &CSplit, prec: Precision) -> Result<CertReal> {
    let inner = sorted_sc_norm(&s.c0, prec)?.square();
    let total = inner + CertReal::exact(&s.limit * &s.limit);
    Ok(total.sqrt(prec)?)
}

/// `‖x‖_c + ‖(x − lim x) ⊕ lim x‖`, the norm on `c` assembled from the split map.
pub fn c_renorm(x: &CSeq, prec: Precision) -> Result<CertReal> {
    Ok(CertReal::exact(sup_norm(x)) + csplit_norm(&c_split(x), prec)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ambient {
    C0Sum,
    L1Sum,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub class_id: u32,
    #[serde(with = "rational_vec")]
    pub coords: Vec<Rational>,
}

impl Block {
    pub fn new(class_id: u32, coords: Vec<Rational>) -> Self {
        Block { class_id, coords }
    }

    pub fn sq_norm(&self) -> Rational {
        self.coords.iter().map(|q| q * q).sum()
    }
}

/// A finitely supported element of a `c₀`- or `ℓ₁`-sum of Euclidean spaces.
///
/// Blocks sharing a `class_id` are isometric summands and so must have equal
/// dimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockVec {
    blocks: Vec<Block>,
    ambient: Ambient,
}

impl BlockVec {
    pub fn new(blocks: Vec<Block>, ambient: Ambient) -> Result<Self> {
        let mut dims: BTreeMap<u32, usize> = BTreeMap::new();
        for b in &blocks {
            let d = *dims.entry(b.class_id).or_insert(b.coords.len());
            if d != b.coords.len() {
                return Err(SeqError::ClassLengthMismatch {
                    class: b.class_id,
                    expected: d,
                    found: b.coords.len(),
                });
            }
        }
        Ok(BlockVec { blocks, ambient })
    }

    /// `ℓ₁ = ⊕_{ℓ₁} ℝ`: one-dimensional blocks of a single class.
    pub fn scalars(values: Vec<Rational>, ambient: Ambient) -> Self {
        BlockVec {
            blocks: values.into_iter().map(|v| Block::new(0, vec![v])).collect(),
            ambient,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn layout(&self) -> Vec<(u32, usize)> {
        self.blocks
            .iter()
            .map(|b| (b.class_id, b.coords.len()))
            .collect()
    }

    pub fn block_sq_norms(&self) -> Vec<Rational> {
        self.blocks.iter().map(Block::sq_norm).collect()
    }

    fn same_layout(&self, other: &BlockVec) -> bool {
        self.ambient == other.ambient && self.layout() == other.layout()
    }
}

impl Vector for BlockVec {
    fn add(&self, other: &Self) -> Self {
        assert!(self.same_layout(other), "block layout mismatch");
        BlockVec {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| {
                    Block::new(
                        a.class_id,
                        a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect(),
                    )
                })
                .collect(),
            ambient: self.ambient,
        }
    }

    fn scale(&self, c: &Rational) -> Self {
        BlockVec {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block::new(b.class_id, b.coords.iter().map(|x| x * c).collect()))
                .collect(),
            ambient: self.ambient,
        }
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        assert!(self.same_layout(other), "block layout mismatch");
        let flat = |v: &BlockVec| -> Vec<Rational> {
            v.blocks.iter().flat_map(|b| b.coords.iter().cloned()).collect()
        };
        (flat(self), flat(other))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// Exact parts `(max_i ‖x_i‖², Σ ‖x_{s(i)}‖²/4^i)` where blocks are sorted by
/// decreasing norm inside each isometry class, occupying that class's positions.
pub fn c0sum_parts(v: &BlockVec) -> Result<(Rational, Rational)> {
    if v.ambient != Ambient::C0Sum {
        return Err(SeqError::WrongAmbient { expected: "C0SUM" });
    }
    let sq = v.block_sq_norms();
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, b) in v.blocks.iter().enumerate() {
        by_class.entry(b.class_id).or_default().push(i);
    }
    let mut radicand = Rational::zero();
    for positions in by_class.values() {
        let mut norms: Vec<&Rational> = positions.iter().map(|&i| &sq[i]).collect();
        norms.sort_by(|a, b| b.cmp(a));
        for (&pos, n) in positions.iter().zip(norms) {
            radicand += n * quarter_power(pos + 1);
        }
    }
    let max_sq = sq.into_iter().max().unwrap_or_else(Rational::zero);
    Ok((max_sq, radicand))
}

/// Supremum of the Euclidean block norms, the `c₀`-sum norm.
pub fn c0sum_base_norm(v: &BlockVec, prec: Precision) -> Result<CertReal> {
    let max_sq = v
        .block_sq_norms()
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(sqrt_at(&max_sq, prec)?)
}

pub fn c0sum_sorted_norm(v: &BlockVec, prec: Precision) -> Result<CertReal> {
    let (max_sq, radicand) = c0sum_parts(v)?;
    Ok(sqrt_at(&max_sq, prec)? + sqrt_at(&radicand, prec)?)
}

/// `Σ ‖x_n‖₂`, the `ℓ₁`-sum norm.
pub fn l1sum_base_norm(v: &BlockVec, prec: Precision) -> Result<CertReal> {
    v.block_sq_norms()
        .iter()
        .map(|s| sqrt_at(s, prec).map_err(SeqError::from))
        .sum()
}

/// `Σ ‖x_n‖₂ + (Σ ‖x_n‖₂²)^{1/2}`.
pub fn l1sum_sc_norm(v: &BlockVec, prec: Precision) -> Result<CertReal> {
    if v.ambient != Ambient::L1Sum {
        return Err(SeqError::WrongAmbient { expected: "L1SUM" });
    }
    let l2_sq: Rational = v.block_sq_norms().into_iter().sum();
    Ok(l1sum_base_norm(v, prec)? + sqrt_at(&l2_sq, prec)?)
}

/// Square rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatMatrix {
    n: usize,
    #[serde(with = "rational_vec")]
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(SeqError::ShapeMismatch(format!(
                "{} entries for a {n}×{n} matrix",
                entries.len()
            )));
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::one();
        }
        RatMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        let n = self.n;
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = (0..n).map(|k| self.at(i, k) * other.at(k, j)).sum();
            }
        }
        RatMatrix { n, entries }
    }

    pub fn transpose(&self) -> RatMatrix {
        let n = self.n;
        let mut entries = vec![Rational::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.at(i, j).clone();
            }
        }
        RatMatrix { n, entries }
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    /// `QᵀQ = I`, checked exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self) == RatMatrix::identity(self.n)
    }

    /// Inverse by Gauss–Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = RatMatrix::identity(n).entries;
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r * n + col].is_zero())?;
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
                inv.swap(col * n + k, pivot * n + k);
            }
            let p = a[col * n + col].clone();
            for k in 0..n {
                a[col * n + k] /= &p;
                inv[col * n + k] /= &p;
            }
            for r in 0..n {
                if r != col && !a[r * n + col].is_zero() {
                    let f = a[r * n + col].clone();
                    for k in 0..n {
                        let (ak, ik) = (a[col * n + k].clone(), inv[col * n + k].clone());
                        a[r * n + k] -= &f * ak;
                        inv[r * n + k] -= &f * ik;
                    }
                }
            }
        }
        Some(RatMatrix { n, entries: inv })
    }

    /// Cayley transform `(I − A)(I + A)⁻¹` of a skew-symmetric `A`: a rational
    /// orthogonal matrix.
    pub fn cayley(skew: &RatMatrix) -> Option<RatMatrix> {
        let n = skew.n;
        let id = RatMatrix::identity(n);
        let combine = |s: i32| RatMatrix {
            n,
            entries: id
                .entries
                .iter()
                .zip(&skew.entries)
                .map(|(i, a)| if s > 0 { i + a } else { i - a })
                .collect(),
        };
        let plus_inv = combine(1).inverse()?;
        Some(combine(-1).mul(&plus_inv))
    }
}

/// An isometry of a block sum: blocks are permuted within their class and each
/// is rotated by a rational orthogonal matrix. Block `i` is sent to position
/// `class_perm[i]` after applying `block_maps[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockIso {
    class_perm: Vec<usize>,
    block_maps: Vec<RatMatrix>,
}

impl BlockIso {
    pub fn new(
        class_perm: Vec<usize>,
        block_maps: Vec<RatMatrix>,
        layout: &[(u32, usize)],
    ) -> Result<Self> {
        let n = layout.len();
        if class_perm.len() != n || block_maps.len() != n {
            return Err(SeqError::ShapeMismatch(format!(
                "{} blocks, {} targets, {} maps",
                n,
                class_perm.len(),
                block_maps.len()
            )));
        }
        let targets: BTreeSet<usize> = class_perm.iter().copied().collect();
        if targets.len() != n || targets.iter().any(|&t| t >= n) {
            return Err(SeqError::InvalidPermutation(format!("{class_perm:?}")));
        }
        for (i, &t) in class_perm.iter().enumerate() {
            if layout[i].0 != layout[t].0 {
                return Err(SeqError::ClassNotPreserved {
                    from: i,
                    to: t,
                    from_class: layout[i].0,
                    to_class: layout[t].0,
                });
            }
        }
        for (i, q) in block_maps.iter().enumerate() {
            if q.dim() != layout[i].1 {
                return Err(SeqError::ShapeMismatch(format!(
                    "block {i} has dimension {} but its map is {}×{}",
                    layout[i].1,
                    q.dim(),
                    q.dim()
                )));
            }
            if !q.is_orthogonal() {
                return Err(SeqError::NotOrthogonal { block: i });
            }
        }
        Ok(BlockIso {
            class_perm,
            block_maps,
        })
    }

    pub fn identity(layout: &[(u32, usize)]) -> Self {
        BlockIso {
            class_perm: (0..layout.len()).collect(),
            block_maps: layout.iter().map(|&(_, d)| RatMatrix::identity(d)).collect(),
        }
    }
}

pub fn act_blocks(g: &BlockIso, v: &BlockVec) -> Result<BlockVec> {
    if g.class_perm.len() != v.blocks.len() {
        return Err(SeqError::ShapeMismatch(format!(
            "isometry on {} blocks applied to {} blocks",
            g.class_perm.len(),
            v.blocks.len()
        )));
    }
    let mut out = v.blocks.clone();
    for (i, b) in v.blocks.iter().enumerate() {
        let q = &g.block_maps[i];
        if q.dim() != b.coords.len() {
            return Err(SeqError::ShapeMismatch(format!("block {i}")));
        }
        let t = g.class_perm[i];
        if v.blocks[t].class_id != b.class_id {
            return Err(SeqError::ClassNotPreserved {
                from: i,
                to: t,
                from_class: b.class_id,
                to_class: v.blocks[t].class_id,
            });
        }
        out[t] = Block::new(b.class_id, q.apply(&b.coords));
    }
    Ok(BlockVec {
        blocks: out,
        ambient: v.ambient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{cert_sqrt, int, rat, CertOrdering};

    fn p() -> Precision {
        Precision::default_start()
    }

    fn seq(v: &[i64]) -> CSeq {
        CSeq::c0(v.iter().map(|&a| int(a)).collect())
    }

    #[test]
    fn canonical_form_trims_tail() {
        let x = CSeq::new(vec![int(3), int(1), int(1)], int(1));
        assert_eq!(x.prefix(), &[int(3)]);
        assert_eq!(x, CSeq::new(vec![int(3)], int(1)));
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(sup_norm(&CSeq::new(vec![int(3), int(-1)], int(1))), int(3));
        assert_eq!(sup_norm(&CSeq::zero()), int(0));
        assert_eq!(sup_norm(&CSeq::new(vec![rat(1, 2)], int(-2))), int(2));
    }

    #[test]
    fn act_c_examples() {
        let swap = IsoCElem::from_cycles(&[vec![1, 2]], [], Sign::Plus).unwrap();
        assert_eq!(act_c(&swap, &seq(&[5, 7])), seq(&[7, 5]));
        let flip1 = IsoCElem::from_cycles(&[], [1], Sign::Plus).unwrap();
        let one = CSeq::constant(int(1));
        assert_eq!(act_c(&flip1, &one), CSeq::new(vec![int(-1)], int(1)));
        let x = CSeq::new(vec![int(2), rat(-1, 3)], int(4));
        assert_eq!(act_c(&IsoCElem::identity(), &x), x);
    }

    #[test]
    fn act_c_tail_and_norm() {
        let g = IsoCElem::from_cycles(&[vec![1, 3, 2]], [2, 5], Sign::Minus).unwrap();
        let x = CSeq::new(vec![int(1), int(-6), rat(1, 2)], int(3));
        let y = act_c(&g, &x);
        assert_eq!(*y.tail(), int(-3));
        assert_eq!(sup_norm(&y), sup_norm(&x));
    }

    #[test]
    fn compose_and_inverse_agree_with_action() {
        let g = IsoCElem::from_cycles(&[vec![1, 3, 2]], [2, 5], Sign::Minus).unwrap();
        let h = IsoCElem::from_cycles(&[vec![2, 4]], [1], Sign::Plus).unwrap();
        let x = CSeq::new(vec![int(1), int(-6), rat(1, 2), int(7), int(9)], int(3));
        assert_eq!(act_c(&g.compose(&h), &x), act_c(&g, &act_c(&h, &x)));
        assert_eq!(act_c(&g.inverse(), &act_c(&g, &x)), x);
        assert_eq!(g.compose(&g.inverse()), IsoCElem::identity());
    }

    #[test]
    fn invalid_cycles_rejected() {
        assert!(IsoCElem::from_cycles(&[vec![1, 2], vec![2, 3]], [], Sign::Plus).is_err());
        assert!(IsoCElem::from_images(&[2, 2], [], Sign::Plus).is_err());
    }

    #[test]
    fn sorted_norm_examples() {
        assert_eq!(sorted_sc_norm(&CSeq::zero(), p()).unwrap(), CertReal::zero());
        assert_eq!(sorted_sc_norm(&CSeq::unit(1), p()).unwrap(), CertReal::exact(rat(3, 2)));
        // 1 + √5/4
        let v = sorted_sc_norm(&seq(&[1, 1]), p()).unwrap();
        assert_eq!(sorted_sc_parts(&seq(&[1, 1])).unwrap().1, rat(5, 16));
        let expected = CertReal::exact(int(1)) + cert_sqrt(&rat(5, 16), &pow2(-80)).unwrap();
        assert!(v.lo() <= expected.hi() && expected.lo() <= v.hi());
        assert!(*v.radius() <= pow2(-64));
    }

    #[test]
    fn sorted_norm_requires_c0() {
        assert!(matches!(
            sorted_sc_norm(&CSeq::constant(int(1)), p()),
            Err(SeqError::NonZeroTail(_))
        ));
    }

    #[test]
    fn sorting_element_sorts() {
        let x = seq(&[1, -5, 3, 0, -4]);
        let h = sorting_element(&x);
        let y = act_c(&h, &x);
        let mags: Vec<Rational> = y.prefix().iter().map(Signed::abs).collect();
        assert!(mags.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(weighted_parts(&y).unwrap(), sorted_sc_parts(&x).unwrap());
    }

    #[test]
    fn c_renorm_examples() {
        assert_eq!(c_renorm(&CSeq::zero(), p()).unwrap(), CertReal::exact(int(0)));
        assert_eq!(c_renorm(&CSeq::constant(int(1)), p()).unwrap(), CertReal::exact(int(2)));
        assert_eq!(c_renorm(&CSeq::unit(1), p()).unwrap(), CertReal::exact(rat(5, 2)));
    }

    #[test]
    fn c_renorm_discrepancy_values() {
        let g = IsoCElem::from_cycles(&[], [1], Sign::Plus).unwrap();
        let one = CSeq::constant(int(1));
        let gx = act_c(&g, &one);
        assert_eq!(c_split(&gx).c0, seq(&[-2]));
        assert_eq!(act_csplit(&g, &c_split(&one)).c0, CSeq::zero());
        let v = c_renorm(&gx, p()).unwrap();
        let ten = cert_sqrt(&int(10), &pow2(-90)).unwrap();
        assert!(v.contains(&(int(1) + ten.midpoint())));
        assert_eq!(
            crate::numerics::cert_cmp(&c_renorm(&one, p()).unwrap(), &v),
            CertOrdering::Lt
        );
    }

    #[test]
    fn c0sum_examples() {
        let zero = BlockVec::new(
            vec![Block::new(0, vec![int(0)]), Block::new(1, vec![int(0), int(0)])],
            Ambient::C0Sum,
        )
        .unwrap();
        assert_eq!(c0sum_sorted_norm(&zero, p()).unwrap(), CertReal::zero());

        let same = BlockVec::new(
            vec![Block::new(0, vec![int(1)]), Block::new(0, vec![int(2)])],
            Ambient::C0Sum,
        )
        .unwrap();
        assert_eq!(c0sum_parts(&same).unwrap(), (int(4), rat(17, 16)));

        let mixed = BlockVec::new(
            vec![Block::new(7, vec![int(0)]), Block::new(9, vec![int(3), int(4)])],
            Ambient::C0Sum,
        )
        .unwrap();
        assert_eq!(c0sum_parts(&mixed).unwrap(), (int(25), rat(25, 16)));
        assert_eq!(
            c0sum_sorted_norm(&mixed, p()).unwrap(),
            CertReal::exact(int(5) + rat(5, 4))
        );
    }

    #[test]
    fn class_length_mismatch_rejected() {
        let bad = BlockVec::new(
            vec![Block::new(0, vec![int(1)]), Block::new(0, vec![int(1), int(2)])],
            Ambient::C0Sum,
        );
        assert!(matches!(bad, Err(SeqError::ClassLengthMismatch { .. })));
    }

    #[test]
    fn l1sum_examples() {
        let zero = BlockVec::scalars(vec![int(0), int(0)], Ambient::L1Sum);
        assert_eq!(l1sum_sc_norm(&zero, p()).unwrap(), CertReal::zero());
        let v = BlockVec::scalars(vec![int(3), int(4)], Ambient::L1Sum);
        assert_eq!(l1sum_sc_norm(&v, p()).unwrap(), CertReal::exact(int(12)));
        let e1 = BlockVec::scalars(vec![int(1)], Ambient::L1Sum);
        assert_eq!(l1sum_sc_norm(&e1, p()).unwrap(), CertReal::exact(int(2)));
        assert!(l1sum_sc_norm(&BlockVec::scalars(vec![int(1)], Ambient::C0Sum), p()).is_err());
    }

    #[test]
    fn act_blocks_examples() {
        let layout = [(0, 2)];
        let q = RatMatrix::new(2, vec![rat(3, 5), rat(4, 5), rat(-4, 5), rat(3, 5)]).unwrap();
        let g = BlockIso::new(vec![0], vec![q], &layout).unwrap();
        let v = BlockVec::new(vec![Block::new(0, vec![int(1), int(0)])], Ambient::C0Sum).unwrap();
        let w = act_blocks(&g, &v).unwrap();
        assert_eq!(w.blocks()[0].coords, vec![rat(3, 5), rat(-4, 5)]);
        assert_eq!(w.block_sq_norms(), v.block_sq_norms());

        let layout = [(0, 1), (0, 1)];
        let swap = BlockIso::new(
            vec![1, 0],
            vec![RatMatrix::identity(1), RatMatrix::identity(1)],
            &layout,
        )
        .unwrap();
        let v = BlockVec::scalars(vec![int(1), int(2)], Ambient::L1Sum);
        assert_eq!(
            act_blocks(&swap, &v).unwrap(),
            BlockVec::scalars(vec![int(2), int(1)], Ambient::L1Sum)
        );
        assert_eq!(act_blocks(&BlockIso::identity(&layout), &v).unwrap(), v);
    }

    #[test]
    fn block_iso_rejects_bad_maps() {
        let layout = [(0, 2)];
        let skewed = RatMatrix::new(2, vec![int(1), int(1), int(0), int(1)]).unwrap();
        assert!(matches!(
            BlockIso::new(vec![0], vec![skewed], &layout),
            Err(SeqError::NotOrthogonal { block: 0 })
        ));
        let layout = [(0, 1), (1, 1)];
        assert!(matches!(
            BlockIso::new(
                vec![1, 0],
                vec![RatMatrix::identity(1), RatMatrix::identity(1)],
                &layout
            ),
            Err(SeqError::ClassNotPreserved { .. })
        ));
    }

    #[test]
    fn cayley_is_orthogonal() {
        let skew = RatMatrix::new(
            3,
            vec![
                int(0),
                rat(1, 2),
                int(-2),
                rat(-1, 2),
                int(0),
                rat(3, 7),
                int(2),
                rat(-3, 7),
                int(0),
            ],
        )
        .unwrap();
        assert!(RatMatrix::cayley(&skew).unwrap().is_orthogonal());
    }
}
