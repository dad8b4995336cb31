//! Step functions on `[0,1)`, piecewise-affine measure-class preserving
//! bijections, and the isometries of `L₁[0,1]` they induce.
//!
//! An isometry is stored in Banach–Lamperti form `(φ, s)` and acts by
//! `(Tf)(x) = s(x) · (dφ_*λ/dλ)(x) · f(φ⁻¹(x))`. Every quantity is an exact
//! rational: breakpoints, values, Radon–Nikodým ratios, and integrals.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::Vector;
use crate::numerics::{
    fmt_rational, int, pow2, rat, rational_vec, CertReal, NumericsError, Precision, Rational,
};
use crate::renormkit::{Action, ObstructionCertificate, Transform};
use crate::words::{shortlex_index, shortlex_word, FreeWord, Letter};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum L1Error {
    #[error("invalid step function: {0}")]
    InvalidStepFn(String),
    #[error("invalid interval map: {0}")]
    InvalidMap(String),
    #[error("sign function takes value {0}, expected ±1")]
    InvalidSign(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("group element {0} does not belong to this action")]
    ForeignElement(String),
    #[error("function mass reaches 1; it is not supported on finitely many fundamental-domain translates")]
    UnboundedSupport,
    #[error("truncation must contain the identity")]
    TruncationWithoutIdentity,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no (n, p) certified within the search budget (n ≤ {max_n})")]
    SearchExhausted { max_n: u32 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, L1Error>;

/// A right-continuous step function on `[0,1)`: value `values[i]` on
/// `[breakpoints[i], breakpoints[i+1])`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "StepFnRepr", into = "StepFnRepr")]
pub struct StepFn {
    breaks: Vec<Rational>,
    values: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct StepFnRepr {
    #[serde(with = "rational_vec")]
    breakpoints: Vec<Rational>,
    #[serde(with = "rational_vec")]
    values: Vec<Rational>,
}

impl TryFrom<StepFnRepr> for StepFn {
    type Error = L1Error;
    fn try_from(r: StepFnRepr) -> Result<Self> {
        StepFn::new(r.breakpoints, r.values)
    }
}

impl From<StepFn> for StepFnRepr {
    fn from(f: StepFn) -> Self {
        StepFnRepr {
            breakpoints: f.breaks,
            values: f.values,
        }
    }
}

impl StepFn {
    pub fn new(breaks: Vec<Rational>, values: Vec<Rational>) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(L1Error::InvalidStepFn(format!(
                "{} breakpoints for {} values",
                breaks.len(),
                values.len()
            )));
        }
        if breaks.first() != Some(&Rational::zero()) || breaks.last() != Some(&Rational::one()) {
            return Err(L1Error::InvalidStepFn(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(L1Error::InvalidStepFn(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(StepFn::canonical(breaks, values))
    }

    fn canonical(breaks: Vec<Rational>, values: Vec<Rational>) -> Self {
        let mut b = vec![breaks[0].clone()];
        let mut v: Vec<Rational> = Vec::new();
        for (i, val) in values.into_iter().enumerate() {
            if v.last() == Some(&val) {
                *b.last_mut().unwrap_or_else(|| unreachable!()) = breaks[i + 1].clone();
            } else {
                v.push(val);
                b.push(breaks[i + 1].clone());
            }
        }
        StepFn {
            breaks: b,
            values: v,
        }
    }

    pub fn constant(v: Rational) -> Self {
        StepFn {
            breaks: vec![Rational::zero(), Rational::one()],
            values: vec![v],
        }
    }

    pub fn zero() -> Self {
        StepFn::constant(Rational::zero())
    }

    /// `c·χ_{[a,b)}`, clipped to `[0,1)`.
    pub fn indicator_scaled(a: &Rational, b: &Rational, c: Rational) -> Self {
        let a = a.clone().max(Rational::zero()).min(Rational::one());
        let b = b.clone().max(a.clone()).min(Rational::one());
        if a == b {
            return StepFn::zero();
        }
        StepFn::from_pieces(vec![(a, b, c)])
    }

    pub fn indicator(a: &Rational, b: &Rational) -> Self {
        StepFn::indicator_scaled(a, b, Rational::one())
    }

    /// Builds a step function from disjoint pieces `(start, end, value)`; the
    /// uncovered part of `[0,1)` is zero.
    pub fn from_pieces(mut pieces: Vec<(Rational, Rational, Rational)>) -> Self {
        pieces.retain(|(a, b, _)| a < b);
        pieces.sort_by(|x, y| x.0.cmp(&y.0));
        let mut breaks = vec![Rational::zero()];
        let mut values = Vec::new();
        for (a, b, v) in pieces {
            let cur = breaks.last().cloned().unwrap_or_default();
            debug_assert!(a >= cur, "overlapping pieces");
            if a > cur {
                values.push(Rational::zero());
                breaks.push(a);
            }
            values.push(v);
            breaks.push(b);
        }
        if breaks.last() != Some(&Rational::one()) {
            values.push(Rational::zero());
            breaks.push(Rational::one());
        }
        StepFn::canonical(breaks, values)
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn pieces(&self) -> impl Iterator<Item = (&Rational, &Rational, &Rational)> {
        self.breaks
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let i = self.breaks.partition_point(|b| b <= x);
        self.values
            .get(i.saturating_sub(1))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `∫_a^b f`.
    pub fn integral_over(&self, a: &Rational, b: &Rational) -> Rational {
        self.integrate_with(a, b, |v| v.clone())
    }

    /// `∫_a^b |f|`.
    pub fn abs_integral_over(&self, a: &Rational, b: &Rational) -> Rational {
        self.integrate_with(a, b, Signed::abs)
    }

    fn integrate_with(&self, a: &Rational, b: &Rational, h: impl Fn(&Rational) -> Rational) -> Rational {
        self.pieces()
            .map(|(s, t, v)| {
                let lo = s.max(a);
                let hi = t.min(b);
                if lo < hi {
                    h(v) * (hi - lo)
                } else {
                    Rational::zero()
                }
            })
            .sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| !v.is_negative())
    }

    /// Supremum of the support, i.e. the start of the final zero run (or 1).
    pub fn support_end(&self) -> Rational {
        match self.values.last() {
            Some(v) if v.is_zero() => self.breaks[self.breaks.len() - 2].clone(),
            _ => Rational::one(),
        }
    }

    fn refined_with(&self, other: &StepFn) -> Vec<Rational> {
        let set: BTreeSet<&Rational> = self.breaks.iter().chain(&other.breaks).collect();
        set.into_iter().cloned().collect()
    }

    fn zip_with(&self, other: &StepFn, op: impl Fn(&Rational, &Rational) -> Rational) -> StepFn {
        let breaks = self.refined_with(other);
        let values = breaks
            .windows(2)
            .map(|w| op(&self.eval(&w[0]), &other.eval(&w[0])))
            .collect();
        StepFn::canonical(breaks, values)
    }

    pub fn mul(&self, other: &StepFn) -> StepFn {
        self.zip_with(other, |a, b| a * b)
    }
}

impl fmt::Display for StepFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .pieces()
            .map(|(a, b, v)| format!("{} on [{},{})", fmt_rational(v), fmt_rational(a), fmt_rational(b)))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl Vector for StepFn {
    fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    fn scale(&self, c: &Rational) -> Self {
        StepFn::canonical(self.breaks.clone(), self.values.iter().map(|v| v * c).collect())
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let breaks = self.refined_with(other);
        let starts = &breaks[..breaks.len() - 1];
        (
            starts.iter().map(|x| self.eval(x)).collect(),
            starts.iter().map(|x| other.eval(x)).collect(),
        )
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// `‖f‖₁ = Σ |v_i|·(b_i − b_{i−1})`.
pub fn l1_norm(f: &StepFn) -> Rational {
    f.pieces().map(|(a, b, v)| v.abs() * (b - a)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "+")]
    Preserving,
    #[serde(rename = "-")]
    Reversing,
}

impl Orientation {
    fn times(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// One affine piece `[s,t) → [u,w)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "crate::numerics::rational_str")]
    pub s: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub t: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub u: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub w: Rational,
    pub orientation: Orientation,
}

impl Piece {
    pub fn new(s: Rational, t: Rational, u: Rational, w: Rational, orientation: Orientation) -> Self {
        Piece {
            s,
            t,
            u,
            w,
            orientation,
        }
    }

    fn slope(&self) -> Rational {
        (&self.w - &self.u) / (&self.t - &self.s)
    }

    /// Image of a source point.
    pub fn forward(&self, x: &Rational) -> Rational {
        let d = (x - &self.s) * self.slope();
        match self.orientation {
            Orientation::Preserving => &self.u + d,
            Orientation::Reversing => &self.w - d,
        }
    }

    /// Preimage of a target point.
    pub fn backward(&self, y: &Rational) -> Rational {
        let d = match self.orientation {
            Orientation::Preserving => y - &self.u,
            Orientation::Reversing => &self.w - y,
        };
        &self.s + d / self.slope()
    }

    /// Image of the source subinterval `[a,b)`, as an ordered interval.
    fn image_of(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let (x, y) = (self.forward(a), self.forward(b));
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Preimage of the target subinterval `[a,b)`.
    fn preimage_of(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let (x, y) = (self.backward(a), self.backward(b));
        if x <= y {
            (x, y)
        } else {
            (y, x)
        }
    }

    fn inverse(&self) -> Piece {
        Piece::new(
            self.u.clone(),
            self.w.clone(),
            self.s.clone(),
            self.t.clone(),
            self.orientation,
        )
    }

    /// Radon–Nikodým derivative of the pushforward on the target piece.
    pub fn rn(&self) -> Rational {
        (&self.t - &self.s) / (&self.w - &self.u)
    }
}

fn check_partition(mut intervals: Vec<(Rational, Rational)>, what: &str) -> Result<()> {
    intervals.sort();
    let mut cur = Rational::zero();
    for (a, b) in intervals {
        if a != cur {
            return Err(L1Error::InvalidMap(format!(
                "{what} intervals do not partition [0,1) near {}",
                fmt_rational(&cur)
            )));
        }
        if a >= b {
            return Err(L1Error::InvalidMap(format!("{what} interval of nonpositive length")));
        }
        cur = b;
    }
    if !cur.is_one() {
        return Err(L1Error::InvalidMap(format!("{what} intervals stop at {}", fmt_rational(&cur))));
    }
    Ok(())
}

/// A piecewise-affine bijection of `[0,1)` (mod endpoints).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntervalMap {
    pieces: Vec<Piece>,
}

impl IntervalMap {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        check_partition(pieces.iter().map(|p| (p.s.clone(), p.t.clone())).collect(), "source")?;
        check_partition(pieces.iter().map(|p| (p.u.clone(), p.w.clone())).collect(), "target")?;
        Ok(IntervalMap::canonical(pieces))
    }

    pub fn identity() -> Self {
        IntervalMap {
            pieces: vec![Piece::new(
                Rational::zero(),
                Rational::one(),
                Rational::zero(),
                Rational::one(),
                Orientation::Preserving,
            )],
        }
    }

    /// Rotation `x ↦ x + r mod 1` for `0 ≤ r < 1`.
    pub fn rotation(r: &Rational) -> Result<Self> {
        if r.is_negative() || *r >= Rational::one() {
            return Err(L1Error::InvalidMap("rotation amount outside [0,1)".into()));
        }
        if r.is_zero() {
            return Ok(IntervalMap::identity());
        }
        let one = Rational::one();
        let cut = &one - r;
        IntervalMap::new(vec![
            Piece::new(Rational::zero(), cut.clone(), r.clone(), one.clone(), Orientation::Preserving),
            Piece::new(cut, one, Rational::zero(), r.clone(), Orientation::Preserving),
        ])
    }

    /// Sorts by source and merges pieces that continue the same affine map.
    fn canonical(mut pieces: Vec<Piece>) -> Self {
        pieces.sort_by(|a, b| a.s.cmp(&b.s));
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            if let Some(last) = out.last_mut() {
                let same = last.orientation == p.orientation && last.slope() == p.slope() && last.t == p.s;
                let contiguous = match p.orientation {
                    Orientation::Preserving => last.w == p.u,
                    Orientation::Reversing => last.u == p.w,
                };
                if same && contiguous {
                    last.t = p.t.clone();
                    match p.orientation {
                        Orientation::Preserving => last.w = p.w.clone(),
                        Orientation::Reversing => last.u = p.u.clone(),
                    }
                    continue;
                }
            }
            out.push(p);
        }
        IntervalMap { pieces: out }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    fn piece_at(&self, x: &Rational) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.s <= *x && *x < p.t)
    }

    pub fn apply(&self, x: &Rational) -> Option<Rational> {
        self.piece_at(x).map(|p| p.forward(x))
    }

    pub fn apply_inverse(&self, y: &Rational) -> Option<Rational> {
        self.pieces
            .iter()
            .find(|p| p.u <= *y && *y < p.w)
            .map(|p| p.backward(y))
    }

    pub fn inverse(&self) -> IntervalMap {
        IntervalMap::canonical(self.pieces.iter().map(Piece::inverse).collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &IntervalMap) -> IntervalMap {
        let mut out = Vec::new();
        for p in &other.pieces {
            for q in &self.pieces {
                let lo = (&p.u).max(&q.s).clone();
                let hi = (&p.w).min(&q.t).clone();
                if lo >= hi {
                    continue;
                }
                let (s, t) = p.preimage_of(&lo, &hi);
                let (u, w) = q.image_of(&lo, &hi);
                out.push(Piece::new(s, t, u, w, p.orientation.times(q.orientation)));
            }
        }
        IntervalMap::canonical(out)
    }

    /// `f ∘ φ⁻¹`, without density.
    pub fn transport(&self, f: &StepFn) -> StepFn {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for (a, b, v) in f.pieces() {
                let lo = a.max(&p.s);
                let hi = b.min(&p.t);
                if lo < hi {
                    let (x, y) = p.image_of(lo, hi);
                    pieces.push((x, y, v.clone()));
                }
            }
        }
        StepFn::from_pieces(pieces)
    }

    /// `dφ_*λ/dλ`, piecewise constant on the targets.
    pub fn rn_derivative(&self) -> StepFn {
        StepFn::from_pieces(
            self.pieces
                .iter()
                .map(|p| (p.u.clone(), p.w.clone(), p.rn()))
                .collect(),
        )
    }
}

/// A linear isometry of `L₁[0,1]` in Banach–Lamperti form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct L1Iso {
    map: IntervalMap,
    sign: StepFn,
}

impl L1Iso {
    pub fn new(map: IntervalMap, sign: StepFn) -> Result<Self> {
        if let Some(bad) = sign.values().iter().find(|v| v.abs() != Rational::one()) {
            return Err(L1Error::InvalidSign(fmt_rational(bad)));
        }
        Ok(L1Iso { map, sign })
    }

    /// The lattice isometry `T_φ` (sign ≡ 1).
    pub fn lattice(map: IntervalMap) -> Self {
        L1Iso {
            map,
            sign: StepFn::constant(Rational::one()),
        }
    }

    pub fn identity() -> Self {
        L1Iso::lattice(IntervalMap::identity())
    }

    pub fn map(&self) -> &IntervalMap {
        &self.map
    }

    pub fn sign(&self) -> &StepFn {
        &self.sign
    }

    pub fn is_lattice(&self) -> bool {
        self.sign == StepFn::constant(Rational::one())
    }
}

/// `(Tf)(x) = s(x)·(dφ_*λ/dλ)(x)·f(φ⁻¹(x))`.
pub fn apply_iso(t: &L1Iso, f: &StepFn) -> StepFn {
    t.sign.mul(&t.map.rn_derivative()).mul(&t.map.transport(f))
}

/// `S ∘ T`.
pub fn compose_iso(s: &L1Iso, t: &L1Iso) -> L1Iso {
    L1Iso {
        map: s.map.compose(&t.map),
        sign: s.sign.mul(&s.map.transport(&t.sign)),
    }
}

pub fn invert_iso(t: &L1Iso) -> L1Iso {
    let inv = t.map.inverse();
    L1Iso {
        sign: inv.transport(&t.sign),
        map: inv,
    }
}

/// The generators of a lattice-isometric `F₂` action on `L₁[0,1]` with no
/// invariant strictly convex renorming.
///
/// `T₁` is the lattice isometry of `φ` (`2x` on `[0,1/3]`, `(x − 1/3)/2 + 2/3`
/// on `[1/3,1]`); its density `1/2` on `[0,2/3)` and `2` on `[2/3,1)` is the
/// weight `h∘φ⁻¹`. `T₂` is rotation by `1/3`, which sends `[0,1/3]` to
/// `[1/3,2/3]`, `[1/3,2/3]` to `[2/3,1]` and `[2/3,1]` to `[0,1/3]`.
pub fn f2_counterexample() -> (L1Iso, L1Iso) {
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let phi = IntervalMap::new(vec![
        Piece::new(int(0), third.clone(), int(0), two_thirds.clone(), Orientation::Preserving),
        Piece::new(third.clone(), int(1), two_thirds, int(1), Orientation::Preserving),
    ])
    .unwrap_or_else(|e| unreachable!("fixed map is valid: {e}"));
    let psi = IntervalMap::rotation(&third).unwrap_or_else(|e| unreachable!("{e}"));
    (L1Iso::lattice(phi), L1Iso::lattice(psi))
}

/// Evaluates a word with `a ↦ T_a`, `b ↦ T_b`.
pub fn eval_word(w: &FreeWord, a: &L1Iso, b: &L1Iso) -> L1Iso {
    let gens = [(a.clone(), invert_iso(a)), (b.clone(), invert_iso(b))];
    w.evaluate(L1Iso::identity(), &gens, compose_iso)
}

/// Applies the word letter by letter (rightmost letter first) without
/// composing the maps.
pub fn apply_word(w: &FreeWord, a: &L1Iso, b: &L1Iso, f: &StepFn) -> StepFn {
    let gens = [(a.clone(), invert_iso(a)), (b.clone(), invert_iso(b))];
    w.letters().iter().rev().fold(f.clone(), |acc, l| {
        let (g, ginv) = &gens[l.generator as usize];
        apply_iso(if l.inverse { ginv } else { g }, &acc)
    })
}

/// The counterexample action on step functions: `a ↦ T₁`, `b ↦ T₂`.
pub fn f2_action() -> Action<StepFn> {
    let (t1, t2) = f2_counterexample();
    let pair = |t: L1Iso, name: &str| {
        let inv = invert_iso(&t);
        (
            Transform::new(name, move |f: &StepFn| apply_iso(&t, f)),
            Transform::new(&format!("{name}⁻¹"), move |f: &StepFn| apply_iso(&inv, f)),
        )
    };
    Action::new("F₂ on L₁[0,1], a = T₁, b = T₂", vec![pair(t1, "T₁"), pair(t2, "T₂")])
}

/// `x = χ_{[0,1/3)}`, `y = χ_{[1/3,2/3)}`, `g = T₂`, `h = T₁`.
pub fn f2_certificate() -> ObstructionCertificate<StepFn> {
    ObstructionCertificate {
        space: "L₁[0,1]".into(),
        x: StepFn::indicator(&int(0), &rat(1, 3)),
        y: StepFn::indicator(&rat(1, 3), &rat(2, 3)),
        g_word: FreeWord::generator(1),
        h_word: FreeWord::generator(0),
        action: f2_action(),
    }
}

/// A countable group with a fixed enumeration `g₀ = e, g₁, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GroupSpec {
    Int,
    Cyclic(u32),
    Free(u8),
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Int => write!(f, "Z"),
            GroupSpec::Cyclic(n) => write!(f, "Z/{n}"),
            GroupSpec::Free(k) => write!(f, "F{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GroupElem {
    Int(i64),
    Cyclic(u32),
    Free(FreeWord),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Int(n) => write!(f, "{n}"),
            GroupElem::Cyclic(n) => write!(f, "{n}"),
            GroupElem::Free(w) => write!(f, "{w}"),
        }
    }
}

/// A free action with fundamental domain `A = I_{g₀}`, built by indexing the
/// dyadic intervals `I_k = [1 − 2⁻ᵏ, 1 − 2⁻ᵏ⁻¹)` by the group enumeration and
/// letting `g` send `I_h` affinely onto `I_{gh}`.
///
/// For `ℤ/n` the last interval is `[1 − 2^{1−n}, 1)` so that the finitely many
/// intervals cover `[0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FDAction {
    group: GroupSpec,
}

pub fn fundamental_domain_action(group: GroupSpec) -> Result<FDAction> {
    match group {
        GroupSpec::Cyclic(0) => Err(L1Error::UnsupportedGroup("Z/0".into())),
        GroupSpec::Free(0) => Err(L1Error::UnsupportedGroup("F0 (use Z/1)".into())),
        GroupSpec::Free(k) if k > 26 => Err(L1Error::UnsupportedGroup(format!("F{k}"))),
        _ => Ok(FDAction { group }),
    }
}

impl FDAction {
    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn identity(&self) -> GroupElem {
        match self.group {
            GroupSpec::Int => GroupElem::Int(0),
            GroupSpec::Cyclic(_) => GroupElem::Cyclic(0),
            GroupSpec::Free(_) => GroupElem::Free(FreeWord::identity()),
        }
    }

    pub fn generators(&self) -> Vec<GroupElem> {
        match self.group {
            GroupSpec::Int => vec![GroupElem::Int(1)],
            GroupSpec::Cyclic(n) => vec![GroupElem::Cyclic(1 % n)],
            GroupSpec::Free(k) => (0..k).map(|g| GroupElem::Free(FreeWord::generator(g))).collect(),
        }
    }

    fn check(&self, g: &GroupElem) -> Result<()> {
        let ok = match (self.group, g) {
            (GroupSpec::Int, GroupElem::Int(_)) => true,
            (GroupSpec::Cyclic(n), GroupElem::Cyclic(v)) => *v < n,
            (GroupSpec::Free(k), GroupElem::Free(w)) => w.max_generator().is_none_or(|m| m < k),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(L1Error::ForeignElement(g.to_string()))
        }
    }

    pub fn mul(&self, g: &GroupElem, h: &GroupElem) -> Result<GroupElem> {
        self.check(g)?;
        self.check(h)?;
        Ok(match (g, h) {
            (GroupElem::Int(a), GroupElem::Int(b)) => GroupElem::Int(a + b),
            (GroupElem::Cyclic(a), GroupElem::Cyclic(b)) => match self.group {
                GroupSpec::Cyclic(n) => GroupElem::Cyclic((a + b) % n),
                _ => unreachable!(),
            },
            (GroupElem::Free(a), GroupElem::Free(b)) => GroupElem::Free(a.mul(b)),
            _ => unreachable!(),
        })
    }

    pub fn inv(&self, g: &GroupElem) -> Result<GroupElem> {
        self.check(g)?;
        Ok(match g {
            GroupElem::Int(a) => GroupElem::Int(-a),
            GroupElem::Cyclic(a) => match self.group {
                GroupSpec::Cyclic(n) => GroupElem::Cyclic((n - a) % n),
                _ => unreachable!(),
            },
            GroupElem::Free(w) => GroupElem::Free(w.inverse()),
        })
    }

    /// Position of `g` in the enumeration.
    pub fn index(&self, g: &GroupElem) -> Result<u64> {
        self.check(g)?;
        Ok(match (self.group, g) {
            (_, GroupElem::Int(n)) => {
                if *n > 0 {
                    2 * (*n as u64) - 1
                } else {
                    2 * n.unsigned_abs()
                }
            }
            (_, GroupElem::Cyclic(v)) => *v as u64,
            (GroupSpec::Free(k), GroupElem::Free(w)) => {
                u64::try_from(shortlex_index(w, k)).map_err(|_| L1Error::ForeignElement(w.to_string()))?
            }
            _ => unreachable!(),
        })
    }

    /// Number of intervals, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match self.group {
            GroupSpec::Cyclic(n) => Some(n as u64),
            _ => None,
        }
    }

    pub fn element(&self, index: u64) -> Option<GroupElem> {
        match self.group {
            GroupSpec::Int => Some(GroupElem::Int(if index % 2 == 1 {
                index.div_ceil(2) as i64
            } else {
                -((index / 2) as i64)
            })),
            GroupSpec::Cyclic(n) => (index < n as u64).then_some(GroupElem::Cyclic(index as u32)),
            GroupSpec::Free(k) => Some(GroupElem::Free(shortlex_word(index as u128, k))),
        }
    }

    /// The first `count` elements of the enumeration.
    pub fn first_elements(&self, count: u64) -> Vec<GroupElem> {
        let count = self.order().map_or(count, |n| count.min(n));
        (0..count).filter_map(|i| self.element(i)).collect()
    }

    /// `I_k` as `[start, end)`.
    pub fn interval(&self, k: u64) -> (Rational, Rational) {
        let start = Rational::one() - pow2(-(k as i64));
        let last = self.order().is_some_and(|n| k + 1 == n);
        let end = if last {
            Rational::one()
        } else {
            Rational::one() - pow2(-(k as i64) - 1)
        };
        (start, end)
    }

    pub fn interval_of(&self, g: &GroupElem) -> Result<(Rational, Rational)> {
        Ok(self.interval(self.index(g)?))
    }

    /// The fundamental domain `A = I_e`.
    pub fn domain(&self) -> (Rational, Rational) {
        self.interval(0)
    }

    /// The affine piece by which `g` sends `I_h` onto `I_{gh}`.
    pub fn piece(&self, g: &GroupElem, h: &GroupElem) -> Result<Piece> {
        let (s, t) = self.interval_of(h)?;
        let (u, w) = self.interval_of(&self.mul(g, h)?)?;
        Ok(Piece::new(s, t, u, w, Orientation::Preserving))
    }

    /// A measure-class preserving bijection of `[0,1)` agreeing with `g` on
    /// `I_{g_k}` for every `k < depth`. For finite groups with `depth ≥ n` it is
    /// exactly the action of `g`; otherwise the leftover region
    /// `[1 − 2^{-depth}, 1)` is mapped affinely and in order onto the uncovered
    /// targets.
    pub fn generator_map(&self, g: &GroupElem, depth: u64) -> Result<IntervalMap> {
        let depth = self.order().map_or(depth, |n| depth.min(n));
        let mut pieces = Vec::new();
        for k in 0..depth {
            let h = self
                .element(k)
                .ok_or_else(|| L1Error::ForeignElement(k.to_string()))?;
            pieces.push(self.piece(g, &h)?);
        }
        let covered_end = if self.order() == Some(depth) {
            Rational::one()
        } else {
            Rational::one() - pow2(-(depth as i64))
        };
        if covered_end < Rational::one() {
            let mut targets: Vec<(Rational, Rational)> =
                pieces.iter().map(|p| (p.u.clone(), p.w.clone())).collect();
            targets.sort();
            let mut gaps = Vec::new();
            let mut cur = Rational::zero();
            for (u, w) in targets {
                if u > cur {
                    gaps.push((cur.clone(), u.clone()));
                }
                cur = w;
            }
            if cur < Rational::one() {
                gaps.push((cur, Rational::one()));
            }
            let gap_total: Rational = gaps.iter().map(|(a, b)| b - a).sum();
            let src_len = Rational::one() - &covered_end;
            let mut s = covered_end;
            for (a, b) in gaps {
                let t = &s + (&b - &a) * &src_len / &gap_total;
                pieces.push(Piece::new(s.clone(), t.clone(), a, b, Orientation::Preserving));
                s = t;
            }
        }
        IntervalMap::new(pieces)
    }

    /// `α(g)f` for `f` supported on finitely many intervals `I_k`.
    pub fn act(&self, g: &GroupElem, f: &StepFn) -> Result<StepFn> {
        let end = f.support_end();
        let mut pieces = Vec::new();
        let mut k = 0u64;
        loop {
            if self.order().is_some_and(|n| k >= n) {
                break;
            }
            let (s, _) = self.interval(k);
            if s >= end {
                break;
            }
            if k > 4096 {
                return Err(L1Error::UnboundedSupport);
            }
            let h = self
                .element(k)
                .ok_or_else(|| L1Error::ForeignElement(k.to_string()))?;
            let p = self.piece(g, &h)?;
            let rn = p.rn();
            for (a, b, v) in f.pieces() {
                let lo = a.max(&p.s);
                let hi = b.min(&p.t);
                if lo < hi && !v.is_zero() {
                    let (x, y) = p.image_of(lo, hi);
                    pieces.push((x, y, v * &rn));
                }
            }
            k += 1;
        }
        Ok(StepFn::from_pieces(pieces))
    }

    /// `g·A_i^n`: the `i`-th of `n` equal consecutive parts of `A`, moved into `I_g`.
    pub fn sub_interval(&self, g: &GroupElem, n: u32, i: u32) -> Result<(Rational, Rational)> {
        let (u, w) = self.interval_of(g)?;
        let len = &w - &u;
        let n_r = int(n as i64);
        Ok((
            &u + &len * int(i as i64 - 1) / &n_r,
            &u + &len * int(i as i64) / &n_r,
        ))
    }
}

/// A finitely supported element of `ℓ₁(G × n)` together with an exact bound on
/// the `ℓ₁` mass that was not stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncVec {
    pub entries: BTreeMap<(GroupElem, u32), Rational>,
    pub tail_bound: Rational,
}

impl TruncVec {
    pub fn l1_mass(&self) -> Rational {
        self.entries.values().map(Signed::abs).sum()
    }

    pub fn get(&self, g: &GroupElem, i: u32) -> Option<&Rational> {
        self.entries.get(&(g.clone(), i))
    }

    /// Left translation `(h·v)(g, i) = v(h⁻¹g, i)`.
    pub fn translate(&self, act: &FDAction, h: &GroupElem) -> Result<TruncVec> {
        let mut entries = BTreeMap::new();
        for ((g, i), v) in &self.entries {
            entries.insert((act.mul(h, g)?, *i), v.clone());
        }
        Ok(TruncVec {
            entries,
            tail_bound: self.tail_bound.clone(),
        })
    }

    /// Whether the two vectors agree on every key stored in both.
    pub fn agrees_on_common(&self, other: &TruncVec) -> bool {
        self.entries
            .iter()
            .all(|(k, v)| other.entries.get(k).is_none_or(|w| v == w))
    }
}

impl Vector for TruncVec {
    fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries.clone();
        for (k, v) in &other.entries {
            *entries.entry(k.clone()).or_insert_with(Rational::zero) += v;
        }
        TruncVec {
            entries,
            tail_bound: &self.tail_bound + &other.tail_bound,
        }
    }

    fn scale(&self, c: &Rational) -> Self {
        TruncVec {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
            tail_bound: &self.tail_bound * c.abs(),
        }
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let keys: BTreeSet<&(GroupElem, u32)> = self.entries.keys().chain(other.entries.keys()).collect();
        let get = |v: &TruncVec, k: &(GroupElem, u32)| v.entries.get(k).cloned().unwrap_or_else(Rational::zero);
        (
            keys.iter().map(|k| get(self, k)).collect(),
            keys.iter().map(|k| get(other, k)).collect(),
        )
    }

    fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|((g, i), v)| serde_json::json!({"g": g.to_string(), "i": i, "value": fmt_rational(v)}))
            .collect();
        serde_json::json!({"entries": entries, "tail_bound": fmt_rational(&self.tail_bound)})
    }
}

/// `P_n(f)(g, i) = ∫_{gA_i^n} f dλ` for `g` in the truncation.
pub fn pn_apply(act: &FDAction, n: u32, f: &StepFn, trunc: &[GroupElem]) -> Result<TruncVec> {
    if n == 0 {
        return Err(L1Error::Precondition("n must be positive".into()));
    }
    let e = act.identity();
    if !trunc.contains(&e) {
        return Err(L1Error::TruncationWithoutIdentity);
    }
    let distinct: BTreeSet<&GroupElem> = trunc.iter().collect();
    let mut entries = BTreeMap::new();
    let mut covered = Rational::zero();
    for g in distinct {
        let (u, w) = act.interval_of(g)?;
        covered += f.abs_integral_over(&u, &w);
        for i in 1..=n {
            let (a, b) = act.sub_interval(g, n, i)?;
            entries.insert((g.clone(), i), f.integral_over(&a, &b));
        }
    }
    Ok(TruncVec {
        entries,
        tail_bound: l1_norm(f) - covered,
    })
}

/// `(Σ |v|^p)^{1/p}` over the stored entries.
pub fn lp_norm(v: &TruncVec, p: &Rational, prec: Precision) -> Result<CertReal> {
    if *p < Rational::one() {
        return Err(L1Error::Precondition(format!("p = {} < 1", fmt_rational(p))));
    }
    if p.is_one() {
        return Ok(CertReal::exact(v.l1_mass()));
    }
    // Each term carries its own radius; compute them finer so the sum stays within `prec`.
    let count = v.entries.len().max(1) as u32;
    let inner = Precision::bits(prec.get() + 2 + (32 - count.leading_zeros()));
    let mut sum = CertReal::zero();
    for x in v.entries.values() {
        sum = sum + crate::numerics::pow_at(&x.abs(), p, inner)?;
    }
    if sum.hi().is_zero() {
        return Ok(CertReal::zero());
    }
    Ok(sum.pow_nonneg(&p.recip(), prec)?)
}

/// Result of the `(n, p)` search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NpCertificate {
    pub n: u32,
    #[serde(with = "crate::numerics::rational_str")]
    pub p: Rational,
    pub value: CertReal,
    #[serde(with = "crate::numerics::rational_str")]
    pub target: Rational,
    pub truncation: usize,
    #[serde(with = "crate::numerics::rational_str")]
    pub tail_bound: Rational,
}

pub const NP_MAX_N: u32 = 64;
const NP_MAX_DEPTH: u64 = 64;

/// The exponents tried for each `n`, decreasing toward 1.
pub fn np_exponents() -> Vec<Rational> {
    (0..8).map(|j| Rational::one() + pow2(-j)).collect()
}

/// Finds `n` and `p > 1` with `‖ι_p P_n f‖_p ≥ ratio·‖f‖₁`, certified from
/// below using only stored entries.
pub fn find_np(act: &FDAction, f: &StepFn, ratio: &Rational, prec: Precision) -> Result<NpCertificate> {
    if !ratio.is_positive() || *ratio >= Rational::one() {
        return Err(L1Error::Precondition(format!(
            "ratio {} must lie in (0,1)",
            fmt_rational(ratio)
        )));
    }
    let norm = l1_norm(f);
    if norm.is_zero() {
        return Err(L1Error::Precondition("f = 0 has no certificate".into()));
    }
    let target = ratio * &norm;
    let slack = (Rational::one() - ratio) * &norm / int(2);
    // smallest truncation leaving at most `slack` uncovered
    let mut depth = 1u64;
    let trunc = loop {
        let trunc = act.first_elements(depth);
        let covered: Rational = trunc
            .iter()
            .map(|g| act.interval_of(g).map(|(u, w)| f.abs_integral_over(&u, &w)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum();
        let exhausted = act.order().is_some_and(|n| depth >= n) || depth >= NP_MAX_DEPTH;
        if &norm - covered <= slack || exhausted {
            break trunc;
        }
        depth += 1;
    };
    for n in 1..=NP_MAX_N {
        let v = pn_apply(act, n, f, &trunc)?;
        for p in np_exponents() {
            let value = lp_norm(&v, &p, prec)?;
            if value.lo() >= target {
                return Ok(NpCertificate {
                    n,
                    p,
                    value,
                    target,
                    truncation: trunc.len(),
                    tail_bound: v.tail_bound,
                });
            }
        }
    }
    Err(L1Error::SearchExhausted { max_n: NP_MAX_N })
}

/// One step of the `P_n` convergence schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PnDefect {
    pub n: u32,
    pub truncation: usize,
    #[serde(with = "crate::numerics::rational_str")]
    pub mass: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub defect: Rational,
    #[serde(with = "crate::numerics::rational_str")]
    pub tail_bound: Rational,
}

/// `‖f‖₁ − ‖P_n f‖₁` on a refinement schedule of `(n, truncation size)` pairs.
pub fn pn_defects(act: &FDAction, f: &StepFn, schedule: &[(u32, u64)]) -> Result<Vec<PnDefect>> {
    let norm = l1_norm(f);
    schedule
        .iter()
        .map(|&(n, depth)| {
            let trunc = act.first_elements(depth);
            let v = pn_apply(act, n, f, &trunc)?;
            let mass = v.l1_mass();
            Ok(PnDefect {
                n,
                truncation: trunc.len(),
                defect: &norm - &mass,
                mass,
                tail_bound: v.tail_bound,
            })
        })
        .collect()
}

/// Letters of `F₂` for the counterexample action.
pub fn f2_letters() -> [Letter; 4] {
    [
        Letter::new(0, false),
        Letter::new(0, true),
        Letter::new(1, false),
        Letter::new(1, true),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(a: (i64, i64), b: (i64, i64)) -> StepFn {
        StepFn::indicator(&rat(a.0, a.1), &rat(b.0, b.1))
    }

    fn p() -> Precision {
        Precision::default_start()
    }

    #[test]
    fn l1_norm_examples() {
        assert_eq!(l1_norm(&chi((0, 1), (1, 3))), rat(1, 3));
        assert_eq!(
            l1_norm(&StepFn::indicator_scaled(&int(0), &rat(2, 3), rat(1, 2))),
            rat(1, 3)
        );
        let f = StepFn::new(vec![int(0), rat(1, 2), int(1)], vec![int(1), int(-2)]).unwrap();
        assert_eq!(l1_norm(&f), rat(3, 2));
    }

    #[test]
    fn step_fn_validation_and_canonical_form() {
        assert!(StepFn::new(vec![int(0), int(1)], vec![]).is_err());
        assert!(StepFn::new(vec![rat(1, 2), int(1)], vec![int(1)]).is_err());
        assert!(StepFn::new(vec![int(0), rat(1, 2), rat(1, 2), int(1)], vec![int(1); 3]).is_err());
        let f = StepFn::new(vec![int(0), rat(1, 2), int(1)], vec![int(3), int(3)]).unwrap();
        assert_eq!(f, StepFn::constant(int(3)));
    }

    #[test]
    fn step_fn_json_shape() {
        let f = chi((0, 1), (1, 3));
        let js = serde_json::to_value(&f).unwrap();
        assert_eq!(js, serde_json::json!({"breakpoints": ["0", "1/3", "1"], "values": ["1", "0"]}));
        let back: StepFn = serde_json::from_value(js).unwrap();
        assert_eq!(back, f);
        let bad = serde_json::json!({"breakpoints": ["0", "2/3", "1/3", "1"], "values": ["1", "0", "1"]});
        assert!(serde_json::from_value::<StepFn>(bad).is_err());
    }

    #[test]
    fn counterexample_images() {
        let (t1, t2) = f2_counterexample();
        let x = chi((0, 1), (1, 3));
        assert_eq!(
            apply_iso(&t1, &x),
            StepFn::indicator_scaled(&int(0), &rat(2, 3), rat(1, 2))
        );
        assert_eq!(apply_iso(&t2, &x), chi((1, 3), (2, 3)));
        assert_eq!(apply_iso(&L1Iso::identity(), &x), x);
        assert_eq!(t1.map().apply(&rat(1, 3)), Some(rat(2, 3)));
        assert_eq!(
            t1.map().rn_derivative(),
            StepFn::new(vec![int(0), rat(2, 3), int(1)], vec![rat(1, 2), int(2)]).unwrap()
        );
        assert_eq!(apply_iso(&t2, &chi((1, 3), (2, 3))), chi((2, 3), (1, 1)));
    }

    #[test]
    fn composition_laws() {
        let (t1, t2) = f2_counterexample();
        assert_eq!(compose_iso(&t1, &invert_iso(&t1)), L1Iso::identity());
        assert_eq!(compose_iso(&t2, &compose_iso(&t2, &t2)), L1Iso::identity());
        let phi2 = t1.map().compose(t1.map());
        let first = &phi2.pieces()[0];
        assert_eq!((first.s.clone(), first.t.clone()), (int(0), rat(1, 6)));
        assert_eq!(first.slope(), int(4));
        assert_eq!(phi2.rn_derivative().eval(&rat(1, 9)), rat(1, 4));
        let f = StepFn::new(
            vec![int(0), rat(1, 5), rat(3, 4), int(1)],
            vec![int(2), rat(-1, 3), int(5)],
        )
        .unwrap();
        let st = compose_iso(&t1, &t2);
        assert_eq!(apply_iso(&st, &f), apply_iso(&t1, &apply_iso(&t2, &f)));
    }

    #[test]
    fn signed_isometry_composition() {
        let sign = StepFn::new(vec![int(0), rat(1, 2), int(1)], vec![int(1), int(-1)]).unwrap();
        let s = L1Iso::new(IntervalMap::rotation(&rat(1, 4)).unwrap(), sign.clone()).unwrap();
        let (t1, _) = f2_counterexample();
        let t = L1Iso::new(t1.map().clone(), StepFn::indicator_scaled(&int(0), &int(1), int(-1))).unwrap();
        let f = StepFn::new(vec![int(0), rat(1, 7), rat(5, 9), int(1)], vec![int(1), int(-4), rat(1, 2)]).unwrap();
        assert_eq!(apply_iso(&compose_iso(&s, &t), &f), apply_iso(&s, &apply_iso(&t, &f)));
        assert_eq!(apply_iso(&invert_iso(&s), &apply_iso(&s, &f)), f);
        assert_eq!(l1_norm(&apply_iso(&s, &f)), l1_norm(&f));
        assert!(L1Iso::new(IntervalMap::identity(), StepFn::constant(int(2))).is_err());
    }

    #[test]
    fn word_evaluation() {
        let (t1, t2) = f2_counterexample();
        assert_eq!(eval_word(&FreeWord::identity(), &t1, &t2), L1Iso::identity());
        assert_eq!(eval_word(&"a".parse().unwrap(), &t1, &t2), t1);
        let w: FreeWord = "a b a⁻¹".parse().unwrap();
        let x = chi((0, 1), (1, 3));
        let y = apply_iso(&eval_word(&w, &t1, &t2), &x);
        assert_eq!(l1_norm(&y), rat(1, 3));
        assert_eq!(y, apply_word(&w, &t1, &t2, &x));
    }

    #[test]
    fn f2_certificate_is_valid() {
        use crate::renormkit::{check_obstruction, ObstructionVerdict};
        assert_eq!(check_obstruction(&f2_certificate()), ObstructionVerdict::Valid);
    }

    #[test]
    fn invalid_maps_rejected() {
        let gap = IntervalMap::new(vec![Piece::new(int(0), rat(1, 2), int(0), int(1), Orientation::Preserving)]);
        assert!(gap.is_err());
        assert!(IntervalMap::rotation(&int(1)).is_err());
    }

    #[test]
    fn reversing_pieces() {
        let flip = IntervalMap::new(vec![Piece::new(int(0), int(1), int(0), int(1), Orientation::Reversing)]).unwrap();
        let f = chi((0, 1), (1, 4));
        assert_eq!(flip.transport(&f), chi((3, 4), (1, 1)));
        assert_eq!(flip.compose(&flip), IntervalMap::identity());
    }

    #[test]
    fn fd_action_int_generator() {
        let act = fundamental_domain_action(GroupSpec::Int).unwrap();
        let one = GroupElem::Int(1);
        let p = act.piece(&one, &act.identity()).unwrap();
        assert_eq!((p.s.clone(), p.t.clone()), (int(0), rat(1, 2)));
        assert_eq!((p.u.clone(), p.w.clone()), (rat(1, 2), rat(3, 4)));
        assert_eq!(p.rn(), int(2));
        let m = act.generator_map(&one, 6).unwrap();
        assert_eq!(m.apply(&rat(1, 4)), Some(rat(5, 8)));
        let total: Rational = (0..40).map(|k| { let (a, b) = act.interval(k); b - a }).sum();
        assert_eq!(total, Rational::one() - pow2(-40));
        let ids: Vec<(Rational, Rational)> = act.first_elements(6).iter().map(|g| act.interval_of(g).unwrap()).collect();
        for (i, x) in ids.iter().enumerate() {
            for y in &ids[i + 1..] {
                assert!(x.1 <= y.0 || y.1 <= x.0);
            }
        }
    }

    #[test]
    fn fd_action_cyclic_is_exact() {
        let act = fundamental_domain_action(GroupSpec::Cyclic(3)).unwrap();
        let g = act.generators()[0].clone();
        let m = act.generator_map(&g, 3).unwrap();
        let t = L1Iso::lattice(m);
        let t3 = compose_iso(&t, &compose_iso(&t, &t));
        assert_eq!(t3, L1Iso::identity());
        assert!(fundamental_domain_action(GroupSpec::Cyclic(0)).is_err());
    }

    #[test]
    fn fd_action_free_group() {
        let act = fundamental_domain_action(GroupSpec::Free(2)).unwrap();
        let a = GroupElem::Free("a".parse().unwrap());
        let b = GroupElem::Free("b".parse().unwrap());
        let f = StepFn::from_pieces(vec![(int(0), rat(1, 4), int(1)), (rat(1, 2), rat(5, 8), int(-3))]);
        let ab = act.mul(&a, &b).unwrap();
        assert_eq!(act.act(&ab, &f).unwrap(), act.act(&a, &act.act(&b, &f).unwrap()).unwrap());
        assert_eq!(l1_norm(&act.act(&a, &f).unwrap()), l1_norm(&f));
    }

    #[test]
    fn pn_examples() {
        let act = fundamental_domain_action(GroupSpec::Int).unwrap();
        let e = act.identity();
        let v = pn_apply(&act, 1, &chi((0, 1), (1, 2)), std::slice::from_ref(&e)).unwrap();
        assert_eq!(v.get(&e, 1), Some(&rat(1, 2)));
        assert_eq!(v.tail_bound, int(0));
        let v = pn_apply(&act, 2, &StepFn::constant(int(1)), std::slice::from_ref(&e)).unwrap();
        assert_eq!(v.get(&e, 1), Some(&rat(1, 4)));
        assert_eq!(v.get(&e, 2), Some(&rat(1, 4)));
        assert_eq!(v.tail_bound, rat(1, 2));
        let v = pn_apply(&act, 3, &StepFn::zero(), std::slice::from_ref(&e)).unwrap();
        assert!(v.entries.values().all(Zero::is_zero));
        assert!(v.tail_bound.is_zero());
        assert!(matches!(
            pn_apply(&act, 1, &StepFn::zero(), &[GroupElem::Int(1)]),
            Err(L1Error::TruncationWithoutIdentity)
        ));
    }

    #[test]
    fn lp_examples() {
        let act = fundamental_domain_action(GroupSpec::Int).unwrap();
        let v = pn_apply(&act, 2, &chi((0, 1), (1, 2)).scale(&int(2)), &[act.identity()]).unwrap();
        assert_eq!(lp_norm(&v, &int(1), p()).unwrap(), CertReal::exact(int(1)));
        let l2 = lp_norm(&v, &int(2), p()).unwrap();
        let half_root2 = crate::numerics::cert_sqrt(&rat(1, 2), &pow2(-100)).unwrap();
        assert!(l2.lo() <= half_root2.hi() && half_root2.lo() <= l2.hi());
        let l32 = lp_norm(&v, &rat(3, 2), p()).unwrap();
        let oracle = crate::numerics::cert_pow(&int(2), &rat(-1, 3), &pow2(-100)).unwrap();
        assert!(l32.lo() <= oracle.hi() && oracle.lo() <= l32.hi());
        assert!(*l32.radius() <= pow2(-60));
    }

    #[test]
    fn find_np_examples() {
        let act = fundamental_domain_action(GroupSpec::Int).unwrap();
        let half = rat(1, 2);
        let f = StepFn::from_pieces(vec![(int(0), rat(1, 4), int(1)), (rat(1, 4), rat(1, 2), int(-1))]);
        let c = find_np(&act, &f, &half, p()).unwrap();
        assert_eq!(c.n, 2);
        assert!(c.p > Rational::one());
        let c = find_np(&act, &chi((0, 1), (1, 2)), &half, p()).unwrap();
        assert_eq!(c.n, 1);
        assert!(c.value.contains(&half) || c.value.lo() >= half);
        assert!(find_np(&act, &StepFn::zero(), &half, p()).is_err());
        assert!(find_np(&act, &f, &int(1), p()).is_err());
    }
}
