//! A countable subshift `X ⊆ {−2,…,2}^ℤ` carrying a clopen five-set partition
//! on which no invariant norm is strictly convex, and the binary odometer on
//! `2^ℕ` as an instance of an invariant `C(K) + L₂(μ)` renorming.
//!
//! `X` consists of the marker points `M(k,n)` (`0` at `n`, `k` to the right,
//! `−k` to the left, `k ∈ {1,2}`) and the four constants `±1, ±2`. Whether a
//! coordinate `x(j)` of `M(k,n)` is `−k`, `0` or `k` depends only on the sign
//! of `j − n`, so any quantity reading finitely many coordinates is constant
//! on the cells cut out by those coordinates. That is what makes the symbolic
//! verification below cover all of `X`.
//!
//! The Cantor factor of `Y = X × 2^ℕ` only serves to make `Y` perfect: every
//! map acts as the identity on it and every function is pulled back from `X`,
//! so it is not materialized.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linear::Vector;
use crate::numerics::{fmt_rational, int, rat, rational_vec, sqrt_at, CertReal, NumericsError, Precision, Rational};
use crate::renormkit::{Action, ObstructionCertificate, Transform};
use crate::words::FreeWord;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum CantorError {
    #[error("point {0} matches no class of the partition")]
    Unclassified(XPoint),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("table length {len} is not 2^{depth}")]
    TableLength { len: usize, depth: u32 },
    #[error("depth {0} exceeds the supported maximum of 24")]
    DepthTooLarge(u32),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, CantorError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum XPoint {
    Marker { kind: u8, offset: i64 },
    Const { value: i8 },
}

impl XPoint {
    pub fn marker(kind: u8, offset: i64) -> Result<Self> {
        if kind == 1 || kind == 2 {
            Ok(XPoint::Marker { kind, offset })
        } else {
            Err(CantorError::InvalidPoint(format!("marker kind {kind}")))
        }
    }

    pub fn constant(value: i8) -> Result<Self> {
        if matches!(value, -2 | -1 | 1 | 2) {
            Ok(XPoint::Const { value })
        } else {
            Err(CantorError::InvalidPoint(format!("constant {value}")))
        }
    }

    pub fn constants() -> [XPoint; 4] {
        [-2, -1, 1, 2].map(|value| XPoint::Const { value })
    }
}

impl fmt::Display for XPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XPoint::Marker { kind, offset } => write!(f, "M({kind},{offset})"),
            XPoint::Const { value } => write!(f, "const({value})"),
        }
    }
}

/// `x(k)`.
pub fn x_eval(x: &XPoint, k: i64) -> i8 {
    match *x {
        XPoint::Marker { kind, offset } => match k.cmp(&offset) {
            std::cmp::Ordering::Equal => 0,
            std::cmp::Ordering::Greater => kind as i8,
            std::cmp::Ordering::Less => -(kind as i8),
        },
        XPoint::Const { value } => value,
    }
}

/// `σ^power(x)` with `σ(x)(n) = x(n−1)`.
pub fn shift(x: &XPoint, power: i64) -> XPoint {
    match *x {
        XPoint::Marker { kind, offset } => XPoint::Marker {
            kind,
            offset: offset + power,
        },
        c => c,
    }
}

/// The involution exchanging the two isolated points `M(1,0)` and `M(2,0)`.
pub fn swap_map(x: &XPoint) -> XPoint {
    match *x {
        XPoint::Marker { kind, offset: 0 } => XPoint::Marker {
            kind: 3 - kind,
            offset: 0,
        },
        p => p,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Class {
    A,
    B,
    C,
    D,
    E,
}

impl Class {
    pub const ALL: [Class; 5] = [Class::A, Class::B, Class::C, Class::D, Class::E];
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A partition of `X` by the pair `(x(0), x(1))`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub name: String,
    rules: BTreeMap<(i8, i8), Class>,
}

impl Partition {
    pub fn new(name: &str, rules: impl IntoIterator<Item = ((i8, i8), Class)>) -> Self {
        Partition {
            name: name.to_string(),
            rules: rules.into_iter().collect(),
        }
    }

    /// `A = {11, 22}`, `B = {01}`, `C = {02}`, `D = {−10, −1−1}`, `E = {−20, −2−2}`.
    pub fn standard() -> Self {
        Partition::new(
            "standard",
            [
                ((1, 1), Class::A),
                ((2, 2), Class::A),
                ((0, 1), Class::B),
                ((0, 2), Class::C),
                ((-1, 0), Class::D),
                ((-1, -1), Class::D),
                ((-2, 0), Class::E),
                ((-2, -2), Class::E),
            ],
        )
    }

    /// The standard partition with the definitions of `D` and `E` exchanged.
    pub fn swapped_de() -> Self {
        let mut p = Partition::standard();
        p.name = "D/E swapped".into();
        for c in p.rules.values_mut() {
            *c = match *c {
                Class::D => Class::E,
                Class::E => Class::D,
                other => other,
            };
        }
        p
    }

    pub fn classify(&self, x: &XPoint) -> Result<Class> {
        self.rules
            .get(&(x_eval(x, 0), x_eval(x, 1)))
            .copied()
            .ok_or(CantorError::Unclassified(*x))
    }
}

/// `classify` for the standard partition.
pub fn classify(x: &XPoint) -> Class {
    Partition::standard()
        .classify(x)
        .unwrap_or_else(|e| unreachable!("standard partition is total: {e}"))
}

/// A function on `X` that is constant on each class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartFn {
    pub values: BTreeMap<Class, Rational>,
}

impl PartFn {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational, e: Rational) -> Self {
        PartFn {
            values: Class::ALL.into_iter().zip([a, b, c, d, e]).collect(),
        }
    }

    pub fn get(&self, c: Class) -> Rational {
        self.values.get(&c).cloned().unwrap_or_default()
    }
}

/// `f = ½χ_A + χ_B + χ_D`.
pub fn f_standard() -> PartFn {
    PartFn::new(rat(1, 2), int(1), int(0), int(1), int(0))
}

/// `f′ = ½χ_A + χ_C + χ_D`.
pub fn f_prime_standard() -> PartFn {
    PartFn::new(rat(1, 2), int(0), int(1), int(1), int(0))
}

pub fn eval_partition_fn(f: &PartFn, x: &XPoint) -> Rational {
    f.get(classify(x))
}

/// The cells of marker offsets on which every coordinate in `coords` is
/// constant: the singletons `{j}` and the open gaps between and around them.
/// Each cell is `(lo, hi)` with `None` meaning unbounded.
pub fn offset_cells(coords: &BTreeSet<i64>) -> Vec<(Option<i64>, Option<i64>)> {
    let mut cells = Vec::new();
    let mut prev: Option<i64> = None;
    for &j in coords {
        let lo = prev.map(|p| p + 1);
        if lo.is_none_or(|l| l < j) {
            cells.push((lo, Some(j - 1)));
        }
        cells.push((Some(j), Some(j)));
        prev = Some(j);
    }
    cells.push((prev.map(|p| p + 1), None));
    cells
}

fn cell_representative(cell: &(Option<i64>, Option<i64>)) -> i64 {
    match cell {
        (Some(lo), _) => *lo,
        (None, Some(hi)) => *hi,
        (None, None) => 0,
    }
}

fn fmt_cell(kind: u8, cell: &(Option<i64>, Option<i64>)) -> String {
    match cell {
        (Some(a), Some(b)) if a == b => format!("M({kind},{a})"),
        (Some(a), Some(b)) => format!("M({kind},n), {a} ≤ n ≤ {b}"),
        (None, Some(b)) => format!("M({kind},n), n ≤ {b}"),
        (Some(a), None) => format!("M({kind},n), n ≥ {a}"),
        (None, None) => format!("M({kind},n), n ∈ ℤ"),
    }
}

/// Coordinates of `x` read when classifying `σ^p(x)` for each `p` in `powers`.
fn read_coords(powers: &[i64]) -> BTreeSet<i64> {
    powers.iter().flat_map(|p| [-p, 1 - p]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub method: Method,
    pub pass: bool,
    pub cases: usize,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverReport {
    pub partition: String,
    pub window: i64,
    pub checks: Vec<IdentityCheck>,
}

impl CoverReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

type PointTest<'a> = Box<dyn Fn(&XPoint) -> std::result::Result<bool, String> + 'a>;

/// A property of a single point, with the shift powers it reads through.
struct PointProperty<'a> {
    name: String,
    powers: Vec<i64>,
    holds: PointTest<'a>,
}

fn run_exhaustive(prop: &PointProperty<'_>, window: i64) -> IdentityCheck {
    let points = (1..=2u8)
        .flat_map(|k| (-window..=window).map(move |n| XPoint::Marker { kind: k, offset: n }))
        .chain(XPoint::constants());
    let mut cases = 0;
    for x in points {
        cases += 1;
        match (prop.holds)(&x) {
            Ok(true) => {}
            Ok(false) => return failed(prop, Method::Exhaustive, cases, x.to_string()),
            Err(why) => return failed(prop, Method::Exhaustive, cases, format!("{x}: {why}")),
        }
    }
    IdentityCheck {
        identity: prop.name.clone(),
        method: Method::Exhaustive,
        pass: true,
        cases,
        witness: None,
    }
}

fn run_symbolic(prop: &PointProperty<'_>) -> IdentityCheck {
    let cells = offset_cells(&read_coords(&prop.powers));
    let mut cases = 0;
    for k in 1..=2u8 {
        for cell in &cells {
            cases += 1;
            let x = XPoint::Marker {
                kind: k,
                offset: cell_representative(cell),
            };
            match (prop.holds)(&x) {
                Ok(true) => {}
                Ok(false) => return failed(prop, Method::Symbolic, cases, fmt_cell(k, cell)),
                Err(why) => return failed(prop, Method::Symbolic, cases, format!("{}: {why}", fmt_cell(k, cell))),
            }
        }
    }
    for x in XPoint::constants() {
        cases += 1;
        match (prop.holds)(&x) {
            Ok(true) => {}
            Ok(false) => return failed(prop, Method::Symbolic, cases, x.to_string()),
            Err(why) => return failed(prop, Method::Symbolic, cases, format!("{x}: {why}")),
        }
    }
    IdentityCheck {
        identity: prop.name.clone(),
        method: Method::Symbolic,
        pass: true,
        cases,
        witness: None,
    }
}

fn failed(prop: &PointProperty<'_>, method: Method, cases: usize, witness: String) -> IdentityCheck {
    IdentityCheck {
        identity: prop.name.clone(),
        method,
        pass: false,
        cases,
        witness: Some(witness),
    }
}

fn class_set(cs: &[Class]) -> String {
    cs.iter().map(Class::to_string).collect::<Vec<_>>().join("∪")
}

/// Verifies, for `partition`, that the classes partition `X` and are nonempty,
/// the image identities `σ[A] = A∪B∪C`, `σ[B∪D] = D`, `σ[C∪E] = E`,
/// `t[A,D,E]` fixed and `t[B] = C`, `t[C] = B` for the swap `t`, and the
/// pointwise identities `f∘σ⁻¹ = (f + f′)/2` and `f∘t = f′`. Every property is
/// checked on the window `|n| ≤ window` and symbolically on all of `X`.
pub fn verify_cover_identities_with(partition: &Partition, window: i64) -> CoverReport {
    let cl = |x: &XPoint| partition.classify(x).map_err(|e| e.to_string());
    let mut props: Vec<PointProperty<'_>> = vec![PointProperty {
        name: "classes partition X".into(),
        powers: vec![0],
        holds: Box::new(move |x| cl(x).map(|_| true)),
    }];
    // σ[S] = T  ⟺  ∀x: x ∈ S ⟺ σx ∈ T, since σ is a bijection of X.
    let image_identities: [(&[Class], &[Class]); 3] = [
        (&[Class::A], &[Class::A, Class::B, Class::C]),
        (&[Class::B, Class::D], &[Class::D]),
        (&[Class::C, Class::E], &[Class::E]),
    ];
    for (src, dst) in image_identities {
        props.push(PointProperty {
            name: format!("σ[{}] = {}", class_set(src), class_set(dst)),
            powers: vec![0, 1],
            holds: Box::new(move |x| Ok(src.contains(&cl(x)?) == dst.contains(&cl(&shift(x, 1))?))),
        });
    }
    let swap_images: [(Class, Class); 5] = [
        (Class::A, Class::A),
        (Class::B, Class::C),
        (Class::C, Class::B),
        (Class::D, Class::D),
        (Class::E, Class::E),
    ];
    for (src, dst) in swap_images {
        props.push(PointProperty {
            name: format!("t[{src}] = {dst}"),
            powers: vec![0],
            holds: Box::new(move |x| Ok((cl(x)? == src) == (cl(&swap_map(x))? == dst))),
        });
    }
    let (f, fp) = (f_standard(), f_prime_standard());
    let (f2, fp2) = (f.clone(), fp.clone());
    props.push(PointProperty {
        name: "f(σ⁻¹x) = (f(x) + f′(x))/2".into(),
        powers: vec![0, -1],
        holds: Box::new(move |x| {
            let lhs = f.get(cl(&shift(x, -1))?);
            let c = cl(x)?;
            Ok(lhs == (f.get(c) + fp.get(c)) / int(2))
        }),
    });
    props.push(PointProperty {
        name: "f(t(x)) = f′(x)".into(),
        powers: vec![0],
        holds: Box::new(move |x| Ok(f2.get(cl(&swap_map(x))?) == fp2.get(cl(x)?))),
    });
    let mut checks = Vec::new();
    for prop in &props {
        checks.push(run_exhaustive(prop, window));
        checks.push(run_symbolic(prop));
    }
    for c in Class::ALL {
        let witness = (1..=2u8)
            .flat_map(|k| (-3..=3).map(move |n| XPoint::Marker { kind: k, offset: n }))
            .chain(XPoint::constants())
            .find(|x| partition.classify(x) == Ok(c));
        checks.push(IdentityCheck {
            identity: format!("{c} is nonempty"),
            method: Method::Exhaustive,
            pass: witness.is_some(),
            cases: 1,
            witness: witness.map(|x| x.to_string()),
        });
    }
    CoverReport {
        partition: partition.name.clone(),
        window,
        checks,
    }
}

pub fn verify_cover_identities(window: i64) -> CoverReport {
    verify_cover_identities_with(&Partition::standard(), window)
}

/// A continuous-or-not function on `X` that is eventually constant along each
/// marker orbit: explicit values for offsets `lo..lo+len`, one value below and
/// one above, plus the four constants. Canonical, so `==` is equality on `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct XFn {
    markers: [MarkerRow; 2],
    consts: [Rational; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct MarkerRow {
    lo: i64,
    vals: Vec<Rational>,
    below: Rational,
    above: Rational,
}

impl MarkerRow {
    fn get(&self, n: i64) -> Rational {
        if n < self.lo {
            self.below.clone()
        } else {
            usize::try_from(n - self.lo)
                .ok()
                .and_then(|i| self.vals.get(i))
                .cloned()
                .unwrap_or_else(|| self.above.clone())
        }
    }

    fn span(&self) -> (i64, i64) {
        (self.lo, self.lo + self.vals.len() as i64)
    }

    fn canonical(mut self) -> Self {
        while self.vals.last() == Some(&self.above) {
            self.vals.pop();
        }
        let lead = self.vals.iter().take_while(|v| **v == self.below).count();
        self.vals.drain(..lead);
        self.lo += lead as i64;
        if self.is_constant() {
            self.lo = 0;
        }
        self
    }

    fn is_constant(&self) -> bool {
        self.vals.is_empty() && self.below == self.above
    }

    fn tabulate(lo: i64, hi: i64, f: impl Fn(i64) -> Rational) -> Self {
        MarkerRow {
            lo,
            vals: (lo..hi).map(&f).collect(),
            below: f(lo - 1),
            above: f(hi),
        }
        .canonical()
    }
}

fn const_slot(v: i8) -> usize {
    match v {
        -2 => 0,
        -1 => 1,
        1 => 2,
        _ => 3,
    }
}

impl XFn {
    /// Tabulates `f`, which must be constant on marker offsets `< lo` and `≥ hi`.
    pub fn tabulate(lo: i64, hi: i64, f: impl Fn(&XPoint) -> Rational) -> Self {
        let row = |k: u8| MarkerRow::tabulate(lo, hi, |n| f(&XPoint::Marker { kind: k, offset: n }));
        XFn {
            markers: [row(1), row(2)],
            consts: XPoint::constants().map(|x| f(&x)),
        }
    }

    pub fn from_partition_fn(p: &Partition, f: &PartFn) -> Result<Self> {
        for x in (1..=2u8).flat_map(|k| (-1..=2).map(move |n| XPoint::Marker { kind: k, offset: n })) {
            p.classify(&x)?;
        }
        for x in XPoint::constants() {
            p.classify(&x)?;
        }
        Ok(XFn::tabulate(0, 2, |x| p.classify(x).map(|c| f.get(c)).unwrap_or_default()))
    }

    pub fn eval(&self, x: &XPoint) -> Rational {
        match *x {
            XPoint::Marker { kind, offset } => self.markers[(kind - 1) as usize].get(offset),
            XPoint::Const { value } => self.consts[const_slot(value)].clone(),
        }
    }

    /// `(F∘σ^{−p})`, the action of `σ^p` on functions.
    pub fn shift_action(&self, p: i64) -> XFn {
        let mut out = self.clone();
        for row in &mut out.markers {
            if !row.is_constant() {
                row.lo += p;
            }
        }
        out
    }

    /// `F∘t`, the action of the swap (an involution).
    pub fn swap_action(&self) -> XFn {
        let (a, b) = (self.markers[0].span(), self.markers[1].span());
        let lo = a.0.min(b.0).min(0);
        let hi = a.1.max(b.1).max(1);
        XFn::tabulate(lo, hi, |x| self.eval(&swap_map(x)))
    }

    /// Continuity on `X`: `M(k,n) → const(k)` as `n → −∞` and `→ const(−k)` as `n → +∞`.
    pub fn is_continuous(&self) -> bool {
        (1..=2i8).all(|k| {
            let row = &self.markers[(k - 1) as usize];
            row.below == self.consts[const_slot(k)] && row.above == self.consts[const_slot(-k)]
        })
    }

    pub fn sup_norm(&self) -> Rational {
        self.markers
            .iter()
            .flat_map(|r| r.vals.iter().chain([&r.below, &r.above]))
            .chain(&self.consts)
            .map(Signed::abs)
            .max()
            .unwrap_or_default()
    }

    fn window(&self, other: &XFn) -> (i64, i64) {
        let spans = self.markers.iter().chain(&other.markers).filter(|r| !r.is_constant()).map(MarkerRow::span);
        spans.fold((0, 0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)))
    }

    fn zip(&self, other: &XFn, op: impl Fn(&Rational, &Rational) -> Rational) -> XFn {
        let (lo, hi) = self.window(other);
        XFn::tabulate(lo, hi, |x| op(&self.eval(x), &other.eval(x)))
    }
}

impl fmt::Display for XFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

impl Vector for XFn {
    fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    fn scale(&self, c: &Rational) -> Self {
        self.zip(self, |a, _| a * c)
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let (lo, hi) = self.window(other);
        let points: Vec<XPoint> = (1..=2u8)
            .flat_map(|k| (lo - 1..=hi).map(move |n| XPoint::Marker { kind: k, offset: n }))
            .chain(XPoint::constants())
            .collect();
        (
            points.iter().map(|x| self.eval(x)).collect(),
            points.iter().map(|x| other.eval(x)).collect(),
        )
    }

    fn to_json(&self) -> serde_json::Value {
        let row = |r: &MarkerRow| {
            serde_json::json!({
                "from": r.lo,
                "values": r.vals.iter().map(fmt_rational).collect::<Vec<_>>(),
                "below": fmt_rational(&r.below),
                "above": fmt_rational(&r.above),
            })
        };
        serde_json::json!({
            "marker1": row(&self.markers[0]),
            "marker2": row(&self.markers[1]),
            "constants": {
                "-2": fmt_rational(&self.consts[0]),
                "-1": fmt_rational(&self.consts[1]),
                "1": fmt_rational(&self.consts[2]),
                "2": fmt_rational(&self.consts[3]),
            },
        })
    }
}

/// The `F₂` action on `C(X)`: generator `a` is the shift, `b` the swap.
pub fn subshift_action() -> Action<XFn> {
    Action::new(
        "C(X), a = shift σ, b = swap t",
        vec![
            (
                Transform::new("σ", |f: &XFn| f.shift_action(1)),
                Transform::new("σ⁻¹", |f: &XFn| f.shift_action(-1)),
            ),
            (
                Transform::new("t", XFn::swap_action),
                Transform::new("t", XFn::swap_action),
            ),
        ],
    )
}

/// `x = f`, `y = f′`, `g = t` (so `g·x = y`), `h = σ` (so `h·x = (x+y)/2`).
pub fn subshift_certificate() -> ObstructionCertificate<XFn> {
    let p = Partition::standard();
    let f = XFn::from_partition_fn(&p, &f_standard()).unwrap_or_else(|e| unreachable!("{e}"));
    let fp = XFn::from_partition_fn(&p, &f_prime_standard()).unwrap_or_else(|e| unreachable!("{e}"));
    ObstructionCertificate {
        space: "C(X × 2^ℕ)".into(),
        x: f,
        y: fp,
        g_word: FreeWord::generator(1),
        h_word: FreeWord::generator(0),
        action: subshift_action(),
    }
}

/// A function on `2^ℕ` depending on the first `depth` coordinates; `table[i]`
/// is its value on the cylinder with `x_j` the `(j−1)`-th bit of `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "CylFnRepr", into = "CylFnRepr")]
pub struct CylFn {
    depth: u32,
    table: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct CylFnRepr {
    depth: u32,
    #[serde(with = "rational_vec")]
    table: Vec<Rational>,
}

impl TryFrom<CylFnRepr> for CylFn {
    type Error = CantorError;
    fn try_from(r: CylFnRepr) -> Result<Self> {
        CylFn::new(r.depth, r.table)
    }
}

impl From<CylFn> for CylFnRepr {
    fn from(f: CylFn) -> Self {
        CylFnRepr {
            depth: f.depth,
            table: f.table,
        }
    }
}

pub const MAX_CYL_DEPTH: u32 = 24;

impl CylFn {
    pub fn new(depth: u32, table: Vec<Rational>) -> Result<Self> {
        if depth > MAX_CYL_DEPTH {
            return Err(CantorError::DepthTooLarge(depth));
        }
        if table.len() != 1usize << depth {
            return Err(CantorError::TableLength { len: table.len(), depth });
        }
        Ok(CylFn { depth, table }.canonical())
    }

    pub fn constant(v: Rational) -> Self {
        CylFn { depth: 0, table: vec![v] }
    }

    /// `χ` of the cylinder `[x₁…x_m = bits]`.
    pub fn cylinder(bits: &[bool]) -> Self {
        let depth = bits.len() as u32;
        let idx: usize = bits.iter().enumerate().map(|(j, b)| (*b as usize) << j).sum();
        let table = (0..1usize << depth).map(|i| int((i == idx) as i64)).collect();
        CylFn { depth, table }.canonical()
    }

    /// Drops trailing coordinates the function does not depend on.
    fn canonical(mut self) -> Self {
        while self.depth > 0 {
            let half = 1usize << (self.depth - 1);
            if self.table[..half] != self.table[half..] {
                break;
            }
            self.table.truncate(half);
            self.depth -= 1;
        }
        self
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    fn at_depth(&self, m: u32) -> Vec<Rational> {
        let n = 1usize << m;
        let k = self.table.len();
        (0..n).map(|i| self.table[i % k].clone()).collect()
    }

    pub fn sup_norm(&self) -> Rational {
        self.table.iter().map(Signed::abs).max().unwrap_or_default()
    }

    /// `‖F‖²_{L₂(μ)}` for the coin-flip measure.
    pub fn l2_sq_norm(&self) -> Rational {
        let s: Rational = self.table.iter().map(|t| t * t).sum();
        s / Rational::from_integer(num_bigint::BigInt::from(1u8) << self.depth as usize)
    }
}

impl Vector for CylFn {
    fn add(&self, other: &Self) -> Self {
        let m = self.depth.max(other.depth);
        let table = self.at_depth(m).iter().zip(other.at_depth(m)).map(|(a, b)| a + b).collect();
        CylFn { depth: m, table }.canonical()
    }

    fn scale(&self, c: &Rational) -> Self {
        CylFn {
            depth: self.depth,
            table: self.table.iter().map(|t| t * c).collect(),
        }
        .canonical()
    }

    fn common_coords(&self, other: &Self) -> (Vec<Rational>, Vec<Rational>) {
        let m = self.depth.max(other.depth);
        (self.at_depth(m), other.at_depth(m))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap_or(serde_json::Value::Null)
    }
}

/// `F ↦ F∘φ⁻¹` for the odometer `φ` (add one with carry, `x₁` least significant).
pub fn odometer_act(f: &CylFn) -> CylFn {
    odometer_act_power(f, 1)
}

/// `F ↦ F∘φ^{−p}`.
pub fn odometer_act_power(f: &CylFn, p: i64) -> CylFn {
    let n = f.table.len() as i64;
    let table = (0..n)
        .map(|i| f.table[(i - p).rem_euclid(n) as usize].clone())
        .collect();
    CylFn { depth: f.depth, table }.canonical()
}

/// `(‖F‖_∞, ‖F‖²_{L₂(μ)})`, both exact.
pub fn odometer_sc_parts(f: &CylFn) -> (Rational, Rational) {
    (f.sup_norm(), f.l2_sq_norm())
}

/// `‖F‖_∞ + ‖F‖_{L₂(μ)}`.
pub fn odometer_sc_norm(f: &CylFn, prec: Precision) -> Result<CertReal> {
    let (sup, sq) = odometer_sc_parts(f);
    Ok(CertReal::exact(sup) + sqrt_at(&sq, prec)?)
}

/// The 64 test functions: the zero function and every cylinder indicator of depth ≤ 5.
pub fn odometer_fixture() -> Vec<CylFn> {
    let mut out = vec![CylFn::constant(Rational::zero())];
    for m in 0..=5u32 {
        for i in 0..1usize << m {
            let bits: Vec<bool> = (0..m).map(|j| i >> j & 1 == 1).collect();
            out.push(CylFn::cylinder(&bits));
        }
    }
    out
}

/// The `ℤ`-action on `C(2^ℕ)` generated by the odometer.
pub fn odometer_action() -> Action<CylFn> {
    Action::new(
        "C(2^ℕ), a = odometer",
        vec![(
            Transform::new("φ", odometer_act),
            Transform::new("φ⁻¹", |f: &CylFn| odometer_act_power(f, -1)),
        )],
    )
}
