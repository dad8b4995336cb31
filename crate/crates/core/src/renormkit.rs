//! Generic renorming constructions and the checkers that verify them.
//!
//! Norms are [`NormOracle`]s returning certified enclosures; group actions are
//! lists of generator [`Transform`]s addressed by free-group words. Every
//! checker returns a [`Report`] whose verdict is derived only from exactly
//! equal or disjoint enclosures.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cantorspace::{CantorError, CylFn};
use crate::l1space::{L1Error, StepFn};
use crate::linear::{RVec, Vector};
use crate::numerics::{fmt_rational, int, rat, CertOrdering, CertReal, NumericsError, Precision, Rational};
use crate::seqspace::{Ambient, Block, BlockIso, BlockVec, CSeq, IsoCElem, RatMatrix, SeqError, Sign};
use crate::words::{FreeWord, Letter};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RenormError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("operator bound {bound} of summand {index} exceeds 1")]
    OperatorBound { index: usize, bound: String },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

impl From<SeqError> for RenormError {
    fn from(e: SeqError) -> Self {
        match e {
            SeqError::Numerics(n) => RenormError::Numerics(n),
            other => RenormError::Evaluation(other.to_string()),
        }
    }
}

impl From<L1Error> for RenormError {
    fn from(e: L1Error) -> Self {
        match e {
            L1Error::Numerics(n) => RenormError::Numerics(n),
            other => RenormError::Evaluation(other.to_string()),
        }
    }
}

impl From<CantorError> for RenormError {
    fn from(e: CantorError) -> Self {
        match e {
            CantorError::Numerics(n) => RenormError::Numerics(n),
            other => RenormError::Evaluation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, RenormError>;

type EvalFn<V> = Arc<dyn Fn(&V, Precision) -> Result<CertReal> + Send + Sync>;
type KeyFn<V> = Arc<dyn Fn(&V) -> Result<Vec<Rational>> + Send + Sync>;
type MapFn<V, W> = Arc<dyn Fn(&V) -> W + Send + Sync>;
type SqFn<W> = Arc<dyn Fn(&W) -> Rational + Send + Sync>;

/// A norm with certified evaluation.
///
/// `key`, when present, returns exact rational data from which the value is
/// computed deterministically (for example `(‖x‖_∞, radicand)`); equal keys
/// certify equal values with radius 0.
#[derive(Clone)]
pub struct NormOracle<V> {
    pub tag: String,
    pub exact: bool,
    pub claimed_bounds: Option<(Rational, Rational)>,
    eval: EvalFn<V>,
    key: Option<KeyFn<V>>,
}

impl<V> fmt::Debug for NormOracle<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormOracle")
            .field("tag", &self.tag)
            .field("exact", &self.exact)
            .finish_non_exhaustive()
    }
}

impl<V: 'static> NormOracle<V> {
    pub fn new<E>(tag: &str, eval: impl Fn(&V, Precision) -> std::result::Result<CertReal, E> + Send + Sync + 'static) -> Self
    where
        RenormError: From<E>,
    {
        NormOracle {
            tag: tag.to_string(),
            exact: false,
            claimed_bounds: None,
            eval: Arc::new(move |v, p| eval(v, p).map_err(RenormError::from)),
            key: None,
        }
    }

    /// A norm with rational values.
    pub fn rational(tag: &str, f: impl Fn(&V) -> Rational + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        let g = f.clone();
        NormOracle {
            tag: tag.to_string(),
            exact: true,
            claimed_bounds: None,
            eval: Arc::new(move |v, _| Ok(CertReal::exact(f(v)))),
            key: Some(Arc::new(move |v| Ok(vec![g(v)]))),
        }
    }

    pub fn with_key<E>(mut self, key: impl Fn(&V) -> std::result::Result<Vec<Rational>, E> + Send + Sync + 'static) -> Self
    where
        RenormError: From<E>,
    {
        self.key = Some(Arc::new(move |v| key(v).map_err(RenormError::from)));
        self
    }

    pub fn with_bounds(mut self, c: Rational, big_c: Rational) -> Self {
        self.claimed_bounds = Some((c, big_c));
        self
    }

    pub fn eval(&self, v: &V, prec: Precision) -> Result<CertReal> {
        (self.eval)(v, prec)
    }

    pub fn key(&self, v: &V) -> Option<Result<Vec<Rational>>> {
        self.key.as_ref().map(|k| k(v))
    }
}

/// A named linear map of a space into itself.
#[derive(Clone)]
pub struct Transform<V> {
    pub label: String,
    f: MapFn<V, V>,
}

impl<V> fmt::Debug for Transform<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Transform({})", self.label)
    }
}

impl<V> Transform<V> {
    pub fn new(label: &str, f: impl Fn(&V) -> V + Send + Sync + 'static) -> Self {
        Transform {
            label: label.to_string(),
            f: Arc::new(f),
        }
    }

    pub fn apply(&self, v: &V) -> V {
        (self.f)(v)
    }
}

/// An action of a free group: generator `i` acts by `generators[i].0`, its
/// inverse by `generators[i].1`.
#[derive(Clone, Debug)]
pub struct Action<V> {
    pub name: String,
    pub generators: Vec<(Transform<V>, Transform<V>)>,
}

impl<V: Clone> Action<V> {
    pub fn new(name: &str, generators: Vec<(Transform<V>, Transform<V>)>) -> Self {
        Action {
            name: name.to_string(),
            generators,
        }
    }

    /// The trivial action of the free group on `rank` generators.
    pub fn trivial(rank: usize) -> Self
    where
        V: 'static,
    {
        let id = || Transform::new("id", |v: &V| v.clone());
        Action::new("trivial", (0..rank).map(|_| (id(), id())).collect())
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letter(&self, l: Letter) -> Option<&Transform<V>> {
        self.generators
            .get(l.generator as usize)
            .map(|(g, ginv)| if l.inverse { ginv } else { g })
    }

    /// `w·v`; the rightmost letter acts first.
    pub fn apply_word(&self, w: &FreeWord, v: &V) -> V {
        w.letters().iter().rev().fold(v.clone(), |acc, l| match self.letter(*l) {
            Some(t) => t.apply(&acc),
            None => panic!("word {w} uses generator {} outside an action of rank {}", l.generator, self.rank()),
        })
    }

    pub fn accepts(&self, w: &FreeWord) -> bool {
        w.max_generator().is_none_or(|g| (g as usize) < self.rank())
    }
}

/// A bounded linear map `V → W` with a norm on `W`.
#[derive(Clone)]
pub struct EquivariantMapDescriptor<V, W> {
    pub tag: String,
    map: MapFn<V, W>,
    pub codomain_norm: NormOracle<W>,
    /// Exact `‖w‖²` on the codomain, when available.
    pub codomain_norm_sq: Option<SqFn<W>>,
    /// A rational upper bound for the operator norm.
    pub operator_bound: Rational,
    /// The exact square of the operator norm, when known.
    pub operator_norm_sq: Option<Rational>,
    pub injectivity: Option<Injectivity<V>>,
}

impl<V, W> fmt::Debug for EquivariantMapDescriptor<V, W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EquivariantMapDescriptor")
            .field("tag", &self.tag)
            .field("operator_bound", &fmt_rational(&self.operator_bound))
            .finish_non_exhaustive()
    }
}

/// `‖T w‖ ≥ constant·‖w‖` for every `w` in the witness family.
#[derive(Clone, Debug)]
pub struct Injectivity<V> {
    pub constant: Rational,
    pub witnesses: Vec<V>,
}

impl<V: 'static, W: 'static> EquivariantMapDescriptor<V, W> {
    pub fn new(
        tag: &str,
        map: impl Fn(&V) -> W + Send + Sync + 'static,
        codomain_norm: NormOracle<W>,
        operator_bound: Rational,
    ) -> Self {
        EquivariantMapDescriptor {
            tag: tag.to_string(),
            map: Arc::new(map),
            codomain_norm,
            codomain_norm_sq: None,
            operator_bound,
            operator_norm_sq: None,
            injectivity: None,
        }
    }

    pub fn with_norm_sq(mut self, sq: impl Fn(&W) -> Rational + Send + Sync + 'static) -> Self {
        self.codomain_norm_sq = Some(Arc::new(sq));
        self
    }

    pub fn with_operator_norm_sq(mut self, sq: Rational) -> Self {
        self.operator_norm_sq = Some(sq);
        self
    }

    pub fn with_injectivity(mut self, constant: Rational, witnesses: Vec<V>) -> Self {
        self.injectivity = Some(Injectivity { constant, witnesses });
        self
    }

    pub fn apply(&self, v: &V) -> W {
        (self.map)(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Outcome of a check over a list of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub check: String,
    pub instance: String,
    pub seed: Option<u64>,
    pub trials: usize,
    pub verdict: Verdict,
    pub witnesses: Vec<serde_json::Value>,
    pub max_radius: String,
    pub refinements: u32,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    /// A report over exact checks, each `(holds, witness)`.
    pub fn from_checks(check: &str, instance: &str, checks: Vec<(bool, serde_json::Value)>) -> Report {
        let outcomes = checks
            .into_iter()
            .map(|(ok, w)| Ok(Outcome::new(if ok { Verdict::Pass } else { Verdict::Fail }, w)))
            .collect();
        assemble(check, instance, outcomes).unwrap_or_else(|e: RenormError| unreachable!("exact checks cannot fail: {e}"))
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Passing witnesses kept per report, besides every failure.
const KEPT_PASSES: usize = 3;
const KEPT_FAILURES: usize = 16;

/// Per-sample result fed into [`assemble`].
struct Outcome {
    verdict: Verdict,
    witness: serde_json::Value,
    radius: Rational,
    refinements: u32,
    note: Option<String>,
}

impl Outcome {
    fn new(verdict: Verdict, witness: serde_json::Value) -> Self {
        Outcome {
            verdict,
            witness,
            radius: Rational::zero(),
            refinements: 0,
            note: None,
        }
    }

    fn radius(mut self, r: Rational) -> Self {
        self.radius = r;
        self
    }

    fn refinements(mut self, n: u32) -> Self {
        self.refinements = n;
        self
    }
}

fn assemble(check: &str, instance: &str, outcomes: Vec<Result<Outcome>>) -> Result<Report> {
    let trials = outcomes.len();
    let mut verdict = Verdict::Pass;
    let mut witnesses = Vec::new();
    let mut passes_kept = 0;
    let mut failures_kept = 0;
    let mut max_radius = Rational::zero();
    let mut refinements = 0;
    let mut notes: Vec<String> = Vec::new();
    for o in outcomes {
        let o = o?;
        max_radius = max_radius.max(o.radius.clone());
        refinements = refinements.max(o.refinements);
        if let Some(n) = o.note {
            if !notes.contains(&n) {
                notes.push(n);
            }
        }
        match o.verdict {
            Verdict::Pass => {
                if passes_kept < KEPT_PASSES {
                    passes_kept += 1;
                    witnesses.push(o.witness);
                }
            }
            v => {
                if v == Verdict::Fail || verdict == Verdict::Pass {
                    verdict = v;
                }
                if failures_kept < KEPT_FAILURES {
                    failures_kept += 1;
                    witnesses.push(o.witness);
                }
            }
        }
    }
    Ok(Report {
        check: check.to_string(),
        instance: instance.to_string(),
        seed: None,
        trials,
        verdict,
        witnesses,
        max_radius: fmt_rational(&max_radius),
        refinements,
        notes,
    })
}

/// Evaluates `N` at `x` and `y` with refinement until the enclosures are
/// disjoint, exactly equal, or the precision cap is reached.
fn refine_pair<F>(start: Precision, mut eval: F) -> Result<crate::numerics::RefinedComparison>
where
    F: FnMut(Precision) -> Result<(CertReal, CertReal)>,
{
    let mut err = None;
    let r = crate::numerics::compare_refining(start, |p| {
        eval(p).map_err(|e| {
            let msg = e.to_string();
            err = Some(e);
            NumericsError::Parse(msg)
        })
    });
    match (r, err) {
        (_, Some(e)) => Err(e),
        (r, None) => Ok(r?),
    }
}

/// Certified `a ≤ b`: `Some(true)` when `hi(a) ≤ lo(b)`, `Some(false)` when
/// `lo(a) > hi(b)`, `None` when the enclosures still overlap at the cap.
fn certified_le<F>(start: Precision, mut eval: F) -> Result<(Option<bool>, CertReal, CertReal, u32)>
where
    F: FnMut(Precision) -> Result<(CertReal, CertReal)>,
{
    let mut prec = start;
    let mut refinements = 0;
    loop {
        let (a, b) = eval(prec)?;
        if a.hi() <= b.lo() {
            return Ok((Some(true), a, b, refinements));
        }
        if a.lo() > b.hi() {
            return Ok((Some(false), a, b, refinements));
        }
        match prec.refine() {
            Some(p) => {
                prec = p;
                refinements += 1;
            }
            None => return Ok((None, a, b, refinements)),
        }
    }
}

fn cert_json(c: &CertReal) -> serde_json::Value {
    serde_json::to_value(c).unwrap_or(serde_json::Value::Null)
}

/// Checks `N(w·x) = N(x)` for every word and vector.
pub fn check_invariance<V: Vector>(
    n: &NormOracle<V>,
    action: &Action<V>,
    vectors: &[V],
    words: &[FreeWord],
    prec: Precision,
) -> Result<Report> {
    let items: Vec<(String, V, V)> = words
        .iter()
        .flat_map(|w| vectors.iter().map(move |x| (w.to_string(), x.clone(), action.apply_word(w, x))))
        .collect();
    check_invariance_on(n, &format!("{} under {}", n.tag, action.name), &items, prec)
}

/// Checks `N(gx) = N(x)` on explicit triples `(label of g, x, gx)`.
pub fn check_invariance_on<V: Vector>(
    n: &NormOracle<V>,
    instance: &str,
    items: &[(String, V, V)],
    prec: Precision,
) -> Result<Report> {
    let outcomes: Vec<Result<Outcome>> = items
        .par_iter()
        .map(|(label, x, gx)| {
            let base = serde_json::json!({"g": label, "x": x.to_json(), "gx": gx.to_json()});
            if let (Some(kx), Some(kg)) = (n.key(x), n.key(gx)) {
                if kx? == kg? {
                    let mut wit = base;
                    wit["status"] = "EQUAL_EXACT_DATA".into();
                    return Ok(Outcome::new(Verdict::Pass, wit));
                }
            }
            let r = refine_pair(prec, |p| Ok((n.eval(x, p)?, n.eval(gx, p)?)))?;
            let radius = r.lhs.radius().clone().max(r.rhs.radius().clone());
            let mut wit = base;
            wit["value_x"] = cert_json(&r.lhs);
            wit["value_gx"] = cert_json(&r.rhs);
            wit["refinements"] = r.refinements.into();
            let (verdict, status, note) = match r.ordering {
                CertOrdering::Eq => (Verdict::Pass, "EQUAL_EXACT", None),
                CertOrdering::Lt | CertOrdering::Gt => (Verdict::Fail, "SEPARATED", None),
                CertOrdering::Inconclusive => (
                    Verdict::Pass,
                    "WITHIN_RADII",
                    Some("some values agree only within certified radii at the precision cap".to_string()),
                ),
            };
            wit["status"] = status.into();
            let mut o = Outcome::new(verdict, wit).radius(radius).refinements(r.refinements);
            o.note = note;
            Ok(o)
        })
        .collect();
    assemble("invariance", instance, outcomes)
}

/// Checks `T(w·x) = w·T(x)` with a caller-supplied comparison on `W`.
pub fn check_equivariance_by<V: Vector, W: Vector>(
    d: &EquivariantMapDescriptor<V, W>,
    domain: &Action<V>,
    codomain: &Action<W>,
    vectors: &[V],
    words: &[FreeWord],
    same: impl Fn(&W, &W) -> bool + Sync,
) -> Result<Report> {
    let pairs: Vec<(&FreeWord, &V)> = words.iter().flat_map(|w| vectors.iter().map(move |x| (w, x))).collect();
    let outcomes = pairs
        .par_iter()
        .map(|(w, x)| {
            let lhs = d.apply(&domain.apply_word(w, x));
            let rhs = codomain.apply_word(w, &d.apply(x));
            let ok = same(&lhs, &rhs);
            let wit = serde_json::json!({
                "word": w.to_string(),
                "x": x.to_json(),
                "map_of_gx": lhs.to_json(),
                "g_of_map_x": rhs.to_json(),
            });
            Ok(Outcome::new(if ok { Verdict::Pass } else { Verdict::Fail }, wit))
        })
        .collect();
    assemble(
        "equivariance",
        &format!("{} from {} to {}", d.tag, domain.name, codomain.name),
        outcomes,
    )
}

pub fn check_equivariance<V: Vector, W: Vector>(
    d: &EquivariantMapDescriptor<V, W>,
    domain: &Action<V>,
    codomain: &Action<W>,
    vectors: &[V],
    words: &[FreeWord],
) -> Result<Report> {
    check_equivariance_by(d, domain, codomain, vectors, words, |a, b| a == b)
}

/// Checks `N(x + y) < N(x) + N(y)` on each pair of non-parallel vectors.
/// Parallel pairs are skipped and counted in the notes.
pub fn check_strict_convexity<V: Vector>(n: &NormOracle<V>, pairs: &[(V, V)], prec: Precision) -> Result<Report> {
    let skipped = pairs.iter().filter(|(x, y)| x.is_parallel(y)).count();
    let outcomes = pairs
        .par_iter()
        .filter(|(x, y)| !x.is_parallel(y))
        .map(|(x, y)| {
            let s = x.add(y);
            let r = refine_pair(prec, |p| Ok((n.eval(&s, p)?, n.eval(x, p)? + n.eval(y, p)?)))?;
            let verdict = match r.ordering {
                CertOrdering::Lt => Verdict::Pass,
                CertOrdering::Eq | CertOrdering::Gt => Verdict::Fail,
                CertOrdering::Inconclusive => Verdict::Inconclusive,
            };
            let gap = r.rhs.lo() - r.lhs.hi();
            let wit = serde_json::json!({
                "x": x.to_json(),
                "y": y.to_json(),
                "norm_sum": cert_json(&r.lhs),
                "sum_of_norms": cert_json(&r.rhs),
                "certified_gap": fmt_rational(&gap),
                "refinements": r.refinements,
            });
            let radius = r.lhs.radius().clone().max(r.rhs.radius().clone());
            Ok(Outcome::new(verdict, wit).radius(radius).refinements(r.refinements))
        })
        .collect();
    let mut report = assemble("strict_convexity", &n.tag, outcomes)?;
    if skipped > 0 {
        report.notes.push(format!("{skipped} parallel pairs skipped"));
    }
    Ok(report)
}

/// Checks `c·‖x‖ ≤ N(x) ≤ C·‖x‖` on each sample.
pub fn check_equivalence<V: Vector>(
    n: &NormOracle<V>,
    base: &NormOracle<V>,
    bounds: (&Rational, &Rational),
    samples: &[V],
    prec: Precision,
) -> Result<Report> {
    let (c, big_c) = bounds;
    if !c.is_positive() || c > big_c {
        return Err(RenormError::Precondition(format!(
            "bounds ({}, {}) must satisfy 0 < c ≤ C",
            fmt_rational(c),
            fmt_rational(big_c)
        )));
    }
    let outcomes = samples
        .par_iter()
        .map(|x| {
            let (lower, l_b, l_n, r1) = certified_le(prec, |p| Ok((base.eval(x, p)?.scale(c), n.eval(x, p)?)))?;
            let (upper, u_n, u_b, r2) = certified_le(prec, |p| Ok((n.eval(x, p)?, base.eval(x, p)?.scale(big_c))))?;
            let verdict = match (lower, upper) {
                (Some(true), Some(true)) => Verdict::Pass,
                (Some(false), _) | (_, Some(false)) => Verdict::Fail,
                _ => Verdict::Inconclusive,
            };
            let wit = serde_json::json!({
                "x": x.to_json(),
                "value": cert_json(&l_n),
                "lower_bound": cert_json(&l_b),
                "upper_bound": cert_json(&u_b),
                "lower_holds": lower,
                "upper_holds": upper,
            });
            let radius = u_n.radius().clone().max(u_b.radius().clone()).max(l_b.radius().clone());
            Ok(Outcome::new(verdict, wit).radius(radius).refinements(r1.max(r2)))
        })
        .collect();
    assemble(
        "equivalence",
        &format!("{} vs {} with ({}, {})", n.tag, base.tag, fmt_rational(c), fmt_rational(big_c)),
        outcomes,
    )
}

/// Data `(x, y, g, h)` with `g·x = y` and `h·x = (x+y)/2`, `x ≠ y`: any norm
/// invariant under the action has `N(x) = N(y) = N((x+y)/2)` and so is not
/// strictly convex.
#[derive(Clone, Debug)]
pub struct ObstructionCertificate<V> {
    pub space: String,
    pub x: V,
    pub y: V,
    pub g_word: FreeWord,
    pub h_word: FreeWord,
    pub action: Action<V>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObstructionVerdict {
    Valid,
    Invalid { reason: String },
}

pub fn check_obstruction<V: Vector>(cert: &ObstructionCertificate<V>) -> ObstructionVerdict {
    let invalid = |reason: &str| ObstructionVerdict::Invalid { reason: reason.to_string() };
    if !cert.action.accepts(&cert.g_word) || !cert.action.accepts(&cert.h_word) {
        return invalid("word uses a generator outside the action");
    }
    if cert.x == cert.y {
        return invalid("x = y");
    }
    if cert.action.apply_word(&cert.g_word, &cert.x) != cert.y {
        return invalid("g·x ≠ y");
    }
    if cert.action.apply_word(&cert.h_word, &cert.x) != cert.x.midpoint(&cert.y) {
        return invalid("h·x ≠ (x+y)/2");
    }
    ObstructionVerdict::Valid
}

/// The evaluated identities of a certificate, for reports.
pub fn obstruction_witness<V: Vector>(cert: &ObstructionCertificate<V>) -> serde_json::Value {
    serde_json::json!({
        "space": cert.space,
        "action": cert.action.name,
        "x": cert.x.to_json(),
        "y": cert.y.to_json(),
        "g": cert.g_word.to_string(),
        "h": cert.h_word.to_string(),
        "g_x": cert.action.apply_word(&cert.g_word, &cert.x).to_json(),
        "h_x": cert.action.apply_word(&cert.h_word, &cert.x).to_json(),
        "midpoint": cert.x.midpoint(&cert.y).to_json(),
    })
}

/// `‖x‖′ = ‖x‖_X + ‖T x‖_Y`.
pub fn pushforward_norm<V: Vector, W: Vector>(d: &EquivariantMapDescriptor<V, W>, base: &NormOracle<V>) -> NormOracle<V> {
    let (d1, b1) = (d.clone(), base.clone());
    let mut out = NormOracle::new(&format!("{} + ‖{}(·)‖", base.tag, d.tag), move |x: &V, p| {
        Ok::<_, RenormError>(b1.eval(x, p)? + d1.codomain_norm.eval(&d1.apply(x), p)?)
    });
    if base.key.is_some() && d.codomain_norm.key.is_some() {
        let (d2, b2) = (d.clone(), base.clone());
        out = out.with_key(move |x: &V| {
            let mut k = b2.key(x).unwrap_or_else(|| Ok(vec![]))?;
            k.extend(d2.codomain_norm.key(&d2.apply(x)).unwrap_or_else(|| Ok(vec![]))?);
            Ok::<_, RenormError>(k)
        });
    }
    let bound = d.operator_bound.clone();
    out.claimed_bounds = base
        .claimed_bounds
        .clone()
        .map(|(c, big_c)| (c, &big_c + &bound * &big_c));
    out
}

/// `|||x||| = ‖x‖_X + ε‖φ(x)‖_Y / ‖φ‖`, so that `‖x‖ ≤ |||x||| ≤ (1+ε)‖x‖`.
///
/// With an exact codomain square norm and exact `‖φ‖²` the ratio is one square
/// root of a rational; otherwise `‖φ‖` is replaced by the rational
/// `operator_bound`, which keeps both bounds.
pub fn epsilon_close_norm<V: Vector, W: Vector>(
    d: &EquivariantMapDescriptor<V, W>,
    base: &NormOracle<V>,
    eps: &Rational,
) -> Result<NormOracle<V>> {
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(RenormError::Precondition(format!("ε = {} must lie in (0,1)", fmt_rational(eps))));
    }
    if !d.operator_bound.is_positive() {
        return Err(RenormError::Precondition("operator bound must be positive".into()));
    }
    let tag = format!("{} + {}‖{}(·)‖/‖{}‖", base.tag, fmt_rational(eps), d.tag, d.tag);
    let (d1, b1, e1) = (d.clone(), base.clone(), eps.clone());
    let out = match (&d.codomain_norm_sq, &d.operator_norm_sq) {
        (Some(sq), Some(op_sq)) if op_sq.is_positive() => {
            let (sq, op_sq) = (sq.clone(), op_sq.clone());
            let (sq2, op_sq2, b2, d2) = (sq.clone(), op_sq.clone(), base.clone(), d.clone());
            NormOracle::new(&tag, move |x: &V, p| {
                let ratio = sq(&d1.apply(x)) / &op_sq;
                Ok::<_, RenormError>(b1.eval(x, p)? + crate::numerics::sqrt_at(&ratio, p)?.scale(&e1))
            })
            .with_key(move |x: &V| {
                if b2.key.is_none() {
                    return Err(RenormError::Precondition("base norm has no exact data".into()));
                }
                let mut k = b2.key(x).unwrap_or_else(|| Ok(vec![]))?;
                k.push(sq2(&d2.apply(x)) / &op_sq2);
                Ok(k)
            })
        }
        _ => NormOracle::new(&tag, move |x: &V, p| {
            let t = d1.codomain_norm.eval(&d1.apply(x), p)?;
            Ok::<_, RenormError>(b1.eval(x, p)? + t.scale(&(&e1 / &d1.operator_bound)))
        }),
    };
    Ok(out.with_bounds(Rational::one() - eps, Rational::one() + eps))
}

/// `x ↦ (T_n(x)/2^n)_{n≥1}` into the `ℓ₂`-sum of the codomains.
pub fn l2_assembly<V: Vector, W: Vector>(maps: &[EquivariantMapDescriptor<V, W>]) -> Result<EquivariantMapDescriptor<V, Vec<W>>> {
    if maps.is_empty() {
        return Err(RenormError::Precondition("an empty assembly is not injective".into()));
    }
    if let Some((i, d)) = maps.iter().enumerate().find(|(_, d)| d.operator_bound > Rational::one()) {
        return Err(RenormError::OperatorBound {
            index: i + 1,
            bound: fmt_rational(&d.operator_bound),
        });
    }
    let weights: Vec<Rational> = (1..=maps.len()).map(|n| crate::numerics::pow2(-(n as i64))).collect();
    let parts: Vec<EquivariantMapDescriptor<V, W>> = maps.to_vec();
    let (p1, w1) = (parts.clone(), weights.clone());
    let map = move |x: &V| -> Vec<W> { p1.iter().zip(&w1).map(|(d, w)| d.apply(x).scale(w)).collect() };
    let p2 = parts.clone();
    let exact_sq = parts.iter().all(|d| d.codomain_norm_sq.is_some());
    let norm = if exact_sq {
        let p3 = parts.clone();
        let sq = move |w: &Vec<W>| -> Rational {
            p3.iter()
                .zip(w)
                .map(|(d, wi)| d.codomain_norm_sq.as_ref().map(|f| f(wi)).unwrap_or_default())
                .sum()
        };
        let sq_key = sq.clone();
        NormOracle::new("ℓ₂-sum", move |w: &Vec<W>, p| crate::numerics::sqrt_at(&sq(w), p))
            .with_key(move |w: &Vec<W>| Ok::<_, RenormError>(vec![sq_key(w)]))
    } else {
        NormOracle::new("ℓ₂-sum", move |w: &Vec<W>, p| {
            let mut total = CertReal::zero();
            for (d, wi) in p2.iter().zip(w) {
                total = total + d.codomain_norm.eval(wi, p)?.square();
            }
            Ok::<_, RenormError>(total.sqrt(p)?)
        })
    };
    let bound: Rational = parts.iter().zip(&weights).map(|(d, w)| &d.operator_bound * w).sum();
    let tag = format!("⊕ {}", parts.iter().map(|d| d.tag.as_str()).collect::<Vec<_>>().join(", "));
    let mut out = EquivariantMapDescriptor::new(&tag, map, norm, bound);
    if exact_sq {
        let p4 = parts.clone();
        out = out.with_norm_sq(move |w: &Vec<W>| {
            p4.iter()
                .zip(w)
                .map(|(d, wi)| d.codomain_norm_sq.as_ref().map(|f| f(wi)).unwrap_or_default())
                .sum()
        });
    }
    Ok(out)
}

/// Certifies `T(x) ≠ 0` for each sample via the estimate
/// `‖T_n x‖ ≥ ‖T_n x_n‖ − ‖x − x_n‖ ≥ C‖x_n‖ − ‖x − x_n‖ > 0` for a witness
/// `x_n` of some summand, after checking `‖T_n x_n‖ ≥ C‖x_n‖` on the witness.
pub fn check_assembly_injectivity<V: Vector, W: Vector>(
    parts: &[EquivariantMapDescriptor<V, W>],
    base: &NormOracle<V>,
    samples: &[V],
    prec: Precision,
) -> Result<Report> {
    let families: Vec<(usize, &Injectivity<V>)> = parts
        .iter()
        .enumerate()
        .filter_map(|(i, d)| d.injectivity.as_ref().map(|inj| (i, inj)))
        .collect();
    if families.is_empty() {
        return Err(RenormError::Precondition("no summand carries an injectivity constant".into()));
    }
    let outcomes = samples
        .par_iter()
        .map(|x| {
            let mut max_ref = 0;
            for (i, inj) in &families {
                let d = &parts[*i];
                for xn in &inj.witnesses {
                    // C‖x_n‖ ≤ ‖T_n x_n‖
                    let (lb, _, _, r1) = certified_le(prec, |p| {
                        Ok((base.eval(xn, p)?.scale(&inj.constant), d.codomain_norm.eval(&d.apply(xn), p)?))
                    })?;
                    if lb != Some(true) {
                        continue;
                    }
                    // ‖x − x_n‖ < C‖x_n‖
                    let diff = x.sub(xn);
                    let r = refine_pair(prec, |p| Ok((base.eval(&diff, p)?, base.eval(xn, p)?.scale(&inj.constant))))?;
                    max_ref = max_ref.max(r1).max(r.refinements);
                    if r.ordering == CertOrdering::Lt {
                        let wit = serde_json::json!({
                            "x": x.to_json(),
                            "summand": i + 1,
                            "witness": xn.to_json(),
                            "distance": cert_json(&r.lhs),
                            "threshold": cert_json(&r.rhs),
                        });
                        return Ok(Outcome::new(Verdict::Pass, wit).radius(r.lhs.radius().clone()).refinements(max_ref));
                    }
                }
            }
            let wit = serde_json::json!({"x": x.to_json(), "reason": "no witness within the injectivity radius"});
            Ok(Outcome::new(Verdict::Inconclusive, wit).refinements(max_ref))
        })
        .collect();
    let tag = parts.iter().map(|d| d.tag.as_str()).collect::<Vec<_>>().join(", ");
    assemble("assembly_injectivity", &tag, outcomes)
}

/// Checks `‖T x‖ ≤ operator_bound·‖x‖` on the samples.
pub fn check_operator_bound<V: Vector, W: Vector>(
    d: &EquivariantMapDescriptor<V, W>,
    base: &NormOracle<V>,
    samples: &[V],
    prec: Precision,
) -> Result<Report> {
    let outcomes = samples
        .par_iter()
        .map(|x| {
            let tx = d.apply(x);
            let (ok, a, b, r) = certified_le(prec, |p| Ok((d.codomain_norm.eval(&tx, p)?, base.eval(x, p)?.scale(&d.operator_bound))))?;
            let verdict = match ok {
                Some(true) => Verdict::Pass,
                Some(false) => Verdict::Fail,
                None => Verdict::Inconclusive,
            };
            let wit = serde_json::json!({"x": x.to_json(), "image_norm": cert_json(&a), "bound": cert_json(&b)});
            Ok(Outcome::new(verdict, wit).radius(a.radius().clone().max(b.radius().clone())).refinements(r))
        })
        .collect();
    assemble("operator_bound", &d.tag, outcomes)
}

/// Seeded source of exact rational test data: magnitudes in `[−8, 8]`,
/// denominators at most 64.
pub struct Sampler {
    rng: ChaCha8Rng,
}

pub const SAMPLE_MAGNITUDE: i64 = 8;
pub const SAMPLE_DENOMINATOR: i64 = 64;

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    pub fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    pub fn rational(&mut self) -> Rational {
        let d = self.rng.gen_range(1..=SAMPLE_DENOMINATOR);
        let n = self.rng.gen_range(-SAMPLE_MAGNITUDE * d..=SAMPLE_MAGNITUDE * d);
        rat(n, d)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let q = self.rational();
            if !q.is_zero() {
                return q;
            }
        }
    }

    /// A rational in the open interval `(0, 1)` with denominator ≤ 64.
    pub fn unit_rational(&mut self) -> Rational {
        let d = self.rng.gen_range(2..=SAMPLE_DENOMINATOR);
        rat(self.rng.gen_range(1..d), d)
    }

    pub fn rvec(&mut self, dim: usize) -> RVec {
        RVec::new((0..dim).map(|_| self.rational()).collect())
    }

    /// A `c₀` vector with prefix length in `1..=max_prefix`.
    pub fn c0_seq(&mut self, max_prefix: usize) -> CSeq {
        let len = self.range(1, max_prefix.max(1));
        CSeq::c0((0..len).map(|_| self.rational()).collect())
    }

    /// A convergent sequence with a random limit.
    pub fn c_seq(&mut self, max_prefix: usize) -> CSeq {
        let len = self.range(1, max_prefix.max(1));
        let prefix = (0..len).map(|_| self.rational()).collect();
        CSeq::new(prefix, self.rational())
    }

    /// A signed permutation moving only positions `≤ max_support`.
    pub fn iso_c_elem(&mut self, max_support: usize, random_tail: bool) -> IsoCElem {
        let n = self.range(1, max_support.max(1));
        let mut images: Vec<usize> = (1..=n).collect();
        images.shuffle(&mut self.rng);
        let devs: Vec<usize> = (1..=n).filter(|_| self.rng.gen_bool(0.5)).collect();
        let tail = if random_tail && self.coin() { Sign::Minus } else { Sign::Plus };
        IsoCElem::from_images(&images, devs, tail).unwrap_or_else(|e| unreachable!("shuffled images form a permutation: {e}"))
    }

    /// A reduced word of length `≤ max_len` over `rank` generators.
    pub fn free_word(&mut self, rank: u8, max_len: usize) -> FreeWord {
        let len = self.range(0, max_len);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        while letters.len() < len {
            let l = Letter::new(self.rng.gen_range(0..rank), self.coin());
            if letters.last() != Some(&l.inv()) {
                letters.push(l);
            }
        }
        FreeWord::from_letters(letters)
    }

    /// A step function with at most `max_pieces` pieces.
    pub fn step_fn(&mut self, max_pieces: usize) -> StepFn {
        let pieces = self.range(1, max_pieces.max(1));
        let mut cuts: Vec<Rational> = (1..pieces).map(|_| self.unit_rational()).collect();
        cuts.sort();
        cuts.dedup();
        let mut breaks = vec![Rational::zero()];
        breaks.extend(cuts);
        breaks.push(Rational::one());
        let values = (1..breaks.len()).map(|_| self.rational()).collect();
        StepFn::new(breaks, values).unwrap_or_else(|e| unreachable!("sorted cuts give a valid step function: {e}"))
    }

    /// A step function vanishing on `[support_end, 1)`.
    pub fn step_fn_supported(&mut self, max_pieces: usize, support_end: &Rational) -> StepFn {
        let f = self.step_fn(max_pieces);
        let pieces = f
            .pieces()
            .filter_map(|(a, b, v)| {
                let hi = b.min(support_end);
                (a < hi).then(|| (a.clone(), hi.clone(), v.clone()))
            })
            .collect();
        StepFn::from_pieces(pieces)
    }

    /// A block layout with `blocks` entries drawn from a few classes of fixed
    /// dimension `1 + class`.
    pub fn block_layout(&mut self, blocks: usize, classes: u32, max_dim: usize) -> Vec<(u32, usize)> {
        let dims: Vec<usize> = (0..classes).map(|_| self.range(1, max_dim.max(1))).collect();
        (0..blocks)
            .map(|_| {
                let c = self.rng.gen_range(0..classes.max(1));
                (c, dims[c as usize])
            })
            .collect()
    }

    pub fn block_vec(&mut self, layout: &[(u32, usize)], ambient: Ambient) -> BlockVec {
        let blocks = layout
            .iter()
            .map(|&(c, d)| Block::new(c, (0..d).map(|_| self.rational()).collect()))
            .collect();
        BlockVec::new(blocks, ambient).unwrap_or_else(|e| unreachable!("layout is consistent: {e}"))
    }

    /// A rational orthogonal matrix from the Cayley transform of a random skew matrix.
    pub fn orthogonal(&mut self, dim: usize) -> RatMatrix {
        let mut entries = vec![Rational::zero(); dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let d = self.rng.gen_range(1..=8);
                let q = rat(self.rng.gen_range(-8..=8), d);
                entries[i * dim + j] = q.clone();
                entries[j * dim + i] = -q;
            }
        }
        let skew = RatMatrix::new(dim, entries).unwrap_or_else(|e| unreachable!("{e}"));
        let q = RatMatrix::cayley(&skew).unwrap_or_else(|| RatMatrix::identity(dim));
        if self.coin() {
            // compose with a reflection to reach the other component of O(d)
            let mut refl = vec![Rational::zero(); dim * dim];
            for i in 0..dim {
                refl[i * dim + i] = if i == 0 { -Rational::one() } else { Rational::one() };
            }
            RatMatrix::new(dim, refl).unwrap_or_else(|e| unreachable!("{e}")).mul(&q)
        } else {
            q
        }
    }

    /// A class-preserving block permutation with random orthogonal block maps.
    pub fn block_iso(&mut self, layout: &[(u32, usize)]) -> BlockIso {
        let n = layout.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut classes: Vec<u32> = layout.iter().map(|l| l.0).collect();
        classes.sort();
        classes.dedup();
        for c in classes {
            let idx: Vec<usize> = (0..n).filter(|&i| layout[i].0 == c).collect();
            let mut shuffled = idx.clone();
            shuffled.shuffle(&mut self.rng);
            for (a, b) in idx.iter().zip(shuffled) {
                perm[*a] = b;
            }
        }
        let maps = layout.iter().map(|&(_, d)| self.orthogonal(d)).collect();
        BlockIso::new(perm, maps, layout).unwrap_or_else(|e| unreachable!("sampled isometry is valid: {e}"))
    }

    /// A cylinder function of depth `≤ max_depth`.
    pub fn cyl_fn(&mut self, max_depth: u32) -> CylFn {
        let m = self.rng.gen_range(0..=max_depth);
        let table = (0..1usize << m).map(|_| self.rational()).collect();
        CylFn::new(m, table).unwrap_or_else(|e| unreachable!("{e}"))
    }

    /// Draws pairs until they are not parallel.
    pub fn non_parallel_pair<V: Vector>(&mut self, mut gen: impl FnMut(&mut Self) -> V) -> (V, V) {
        loop {
            let x = gen(self);
            let y = gen(self);
            if !x.is_parallel(&y) {
                return (x, y);
            }
        }
    }
}

/// `|x|` on `ℝ`, as a norm oracle on one-dimensional `RVec`s.
pub fn abs_norm() -> NormOracle<RVec> {
    NormOracle::rational("|·|", |v: &RVec| v.l1_norm())
}

pub fn sup_norm_rvec() -> NormOracle<RVec> {
    NormOracle::rational("ℓ∞", RVec::sup_norm)
}

pub fn l2_norm_rvec() -> NormOracle<RVec> {
    NormOracle::new("ℓ₂", |v: &RVec, p| crate::numerics::sqrt_at(&v.sq_norm(), p)).with_key(|v: &RVec| Ok::<_, RenormError>(vec![v.sq_norm()]))
}

/// The identity `ℝ^d → ℝ^d` from `ℓ∞` to `ℓ₂`, of norm `√d`.
pub fn linf_to_l2_identity(dim: usize) -> EquivariantMapDescriptor<RVec, RVec> {
    EquivariantMapDescriptor::new("id", |v: &RVec| v.clone(), l2_norm_rvec(), int(dim as i64))
        .with_norm_sq(RVec::sq_norm)
        .with_operator_norm_sq(int(dim as i64))
}

/// The identity on `ℝ` with `|·|` on both sides.
pub fn real_identity() -> EquivariantMapDescriptor<RVec, RVec> {
    EquivariantMapDescriptor::new("id", |v: &RVec| v.clone(), abs_norm(), Rational::one())
        .with_norm_sq(RVec::sq_norm)
        .with_operator_norm_sq(Rational::one())
}

/// Whether the sign values are consistent with a norm on a sample:
/// `N(λx) = |λ|N(x)` and `N(x + y) ≤ N(x) + N(y)`, certified.
pub fn check_norm_axioms<V: Vector>(n: &NormOracle<V>, samples: &[(V, V, Rational)], prec: Precision) -> Result<Report> {
    let outcomes = samples
        .par_iter()
        .map(|(x, y, lambda)| {
            let hom = refine_pair(prec, |p| Ok((n.eval(&x.scale(lambda), p)?, n.eval(x, p)?.scale(&lambda.abs()))))?;
            let (tri, a, b, r) = certified_le(prec, |p| Ok((n.eval(&x.add(y), p)?, n.eval(x, p)? + n.eval(y, p)?)))?;
            let hom_ok = matches!(hom.ordering, CertOrdering::Eq | CertOrdering::Inconclusive);
            let verdict = match (hom_ok, tri) {
                (false, _) | (_, Some(false)) => Verdict::Fail,
                (true, Some(true)) => Verdict::Pass,
                (true, None) => Verdict::Inconclusive,
            };
            let wit = serde_json::json!({
                "x": x.to_json(), "y": y.to_json(), "lambda": fmt_rational(lambda),
                "norm_sum": cert_json(&a), "sum_of_norms": cert_json(&b),
            });
            Ok(Outcome::new(verdict, wit).radius(a.radius().clone().max(b.radius().clone())).refinements(r.max(hom.refinements)))
        })
        .collect();
    assemble("norm_axioms", &n.tag, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::l1space::{apply_iso, f2_counterexample, l1_norm, L1Iso};
    use crate::numerics::{cert_sqrt, pow2};
    use crate::seqspace::{act_c, c_renorm, sorted_sc_norm, sorted_sc_parts};

    fn p() -> Precision {
        Precision::default_start()
    }

    fn r1(q: Rational) -> RVec {
        RVec::new(vec![q])
    }

    fn overlaps(a: &CertReal, b: &CertReal) -> bool {
        a.lo() <= b.hi() && b.lo() <= a.hi()
    }

    #[test]
    fn pushforward_of_identity_doubles() {
        let n = pushforward_norm(&real_identity(), &abs_norm());
        assert_eq!(n.eval(&r1(rat(-3, 2)), p()).unwrap(), CertReal::exact(int(3)));
    }

    #[test]
    fn epsilon_close_example() {
        let n = epsilon_close_norm(&linf_to_l2_identity(2), &sup_norm_rvec(), &rat(1, 2)).unwrap();
        let x = RVec::new(vec![int(1), int(1)]);
        assert_eq!(n.eval(&x, p()).unwrap(), CertReal::exact(rat(3, 2)));
        assert_eq!(n.eval(&RVec::new(vec![int(0), int(0)]), p()).unwrap(), CertReal::zero());
        let mut s = Sampler::new(7);
        let xs: Vec<RVec> = (0..100).map(|_| s.rvec(2)).collect();
        let r = check_equivalence(&n, &sup_norm_rvec(), (&int(1), &rat(3, 2)), &xs, p()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(epsilon_close_norm(&linf_to_l2_identity(2), &sup_norm_rvec(), &int(1)).is_err());
    }

    #[test]
    fn l2_assembly_examples() {
        let one = l2_assembly(&[real_identity()]).unwrap();
        assert_eq!(one.apply(&r1(int(3))), vec![r1(rat(3, 2))]);
        let two = l2_assembly(&[real_identity(), real_identity()]).unwrap();
        let x = r1(int(4));
        let y = two.apply(&x);
        assert_eq!(y, vec![r1(int(2)), r1(int(1))]);
        let v = two.codomain_norm.eval(&y, p()).unwrap();
        let oracle = cert_sqrt(&int(5), &pow2(-100)).unwrap();
        assert!(overlaps(&v, &oracle));
        assert!(l2_assembly::<RVec, RVec>(&[]).is_err());
        let big = EquivariantMapDescriptor::new("2id", |v: &RVec| v.scale(&int(2)), abs_norm(), int(2));
        assert!(matches!(l2_assembly(&[big]), Err(RenormError::OperatorBound { .. })));
    }

    #[test]
    fn invariance_checks() {
        let n = NormOracle::new("sorted", sorted_sc_norm).with_key(|x: &CSeq| sorted_sc_parts(x).map(|(a, b)| vec![a, b]));
        let mut s = Sampler::new(1);
        let xs: Vec<CSeq> = (0..20).map(|_| s.c0_seq(8)).collect();
        let gens: Vec<(Transform<CSeq>, Transform<CSeq>)> = (0..3)
            .map(|_| {
                let g = s.iso_c_elem(10, false);
                let gi = g.inverse();
                (Transform::new("g", move |x: &CSeq| act_c(&g, x)), Transform::new("g⁻¹", move |x: &CSeq| act_c(&gi, x)))
            })
            .collect();
        let action = Action::new("random signed permutations", gens);
        let words: Vec<FreeWord> = (0..5).map(|_| s.free_word(3, 4)).collect();
        let r = check_invariance(&n, &action, &xs, &words, p()).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_radius, "0");

        let (t1, t2) = f2_counterexample();
        let l1 = NormOracle::rational("L₁", l1_norm);
        let a = Action::new("F₂", vec![iso_pair(&t1), iso_pair(&t2)]);
        let fs: Vec<StepFn> = (0..5).map(|_| s.step_fn(5)).collect();
        let r = check_invariance(&l1, &a, &fs, &["a".parse().unwrap(), "abA".parse().unwrap()], p()).unwrap();
        assert!(r.passed());
    }

    fn iso_pair(t: &L1Iso) -> (Transform<StepFn>, Transform<StepFn>) {
        let (a, b) = (t.clone(), crate::l1space::invert_iso(t));
        (Transform::new("T", move |f: &StepFn| apply_iso(&a, f)), Transform::new("T⁻¹", move |f: &StepFn| apply_iso(&b, f)))
    }

    #[test]
    fn c_renorm_discrepancy() {
        let g = IsoCElem::from_images(&[1], [1], Sign::Plus).unwrap();
        let one = CSeq::constant(int(1));
        assert_eq!(act_c(&g, &one), CSeq::new(vec![int(-1)], int(1)));
        let n = NormOracle::new("c", c_renorm);
        let g2 = g.clone();
        let action = Action::new("g", vec![(Transform::new("g", move |x: &CSeq| act_c(&g, x)), Transform::new("g", move |x: &CSeq| act_c(&g2, x)))]);
        let r = check_invariance(&n, &action, &[one], &["a".parse().unwrap()], p()).unwrap();
        assert!(r.failed());
        let v = n.eval(&CSeq::new(vec![int(-1)], int(1)), p()).unwrap();
        let oracle = cert_sqrt(&int(10), &pow2(-100)).unwrap() + CertReal::exact(int(1));
        assert!(overlaps(&v, &oracle));
    }

    #[test]
    fn strict_convexity_checks() {
        let l1 = NormOracle::rational("L₁", l1_norm);
        let x = StepFn::indicator(&int(0), &rat(1, 2));
        let y = StepFn::indicator(&rat(1, 2), &int(1));
        let r = check_strict_convexity(&l1, &[(x, y)], p()).unwrap();
        assert!(r.failed());
        let n = NormOracle::new("sorted", sorted_sc_norm);
        let mut s = Sampler::new(3);
        let pairs: Vec<(CSeq, CSeq)> = (0..50).map(|_| s.non_parallel_pair(|s| s.c0_seq(6))).collect();
        assert!(check_strict_convexity(&n, &pairs, p()).unwrap().passed());
    }

    #[test]
    fn equivalence_constants() {
        let n = NormOracle::new("sorted", sorted_sc_norm);
        let sup = NormOracle::rational("c₀", crate::seqspace::sup_norm);
        let e1 = [CSeq::unit(1)];
        assert!(check_equivalence(&n, &sup, (&int(1), &int(2)), &e1, p()).unwrap().passed());
        let r = check_equivalence(&n, &sup, (&int(1), &rat(5, 4)), &e1, p()).unwrap();
        assert!(r.failed());
        let l1 = NormOracle::rational("L₁", l1_norm);
        let fs = [StepFn::indicator(&int(0), &rat(1, 3))];
        assert!(check_equivalence(&l1, &l1, (&int(1), &int(1)), &fs, p()).unwrap().passed());
    }

    #[test]
    fn obstruction_on_f2() {
        let (t1, t2) = f2_counterexample();
        let cert = ObstructionCertificate {
            space: "L₁[0,1]".into(),
            x: StepFn::indicator(&int(0), &rat(1, 3)),
            y: StepFn::indicator(&rat(1, 3), &rat(2, 3)),
            g_word: "b".parse().unwrap(),
            h_word: "a".parse().unwrap(),
            action: Action::new("F₂", vec![iso_pair(&t1), iso_pair(&t2)]),
        };
        assert_eq!(check_obstruction(&cert), ObstructionVerdict::Valid);
        let mut bad = cert.clone();
        bad.y = bad.x.clone();
        assert_eq!(check_obstruction(&bad), ObstructionVerdict::Invalid { reason: "x = y".into() });
    }

    #[test]
    fn equivariance_identity_passes() {
        let d = EquivariantMapDescriptor::new("id", |x: &CSeq| x.clone(), NormOracle::rational("c", crate::seqspace::sup_norm), int(1));
        let mut s = Sampler::new(9);
        let g = s.iso_c_elem(5, true);
        let (g1, g2) = (g.clone(), g.inverse());
        let act = Action::new("g", vec![(Transform::new("g", move |x: &CSeq| act_c(&g1, x)), Transform::new("g⁻¹", move |x: &CSeq| act_c(&g2, x)))]);
        let xs: Vec<CSeq> = (0..10).map(|_| s.c_seq(6)).collect();
        assert!(check_equivariance(&d, &act, &act, &xs, &["a".parse().unwrap(), "AA".parse().unwrap()]).unwrap().passed());
    }

    #[test]
    fn sampler_is_deterministic_and_bounded() {
        let mut a = Sampler::new(42);
        let mut b = Sampler::new(42);
        for _ in 0..200 {
            let q = a.rational();
            assert_eq!(q, b.rational());
            assert!(q.abs() <= int(8));
            assert!(*q.denom() <= 64.into());
        }
        let w = a.free_word(2, 8);
        assert!(w.len() <= 8);
        let layout = a.block_layout(5, 2, 3);
        let g = a.block_iso(&layout);
        let v = a.block_vec(&layout, Ambient::C0Sum);
        assert!(crate::seqspace::act_blocks(&g, &v).is_ok());
    }
}
