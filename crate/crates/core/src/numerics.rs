//! Exact rational scalars and certified real enclosures.
//!
//! Every irrational quantity in the crate (square roots in weighted norms,
//! `p`-th powers in `ℓ_p` norms) is carried as a [`CertReal`]: a rational
//! midpoint with an absolute rational radius. Roots are computed from exact
//! integer roots of dyadically scaled rationals, so the enclosures are sound
//! by construction and collapse to radius zero whenever the value is a
//! detectable rational.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational in canonical form (positive denominator,
/// reduced).
pub type Rational = BigRational;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("square root of negative value {0}")]
    NegativeSqrt(String),
    #[error("power {exponent} of zero is undefined")]
    ZeroPower { exponent: String },
    #[error("power of negative base {0} is not supported")]
    NegativeBase(String),
    #[error("precision must be a positive rational, got {0}")]
    InvalidPrecision(String),
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("precision cap of 2^-{bits} exhausted without a decision")]
    PrecisionExhausted { bits: u32 },
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn pow2(e: i64) -> Rational {
    let one = BigInt::one();
    if e >= 0 {
        Rational::from_integer(one << (e as usize))
    } else {
        Rational::new(one.clone(), one << ((-e) as usize))
    }
}

/// Parses `"p/q"`, `"p"`, or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((whole, frac)) = t.split_once('.') {
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(NumericsError::Parse(s.to_string()));
        }
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits
            .parse()
            .map_err(|_| NumericsError::Parse(s.to_string()))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    t.parse::<Rational>()
        .map_err(|_| NumericsError::Parse(s.to_string()))
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Lossy conversion, for human-facing summaries only.
pub fn approx_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(serde::de::Error::custom)
    }
}

/// serde adapter for `Vec<Rational>` as a list of `"p/q"` strings.
pub mod rational_vec {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&fmt_rational(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Target absolute radius `2^-bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Precision {
    bits: u32,
}

impl Precision {
    pub const DEFAULT_BITS: u32 = 64;
    pub const MAX_BITS: u32 = 512;

    pub fn bits(bits: u32) -> Self {
        Precision { bits: bits.max(1) }
    }

    pub fn default_start() -> Self {
        Precision::bits(Self::DEFAULT_BITS)
    }

    /// Smallest `2^-k` that does not exceed the requested radius.
    pub fn from_radius(radius: &Rational) -> Result<Self> {
        if !radius.is_positive() {
            return Err(NumericsError::InvalidPrecision(fmt_rational(radius)));
        }
        let mut k = 0u32;
        while pow2(-(k as i64)) > *radius {
            k += 1;
        }
        Ok(Precision::bits(k.max(1)))
    }

    pub fn get(&self) -> u32 {
        self.bits
    }

    pub fn radius(&self) -> Rational {
        pow2(-(self.bits as i64))
    }

    /// Doubles the bit count; `None` once the cap would be exceeded.
    pub fn refine(&self) -> Option<Precision> {
        let next = self.bits.saturating_mul(2);
        (self.bits < Self::MAX_BITS).then(|| Precision::bits(next.min(Self::MAX_BITS)))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::default_start()
    }
}

/// A real number known to lie in `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CertReal {
    mid: Rational,
    rad: Rational,
}

impl CertReal {
    pub fn exact(q: Rational) -> Self {
        CertReal {
            mid: q,
            rad: Rational::zero(),
        }
    }

    pub fn zero() -> Self {
        CertReal::exact(Rational::zero())
    }

    pub fn new(mid: Rational, rad: Rational) -> Self {
        assert!(!rad.is_negative(), "negative radius");
        CertReal { mid, rad }
    }

    pub fn from_bounds(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        let two = int(2);
        CertReal {
            mid: (&lo + &hi) / &two,
            rad: (hi - lo) / two,
        }
    }

    pub fn midpoint(&self) -> &Rational {
        &self.mid
    }

    pub fn radius(&self) -> &Rational {
        &self.rad
    }

    pub fn lo(&self) -> Rational {
        &self.mid - &self.rad
    }

    pub fn hi(&self) -> Rational {
        &self.mid + &self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn exact_value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.mid)
    }

    pub fn contains(&self, q: &Rational) -> bool {
        self.lo() <= *q && *q <= self.hi()
    }

    /// Whether `other` lies inside `self`.
    pub fn encloses(&self, other: &CertReal) -> bool {
        self.lo() <= other.lo() && other.hi() <= self.hi()
    }

    pub fn scale(&self, c: &Rational) -> CertReal {
        CertReal {
            mid: &self.mid * c,
            rad: &self.rad * c.abs(),
        }
    }

    pub fn abs(&self) -> CertReal {
        let (lo, hi) = (self.lo(), self.hi());
        if !lo.is_negative() {
            self.clone()
        } else if !hi.is_positive() {
            -self
        } else {
            CertReal::from_bounds(Rational::zero(), lo.abs().max(hi))
        }
    }

    pub fn square(&self) -> CertReal {
        let a = self.abs();
        CertReal::from_bounds(a.lo().pow(2), a.hi().pow(2))
    }

    pub fn div(&self, other: &CertReal) -> Result<CertReal> {
        let (blo, bhi) = (other.lo(), other.hi());
        if !(blo.is_positive() || bhi.is_negative()) {
            return Err(NumericsError::DivisionByZero);
        }
        if other.is_exact() {
            return Ok(CertReal {
                mid: &self.mid / &other.mid,
                rad: &self.rad / other.mid.abs(),
            });
        }
        let (alo, ahi) = (self.lo(), self.hi());
        let cands = [&alo / &blo, &alo / &bhi, &ahi / &blo, &ahi / &bhi];
        let lo = cands.iter().min().cloned().unwrap_or_default();
        let hi = cands.iter().max().cloned().unwrap_or_default();
        Ok(CertReal::from_bounds(lo, hi))
    }

    /// Square root of the enclosed value; negative parts of the enclosure are
    /// clipped when the enclosure straddles zero.
    pub fn sqrt(&self, prec: Precision) -> Result<CertReal> {
        self.pow_nonneg(&rat(1, 2), prec)
    }

    /// `self^e` for `e > 0`, assuming the enclosed true value is `≥ 0`.
    pub fn pow_nonneg(&self, e: &Rational, prec: Precision) -> Result<CertReal> {
        if self.hi().is_negative() {
            return Err(NumericsError::NegativeBase(fmt_rational(&self.hi())));
        }
        if !e.is_positive() {
            return Err(NumericsError::ZeroPower {
                exponent: fmt_rational(e),
            });
        }
        if self.is_exact() {
            return pow_with(&self.mid, e, prec);
        }
        let lo = self.lo().max(Rational::zero());
        let hi = self.hi();
        let lo_enc = pow_with(&lo, e, prec)?;
        let hi_enc = pow_with(&hi, e, prec)?;
        Ok(CertReal::from_bounds(lo_enc.lo(), hi_enc.hi()))
    }
}

impl fmt::Display for CertReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", fmt_rational(&self.mid))
        } else {
            write!(
                f,
                "{:.12} ± {:.3e}",
                approx_f64(&self.mid),
                approx_f64(&self.rad)
            )
        }
    }
}

impl Serialize for CertReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CertReal", 3)?;
        st.serialize_field("approx", &approx_f64(&self.mid))?;
        st.serialize_field("midpoint", &fmt_rational(&self.mid))?;
        st.serialize_field("radius", &fmt_rational(&self.rad))?;
        st.end()
    }
}

impl<'a> Add<&'a CertReal> for &'a CertReal {
    type Output = CertReal;
    fn add(self, rhs: &'a CertReal) -> CertReal {
        CertReal {
            mid: &self.mid + &rhs.mid,
            rad: &self.rad + &rhs.rad,
        }
    }
}

impl Add for CertReal {
    type Output = CertReal;
    fn add(self, rhs: CertReal) -> CertReal {
        &self + &rhs
    }
}

impl<'a> Sub<&'a CertReal> for &'a CertReal {
    type Output = CertReal;
    fn sub(self, rhs: &'a CertReal) -> CertReal {
        CertReal {
            mid: &self.mid - &rhs.mid,
            rad: &self.rad + &rhs.rad,
        }
    }
}

impl Sub for CertReal {
    type Output = CertReal;
    fn sub(self, rhs: CertReal) -> CertReal {
        &self - &rhs
    }
}

impl Neg for &CertReal {
    type Output = CertReal;
    fn neg(self) -> CertReal {
        CertReal {
            mid: -&self.mid,
            rad: self.rad.clone(),
        }
    }
}

impl Neg for CertReal {
    type Output = CertReal;
    fn neg(self) -> CertReal {
        -&self
    }
}

impl<'a> Mul<&'a CertReal> for &'a CertReal {
    type Output = CertReal;
    fn mul(self, rhs: &'a CertReal) -> CertReal {
        let rad = self.mid.abs() * &rhs.rad + rhs.mid.abs() * &self.rad + &self.rad * &rhs.rad;
        CertReal {
            mid: &self.mid * &rhs.mid,
            rad,
        }
    }
}

impl std::iter::Sum for CertReal {
    fn sum<I: Iterator<Item = CertReal>>(iter: I) -> CertReal {
        iter.fold(CertReal::zero(), |a, b| a + b)
    }
}

/// Three-valued comparison of enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertOrdering {
    Lt,
    Gt,
    Eq,
    Inconclusive,
}

pub fn cert_cmp(a: &CertReal, b: &CertReal) -> CertOrdering {
    if a.is_exact() && b.is_exact() {
        return match a.mid.cmp(&b.mid) {
            Ordering::Less => CertOrdering::Lt,
            Ordering::Greater => CertOrdering::Gt,
            Ordering::Equal => CertOrdering::Eq,
        };
    }
    if a.hi() < b.lo() {
        CertOrdering::Lt
    } else if a.lo() > b.hi() {
        CertOrdering::Gt
    } else {
        CertOrdering::Inconclusive
    }
}

/// Outcome of a comparison driven through the refinement schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinedComparison {
    pub ordering: CertOrdering,
    pub lhs: CertReal,
    pub rhs: CertReal,
    /// Number of precision doublings performed after the starting precision.
    pub refinements: u32,
    pub final_bits: u32,
}

/// Evaluates both sides at increasing precision until the comparison is
/// decided or the 2^-512 cap is reached.
pub fn compare_refining<F>(start: Precision, mut eval: F) -> Result<RefinedComparison>
where
    F: FnMut(Precision) -> Result<(CertReal, CertReal)>,
{
    let mut prec = start;
    let mut refinements = 0;
    loop {
        let (lhs, rhs) = eval(prec)?;
        let ordering = cert_cmp(&lhs, &rhs);
        if ordering != CertOrdering::Inconclusive {
            return Ok(RefinedComparison {
                ordering,
                lhs,
                rhs,
                refinements,
                final_bits: prec.get(),
            });
        }
        match prec.refine() {
            Some(next) => {
                prec = next;
                refinements += 1;
            }
            None => {
                return Ok(RefinedComparison {
                    ordering,
                    lhs,
                    rhs,
                    refinements,
                    final_bits: prec.get(),
                })
            }
        }
    }
}

/// Exact `n`-th root of a nonnegative rational, when it is rational.
pub fn exact_root(q: &Rational, n: u32) -> Option<Rational> {
    if q.is_negative() || n == 0 {
        return None;
    }
    let rn = q.numer().nth_root(n);
    let rd = q.denom().nth_root(n);
    (num_traits::pow(rn.clone(), n as usize) == *q.numer()
        && num_traits::pow(rd.clone(), n as usize) == *q.denom())
    .then(|| Rational::new(rn, rd))
}

/// Dyadic bracket `[s/2^k, (s+1)/2^k]` of `q^(1/n)` (degenerate when exact on
/// the grid).
fn root_bracket(q: &Rational, n: u32, k: u32) -> (Rational, Rational) {
    let scaled = q.numer() << ((n as usize) * (k as usize));
    let (fl, rem) = num_integer::Integer::div_rem(&scaled, q.denom());
    let s = fl.nth_root(n);
    let den = BigInt::one() << (k as usize);
    let lo = Rational::new(s.clone(), den.clone());
    let on_grid = rem.is_zero() && num_traits::pow(s.clone(), n as usize) == fl;
    let hi = if on_grid {
        lo.clone()
    } else {
        Rational::new(s + 1, den)
    };
    (lo, hi)
}

fn split_exponent(e: &Rational) -> Result<(i64, u32)> {
    let a = e
        .numer()
        .to_i64()
        .ok_or_else(|| NumericsError::Parse(fmt_rational(e)))?;
    let b = e
        .denom()
        .to_u32()
        .ok_or_else(|| NumericsError::Parse(fmt_rational(e)))?;
    Ok((a, b))
}

fn pow_with(x: &Rational, e: &Rational, prec: Precision) -> Result<CertReal> {
    if x.is_negative() {
        return Err(NumericsError::NegativeBase(fmt_rational(x)));
    }
    if x.is_zero() {
        if e.is_positive() {
            return Ok(CertReal::zero());
        }
        return Err(NumericsError::ZeroPower {
            exponent: fmt_rational(e),
        });
    }
    let (a, b) = split_exponent(e)?;
    let y = num_traits::pow(x.clone(), a.unsigned_abs() as usize);
    if b == 1 || exact_root(&y, b).is_some() {
        let r = if b == 1 {
            y
        } else {
            exact_root(&y, b).unwrap_or_default()
        };
        return Ok(CertReal::exact(if a < 0 { r.recip() } else { r }));
    }
    let target = prec.radius();
    let mut k = prec.get() + 1;
    loop {
        let (lo, hi) = root_bracket(&y, b, k);
        let enc = if a >= 0 {
            CertReal::from_bounds(lo, hi)
        } else if lo.is_positive() {
            CertReal::from_bounds(hi.recip(), lo.recip())
        } else {
            k = k.saturating_mul(2);
            continue;
        };
        if enc.rad <= target {
            return Ok(enc);
        }
        k = k.saturating_mul(2);
    }
}

/// Certified enclosure of `√x` with radius at most `precision`.
pub fn cert_sqrt(x: &Rational, precision: &Rational) -> Result<CertReal> {
    if x.is_negative() {
        return Err(NumericsError::NegativeSqrt(fmt_rational(x)));
    }
    let prec = Precision::from_radius(precision)?;
    pow_with(x, &rat(1, 2), prec)
}

/// Certified enclosure of `x^e` for rational `e`, radius at most `precision`.
pub fn cert_pow(x: &Rational, e: &Rational, precision: &Rational) -> Result<CertReal> {
    let prec = Precision::from_radius(precision)?;
    if e.is_zero() {
        if x.is_zero() {
            return Err(NumericsError::ZeroPower {
                exponent: fmt_rational(e),
            });
        }
        if x.is_negative() {
            return Err(NumericsError::NegativeBase(fmt_rational(x)));
        }
        return Ok(CertReal::exact(Rational::one()));
    }
    pow_with(x, e, prec)
}

/// `cert_sqrt` at a [`Precision`] rather than a rational radius.
pub fn sqrt_at(x: &Rational, prec: Precision) -> Result<CertReal> {
    if x.is_negative() {
        return Err(NumericsError::NegativeSqrt(fmt_rational(x)));
    }
    pow_with(x, &rat(1, 2), prec)
}

/// `cert_pow` at a [`Precision`].
pub fn pow_at(x: &Rational, e: &Rational, prec: Precision) -> Result<CertReal> {
    cert_pow(x, e, &prec.radius())
}
