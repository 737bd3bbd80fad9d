//! Exact rational arithmetic extended with a positive infinity element.
//!
//! Every function value, cone weight, and valuation in this crate is an
//! exact rational; nothing in the library touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

/// Finite exact rational.
pub type Rat = BigRational;

/// Builds a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds a rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// A rational extended with `+inf`, absorbing under addition.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRat {
    Finite(Rat),
    Inf,
}

impl ExtRat {
    pub fn zero() -> Self {
        ExtRat::Finite(Rat::zero())
    }

    pub fn from_int(n: i64) -> Self {
        ExtRat::Finite(rat_int(n))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRat::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(r) => Some(r),
            ExtRat::Inf => None,
        }
    }

    /// Scales by a nonnegative finite rational. `0 * inf` is taken as `0`,
    /// matching the convention that a weight-zero term is absent from a
    /// formal sum.
    pub fn scale(&self, w: &Rat) -> ExtRat {
        assert!(!w.is_negative(), "scale weight must be nonnegative");
        if w.is_zero() {
            return ExtRat::zero();
        }
        match self {
            ExtRat::Finite(r) => ExtRat::Finite(r * w),
            ExtRat::Inf => ExtRat::Inf,
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Finite(r)
    }
}

impl Add for ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Inf,
        }
    }
}

impl<'a> Add<&'a ExtRat> for ExtRat {
    type Output = ExtRat;
    fn add(self, rhs: &'a ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
            _ => ExtRat::Inf,
        }
    }
}

impl AddAssign for ExtRat {
    fn add_assign(&mut self, rhs: ExtRat) {
        let lhs = std::mem::replace(self, ExtRat::Inf);
        *self = lhs + rhs;
    }
}

impl Sub for ExtRat {
    type Output = ExtRat;
    /// Defined only when the subtrahend is finite.
    fn sub(self, rhs: ExtRat) -> ExtRat {
        match (self, rhs) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a - b),
            (ExtRat::Inf, ExtRat::Finite(_)) => ExtRat::Inf,
            _ => panic!("cannot subtract inf"),
        }
    }
}

impl Neg for ExtRat {
    type Output = ExtRat;
    fn neg(self) -> ExtRat {
        match self {
            ExtRat::Finite(a) => ExtRat::Finite(-a),
            ExtRat::Inf => panic!("cannot negate inf"),
        }
    }
}

impl Mul<&Rat> for &ExtRat {
    type Output = ExtRat;
    fn mul(self, rhs: &Rat) -> ExtRat {
        self.scale(rhs)
    }
}

impl fmt::Debug for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(r) => write!(f, "{}", r),
            ExtRat::Inf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRatError(pub String);

impl FromStr for ExtRat {
    type Err = ParseRatError;

    /// Accepts `"inf"`, integers, and `"p/q"` fractions.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" || s == "+inf" || s == "∞" {
            return Ok(ExtRat::Inf);
        }
        parse_rat(s).map(ExtRat::Finite).ok_or_else(|| ParseRatError(s.to_string()))
    }
}

/// Parses a finite rational from `"p/q"` or integer form.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

/// Sum of a weighted family of extended rationals; weights must be
/// nonnegative finite rationals.
pub fn weighted_sum<'a, I>(terms: I) -> ExtRat
where
    I: IntoIterator<Item = (&'a Rat, &'a ExtRat)>,
{
    let mut acc = ExtRat::zero();
    for (w, v) in terms {
        acc += v.scale(w);
    }
    acc
}

/// A boundary slope of a planar normal cone: a nonnegative rational or `inf`
/// (the vertical ray).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slope {
    Finite(Rat),
    Inf,
}

impl Slope {
    pub fn zero() -> Self {
        Slope::Finite(Rat::zero())
    }

    pub fn from_rat(r: Rat) -> Self {
        assert!(!r.is_negative(), "cone slopes are nonnegative");
        Slope::Finite(r)
    }

    /// `1/s`, with `1/0 = inf` and `1/inf = 0`.
    pub fn recip(&self) -> Slope {
        match self {
            Slope::Inf => Slope::zero(),
            Slope::Finite(r) if r.is_zero() => Slope::Inf,
            Slope::Finite(r) => Slope::Finite(r.recip()),
        }
    }

    /// The cone measure of the slope, `s/(1+s)` with `inf` mapped to `1`.
    /// The measure of `Cone(a,b)` is `b.measure() - a.measure()`.
    pub fn measure(&self) -> Rat {
        match self {
            Slope::Inf => Rat::one(),
            Slope::Finite(s) => s / (s + Rat::one()),
        }
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::Finite(r) => write!(f, "{}", r),
            Slope::Inf => write!(f, "inf"),
        }
    }
}

/// A closed cone `Cone(lo, hi)` in the nonnegative quadrant, bounded by the
/// rays of slope `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cone {
    pub lo: Slope,
    pub hi: Slope,
}

impl Cone {
    pub fn new(lo: Slope, hi: Slope) -> Self {
        assert!(lo <= hi, "cone slopes must satisfy lo <= hi");
        Cone { lo, hi }
    }

    /// The full quadrant.
    pub fn full() -> Self {
        Cone { lo: Slope::zero(), hi: Slope::Inf }
    }

    /// `[Cone(a,b)] = b/(1+b) - a/(1+a)`.
    pub fn weight(&self) -> Rat {
        self.hi.measure() - self.lo.measure()
    }

    /// Intersection of slope ranges; `None` when the intersection has no
    /// interior (degenerate or empty).
    pub fn intersect(&self, other: &Cone) -> Option<Cone> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        if lo < hi {
            Some(Cone { lo, hi })
        } else {
            None
        }
    }
}
