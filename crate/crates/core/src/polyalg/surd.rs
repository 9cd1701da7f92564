//! Elements `a + b·√d` of a single quadratic extension of the rationals.

use std::fmt;

use num_bigint::BigInt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rat::Rat;
use super::Scalar;
use crate::error::{Error, Result};

/// Trial division bound for square-factor extraction.
const TRIAL_LIMIT: u64 = 2_000_000;

/// `rat + coef·√rad`, kept in canonical form by [`Surd::new`].
///
/// Canonical means: `rad` is a squarefree integer different from 1 (or `coef`
/// is zero and `rad` is 1). Equality of canonical surds is structural.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "SurdWire", into = "SurdWire")]
pub struct Surd {
    rational_part: Rat,
    surd_part: Rat,
    radicand: Rat,
}

#[derive(Serialize, Deserialize)]
struct SurdWire {
    rat: Rat,
    coef: Rat,
    rad: Rat,
}

impl From<SurdWire> for Surd {
    fn from(w: SurdWire) -> Self {
        Surd::new(w.rat, w.coef, w.rad)
    }
}

impl From<Surd> for SurdWire {
    fn from(s: Surd) -> Self {
        SurdWire {
            rat: s.rational_part,
            coef: s.surd_part,
            rad: s.radicand,
        }
    }
}

impl Surd {
    /// Builds `rat + coef·√rad` and normalizes it.
    pub fn new(rat: Rat, coef: Rat, rad: Rat) -> Self {
        surd_normalize(Surd {
            rational_part: rat,
            surd_part: coef,
            radicand: rad,
        })
    }

    pub fn rational(r: Rat) -> Self {
        Surd {
            rational_part: r,
            surd_part: Rat::zero(),
            radicand: Rat::one(),
        }
    }

    /// Principal square root of a rational; formal when `r < 0`.
    pub fn sqrt(r: &Rat) -> Self {
        Surd::new(Rat::zero(), Rat::one(), r.clone())
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rational_part
    }

    pub fn surd_part(&self) -> &Rat {
        &self.surd_part
    }

    pub fn radicand(&self) -> &Rat {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.surd_part.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.rational_part)
    }

    /// Set when the radicand is negative: the value is a formal symbol, not a real number.
    pub fn formal_nonreal(&self) -> bool {
        !self.is_rational() && self.radicand.is_negative()
    }

    fn compatible_radicand(&self, other: &Surd) -> Result<Rat> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(Rat::one()),
            (false, true) => Ok(self.radicand.clone()),
            (true, false) => Ok(other.radicand.clone()),
            (false, false) if self.radicand == other.radicand => Ok(self.radicand.clone()),
            _ => Err(Error::FieldMismatch(
                format!("sqrt({})", self.radicand),
                format!("sqrt({})", other.radicand),
            )),
        }
    }

    pub fn conjugate(&self) -> Surd {
        Surd {
            rational_part: self.rational_part.clone(),
            surd_part: -&self.surd_part,
            radicand: self.radicand.clone(),
        }
    }

    /// `(a + b√d)(a - b√d) = a² - b²d`.
    pub fn norm(&self) -> Rat {
        &self.rational_part * &self.rational_part
            - &self.surd_part * &self.surd_part * &self.radicand
    }

    pub fn checked_add(&self, other: &Surd) -> Result<Surd> {
        let rad = self.compatible_radicand(other)?;
        Ok(Surd::new(
            &self.rational_part + &other.rational_part,
            &self.surd_part + &other.surd_part,
            rad,
        ))
    }

    pub fn checked_sub(&self, other: &Surd) -> Result<Surd> {
        self.checked_add(&other.negate())
    }

    pub fn checked_mul(&self, other: &Surd) -> Result<Surd> {
        let rad = self.compatible_radicand(other)?;
        let (a, b) = (&self.rational_part, &self.surd_part);
        let (c, e) = (&other.rational_part, &other.surd_part);
        Ok(Surd::new(a * c + b * e * &rad, a * e + b * c, rad))
    }

    pub fn checked_div(&self, other: &Surd) -> Result<Surd> {
        let inv = other
            .inverse()
            .ok_or_else(|| Error::BadParameter("division by zero surd".into()))?;
        self.checked_mul(&inv)
    }

    pub fn negate(&self) -> Surd {
        Surd {
            rational_part: -&self.rational_part,
            surd_part: -&self.surd_part,
            radicand: self.radicand.clone(),
        }
    }

    pub fn inverse(&self) -> Option<Surd> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Surd::new(
            &c.rational_part / &n,
            &c.surd_part / &n,
            c.radicand,
        ))
    }

    pub fn scale(&self, r: &Rat) -> Surd {
        Surd::new(
            &self.rational_part * r,
            &self.surd_part * r,
            self.radicand.clone(),
        )
    }
}

/// Canonical form: square factors of the radicand folded into `surd_part`,
/// perfect squares folded into `rational_part`.
pub fn surd_normalize(s: Surd) -> Surd {
    let Surd {
        rational_part,
        surd_part,
        radicand,
    } = s;
    if surd_part.is_zero() || radicand.is_zero() {
        return Surd::rational(rational_part);
    }
    // √(n/d) = √(n·d) / d
    let negative = radicand.is_negative();
    let m = (radicand.numer() * radicand.denom()).abs();
    let (outside, inside) = square_split(&m);
    let coef = &surd_part * &Rat::from_bigint(outside) / Rat::from_bigint(radicand.denom().clone());
    let inside = if negative { -inside } else { inside };
    if inside.is_one() {
        return Surd::rational(rational_part + coef);
    }
    Surd {
        rational_part,
        surd_part: coef,
        radicand: Rat::from_bigint(inside),
    }
}

/// Writes `m = s²·r` with `r` squarefree.
///
/// Once every prime below the cube root of the cofactor is removed, the
/// cofactor is 1, a prime, a product of two primes, or a prime square; the
/// last case is caught by the integer square root. Exact for `m < TRIAL_LIMIT³`.
fn square_split(m: &BigInt) -> (BigInt, BigInt) {
    let mut rest = m.clone();
    let mut outside = BigInt::one();
    let mut inside = BigInt::one();
    let mut p: u64 = 2;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb * &pb > rest {
            break;
        }
        let sq = &pb * &pb;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            outside *= &pb;
        }
        if (&rest % &pb).is_zero() {
            rest /= &pb;
            inside *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        (outside * r, inside)
    } else {
        (outside, inside * rest)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational_part)
        } else if self.rational_part.is_zero() {
            write!(f, "{}*sqrt({})", self.surd_part, self.radicand)
        } else {
            write!(
                f,
                "{} + {}*sqrt({})",
                self.rational_part, self.surd_part, self.radicand
            )
        }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Rat> for Surd {
    fn from(r: Rat) -> Self {
        Surd::rational(r)
    }
}

impl Scalar for Surd {
    fn zero() -> Self {
        Surd::rational(Rat::zero())
    }
    fn one() -> Self {
        Surd::rational(Rat::one())
    }
    fn is_zero(&self) -> bool {
        self.rational_part.is_zero() && self.surd_part.is_zero()
    }
    fn from_rat(r: Rat) -> Self {
        Surd::rational(r)
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        self.checked_add(other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other)
    }
    fn neg(&self) -> Self {
        self.negate()
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse()
    }
}
