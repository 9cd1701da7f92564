use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{falling_factorial, Rat, Scalar};
use crate::error::{Error, Result};

/// Dense polynomial, `coeffs[i]` is the coefficient of `x^i`.
///
/// The coefficient vector never ends in a zero; the zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<S = Rat> {
    coeffs: Vec<S>,
}

/// Polynomial over the rationals, the carrier used by every operator module.
pub type QPoly = Poly<Rat>;

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `c·x^n`.
    pub fn monomial(c: S, n: usize) -> Self {
        let mut coeffs = vec![S::zero(); n + 1];
        coeffs[n] = c;
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(S::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True when `deg p <= bound`; the zero polynomial satisfies every bound,
    /// including the negative ones used by the lowering conditions.
    pub fn degree_at_most(&self, bound: isize) -> bool {
        match self.degree() {
            None => true,
            Some(d) => (d as isize) <= bound,
        }
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == S::one())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).try_add(&other.coeff(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero());
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].try_add(&a.try_mul(b)?)?;
            }
        }
        Ok(Poly::new(out))
    }

    pub fn try_scale(&self, c: &S) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| a.try_mul(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    /// `m`-th derivative.
    pub fn derive(&self, m: usize) -> Self {
        if m == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(m)
            .map(|(i, c)| {
                c.try_mul(&S::from_rat(falling_factorial(i, m)))
                    .expect("scaling by a rational never mixes radicands")
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn try_eval(&self, x: &S) -> Result<S> {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(x)?.try_add(c)?;
        }
        Ok(acc)
    }

    /// `p(a·x + b)`.
    pub fn try_affine_sub(&self, a: &S, b: &S) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DegenerateAffine);
        }
        let lin = Poly::new(vec![b.clone(), a.clone()]);
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.try_mul(&lin)?.try_add(&Poly::constant(c.clone()))?;
        }
        Ok(acc)
    }

    /// Converts coefficients into another field.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }
}

impl QPoly {
    /// Convenience constructor from integer coefficients, low to high degree.
    pub fn from_ints(cs: &[i64]) -> Self {
        Poly::new(cs.iter().map(|&c| Rat::from_int(c)).collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.try_eval(x).expect("rational arithmetic is infallible")
    }

    /// `p(a·x + b)`; `a = 0` is rejected.
    pub fn affine_sub(&self, a: &Rat, b: &Rat) -> Result<Self> {
        self.try_affine_sub(a, b)
    }

    /// `x^n`.
    pub fn x_pow(n: usize) -> Self {
        Poly::monomial(Rat::one(), n)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = QPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact division by a monic divisor; `None` if there is a remainder.
    pub fn div_exact_monic(&self, d: &QPoly) -> Option<QPoly> {
        let dd = d.degree()?;
        assert!(d.is_monic(), "divisor must be monic");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return rem.iter().all(Rat::is_zero).then(QPoly::zero);
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = rem[i + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.iter().all(Rat::is_zero).then(|| Poly::new(quot))
    }
}

impl<'a> Add<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn add(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<'a> Sub<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn sub(self, rhs: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<'a> Mul<&'a QPoly> for &'a QPoly {
    type Output = QPoly;
    fn mul(self, rhs: &QPoly) -> QPoly {
        self.try_mul(rhs).expect("rational arithmetic is infallible")
    }
}

impl Add for QPoly {
    type Output = QPoly;
    fn add(self, rhs: QPoly) -> QPoly {
        &self + &rhs
    }
}

impl Sub for QPoly {
    type Output = QPoly;
    fn sub(self, rhs: QPoly) -> QPoly {
        &self - &rhs
    }
}

impl Mul for QPoly {
    type Output = QPoly;
    fn mul(self, rhs: QPoly) -> QPoly {
        &self * &rhs
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.negate()
    }
}

impl Neg for QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        self.negate()
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl<S: Scalar + Serialize> Serialize for Poly<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.coeffs.serialize(serializer)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for Poly<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(Poly::new(Vec::<S>::deserialize(deserializer)?))
    }
}

/// Coefficientwise sum.
pub fn poly_add<S: Scalar>(p: &Poly<S>, q: &Poly<S>) -> Result<Poly<S>> {
    p.try_add(q)
}

/// Convolution product.
pub fn poly_mul<S: Scalar>(p: &Poly<S>, q: &Poly<S>) -> Result<Poly<S>> {
    p.try_mul(q)
}

pub fn poly_derive<S: Scalar>(p: &Poly<S>, m: usize) -> Poly<S> {
    p.derive(m)
}

/// `p(A·x + B)`.
pub fn poly_affine_sub<S: Scalar>(p: &Poly<S>, a: &S, b: &S) -> Result<Poly<S>> {
    p.try_affine_sub(a, b)
}
