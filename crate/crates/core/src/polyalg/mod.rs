//! Exact scalars and dense univariate polynomials.
//!
//! Everything downstream works over [`Rat`]; [`Surd`] exists for the
//! classification parameters that need a square root (`√μ`, the Hermite
//! dilation), and [`Poly<Surd>`] for transporting Pearson pairs by such maps.

mod poly;
mod rat;
mod surd;

use std::fmt;

pub use poly::{poly_add, poly_affine_sub, poly_derive, poly_mul, Poly, QPoly};
pub use rat::{binomial, factorial, falling_factorial, Rat};
pub use surd::{surd_normalize, Surd};

use crate::error::Result;

/// A coefficient field. Arithmetic is fallible only for [`Surd`], where two
/// values over different radicands cannot be combined.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rat(r: Rat) -> Self;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn try_inv(&self) -> Option<Self>;

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }
}

impl Scalar for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn from_rat(r: Rat) -> Self {
        r
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn try_inv(&self) -> Option<Self> {
        self.checked_recip()
    }
}
