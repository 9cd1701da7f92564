//! Exact rational calculus for lowering operators and the orthogonal
//! polynomial sequences they fix.

pub mod classify;
pub mod cli;
pub mod error;
pub mod functional;
pub mod mps;
pub mod operator;
pub mod polyalg;
pub mod twoortho;

pub use error::{Error, LoweringCondition, Result};
pub use operator::{LoweringProfile, OperatorJ};
pub use polyalg::{Poly, QPoly, Rat, Surd};
