//! Linear functionals on polynomials, stored as their moments `(u)_n = ⟨u, x^n⟩`.
//!
//! A [`MomentFunctional`] knows moments `0..=M` and nothing beyond. Every
//! operation works out the horizon of its result from the horizons of its
//! inputs; pairing past it is an error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::OperatorJ;
use crate::polyalg::{factorial, QPoly, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentFunctional {
    moments: Vec<Rat>,
}

impl MomentFunctional {
    /// At least one moment is required.
    pub fn new(moments: Vec<Rat>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::EmptyResult);
        }
        Ok(MomentFunctional { moments })
    }

    pub fn zero(horizon: usize) -> Self {
        MomentFunctional {
            moments: vec![Rat::zero(); horizon + 1],
        }
    }

    /// The functional `p ↦ p(0)`, moments `(1, 0, 0, …)`.
    pub fn delta(horizon: usize) -> Self {
        let mut u = MomentFunctional::zero(horizon);
        u.moments[0] = Rat::one();
        u
    }

    pub fn from_ints(ms: &[i64]) -> Result<Self> {
        MomentFunctional::new(ms.iter().map(|&m| Rat::from_int(m)).collect())
    }

    pub fn horizon(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn moments(&self) -> &[Rat] {
        &self.moments
    }

    pub fn moment(&self, n: usize) -> Option<&Rat> {
        self.moments.get(n)
    }

    pub fn is_zero(&self) -> bool {
        self.moments.iter().all(Rat::is_zero)
    }

    /// First `horizon + 1` moments. Fails if that is more than we know.
    pub fn truncate(&self, horizon: usize) -> Result<Self> {
        if horizon > self.horizon() {
            return Err(Error::HorizonExceeded {
                degree: horizon,
                horizon: self.horizon(),
            });
        }
        Ok(MomentFunctional {
            moments: self.moments[..=horizon].to_vec(),
        })
    }

    /// `⟨u, p⟩`.
    pub fn pair(&self, p: &QPoly) -> Result<Rat> {
        if let Some(d) = p.degree() {
            if d > self.horizon() {
                return Err(Error::HorizonExceeded {
                    degree: d,
                    horizon: self.horizon(),
                });
            }
        }
        Ok(p.coeffs().iter().zip(&self.moments).map(|(c, m)| c * m).sum())
    }

    /// `ϖu`, defined by `⟨ϖu, p⟩ = ⟨u, ϖp⟩`. Horizon `M - deg ϖ`.
    pub fn left_mul(&self, w: &QPoly) -> Result<Self> {
        let Some(d) = w.degree() else {
            return Ok(MomentFunctional::zero(self.horizon()));
        };
        if d > self.horizon() {
            return Err(Error::EmptyResult);
        }
        let moments = (0..=self.horizon() - d)
            .map(|n| {
                w.coeffs()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * &self.moments[n + i])
                    .sum()
            })
            .collect();
        Ok(MomentFunctional { moments })
    }

    /// Distributional derivative, `⟨Du, p⟩ = -⟨u, p'⟩`. Horizon preserved.
    pub fn derive(&self) -> Self {
        let mut d = self.derive_extended();
        d.moments.pop();
        d
    }

    // (Du)_{M+1} = -(M+1)(u)_M is known too; the distributional route needs it.
    fn derive_extended(&self) -> Self {
        let moments = (0..=self.horizon() + 1)
            .map(|n| match n {
                0 => Rat::zero(),
                _ => -(Rat::from(n) * &self.moments[n - 1]),
            })
            .collect();
        MomentFunctional { moments }
    }

    /// Sum on the common horizon.
    pub fn add(&self, other: &Self) -> Self {
        MomentFunctional {
            moments: self.moments.iter().zip(&other.moments).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        MomentFunctional {
            moments: self.moments.iter().map(|m| m * c).collect(),
        }
    }

    /// `ũ` with `⟨ũ, f(x)⟩ = ⟨u, f((x - B)/A)⟩`, so `ũ_n = ⟨u, ((x - B)/A)^n⟩`.
    ///
    /// If `{P_n}` is orthogonal for `u`, then `A^{-n} P_n(Ax + B)` is
    /// orthogonal for `ũ`.
    pub fn affine_pullback(&self, a: &Rat, b: &Rat) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::DegenerateAffine);
        }
        let inv = a.recip();
        let base = QPoly::new(vec![-(b * &inv), inv]);
        let mut pw = QPoly::one();
        let mut moments = Vec::with_capacity(self.moments.len());
        for _ in 0..=self.horizon() {
            moments.push(self.pair(&pw)?);
            pw = &pw * &base;
        }
        Ok(MomentFunctional { moments })
    }

    /// Transpose action `(Ju)_n = ⟨u, J(x^n)⟩`.
    ///
    /// For a canonical `J` the horizon is `min(M, N)`. Relaxed operators
    /// may raise degrees by `s = max(deg a_ν - ν)`, and the horizon shrinks
    /// to `min(M - s, N)`.
    pub fn transpose_apply(&self, j: &OperatorJ) -> Result<Self> {
        let slack = degree_slack(j);
        let horizon = self
            .horizon()
            .checked_sub(slack)
            .ok_or(Error::EmptyResult)?
            .min(j.horizon());
        let moments = (0..=horizon)
            .map(|n| self.pair(&j.apply(&QPoly::x_pow(n))?))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentFunctional { moments })
    }

    /// The same action computed as `Σ (-1)^n/n! D^n(a_n u)` from
    /// [`MomentFunctional::left_mul`] and the distributional derivative.
    ///
    /// Moment `j` only sees the terms `n ≤ j`, each known up to
    /// `M - deg a_n + n`, so the result is usually as long as the pairing route.
    pub fn transpose_apply_distributional(&self, j: &OperatorJ) -> Result<Self> {
        let mut horizon = j.horizon().min(self.horizon());
        let mut acc = MomentFunctional::zero(horizon);
        for (n, a) in j.coeffs().iter().enumerate() {
            if a.is_zero() || n > horizon {
                continue;
            }
            let Ok(mut term) = self.left_mul(a) else {
                // a_n u carries no moments; only j < n stay computable
                horizon = n.checked_sub(1).ok_or(Error::EmptyResult)?;
                continue;
            };
            for _ in 0..n {
                term = term.derive_extended();
            }
            horizon = horizon.min(term.horizon());
            let c = if n % 2 == 0 { factorial(n).recip() } else { -factorial(n).recip() };
            for (i, m) in acc.moments.iter_mut().enumerate().take(term.horizon() + 1) {
                *m += &term.moments[i] * &c;
            }
        }
        acc.truncate(horizon)
    }

    /// `J^(m)(u)`, the transpose action of the shifted operator `J^(m)`.
    pub fn transpose_shift_apply(&self, j: &OperatorJ, m: usize) -> Result<Self> {
        self.transpose_apply(&j.shift(m)?)
    }
}

/// `max(0, max_ν deg a_ν - ν)`.
fn degree_slack(j: &OperatorJ) -> usize {
    j.coeffs()
        .iter()
        .enumerate()
        .filter_map(|(nu, a)| a.degree().map(|d| d.saturating_sub(nu)))
        .max()
        .unwrap_or(0)
}

#[derive(Deserialize)]
struct FunctionalWire {
    moments: Vec<Rat>,
}

impl<'de> Deserialize<'de> for MomentFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = FunctionalWire::deserialize(deserializer)?;
        MomentFunctional::new(w.moments).map_err(serde::de::Error::custom)
    }
}
