//! Degree-nonincreasing linear operators on polynomials in canonical form
//!
//! ```text
//! J = Σ_{ν ≥ 0} a_ν(x)/ν! · D^ν,    deg a_ν ≤ ν
//! ```
//!
//! An [`OperatorJ`] stores `a_0 … a_N` for an explicit horizon `N`. Every
//! polynomial of degree at most `N` is mapped exactly; anything beyond the
//! horizon is an error rather than a silent truncation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, LoweringCondition, Result};
use crate::polyalg::{binomial, factorial, QPoly, Rat};

/// Canonical expansion `{a_ν}_{ν ≤ N}` of a degree-nonincreasing operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorJ {
    coeffs: Vec<QPoly>,
    /// Set on auxiliary operators `J^(m)`, which may break `deg a_ν ≤ ν`.
    relaxed: bool,
}

/// Result of lowering-order detection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoweringProfile {
    /// The order `k`: `J` maps `x^{n+k}` to a polynomial of exact degree `n`.
    pub order: usize,
    /// `λ_{k+n}^{[k]}` for `n = 0 … N-k`, all nonzero.
    pub lambdas: Vec<Rat>,
    /// Nonvanishing is certified up to `λ_N`.
    pub horizon: usize,
}

impl LoweringProfile {
    /// `λ_m^{[k]}`, with the convention `λ_m = 0` for `m < k`.
    /// `None` past the horizon.
    pub fn lambda(&self, m: usize) -> Option<Rat> {
        if m < self.order {
            Some(Rat::zero())
        } else {
            self.lambdas.get(m - self.order).cloned()
        }
    }
}

impl OperatorJ {
    /// Validates `deg a_ν ≤ ν` and takes `N = coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<QPoly>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::BadParameter("operator needs at least a_0".into()));
        }
        if let Some(nu) = coeffs
            .iter()
            .enumerate()
            .position(|(nu, a)| !a.degree_at_most(nu as isize))
        {
            return Err(Error::DegreeViolation(nu));
        }
        Ok(OperatorJ {
            coeffs,
            relaxed: false,
        })
    }

    /// Like [`OperatorJ::from_coeffs`], with coefficients past the list taken
    /// to be zero up to `horizon`. Used for operators whose expansion is
    /// known to be finite (differential operators, three-term solvers).
    pub fn from_coeffs_with_horizon(mut coeffs: Vec<QPoly>, horizon: usize) -> Result<Self> {
        if coeffs.len() > horizon + 1 {
            return Err(Error::HorizonMismatch {
                declared: horizon,
                listed: coeffs.len(),
            });
        }
        coeffs.resize(horizon + 1, QPoly::zero());
        OperatorJ::from_coeffs(coeffs)
    }

    /// Horizon `N`.
    pub fn horizon(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    /// `a_ν(x)`; zero past the horizon.
    pub fn coeff(&self, nu: usize) -> QPoly {
        self.coeffs.get(nu).cloned().unwrap_or_else(QPoly::zero)
    }

    /// `a_i^{[ν]}`, the coefficient of `x^i` in `a_ν`.
    pub fn entry(&self, nu: usize, i: usize) -> Rat {
        self.coeffs.get(nu).map(|a| a.coeff(i)).unwrap_or_else(Rat::zero)
    }

    /// Same operator with the horizon extended by zero coefficients.
    /// Only meaningful when the expansion is known to terminate.
    pub fn extend_finite(&self, horizon: usize) -> Result<Self> {
        let mut op = OperatorJ::from_coeffs_with_horizon(self.coeffs.clone(), horizon.max(self.horizon()))?;
        op.relaxed = self.relaxed;
        Ok(op)
    }

    /// Index of the last nonzero coefficient, if any.
    pub fn last_nonzero(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|a| !a.is_zero())
    }

    fn check_degree(&self, p: &QPoly) -> Result<()> {
        match p.degree() {
            Some(d) if d > self.horizon() => Err(Error::HorizonExceeded {
                degree: d,
                horizon: self.horizon(),
            }),
            _ => Ok(()),
        }
    }

    /// `J(p) = Σ a_ν p^{(ν)}/ν!`.
    pub fn apply(&self, p: &QPoly) -> Result<QPoly> {
        self.check_degree(p)?;
        let mut out = QPoly::zero();
        let Some(d) = p.degree() else {
            return Ok(out);
        };
        let mut fact = Rat::one();
        for nu in 0..=d {
            if nu > 0 {
                fact = fact * Rat::from(nu);
            }
            let a = &self.coeffs[nu];
            if a.is_zero() {
                continue;
            }
            let term = &(a * &p.derive(nu)) * &QPoly::constant(fact.recip());
            out = &out + &term;
        }
        Ok(out)
    }

    /// `J(x^n)` by the closed double sum over the coefficients `a_i^{[ν]}`.
    pub fn image(&self, n: usize) -> Result<QPoly> {
        if self.relaxed {
            return Err(Error::RelaxedOperator);
        }
        if n > self.horizon() {
            return Err(Error::HorizonExceeded {
                degree: n,
                horizon: self.horizon(),
            });
        }
        let coeffs = (0..=n)
            .map(|tau| {
                (0..=tau)
                    .map(|nu| binomial(n, n - nu) * self.entry(n - nu, tau - nu))
                    .sum()
            })
            .collect();
        Ok(QPoly::new(coeffs))
    }

    /// The unique canonical operator with `J(x^n) = images[n]`.
    pub fn from_images(images: &[QPoly]) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::BadParameter("need at least one image".into()));
        }
        if let Some(n) = images
            .iter()
            .enumerate()
            .position(|(n, d)| !d.degree_at_most(n as isize))
        {
            return Err(Error::NotDegreeNonincreasing(n));
        }
        // a_τ^{[n]} = d_τ^{[n]} - Σ_{ν=1}^{τ} C(n, n-ν) a_{τ-ν}^{[n-ν]}
        let mut table: Vec<Vec<Rat>> = Vec::with_capacity(images.len());
        for (n, d) in images.iter().enumerate() {
            let mut row = Vec::with_capacity(n + 1);
            for tau in 0..=n {
                let mut v = d.coeff(tau);
                for nu in 1..=tau {
                    v -= binomial(n, n - nu) * &table[n - nu][tau - nu];
                }
                row.push(v);
            }
            table.push(row);
        }
        OperatorJ::from_coeffs(table.into_iter().map(QPoly::new).collect())
    }

    pub fn identity(horizon: usize) -> Self {
        OperatorJ::from_coeffs_with_horizon(vec![QPoly::one()], horizon).expect("identity is canonical")
    }

    /// `D`: `a_n = δ_{n,1}`.
    pub fn derivative(horizon: usize) -> Self {
        OperatorJ::from_coeffs_with_horizon(vec![QPoly::zero(), QPoly::one()], horizon.max(1))
            .expect("D is canonical")
    }

    /// `DxD = D + xD²`.
    pub fn dxd(horizon: usize) -> Self {
        OperatorJ::from_coeffs_with_horizon(
            vec![QPoly::zero(), QPoly::one(), QPoly::from_ints(&[0, 2])],
            horizon.max(2),
        )
        .expect("DxD is canonical")
    }

    /// `Σ p_i(x) D^i` for polynomial coefficients `p_i`, i.e. `a_i = i!·p_i`.
    pub fn from_differential(ps: &[QPoly], horizon: usize) -> Result<Self> {
        let coeffs = ps
            .iter()
            .enumerate()
            .map(|(i, p)| p.scale(&factorial(i)))
            .collect();
        OperatorJ::from_coeffs_with_horizon(coeffs, horizon.max(ps.len().saturating_sub(1)))
    }

    /// `s·(h_A ∘ τ_{-B})`, i.e. `f ↦ s·f(Ax + B)`: `a_n = s((A-1)x + B)^n`.
    pub fn affine(s: &Rat, a: &Rat, b: &Rat, horizon: usize) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::BadParameter("affine operator needs s != 0".into()));
        }
        if a.is_zero() {
            return Err(Error::BadParameter("affine operator needs A != 0".into()));
        }
        let base = QPoly::new(vec![b.clone(), a - &Rat::one()]);
        let coeffs = (0..=horizon).map(|n| base.pow(n).scale(s)).collect();
        OperatorJ::from_coeffs(coeffs)
    }

    /// `D_ϖ f = (f(x+ϖ) - f(x))/ϖ`: `a_0 = 0`, `a_n = ϖ^{n-1}`.
    pub fn divided_difference(w: &Rat, horizon: usize) -> Result<Self> {
        if w.is_zero() {
            return Err(Error::BadParameter("divided difference needs a nonzero step".into()));
        }
        let coeffs = (0..=horizon)
            .map(|n| match n {
                0 => QPoly::zero(),
                _ => QPoly::constant(w.pow(n as i32 - 1)),
            })
            .collect();
        OperatorJ::from_coeffs(coeffs)
    }

    /// `H_q f = (f(qx) - f(x))/((q-1)x)`: `a_0 = 0`, `a_n = (q-1)^{n-1} x^{n-1}`.
    ///
    /// `q` must avoid zero and the roots of unity, which over the rationals
    /// are `±1`.
    pub fn q_derivative(q: &Rat, horizon: usize) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::BadParameter(format!(
                "q-derivative needs q outside {{0, 1, -1}}, got {q}"
            )));
        }
        let qm1 = q - &Rat::one();
        let coeffs = (0..=horizon)
            .map(|n| match n {
                0 => QPoly::zero(),
                _ => QPoly::monomial(qm1.pow(n as i32 - 1), n - 1),
            })
            .collect();
        OperatorJ::from_coeffs(coeffs)
    }

    /// `I_(q,ω) f = f(x) + ω f(qx)`: `a_0 = 1 + ω`, `a_n = ω(q-1)^n x^n`.
    ///
    /// Requires `ω ≠ 0`, `q ∉ {0, ±1}` and `1 + ω q^n ≠ 0`; the last
    /// condition is checked for `n ≤ horizon` only.
    pub fn i_q_omega(q: &Rat, omega: &Rat, horizon: usize) -> Result<Self> {
        if omega.is_zero() {
            return Err(Error::BadParameter("I_(q,w) needs w != 0".into()));
        }
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::BadParameter(format!(
                "I_(q,w) needs q outside {{0, 1, -1}}, got {q}"
            )));
        }
        if let Some(n) = (0..=horizon).find(|&n| (Rat::one() + omega * &q.pow(n as i32)).is_zero()) {
            return Err(Error::BadParameter(format!("1 + w q^{n} = 0")));
        }
        let qm1 = q - &Rat::one();
        let coeffs = (0..=horizon)
            .map(|n| match n {
                0 => QPoly::constant(Rat::one() + omega),
                _ => QPoly::monomial(omega * &qm1.pow(n as i32), n),
            })
            .collect();
        OperatorJ::from_coeffs(coeffs)
    }

    /// Coefficientwise `J + K` on the common horizon.
    pub fn add(&self, other: &OperatorJ) -> OperatorJ {
        let n = self.horizon().min(other.horizon());
        OperatorJ {
            coeffs: (0..=n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
            relaxed: self.relaxed || other.relaxed,
        }
    }

    pub fn scale(&self, c: &Rat) -> OperatorJ {
        OperatorJ {
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
            relaxed: self.relaxed,
        }
    }

    /// `J^(m) = Σ a_{n+m}(x)/n! D^n`, horizon `N - m`.
    ///
    /// The result is flagged relaxed for `m > 0`: it is an auxiliary operator
    /// accepted by [`OperatorJ::apply`] and the transpose action only.
    pub fn shift(&self, m: usize) -> Result<OperatorJ> {
        if m > self.horizon() {
            return Err(Error::HorizonExceeded {
                degree: m,
                horizon: self.horizon(),
            });
        }
        Ok(OperatorJ {
            coeffs: self.coeffs[m..].to_vec(),
            relaxed: self.relaxed || m > 0,
        })
    }

    /// `self ∘ inner`: with `self = Σ b_μ/μ! D^μ` and `inner = Σ a_ν/ν! D^ν`,
    ///
    /// ```text
    /// c_n = Σ_{μ=0}^{n} b_μ Σ_{ν=0}^{μ} C(n,ν) a_{n-ν}^{(μ-ν)}/(μ-ν)!
    /// ```
    ///
    /// on the horizon `min(N_self, N_inner)`.
    pub fn compose(&self, inner: &OperatorJ) -> OperatorJ {
        let horizon = self.horizon().min(inner.horizon());
        let coeffs = (0..=horizon)
            .map(|n| {
                let mut c = QPoly::zero();
                for mu in 0..=n {
                    let b = &self.coeffs[mu];
                    if b.is_zero() {
                        continue;
                    }
                    let inner_sum = compose_inner(inner, n, mu);
                    c = &c + &(b * &inner_sum);
                }
                c
            })
            .collect();
        OperatorJ {
            coeffs,
            relaxed: self.relaxed || inner.relaxed,
        }
    }

    /// `λ_n^{[0]} = Σ_{μ=0}^{n} C(n,μ) a_μ^{[μ]}`, the leading coefficient of `J(x^n)`.
    pub fn iso_lambda(&self, n: usize) -> Rat {
        (0..=n).map(|mu| binomial(n, mu) * self.entry(mu, mu)).sum()
    }

    /// Inverse of an isomorphism, on the same horizon.
    pub fn invert(&self) -> Result<OperatorJ> {
        if self.relaxed {
            return Err(Error::RelaxedOperator);
        }
        let lambdas: Vec<Rat> = (0..=self.horizon()).map(|n| self.iso_lambda(n)).collect();
        if let Some(n) = lambdas.iter().position(Rat::is_zero) {
            return Err(Error::NotIsomorphism(n));
        }
        let mut inv: Vec<QPoly> = vec![QPoly::constant(lambdas[0].recip())];
        for n in 0..self.horizon() {
            // λ_{n+1} ã_{n+1} = -Σ_{μ=0}^{n} ã_μ Σ_{ν=0}^{μ} C(n+1,ν) a_{n+1-ν}^{(μ-ν)}/(μ-ν)!
            let mut rhs = QPoly::zero();
            for (mu, at) in inv.iter().enumerate() {
                if at.is_zero() {
                    continue;
                }
                rhs = &rhs + &(at * &compose_inner(self, n + 1, mu));
            }
            inv.push(rhs.scale(&-lambdas[n + 1].recip()));
        }
        OperatorJ::from_coeffs(inv)
    }

    /// Detects the order `k` of a lowering operator and its normalization scalars
    ///
    /// ```text
    /// λ_{n+k}^{[k]} = Σ_{ν=0}^{n} C(n+k, n+k-ν) a_{n-ν}^{[n+k-ν]}
    /// ```
    ///
    /// `k` is pinned by the first nonzero coefficient; the remaining
    /// conditions (`deg a_ν ≤ ν-k`, `λ ≠ 0`) are verified up to the horizon.
    pub fn lowering_order(&self) -> Result<LoweringProfile> {
        if self.relaxed {
            return Err(Error::NotLowering {
                condition: LoweringCondition::Relaxed,
                index: 0,
            });
        }
        let horizon = self.horizon();
        let k = self
            .coeffs
            .iter()
            .position(|a| !a.is_zero())
            .ok_or(Error::NotLowering {
                condition: LoweringCondition::ZeroOperator,
                index: horizon,
            })?;
        for nu in k..=horizon {
            if !self.coeffs[nu].degree_at_most(nu as isize - k as isize) {
                return Err(Error::NotLowering {
                    condition: LoweringCondition::DegreeBound,
                    index: nu,
                });
            }
        }
        let mut lambdas = Vec::with_capacity(horizon - k + 1);
        for n in 0..=(horizon - k) {
            let lambda: Rat = (0..=n)
                .map(|nu| binomial(n + k, n + k - nu) * self.entry(n + k - nu, n - nu))
                .sum();
            if lambda.is_zero() {
                return Err(Error::NotLowering {
                    condition: LoweringCondition::LambdaVanishes,
                    index: n + k,
                });
            }
            lambdas.push(lambda);
        }
        Ok(LoweringProfile {
            order: k,
            lambdas,
            horizon,
        })
    }

    /// `Σ_{n ≤ order} a_n(x0)/n! z^n`, a polynomial in `z`.
    pub fn series_truncated(&self, x0: &Rat, order: usize) -> Result<QPoly> {
        if order > self.horizon() {
            return Err(Error::HorizonExceeded {
                degree: order,
                horizon: self.horizon(),
            });
        }
        Ok(QPoly::new(
            (0..=order)
                .map(|n| self.coeffs[n].eval(x0) / factorial(n))
                .collect(),
        ))
    }
}

/// `Σ_{ν=0}^{μ} C(n,ν) a_{n-ν}^{(μ-ν)}(x)/(μ-ν)!`.
fn compose_inner(inner: &OperatorJ, n: usize, mu: usize) -> QPoly {
    let mut s = QPoly::zero();
    for nu in 0..=mu.min(n) {
        let a = &inner.coeffs[n - nu];
        if a.is_zero() {
            continue;
        }
        let d = a.derive(mu - nu);
        if d.is_zero() {
            continue;
        }
        s = &s + &d.scale(&(binomial(n, nu) / factorial(mu - nu)));
    }
    s
}

#[derive(Serialize, Deserialize)]
struct OperatorWire {
    #[serde(rename = "N")]
    horizon: usize,
    coeffs: Vec<QPoly>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    relaxed: bool,
}

impl Serialize for OperatorJ {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorWire {
            horizon: self.horizon(),
            coeffs: self.coeffs.clone(),
            relaxed: self.relaxed,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OperatorJ {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let w = OperatorWire::deserialize(deserializer)?;
        if w.relaxed {
            if w.coeffs.len() != w.horizon + 1 {
                return Err(serde::de::Error::custom(Error::HorizonMismatch {
                    declared: w.horizon,
                    listed: w.coeffs.len(),
                }));
            }
            return Ok(OperatorJ {
                coeffs: w.coeffs,
                relaxed: true,
            });
        }
        OperatorJ::from_coeffs_with_horizon(w.coeffs, w.horizon).map_err(serde::de::Error::custom)
    }
}
