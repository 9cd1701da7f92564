//! Pearson equations `D(φu) + ψu = 0` and the fixed-point solvers for
//! three-term operators `J = a_0 + a_1 D + (a_2/2) D²` of order `k = 0, 1, 2`.
//!
//! For `k = 0` the fixed points are the classical sequences and the pair
//! `(φ, ψ) = (a_2, -2a_1)` is reduced by an affine map to one of the
//! canonical forms
//!
//! ```text
//! Bessel    φ = x²,       ψ = -2α(x - β̃_0)
//! Jacobi    φ = x² - 1,   ψ = -(α+β+2)x + α - β
//! Laguerre  φ = x,        ψ = x - α - 1
//! Hermite   φ = 1,        ψ = 2x
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::MomentFunctional;
use crate::mps::{fixed_point_check, generate, Mps, StructureCoeffs};
use crate::operator::{LoweringProfile, OperatorJ};
use crate::polyalg::{Poly, QPoly, Rat, Scalar, Surd};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PearsonPair {
    pub phi: QPoly,
    pub psi: QPoly,
}

impl PearsonPair {
    /// Validates `deg φ ≤ 2`, `deg ψ ≤ 1`.
    pub fn new(phi: QPoly, psi: QPoly) -> Result<Self> {
        if !phi.degree_at_most(2) || !psi.degree_at_most(1) {
            return Err(Error::BadParameter("Pearson pair needs deg φ ≤ 2, deg ψ ≤ 1".into()));
        }
        Ok(PearsonPair { phi, psi })
    }

    /// `ψ' - (n/2)φ''`, the coefficient of the highest moment at step `n`.
    pub fn admissibility_coeff(&self, n: usize) -> Rat {
        self.psi.coeff(1) - Rat::from(n) * self.phi.coeff(2)
    }

    /// First `n` at which the moment recursion breaks down, if any.
    /// Exact for all `n`, not just a finite range.
    pub fn first_inadmissible(&self) -> Option<usize> {
        let (p1, f2) = (self.psi.coeff(1), self.phi.coeff(2));
        if f2.is_zero() {
            return p1.is_zero().then_some(0);
        }
        let n = p1 / f2;
        (n.is_integer() && !n.is_negative()).then(|| n.to_u64().expect("nonnegative integer") as usize)
    }

    /// The pair of `ũ = (h_{A^{-1}} ∘ τ_{-B})u`:
    /// `φ̃ = A^{-t}φ(Ax + B)`, `ψ̃ = A^{1-t}ψ(Ax + B)` with `t = deg φ`.
    pub fn affine_transport(&self, a: &Rat, b: &Rat) -> Result<PearsonPair> {
        let t = self.phi.degree().unwrap_or(0) as i32;
        Ok(PearsonPair {
            phi: self.phi.affine_sub(a, b)?.scale(&a.pow(-t)),
            psi: self.psi.affine_sub(a, b)?.scale(&a.pow(1 - t)),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicalCase {
    #[serde(rename = "A-Bessel")]
    Bessel,
    #[serde(rename = "A-Jacobi")]
    Jacobi,
    #[serde(rename = "B-Laguerre")]
    Laguerre,
    #[serde(rename = "C-Hermite")]
    Hermite,
}

/// `x ↦ Ax + B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Affine<A = Surd> {
    #[serde(rename = "A")]
    pub a: A,
    #[serde(rename = "B")]
    pub b: Rat,
}

/// `φ_1 = (x - d)² - μ` after normalizing `φ` to be monic (case A only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intermediate {
    pub d: Rat,
    pub mu: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub case: ClassicalCase,
    pub params: BTreeMap<String, Surd>,
    pub affine: Affine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intermediate: Option<Intermediate>,
    /// Admissibility recorded for moment indices up to this value.
    pub admissible_up_to: usize,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn param(&self, name: &str) -> Option<&Surd> {
        self.params.get(name)
    }
}

fn three_term(j: &OperatorJ) -> Result<()> {
    if j.is_relaxed() {
        return Err(Error::RelaxedOperator);
    }
    match j.last_nonzero() {
        Some(nu) if nu > 2 => Err(Error::NotThreeTerm(nu)),
        _ => Ok(()),
    }
}

/// `(φ, ψ) = (a_2, -2a_1)` and `β_0 = -a_0^{[1]}/a_1^{[1]}` for a degree-preserving `J`.
pub fn pearson_from_j_k0(j: &OperatorJ) -> Result<(PearsonPair, Rat)> {
    three_term(j)?;
    let a11 = j.entry(1, 1);
    if a11.is_zero() {
        return Err(Error::NoClassicalSolution(
            "a_1 has no x term, so ψ would be constant".into(),
        ));
    }
    let beta0 = -(j.entry(1, 0) / &a11);
    let pair = PearsonPair::new(j.coeff(2), j.coeff(1).scale(&Rat::from_int(-2)))?;
    if let Some(n) = pair.first_inadmissible() {
        return Err(Error::InadmissiblePair(n));
    }
    Ok((pair, beta0))
}

/// Moments `0..=m` of the form solving `D(φu) + ψu = 0` with `(u)_0 = 1`.
///
/// Pairing with `x^n` gives
/// `(ψ_1 - nφ_2) m_{n+1} = nφ_0 m_{n-1} + (nφ_1 - ψ_0) m_n`.
pub fn moments_from_pearson(p: &PearsonPair, m: usize) -> Result<MomentFunctional> {
    let (f0, f1) = (p.phi.coeff(0), p.phi.coeff(1));
    let p0 = p.psi.coeff(0);
    let mut ms = vec![Rat::one()];
    for n in 0..m {
        let lead = p.admissibility_coeff(n);
        if lead.is_zero() {
            return Err(Error::InadmissiblePair(n));
        }
        let nr = Rat::from(n);
        let mut rhs = (&nr * &f1 - &p0) * &ms[n];
        if n > 0 {
            rhs += &nr * &f0 * &ms[n - 1];
        }
        ms.push(rhs / lead);
    }
    MomentFunctional::new(ms)
}

/// Whether every computable moment of `D(φu) + ψu` vanishes.
pub fn pearson_verify(p: &PearsonPair, u: &MomentFunctional) -> bool {
    let (Ok(fu), Ok(pu)) = (u.left_mul(&p.phi), u.left_mul(&p.psi)) else {
        return true;
    };
    fu.derive().add(&pu).is_zero()
}

/// Reduces a Pearson pair to its canonical classical form.
///
/// `admissible_up_to` is the moment horizon recorded in the report; the
/// admissibility test itself is exact for every `n`.
pub fn classify_affine(p: &PearsonPair, beta0: &Rat, admissible_up_to: usize) -> Result<ClassificationReport> {
    if p.phi.is_zero() {
        return Err(Error::NoClassicalSolution("φ = 0".into()));
    }
    // back to the operator entries: φ = a_2, ψ = -2a_1
    let half = Rat::frac(-1, 2);
    let a11 = p.psi.coeff(1) * &half;
    let a01 = p.psi.coeff(0) * &half;
    if a11.is_zero() {
        return Err(Error::NoClassicalSolution("ψ is constant".into()));
    }
    if beta0 != &-(&a01 / &a11) {
        return Err(Error::BadParameter(format!(
            "β_0 = {beta0} does not match the pair, expected {}",
            -(&a01 / &a11)
        )));
    }
    if let Some(n) = p.first_inadmissible() {
        return Err(Error::InadmissiblePair(n));
    }
    let (a02, a12, a22) = (p.phi.coeff(0), p.phi.coeff(1), p.phi.coeff(2));
    let mut params = BTreeMap::new();
    let mut notes = Vec::new();
    let mut intermediate = None;

    let (case, affine, target) = match p.phi.degree() {
        Some(2) => {
            let d = -(&a12 / (Rat::from_int(2) * &a22));
            let mu = &d * &d - &a02 / &a22;
            let r = &a11 / &a22;
            intermediate = Some(Intermediate { d: d.clone(), mu: mu.clone() });
            if mu.is_zero() {
                let b0 = beta0 - &d;
                params.insert("alpha".into(), Surd::rational(r.clone()));
                notes.push(format!("shifted beta_0 = {b0}"));
                let target = (
                    QPoly::x_pow(2),
                    QPoly::new(vec![Rat::from_int(2) * &r * &b0, Rat::from_int(-2) * &r]),
                );
                (ClassicalCase::Bessel, Affine { a: Surd::one(), b: d }, target.into_surd())
            } else {
                // α, β = r(1 ∓ e/√μ) - 1 with e = d - β_0, and 1/√μ = √μ/μ
                let e = &d - beta0;
                let s = &r * &e / &mu;
                let alpha = Surd::new(&r - Rat::one(), -s.clone(), mu.clone());
                let beta = Surd::new(&r - Rat::one(), s, mu.clone());
                if alpha.formal_nonreal() || beta.formal_nonreal() {
                    notes.push("mu < 0: parameters are formal over sqrt(mu)".into());
                }
                notes.push("regularity (alpha, beta, alpha+beta+1 not negative integers) is not enforced".into());
                let two = Surd::rational(Rat::from_int(2));
                let ab = alpha.checked_add(&beta)?;
                let target = (
                    Poly::new(vec![Surd::rational(-Rat::one()), Surd::zero(), Surd::one()]),
                    Poly::new(vec![alpha.checked_sub(&beta)?, ab.checked_add(&two)?.negate()]),
                );
                params.insert("alpha".into(), alpha);
                params.insert("beta".into(), beta);
                (ClassicalCase::Jacobi, Affine { a: Surd::sqrt(&mu), b: d }, target)
            }
        }
        Some(1) => {
            let a = -(&a12 / (Rat::from_int(2) * &a11));
            let b = -(&a02 / &a12);
            let alpha = Rat::from_int(-1) + Rat::from_int(2) / &a12 * (&a01 - &a02 * &a11 / &a12);
            let target = (QPoly::x(), QPoly::new(vec![-(&alpha + Rat::one()), Rat::one()]));
            params.insert("alpha".into(), Surd::rational(alpha));
            (ClassicalCase::Laguerre, Affine { a: Surd::rational(a), b }, target.into_surd())
        }
        _ => {
            let a = Surd::sqrt(&-(&a02 / &a11));
            if a.formal_nonreal() {
                notes.push("dilation is formal: -a_0^[2]/a_1^[1] < 0".into());
            }
            let target = (QPoly::one(), QPoly::from_ints(&[0, 2]));
            (ClassicalCase::Hermite, Affine { a, b: beta0.clone() }, target.into_surd())
        }
    };
    canonical_check(p, &affine, &target)?;
    Ok(ClassificationReport {
        case,
        params,
        affine,
        intermediate,
        admissible_up_to,
        notes,
    })
}

trait IntoSurd {
    fn into_surd(self) -> (Poly<Surd>, Poly<Surd>);
}

impl IntoSurd for (QPoly, QPoly) {
    fn into_surd(self) -> (Poly<Surd>, Poly<Surd>) {
        (self.0.map(|c| Surd::rational(c.clone())), self.1.map(|c| Surd::rational(c.clone())))
    }
}

/// Transports the pair by `affine` over `Q(√d)` and compares with the
/// canonical pair up to a common scalar.
fn canonical_check(p: &PearsonPair, affine: &Affine, target: &(Poly<Surd>, Poly<Surd>)) -> Result<()> {
    let lift = |q: &QPoly| q.map(|c| Surd::rational(c.clone()));
    let b = Surd::rational(affine.b.clone());
    let a_inv = affine.a.inverse().ok_or(Error::DegenerateAffine)?;
    let t = p.phi.degree().unwrap_or(0);
    let mut phi_scale = Surd::one();
    for _ in 0..t {
        phi_scale = phi_scale.checked_mul(&a_inv)?;
    }
    let psi_scale = phi_scale.checked_mul(&affine.a)?;
    let phi = lift(&p.phi).try_affine_sub(&affine.a, &b)?.try_scale(&phi_scale)?;
    let psi = lift(&p.psi).try_affine_sub(&affine.a, &b)?.try_scale(&psi_scale)?;
    let c = phi.leading().try_inv().ok_or(Error::DegenerateAffine)?;
    if phi.try_scale(&c)? != target.0 || psi.try_scale(&c)? != target.1 {
        return Err(Error::NoClassicalSolution(format!(
            "transported pair ({phi}, {psi}) is not canonical"
        )));
    }
    Ok(())
}

/// Monic orthogonal sequence `P_0 … P_n` of a form with moments through `2n`,
/// by Stieltjes orthogonalization. A zero norm `⟨u, P_j²⟩` means the form is
/// not regular.
pub fn orthogonalize(u: &MomentFunctional, n: usize) -> Result<Mps> {
    if u.horizon() < 2 * n {
        return Err(Error::HorizonExceeded {
            degree: 2 * n,
            horizon: u.horizon(),
        });
    }
    let mut betas = Vec::with_capacity(n);
    let mut gammas = Vec::with_capacity(n.saturating_sub(1));
    let mut prev = QPoly::zero();
    let mut cur = QPoly::one();
    let mut prev_norm = Rat::one();
    for j in 0..=n {
        let sq = &cur * &cur;
        let norm = u.pair(&sq)?;
        if norm.is_zero() {
            return Err(Error::NotRegular(j));
        }
        if j == n {
            break;
        }
        let beta = u.pair(&(&QPoly::x() * &sq))? / &norm;
        let gamma = if j == 0 { Rat::zero() } else { &norm / &prev_norm };
        if j > 0 {
            gammas.push(gamma.clone());
        }
        let next = &(&QPoly::new(vec![-beta.clone(), Rat::one()]) * &cur) - &prev.scale(&gamma);
        betas.push(beta);
        prev = std::mem::replace(&mut cur, next);
        prev_norm = norm;
    }
    generate(&StructureCoeffs::Orthogonal { betas, gammas }, n)
}

/// Full `k = 0` pipeline: classification, moments, orthogonal sequence
/// through degree `n`, and the eigenrelation `J(P_m) = λ_m P_m` for `m ≤ n`.
pub fn solve_k0(j: &OperatorJ, n: usize) -> Result<(ClassificationReport, Mps, Vec<Rat>)> {
    let (pair, beta0) = pearson_from_j_k0(j)?;
    let mut report = classify_affine(&pair, &beta0, 2 * n)?;
    let (j, note) = widen(j, n)?;
    report.notes.extend(note);
    let u = moments_from_pearson(&pair, 2 * n)?;
    let mps = orthogonalize(&u, n)?;
    let (a00, a11, a22) = (j.entry(0, 0), j.entry(1, 1), j.entry(2, 2));
    let lambdas: Vec<Rat> = (0..=n)
        .map(|m| {
            let mr = Rat::from(m);
            &a00 + &mr * &a11 + &mr * (&mr - Rat::one()) / Rat::from_int(2) * &a22
        })
        .collect();
    for (m, lambda) in lambdas.iter().enumerate() {
        if j.apply(mps.poly(m))? != mps.poly(m).scale(lambda) {
            return Err(Error::EigenrelationFailed(m));
        }
    }
    Ok((report, mps, lambdas))
}

fn widen(j: &OperatorJ, horizon: usize) -> Result<(OperatorJ, Option<String>)> {
    if j.horizon() >= horizon {
        return Ok((j.clone(), None));
    }
    let note = format!(
        "operator horizon extended from {} to {horizon} with zero coefficients (three-term operator)",
        j.horizon()
    );
    Ok((j.extend_finite(horizon)?, Some(note)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Laguerre,
    Hermite,
}

/// A fixed-point family for `k ≥ 1`, given by one representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySolution {
    pub family: Family,
    pub order: usize,
    pub params: BTreeMap<String, Rat>,
    /// The representative is the canonical family moved by this map.
    pub affine: Affine<Rat>,
    /// Parameters the operator leaves undetermined.
    pub free: Vec<String>,
    pub notes: Vec<String>,
}

/// `β_n = A(2n+α+1) + B`, `γ_{n+1} = A²(n+1)(n+α+1)`, degrees `0..=degree`.
pub fn laguerre_structure(alpha: &Rat, affine: &Affine<Rat>, degree: usize) -> StructureCoeffs {
    let a = &affine.a;
    StructureCoeffs::Orthogonal {
        betas: (0..degree)
            .map(|n| a * (Rat::from(2 * n + 1) + alpha) + &affine.b)
            .collect(),
        gammas: (0..degree.saturating_sub(1))
            .map(|n| a * a * Rat::from(n + 1) * (Rat::from(n + 1) + alpha))
            .collect(),
    }
}

/// `β_n = B`, `γ_{n+1} = A²(n+1)/2`.
pub fn hermite_structure(affine: &Affine<Rat>, degree: usize) -> StructureCoeffs {
    let a = &affine.a;
    StructureCoeffs::Orthogonal {
        betas: vec![affine.b.clone(); degree],
        gammas: (0..degree.saturating_sub(1))
            .map(|n| a * a * Rat::from(n + 1) / Rat::from_int(2))
            .collect(),
    }
}

fn lowering_setup(j: &OperatorJ, n: usize, k: usize) -> Result<(OperatorJ, LoweringProfile, Vec<String>)> {
    three_term(j)?;
    let (j, note) = widen(j, n + k)?;
    let profile = j.lowering_order()?;
    if profile.order != k {
        return Err(Error::ProfileMismatch {
            expected: k,
            found: profile.order,
        });
    }
    Ok((j, profile, note.into_iter().collect()))
}

fn certify(mps: &Mps, j: &OperatorJ) -> Result<()> {
    let verdict = fixed_point_check(mps, j)?;
    match verdict.first_failure {
        Some(n) => Err(Error::NotAFixedPoint(n)),
        None => Ok(()),
    }
}

/// `k = 1`: `J = a_0^{[1]} D + ((a_0^{[2]} + a_1^{[2]} x)/2) D²`.
///
/// Returns the representative with `A = 1` through degree `n + 1`, and
/// `λ_1 … λ_{n+1}`.
pub fn solve_k1(j: &OperatorJ, n: usize) -> Result<(FamilySolution, Mps, Vec<Rat>)> {
    let (j, profile, mut notes) = lowering_setup(j, n, 1)?;
    let (a01, a02, a12) = (j.entry(1, 0), j.entry(2, 0), j.entry(2, 1));
    let mut params = BTreeMap::new();
    let (family, affine, structure, free) = if !a12.is_zero() {
        let alpha = Rat::from_int(2) * &a01 / &a12 - Rat::one();
        let affine = Affine {
            a: Rat::one(),
            b: -(&a02 / &a12),
        };
        let s = laguerre_structure(&alpha, &affine, n + 1);
        params.insert("alpha".into(), alpha);
        (Family::Laguerre, affine, s, vec!["A".to_string()])
    } else if a02.is_zero() {
        notes.push("Appell branch: J is a multiple of D".into());
        let affine = Affine {
            a: Rat::one(),
            b: Rat::zero(),
        };
        let s = hermite_structure(&affine, n + 1);
        (Family::Hermite, affine, s, vec!["A".to_string(), "B".to_string()])
    } else {
        return Err(Error::NoSolution(
            "a_1^[2] = 0 with a_0^[2] != 0 forces ψ = 0 and a_2 = 0".into(),
        ));
    };
    let mps = generate(&structure, n + 1)?;
    certify(&mps, &j)?;
    let solution = FamilySolution {
        family,
        order: 1,
        params,
        affine,
        free,
        notes,
    };
    Ok((solution, mps, profile.lambdas))
}

/// `k = 2`: `J = (a_0^{[2]}/2) D²`, whose fixed points are the Hermite family.
pub fn solve_k2(j: &OperatorJ, n: usize) -> Result<(FamilySolution, Mps, Vec<Rat>)> {
    let (j, profile, notes) = lowering_setup(j, n, 2)?;
    let affine = Affine {
        a: Rat::one(),
        b: Rat::zero(),
    };
    let mps = generate(&hermite_structure(&affine, n + 2), n + 2)?;
    for m in 0..=n {
        let lhs = mps.poly(m + 2).derive(2);
        if lhs != mps.poly(m).scale(&Rat::from((m + 1) * (m + 2))) {
            return Err(Error::NotAFixedPoint(m));
        }
    }
    certify(&mps, &j)?;
    let solution = FamilySolution {
        family: Family::Hermite,
        order: 2,
        params: BTreeMap::new(),
        affine,
        free: vec!["A".to_string(), "B".to_string()],
        notes,
    };
    Ok((solution, mps, profile.lambdas))
}
