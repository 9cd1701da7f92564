//! Two-orthogonal sequences
//!
//! ```text
//! P_{n+3} = (x - β_{n+2}) P_{n+2} - α_{n+2} P_{n+1} - γ_{n+1} P_n
//! ```
//!
//! whose duals satisfy `xu_n = u_{n-1} + β_n u_n + α_{n+1} u_{n+1} + γ_{n+1} u_{n+2}`
//! and are all generated by the pair `U = (u_0, u_1)`. For an order-one
//! lowering `J` fixing such a sequence, `U` satisfies a matrix Pearson
//! relation `D(ΦU) + ΨU = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::MomentFunctional;
use crate::mps::{expand_in_basis, fixed_point_check, generate, DualTable, Mps, StructureCoeffs};
use crate::operator::{LoweringProfile, OperatorJ};
use crate::polyalg::{QPoly, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoOrthoData {
    pub structure: StructureCoeffs,
    pub mps: Mps,
    pub dual_rows: DualTable,
}

impl TwoOrthoData {
    /// Generates `P_0 … P_degree` and their duals. Rejects non-two-orthogonal
    /// structures and zero `γ`.
    pub fn new(structure: StructureCoeffs, degree: usize) -> Result<Self> {
        if !matches!(structure, StructureCoeffs::TwoOrtho { .. }) {
            return Err(Error::InvalidStructure("expected two-orthogonal coefficients".into()));
        }
        let mps = generate(&structure, degree)?;
        let dual_rows = DualTable::new(&mps)?;
        Ok(TwoOrthoData {
            structure,
            mps,
            dual_rows,
        })
    }

    pub fn beta(&self, n: usize) -> Rat {
        self.structure.betas()[n].clone()
    }

    /// `α_n`, `n ≥ 1`.
    pub fn alpha(&self, n: usize) -> Rat {
        match &self.structure {
            StructureCoeffs::TwoOrtho { alphas, .. } => alphas[n - 1].clone(),
            _ => unreachable!("checked at construction"),
        }
    }

    /// `γ_n`, `n ≥ 1`.
    pub fn gamma(&self, n: usize) -> Rat {
        match &self.structure {
            StructureCoeffs::TwoOrtho { gammas, .. } => gammas[n - 1].clone(),
            _ => unreachable!("checked at construction"),
        }
    }

    /// Largest `n` for which `β_n`, `α_{n+1}`, `γ_{n+1}` are all known.
    fn last_full_index(&self) -> Option<usize> {
        match &self.structure {
            StructureCoeffs::TwoOrtho { betas, alphas, gammas } => {
                betas.len().min(alphas.len()).min(gammas.len()).checked_sub(1)
            }
            _ => None,
        }
    }

    fn has_coeffs(&self, betas: usize, alphas: usize, gammas: usize) -> bool {
        match &self.structure {
            StructureCoeffs::TwoOrtho {
                betas: b,
                alphas: a,
                gammas: g,
            } => b.len() >= betas && a.len() >= alphas && g.len() >= gammas,
            _ => false,
        }
    }
}

/// `u_2 = E_1 u_0 + A_0 u_1`, `u_3 = B_1 u_0 + F_1 u_1`, `u_4 = E_2 u_0 + A_1 u_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualExpressions {
    pub e1: QPoly,
    pub a0: QPoly,
    pub b1: QPoly,
    pub f1: QPoly,
    pub e2: QPoly,
    pub a1: QPoly,
}

impl DualExpressions {
    /// `(coefficient of u_0, coefficient of u_1)` for `u_n`, `n = 2, 3, 4`.
    pub fn row(&self, n: usize) -> Option<(&QPoly, &QPoly)> {
        match n {
            2 => Some((&self.e1, &self.a0)),
            3 => Some((&self.b1, &self.f1)),
            4 => Some((&self.e2, &self.a1)),
            _ => None,
        }
    }
}

/// Needs `β_0 … β_2`, `α_1 … α_3`, `γ_1 … γ_3`.
pub fn to_dual_expressions(t: &TwoOrthoData) -> Result<DualExpressions> {
    if !t.has_coeffs(3, 3, 3) {
        return Err(Error::NeedMoreCoeffs(5));
    }
    let (beta0, beta1, beta2) = (t.beta(0), t.beta(1), t.beta(2));
    let (al1, al2, al3) = (t.alpha(1), t.alpha(2), t.alpha(3));
    let (g1, g2, g3) = (t.gamma(1), t.gamma(2), t.gamma(3));
    let shifted = |b: &Rat| QPoly::new(vec![-b, Rat::one()]);

    let e1 = shifted(&beta0).scale(&g1.recip());
    let a0 = QPoly::constant(-(&al1 / &g1));
    let b1 = &shifted(&beta0).scale(&-(&al2 / (&g1 * &g2))) - &QPoly::constant(g2.recip());
    let f1 = (&shifted(&beta1) + &QPoly::constant(&al2 * &al1 / &g1)).scale(&g2.recip());
    let e2 = (&(&shifted(&beta2) * &e1) - &b1.scale(&al3)).scale(&g3.recip());
    let a1 = (&(&f1.scale(&al3) + &QPoly::one()) + &shifted(&beta2).scale(&(&al1 / &g1))).scale(&-g3.recip());
    Ok(DualExpressions { e1, a0, b1, f1, e2, a1 })
}

/// `Σ p_i u_i` on the common horizon.
fn combine(terms: &[(&QPoly, &MomentFunctional)]) -> Result<MomentFunctional> {
    let mut acc: Option<MomentFunctional> = None;
    for (p, u) in terms {
        let term = u.left_mul(p)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.ok_or(Error::EmptyResult)
}

/// `xu_n = u_{n-1} + β_n u_n + α_{n+1} u_{n+1} + γ_{n+1} u_{n+2}` for every
/// `n` with `n + 2` within the dual table and its coefficients known.
pub fn dual_recurrence_check(t: &TwoOrthoData) -> bool {
    let h = t.dual_rows.horizon();
    let duals = t.dual_rows.duals();
    let x = QPoly::x();
    let Some(last) = t.last_full_index() else {
        return true;
    };
    (0..=h.saturating_sub(2).min(last)).all(|n| {
        let lhs = match duals[n].left_mul(&x) {
            Ok(l) => l,
            Err(_) => return true,
        };
        let mut rhs = duals[n]
            .scale(&t.beta(n))
            .add(&duals[n + 1].scale(&t.alpha(n + 1)))
            .add(&duals[n + 2].scale(&t.gamma(n + 1)));
        if n > 0 {
            rhs = rhs.add(&duals[n - 1]);
        }
        lhs.add(&rhs.scale(&-Rat::one())).is_zero()
    })
}

/// `u_2`, `u_3`, `u_4` against their expressions in `(u_0, u_1)`, on every
/// computable moment.
pub fn dual_pair_expressions_check(t: &TwoOrthoData) -> Result<bool> {
    let ex = to_dual_expressions(t)?;
    let duals = t.dual_rows.duals();
    if duals.len() < 5 {
        return Err(Error::NeedMoreCoeffs(4));
    }
    for n in 2..=4 {
        let (p0, p1) = ex.row(n).expect("rows 2..=4");
        let Ok(rhs) = combine(&[(p0, &duals[0]), (p1, &duals[1])]) else {
            continue;
        };
        if !rhs.sub(&duals[n]).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `D(ΦU) + ΨU = 0` with `U = (u_0, u_1)ᵀ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixPearson {
    pub phi: [[QPoly; 2]; 2],
    pub psi: [[QPoly; 2]; 2],
}

impl MatrixPearson {
    /// `deg φ_{1,1} ≤ 1`, `deg φ_{1,2} ≤ 1`, `deg φ_{2,1} ≤ 2`, `deg φ_{2,2} ≤ 1`.
    pub fn degree_bounds_hold(&self) -> bool {
        let [[p11, p12], [p21, p22]] = &self.phi;
        p11.degree_at_most(1) && p12.degree_at_most(1) && p21.degree_at_most(2) && p22.degree_at_most(1)
    }
}

/// Checks the order-one profile and returns `J` widened to `horizon` with `λ_1 … λ_horizon`.
fn order_one(j: &OperatorJ, horizon: usize) -> Result<(OperatorJ, LoweringProfile)> {
    if j.is_relaxed() {
        return Err(Error::RelaxedOperator);
    }
    if let Some(nu) = j.last_nonzero().filter(|&nu| nu > 2) {
        return Err(Error::NotThreeTerm(nu));
    }
    let j = j.extend_finite(horizon)?;
    let profile = j.lowering_order()?;
    if profile.order != 1 {
        return Err(Error::ProfileMismatch {
            expected: 1,
            found: profile.order,
        });
    }
    Ok((j, profile))
}

pub fn build_matrix_pearson(t: &TwoOrthoData, j: &OperatorJ) -> Result<MatrixPearson> {
    let (_, profile) = order_one(j, 4)?;
    let lambda = |m: usize| profile.lambda(m).expect("horizon widened to 4");
    let ex = to_dual_expressions(t)?;
    let (b0, b1) = (t.beta(0), t.beta(1));
    let (a1, a2) = (t.alpha(1), t.alpha(2));
    let (g1, g2) = (t.gamma(1), t.gamma(2));
    let shifted = |b: &Rat| QPoly::new(vec![-b, Rat::one()]);

    let c_e = &a1 * lambda(2) / (Rat::from_int(2) * lambda(1));
    let c_b = &g1 * lambda(3) / (Rat::from_int(2) * lambda(1));
    let d_b = &a2 * lambda(3) / lambda(2);
    let d_e = &g2 * lambda(4) / lambda(2);

    let p11 = &(&QPoly::constant(Rat::frac(1, 2)) - &ex.e1.scale(&c_e)) - &ex.b1.scale(&c_b);
    let p12 = &(&shifted(&b0).scale(&Rat::frac(1, 2)) - &ex.a0.scale(&c_e)) - &ex.f1.scale(&c_b);
    let p21 = &(&(&shifted(&b1) * &ex.e1) - &ex.b1.scale(&d_b)) - &ex.e2.scale(&d_e);
    let p22 = &(&(&shifted(&b1) * &ex.a0) - &ex.f1.scale(&d_b)) - &ex.a1.scale(&d_e);

    let psi = [
        [QPoly::zero(), QPoly::one()],
        [
            ex.e1.scale(&Rat::from_int(2)),
            QPoly::constant(Rat::from_int(-2) * &a1 / &g1),
        ],
    ];
    let mp = MatrixPearson {
        phi: [[p11, p12], [p21, p22]],
        psi,
    };
    if !mp.degree_bounds_hold() {
        return Err(Error::InvalidStructure("matrix Pearson degree bounds violated".into()));
    }
    Ok(mp)
}

/// Checks `J(P_{n+1}) = λ_{n+1} P_n` first, then both rows of
/// `D(ΦU) + ΨU = 0` on every computable moment.
pub fn verify_matrix_pearson(t: &TwoOrthoData, mp: &MatrixPearson, j: &OperatorJ) -> Result<bool> {
    let (j, _) = order_one(j, t.mps.horizon())?;
    let verdict = fixed_point_check(&t.mps, &j)?;
    if let Some(n) = verdict.first_failure {
        return Err(Error::NotAFixedPoint(n));
    }
    let u = [t.dual_rows.dual(0), t.dual_rows.dual(1)];
    for row in 0..2 {
        let [f0, f1] = &mp.phi[row];
        let [s0, s1] = &mp.psi[row];
        let (Ok(flux), Ok(source)) = (
            combine(&[(f0, &u[0]), (f1, &u[1])]),
            combine(&[(s0, &u[0]), (s1, &u[1])]),
        ) else {
            continue;
        };
        if !flux.derive().add(&source).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Seeds for [`find_appell_2ortho`]: the free values `β_0`, `α_1`, `γ_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seeds {
    pub beta0: Rat,
    pub alpha1: Rat,
    pub gamma1: Rat,
}

impl Default for Seeds {
    fn default() -> Self {
        Seeds {
            beta0: Rat::zero(),
            alpha1: Rat::one(),
            gamma1: Rat::one(),
        }
    }
}

/// Two-orthogonal sequence with `J(P_{n+1}) = λ_{n+1} P_n` for `n ≤ n_max`.
///
/// At degree `m`, `J(xP_m) - λ_{m+1}P_m` must equal
/// `β_m λ_m P_{m-1} + α_m λ_{m-1} P_{m-2} + γ_{m-1} λ_{m-2} P_{m-3}`,
/// which fixes the three new coefficients and leaves the lower components
/// as consistency conditions.
pub fn find_appell_2ortho(j: &OperatorJ, n_max: usize, seeds: &Seeds) -> Result<TwoOrthoData> {
    if seeds.gamma1.is_zero() {
        return Err(Error::InvalidStructure("gamma_1 = 0".into()));
    }
    let (j, profile) = order_one(j, n_max + 1)?;
    let lambda = |m: usize| profile.lambda(m).expect("horizon widened");
    let mut betas = vec![seeds.beta0.clone()];
    let mut alphas = vec![seeds.alpha1.clone()];
    let mut gammas = vec![seeds.gamma1.clone()];
    let mut polys = vec![QPoly::one(), QPoly::new(vec![-seeds.beta0.clone(), Rat::one()])];
    for m in 1..=n_max {
        let residual = &j.apply(&(&QPoly::x() * &polys[m]))? - &polys[m].scale(&lambda(m + 1));
        let mut c = expand_in_basis(&polys[..m], &residual)?;
        c.resize(m, Rat::zero());
        let solved = |i: usize| &c[m - i] / &lambda(m + 1 - i);
        betas.push(solved(1));
        if m >= 2 {
            alphas.push(solved(2));
        }
        if m >= 3 {
            let g = solved(3);
            if g.is_zero() {
                return Err(Error::NoFixedPointSequence(m));
            }
            gammas.push(g);
        }
        if c.iter().take(m.saturating_sub(3)).any(|x| !x.is_zero()) {
            return Err(Error::NoFixedPointSequence(m));
        }
        let mut next = &QPoly::new(vec![-betas[m].clone(), Rat::one()]) * &polys[m];
        next = &next - &polys[m - 1].scale(&alphas[m - 1]);
        if m >= 2 {
            next = &next - &polys[m - 2].scale(&gammas[m - 2]);
        }
        polys.push(next);
    }
    let data = TwoOrthoData::new(StructureCoeffs::TwoOrtho { betas, alphas, gammas }, n_max + 1)?;
    debug_assert_eq!(data.mps.polys, polys);
    Ok(data)
}
