//! Monic polynomial sequences, their dual sequences, and the J-image map.
//!
//! Every sequence is generated by a structure relation
//!
//! ```text
//! P_0 = 1,  P_1 = x - β_0,
//! P_{n+2} = (x - β_{n+1}) P_{n+1} - Σ_{ν=0}^{n} χ_{n,ν} P_ν
//! ```
//!
//! and the dual sequence `⟨u_n, P_m⟩ = δ_{n,m}` is read off the change of
//! basis `x^m = Σ_j c_{m,j} P_j`, so that `(u_n)_m = c_{m,n}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::MomentFunctional;
use crate::operator::{LoweringProfile, OperatorJ};
use crate::polyalg::{QPoly, Rat};

/// Recurrence data. Indexing follows the relation above:
///
/// * `Orthogonal`: `gammas[n] = γ_{n+1}`, so `χ_{n,n} = γ_{n+1}`.
/// * `TwoOrtho`: `alphas[n] = α_{n+1}`, `gammas[n] = γ_{n+1}`, with
///   `P_{n+3} = (x - β_{n+2})P_{n+2} - α_{n+2}P_{n+1} - γ_{n+1}P_n`,
///   so `χ_{n,n} = α_{n+1}` and `χ_{n,n-1} = γ_n`.
/// * `General`: `chis[n][ν] = χ_{n,ν}` for `ν ≤ n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum StructureCoeffs {
    #[serde(rename = "orthogonal")]
    Orthogonal { betas: Vec<Rat>, gammas: Vec<Rat> },
    #[serde(rename = "two-ortho")]
    TwoOrtho {
        betas: Vec<Rat>,
        alphas: Vec<Rat>,
        gammas: Vec<Rat>,
    },
    #[serde(rename = "general")]
    General { betas: Vec<Rat>, chis: Vec<Vec<Rat>> },
}

impl StructureCoeffs {
    pub fn betas(&self) -> &[Rat] {
        match self {
            StructureCoeffs::Orthogonal { betas, .. }
            | StructureCoeffs::TwoOrtho { betas, .. }
            | StructureCoeffs::General { betas, .. } => betas,
        }
    }

    /// Largest degree the data can generate.
    pub fn max_degree(&self) -> usize {
        match self {
            StructureCoeffs::Orthogonal { betas, gammas } => betas.len().min(gammas.len() + 1),
            StructureCoeffs::TwoOrtho { betas, alphas, gammas } => {
                betas.len().min(alphas.len() + 1).min(gammas.len() + 2)
            }
            StructureCoeffs::General { betas, chis } => {
                let rows = chis
                    .iter()
                    .enumerate()
                    .position(|(n, row)| row.len() < n + 1)
                    .unwrap_or(chis.len());
                betas.len().min(rows + 1)
            }
        }
    }

    /// `χ_{n,ν}`, zero outside the stored table.
    pub fn chi(&self, n: usize, nu: usize) -> Rat {
        let get = |v: &Vec<Rat>, i: usize| v.get(i).cloned().unwrap_or_else(Rat::zero);
        match self {
            StructureCoeffs::Orthogonal { gammas, .. } if nu == n => get(gammas, n),
            StructureCoeffs::TwoOrtho { alphas, .. } if nu == n => get(alphas, n),
            StructureCoeffs::TwoOrtho { gammas, .. } if nu + 1 == n => get(gammas, n - 1),
            StructureCoeffs::General { chis, .. } => {
                chis.get(n).and_then(|row| row.get(nu)).cloned().unwrap_or_else(Rat::zero)
            }
            _ => Rat::zero(),
        }
    }

    /// Rejects zero `γ` in the orthogonal and two-orthogonal variants.
    pub fn validate(&self) -> Result<()> {
        let gammas = match self {
            StructureCoeffs::Orthogonal { gammas, .. } | StructureCoeffs::TwoOrtho { gammas, .. } => gammas,
            StructureCoeffs::General { .. } => return Ok(()),
        };
        match gammas.iter().position(Rat::is_zero) {
            Some(i) => Err(Error::InvalidStructure(format!("gamma_{} = 0", i + 1))),
            None => Ok(()),
        }
    }

    /// The general table through degree `n_max`.
    pub fn to_general(&self, n_max: usize) -> Result<StructureCoeffs> {
        if n_max > self.max_degree() {
            return Err(Error::NeedMoreCoeffs(n_max));
        }
        let betas = self.betas()[..n_max].to_vec();
        let chis = (0..n_max.saturating_sub(1))
            .map(|n| (0..=n).map(|nu| self.chi(n, nu)).collect())
            .collect();
        Ok(StructureCoeffs::General { betas, chis })
    }
}

/// A monic polynomial sequence `P_0 … P_N` with the data that generated it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mps {
    pub structure: StructureCoeffs,
    pub polys: Vec<QPoly>,
}

impl Mps {
    pub fn horizon(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn poly(&self, n: usize) -> &QPoly {
        &self.polys[n]
    }
}

/// `P_0 … P_N` from structure coefficients.
pub fn generate(s: &StructureCoeffs, n_max: usize) -> Result<Mps> {
    s.validate()?;
    if n_max > s.max_degree() {
        return Err(Error::NeedMoreCoeffs(n_max));
    }
    let betas = s.betas();
    let mut polys = vec![QPoly::one()];
    if n_max >= 1 {
        polys.push(QPoly::new(vec![-betas[0].clone(), Rat::one()]));
    }
    for m in 2..=n_max {
        let n = m - 2;
        let mut p = &QPoly::new(vec![-betas[n + 1].clone(), Rat::one()]) * &polys[n + 1];
        for nu in 0..=n {
            let c = s.chi(n, nu);
            if !c.is_zero() {
                p = &p - &polys[nu].scale(&c);
            }
        }
        polys.push(p);
    }
    Ok(Mps {
        structure: s.clone(),
        polys,
    })
}

fn check_monic(polys: &[QPoly]) -> Result<()> {
    match polys
        .iter()
        .enumerate()
        .position(|(n, p)| p.degree() != Some(n) || !p.is_monic())
    {
        Some(n) => Err(Error::NotMonic(n)),
        None => Ok(()),
    }
}

/// Coordinates of `f` in the monic basis `polys`, by peeling leading terms.
pub fn expand_in_basis(polys: &[QPoly], f: &QPoly) -> Result<Vec<Rat>> {
    let mut out = vec![Rat::zero(); f.degree().map_or(0, |d| d + 1)];
    let mut rest = f.clone();
    while let Some(d) = rest.degree() {
        let basis = polys.get(d).ok_or(Error::HorizonExceeded {
            degree: d,
            horizon: polys.len().saturating_sub(1),
        })?;
        let c = rest.leading();
        rest = &rest - &basis.scale(&c);
        out[d] = c;
    }
    Ok(out)
}

/// Recovers `β_n` and `χ_{n,ν}` by expanding `xP_{n+1} - P_{n+2}` in the
/// basis `{P_j}`.
pub fn structure_from_polys(polys: &[QPoly]) -> Result<StructureCoeffs> {
    check_monic(polys)?;
    let n_max = polys.len().saturating_sub(1);
    let mut betas = Vec::with_capacity(n_max);
    if n_max >= 1 {
        betas.push(-polys[1].coeff(0));
    }
    let mut chis = Vec::with_capacity(n_max.saturating_sub(1));
    for n in 0..n_max.saturating_sub(1) {
        let r = &(&QPoly::x() * &polys[n + 1]) - &polys[n + 2];
        let mut c = expand_in_basis(polys, &r)?;
        c.resize(n + 2, Rat::zero());
        betas.push(c.pop().expect("n + 2 entries"));
        chis.push(c);
    }
    Ok(StructureCoeffs::General { betas, chis })
}

/// `c_{m,j}` with `x^m = Σ_j c_{m,j} P_j`, for `m ≤ N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTable {
    pub coeffs: Vec<Vec<Rat>>,
}

impl DualTable {
    pub fn new(m: &Mps) -> Result<Self> {
        check_monic(&m.polys)?;
        let coeffs = (0..=m.horizon())
            .map(|k| {
                let mut row = expand_in_basis(&m.polys, &QPoly::x_pow(k))?;
                row.resize(k + 1, Rat::zero());
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok(DualTable { coeffs })
    }

    pub fn horizon(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `u_n` as a moment sequence with horizon `N`.
    pub fn dual(&self, n: usize) -> MomentFunctional {
        let moments = self
            .coeffs
            .iter()
            .map(|row| row.get(n).cloned().unwrap_or_else(Rat::zero))
            .collect();
        MomentFunctional::new(moments).expect("table has at least one row")
    }

    pub fn duals(&self) -> Vec<MomentFunctional> {
        (0..=self.horizon()).map(|n| self.dual(n)).collect()
    }
}

pub fn dual_table(m: &Mps) -> Result<DualTable> {
    DualTable::new(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orthogonality {
    /// `χ_{n,ν} = 0` for `ν < n` and `χ_{n,n} ≠ 0`.
    Orthogonal,
    /// `χ_{n,ν} = 0` for `ν < n - 1` and `χ_{n,n-1} ≠ 0` for `n ≥ 1`.
    TwoOrthogonalCandidate,
    Neither,
}

/// Verdict on the structure table, valid for rows `n < checked_rows`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalityVerdict {
    pub class: Orthogonality,
    pub checked_rows: usize,
}

pub fn orthogonality_check(s: &StructureCoeffs) -> OrthogonalityVerdict {
    let rows = s.max_degree().saturating_sub(1);
    let orthogonal =
        (0..rows).all(|n| (0..n).all(|nu| s.chi(n, nu).is_zero()) && !s.chi(n, n).is_zero());
    let two = (0..rows).all(|n| {
        (0..n.saturating_sub(1)).all(|nu| s.chi(n, nu).is_zero()) && (n == 0 || !s.chi(n, n - 1).is_zero())
    });
    let class = if orthogonal {
        Orthogonality::Orthogonal
    } else if two {
        Orthogonality::TwoOrthogonalCandidate
    } else {
        Orthogonality::Neither
    };
    OrthogonalityVerdict {
        class,
        checked_rows: rows,
    }
}

/// `P̃_n(x) = A^{-n} P_n(Ax + B)` with the structure transported alongside:
/// `β̃_n = (β_n - B)/A` and `χ̃_{n,ν} = A^{ν-n-2} χ_{n,ν}`.
pub fn affine_image(m: &Mps, a: &Rat, b: &Rat) -> Result<Mps> {
    if a.is_zero() {
        return Err(Error::DegenerateAffine);
    }
    let polys = m
        .polys
        .iter()
        .enumerate()
        .map(|(n, p)| Ok(p.affine_sub(a, b)?.scale(&a.pow(-(n as i32)))))
        .collect::<Result<Vec<_>>>()?;
    let inv = a.recip();
    let beta = |v: &[Rat]| v.iter().map(|x| (x - b) * &inv).collect::<Vec<_>>();
    let by = |v: &[Rat], e: i32| v.iter().map(|x| x * &a.pow(e)).collect::<Vec<_>>();
    let structure = match &m.structure {
        StructureCoeffs::Orthogonal { betas, gammas } => StructureCoeffs::Orthogonal {
            betas: beta(betas),
            gammas: by(gammas, -2),
        },
        StructureCoeffs::TwoOrtho { betas, alphas, gammas } => StructureCoeffs::TwoOrtho {
            betas: beta(betas),
            alphas: by(alphas, -2),
            gammas: by(gammas, -3),
        },
        StructureCoeffs::General { betas, chis } => StructureCoeffs::General {
            betas: beta(betas),
            chis: chis
                .iter()
                .enumerate()
                .map(|(n, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(nu, c)| c * &a.pow(nu as i32 - n as i32 - 2))
                        .collect()
                })
                .collect(),
        },
    };
    Ok(Mps { structure, polys })
}

/// `P̃_n = J(P_{n+k}) / λ_{n+k}` for `n ≤ min(N_m, N_J) - k`.
pub fn j_image(m: &Mps, j: &OperatorJ) -> Result<Mps> {
    let profile = j.lowering_order()?;
    let polys = j_image_polys(m, j, &profile)?;
    Ok(Mps {
        structure: structure_from_polys(&polys)?,
        polys,
    })
}

fn j_image_polys(m: &Mps, j: &OperatorJ, profile: &LoweringProfile) -> Result<Vec<QPoly>> {
    let k = profile.order;
    let h = m.horizon().min(j.horizon());
    if h < k {
        return Err(Error::EmptyResult);
    }
    (0..=h - k)
        .map(|n| {
            let lambda = profile.lambda(n + k).expect("within horizon");
            Ok(j.apply(&m.polys[n + k])?.scale(&lambda.recip()))
        })
        .collect()
}

/// Both sides of the fixed-point equivalence
///
/// ```text
/// J(P_{n+k}) = λ_{n+k} P_n  (n ≤ H - k)   ⇔   J(u_n) = λ_{n+k} u_{n+k}  (n ≤ H - k)
/// ```
///
/// with `H = min(N_m, N_J)` and the dual identities checked on moments `0..=H`.
/// On this horizon the two statements are exactly equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointVerdict {
    pub order: usize,
    pub horizon: usize,
    pub polynomial: bool,
    pub dual: bool,
    /// First `n` with `P̃_n ≠ P_n`.
    pub first_failure: Option<usize>,
}

impl FixedPointVerdict {
    pub fn holds(&self) -> bool {
        self.polynomial && self.dual
    }
}

pub fn fixed_point_check(m: &Mps, j: &OperatorJ) -> Result<FixedPointVerdict> {
    let profile = j.lowering_order()?;
    let k = profile.order;
    let h = m.horizon().min(j.horizon());
    let images = j_image_polys(m, j, &profile)?;
    let first_failure = images.iter().enumerate().position(|(n, p)| p != &m.polys[n]);
    let polynomial = first_failure.is_none();

    let table = DualTable::new(m)?;
    let mut dual = true;
    for n in 0..=h - k {
        let lhs = table.dual(n).truncate(h)?.transpose_apply(j)?;
        let lambda = profile.lambda(n + k).expect("within horizon");
        let rhs = table.dual(n + k).truncate(h)?.scale(&lambda);
        if lhs.truncate(h)? != rhs {
            dual = false;
            break;
        }
    }
    if polynomial != dual {
        return Err(Error::SidesDisagree { polynomial, dual });
    }
    Ok(FixedPointVerdict {
        order: k,
        horizon: h,
        polynomial,
        dual,
        first_failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::frac(n, d)
    }

    fn hermite(n: usize) -> StructureCoeffs {
        StructureCoeffs::Orthogonal {
            betas: vec![Rat::zero(); n],
            gammas: (1..n).map(|i| r(i as i64, 2)).collect(),
        }
    }

    fn laguerre(alpha: i64, n: usize) -> StructureCoeffs {
        StructureCoeffs::Orthogonal {
            betas: (0..n as i64).map(|i| r(2 * i + alpha + 1, 1)).collect(),
            gammas: (0..n as i64 - 1).map(|i| r((i + 1) * (i + alpha + 1), 1)).collect(),
        }
    }

    fn monomials(n: usize) -> Vec<QPoly> {
        (0..=n).map(QPoly::x_pow).collect()
    }

    #[test]
    fn generate_examples() {
        let h = generate(&hermite(3), 3).unwrap();
        assert_eq!(h.polys[2], QPoly::new(vec![r(-1, 2), r(0, 1), r(1, 1)]));
        assert_eq!(h.polys[3], QPoly::new(vec![r(0, 1), r(-3, 2), r(0, 1), r(1, 1)]));

        let l = generate(&laguerre(2, 4), 4).unwrap();
        assert_eq!(l.polys[2], QPoly::from_ints(&[12, -8, 1]));

        let s = StructureCoeffs::Orthogonal {
            betas: vec![r(7, 3)],
            gammas: vec![],
        };
        assert_eq!(generate(&s, 1).unwrap().polys[1], QPoly::new(vec![r(-7, 3), r(1, 1)]));
        assert_eq!(generate(&s, 2), Err(Error::NeedMoreCoeffs(2)));
    }

    #[test]
    fn zero_gamma_rejected() {
        let s = StructureCoeffs::TwoOrtho {
            betas: vec![Rat::zero(); 4],
            alphas: vec![Rat::one(); 3],
            gammas: vec![Rat::one(), Rat::zero()],
        };
        assert!(matches!(generate(&s, 4), Err(Error::InvalidStructure(_))));
    }

    #[test]
    fn structure_examples() {
        let s = structure_from_polys(&monomials(4)).unwrap();
        assert!(s.betas().iter().all(Rat::is_zero));
        for n in 0..3 {
            for nu in 0..=n {
                assert!(s.chi(n, nu).is_zero());
            }
        }

        let l = generate(&laguerre(2, 5), 4).unwrap();
        let s = structure_from_polys(&l.polys).unwrap();
        assert_eq!(s.betas(), &[r(3, 1), r(5, 1), r(7, 1), r(9, 1)]);
        for n in 0..3usize {
            assert_eq!(s.chi(n, n), Rat::from((n + 1) * (n + 3)));
            for nu in 0..n {
                assert!(s.chi(n, nu).is_zero());
            }
        }

        let t = StructureCoeffs::TwoOrtho {
            betas: vec![r(1, 1), r(-2, 1), r(1, 3), r(0, 1), r(5, 1)],
            alphas: vec![r(2, 1), r(1, 2), r(-1, 1), r(3, 1)],
            gammas: vec![r(1, 1), r(4, 1), r(-2, 3)],
        };
        let g = structure_from_polys(&generate(&t, 5).unwrap().polys).unwrap();
        assert_eq!(g, t.to_general(5).unwrap());

        let bad = vec![QPoly::one(), QPoly::from_ints(&[0, 2])];
        assert_eq!(structure_from_polys(&bad), Err(Error::NotMonic(1)));
    }

    #[test]
    fn dual_table_examples() {
        let mono = Mps {
            structure: structure_from_polys(&monomials(3)).unwrap(),
            polys: monomials(3),
        };
        let t = DualTable::new(&mono).unwrap();
        for (m, row) in t.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                assert_eq!(c.is_one(), m == j);
                assert_eq!(c.is_zero(), m != j);
            }
        }

        let l = generate(&laguerre(2, 3), 2).unwrap();
        let t = DualTable::new(&l).unwrap();
        assert_eq!(t.coeffs[1], vec![r(3, 1), r(1, 1)]);
        assert_eq!(t.coeffs[2], vec![r(12, 1), r(8, 1), r(1, 1)]);
    }

    #[test]
    fn orthogonality_examples() {
        let l = generate(&laguerre(2, 6), 6).unwrap();
        let v = orthogonality_check(&structure_from_polys(&l.polys).unwrap());
        assert_eq!(v.class, Orthogonality::Orthogonal);
        assert_eq!(v.checked_rows, 5);

        let m = orthogonality_check(&structure_from_polys(&monomials(5)).unwrap());
        assert_eq!(m.class, Orthogonality::Neither);

        let t = StructureCoeffs::TwoOrtho {
            betas: vec![r(1, 1); 6],
            alphas: vec![r(2, 1); 5],
            gammas: vec![r(3, 1); 4],
        };
        let g = structure_from_polys(&generate(&t, 6).unwrap().polys).unwrap();
        assert_eq!(orthogonality_check(&g).class, Orthogonality::TwoOrthogonalCandidate);
    }

    #[test]
    fn affine_examples() {
        let l = generate(&laguerre(2, 6), 5).unwrap();
        assert_eq!(affine_image(&l, &Rat::one(), &Rat::zero()).unwrap(), l);

        let shifted = affine_image(&l, &Rat::one(), &r(3, 1)).unwrap();
        assert!(shifted.structure.betas()[0].is_zero());

        let s = StructureCoeffs::Orthogonal {
            betas: vec![r(1, 1), r(2, 1)],
            gammas: vec![r(3, 1)],
        };
        let m = affine_image(&generate(&s, 2).unwrap(), &r(2, 1), &Rat::zero()).unwrap();
        assert_eq!(m.structure.chi(0, 0), r(3, 4));
        assert_eq!(
            structure_from_polys(&m.polys).unwrap(),
            m.structure.to_general(2).unwrap()
        );
        assert!(affine_image(&m, &Rat::zero(), &Rat::one()).is_err());
    }

    #[test]
    fn j_image_examples() {
        let mono = Mps {
            structure: structure_from_polys(&monomials(5)).unwrap(),
            polys: monomials(5),
        };
        let img = j_image(&mono, &OperatorJ::derivative(5)).unwrap();
        assert_eq!(img.polys, monomials(4));

        let l = generate(&laguerre(2, 6), 5).unwrap();
        let j = OperatorJ::from_differential(&[QPoly::zero(), QPoly::from_ints(&[3]), QPoly::from_ints(&[0, 1])], 5)
            .unwrap();
        let img = j_image(&l, &j).unwrap();
        assert_eq!(j.apply(&l.polys[2]).unwrap(), QPoly::from_ints(&[-24, 8]));
        assert_eq!(img.polys[1], QPoly::from_ints(&[-3, 1]));

        let h = generate(&hermite(8), 7).unwrap();
        let half_d2 = OperatorJ::from_coeffs_with_horizon(vec![QPoly::zero(), QPoly::zero(), QPoly::one()], 7).unwrap();
        let img = j_image(&h, &half_d2).unwrap();
        assert_eq!(img.polys, h.polys[..=5].to_vec());
    }

    #[test]
    fn fixed_point_examples() {
        let h = generate(&hermite(10), 9).unwrap();
        let half_d2 = OperatorJ::from_coeffs_with_horizon(vec![QPoly::zero(), QPoly::zero(), QPoly::one()], 9).unwrap();
        let v = fixed_point_check(&h, &half_d2).unwrap();
        assert!(v.holds());
        assert_eq!((v.order, v.horizon), (2, 9));

        let l = generate(&laguerre(2, 11), 10).unwrap();
        let j = OperatorJ::from_differential(&[QPoly::zero(), QPoly::from_ints(&[3]), QPoly::from_ints(&[0, 1])], 10)
            .unwrap();
        assert!(fixed_point_check(&l, &j).unwrap().holds());

        let v = fixed_point_check(&l, &OperatorJ::derivative(10)).unwrap();
        assert!(!v.polynomial && !v.dual);
        assert_eq!(v.first_failure, Some(1));
    }

    #[test]
    fn json_shape() {
        let s = StructureCoeffs::Orthogonal {
            betas: vec![r(1, 2)],
            gammas: vec![],
        };
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"kind":"orthogonal","betas":["1/2"],"gammas":[]}"#);
        assert_eq!(serde_json::from_str::<StructureCoeffs>(&js).unwrap(), s);
        let t: StructureCoeffs =
            serde_json::from_str(r#"{"kind":"two-ortho","betas":["0"],"alphas":[],"gammas":[]}"#).unwrap();
        assert!(matches!(t, StructureCoeffs::TwoOrtho { .. }));
    }

    fn nonzero_rat() -> impl Strategy<Value = Rat> {
        (1i64..=5, 1i64..=3, any::<bool>()).prop_map(|(n, d, neg)| Rat::frac(if neg { -n } else { n }, d))
    }

    fn rat() -> impl Strategy<Value = Rat> {
        (-5i64..=5, 1i64..=3).prop_map(|(n, d)| Rat::frac(n, d))
    }

    fn orthogonal(n: usize) -> impl Strategy<Value = StructureCoeffs> {
        (
            proptest::collection::vec(rat(), n),
            proptest::collection::vec(nonzero_rat(), n - 1),
        )
            .prop_map(|(betas, gammas)| StructureCoeffs::Orthogonal { betas, gammas })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn structure_round_trip(s in orthogonal(7)) {
            let m = generate(&s, 7).unwrap();
            prop_assert_eq!(structure_from_polys(&m.polys).unwrap(), s.to_general(7).unwrap());
        }

        #[test]
        fn biorthogonality(s in orthogonal(7)) {
            let m = generate(&s, 7).unwrap();
            let t = DualTable::new(&m).unwrap();
            for n in 0..=7 {
                let u = t.dual(n);
                for (k, p) in m.polys.iter().enumerate() {
                    let want = if n == k { Rat::one() } else { Rat::zero() };
                    prop_assert_eq!(u.pair(p).unwrap(), want);
                }
            }
        }

        #[test]
        fn dual_three_term(s in orthogonal(8)) {
            // x u_n = u_{n-1} + β_n u_n + γ_{n+1} u_{n+1}, on moments 0..N-1
            let m = generate(&s, 8).unwrap();
            let t = DualTable::new(&m).unwrap();
            let StructureCoeffs::Orthogonal { betas, gammas } = &s else { unreachable!() };
            for n in 0..7 {
                let lhs = t.dual(n).left_mul(&QPoly::x()).unwrap();
                let mut rhs = t.dual(n).scale(&betas[n]).add(&t.dual(n + 1).scale(&gammas[n]));
                if n > 0 {
                    rhs = rhs.add(&t.dual(n - 1));
                }
                prop_assert_eq!(lhs, rhs.truncate(7).unwrap());
            }
        }

        #[test]
        fn duals_from_first(s in orthogonal(8)) {
            // u_n = ⟨u_0, P_n²⟩^{-1} P_n u_0 and ⟨u_0, P_n²⟩ = γ_1⋯γ_n
            let m = generate(&s, 8).unwrap();
            let t = DualTable::new(&m).unwrap();
            let StructureCoeffs::Orthogonal { gammas, .. } = &s else { unreachable!() };
            let u0 = t.dual(0);
            let mut norm = Rat::one();
            for n in 0..=4 {
                if n > 0 {
                    norm *= &gammas[n - 1];
                }
                prop_assert_eq!(u0.pair(&(&m.polys[n] * &m.polys[n])).unwrap(), norm.clone());
                let un = u0.left_mul(&m.polys[n]).unwrap().scale(&norm.recip());
                prop_assert_eq!(un, t.dual(n).truncate(8 - n).unwrap());
            }
        }

        #[test]
        fn betas_and_chis_from_duals(s in orthogonal(7)) {
            let m = generate(&s, 7).unwrap();
            let t = DualTable::new(&m).unwrap();
            for n in 0..6 {
                prop_assert_eq!(t.dual(n).pair(&(&QPoly::x() * &m.polys[n])).unwrap(), s.betas()[n].clone());
                for nu in 0..=n {
                    prop_assert_eq!(t.dual(nu).pair(&(&QPoly::x() * &m.polys[n + 1])).unwrap(), s.chi(n, nu));
                }
            }
        }

        #[test]
        fn affine_inverse(s in orthogonal(6), a in nonzero_rat(), b in rat()) {
            let m = generate(&s, 6).unwrap();
            let img = affine_image(&m, &a, &b).unwrap();
            prop_assert_eq!(structure_from_polys(&img.polys).unwrap(), img.structure.to_general(6).unwrap());
            let back = affine_image(&img, &a.recip(), &-(&b / &a)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
