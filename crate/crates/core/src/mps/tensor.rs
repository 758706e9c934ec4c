use crate::error::{Error, Result};
use crate::linalg::{self, cr, kron, leading_eigs, unvec_rm, vec_rm, Leading};
use crate::{CMat, C64};

/// Translation-invariant MPS tensor `A[i][a][b]`, stored as `d` matrices of
/// size `D × D`.
#[derive(Clone, Debug)]
pub struct MpsTensor {
    mats: Vec<CMat>,
}

/// Fixed points of the plain transfer operator.
#[derive(Clone, Debug)]
pub struct FixedPoints {
    pub lambda: C64,
    /// `Σ A† ρ_L A = λ ρ_L`, Hermitian, trace `D`.
    pub rho_l: CMat,
    /// `Σ A ρ_R A† = λ ρ_R`, Hermitian, trace 1.
    pub rho_r: CMat,
    pub gap: f64,
    pub degenerate: bool,
}

pub const INJECTIVITY_TOL: f64 = 1e-8;
pub const CANONICAL_TOL: f64 = 1e-10;

impl MpsTensor {
    pub fn new(mats: Vec<CMat>) -> Result<Self> {
        let d = mats.len();
        if d == 0 {
            return Err(Error::Shape("tensor needs at least one physical index".into()));
        }
        let bond = mats[0].nrows();
        if bond == 0 || mats.iter().any(|m| m.nrows() != bond || m.ncols() != bond) {
            return Err(Error::Shape("every A^i must be the same nonempty square matrix size".into()));
        }
        Ok(Self { mats })
    }

    /// From nested `[d][D][D]` entries.
    pub fn from_entries(entries: &[Vec<Vec<C64>>]) -> Result<Self> {
        Self::new(entries.iter().map(|m| linalg::from_rows(m)).collect())
    }

    pub fn physical_dim(&self) -> usize {
        self.mats.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    pub fn entry(&self, i: usize, a: usize, b: usize) -> C64 {
        self.mats[i][(a, b)]
    }

    /// `B^i = Σ_j K_ij A^j`.
    pub fn apply_physical(&self, k: &CMat) -> Result<MpsTensor> {
        let d = self.physical_dim();
        if k.nrows() != d || k.ncols() != d {
            return Err(Error::Shape(format!("site operator must be {d}x{d}, got {}x{}", k.nrows(), k.ncols())));
        }
        let mats = (0..d)
            .map(|i| {
                let mut acc = CMat::zeros(self.bond_dim(), self.bond_dim());
                for j in 0..d {
                    if k[(i, j)] != C64::ZERO {
                        acc += linalg::scale(k[(i, j)], &self.mats[j]);
                    }
                }
                acc
            })
            .collect();
        Ok(MpsTensor { mats })
    }

    /// `A^i ↦ X A^i X⁻¹`.
    pub fn gauge(&self, x: &CMat) -> Result<MpsTensor> {
        let xi = linalg::inverse(x)?;
        Ok(MpsTensor { mats: self.mats.iter().map(|a| x * a * &xi).collect() })
    }

    pub fn scaled(&self, s: C64) -> MpsTensor {
        MpsTensor { mats: self.mats.iter().map(|a| linalg::scale(s, a)).collect() }
    }

    /// `Σ_i A^{i†} A^i`.
    pub fn left_identity_defect(&self) -> f64 {
        let d = self.bond_dim();
        let mut acc = CMat::zeros(d, d);
        for a in &self.mats {
            acc += a.adjoint() * a;
        }
        linalg::max_diff(&acc, &linalg::eye(d))
    }

    pub fn fixed_points(&self) -> Result<FixedPoints> {
        let t = transfer_operator(self, &linalg::eye(self.physical_dim()))?;
        let lead = leading_eigs(&t)?;
        Ok(fixed_points_from(&lead, self.bond_dim()))
    }
}

fn hermitian_normalised(m: CMat, target_trace: f64) -> CMat {
    let tr = linalg::trace(&m);
    let phase = if tr.norm() > 0.0 { tr / tr.norm() } else { cr(1.0) };
    let m = linalg::scale(phase.conj(), &m);
    let h = linalg::scale(cr(0.5), &(&m + m.adjoint()));
    let t = linalg::trace(&h).re;
    if t.abs() > 0.0 {
        linalg::scale(cr(target_trace / t), &h)
    } else {
        h
    }
}

fn fixed_points_from(lead: &Leading, bond: usize) -> FixedPoints {
    let rho_l = hermitian_normalised(unvec_rm(&lead.left, bond, bond).conjugate().to_owned(), bond as f64);
    let rho_r = hermitian_normalised(unvec_rm(&lead.right, bond, bond), 1.0);
    FixedPoints { lambda: lead.value, rho_l, rho_r, gap: lead.gap(), degenerate: lead.degenerate }
}

/// `T_X[(a,c),(b,e)] = Σ_ij X_ij A^j[a,b] conj(A^i[c,e])`.
pub fn transfer_operator(a: &MpsTensor, x: &CMat) -> Result<CMat> {
    let d = a.physical_dim();
    if x.nrows() != d || x.ncols() != d {
        return Err(Error::Shape(format!("transfer operator needs a {d}x{d} site operator, got {}x{}", x.nrows(), x.ncols())));
    }
    let bond = a.bond_dim();
    let b = a.apply_physical(x)?;
    let mut t = CMat::zeros(bond * bond, bond * bond);
    for i in 0..d {
        if b.mats[i].norm_max() == 0.0 {
            continue;
        }
        t += kron(&b.mats[i], &a.mats[i].conjugate().to_owned());
    }
    Ok(t)
}

fn injective_from(fp: &FixedPoints) -> bool {
    if fp.degenerate || fp.lambda.norm() == 0.0 {
        return false;
    }
    [&fp.rho_l, &fp.rho_r].iter().all(|m| {
        let s = linalg::singular_values(m);
        let max = s.iter().cloned().fold(0.0, f64::max);
        max > 0.0 && s.iter().cloned().fold(f64::INFINITY, f64::min) > INJECTIVITY_TOL * max
    })
}

/// Nondegenerate leading modulus and full-rank fixed points.
pub fn is_injective(a: &MpsTensor) -> bool {
    a.fixed_points().map(|fp| injective_from(&fp)).unwrap_or(false)
}

/// Rescales to `λ = 1` and gauges the left fixed point to the identity.
pub fn canonicalize(a: &MpsTensor) -> Result<MpsTensor> {
    let fp = a.fixed_points()?;
    if !injective_from(&fp) {
        return Err(Error::NotInjective("canonicalize needs an injective tensor".into()));
    }
    // λ is real positive for a completely positive transfer map
    let scaled = a.scaled(cr(1.0 / fp.lambda.norm().sqrt()));
    let (vals, _) = linalg::eigh(&fp.rho_l)?;
    if vals[0] <= 0.0 {
        if vals[vals.len() - 1] >= 0.0 {
            return Err(Error::NotInjective(format!("left fixed point is indefinite (eigenvalues {:e}..{:e})", vals[0], vals[vals.len() - 1])));
        }
    }
    // a negative-definite ρ_L just means the eigenvector came out with sign −1
    let rho_l = if vals[0] < 0.0 { linalg::scale(cr(-1.0), &fp.rho_l) } else { fp.rho_l.clone() };
    let x = linalg::sqrt_psd(&rho_l)?;
    let out = scaled.gauge(&x)?;
    let defect = out.left_identity_defect();
    if defect > CANONICAL_TOL {
        // one polishing pass removes the residual drift from the first gauge
        let fp2 = out.fixed_points()?;
        let out2 = out.scaled(cr(1.0 / fp2.lambda.norm().sqrt())).gauge(&linalg::sqrt_psd(&fp2.rho_l)?)?;
        let defect2 = out2.left_identity_defect();
        if defect2 > CANONICAL_TOL {
            return Err(Error::Numerical(format!("canonical form defect {defect2:e} exceeds {CANONICAL_TOL:e}")));
        }
        return Ok(out2);
    }
    Ok(out)
}

/// Boundary data of a canonical tensor.
#[derive(Clone, Debug)]
pub struct Boundaries {
    /// `vec(1)`.
    pub l: Vec<C64>,
    /// `vec(ρ_R)` with `Tr ρ_R = 1`, so `lᵀ r = 1`.
    pub r: Vec<C64>,
    pub rho_r: CMat,
    /// Second-largest modulus in the spectrum of the plain transfer operator.
    pub second_modulus: f64,
}

/// Checks canonical form and returns the fixed points.
pub fn canonical_boundaries(a: &MpsTensor) -> Result<Boundaries> {
    let defect = a.left_identity_defect();
    if defect > CANONICAL_TOL {
        return Err(Error::InvalidParameter(format!("state is not canonical (left fixed point defect {defect:e})")));
    }
    let t = transfer_operator(a, &linalg::eye(a.physical_dim()))?;
    let lead = leading_eigs(&t)?;
    if lead.degenerate {
        return Err(Error::NotInjective("degenerate transfer spectrum".into()));
    }
    if (lead.value - cr(1.0)).norm() > CANONICAL_TOL {
        return Err(Error::InvalidParameter(format!("state is not canonical (leading eigenvalue {})", lead.value)));
    }
    let fp = fixed_points_from(&lead, a.bond_dim());
    Ok(Boundaries {
        l: vec_rm(&linalg::eye(a.bond_dim())),
        r: vec_rm(&fp.rho_r),
        rho_r: fp.rho_r,
        second_modulus: lead.second_modulus,
    })
}
