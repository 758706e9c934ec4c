use super::kraus::Superop;
use crate::error::{Error, Result};
use crate::linalg::{self, c, cr};
use crate::mps::OnsiteRep;
use crate::CMat;

const HERMITIAN_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;

/// `L(ρ) = −i[H, ρ] + Σ_i (J_i ρ J_i† − ½{J_i† J_i, ρ})`.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    dim: usize,
    h: CMat,
    jumps: Vec<CMat>,
}

impl Lindbladian {
    pub fn new(h: CMat, jumps: Vec<CMat>) -> Result<Self> {
        let d = h.nrows();
        if h.ncols() != d || d == 0 {
            return Err(Error::Shape(format!("Hamiltonian must be square, got {}x{}", h.nrows(), h.ncols())));
        }
        if let Some(j) = jumps.iter().find(|j| j.nrows() != d || j.ncols() != d) {
            return Err(Error::Shape(format!("jump operators must be {d}x{d}, found {}x{}", j.nrows(), j.ncols())));
        }
        let defect = linalg::hermiticity_defect(&h);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { dim: d, h, jumps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h
    }

    pub fn jumps(&self) -> &[CMat] {
        &self.jumps
    }

    /// The generator as a `d² × d²` matrix.
    pub fn superop(&self) -> Superop {
        let d = self.dim;
        let one = linalg::eye(d);
        let mi = c(0.0, -1.0);
        let mut l = linalg::scale(mi, &(linalg::kron(&self.h, &one) - linalg::kron(&one, &linalg::transpose(&self.h))));
        for j in &self.jumps {
            let jj = j.adjoint() * j;
            l += linalg::kron(j, &linalg::conj(j));
            l -= linalg::scale(cr(0.5), &(linalg::kron(&jj, &one) + linalg::kron(&one, &linalg::transpose(&jj))));
        }
        Superop { dim: d, mat: l }
    }

    /// `L†(X) = i[H, X] + Σ_i (J_i† X J_i − ½{J_i† J_i, X})`.
    pub fn dual_apply(&self, x: &CMat) -> CMat {
        let mut out = linalg::scale(c(0.0, 1.0), &linalg::commutator(&self.h, x));
        for j in &self.jumps {
            let jj = j.adjoint() * j;
            out += j.adjoint() * x * j;
            out -= linalg::scale(cr(0.5), &(&jj * x + x * &jj));
        }
        out
    }

    /// `e^{tL}`.
    pub fn evolve(&self, t: f64) -> Result<Superop> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("evolution time must be finite and nonnegative, got {t}")));
        }
        let l = self.superop().mat;
        Ok(Superop { dim: self.dim, mat: linalg::expm(&linalg::scale(cr(t), &l))? })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LindbladSymmetry {
    pub weak: bool,
    pub strong: bool,
}

/// Weak: `L` commutes with `U_g ⊗ conj U_g`. Strong: `[U_g, J_i] = 0` and
/// `[U_g, H] = 0`, cross-checked against `L†(U_g) = 0`.
pub fn lindblad_symmetry(lb: &Lindbladian, rep: &OnsiteRep) -> Result<LindbladSymmetry> {
    if lb.dim != rep.dim() {
        return Err(Error::Shape(format!("Lindbladian acts on d={} but the rep on d={}", lb.dim, rep.dim())));
    }
    let l = lb.superop().mat;
    let mut weak = true;
    let mut strong = true;
    let mut dual = true;
    for u in rep.mats() {
        let s = linalg::kron(u, &linalg::conj(u));
        if linalg::max_diff(&(&l * &s), &(&s * &l)) > SYMMETRY_TOL {
            weak = false;
        }
        let comm = std::iter::once(&lb.h).chain(&lb.jumps).map(|x| linalg::max_abs(&linalg::commutator(u, x))).fold(0.0, f64::max);
        if comm > SYMMETRY_TOL {
            strong = false;
        }
        if linalg::max_abs(&lb.dual_apply(u)) > SYMMETRY_TOL {
            dual = false;
        }
    }
    if strong != dual {
        return Err(Error::Inconsistent(format!(
            "commutator test says strong={strong} but L†(U_g) = 0 test says {dual}"
        )));
    }
    Ok(LindbladSymmetry { weak, strong })
}
