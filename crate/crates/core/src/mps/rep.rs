use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::linalg::{self, c, cr};
use crate::{CMat, C64};

/// A linear unitary representation `g ↦ U_g` of a finite abelian group.
#[derive(Clone, Debug)]
pub struct OnsiteRep {
    group: FiniteAbelianGroup,
    /// Indexed by element index.
    mats: Vec<CMat>,
}

pub const REP_TOL: f64 = 1e-12;

impl OnsiteRep {
    /// Validates unitarity, `U_e = 1` and `U_g U_h = U_{g+h}`.
    pub fn new(group: &FiniteAbelianGroup, mats: Vec<CMat>) -> Result<Self> {
        if mats.len() != group.order() {
            return Err(Error::Shape(format!("need {} matrices, got {}", group.order(), mats.len())));
        }
        let d = mats[0].nrows();
        if mats.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::Shape("rep matrices must share one square shape".into()));
        }
        let rep = Self { group: group.clone(), mats };
        rep.validate()?;
        Ok(rep)
    }

    /// Generates the representation from the images of the unit vectors.
    pub fn from_generators(group: &FiniteAbelianGroup, gens: &[CMat]) -> Result<Self> {
        if gens.len() != group.rank() {
            return Err(Error::Shape(format!("need {} generator images, got {}", group.rank(), gens.len())));
        }
        let d = gens[0].nrows();
        let mats = group
            .elements()
            .iter()
            .map(|g| {
                g.residues().iter().zip(gens).fold(linalg::eye(d), |acc, (&r, u)| acc * linalg::mat_pow(u, r as u64))
            })
            .collect();
        Self::new(group, mats)
    }

    /// `U_g = diag(χ_{i mod |G|}(g))`: the regular representation, repeated
    /// `d / |G|` times, with characters in canonical order.
    pub fn regular_diagonal(group: &FiniteAbelianGroup, d: usize) -> Result<Self> {
        let order = group.order();
        if d == 0 || d % order != 0 {
            return Err(Error::InvalidParameter(format!("physical dimension {d} is not a multiple of |G| = {order}")));
        }
        let chars = group.characters();
        let mats = group
            .elements()
            .iter()
            .map(|g| {
                let diag: Vec<C64> = (0..d).map(|i| group.character_value(&chars[i % order], g).expect("same group")).collect();
                linalg::diag(&diag)
            })
            .collect();
        Self::new(group, mats)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        let d = self.dim();
        if linalg::max_diff(&self.mats[0], &linalg::eye(d)) > REP_TOL {
            return Err(Error::InvalidParameter("U_identity is not the identity".into()));
        }
        for (i, u) in self.mats.iter().enumerate() {
            let defect = linalg::unitarity_defect(u);
            if defect > REP_TOL {
                return Err(Error::InvalidParameter(format!("U_{} is not unitary (defect {defect:e})", g.element_at(i))));
            }
        }
        for a in g.elements() {
            for b in g.elements() {
                let ab = &self.mats[g.index_of(&a)] * &self.mats[g.index_of(&b)];
                let defect = linalg::max_diff(&ab, &self.mats[g.index_of(&g.add(&a, &b))]);
                if defect > REP_TOL {
                    return Err(Error::InvalidParameter(format!("U_{a} U_{b} != U_(a+b) (defect {defect:e})")));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    pub fn get(&self, g: &GroupElement) -> &CMat {
        &self.mats[self.group.index_of(g)]
    }

    pub fn mats(&self) -> &[CMat] {
        &self.mats
    }

    /// `P_α(X) = (1/|G|) Σ_h conj(χ_α(h)) U_h† X U_h`, the projection onto
    /// operators with `U_h† X U_h = χ_α(h) X`.
    pub fn project_sector(&self, alpha: &crate::group::Character, x: &CMat) -> CMat {
        let g = &self.group;
        let mut acc = CMat::zeros(x.nrows(), x.ncols());
        for h in g.elements() {
            let chi = g.character_value(alpha, &h).expect("same group");
            let u = self.get(&h);
            acc += linalg::scale(chi.conj(), &(u.adjoint() * x * u));
        }
        linalg::scale(cr(1.0 / g.order() as f64), &acc)
    }

    /// The sector of `x` under `h ↦ U_h† x U_h`, if `x` is character-pure
    /// within `tol` (relative to its norm).
    pub fn sector_of(&self, x: &CMat, tol: f64) -> Option<crate::group::Character> {
        let norm = x.norm_max();
        if norm == 0.0 {
            return None;
        }
        let g = &self.group;
        // c(h) from the largest entry, then check the whole matrix
        let (mut bi, mut bj) = (0, 0);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                if x[(i, j)].norm() > x[(bi, bj)].norm() {
                    bi = i;
                    bj = j;
                }
            }
        }
        let mut values = Vec::with_capacity(g.order());
        for h in g.elements() {
            let u = self.get(&h);
            let y = u.adjoint() * x * u;
            let ch = y[(bi, bj)] / x[(bi, bj)];
            if linalg::max_diff(&y, &linalg::scale(ch, x)) > tol * norm {
                return None;
            }
            values.push(ch);
        }
        g.match_character(&values, tol.max(1e-10))
    }
}

/// Spin-1 operators in the basis `{|+⟩, |0⟩, |−⟩}`.
pub fn spin1() -> [CMat; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::ZERO;
    let sx = linalg::from_rows(&[vec![z, cr(s), z], vec![cr(s), z, cr(s)], vec![z, cr(s), z]]);
    let sy = linalg::from_rows(&[vec![z, c(0.0, -s), z], vec![c(0.0, s), z, c(0.0, -s)], vec![z, c(0.0, s), z]]);
    let sz = linalg::diag(&[cr(1.0), z, cr(-1.0)]);
    [sx, sy, sz]
}

/// `e^{iπ S_j} = 1 − 2 S_j²` for `j = x, y, z`.
pub fn spin1_pi_rotations() -> [CMat; 3] {
    let s = spin1();
    let r = |m: &CMat| linalg::eye(3) - linalg::scale(cr(2.0), &(m * m));
    [r(&s[0]), r(&s[1]), r(&s[2])]
}

/// `Z_2 × Z_2` acting on spin 1 by π rotations:
/// `(0,0) ↦ 1`, `(0,1) ↦ e^{iπS_x}`, `(1,0) ↦ e^{iπS_y}`, `(1,1) ↦ e^{iπS_z}`.
pub fn spin1_z2z2() -> OnsiteRep {
    let g = FiniteAbelianGroup::square(2).expect("n = 2");
    let [rx, ry, rz] = spin1_pi_rotations();
    OnsiteRep::new(&g, vec![linalg::eye(3), rx, ry, rz]).expect("valid representation")
}
