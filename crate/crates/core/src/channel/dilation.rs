use super::kraus::{Channel, QuantumChannel};
use super::symmetry::{is_strongly_symmetric, joint_eigenbasis};
use crate::error::{Error, Result};
use crate::linalg::{self, cr};
use crate::mps::OnsiteRep;
use crate::{CMat, C64};

/// A unitary `W` on system ⊗ ancilla (index `a·m + i`) with
/// `W|b, 0⟩ = Σ_{a,i} K_i[a,b] |a, i⟩`.
#[derive(Clone, Debug)]
pub struct Dilation {
    pub w: CMat,
    pub dim: usize,
    pub ancilla: usize,
    /// The completion was built sector by sector so that `W` intertwines
    /// `U_g ⊗ 1` up to the strong-symmetry phase.
    pub symmetric: bool,
    /// Why a symmetric completion was not possible, when one was requested.
    pub note: Option<String>,
}

const GS_FLOOR: f64 = 1e-8;

impl Dilation {
    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.w)
    }

    /// `Tr_A[W (ρ ⊗ |0⟩⟨0|) W†]`.
    pub fn reduced(&self, rho: &CMat) -> CMat {
        let (d, m) = (self.dim, self.ancilla);
        let v = CMat::from_fn(d * m, d, |r, b| self.w[(r, b * m)]);
        let big = &v * rho * v.adjoint();
        CMat::from_fn(d, d, |a, a2| (0..m).map(|i| big[(a * m + i, a2 * m + i)]).sum())
    }

    /// Largest deviation from `E` over the matrix units `|a⟩⟨b|`.
    pub fn reproduction_defect<C: Channel + ?Sized>(&self, ch: &C) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in 0..d {
                let mut e = CMat::zeros(d, d);
                e[(a, b)] = cr(1.0);
                worst = worst.max(linalg::max_diff(&self.reduced(&e), &ch.apply(&e)));
            }
        }
        worst
    }

    /// `max_g min_φ ‖(U_g ⊗ 1) W − e^{iφ} W (U_g ⊗ 1)‖_max` with the best-fit phase.
    pub fn commutation_defect(&self, rep: &OnsiteRep) -> f64 {
        let one = linalg::eye(self.ancilla);
        let mut worst = 0.0f64;
        for u in rep.mats() {
            let ua = linalg::kron(u, &one);
            let x = &ua * &self.w;
            let y = &self.w * &ua;
            let overlap = linalg::trace(&(y.adjoint() * &x));
            let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { cr(1.0) };
            worst = worst.max(linalg::max_diff(&x, &linalg::scale(phase, &y)));
        }
        worst
    }
}

fn orthogonalise(v: &mut [C64], against: &[Vec<C64>]) {
    for _ in 0..2 {
        for q in against {
            let p = linalg::inner(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
    }
}

/// Accepts `v` if it has enough weight outside `against`.
fn gram_schmidt_push(mut v: Vec<C64>, against: &mut Vec<Vec<C64>>) -> bool {
    orthogonalise(&mut v, against);
    let n = linalg::norm(&v);
    if n <= GS_FLOOR {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    against.push(v);
    true
}

fn isometry_columns(ch: &QuantumChannel) -> Vec<Vec<C64>> {
    let d = ch.dim();
    let m = ch.kraus().len();
    (0..d)
        .map(|b| {
            let mut col = vec![C64::ZERO; d * m];
            for (i, k) in ch.kraus().iter().enumerate() {
                for a in 0..d {
                    col[a * m + i] = k[(a, b)];
                }
            }
            col
        })
        .collect()
}

/// Unitary dilation with ancilla dimension equal to the Kraus count.
///
/// With a rep supplied and the channel strongly symmetric with a character
/// phase `θ`, the free columns are filled sector by sector so that
/// `(U_g ⊗ 1) W = e^{iθ(g)} W (U_g ⊗ 1)`. Otherwise, or when the sector
/// dimensions do not allow it, a plain Gram-Schmidt completion is used and
/// [`Dilation::note`] says why.
pub fn dilate(ch: &QuantumChannel, rep: Option<&OnsiteRep>) -> Result<Dilation> {
    let report = ch.validate();
    if !report.pass {
        return Err(Error::Incomplete(report.deviation));
    }
    let mut note = None;
    if let Some(rep) = rep {
        match symmetric_completion(ch, rep)? {
            Ok(d) => return Ok(d),
            Err(why) => note = Some(why),
        }
    }
    let mut out = plain_completion(ch)?;
    out.note = note;
    Ok(out)
}

fn plain_completion(ch: &QuantumChannel) -> Result<Dilation> {
    let d = ch.dim();
    let m = ch.kraus().len();
    let n = d * m;
    let fixed = isometry_columns(ch);
    let mut basis = Vec::with_capacity(n);
    for col in &fixed {
        if !gram_schmidt_push(col.clone(), &mut basis) {
            return Err(Error::Numerical("Kraus isometry columns are linearly dependent".into()));
        }
    }
    let mut k = 0;
    while basis.len() < n && k < n {
        let mut e = vec![C64::ZERO; n];
        e[k] = cr(1.0);
        gram_schmidt_push(e, &mut basis);
        k += 1;
    }
    if basis.len() < n {
        return Err(Error::Numerical(format!("Gram-Schmidt produced {} of {n} columns", basis.len())));
    }
    let mut w = CMat::zeros(n, n);
    // columns b·m hold the isometry; the rest fill the other slots in order
    let mut extra = basis[d..].iter();
    for b in 0..d {
        for i in 0..m {
            let col = if i == 0 { &basis[b] } else { extra.next().expect("count checked") };
            for r in 0..n {
                w[(r, b * m + i)] = col[r];
            }
        }
    }
    Ok(Dilation { w, dim: d, ancilla: m, symmetric: false, note: None })
}

/// `Ok(Err(reason))` when the symmetric construction does not apply.
fn symmetric_completion(ch: &QuantumChannel, rep: &OnsiteRep) -> Result<std::result::Result<Dilation, String>> {
    let d = ch.dim();
    let m = ch.kraus().len();
    let n = d * m;
    let group = rep.group();
    let Some(theta) = is_strongly_symmetric(ch, rep)? else {
        return Ok(Err("channel is not strongly symmetric".into()));
    };
    let Some(theta_char) = theta.as_character(1e-8) else {
        return Ok(Err("strong-symmetry phases are not a character".into()));
    };
    let eig = joint_eigenbasis(rep)?;
    let fixed = isometry_columns(ch);
    let embed = |u: &[C64], i: usize| -> Vec<C64> {
        let mut v = vec![C64::ZERO; n];
        for (a, x) in u.iter().enumerate() {
            v[a * m + i] = *x;
        }
        v
    };
    // W (u ⊗ |0⟩) = Σ_b u_b W|b,0⟩
    let image = |u: &[C64]| -> Vec<C64> {
        let mut v = vec![C64::ZERO; n];
        for (b, ub) in u.iter().enumerate() {
            for (x, y) in v.iter_mut().zip(&fixed[b]) {
                *x += ub * y;
            }
        }
        v
    };
    let mut inputs = Vec::with_capacity(n);
    let mut outputs: Vec<Vec<C64>> = Vec::with_capacity(n);
    for (_, u) in &eig {
        inputs.push(embed(u, 0));
        outputs.push(image(u));
    }
    for chi in group.characters() {
        let target = group.char_mul(&chi, &theta_char);
        let sources: Vec<&Vec<C64>> = eig.iter().filter(|(c, _)| *c == chi).map(|(_, u)| u).collect();
        let mut candidates = eig
            .iter()
            .filter(|(c, _)| *c == target)
            .flat_map(|(_, u)| (0..m).map(move |j| (u, j)));
        for u in &sources {
            for i in 1..m {
                loop {
                    let Some((cand, j)) = candidates.next() else {
                        return Ok(Err(format!("sector {target} has no room for the image of sector {chi}")));
                    };
                    if gram_schmidt_push(embed(cand, j), &mut outputs) {
                        inputs.push(embed(u, i));
                        break;
                    }
                }
            }
        }
    }
    let cols = |vs: &[Vec<C64>]| CMat::from_fn(n, n, |r, k| vs[k][r]);
    let w = cols(&outputs) * cols(&inputs).adjoint();
    let out = Dilation { w, dim: d, ancilla: m, symmetric: true, note: None };
    if out.unitarity_defect() > 1e-10 {
        return Ok(Err(format!("sector-wise completion is not unitary (defect {:e})", out.unitarity_defect())));
    }
    Ok(Ok(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::symmetry::tests::random_ss_channel;
    use crate::channel::zoo;
    use crate::mps::{spin1_pi_rotations, spin1_z2z2};
    use proptest::prelude::*;

    #[test]
    fn unitary_channel_dilates_to_itself() {
        let [rx, ..] = spin1_pi_rotations();
        let dl = dilate(&QuantumChannel::unitary(&rx).unwrap(), None).unwrap();
        assert_eq!(dl.ancilla, 1);
        assert!(linalg::max_diff(&dl.w, &rx) < 1e-15);
    }

    #[test]
    fn dephasing_dilation_is_symmetric() {
        let rep = spin1_z2z2();
        let ch = zoo::dephasing(0.5).unwrap();
        let dl = dilate(&ch, Some(&rep)).unwrap();
        assert!(dl.symmetric);
        assert_eq!(dl.w.nrows(), 12);
        assert!(dl.unitarity_defect() < 1e-10);
        assert!(dl.reproduction_defect(&ch) < 1e-10);
        assert!(dl.commutation_defect(&rep) < 1e-8);
    }

    #[test]
    fn depolarising_dilation_is_not() {
        let rep = spin1_z2z2();
        let ch = zoo::depolarising(3, 0.5).unwrap();
        let dl = dilate(&ch, Some(&rep)).unwrap();
        assert!(!dl.symmetric && dl.note.is_some());
        assert!(dl.unitarity_defect() < 1e-10);
        assert!(dl.reproduction_defect(&ch) < 1e-10);
        assert!(dl.commutation_defect(&rep) >= 1e-2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn dilations_reproduce_and_commute(seed in any::<u64>(), psi in 0usize..4, count in 1usize..4) {
            let (ch, rep) = random_ss_channel(2, psi, count, seed);
            let dl = dilate(&ch, Some(&rep)).unwrap();
            prop_assert!(dl.symmetric);
            prop_assert!(dl.unitarity_defect() < 1e-10);
            prop_assert!(dl.reproduction_defect(&ch) < 1e-10);
            prop_assert!(dl.commutation_defect(&rep) < 1e-8);
            let plain = dilate(&ch, None).unwrap();
            prop_assert!(plain.unitarity_defect() < 1e-10);
            prop_assert!(plain.reproduction_defect(&ch) < 1e-10);
        }
    }
}
