//! Named channels and Lindbladians.
//!
//! The 16-dimensional channels act on the regular representation of
//! `Z_4 × Z_4` returned by [`zoo_rep`]: basis state `i` carries the character
//! with canonical index `i`, i.e. residues `(i mod 4, i / 4)`. Block forms
//! `K = 1_4 ⊗ K̃` therefore act on the first residue.

use super::kraus::QuantumChannel;
use super::lindblad::Lindbladian;
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::linalg::{self, cr};
use crate::mps::{spin1, spin1_pi_rotations, spin1_z2z2, OnsiteRep};
use crate::{CMat, C64};

/// `Z_4 × Z_4`.
pub fn zoo_group() -> FiniteAbelianGroup {
    FiniteAbelianGroup::square(4).expect("n = 4")
}

/// The diagonal regular representation of `Z_4 × Z_4` on `C^16`.
pub fn zoo_rep() -> OnsiteRep {
    OnsiteRep::regular_diagonal(&zoo_group(), 16).expect("16 = |G|")
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("λ must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

/// `Z^a X^b` at index `b d + a`, with `X|j⟩ = |j+1⟩` and `Z|j⟩ = ω^j |j⟩`.
pub fn heisenberg_weyl(d: usize) -> Vec<CMat> {
    let x = CMat::from_fn(d, d, |i, j| if i == (j + 1) % d { cr(1.0) } else { C64::ZERO });
    let z = linalg::diag(&(0..d).map(|j| linalg::root_of_unity(j as i64, d as i64)).collect::<Vec<_>>());
    let mut out = Vec::with_capacity(d * d);
    for b in 0..d {
        let xb = linalg::mat_pow(&x, b as u64);
        for a in 0..d {
            out.push(linalg::mat_pow(&z, a as u64) * &xb);
        }
    }
    out
}

/// `ρ ↦ (1−λ) ρ + λ Tr(ρ) 1/d`, through the Heisenberg–Weyl operators with
/// the identity terms merged.
pub fn depolarising(d: usize, lambda: f64) -> Result<QuantumChannel> {
    check_lambda(lambda)?;
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let w = lambda / (d * d) as f64;
    let ops = heisenberg_weyl(d);
    let kraus = ops
        .iter()
        .enumerate()
        .map(|(i, op)| linalg::scale(cr(if i == 0 { (1.0 - lambda + w).sqrt() } else { w.sqrt() }), op))
        .collect();
    QuantumChannel::new(kraus)
}

/// `ρ ↦ (1−λ) ρ + (λ/|G|) Σ_g U_g ρ U_g†`, with the identity terms merged.
pub fn dephasing_group(rep: &OnsiteRep, lambda: f64) -> Result<QuantumChannel> {
    check_lambda(lambda)?;
    let w = lambda / rep.mats().len() as f64;
    let kraus = rep
        .mats()
        .iter()
        .enumerate()
        .map(|(i, u)| linalg::scale(cr(if i == 0 { (1.0 - lambda + w).sqrt() } else { w.sqrt() }), u))
        .collect();
    QuantumChannel::new(kraus)
}

/// Spin-1 dephasing by the π rotations; `λ = 1` is fully dephasing.
pub fn dephasing(lambda: f64) -> Result<QuantumChannel> {
    dephasing_group(&spin1_z2z2(), lambda)
}

/// Depolarising on the 16-dimensional zoo space: weakly but not strongly
/// symmetric for `0 < λ`.
pub fn ws_depolarising16(lambda: f64) -> Result<QuantumChannel> {
    depolarising(16, lambda)
}

fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = cr(1.0);
    m
}

fn blocks(small: &[CMat]) -> Result<QuantumChannel> {
    QuantumChannel::new(small.iter().map(|k| linalg::kron(&linalg::eye(4), k)).collect())
}

/// Strongly symmetric channels twisted by an endomorphism of determinant `k`.
///
/// * `0`: `K_i = |0⟩⟨i|`, resetting everything to the trivial-character state.
/// * `2`: blocks `|0⟩⟨0|, |2⟩⟨1|, |0⟩⟨2|, |2⟩⟨3|`, twist `diag(2, 1)`.
/// * `3`: blocks `|0⟩⟨0|` and `|3⟩⟨1| + |2⟩⟨2| + |1⟩⟨3|`, twist `diag(3, 1)`.
pub fn k_ss(k: usize) -> Result<QuantumChannel> {
    match k {
        0 => QuantumChannel::new((0..16).map(|i| unit(16, 0, i)).collect()),
        2 => blocks(&[unit(4, 0, 0), unit(4, 2, 1), unit(4, 0, 2), unit(4, 2, 3)]),
        3 => blocks(&[unit(4, 0, 0), unit(4, 3, 1) + unit(4, 2, 2) + unit(4, 1, 3)]),
        _ => Err(Error::InvalidParameter(format!("k_ss is defined for k in {{0, 2, 3}}, got {k}"))),
    }
}

fn coser_state(phi: Option<&[C64]>) -> Result<Vec<C64>> {
    let mut v = match phi {
        Some(p) => p.to_vec(),
        None => vec![C64::ZERO, cr(1.0), C64::ZERO],
    };
    if v.len() != 3 {
        return Err(Error::Shape(format!("|φ⟩ must have 3 components, got {}", v.len())));
    }
    if linalg::norm(&v) == 0.0 {
        return Err(Error::InvalidParameter("|φ⟩ is zero".into()));
    }
    linalg::normalize(&mut v);
    // symmetric means a joint eigenvector of the π rotations
    for r in spin1_pi_rotations() {
        let rv = linalg::mat_vec(&r, &v);
        let ev = linalg::inner(&v, &rv);
        if rv.iter().zip(&v).any(|(a, b)| (a - ev * b).norm() > 1e-10) {
            return Err(Error::InvalidParameter("|φ⟩ is not invariant under the π rotations".into()));
        }
    }
    Ok(v)
}

/// The replacement channel `T_s(ρ) = Tr(ρ) |φ⟩⟨φ|`; `|φ⟩` defaults to `|0⟩`.
pub fn coser_target(phi: Option<&[C64]>) -> Result<QuantumChannel> {
    let v = coser_state(phi)?;
    QuantumChannel::new((0..3).map(|i| CMat::from_fn(3, 3, |a, b| if b == i { v[a] } else { C64::ZERO })).collect())
}

/// `L_s = T_s − 1` with jumps `|φ⟩⟨i|` and no Hamiltonian.
pub fn coser(phi: Option<&[C64]>) -> Result<Lindbladian> {
    let t = coser_target(phi)?;
    Lindbladian::new(CMat::zeros(3, 3), t.kraus().to_vec())
}

/// A strongly symmetric spin-1 Lindbladian: jump `e^{iπS_x}`, `H = S_z²`.
pub fn symmetric_lindbladian() -> Lindbladian {
    let [rx, ..] = spin1_pi_rotations();
    let [.., sz] = spin1();
    Lindbladian::new(&sz * &sz, vec![rx]).expect("Hermitian")
}

#[derive(Clone, Debug)]
pub enum ZooItem {
    Channel(QuantumChannel),
    Lindbladian(Lindbladian),
}

/// Looks up a named construction.
///
/// | name | params |
/// |---|---|
/// | `depolarising` | `d, λ` |
/// | `dephasing` | `λ` |
/// | `k_ss` | `k` |
/// | `ws_depolarising16` | `λ` |
/// | `coser` | none, or the three real amplitudes of `|φ⟩` |
/// | `symmetric_lindbladian` | none |
pub fn zoo(name: &str, params: &[f64]) -> Result<ZooItem> {
    let want = |n: usize| -> Result<()> {
        if params.len() != n {
            return Err(Error::InvalidParameter(format!("{name} takes {n} parameter(s), got {}", params.len())));
        }
        Ok(())
    };
    let as_index = |x: f64| -> Result<usize> {
        if x < 0.0 || x.fract() != 0.0 {
            return Err(Error::InvalidParameter(format!("{name}: expected a nonnegative integer, got {x}")));
        }
        Ok(x as usize)
    };
    match name {
        "depolarising" => {
            want(2)?;
            Ok(ZooItem::Channel(depolarising(as_index(params[0])?, params[1])?))
        }
        "dephasing" => {
            want(1)?;
            Ok(ZooItem::Channel(dephasing(params[0])?))
        }
        "k_ss" => {
            want(1)?;
            Ok(ZooItem::Channel(k_ss(as_index(params[0])?)?))
        }
        "ws_depolarising16" => {
            want(1)?;
            Ok(ZooItem::Channel(ws_depolarising16(params[0])?))
        }
        "coser" => {
            if params.is_empty() {
                return Ok(ZooItem::Lindbladian(coser(None)?));
            }
            want(3)?;
            let phi: Vec<C64> = params.iter().map(|&x| cr(x)).collect();
            Ok(ZooItem::Lindbladian(coser(Some(&phi))?))
        }
        "symmetric_lindbladian" => {
            want(0)?;
            Ok(ZooItem::Lindbladian(symmetric_lindbladian()))
        }
        _ => Err(Error::Unknown(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{classify, is_strongly_symmetric, is_weakly_symmetric, Channel};

    #[test]
    fn heisenberg_weyl_order() {
        let hw = heisenberg_weyl(3);
        assert_eq!(hw.len(), 9);
        let x = &hw[3];
        let z = &hw[1];
        assert!(linalg::max_diff(&hw[4], &(z * x)) < 1e-15);
        assert!(linalg::max_diff(&hw[8], &(z * z * x * x)) < 1e-15);
        // orthogonal in the trace inner product
        for (i, a) in hw.iter().enumerate() {
            for (j, b) in hw.iter().enumerate() {
                let t = linalg::trace(&(a.adjoint() * b));
                assert!((t - cr(if i == j { 3.0 } else { 0.0 })).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn named_constructions() {
        let full = dephasing(1.0).unwrap();
        let [.., sz] = spin1();
        assert!(full.dual_apply(&sz).norm_max() < 1e-15);
        let dep = depolarising(3, 1.0).unwrap();
        let rho = linalg::from_rows(&[vec![cr(0.2), cr(0.1), C64::ZERO], vec![cr(0.1), cr(0.5), cr(0.3)], vec![C64::ZERO, cr(0.3), cr(0.3)]]);
        assert!(linalg::max_diff(&dep.apply(&rho), &linalg::scale(cr(1.0 / 3.0), &linalg::eye(3))) < 1e-15);
        let k3 = k_ss(3).unwrap();
        assert_eq!(k3.kraus().len(), 2);
        assert!(k3.kraus().iter().all(|k| k.nrows() == 16));
        for k in k3.kraus() {
            let blk = CMat::from_fn(4, 4, |i, j| k[(i, j)]);
            for b in 1..4 {
                assert!(linalg::max_diff(&CMat::from_fn(4, 4, |i, j| k[(4 * b + i, 4 * b + j)]), &blk) == 0.0);
            }
        }
        assert_eq!(k_ss(2).unwrap().kraus().len(), 4);
        assert_eq!(k_ss(0).unwrap().kraus().len(), 16);
        assert!(k_ss(1).is_err());
        assert!(dephasing(1.5).is_err());
        assert!(matches!(zoo("nope", &[]), Err(Error::Unknown(_))));
        assert!(matches!(zoo("k_ss", &[3.0]), Ok(ZooItem::Channel(_))));
        assert!(matches!(zoo("coser", &[]), Ok(ZooItem::Lindbladian(_))));
        assert!(zoo("coser", &[1.0, 0.0, 0.0]).is_err());
        assert!(zoo("depolarising", &[3.0]).is_err());
    }

    #[test]
    fn symmetry_of_the_sixteen_dimensional_zoo() {
        let rep = zoo_rep();
        let ws = ws_depolarising16(0.5).unwrap();
        assert!(is_weakly_symmetric(&ws, &rep).unwrap());
        assert!(is_strongly_symmetric(&ws, &rep).unwrap().is_none());
        // E†(U_g) = (1−λ) U_g on the regular rep
        let g = zoo_group().element(&[1, 2]).unwrap();
        assert!(linalg::max_diff(&ws.dual_apply(rep.get(&g)), &linalg::scale(cr(0.5), rep.get(&g))) < 1e-14);
        let ss1 = dephasing_group(&rep, 0.5).unwrap();
        assert!(is_strongly_symmetric(&ss1, &rep).unwrap().is_some());
        for k in [0, 2, 3] {
            let r = classify(&k_ss(k).unwrap(), &rep).unwrap();
            assert!(r.strong.is_none());
            assert!(r.twist.is_some());
        }
    }
}
