use super::{Endomorphism, FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::linalg::root_of_unity;
use crate::C64;
use serde::{Deserialize, Serialize};

/// The representative `ω_k[(w,x),(y,z)] = exp(2πi k x y / n)` of a class in
/// `H²(Z_n × Z_n, U(1)) ≅ Z_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cocycle {
    group: FiniteAbelianGroup,
    k: usize,
}

impl Cocycle {
    pub fn new(group: &FiniteAbelianGroup, k: i64) -> Result<Self> {
        let n = group.require_square()?;
        Ok(Self { group: group.clone(), k: k.rem_euclid(n as i64) as usize })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.group.moduli()[0]
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.group.contains(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{g} is not in Z{:?}", self.group.moduli())))
        }
    }

    /// `k (z w − x y) mod n` for `g = (w,x)`, `h = (y,z)`: the commutator
    /// phase is `exp(2πi e / n)` with this exponent `e`.
    pub fn commutator_exponent(&self, g: &GroupElement, h: &GroupElement) -> usize {
        let n = self.n() as i64;
        let (w, x) = (g.residues()[0] as i64, g.residues()[1] as i64);
        let (y, z) = (h.residues()[0] as i64, h.residues()[1] as i64);
        (self.k as i64 * (z * w - x * y)).rem_euclid(n) as usize
    }
}

pub fn cocycle_value(omega: &Cocycle, g: &GroupElement, h: &GroupElement) -> Result<C64> {
    omega.check(g)?;
    omega.check(h)?;
    let n = omega.n() as i64;
    let x = g.residues()[1] as i64;
    let y = h.residues()[0] as i64;
    Ok(root_of_unity(omega.k as i64 * x * y, n))
}

/// `ω(h,g) / ω(g,h)`, the phase picked up by commuting `V_g` past `V_h`.
pub fn commutator_phase(omega: &Cocycle, g: &GroupElement, h: &GroupElement) -> Result<C64> {
    omega.check(g)?;
    omega.check(h)?;
    Ok(root_of_unity(omega.commutator_exponent(g, h) as i64, omega.n() as i64))
}

/// `σ*ω_k = ω_{k det σ}`.
pub fn pullback(sigma: &Endomorphism, omega: &Cocycle) -> Result<Cocycle> {
    if sigma.group() != omega.group() {
        return Err(Error::GroupMismatch(format!(
            "endomorphism of Z{:?} cannot pull back a cocycle on Z{:?}",
            sigma.group().moduli(),
            omega.group().moduli()
        )));
    }
    let det = sigma.det().ok_or_else(|| Error::NotSquareGroup(sigma.group().moduli().to_vec()))?;
    Cocycle::new(omega.group(), (omega.k * det) as i64)
}

/// `K_ω`: elements whose commutator phase with everything is trivial.
pub fn projective_center(omega: &Cocycle) -> Vec<GroupElement> {
    let els = omega.group.elements();
    els.iter()
        .filter(|g| els.iter().all(|h| omega.commutator_exponent(g, h) == 0))
        .cloned()
        .collect()
}

/// `D_ω = sqrt(|G| / |K_ω|)`, always an integer for the `ω_k`.
pub fn complexity(omega: &Cocycle) -> f64 {
    complexity_exact(omega) as f64
}

pub(crate) fn complexity_exact(omega: &Cocycle) -> usize {
    let ratio = omega.group.order() / projective_center(omega).len();
    let root = (ratio as f64).sqrt().round() as usize;
    debug_assert_eq!(root * root, ratio);
    root
}

/// Maximally noncommutative: trivial projective center.
pub fn is_mnc(omega: &Cocycle) -> bool {
    projective_center(omega).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize) -> FiniteAbelianGroup {
        FiniteAbelianGroup::square(n).unwrap()
    }

    fn el(g: &FiniteAbelianGroup, r: [i64; 2]) -> GroupElement {
        g.element(&r).unwrap()
    }

    #[test]
    fn cocycle_examples() {
        let g2 = z(2);
        let w = Cocycle::new(&g2, 1).unwrap();
        assert_eq!(cocycle_value(&w, &el(&g2, [0, 1]), &el(&g2, [1, 0])).unwrap(), C64::new(-1.0, 0.0));
        let w0 = Cocycle::new(&g2, 0).unwrap();
        for a in g2.elements() {
            for b in g2.elements() {
                assert_eq!(cocycle_value(&w0, &a, &b).unwrap(), C64::new(1.0, 0.0));
            }
        }
        let g12 = z(12);
        let w3 = Cocycle::new(&g12, 3).unwrap();
        let v = cocycle_value(&w3, &el(&g12, [0, 2]), &el(&g12, [2, 0])).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let g2 = z(2);
        let w = Cocycle::new(&g2, 1).unwrap();
        assert_eq!(commutator_phase(&w, &el(&g2, [1, 0]), &el(&g2, [0, 1])).unwrap(), C64::new(-1.0, 0.0));
        let g4 = z(4);
        let w = Cocycle::new(&g4, 2).unwrap();
        assert_eq!(commutator_phase(&w, &el(&g4, [1, 0]), &el(&g4, [0, 1])).unwrap(), C64::new(-1.0, 0.0));
        for g in g4.elements() {
            assert_eq!(commutator_phase(&w, &g, &g4.identity()).unwrap(), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn non_square_groups_are_rejected() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert!(matches!(Cocycle::new(&g, 1), Err(Error::NotSquareGroup(_))));
    }

    #[test]
    fn center_and_complexity_examples() {
        let g4 = z(4);
        let c1 = Cocycle::new(&g4, 1).unwrap();
        assert_eq!(projective_center(&c1), vec![g4.identity()]);
        assert_eq!(complexity(&c1), 4.0);
        assert!(is_mnc(&c1));
        let c2 = Cocycle::new(&g4, 2).unwrap();
        let expect: Vec<GroupElement> = [[0, 0], [0, 2], [2, 0], [2, 2]].iter().map(|r| el(&g4, *r)).collect();
        assert_eq!(projective_center(&c2), expect);
        assert_eq!(complexity(&c2), 2.0);
        assert!(!is_mnc(&c2));
        for n in 2..7 {
            let c0 = Cocycle::new(&z(n), 0).unwrap();
            assert_eq!(complexity(&c0), 1.0);
            assert!(!is_mnc(&c0));
        }
        assert!(is_mnc(&Cocycle::new(&z(2), 1).unwrap()));
    }

    #[test]
    fn pullback_examples() {
        let g12 = z(12);
        let five = Endomorphism::from_matrix(12, [5, 0, 0, 1]).unwrap();
        let three = Endomorphism::from_matrix(12, [3, 0, 0, 1]).unwrap();
        for (k, want) in [(2, 10), (3, 3), (6, 6), (9, 9)] {
            assert_eq!(pullback(&five, &Cocycle::new(&g12, k).unwrap()).unwrap().k(), want);
        }
        for (k, want) in [(1, 3), (4, 0)] {
            assert_eq!(pullback(&three, &Cocycle::new(&g12, k).unwrap()).unwrap().k(), want);
        }
        let id = Endomorphism::identity(&g12);
        for k in 0..12 {
            assert_eq!(pullback(&id, &Cocycle::new(&g12, k).unwrap()).unwrap().k(), k as usize);
        }
    }

    /// Exhaustive checks for n ≤ 6: cocycle identity, bicharacter property
    /// and antisymmetry of the commutator phase.
    #[test]
    fn cocycle_identity_and_bicharacter_exhaustive() {
        for n in 1..=6 {
            let g = z(n);
            let els = g.elements();
            for k in 0..n as i64 {
                let w = Cocycle::new(&g, k).unwrap();
                let val = |a: &GroupElement, b: &GroupElement| cocycle_value(&w, a, b).unwrap();
                for a in &els {
                    for b in &els {
                        let ab = g.add(a, b);
                        for c in &els {
                            let lhs = val(a, b) * val(&ab, c);
                            let rhs = val(b, c) * val(a, &g.add(b, c));
                            assert!((lhs - rhs).norm() < 1e-12, "n={n} k={k}");
                        }
                        let cp = commutator_phase(&w, a, b).unwrap();
                        assert!((cp - val(b, a) / val(a, b)).norm() < 1e-12);
                        assert!((commutator_phase(&w, b, a).unwrap() - cp.conj()).norm() < 1e-12);
                        for c in &els {
                            let lhs = commutator_phase(&w, a, &g.add(b, c)).unwrap();
                            let rhs = cp * commutator_phase(&w, a, c).unwrap();
                            assert!((lhs - rhs).norm() < 1e-12);
                        }
                    }
                }
                let center = projective_center(&w);
                for a in &center {
                    for b in &center {
                        assert!(center.contains(&g.add(a, b)));
                    }
                }
            }
        }
    }
}
