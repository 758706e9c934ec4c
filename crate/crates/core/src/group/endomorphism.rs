use super::{Character, FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// A group endomorphism `σ: G → G`, stored as the images of the generators
/// (the columns of an integer matrix).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endomorphism {
    group: FiniteAbelianGroup,
    /// `matrix[i][j]` is residue `i` of `σ(e_j)`.
    matrix: Vec<Vec<usize>>,
}

impl Endomorphism {
    /// `σ(w,x) = (a w + b x, c w + d x)` on `Z_n × Z_n`.
    pub fn from_matrix(n: usize, abcd: [i64; 4]) -> Result<Self> {
        let group = FiniteAbelianGroup::square(n)?;
        let r = |v: i64| v.rem_euclid(n as i64) as usize;
        Ok(Self { group, matrix: vec![vec![r(abcd[0]), r(abcd[1])], vec![r(abcd[2]), r(abcd[3])]] })
    }

    pub fn identity(group: &FiniteAbelianGroup) -> Self {
        let r = group.rank();
        let matrix = (0..r).map(|i| (0..r).map(|j| usize::from(i == j && group.moduli()[i] > 1)).collect()).collect();
        Self { group: group.clone(), matrix }
    }

    /// Projects onto the coordinates flagged in `keep`, zeroing the others.
    pub fn collapse(group: &FiniteAbelianGroup, keep: &[bool]) -> Result<Self> {
        if keep.len() != group.rank() {
            return Err(Error::GroupMismatch(format!("collapse mask has {} entries for rank {}", keep.len(), group.rank())));
        }
        let mut s = Self::identity(group);
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                s.matrix[i][i] = 0;
            }
        }
        Ok(s)
    }

    /// The constant map `g ↦ e`.
    pub fn trivial(group: &FiniteAbelianGroup) -> Self {
        let r = group.rank();
        Self { group: group.clone(), matrix: vec![vec![0; r]; r] }
    }

    /// Builds `σ` from the images of the unit vectors `e_j`; fails unless
    /// `n_j σ(e_j) = 0`, i.e. unless the assignment extends to a homomorphism.
    pub fn from_generator_images(group: &FiniteAbelianGroup, images: &[GroupElement]) -> Result<Self> {
        let r = group.rank();
        if images.len() != r || images.iter().any(|g| !group.contains(g)) {
            return Err(Error::GroupMismatch("generator images do not match the group".into()));
        }
        for (j, img) in images.iter().enumerate() {
            if group.scalar_mul(group.moduli()[j] as i64, img) != group.identity() {
                return Err(Error::InvalidParameter(format!(
                    "image {img} of generator {j} has order not dividing {}",
                    group.moduli()[j]
                )));
            }
        }
        let matrix = (0..r).map(|i| (0..r).map(|j| images[j].residues()[i]).collect()).collect();
        Ok(Self { group: group.clone(), matrix })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn matrix(&self) -> &[Vec<usize>] {
        &self.matrix
    }

    pub fn apply(&self, g: &GroupElement) -> GroupElement {
        let m = self.group.moduli();
        let residues: Vec<i64> = (0..self.group.rank())
            .map(|i| {
                let li = m[i];
                (0..self.group.rank())
                    .map(|j| (self.matrix[i][j] * g.residues()[j]) % li)
                    .sum::<usize>() as i64
            })
            .collect();
        self.group.element(&residues).expect("rank matches")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Result<Endomorphism> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("composing endomorphisms of different groups".into()));
        }
        let images: Vec<GroupElement> = (0..self.group.rank())
            .map(|j| {
                let col: Vec<i64> = (0..self.group.rank()).map(|i| other.matrix[i][j] as i64).collect();
                self.apply(&self.group.element(&col).expect("rank matches"))
            })
            .collect();
        Self::from_generator_images(&self.group, &images)
    }

    /// Determinant mod `n`; only defined when every modulus equals `n`.
    pub fn det(&self) -> Option<usize> {
        let m = self.group.moduli();
        let n = m[0];
        if m.iter().any(|&x| x != n) {
            return None;
        }
        let a: Vec<Vec<i64>> = self.matrix.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        Some(det_int(&a).rem_euclid(n as i64) as usize)
    }

    /// Bijective on the (enumerated) group.
    pub fn is_automorphism(&self) -> bool {
        let mut seen = vec![false; self.group.order()];
        for g in self.group.elements() {
            let idx = self.group.index_of(&self.apply(&g));
            if seen[idx] {
                return false;
            }
            seen[idx] = true;
        }
        true
    }

    /// Checks `σ(g+h) = σ(g)+σ(h)` on every pair.
    pub fn is_homomorphism(&self) -> bool {
        let els = self.group.elements();
        els.iter().all(|g| {
            els.iter()
                .all(|h| self.apply(&self.group.add(g, h)) == self.group.add(&self.apply(g), &self.apply(h)))
        })
    }

    /// The pulled-back character `σ*β = β ∘ σ`.
    pub fn pull_character(&self, beta: &Character) -> Character {
        // (β∘σ)(e_j) = exp(2πi Σ_i β_i M_ij / n_i); read off residue j.
        let m = self.group.moduli();
        let r = self.group.rank();
        let l = m.iter().fold(1usize, |acc, &n| acc / super::gcd(acc, n) * n);
        let residues: Vec<i64> = (0..r)
            .map(|j| {
                let num: usize = (0..r).map(|i| (beta.residues()[i] * self.matrix[i][j] % m[i]) * (l / m[i])).sum::<usize>() % l;
                (num * m[j] / l) as i64
            })
            .collect();
        self.group.character(&residues).expect("rank matches")
    }

    /// Every 2×2 matrix over `Z_n`, i.e. every endomorphism of `Z_n × Z_n`.
    pub fn all_square(n: usize) -> Vec<Endomorphism> {
        let n_i = n as i64;
        let mut out = Vec::with_capacity(n.pow(4));
        for a in 0..n_i {
            for b in 0..n_i {
                for c in 0..n_i {
                    for d in 0..n_i {
                        out.push(Self::from_matrix(n, [a, b, c, d]).expect("n > 0"));
                    }
                }
            }
        }
        out
    }
}

fn det_int(a: &[Vec<i64>]) -> i64 {
    match a.len() {
        0 => 1,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> =
                    a[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, v)| *v).collect()).collect();
                let sign = if j % 2 == 0 { 1 } else { -1 };
                sign * a[0][j] * det_int(&minor)
            })
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{complexity, is_mnc, pullback, Cocycle};
    use proptest::prelude::*;

    #[test]
    fn matrices_act_as_documented() {
        let s = Endomorphism::from_matrix(5, [1, 2, 3, 4]).unwrap();
        let g = s.group().element(&[1, 1]).unwrap();
        assert_eq!(s.apply(&g).residues(), &[3, 2]);
        assert_eq!(s.det(), Some(3));
        assert!(s.is_homomorphism());
    }

    #[test]
    fn automorphism_iff_det_unit() {
        for n in 1..=6 {
            for s in Endomorphism::all_square(n) {
                let unit = super::super::gcd(s.det().unwrap(), n) == 1;
                assert_eq!(s.is_automorphism(), unit, "{:?}", s.matrix());
            }
        }
    }

    #[test]
    fn general_products_support_identity_and_collapse_only_by_images() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        assert_eq!(Endomorphism::identity(&g).det(), None);
        let c = Endomorphism::collapse(&g, &[true, false]).unwrap();
        assert_eq!(c.apply(&g.element(&[1, 3]).unwrap()).residues(), &[1, 0]);
        // e_0 (order 2) cannot go to an element of order 4
        let bad = vec![g.element(&[0, 1]).unwrap(), g.element(&[0, 1]).unwrap()];
        assert!(Endomorphism::from_generator_images(&g, &bad).is_err());
        let good = vec![g.element(&[1, 2]).unwrap(), g.element(&[0, 1]).unwrap()];
        let s = Endomorphism::from_generator_images(&g, &good).unwrap();
        assert!(s.is_homomorphism());
    }

    #[test]
    fn character_pullback_is_composition() {
        let g = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let s = Endomorphism::from_generator_images(&g, &[g.element(&[1, 2]).unwrap(), g.element(&[1, 3]).unwrap()]).unwrap();
        for beta in g.characters() {
            let pulled = s.pull_character(&beta);
            for x in g.elements() {
                let lhs = g.character_value(&pulled, &x).unwrap();
                let rhs = g.character_value(&beta, &s.apply(&x)).unwrap();
                assert!((lhs - rhs).norm() < 1e-13);
            }
        }
    }

    /// Automorphisms preserve complexity, and only automorphisms preserve
    /// the set of maximally noncommutative classes (both directions).
    #[test]
    fn complexity_and_mnc_claims_exhaustive() {
        for n in 1..=6usize {
            let g = FiniteAbelianGroup::square(n).unwrap();
            let classes: Vec<Cocycle> = (0..n as i64).map(|k| Cocycle::new(&g, k).unwrap()).collect();
            for s in Endomorphism::all_square(n) {
                let auto = s.is_automorphism();
                let mut preserves_mnc = true;
                for w in &classes {
                    let p = pullback(&s, w).unwrap();
                    if auto {
                        assert_eq!(complexity(&p), complexity(w));
                    }
                    if is_mnc(w) != is_mnc(&p) {
                        preserves_mnc = false;
                    }
                }
                assert_eq!(preserves_mnc, auto, "n={n} sigma={:?}", s.matrix());
            }
        }
    }

    proptest! {
        #[test]
        fn pullback_is_functorial(n in 1usize..9, a in any::<[i64; 4]>(), b in any::<[i64; 4]>(), k in 0i64..9) {
            let s = Endomorphism::from_matrix(n, a.map(|x| x % 1000)).unwrap();
            let t = Endomorphism::from_matrix(n, b.map(|x| x % 1000)).unwrap();
            let w = Cocycle::new(s.group(), k).unwrap();
            let st = s.compose(&t).unwrap();
            prop_assert_eq!(pullback(&st, &w).unwrap(), pullback(&t, &pullback(&s, &w).unwrap()).unwrap());
            prop_assert!(st.is_homomorphism());
            for g in s.group().elements() {
                prop_assert_eq!(st.apply(&g), s.apply(&t.apply(&g)));
            }
        }
    }
}
