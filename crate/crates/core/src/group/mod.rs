//! Finite abelian groups `Z_{n_1} × … × Z_{n_r}`, their characters, the
//! cocycle representatives `ω_k` on `Z_n × Z_n`, endomorphisms and the
//! pattern-of-zeros calculus.
//!
//! All group and character arithmetic is exact integer arithmetic; only
//! [`character_value`] and friends produce floating point numbers.

mod cocycle;
mod endomorphism;
mod pattern;

pub use cocycle::{
    commutator_phase, complexity, cocycle_value, is_mnc, projective_center, pullback, Cocycle,
};
pub use endomorphism::Endomorphism;
pub use pattern::{invariant_from_pattern, pattern_of_zeros, transform_pattern, PatternOfZeros};

use crate::error::{Error, Result};
use crate::linalg::root_of_unity;
use crate::C64;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    moduli: Vec<usize>,
}

/// A residue vector; always reduced modulo the moduli of the group it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    residues: Vec<usize>,
}

/// The character `χ_p(g) = exp(2πi Σ p_i g_i / n_i)`, stored by its residues `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    residues: Vec<usize>,
}

impl GroupElement {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl Character {
    pub fn residues(&self) -> &[usize] {
        &self.residues
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.residues))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi({})", join(&self.residues))
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn gcd_i(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs() as usize, b.unsigned_abs() as usize) as i64
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<usize>) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidParameter("a group needs at least one modulus".into()));
        }
        if moduli.iter().any(|&n| n == 0) {
            return Err(Error::InvalidParameter(format!("moduli must be positive, got {moduli:?}")));
        }
        Ok(Self { moduli })
    }

    /// `Z_n × Z_n`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(vec![n, n])
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    /// `Some(n)` when the group is `Z_n × Z_n`.
    pub fn square_modulus(&self) -> Option<usize> {
        match self.moduli.as_slice() {
            [a, b] if a == b => Some(*a),
            _ => None,
        }
    }

    pub(crate) fn require_square(&self) -> Result<usize> {
        self.square_modulus().ok_or_else(|| Error::NotSquareGroup(self.moduli.clone()))
    }

    fn lcm(&self) -> usize {
        self.moduli.iter().fold(1, |acc, &n| acc / gcd(acc, n) * n)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { residues: vec![0; self.rank()] }
    }

    /// Builds an element from arbitrary integers, reducing them.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        self.check_len(residues.len())?;
        Ok(GroupElement {
            residues: residues
                .iter()
                .zip(&self.moduli)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as usize)
                .collect(),
        })
    }

    pub fn character(&self, residues: &[i64]) -> Result<Character> {
        let g = self.element(residues)?;
        Ok(Character { residues: g.residues })
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.rank() {
            return Err(Error::GroupMismatch(format!(
                "expected {} residues for moduli {:?}, got {len}",
                self.rank(),
                self.moduli
            )));
        }
        Ok(())
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.residues.len() == self.rank() && g.residues.iter().zip(&self.moduli).all(|(r, n)| r < n)
    }

    fn contains_char(&self, a: &Character) -> bool {
        a.residues.len() == self.rank() && a.residues.iter().zip(&self.moduli).all(|(r, n)| r < n)
    }

    /// Lexicographic index: the first residue varies slowest.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.residues.iter().zip(&self.moduli).fold(0, |acc, (&r, &n)| acc * n + r)
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut residues = vec![0; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.moduli).rev() {
            *slot = idx % n;
            idx /= n;
        }
        GroupElement { residues }
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order()).map(|i| self.element_at(i)).collect()
    }

    /// Canonical character index: the first residue varies fastest, so on
    /// `Z_n × Z_n` the character `(p, q)` sits at row `p + n q`.
    pub fn character_index(&self, a: &Character) -> usize {
        a.residues.iter().zip(&self.moduli).rev().fold(0, |acc, (&r, &n)| acc * n + r)
    }

    pub fn character_at(&self, mut idx: usize) -> Character {
        let mut residues = vec![0; self.rank()];
        for (slot, &n) in residues.iter_mut().zip(&self.moduli) {
            *slot = idx % n;
            idx /= n;
        }
        Character { residues }
    }

    /// All characters in canonical order.
    pub fn characters(&self) -> Vec<Character> {
        (0..self.order()).map(|i| self.character_at(i)).collect()
    }

    pub fn trivial_character(&self) -> Character {
        Character { residues: vec![0; self.rank()] }
    }

    /// Unit vectors of the nontrivial factors.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.rank())
            .filter(|&i| self.moduli[i] > 1)
            .map(|i| {
                let mut residues = vec![0; self.rank()];
                residues[i] = 1;
                GroupElement { residues }
            })
            .collect()
    }

    pub fn add(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&h.residues)
                .zip(&self.moduli)
                .map(|((a, b), n)| (a + b) % n)
                .collect(),
        }
    }

    pub fn neg(&self, g: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g.residues.iter().zip(&self.moduli).map(|(a, n)| (n - a) % n).collect(),
        }
    }

    pub fn scalar_mul(&self, k: i64, g: &GroupElement) -> GroupElement {
        GroupElement {
            residues: g
                .residues
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &n)| (k * a as i64).rem_euclid(n as i64) as usize)
                .collect(),
        }
    }

    pub fn char_mul(&self, a: &Character, b: &Character) -> Character {
        Character { residues: self.add(&self.as_elem(a), &self.as_elem(b)).residues }
    }

    pub fn char_conj(&self, a: &Character) -> Character {
        Character { residues: self.neg(&self.as_elem(a)).residues }
    }

    fn as_elem(&self, a: &Character) -> GroupElement {
        GroupElement { residues: a.residues.clone() }
    }

    /// `Σ p_i g_i / n_i` as a fraction `num / lcm` in `[0, lcm)`.
    pub fn character_exponent(&self, a: &Character, g: &GroupElement) -> (i64, i64) {
        let l = self.lcm();
        let num = a
            .residues
            .iter()
            .zip(&g.residues)
            .zip(&self.moduli)
            .map(|((&p, &x), &n)| (p * x % n) * (l / n))
            .sum::<usize>()
            % l;
        (num as i64, l as i64)
    }

    pub fn character_value(&self, a: &Character, g: &GroupElement) -> Result<C64> {
        if !self.contains_char(a) {
            return Err(Error::GroupMismatch(format!("{a} is not a character of Z{:?}", self.moduli)));
        }
        if !self.contains(g) {
            return Err(Error::GroupMismatch(format!("{g} is not an element of Z{:?}", self.moduli)));
        }
        let (num, den) = self.character_exponent(a, g);
        Ok(root_of_unity(num, den))
    }

    /// Whether `a(g) = 1`.
    pub fn character_trivial_on(&self, a: &Character, g: &GroupElement) -> bool {
        self.character_exponent(a, g).0 == 0
    }

    /// The character whose values match `values[idx] ≈ χ(element_at(idx))`
    /// within `tol`, if any.
    pub fn match_character(&self, values: &[C64], tol: f64) -> Option<Character> {
        let gens = self.generators();
        let mut residues = vec![0; self.rank()];
        for g in &gens {
            let i = g.residues.iter().position(|&r| r == 1).unwrap_or(0);
            let n = self.moduli[i];
            let v = values[self.index_of(g)];
            residues[i] = (0..n).find(|&p| (root_of_unity(p as i64, n as i64) - v).norm() <= tol)?;
        }
        let chi = Character { residues };
        self.elements()
            .iter()
            .all(|g| (root_of_unity_of(self, &chi, g) - values[self.index_of(g)]).norm() <= tol)
            .then_some(chi)
    }
}

fn root_of_unity_of(grp: &FiniteAbelianGroup, a: &Character, g: &GroupElement) -> C64 {
    let (num, den) = grp.character_exponent(a, g);
    root_of_unity(num, den)
}

/// `χ_α(g)`; errors when `α` or `g` does not belong to `group`.
pub fn character_value(group: &FiniteAbelianGroup, alpha: &Character, g: &GroupElement) -> Result<C64> {
    group.character_value(alpha, g)
}
