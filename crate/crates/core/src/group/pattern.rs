use super::{Character, Cocycle, Endomorphism, FiniteAbelianGroup, GroupElement};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which string order parameters survive: for every `g`, at most one
/// character `α_g` (the "star"); `None` marks a column with no star.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternOfZeros {
    group: FiniteAbelianGroup,
    /// Indexed by element index, holding a character index.
    stars: Vec<Option<usize>>,
}

impl PatternOfZeros {
    pub fn new(group: &FiniteAbelianGroup, stars: Vec<Option<Character>>) -> Result<Self> {
        if stars.len() != group.order() {
            return Err(Error::GroupMismatch(format!("pattern needs {} columns, got {}", group.order(), stars.len())));
        }
        let stars = stars.iter().map(|s| s.as_ref().map(|a| group.character_index(a))).collect();
        Ok(Self { group: group.clone(), stars })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn star(&self, g: &GroupElement) -> Option<Character> {
        self.stars[self.group.index_of(g)].map(|i| self.group.character_at(i))
    }

    /// Star row index per column (canonical orders on both axes).
    pub fn star_indices(&self) -> &[Option<usize>] {
        &self.stars
    }

    pub fn is_total(&self) -> bool {
        self.stars.iter().all(Option::is_some)
    }

    pub fn empty_columns(&self) -> Vec<GroupElement> {
        self.stars
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| self.group.element_at(i))
            .collect()
    }

    /// Rank of the 0/1 star array, i.e. the number of distinct occupied rows.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<usize> = self.stars.iter().flatten().copied().collect();
        rows.sort_unstable();
        rows.dedup();
        rows.len()
    }

    /// `cells[row][col]`, rows = characters, columns = elements.
    pub fn array(&self) -> Vec<Vec<bool>> {
        let n = self.group.order();
        (0..n).map(|r| (0..n).map(|c| self.stars[c] == Some(r)).collect()).collect()
    }
}

/// `α_g` with `χ_{α_g}(h) = ω(h,g)/ω(g,h)`; for `g = (w,x)` this is the
/// character `(−k x, k w)`.
pub fn pattern_of_zeros(omega: &Cocycle) -> PatternOfZeros {
    let g = omega.group();
    let k = omega.k() as i64;
    let stars = g
        .elements()
        .iter()
        .map(|e| {
            let (w, x) = (e.residues()[0] as i64, e.residues()[1] as i64);
            Some(g.character(&[-k * x, k * w]).expect("square group"))
        })
        .collect();
    PatternOfZeros::new(g, stars).expect("sizes match")
}

/// The pattern of `σ*ω`: the star of column `g` is `σ*β` where `β` is the
/// star of column `σ(g)`.
pub fn transform_pattern(sigma: &Endomorphism, zeta: &PatternOfZeros) -> Result<PatternOfZeros> {
    let g = sigma.group();
    if g != zeta.group() {
        return Err(Error::GroupMismatch("endomorphism and pattern live on different groups".into()));
    }
    let stars = g
        .elements()
        .iter()
        .map(|e| {
            let image = sigma.apply(e);
            let beta = zeta
                .star(&image)
                .ok_or_else(|| Error::NotSptPattern(format!("column {image} has no star")))?;
            Ok(Some(sigma.pull_character(&beta)))
        })
        .collect::<Result<Vec<_>>>()?;
    PatternOfZeros::new(g, stars)
}

/// Recovers the index `k` of a valid pattern on `Z_n × Z_n`.
///
/// Valid means: every column has a star, `g ↦ α_g` is a homomorphism, and
/// `α_g(g) = 1` for all `g` (the alternating property every commutator
/// bicharacter has).
pub fn invariant_from_pattern(zeta: &PatternOfZeros) -> Result<usize> {
    let g = zeta.group();
    let n = g.require_square()?;
    let els = g.elements();
    let star = |e: &GroupElement| {
        zeta.star(e).ok_or_else(|| Error::NotSptPattern(format!("column {e} has no star")))
    };
    for e in &els {
        star(e)?;
    }
    for a in &els {
        let sa = star(a)?;
        if !g.character_trivial_on(&sa, a) {
            return Err(Error::NotSptPattern(format!("star of {a} is nontrivial on {a} itself")));
        }
        for b in &els {
            if star(&g.add(a, b))? != g.char_mul(&sa, &star(b)?) {
                return Err(Error::NotSptPattern(format!("columns {a}, {b} violate the homomorphism property")));
            }
        }
    }
    let k = star(&g.element(&[1, 0])?)?.residues()[1];
    let omega = Cocycle::new(g, k as i64)?;
    if &pattern_of_zeros(&omega) != zeta {
        return Err(Error::NotSptPattern("pattern is not of the form zeta_k".into()));
    }
    debug_assert!(k < n);
    Ok(k)
}
