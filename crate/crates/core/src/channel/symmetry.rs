use super::kraus::Channel;
use crate::error::{Error, Result};
use crate::group::{Character, Endomorphism, FiniteAbelianGroup, GroupElement};
use crate::linalg::{self, cr};
use crate::mps::OnsiteRep;
use crate::{CMat, C64};
use serde::{Deserialize, Serialize};

/// Thresholds used by the classification routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Superoperator commutation and proportionality, max-norm.
    pub commutation: f64,
    /// `||c| − 1|` for the phases `c_g`.
    pub phase: f64,
    /// Block norms at or below this count as absent.
    pub generic_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { commutation: 1e-10, phase: 1e-10, generic_floor: 1e-12 }
    }
}

/// `θ(g)` in `(−π, π]`, indexed like the group elements.
#[derive(Clone, Debug)]
pub struct PhaseMap {
    pub group: FiniteAbelianGroup,
    pub theta: Vec<f64>,
}

impl PhaseMap {
    pub fn get(&self, g: &GroupElement) -> f64 {
        self.theta[self.group.index_of(g)]
    }

    fn values(&self) -> Vec<C64> {
        self.theta.iter().map(|t| C64::from_polar(1.0, *t)).collect()
    }

    /// `e^{iθ(g)} e^{iθ(h)} = e^{iθ(g+h)}` on every pair.
    pub fn is_character(&self, tol: f64) -> bool {
        let v = self.values();
        let els = self.group.elements();
        els.iter().all(|g| {
            els.iter().all(|h| {
                let gh = self.group.index_of(&self.group.add(g, h));
                (v[self.group.index_of(g)] * v[self.group.index_of(h)] - v[gh]).norm() <= tol
            })
        })
    }

    pub fn as_character(&self, tol: f64) -> Option<Character> {
        self.group.match_character(&self.values(), tol)
    }

    pub fn is_trivial(&self, tol: f64) -> bool {
        self.theta.iter().all(|t| t.abs() <= tol)
    }
}

/// `E†(U_g) = e^{iθ(g)} U_{σ(g)}`.
#[derive(Clone, Debug)]
pub struct Twist {
    pub sigma: Endomorphism,
    pub theta: PhaseMap,
}

/// Which operator-space sectors survive the channel.
#[derive(Clone, Debug)]
pub struct Genericness {
    /// Input sectors `β` with a nonzero block into some `α` with `σ*α = β`.
    pub present: Vec<Character>,
    /// The image of `σ*`.
    pub required: Vec<Character>,
    pub generic: bool,
    /// `[out][in]` max-norm of the Liouville block between sectors, indexed by
    /// canonical character index.
    pub block_norms: Vec<Vec<f64>>,
    /// Largest block outside the pattern allowed by `σ`.
    pub leakage: f64,
}

#[derive(Clone, Debug)]
pub struct SymmetryReport {
    pub weak: bool,
    pub strong: Option<PhaseMap>,
    pub twist: Option<Twist>,
    /// Relative to the detected twist, or to the identity for weak-only channels.
    pub genericness: Option<Genericness>,
    pub notes: Vec<String>,
    pub tolerances: Tolerances,
}

impl SymmetryReport {
    pub fn generic_irreps(&self) -> Vec<Character> {
        self.genericness.as_ref().map(|g| g.present.clone()).unwrap_or_default()
    }
}

fn check_dims<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep) -> Result<()> {
    if ch.dim() != rep.dim() {
        return Err(Error::Shape(format!("channel acts on d={} but the rep on d={}", ch.dim(), rep.dim())));
    }
    Ok(())
}

/// `c = Tr(U† M)/d` when `M = c U` with `|c| = 1`.
fn proportional_phase(m: &CMat, u: &CMat, tol: &Tolerances) -> Option<C64> {
    let d = u.nrows() as f64;
    let c = linalg::trace(&(u.adjoint() * m)) / d;
    let ok = linalg::max_diff(m, &linalg::scale(c, u)) <= tol.commutation && (c.norm() - 1.0).abs() <= tol.phase;
    ok.then_some(c)
}

pub fn is_weakly_symmetric<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep) -> Result<bool> {
    is_weakly_symmetric_with(ch, rep, &Tolerances::default())
}

/// `L (U_g ⊗ conj U_g) = (U_g ⊗ conj U_g) L` for every `g`.
pub fn is_weakly_symmetric_with<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, tol: &Tolerances) -> Result<bool> {
    check_dims(ch, rep)?;
    let l = ch.superop().mat;
    for u in rep.mats() {
        let s = linalg::kron(u, &linalg::conj(u));
        if linalg::max_diff(&(&l * &s), &(&s * &l)) > tol.commutation {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_strongly_symmetric<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep) -> Result<Option<PhaseMap>> {
    is_strongly_symmetric_with(ch, rep, &Tolerances::default())
}

/// `E†(U_g) = e^{iθ(g)} U_g` for every `g`.
pub fn is_strongly_symmetric_with<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, tol: &Tolerances) -> Result<Option<PhaseMap>> {
    check_dims(ch, rep)?;
    let mut theta = Vec::with_capacity(rep.mats().len());
    for u in rep.mats() {
        match proportional_phase(&ch.dual_apply(u), u, tol) {
            Some(c) => theta.push(c.arg()),
            None => return Ok(None),
        }
    }
    Ok(Some(PhaseMap { group: rep.group().clone(), theta }))
}

pub fn detect_twist<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep) -> Result<Option<Twist>> {
    detect_twist_with(ch, rep, &Tolerances::default())
}

/// Searches `E†(U_e_j) = c U_h` over all `h` for each unit vector `e_j`,
/// extends to `σ` and verifies the relation on the whole group.
///
/// Two matching `h` for one generator is an [`Error::AmbiguousTwist`].
pub fn detect_twist_with<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, tol: &Tolerances) -> Result<Option<Twist>> {
    check_dims(ch, rep)?;
    let group = rep.group();
    let els = group.elements();
    let mut images = Vec::with_capacity(group.rank());
    for j in 0..group.rank() {
        let mut unit = vec![0i64; group.rank()];
        unit[j] = 1;
        let gen = group.element(&unit)?;
        let m = ch.dual_apply(rep.get(&gen));
        let mut found: Option<&GroupElement> = None;
        for h in &els {
            if proportional_phase(&m, rep.get(h), tol).is_some() {
                if let Some(first) = found {
                    return Err(Error::AmbiguousTwist { generator: gen.to_string(), first: first.to_string(), second: h.to_string() });
                }
                found = Some(h);
            }
        }
        match found {
            Some(h) => images.push(h.clone()),
            None => return Ok(None),
        }
    }
    let Ok(sigma) = Endomorphism::from_generator_images(group, &images) else {
        return Ok(None);
    };
    if !sigma.is_homomorphism() {
        return Ok(None);
    }
    let mut theta = Vec::with_capacity(els.len());
    for g in &els {
        let m = ch.dual_apply(rep.get(g));
        match proportional_phase(&m, rep.get(&sigma.apply(g)), tol) {
            Some(c) => theta.push(c.arg()),
            None => return Ok(None),
        }
    }
    Ok(Some(Twist { sigma, theta: PhaseMap { group: group.clone(), theta } }))
}

/// Orthonormal joint eigenvectors of the rep, `U_g u = χ(g) u`, grouped by
/// character in canonical order.
pub fn joint_eigenbasis(rep: &OnsiteRep) -> Result<Vec<(Character, Vec<C64>)>> {
    let group = rep.group();
    let d = rep.dim();
    let els = group.elements();
    let mut out = Vec::with_capacity(d);
    for chi in group.characters() {
        let mut q = CMat::zeros(d, d);
        for h in &els {
            q += linalg::scale(group.character_value(&chi, h)?.conj(), rep.get(h));
        }
        let q = linalg::scale(cr(0.5 / els.len() as f64), &(&q + q.adjoint()));
        let (vals, vecs) = linalg::eigh(&q)?;
        for (k, v) in vals.iter().enumerate() {
            if *v > 0.5 {
                out.push((chi.clone(), (0..d).map(|i| vecs[(i, k)]).collect()));
            }
        }
    }
    if out.len() != d {
        return Err(Error::Numerical(format!("joint eigenbasis has {} vectors for d={d}", out.len())));
    }
    Ok(out)
}

pub fn genericness<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, sigma: &Endomorphism) -> Result<Genericness> {
    genericness_with(ch, rep, sigma, &Tolerances::default())
}

/// Block structure of the Liouville matrix in the basis of matrix units
/// `|u_a⟩⟨u_b|` built from joint eigenvectors (sector `conj(χ_a) χ_b`).
///
/// Under a `σ`-twisted symmetry the block from input sector `β` can only land
/// in sectors `α` with `σ*α = β`; `β` is present when one of those blocks is
/// nonzero.
pub fn genericness_with<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, sigma: &Endomorphism, tol: &Tolerances) -> Result<Genericness> {
    check_dims(ch, rep)?;
    let group = rep.group();
    if sigma.group() != group {
        return Err(Error::GroupMismatch("twist and rep belong to different groups".into()));
    }
    let d = rep.dim();
    let basis = joint_eigenbasis(rep)?;
    let mut b = CMat::zeros(d * d, d * d);
    let mut sector = Vec::with_capacity(d * d);
    for (a, (chi_a, ua)) in basis.iter().enumerate() {
        for (bb, (chi_b, ub)) in basis.iter().enumerate() {
            let col = a * d + bb;
            for p in 0..d {
                for q in 0..d {
                    b[(p * d + q, col)] = ua[p] * ub[q].conj();
                }
            }
            sector.push(group.character_index(&group.char_mul(&group.char_conj(chi_a), chi_b)));
        }
    }
    let l = ch.superop().mat;
    let lb = b.adjoint() * l * &b;
    let order = group.order();
    let mut norms = vec![vec![0.0f64; order]; order];
    for r in 0..d * d {
        for s in 0..d * d {
            let v = lb[(r, s)].norm();
            let cell = &mut norms[sector[r]][sector[s]];
            if v > *cell {
                *cell = v;
            }
        }
    }
    let chars = group.characters();
    let pulled: Vec<usize> = chars.iter().map(|a| group.character_index(&sigma.pull_character(a))).collect();
    let mut required: Vec<usize> = pulled.clone();
    required.sort_unstable();
    required.dedup();
    let mut present = Vec::new();
    let mut leakage = 0.0f64;
    for beta in 0..order {
        let mut best = 0.0f64;
        for alpha in 0..order {
            if pulled[alpha] == beta {
                best = best.max(norms[alpha][beta]);
            } else {
                leakage = leakage.max(norms[alpha][beta]);
            }
        }
        if best > tol.generic_floor {
            present.push(beta);
        }
    }
    let generic = required.iter().all(|r| present.contains(r));
    Ok(Genericness {
        present: present.iter().map(|&i| chars[i].clone()).collect(),
        required: required.iter().map(|&i| chars[i].clone()).collect(),
        generic,
        block_norms: norms,
        leakage,
    })
}

pub fn classify<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep) -> Result<SymmetryReport> {
    classify_with(ch, rep, &Tolerances::default())
}

/// Weak and strong symmetry, twist and genericness in one report.
pub fn classify_with<C: Channel + ?Sized>(ch: &C, rep: &OnsiteRep, tol: &Tolerances) -> Result<SymmetryReport> {
    let mut notes = Vec::new();
    let weak = is_weakly_symmetric_with(ch, rep, tol)?;
    let strong = is_strongly_symmetric_with(ch, rep, tol)?;
    let twist = if let Some(theta) = &strong {
        Some(Twist { sigma: Endomorphism::identity(rep.group()), theta: theta.clone() })
    } else {
        match detect_twist_with(ch, rep, tol) {
            Ok(t) => t,
            Err(e @ Error::AmbiguousTwist { .. }) => {
                notes.push(e.to_string());
                None
            }
            Err(e) => return Err(e),
        }
    };
    if let Some(theta) = &strong {
        if !theta.is_character(1e-8) {
            notes.push("strong-symmetry phases do not form a character".into());
        }
    }
    let genericness = match (&twist, weak) {
        (Some(t), _) => Some(genericness_with(ch, rep, &t.sigma, tol)?),
        (None, true) => Some(genericness_with(ch, rep, &Endomorphism::identity(rep.group()), tol)?),
        (None, false) => None,
    };
    Ok(SymmetryReport { weak, strong, twist, genericness, notes, tolerances: *tol })
}
