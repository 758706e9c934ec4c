use super::dense;
use super::rep::{spin1_z2z2, OnsiteRep};
use super::tensor::{canonical_boundaries, canonicalize, is_injective, transfer_operator, Boundaries, MpsTensor};
use crate::error::{Error, Result};
use crate::group::{commutator_phase, complexity, Cocycle, FiniteAbelianGroup, GroupElement};
use crate::linalg::{self, c, cr, leading_eigs, unvec_rm, Leading};
use std::cell::OnceCell;
use crate::{CMat, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// An MPS tensor together with the onsite symmetry it is meant to carry.
#[derive(Clone, Debug)]
pub struct SymmetricMps {
    pub tensor: MpsTensor,
    pub rep: OnsiteRep,
    /// Class the state was generated in, when known.
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl SymmetricMps {
    pub fn new(tensor: MpsTensor, rep: OnsiteRep) -> Result<Self> {
        if tensor.physical_dim() != rep.dim() {
            return Err(Error::Shape(format!(
                "tensor has physical dimension {} but the rep acts on {}",
                tensor.physical_dim(),
                rep.dim()
            )));
        }
        Ok(Self { tensor, rep, k: None, seed: None })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.rep.group()
    }
}

/// The virtual (projective) action `V_g` of the symmetry on the bond.
#[derive(Clone, Debug)]
pub struct VirtualRep {
    pub group: FiniteAbelianGroup,
    pub mats: Vec<CMat>,
    /// `φ_g` in `Σ_j (U_g)_ij A^j = e^{iφ_g} V_g A^i V_g†`.
    pub phases: Vec<f64>,
    /// `[g][h]`: phase of `V_g V_h V_g† V_h†`.
    pub commutator_table: Vec<Vec<C64>>,
    /// Largest residual of the defining relation over all `g` and `i`.
    pub residual: f64,
}

impl VirtualRep {
    pub fn get(&self, g: &GroupElement) -> &CMat {
        &self.mats[self.group.index_of(g)]
    }

    /// The `k` with `commutator_table = commutator_phase(ω_k, ·, ·)` within
    /// `tol`, when the group is `Z_n × Z_n`.
    pub fn matched_k(&self, tol: f64) -> Option<usize> {
        let n = self.group.square_modulus()?;
        let els = self.group.elements();
        (0..n).find(|&k| {
            let w = Cocycle::new(&self.group, k as i64).expect("square group");
            els.iter().enumerate().all(|(i, g)| {
                els.iter().enumerate().all(|(j, h)| {
                    (commutator_phase(&w, g, h).expect("same group") - self.commutator_table[i][j]).norm() <= tol
                })
            })
        })
    }
}

pub const SYMMETRY_MODULUS_TOL: f64 = 1e-8;
pub const FUNDAMENTAL_RESIDUAL: f64 = 1e-8;

/// AKLT state with `A⁺ = √(2/3) σ⁺`, `A⁰ = −√(1/3) σ_z`, `A⁻ = −√(2/3) σ⁻`
/// and the `Z_2 × Z_2` π-rotation symmetry.
pub fn aklt() -> SymmetricMps {
    let p = (2.0f64 / 3.0).sqrt();
    let q = (1.0f64 / 3.0).sqrt();
    let z = C64::ZERO;
    let a_plus = linalg::from_rows(&[vec![z, cr(p)], vec![z, z]]);
    let a_zero = linalg::from_rows(&[vec![cr(-q), z], vec![z, cr(q)]]);
    let a_minus = linalg::from_rows(&[vec![z, z], vec![cr(-p), z]]);
    let tensor = MpsTensor::new(vec![a_plus, a_zero, a_minus]).expect("valid shapes");
    let mut s = SymmetricMps::new(tensor, spin1_z2z2()).expect("dims match");
    s.k = Some(1);
    s
}

/// The projective representation used on the bond of generated states: its
/// commutator phases equal `commutator_phase(ω_k, ·, ·)`.
///
/// With `D` a multiple of `|G|` this is the regular projective
/// representation (for the cocycle `ω_{−k}`, which gives exactly those
/// phases) tensored with an identity; otherwise it is the irreducible
/// clock-and-shift representation of dimension `D_ω` tensored with an
/// identity.
pub fn virtual_rep_of_class(group: &FiniteAbelianGroup, k: usize, bond: usize) -> Result<Vec<CMat>> {
    let n = group.require_square()?;
    let order = group.order();
    let omega = Cocycle::new(group, k as i64)?;
    let m = complexity(&omega) as usize;
    let els = group.elements();
    if bond % order == 0 {
        let inv = Cocycle::new(group, -(k as i64))?;
        let pad = linalg::eye(bond / order);
        return Ok(els
            .iter()
            .map(|g| {
                let mut v = CMat::zeros(order, order);
                for h in &els {
                    let w = crate::group::cocycle_value(&inv, g, h).expect("same group");
                    v[(group.index_of(&group.add(g, h)), group.index_of(h))] = w;
                }
                linalg::kron(&pad, &v)
            })
            .collect());
    }
    if bond % m != 0 {
        return Err(Error::IncompatibleBond { bond, k, required: m });
    }
    let kp = k / crate::group::gcd_i(k as i64, n as i64).max(1) as usize;
    let s = (m as i64 - (kp % m) as i64) % m as i64;
    let shift = CMat::from_fn(m, m, |i, j| if i == (j + 1) % m { cr(1.0) } else { C64::ZERO });
    let clock = linalg::diag(&(0..m).map(|j| linalg::root_of_unity(j as i64, m as i64)).collect::<Vec<_>>());
    let pad = linalg::eye(bond / m);
    Ok(els
        .iter()
        .map(|g| {
            let (w, x) = (g.residues()[0] as u64, g.residues()[1] as u64);
            let v = linalg::mat_pow(&shift, w) * linalg::mat_pow(&clock, (s as u64) * x);
            linalg::kron(&pad, &v)
        })
        .collect())
}

pub const MAX_RETRIES: usize = 32;

/// Random injective canonical MPS on `Z_n × Z_n` with a regular physical
/// representation (`d` a multiple of `|G|`) and virtual class `k`.
pub fn random_symmetric_mps(group: &FiniteAbelianGroup, k: usize, bond: usize, d: usize, seed: u64) -> Result<SymmetricMps> {
    let n = group.require_square()?;
    let k = k % n;
    let rep = OnsiteRep::regular_diagonal(group, d)?;
    let vs = virtual_rep_of_class(group, k, bond)?;
    let els = group.elements();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = move || -> C64 {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    };
    for _ in 0..MAX_RETRIES {
        let raw = MpsTensor::new((0..d).map(|_| CMat::from_fn(bond, bond, |_, _| gauss())).collect())?;
        // group average of A^i ↦ Σ_j (U_g†)_ij V_g A^j V_g†
        let mut acc: Vec<CMat> = vec![CMat::zeros(bond, bond); d];
        for (g, v) in els.iter().zip(&vs) {
            let moved = raw.apply_physical(&linalg::dag(rep.get(g)))?;
            for (slot, a) in acc.iter_mut().zip(moved.mats()) {
                *slot += v * a * v.adjoint();
            }
        }
        let inv = cr(1.0 / els.len() as f64);
        let projected = MpsTensor::new(acc.iter().map(|a| linalg::scale(inv, a)).collect())?;
        let tensor = match canonicalize(&projected) {
            Ok(t) => t,
            Err(Error::NotInjective(_)) => continue,
            Err(e) => return Err(e),
        };
        let residual = fundamental_residual(&tensor, &rep, &vs, &vec![0.0; els.len()]);
        if residual > FUNDAMENTAL_RESIDUAL {
            return Err(Error::Inconsistent(format!("generated state violates the symmetry relation by {residual:e}")));
        }
        let mut state = SymmetricMps::new(tensor, rep)?;
        state.k = Some(k);
        state.seed = Some(seed);
        return Ok(state);
    }
    Err(Error::GenerationFailed { retries: MAX_RETRIES, seed })
}

fn fundamental_residual(a: &MpsTensor, rep: &OnsiteRep, vs: &[CMat], phases: &[f64]) -> f64 {
    let g = rep.group();
    let mut worst: f64 = 0.0;
    for (idx, (v, &phi)) in vs.iter().zip(phases).enumerate() {
        let lhs = a.apply_physical(rep.get(&g.element_at(idx))).expect("dims checked");
        let e = C64::from_polar(1.0, phi);
        for (l, ai) in lhs.mats().iter().zip(a.mats()) {
            let rhs = linalg::scale(e, &(v * ai * v.adjoint()));
            worst = worst.max(linalg::max_diff(l, &rhs));
        }
    }
    worst
}

/// Canonical boundaries of a state plus a lazily filled cache of the leading
/// eigenpairs of `T_{U_h}` for every group element.
pub struct StateSpectra<'a> {
    pub state: &'a SymmetricMps,
    pub bounds: Boundaries,
    transfers: Vec<OnceCell<CMat>>,
    symmetric: Vec<OnceCell<std::result::Result<Leading, String>>>,
}

impl<'a> StateSpectra<'a> {
    pub fn new(state: &'a SymmetricMps) -> Result<Self> {
        let bounds = canonical_boundaries(&state.tensor)?;
        let order = state.group().order();
        let transfers = (0..order).map(|_| OnceCell::new()).collect();
        let symmetric = (0..order).map(|_| OnceCell::new()).collect();
        Ok(Self { state, bounds, transfers, symmetric })
    }

    /// `T_{U_h}`, built once.
    pub fn symmetry_transfer(&self, h: &GroupElement) -> &CMat {
        let idx = self.state.group().index_of(h);
        self.transfers[idx]
            .get_or_init(|| transfer_operator(&self.state.tensor, self.state.rep.get(h)).expect("rep matches the tensor"))
    }

    /// Leading eigenpair of `T_{U_h}`.
    ///
    /// `T_U` is a contraction for canonical tensors, so an eigenvalue of
    /// modulus 1 found by power iteration is leading; when the state is
    /// symmetric under `h`, `T_{U_h}` is similar to `e^{iφ} T` and shares its
    /// second modulus. Anything else falls back to the dense solver.
    pub fn symmetry_leading(&self, h: &GroupElement) -> Result<&Leading> {
        let idx = self.state.group().index_of(h);
        let cell = self.symmetric[idx].get_or_init(|| {
            let t = self.symmetry_transfer(h);
            let second = self.bounds.second_modulus;
            let iters = if second < 1e-3 { 64 } else { ((40.0 / -second.ln()).ceil() as usize).clamp(64, 4000) };
            match linalg::unimodular_leading(t, second, iters) {
                Some(l) => Ok(l),
                None => leading_eigs(t).map_err(|e| e.to_string()),
            }
        });
        cell.as_ref().map_err(|e| Error::Numerical(e.clone()))
    }

    /// `V_h` (unitary, first nonzero entry real positive) and `φ_h`.
    pub fn virtual_matrix(&self, h: &GroupElement) -> Result<(CMat, f64)> {
        let lead = self.symmetry_leading(h)?;
        if lead.modulus() < 1.0 - SYMMETRY_MODULUS_TOL {
            return Err(Error::NotSymmetric { element: h.to_string(), modulus: lead.modulus() });
        }
        if lead.degenerate {
            return Err(Error::Degenerate { gap: lead.gap() });
        }
        let bond = self.state.tensor.bond_dim();
        // the right eigenvector is vec(V_h ρ_R)
        let r = unvec_rm(&lead.right, bond, bond);
        let v = r * linalg::inverse(&self.bounds.rho_r)?;
        let norm = (linalg::trace(&(v.adjoint() * &v)).re / bond as f64).sqrt();
        let mut v = linalg::scale(cr(1.0 / norm), &v);
        let big = v.norm_max();
        'outer: for i in 0..bond {
            for j in 0..bond {
                let z = v[(i, j)];
                if z.norm() > 1e-8 * big {
                    v = linalg::scale(z.conj() / z.norm(), &v);
                    break 'outer;
                }
            }
        }
        Ok((v, lead.value.arg()))
    }
}

/// `V_g` and `φ_g` for one element, from the leading eigenvector of `T_{U_g}`.
pub fn virtual_matrix(state: &SymmetricMps, g: &GroupElement) -> Result<(CMat, f64)> {
    StateSpectra::new(state)?.virtual_matrix(g)
}

/// Extracts `V_g`, `φ_g` and the commutator table from a canonical state.
pub fn extract_virtual_rep(state: &SymmetricMps) -> Result<VirtualRep> {
    extract_with(&StateSpectra::new(state)?)
}

pub fn extract_with(spectra: &StateSpectra<'_>) -> Result<VirtualRep> {
    let state = spectra.state;
    let group = state.group().clone();
    let els = group.elements();
    let mut mats = Vec::with_capacity(els.len());
    let mut phases = Vec::with_capacity(els.len());
    for g in &els {
        let (v, phi) = spectra.virtual_matrix(g)?;
        let defect = linalg::unitarity_defect(&v);
        if defect > 1e-8 {
            return Err(Error::Numerical(format!("V_{g} is not unitary (defect {defect:e})")));
        }
        mats.push(v);
        phases.push(phi);
    }
    let residual = fundamental_residual(&state.tensor, &state.rep, &mats, &phases);
    if residual > FUNDAMENTAL_RESIDUAL {
        return Err(Error::Numerical(format!("symmetry relation residual {residual:e} exceeds {FUNDAMENTAL_RESIDUAL:e}")));
    }
    let bond = state.tensor.bond_dim() as f64;
    let commutator_table = mats
        .iter()
        .map(|vg| {
            mats.iter()
                .map(|vh| {
                    let tr = linalg::trace(&(vg * vh * vg.adjoint() * vh.adjoint())) / bond;
                    tr / tr.norm()
                })
                .collect()
        })
        .collect();
    Ok(VirtualRep { group, mats, phases, commutator_table, residual })
}

/// Applies one Kraus operator on every site, `B^i = Σ_j K_ij A^j`, and
/// re-canonicalises. Refuses non-injective results.
pub fn apply_kraus_trajectory(state: &SymmetricMps, k: &CMat) -> Result<SymmetricMps> {
    if k.norm_max() == 0.0 {
        return Err(Error::InvalidParameter("Kraus operator is zero".into()));
    }
    let b = state.tensor.apply_physical(k)?;
    if !is_injective(&b) {
        return Err(Error::NotInjective("trajectory tensor is not injective".into()));
    }
    let mut out = SymmetricMps::new(canonicalize(&b)?, state.rep.clone())?;
    out.k = state.k;
    out.seed = state.seed;
    Ok(out)
}

/// `⟨ψ_h| U_g^{⊗L} |ψ_h⟩ / ⟨ψ_h|ψ_h⟩` for the closed chain with `V_h`
/// inserted on one bond.
pub fn twisted_sector_charge(state: &SymmetricMps, h: &GroupElement, g: &GroupElement, len: usize) -> Result<C64> {
    if len < 2 {
        return Err(Error::InvalidParameter("chain length must be at least 2".into()));
    }
    let d = state.tensor.physical_dim();
    dense::checked_size(d, len)?;
    let (vh, _) = virtual_matrix(state, h)?;
    let psi = dense::amplitudes(state.tensor.mats(), &vh, len)?;
    let norm = linalg::inner(&psi, &psi).re;
    if norm < 1e-12 {
        return Err(Error::EmptySector(norm));
    }
    let ug = state.rep.get(g);
    let mut phi = psi.clone();
    for site in 0..len {
        phi = dense::apply_site(&phi, d, len, site, ug);
    }
    Ok(linalg::inner(&psi, &phi) / norm)
}
