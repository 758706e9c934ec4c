use super::string::{Length, Probe, StringSpec};
use crate::channel::{Channel, Superop};
use crate::error::{Error, Result};
use crate::group::{projective_center, Cocycle, FiniteAbelianGroup};
use crate::mps::{StateSpectra, SymmetricMps};
use crate::C64;
use serde::{Deserialize, Serialize};

const SUM_TOL: f64 = 1e-8;
const IMAG_TOL: f64 = 1e-10;
const NEG_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IrrepProbabilities {
    pub group: FiniteAbelianGroup,
    /// Indexed like [`FiniteAbelianGroup::characters`], clipped at 0.
    pub p: Vec<f64>,
    pub length: Length,
    /// Largest imaginary part before taking real parts.
    pub max_imag: f64,
    /// `Σ_α p_α` before clipping.
    pub sum: f64,
    /// Some `⟨s(M_g)⟩` hit the gray zone at `N = ∞`.
    pub indeterminate: bool,
}

/// `p_α = (1/|G|) Σ_g χ_α(g) ⟨s(M_g, 1, 1)⟩`.
///
/// Normalisation, reality and nonnegativity are checked, not imposed.
pub fn irrep_probabilities(state: &SymmetricMps, ch: Option<&dyn Channel>, length: Length) -> Result<IrrepProbabilities> {
    irrep_probabilities_with(&Probe::new(state, ch)?, length)
}

/// As [`irrep_probabilities`], reusing the spectra held by `probe`.
pub fn irrep_probabilities_with(probe: &Probe<'_>, length: Length) -> Result<IrrepProbabilities> {
    let state = probe.state();
    let group = state.group().clone();
    let d = state.tensor.physical_dim();
    let els = group.elements();
    let mut s = Vec::with_capacity(els.len());
    let mut indeterminate = false;
    for g in &els {
        let v = probe.string(&StringSpec::bare(g.clone(), d, length)?)?;
        indeterminate |= v.indeterminate;
        s.push(v.value);
    }
    let inv = 1.0 / els.len() as f64;
    let mut p = Vec::with_capacity(els.len());
    let mut max_imag: f64 = 0.0;
    for alpha in group.characters() {
        let mut acc = C64::ZERO;
        for (g, sg) in els.iter().zip(&s) {
            acc += group.character_value(&alpha, g)? * sg;
        }
        acc *= inv;
        max_imag = max_imag.max(acc.im.abs());
        p.push(acc.re);
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::Inconsistent(format!("irrep probabilities sum to {sum}")));
    }
    if max_imag > IMAG_TOL {
        return Err(Error::Inconsistent(format!("irrep probability has imaginary part {max_imag:e}")));
    }
    if let Some(bad) = p.iter().find(|&&x| x < -NEG_TOL) {
        return Err(Error::Inconsistent(format!("negative irrep probability {bad:e}")));
    }
    let p = p.into_iter().map(|x| x.max(0.0)).collect();
    Ok(IrrepProbabilities { group, p, length, max_imag, sum, indeterminate })
}

/// `−Σ_α p_α log2 p_α` in bits.
pub fn inaccessible_entanglement(p: &IrrepProbabilities) -> f64 {
    p.p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

/// `(log2(|G|/|K_ω|), log2|G|)`.
pub fn entanglement_bounds(omega: &Cocycle) -> (f64, f64) {
    let order = omega.group().order() as f64;
    let center = projective_center(omega).len() as f64;
    ((order / center).log2(), order.log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntanglementCheck {
    pub bits: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

impl EntanglementCheck {
    pub fn new(p: &IrrepProbabilities, omega: &Cocycle) -> Self {
        let bits = inaccessible_entanglement(p);
        let (lower, upper) = entanglement_bounds(omega);
        Self { bits, lower, upper, within: bits >= lower - 1e-9 && bits <= upper + 1e-9 }
    }
}

/// `⟨(E^t)†(s)⟩` for `t = 0…steps`, powers taken on the superoperator.
pub fn time_series(state: &SymmetricMps, ch: &dyn Channel, steps: usize, spec: &StringSpec) -> Result<Vec<C64>> {
    if steps == 0 {
        return Err(Error::InvalidParameter("time series needs at least one step".into()));
    }
    let d = state.tensor.physical_dim();
    if ch.dim() != d {
        return Err(Error::Shape(format!("channel acts on d={} but the state has d={d}", ch.dim())));
    }
    let step = ch.superop();
    let mut powers = vec![Superop::identity(d)];
    for t in 0..steps {
        powers.push(Superop { dim: d, mat: &step.mat * &powers[t].mat });
    }
    let mut spectra = Some(StateSpectra::new(state)?);
    let mut out = Vec::with_capacity(steps + 1);
    for power in &powers {
        let probe = Probe::with_channel(spectra.take().expect("restored each step"), Some(power))?;
        out.push(probe.string(spec)?.value);
        spectra = Some(probe.into_spectra());
    }
    Ok(out)
}
