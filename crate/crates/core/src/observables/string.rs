use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::group::{FiniteAbelianGroup, GroupElement};
use crate::linalg::{self, Leading};
use crate::mps::{leading_eigs, spin1, spin1_pi_rotations, transfer_operator, StateSpectra, SymmetricMps};
use crate::{CMat, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Leading moduli within this distance of 1 count as unimodular.
pub const UNIMODULAR_TOL: f64 = 1e-10;
/// Leading moduli further than this below 1 decay to exactly 0 at `N = ∞`.
pub const GRAY_ZONE: f64 = 1e-8;

/// Tolerance for recognising `E†(U_g)` as a multiple of some `U_h`.
const PROPORTIONAL_TOL: f64 = 1e-10;

/// Number of bulk sites carrying `U_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Length {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Length::Finite(n) => write!(f, "{n}"),
            Length::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Length {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Length::Infinite),
            t => t
                .parse::<usize>()
                .map(Length::Finite)
                .map_err(|_| Error::InvalidParameter(format!("length must be a positive integer or 'inf', got '{s}'"))),
        }
    }
}

/// `s(g, O^l, O^r)`: `O^l`, then `U_g` on `N` sites, then `O^r`.
#[derive(Clone, Debug)]
pub struct StringSpec {
    pub g: GroupElement,
    pub left: CMat,
    pub right: CMat,
    pub length: Length,
}

impl StringSpec {
    pub fn new(g: GroupElement, left: CMat, right: CMat, length: Length) -> Result<Self> {
        if let Length::Finite(n) = length {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("finite string length must be at least 2, got {n}")));
            }
        }
        Ok(Self { g, left, right, length })
    }

    /// Identity ends.
    pub fn bare(g: GroupElement, d: usize, length: Length) -> Result<Self> {
        Self::new(g, linalg::eye(d), linalg::eye(d), length)
    }

    fn check(&self, group: &FiniteAbelianGroup, d: usize) -> Result<()> {
        if !group.contains(&self.g) {
            return Err(Error::GroupMismatch(format!("bulk element {} is not in the state's group", self.g)));
        }
        for (name, m) in [("left", &self.left), ("right", &self.right)] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::Shape(format!("{name} end must be {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StringValue {
    pub value: C64,
    /// Leading modulus of the bulk transfer operator (`N = ∞` only).
    pub modulus: Option<f64>,
    /// The modulus fell in the gray zone `[1 − 1e-8, 1 − 1e-10)`.
    pub indeterminate: bool,
}

/// A state, an optional channel, and the cached spectra needed to contract
/// strings on it.
pub struct Probe<'a> {
    pub spectra: StateSpectra<'a>,
    channel: Option<&'a dyn Channel>,
}

impl<'a> Probe<'a> {
    pub fn new(state: &'a SymmetricMps, channel: Option<&'a dyn Channel>) -> Result<Self> {
        if let Some(ch) = channel {
            if ch.dim() != state.tensor.physical_dim() {
                return Err(Error::Shape(format!(
                    "channel acts on d={} but the state has d={}",
                    ch.dim(),
                    state.tensor.physical_dim()
                )));
            }
        }
        Ok(Self { spectra: StateSpectra::new(state)?, channel })
    }

    /// Reuses already computed spectra with another channel.
    pub fn with_channel(spectra: StateSpectra<'a>, channel: Option<&'a dyn Channel>) -> Result<Self> {
        let state = spectra.state;
        if let Some(ch) = channel {
            if ch.dim() != state.tensor.physical_dim() {
                return Err(Error::Shape(format!("channel acts on d={} but the state has d={}", ch.dim(), state.tensor.physical_dim())));
            }
        }
        Ok(Self { spectra, channel })
    }

    pub fn into_spectra(self) -> StateSpectra<'a> {
        self.spectra
    }

    pub fn state(&self) -> &'a SymmetricMps {
        self.spectra.state
    }

    pub fn channel(&self) -> Option<&'a dyn Channel> {
        self.channel
    }

    /// `E†(X)`, or `X` without a channel.
    pub fn heisenberg(&self, x: &CMat) -> CMat {
        match self.channel {
            Some(ch) => ch.dual_apply(x),
            None => x.clone(),
        }
    }

    /// `E(X)`, or `X` without a channel.
    pub fn schrodinger(&self, x: &CMat) -> CMat {
        match self.channel {
            Some(ch) => ch.apply(x),
            None => x.clone(),
        }
    }

    /// `M_g = E†(U_g)`.
    pub fn bulk(&self, g: &GroupElement) -> CMat {
        self.heisenberg(self.state().rep.get(g))
    }

    /// `Some((h, c))` when `m = c U_h`.
    pub fn as_symmetry(&self, m: &CMat) -> Option<(GroupElement, C64)> {
        let rep = &self.state().rep;
        let d = rep.dim() as f64;
        let scale = m.norm_max().max(1.0);
        for h in rep.group().elements() {
            let u = rep.get(&h);
            let mut c = C64::ZERO;
            for i in 0..u.nrows() {
                for j in 0..u.ncols() {
                    c += u[(i, j)].conj() * m[(i, j)];
                }
            }
            c /= d;
            if linalg::max_diff(m, &linalg::scale(c, u)) <= PROPORTIONAL_TOL * scale {
                return Some((h, c));
            }
        }
        None
    }

    /// Leading eigenpair of `T_m`, through the symmetry cache when possible.
    pub fn bulk_leading(&self, m: &CMat) -> Result<Leading> {
        if let Some((h, c)) = self.as_symmetry(m) {
            let mut lead = self.spectra.symmetry_leading(&h)?.clone();
            if c.norm() == 0.0 {
                lead.value = C64::ZERO;
                lead.second_modulus = 0.0;
                return Ok(lead);
            }
            lead.value *= c;
            lead.second_modulus *= c.norm();
            return Ok(lead);
        }
        leading_eigs(&transfer_operator(&self.state().tensor, m)?)
    }

    /// `Σ_ij X_ij A^j R A^{i†}`, the action of `T_X` on `vec(R)`.
    pub fn push_right(&self, x: &CMat, r: &CMat) -> CMat {
        self.push_mixed(&self.mixed(x), r)
    }

    /// `B_i = Σ_j X_ij A^j` stacked vertically, next to the stacked `A^{i†}`.
    fn mixed(&self, x: &CMat) -> Mixed {
        let a = self.state().tensor.mats();
        let bond = self.state().tensor.bond_dim();
        let d = a.len();
        let mut b = CMat::zeros(d * bond, bond);
        let mut a_dag = CMat::zeros(d * bond, bond);
        for i in 0..d {
            for (j, aj) in a.iter().enumerate() {
                let x_ij = x[(i, j)];
                if x_ij != C64::ZERO {
                    for q in 0..bond {
                        for p in 0..bond {
                            b[(i * bond + p, q)] += x_ij * aj[(p, q)];
                        }
                    }
                }
            }
            for q in 0..bond {
                for p in 0..bond {
                    a_dag[(i * bond + p, q)] = a[i][(q, p)].conj();
                }
            }
        }
        Mixed { b, a_dag, bond }
    }

    fn push_mixed(&self, m: &Mixed, r: &CMat) -> CMat {
        let bond = m.bond;
        let d = m.b.nrows() / bond;
        let x = &m.b * r;
        let wide = CMat::from_fn(bond, d * bond, |p, col| x[((col / bond) * bond + p, col % bond)]);
        wide * &m.a_dag
    }

    /// Contracts a string whose site operators are already in their final
    /// (Heisenberg) form.
    pub fn contract(&self, m: &CMat, left: &CMat, right: &CMat, length: Length) -> Result<StringValue> {
        let bounds = &self.spectra.bounds;
        match length {
            Length::Finite(n) => {
                let mut r = self.push_right(right, &bounds.rho_r);
                let bulk = self.mixed(m);
                for _ in 0..n {
                    r = self.push_mixed(&bulk, &r);
                }
                let value = linalg::trace(&self.push_right(left, &r));
                Ok(StringValue { value, modulus: None, indeterminate: false })
            }
            Length::Infinite => {
                let lead = self.bulk_leading(m)?;
                let modulus = lead.modulus();
                if modulus < 1.0 - GRAY_ZONE {
                    return Ok(StringValue { value: C64::ZERO, modulus: Some(modulus), indeterminate: false });
                }
                if lead.degenerate {
                    return Err(Error::Degenerate { gap: lead.gap() });
                }
                let bond = self.state().tensor.bond_dim();
                let rm = linalg::unvec_rm(&lead.right, bond, bond);
                let lm = linalg::unvec_rm(&lead.left, bond, bond);
                let a = linalg::trace(&self.push_right(left, &rm));
                let tail = self.push_right(right, &bounds.rho_r);
                let mut b = C64::ZERO;
                for i in 0..bond {
                    for j in 0..bond {
                        b += lm[(i, j)] * tail[(i, j)];
                    }
                }
                let overlap = lead.overlap();
                if overlap.norm() < 1e-12 {
                    return Err(Error::Numerical(format!("left/right leading eigenvectors are nearly orthogonal ({overlap})")));
                }
                Ok(StringValue {
                    value: a * b / overlap,
                    modulus: Some(modulus),
                    indeterminate: modulus < 1.0 - UNIMODULAR_TOL,
                })
            }
        }
    }

    /// `⟨E†(s)⟩` with every site operator evolved.
    pub fn string(&self, spec: &StringSpec) -> Result<StringValue> {
        spec.check(self.state().group(), self.state().tensor.physical_dim())?;
        let m = self.bulk(&spec.g);
        self.contract(&m, &self.heisenberg(&spec.left), &self.heisenberg(&spec.right), spec.length)
    }
}

/// A site operator folded into the tensor, ready for repeated pushes.
struct Mixed {
    b: CMat,
    a_dag: CMat,
    bond: usize,
}

/// `⟨s(g, O^l, O^r)⟩` on a canonical state.
pub fn string_expectation(state: &SymmetricMps, spec: &StringSpec) -> Result<C64> {
    Ok(Probe::new(state, None)?.string(spec)?.value)
}

/// `⟨E†(s)⟩`: bulk `E†(U_g)`, ends `E†(O)`.
pub fn evolved_string_expectation(state: &SymmetricMps, ch: &dyn Channel, spec: &StringSpec) -> Result<C64> {
    Ok(Probe::new(state, Some(ch))?.string(spec)?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableMode {
    /// Spin-1 with `Z2×Z2` π rotations: ends `1, S_x, S_y, S_z`.
    Spin1,
    /// One seeded random operator per character sector `α` as left end,
    /// its adjoint (sector `ᾱ`) as right end.
    Sectors { seed: u64 },
}

/// `values[g][end]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StringOrderTable {
    pub group: FiniteAbelianGroup,
    pub bulk_labels: Vec<String>,
    pub end_labels: Vec<String>,
    pub length: Length,
    pub values: Vec<Vec<StringValue>>,
}

impl StringOrderTable {
    pub fn value(&self, bulk: usize, end: usize) -> C64 {
        self.values[bulk][end].value
    }
}

fn spin1_rows(state: &SymmetricMps) -> Result<Vec<(String, GroupElement)>> {
    let rep = &state.rep;
    if rep.dim() != 3 || rep.group().order() != 4 {
        return Err(Error::InvalidParameter("spin-1 tables need the Z2xZ2 π-rotation representation on d=3".into()));
    }
    let rots = spin1_pi_rotations();
    let mut rows = Vec::with_capacity(4);
    for (label, target) in ["e", "x", "y", "z"].into_iter().zip([linalg::eye(3), rots[0].clone(), rots[1].clone(), rots[2].clone()]) {
        let g = rep
            .group()
            .elements()
            .into_iter()
            .find(|g| linalg::max_diff(rep.get(g), &target) < 1e-12)
            .ok_or_else(|| Error::InvalidParameter(format!("the representation has no element acting as R_{label}")))?;
        rows.push((label.to_string(), g));
    }
    Ok(rows)
}

/// The full string table over bulk elements and canonical end operators.
pub fn string_table(state: &SymmetricMps, ch: Option<&dyn Channel>, length: Length, mode: TableMode) -> Result<StringOrderTable> {
    let probe = Probe::new(state, ch)?;
    let group = state.group().clone();
    let d = state.tensor.physical_dim();
    let (rows, ends): (Vec<(String, GroupElement)>, Vec<(String, CMat, CMat)>) = match mode {
        TableMode::Spin1 => {
            let [sx, sy, sz] = spin1();
            let ends = [("e", linalg::eye(3)), ("x", sx), ("y", sy), ("z", sz)]
                .into_iter()
                .map(|(l, s)| (l.to_string(), s.clone(), s))
                .collect();
            (spin1_rows(state)?, ends)
        }
        TableMode::Sectors { seed } => {
            let rows = group.elements().into_iter().map(|g| (g.to_string(), g)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ends = group
                .characters()
                .into_iter()
                .map(|alpha| {
                    let o = if alpha == group.trivial_character() {
                        linalg::eye(d)
                    } else {
                        super::pattern::random_sector_operator(&state.rep, &alpha, &mut rng)
                    };
                    (alpha.to_string(), o.clone(), o.adjoint().to_owned())
                })
                .collect();
            (rows, ends)
        }
    };
    if let Length::Finite(n) = length {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("finite string length must be at least 2, got {n}")));
        }
    }
    let evolved_ends: Vec<(CMat, CMat)> = ends.iter().map(|(_, l, r)| (probe.heisenberg(l), probe.heisenberg(r))).collect();
    let mut values = Vec::with_capacity(rows.len());
    for (_, g) in &rows {
        let m = probe.bulk(g);
        let row = evolved_ends
            .iter()
            .map(|(l, r)| probe.contract(&m, l, r, length))
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    Ok(StringOrderTable {
        group,
        bulk_labels: rows.into_iter().map(|(l, _)| l).collect(),
        end_labels: ends.into_iter().map(|(l, _, _)| l).collect(),
        length,
        values,
    })
}
