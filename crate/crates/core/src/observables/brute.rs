//! Dense oracles on short periodic chains.

use super::string::{Length, StringSpec};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::linalg;
use crate::mps::{dense, transfer_operator, SymmetricMps};
use crate::{CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensePath {
    /// `E†` on every site of the string operator, then `⟨ψ|·|ψ⟩`.
    Heisenberg,
    /// `E^{⊗L}` on `|ψ⟩⟨ψ|`, then the trace against the bare string.
    Schrodinger,
}

/// The bare site operators of the string on a ring of `len` sites: the left
/// end on site 0, the bulk on sites `1..=N`, the right end on `N+1`.
fn site_operators(state: &SymmetricMps, spec: &StringSpec, len: usize) -> Result<Vec<CMat>> {
    let d = state.tensor.physical_dim();
    let Length::Finite(n) = spec.length else {
        return Err(Error::InvalidParameter("dense oracles need a finite string length".into()));
    };
    if n + 2 > len {
        return Err(Error::InvalidParameter(format!("a string with {n} bulk sites does not fit on a ring of {len}")));
    }
    for m in [&spec.left, &spec.right] {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Shape(format!("end operators must be {d}x{d}")));
        }
    }
    let u = state.rep.get(&spec.g).clone();
    Ok((0..len)
        .map(|s| match s {
            0 => spec.left.clone(),
            s if s <= n => u.clone(),
            s if s == n + 1 => spec.right.clone(),
            _ => linalg::eye(d),
        })
        .collect())
}

/// Exact `⟨E^{⊗L†}(s)⟩` on the ring `|ψ⟩ = Σ Tr(A^{i_1} ⋯ A^{i_L}) |i_1 ⋯ i_L⟩`.
pub fn brute_force_expectation(
    state: &SymmetricMps,
    ch: Option<&dyn Channel>,
    spec: &StringSpec,
    len: usize,
    path: DensePath,
) -> Result<C64> {
    let d = state.tensor.physical_dim();
    if let Some(ch) = ch {
        if ch.dim() != d {
            return Err(Error::Shape(format!("channel acts on d={} but the state has d={d}", ch.dim())));
        }
    }
    dense::checked_size(d, len)?;
    let ops = site_operators(state, spec, len)?;
    let bond = state.tensor.bond_dim();
    let psi = dense::amplitudes(state.tensor.mats(), &linalg::eye(bond), len)?;
    let norm = linalg::inner(&psi, &psi).re;
    if norm < 1e-300 {
        return Err(Error::Numerical("ring state has zero norm".into()));
    }
    match path {
        DensePath::Heisenberg => {
            let mut phi = psi.clone();
            for (s, op) in ops.iter().enumerate() {
                let op = match ch {
                    Some(ch) => ch.dual_apply(op),
                    None => op.clone(),
                };
                phi = dense::apply_site(&phi, d, len, s, &op);
            }
            Ok(linalg::inner(&psi, &phi) / norm)
        }
        DensePath::Schrodinger => {
            let total = dense::checked_size(d, 2 * len)?;
            // ρ as a vector over 2L digits: row digits first, then column digits
            let mut rho = Vec::with_capacity(total);
            for a in &psi {
                for b in &psi {
                    rho.push(a * b.conj());
                }
            }
            if let Some(ch) = ch {
                let sup = ch.superop().mat;
                for s in 0..len {
                    rho = apply_pair(&rho, d, 2 * len, s, len + s, &sup);
                }
            }
            for (s, op) in ops.iter().enumerate() {
                rho = dense::apply_site(&rho, d, 2 * len, s, op);
            }
            let dim = psi.len();
            let tr: C64 = (0..dim).map(|i| rho[i * dim + i]).sum();
            Ok(tr / norm)
        }
    }
}

/// Applies a two-digit operator `m[(i·d + j), (a·d + b)]` to digits `p < q`.
fn apply_pair(v: &[C64], d: usize, len: usize, p: usize, q: usize, m: &CMat) -> Vec<C64> {
    let sp = d.pow((len - 1 - p) as u32);
    let sq = d.pow((len - 1 - q) as u32);
    let mut out = vec![C64::ZERO; v.len()];
    let mut buf = vec![C64::ZERO; d * d];
    for base in 0..v.len() {
        if (base / sp) % d != 0 || (base / sq) % d != 0 {
            continue;
        }
        for a in 0..d {
            for b in 0..d {
                buf[a * d + b] = v[base + a * sp + b * sq];
            }
        }
        for i in 0..d {
            for j in 0..d {
                let row = i * d + j;
                let mut acc = C64::ZERO;
                for (col, x) in buf.iter().enumerate() {
                    acc += m[(row, col)] * x;
                }
                out[base + i * sp + j * sq] = acc;
            }
        }
    }
    out
}

/// The same ring expectation from transfer operators:
/// `Tr(T_{X_1} ⋯ T_{X_L}) / Tr(T^L)` with `X_s = E†(O_s)`.
pub fn ring_expectation(state: &SymmetricMps, ch: Option<&dyn Channel>, spec: &StringSpec, len: usize) -> Result<C64> {
    let d = state.tensor.physical_dim();
    if let Some(ch) = ch {
        if ch.dim() != d {
            return Err(Error::Shape(format!("channel acts on d={} but the state has d={d}", ch.dim())));
        }
    }
    let ops = site_operators(state, spec, len)?;
    let a = &state.tensor;
    let t = transfer_operator(a, &linalg::eye(d))?;
    let mut num = linalg::eye(t.nrows());
    let mut den = linalg::eye(t.nrows());
    for op in &ops {
        let x = match ch {
            Some(ch) => ch.dual_apply(op),
            None => op.clone(),
        };
        num = &num * transfer_operator(a, &x)?;
        den = &den * &t;
    }
    Ok(linalg::trace(&num) / linalg::trace(&den))
}
