//! Dense state vectors of short periodic chains, for oracles and twisted
//! sectors. Site 0 is the most significant digit of the basis index.

use crate::error::{Error, Result};
use crate::{CMat, C64};

pub const DENSE_LIMIT: usize = 10_000_000;

pub fn checked_size(d: usize, len: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..len {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= DENSE_LIMIT)
            .ok_or_else(|| Error::SizeLimit(format!("{d}^{len} exceeds {DENSE_LIMIT}")))?;
    }
    Ok(total)
}

/// Amplitudes `Tr[B A^{i_1} ⋯ A^{i_L}]`.
pub fn amplitudes(mats: &[CMat], boundary: &CMat, len: usize) -> Result<Vec<C64>> {
    let d = mats.len();
    let total = checked_size(d, len)?;
    if len == 0 {
        return Ok(vec![crate::linalg::trace(boundary)]);
    }
    let mut out = vec![C64::ZERO; total];
    // prefix[l] = B A^{i_1} ⋯ A^{i_l}
    let mut prefix: Vec<CMat> = vec![boundary.clone(); len];
    let mut digits = vec![0usize; len];
    let mut valid = 0; // prefixes 1..=valid are current
    for (idx, slot) in out.iter_mut().enumerate() {
        if idx > 0 {
            // increment odometer, find first changed digit
            let mut pos = len - 1;
            loop {
                digits[pos] += 1;
                if digits[pos] < d {
                    break;
                }
                digits[pos] = 0;
                pos -= 1;
            }
            valid = valid.min(pos);
        }
        for l in valid..len - 1 {
            let prev = if l == 0 { boundary } else { &prefix[l - 1] };
            prefix[l] = prev * &mats[digits[l]];
        }
        valid = len - 1;
        let last = if len == 1 { boundary } else { &prefix[len - 2] };
        let a = &mats[digits[len - 1]];
        let mut tr = C64::ZERO;
        for p in 0..a.nrows() {
            for q in 0..a.ncols() {
                tr += last[(p, q)] * a[(q, p)];
            }
        }
        *slot = tr;
    }
    Ok(out)
}

/// Applies a single-site operator at `site`.
pub fn apply_site(psi: &[C64], d: usize, len: usize, site: usize, op: &CMat) -> Vec<C64> {
    let stride = d.pow((len - 1 - site) as u32);
    let outer = psi.len() / (d * stride);
    let mut out = vec![C64::ZERO; psi.len()];
    let mut buf = vec![C64::ZERO; d];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * d * stride + inner;
            for (j, b) in buf.iter_mut().enumerate() {
                *b = psi[base + j * stride];
            }
            for i in 0..d {
                let mut acc = C64::ZERO;
                for (j, b) in buf.iter().enumerate() {
                    acc += op[(i, j)] * b;
                }
                out[base + i * stride] = acc;
            }
        }
    }
    out
}
