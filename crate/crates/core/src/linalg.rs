//! Small dense complex linear-algebra toolkit on top of `faer`.
//!
//! Vectorisation is row-major throughout: `vec(X)[a * n + b] = X[a, b]`, so
//! that `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use crate::error::{Error, Result};
use crate::{CMat, C64};
use faer::linalg::solvers::Solve;
use faer::Side;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn from_rows(rows: &[Vec<C64>]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cols, |i, j| rows[i][j])
}

pub fn diag(d: &[C64]) -> CMat {
    CMat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { C64::ZERO })
}

pub fn scale(s: C64, a: &CMat) -> CMat {
    faer::Scale(s) * a
}

/// `acc += s·a` in place.
pub fn axpy(acc: &mut CMat, s: C64, a: &CMat) {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc[(i, j)] += s * a[(i, j)];
        }
    }
}

pub fn dag(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn transpose(a: &CMat) -> CMat {
    a.transpose().to_owned()
}

pub fn conj(a: &CMat) -> CMat {
    a.conjugate().to_owned()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let mut out = CMat::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
    faer::linalg::kron::kron(out.as_mut(), a.as_ref(), b.as_ref());
    out
}

pub fn trace(a: &CMat) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Largest entry modulus.
pub fn max_abs(a: &CMat) -> f64 {
    a.norm_max()
}

pub fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm_max()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// `‖U†U − 1‖_max`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    max_diff(&(u.adjoint() * u), &eye(u.ncols()))
}

pub fn hermiticity_defect(h: &CMat) -> f64 {
    max_diff(h, &dag(h))
}

pub fn vec_rm(a: &CMat) -> Vec<C64> {
    let mut v = Vec::with_capacity(a.nrows() * a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            v.push(a[(i, j)]);
        }
    }
    v
}

pub fn unvec_rm(v: &[C64], r: usize, c: usize) -> CMat {
    assert_eq!(v.len(), r * c, "unvec length");
    CMat::from_fn(r, c, |i, j| v[i * c + j])
}

pub fn mat_vec(m: &CMat, v: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == C64::ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

/// `vᵀ M` as a vector.
pub fn vec_mat(v: &[C64], m: &CMat) -> Vec<C64> {
    (0..m.ncols())
        .map(|j| (0..m.nrows()).map(|i| v[i] * m[(i, j)]).sum())
        .collect()
}

/// Bilinear `Σ a_i b_i`.
pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Sesquilinear `Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &mut [C64]) {
    let n = norm(v);
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

/// `exp(2πi num/den)`, exact at multiples of a quarter turn.
pub fn root_of_unity(num: i64, den: i64) -> C64 {
    assert!(den > 0);
    let r = num.rem_euclid(den);
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            0 => cr(1.0),
            1 => c(0.0, 1.0),
            2 => cr(-1.0),
            _ => c(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / den as f64)
}

/// `M^p` by repeated squaring.
pub fn mat_pow(m: &CMat, mut p: u64) -> CMat {
    let mut result = eye(m.nrows());
    let mut base = m.clone();
    while p > 0 {
        if p & 1 == 1 {
            result = &result * &base;
        }
        p >>= 1;
        if p > 0 {
            base = &base * &base;
        }
    }
    result
}

pub fn inverse(a: &CMat) -> Result<CMat> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape("inverse of non-square matrix".into()));
    }
    let inv = a.partial_piv_lu().solve(eye(n));
    let defect = max_diff(&(a * &inv), &eye(n));
    if !defect.is_finite() || defect > 1e-6 {
        return Err(Error::Numerical(format!("matrix is singular (inverse defect {defect:e})")));
    }
    Ok(inv)
}

pub fn singular_values(a: &CMat) -> Vec<f64> {
    a.singular_values().unwrap_or_default()
}

/// Eigen-decomposition of the Hermitian part of `a`, eigenvalues ascending.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let h = scale(cr(0.5), &(a + a.adjoint()));
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("Hermitian eigensolver: {e:?}")))?;
    let vals = e.S().column_vector().iter().map(|x| x.re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>> {
    a.eigenvalues()
        .map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))
}

/// Principal square root of a positive semidefinite matrix (negative
/// eigenvalues from rounding are clipped to zero).
pub fn sqrt_psd(a: &CMat) -> Result<CMat> {
    let (vals, u) = eigh(a)?;
    let d: Vec<C64> = vals.iter().map(|&x| cr(x.max(0.0).sqrt())).collect();
    Ok(&u * diag(&d) * u.adjoint())
}

/// Leading (maximal-modulus) eigenpair of a dense matrix.
#[derive(Clone, Debug)]
pub struct Leading {
    pub value: C64,
    /// Unit-norm right eigenvector, `T r = λ r`.
    pub right: Vec<C64>,
    /// Unit-norm left eigenvector, `lᵀ T = λ lᵀ`.
    pub left: Vec<C64>,
    pub second_modulus: f64,
    /// `|λ₁| − |λ₂|` fell below `1e-8` (relative to `|λ₁|`).
    pub degenerate: bool,
    pub right_residual: f64,
    pub left_residual: f64,
}

impl Leading {
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    /// `lᵀ r`.
    pub fn overlap(&self) -> C64 {
        dot(&self.left, &self.right)
    }

    pub fn gap(&self) -> f64 {
        self.modulus() - self.second_modulus
    }
}

pub const DEGENERACY_GAP: f64 = 1e-8;
pub const EIG_RESIDUAL: f64 = 1e-10;

fn residual(t: &CMat, v: &[C64], lam: C64) -> f64 {
    let tv = mat_vec(t, v);
    tv.iter().zip(v).map(|(a, b)| (a - lam * b).norm()).fold(0.0, f64::max)
}

/// One or two steps of shifted inverse iteration, used to polish an
/// eigenvector returned by the dense solver.
fn inverse_iterate(t: &CMat, lam: C64, start: &[C64], steps: usize) -> Vec<C64> {
    let n = t.nrows();
    let shift = lam + c(1e-11, 7e-12) * lam.norm().max(1e-300);
    let shifted = CMat::from_fn(n, n, |i, j| if i == j { t[(i, j)] - shift } else { t[(i, j)] });
    let lu = shifted.partial_piv_lu();
    let mut x = start.to_vec();
    for _ in 0..steps {
        let b = CMat::from_fn(n, 1, |i, _| x[i]);
        let y = lu.solve(b);
        let next: Vec<C64> = (0..n).map(|i| y[(i, 0)]).collect();
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || norm(&next) == 0.0 {
            break;
        }
        x = next;
        normalize(&mut x);
    }
    x
}

/// Leading eigenvalue, left and right eigenvectors of a square matrix.
///
/// Degeneracy of the leading modulus is reported through the flag, not as an
/// error; the caller decides whether that is acceptable. An error means the
/// solver could not produce eigenvectors with residual `≤ 1e-10 · max(1, ‖T‖)`
/// for a nondegenerate leading eigenvalue.
pub fn leading_eigs(t: &CMat) -> Result<Leading> {
    let n = t.nrows();
    if n == 0 || n != t.ncols() {
        return Err(Error::Shape(format!("leading_eigs needs a nonempty square matrix, got {}x{}", n, t.ncols())));
    }
    let mut e0 = vec![C64::ZERO; n];
    e0[0] = cr(1.0);
    let tnorm = t.norm_max();
    if tnorm == 0.0 {
        return Ok(Leading {
            value: C64::ZERO,
            right: e0.clone(),
            left: e0,
            second_modulus: 0.0,
            degenerate: n > 1,
            right_residual: 0.0,
            left_residual: 0.0,
        });
    }
    let eig = t.eigen().map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
    let s = eig.S().column_vector();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].norm().total_cmp(&s[a].norm()));
    let i0 = order[0];
    let lam = s[i0];
    let second = if n > 1 { s[order[1]].norm() } else { 0.0 };
    let degenerate = lam.norm() - second < DEGENERACY_GAP * lam.norm().max(f64::MIN_POSITIVE);

    let u = eig.U();
    let mut right: Vec<C64> = (0..n).map(|i| u[(i, i0)]).collect();
    normalize(&mut right);
    let tol = EIG_RESIDUAL * tnorm.max(1.0);
    let mut right_residual = residual(t, &right, lam);
    if !degenerate && right_residual > 1e-3 * tol {
        let polished = inverse_iterate(t, lam, &right, 2);
        let r2 = residual(t, &polished, lam);
        if r2 < right_residual {
            right = polished;
            right_residual = r2;
        }
    }

    let tt = transpose(t);
    let mut start: Vec<C64> = right.iter().map(|z| z.conj()).collect();
    for (i, z) in start.iter_mut().enumerate() {
        *z += c(1e-3 / (1.0 + i as f64), 0.5e-3);
    }
    let mut left = inverse_iterate(&tt, lam, &start, 3);
    let mut left_residual = residual(&tt, &left, lam);
    if left_residual > tol || dot(&left, &right).norm() < 1e-12 && !degenerate {
        // fall back to a full decomposition of Tᵀ
        let et = tt.eigen().map_err(|e| Error::Numerical(format!("eigensolver: {e:?}")))?;
        let st = et.S().column_vector();
        let j0 = (0..n)
            .min_by(|&a, &b| (st[a] - lam).norm().total_cmp(&(st[b] - lam).norm()))
            .unwrap_or(0);
        let ut = et.U();
        let mut cand: Vec<C64> = (0..n).map(|i| ut[(i, j0)]).collect();
        normalize(&mut cand);
        let r = residual(&tt, &cand, lam);
        if r < left_residual {
            left = cand;
            left_residual = r;
        }
    }
    if !degenerate && (right_residual > tol || left_residual > tol) {
        return Err(Error::Numerical(format!(
            "leading eigenvector residuals {right_residual:e} / {left_residual:e} exceed {tol:e}"
        )));
    }
    Ok(Leading { value: lam, right, left, second_modulus: second, degenerate, right_residual, left_residual })
}

/// Power-iteration fast path for matrices whose spectral radius is known to
/// be at most 1 (transfer operators of unitaries on canonical tensors).
///
/// Succeeds only when it finds right and left eigenvectors for an eigenvalue
/// with `|λ| ≥ 1 − 1e-10` and residuals within [`EIG_RESIDUAL`]; such an
/// eigenvalue is then necessarily of maximal modulus. `second_modulus` must
/// come from the caller's knowledge of the spectrum (for `T_{U_h}` of a
/// symmetric state it equals that of the plain transfer operator).
pub fn unimodular_leading(t: &CMat, second_modulus: f64, max_iter: usize) -> Option<Leading> {
    let n = t.nrows();
    let tt = transpose(t);
    let run = |m: &CMat| -> Option<(C64, Vec<C64>, f64)> {
        let mut v: Vec<C64> = (0..n).map(|i| c(1.0 + 0.37 * ((i * 7919) % 13) as f64, 0.11 * ((i * 104729) % 7) as f64)).collect();
        normalize(&mut v);
        let mut lam = C64::ZERO;
        for it in 0..max_iter {
            let w = mat_vec(m, &v);
            lam = inner(&v, &w);
            if it % 8 == 7 || it + 1 == max_iter {
                let res = w.iter().zip(&v).map(|(a, b)| (a - lam * b).norm()).fold(0.0, f64::max);
                if res < 1e-14 {
                    break;
                }
            }
            let nw = norm(&w);
            if nw == 0.0 || !nw.is_finite() {
                return None;
            }
            v = w.into_iter().map(|z| z / nw).collect();
        }
        let r = residual(m, &v, lam);
        Some((lam, v, r))
    };
    let (lam, right, rr) = run(t)?;
    if lam.norm() < 1.0 - 1e-10 {
        return None;
    }
    let (lam_l, left, lr) = run(&tt)?;
    let tol = EIG_RESIDUAL * t.norm_max().max(1.0);
    if rr > tol || lr > tol || (lam_l - lam).norm() > 1e-9 {
        return None;
    }
    let degenerate = lam.norm() - second_modulus < DEGENERACY_GAP * lam.norm();
    Some(Leading { value: lam, right, left, second_modulus, degenerate, right_residual: rr, left_residual: lr })
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &CMat) -> Result<CMat> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Shape("expm of non-square matrix".into()));
    }
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm1.is_finite() {
        return Err(Error::Numerical("expm of non-finite matrix".into()));
    }
    let s = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = scale(cr(0.5f64.powi(s)), a);
    let id = eye(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |i: usize| cr(B[i]);
    let inner_u = &a6 * (scale(b(13), &a6) + scale(b(11), &a4) + scale(b(9), &a2))
        + scale(b(7), &a6)
        + scale(b(5), &a4)
        + scale(b(3), &a2)
        + scale(b(1), &id);
    let u = &a * inner_u;
    let v = &a6 * (scale(b(12), &a6) + scale(b(10), &a4) + scale(b(8), &a2))
        + scale(b(6), &a6)
        + scale(b(4), &a4)
        + scale(b(2), &a2)
        + scale(b(0), &id);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.partial_piv_lu().solve(p);
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
