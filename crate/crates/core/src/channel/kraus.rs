use crate::error::{Error, Result};
use crate::linalg::{self, cr};
use crate::{CMat, C64};

/// Completeness tolerance for `Σ K_i† K_i = 1`.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Anything that acts as a single-site map on `d×d` operators.
pub trait Channel {
    fn dim(&self) -> usize;
    /// Liouville form.
    fn superop(&self) -> Superop;
    /// Schrödinger picture `ρ ↦ E(ρ)`.
    fn apply(&self, rho: &CMat) -> CMat;
    /// Heisenberg picture `X ↦ E†(X)`.
    fn dual_apply(&self, x: &CMat) -> CMat;
}

/// Outcome of the completeness check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationReport {
    /// `max |Σ K†K − 1|`.
    pub deviation: f64,
    pub pass: bool,
}

/// Completeness of an arbitrary list of square matrices. Never fails.
pub fn validate(kraus: &[CMat]) -> ValidationReport {
    let Some(first) = kraus.first() else {
        return ValidationReport { deviation: f64::INFINITY, pass: false };
    };
    let d = first.nrows();
    if kraus.iter().any(|k| k.nrows() != d || k.ncols() != d) {
        return ValidationReport { deviation: f64::INFINITY, pass: false };
    }
    let mut s = CMat::zeros(d, d);
    for k in kraus {
        s += k.adjoint() * k;
    }
    let deviation = linalg::max_diff(&s, &linalg::eye(d));
    ValidationReport { deviation, pass: deviation <= COMPLETENESS_TOL }
}

/// A channel in Kraus form, `E(ρ) = Σ_i K_i ρ K_i†`.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<CMat>,
}

impl QuantumChannel {
    /// Rejects shape mismatches and incomplete Kraus sets.
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let Some(first) = kraus.first() else {
            return Err(Error::Shape("a channel needs at least one Kraus operator".into()));
        };
        let d = first.nrows();
        if let Some(k) = kraus.iter().find(|k| k.nrows() != d || k.ncols() != d) {
            return Err(Error::Shape(format!("Kraus operators must all be {d}x{d}, found {}x{}", k.nrows(), k.ncols())));
        }
        let report = validate(&kraus);
        if !report.pass {
            return Err(Error::Incomplete(report.deviation));
        }
        Ok(Self { dim: d, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim: d, kraus: vec![linalg::eye(d)] }
    }

    pub fn unitary(u: &CMat) -> Result<Self> {
        Self::new(vec![u.clone()])
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.kraus)
    }

    /// `Σ K_i ⊗ conj(K_i)`.
    pub fn liouville(&self) -> CMat {
        let d2 = self.dim * self.dim;
        let mut l = CMat::zeros(d2, d2);
        for k in &self.kraus {
            l += linalg::kron(k, &linalg::conj(k));
        }
        l
    }

    /// `self ∘ other`: `other` acts first.
    pub fn compose(&self, other: &QuantumChannel) -> Result<QuantumChannel> {
        self.check_dim(other.dim)?;
        let kraus = self.kraus.iter().flat_map(|a| other.kraus.iter().map(move |b| a * b)).collect();
        Ok(Self { dim: self.dim, kraus })
    }

    /// `self ⊗ other` on the product space.
    pub fn tensor(&self, other: &QuantumChannel) -> QuantumChannel {
        let kraus = self.kraus.iter().flat_map(|a| other.kraus.iter().map(move |b| linalg::kron(a, b))).collect();
        Self { dim: self.dim * other.dim, kraus }
    }

    /// `Σ_k w_k E_k` with nonnegative weights summing to 1.
    pub fn convex_combine(weights: &[f64], channels: &[QuantumChannel]) -> Result<QuantumChannel> {
        if weights.len() != channels.len() || channels.is_empty() {
            return Err(Error::Shape(format!("{} weights for {} channels", weights.len(), channels.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidParameter("convex weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > COMPLETENESS_TOL {
            return Err(Error::InvalidParameter(format!("convex weights sum to {total}, not 1")));
        }
        let d = channels[0].dim;
        let mut kraus = Vec::new();
        for (w, ch) in weights.iter().zip(channels) {
            channels[0].check_dim(ch.dim)?;
            if *w == 0.0 {
                continue;
            }
            kraus.extend(ch.kraus.iter().map(|k| linalg::scale(cr(w.sqrt()), k)));
        }
        Ok(Self { dim: d, kraus })
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::Shape(format!("channel dimensions differ: {} vs {other}", self.dim)));
        }
        Ok(())
    }
}

impl Channel for QuantumChannel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn superop(&self) -> Superop {
        Superop { dim: self.dim, mat: self.liouville() }
    }

    fn apply(&self, rho: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k * rho * k.adjoint();
        }
        out
    }

    fn dual_apply(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim, self.dim);
        for k in &self.kraus {
            out += k.adjoint() * x * k;
        }
        out
    }
}

/// A linear map on `d×d` operators in Liouville form.
#[derive(Clone, Debug)]
pub struct Superop {
    pub dim: usize,
    /// `d² × d²`, acting on row-major vectorisations.
    pub mat: CMat,
}

impl Superop {
    pub fn new(dim: usize, mat: CMat) -> Result<Self> {
        if mat.nrows() != dim * dim || mat.ncols() != dim * dim {
            return Err(Error::Shape(format!("superoperator for d={dim} must be {0}x{0}", dim * dim)));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: linalg::eye(dim * dim) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Superop) -> Result<Superop> {
        if self.dim != other.dim {
            return Err(Error::Shape(format!("superoperator dimensions differ: {} vs {}", self.dim, other.dim)));
        }
        Ok(Superop { dim: self.dim, mat: &self.mat * &other.mat })
    }

    pub fn pow(&self, p: u64) -> Superop {
        Superop { dim: self.dim, mat: linalg::mat_pow(&self.mat, p) }
    }

    /// `J = Σ_ab |a⟩⟨b| ⊗ E(|a⟩⟨b|)`.
    pub fn choi(&self) -> CMat {
        let d = self.dim;
        CMat::from_fn(d * d, d * d, |r, s| {
            let (a, i) = (r / d, r % d);
            let (b, j) = (s / d, s % d);
            self.mat[(i * d + j, a * d + b)]
        })
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix.
    pub fn min_choi_eigenvalue(&self) -> Result<f64> {
        let j = self.choi();
        let herm = linalg::scale(cr(0.5), &(&j + j.adjoint()));
        Ok(linalg::eigh(&herm)?.0[0])
    }

    /// `max |E†(1) − 1|`.
    pub fn trace_preservation_defect(&self) -> f64 {
        linalg::max_diff(&self.dual_apply(&linalg::eye(self.dim)), &linalg::eye(self.dim))
    }

    /// Hermiticity preservation defect of the Choi matrix.
    pub fn choi_hermiticity_defect(&self) -> f64 {
        linalg::hermiticity_defect(&self.choi())
    }

    /// Kraus operators from the Choi eigendecomposition, dropping eigenvalues
    /// below `floor`. Fails when the map is not completely positive.
    pub fn to_channel(&self, floor: f64) -> Result<QuantumChannel> {
        let d = self.dim;
        let j = self.choi();
        let hd = linalg::hermiticity_defect(&j);
        if hd > COMPLETENESS_TOL {
            return Err(Error::NotHermitian(hd));
        }
        let (vals, vecs) = linalg::eigh(&linalg::scale(cr(0.5), &(&j + j.adjoint())))?;
        if vals[0] < -COMPLETENESS_TOL {
            return Err(Error::Numerical(format!("map is not completely positive (Choi eigenvalue {:e})", vals[0])));
        }
        let mut kraus = Vec::new();
        for (k, &mu) in vals.iter().enumerate() {
            if mu <= floor {
                continue;
            }
            let s = mu.sqrt();
            kraus.push(CMat::from_fn(d, d, |i, a| vecs[(a * d + i, k)] * s));
        }
        if kraus.is_empty() {
            return Err(Error::Numerical("map has no Choi weight above the floor".into()));
        }
        QuantumChannel::new(kraus)
    }
}

impl Channel for Superop {
    fn dim(&self) -> usize {
        self.dim
    }

    fn superop(&self) -> Superop {
        self.clone()
    }

    fn apply(&self, rho: &CMat) -> CMat {
        let v = linalg::mat_vec(&self.mat, &linalg::vec_rm(rho));
        linalg::unvec_rm(&v, self.dim, self.dim)
    }

    fn dual_apply(&self, x: &CMat) -> CMat {
        let v: Vec<C64> = linalg::vec_rm(x);
        let out: Vec<C64> = (0..self.mat.ncols())
            .map(|j| (0..self.mat.nrows()).map(|i| self.mat[(i, j)].conj() * v[i]).sum())
            .collect();
        linalg::unvec_rm(&out, self.dim, self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::zoo;
    use crate::linalg::c;
    use crate::mps::{spin1, spin1_pi_rotations};

    #[test]
    fn validation_reports() {
        assert_eq!(QuantumChannel::identity(3).validate().deviation, 0.0);
        let r = validate(&[linalg::eye(2), linalg::eye(2)]);
        assert!(!r.pass);
        assert!((r.deviation - 1.0).abs() < 1e-15);
        assert!(matches!(QuantumChannel::new(vec![linalg::eye(2), linalg::eye(2)]), Err(Error::Incomplete(_))));
        assert!(zoo::dephasing(0.5).unwrap().validate().pass);
    }

    #[test]
    fn dual_examples() {
        let [rx, ..] = spin1_pi_rotations();
        let [sx, sy, sz] = spin1();
        let u = QuantumChannel::unitary(&rx).unwrap();
        let x = &sx + linalg::scale(c(0.3, 0.1), &sz);
        assert!(linalg::max_diff(&u.dual_apply(&x), &(rx.adjoint() * &x * &rx)) < 1e-15);

        let lam = 0.37;
        let dep = zoo::depolarising(3, lam).unwrap();
        let y = &sy * &sz + linalg::eye(3);
        let want = linalg::scale(cr(1.0 - lam), &y) + linalg::scale(linalg::trace(&y) * (lam / 3.0), &linalg::eye(3));
        assert!(linalg::max_diff(&dep.dual_apply(&y), &want) < 1e-14);

        let deph = zoo::dephasing(lam).unwrap();
        assert!(linalg::max_diff(&deph.dual_apply(&sz), &linalg::scale(cr(1.0 - lam), &sz)) < 1e-14);
        assert!(linalg::max_diff(&deph.dual_apply(&linalg::eye(3)), &linalg::eye(3)) < 1e-14);
    }

    #[test]
    fn liouville_is_a_homomorphism() {
        let a = zoo::dephasing(0.2).unwrap();
        let b = zoo::depolarising(3, 0.7).unwrap();
        let ab = a.compose(&b).unwrap();
        assert!(linalg::max_diff(&ab.liouville(), &(a.liouville() * b.liouville())) < 1e-13);
        let id = QuantumChannel::identity(3);
        assert!(linalg::max_diff(&id.compose(&a).unwrap().liouville(), &a.liouville()) < 1e-15);
        // two dephasings scale S_z by the product
        let b2 = zoo::dephasing(0.6).unwrap();
        let [.., sz] = spin1();
        let got = a.compose(&b2).unwrap().dual_apply(&sz);
        assert!(linalg::max_diff(&got, &linalg::scale(cr(0.8 * 0.4), &sz)) < 1e-14);

        let [rx, ..] = spin1_pi_rotations();
        let u = QuantumChannel::unitary(&rx).unwrap();
        let mix = QuantumChannel::convex_combine(&[0.5, 0.5], &[u.clone(), u.clone()]).unwrap();
        assert!(linalg::max_diff(&mix.liouville(), &u.liouville()) < 1e-15);
        assert!(QuantumChannel::convex_combine(&[0.5, 0.6], &[u.clone(), u.clone()]).is_err());
        assert!(QuantumChannel::convex_combine(&[1.0], &[u.clone(), u]).is_err());
    }

    #[test]
    fn superop_views_agree() {
        let ch = zoo::depolarising(3, 0.4).unwrap().compose(&zoo::dephasing(0.3).unwrap()).unwrap();
        let s = ch.superop();
        let [sx, sy, _] = spin1();
        let x = &sx * &sy;
        assert!(linalg::max_diff(&s.apply(&x), &ch.apply(&x)) < 1e-14);
        assert!(linalg::max_diff(&s.dual_apply(&x), &ch.dual_apply(&x)) < 1e-14);
        assert!(s.trace_preservation_defect() < 1e-14);
        assert!(s.min_choi_eigenvalue().unwrap() > -1e-12);
        let back = s.to_channel(1e-13).unwrap();
        assert!(linalg::max_diff(&back.liouville(), &s.mat) < 1e-12);
        // the transpose map is positive but not completely positive
        let t = Superop::new(2, CMat::from_fn(4, 4, |r, s| if r == (s % 2) * 2 + s / 2 { cr(1.0) } else { C64::ZERO })).unwrap();
        assert!(t.min_choi_eigenvalue().unwrap() < -0.5);
        assert!(t.to_channel(1e-12).is_err());
    }

    #[test]
    fn tensor_product_acts_factorwise() {
        let a = zoo::dephasing(0.5).unwrap();
        let b = QuantumChannel::identity(2);
        let ab = a.tensor(&b);
        assert_eq!(ab.dim(), 6);
        assert!(ab.validate().pass);
        let [.., sz] = spin1();
        let x = linalg::kron(&sz, &linalg::eye(2));
        assert!(linalg::max_diff(&ab.dual_apply(&x), &linalg::scale(cr(0.5), &x)) < 1e-14);
    }
}
