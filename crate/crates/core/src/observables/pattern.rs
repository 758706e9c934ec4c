use super::string::{Probe, GRAY_ZONE};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::group::{invariant_from_pattern, Character, GroupElement, PatternOfZeros};
use crate::linalg::{self, c, cr};
use crate::mps::{OnsiteRep, SymmetricMps};
use crate::{CMat, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Purity tolerance for the sector of an end vector, relative to its norm
/// before the channel.
const PURITY_TOL: f64 = 1e-8;
/// Evolved ends below this fraction of their original norm count as
/// annihilated; roundoff of the superoperator sits near 1e-16.
const END_FLOOR: f64 = 1e-12;
/// `|value|` above this marks a star.
const ZERO_THRESHOLD: f64 = 1e-8;
/// Rejection floor for projected random operators.
const SAMPLE_FLOOR: f64 = 1e-8;
const SAMPLE_RETRIES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Random end operators per sector for the sampled route.
    pub samples: usize,
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { samples: 50, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ColumnReport {
    pub element: GroupElement,
    /// Leading modulus of `T_{M_g}`.
    pub modulus: f64,
    pub indeterminate: bool,
    /// `min(‖E(N_l)‖ / ‖N_l‖, ‖E(N_r)‖ / ‖N_r‖)`; 1 without a channel.
    pub end_weight: f64,
    pub spectral: Option<Character>,
    pub sampled: Option<Character>,
    /// Largest `|⟨s⟩|` over the samples, per character index.
    pub sampled_max: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PatternReport {
    pub pattern: PatternOfZeros,
    pub invariant: Option<usize>,
    /// Why the pattern is not an SPT pattern, when it is not.
    pub invariant_error: Option<String>,
    pub columns: Vec<ColumnReport>,
    /// Spectral and sampled routes produced the same stars.
    pub routes_agree: bool,
    pub options: ExtractOptions,
}

fn gaussian_matrix(d: usize, rng: &mut ChaCha8Rng) -> CMat {
    let mut g = || -> f64 { StandardNormal.sample(rng) };
    let x = CMat::from_fn(d, d, |_, _| c(g(), g()));
    linalg::scale(cr(0.5), &(&x + x.adjoint()))
}

/// A random Hermitian operator projected onto sector `α`, redrawn while the
/// projection vanishes. Returns zero if the sector stays empty.
pub(crate) fn random_sector_operator(rep: &OnsiteRep, alpha: &Character, rng: &mut ChaCha8Rng) -> CMat {
    let d = rep.dim();
    for _ in 0..SAMPLE_RETRIES {
        let o = rep.project_sector(alpha, &gaussian_matrix(d, rng));
        if o.norm_max() > SAMPLE_FLOOR {
            return o;
        }
    }
    CMat::zeros(d, d)
}

/// `samples` seeded random operators for every character sector at once:
/// `out[α][s]`. Each draw of a Hermitian `H` is projected onto all sectors.
pub fn sector_samples(rep: &OnsiteRep, samples: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<CMat>> {
    let group = rep.group();
    let chars = group.characters();
    let els = group.elements();
    let d = rep.dim();
    let values: Vec<Vec<C64>> = chars
        .iter()
        .map(|a| els.iter().map(|h| group.character_value(a, h).expect("same group").conj()).collect())
        .collect();
    let inv = cr(1.0 / els.len() as f64);
    let mut out = vec![Vec::with_capacity(samples); chars.len()];
    for _ in 0..samples {
        let h = gaussian_matrix(d, rng);
        let conj: Vec<CMat> = rep.mats().iter().map(|u| u.adjoint() * &h * u).collect();
        for (slot, vals) in out.iter_mut().zip(&values) {
            let mut acc = CMat::zeros(d, d);
            for (y, v) in conj.iter().zip(vals) {
                linalg::axpy(&mut acc, *v * inv, y);
            }
            let o = acc;
            slot.push(if o.norm_max() > SAMPLE_FLOOR { o } else { CMat::zeros(d, d) });
        }
    }
    out
}

/// `Tr(X Y)` without forming the product.
fn trace_prod(x: &CMat, y: &CMat) -> C64 {
    let mut acc = C64::ZERO;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc
}

/// `N[j][i] = Tr(L A^j R A^{i†})`, so that `Tr(L T_O(R)) = Tr(N O)`.
fn end_vector(probe: &Probe<'_>, l: Option<&CMat>, r: &CMat) -> CMat {
    let a = probe.state().tensor.mats();
    let d = a.len();
    let left: Vec<CMat> = a
        .iter()
        .map(|aj| match l {
            Some(l) => l * aj * r,
            None => aj * r,
        })
        .collect();
    CMat::from_fn(d, d, |j, i| {
        let mut acc = C64::ZERO;
        let ai = &a[i];
        let bj = &left[j];
        for p in 0..ai.nrows() {
            for q in 0..ai.ncols() {
                acc += bj[(p, q)] * ai[(p, q)].conj();
            }
        }
        acc
    })
}

/// The dominant sector of `x`, provided every other sector component is
/// below `PURITY_TOL · scale` and negligible next to the dominant one.
fn pure_sector(rep: &OnsiteRep, x: &CMat, scale: f64) -> Option<Character> {
    let group = rep.group();
    let conjugated: Vec<CMat> = group.elements().iter().map(|h| rep.get(h).adjoint() * x * rep.get(h)).collect();
    let inv = cr(1.0 / group.order() as f64);
    let weights: Vec<f64> = group
        .characters()
        .iter()
        .map(|alpha| {
            let mut acc = CMat::zeros(x.nrows(), x.ncols());
            for (h, y) in group.elements().iter().zip(&conjugated) {
                linalg::axpy(&mut acc, group.character_value(alpha, h).expect("same group").conj() * inv, y);
            }
            acc.norm_max()
        })
        .collect();
    let best = (0..weights.len()).max_by(|&a, &b| weights[a].total_cmp(&weights[b]))?;
    let rest = weights.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, w)| *w).fold(0.0, f64::max);
    (rest <= PURITY_TOL * scale && rest <= 1e-3 * weights[best]).then(|| group.character_at(best))
}

struct Column {
    report: ColumnReport,
    /// Channel-evolved end vectors and the normalising overlap.
    ends: Option<(CMat, CMat, C64)>,
}

fn spectral_column(probe: &Probe<'_>, g: &GroupElement) -> Result<Column> {
    let rep = &probe.state().rep;
    let group = rep.group();
    let bond = probe.state().tensor.bond_dim();
    let n_chars = group.order();
    let mut report = ColumnReport {
        element: g.clone(),
        modulus: 0.0,
        indeterminate: false,
        end_weight: 0.0,
        spectral: None,
        sampled: None,
        sampled_max: vec![0.0; n_chars],
    };
    let m = probe.bulk(g);
    let lead = probe.bulk_leading(&m)?;
    report.modulus = lead.modulus();
    if report.modulus < 1.0 - GRAY_ZONE {
        return Ok(Column { report, ends: None });
    }
    report.indeterminate = report.modulus < 1.0 - super::string::UNIMODULAR_TOL;
    if lead.degenerate {
        return Err(Error::Degenerate { gap: lead.gap() });
    }
    let rm = linalg::unvec_rm(&lead.right, bond, bond);
    let lm = linalg::unvec_rm(&lead.left, bond, bond);
    let n_l = end_vector(probe, None, &rm);
    let n_r = end_vector(probe, Some(&linalg::transpose(&lm)), &probe.spectra.bounds.rho_r);
    let (e_l, e_r) = (probe.schrodinger(&n_l), probe.schrodinger(&n_r));
    let weight = |e: &CMat, n: &CMat| if n.norm_max() == 0.0 { 0.0 } else { e.norm_max() / n.norm_max() };
    report.end_weight = weight(&e_l, &n_l).min(weight(&e_r, &n_r));
    if report.end_weight <= END_FLOOR {
        return Ok(Column { report, ends: None });
    }
    let left_sector = pure_sector(rep, &e_l, n_l.norm_max())
        .ok_or_else(|| Error::MalformedPattern(format!("left end vector of column {g} is not character-pure")))?;
    let right_sector = pure_sector(rep, &e_r, n_r.norm_max())
        .ok_or_else(|| Error::MalformedPattern(format!("right end vector of column {g} is not character-pure")))?;
    let star = group.char_conj(&left_sector);
    if right_sector != star {
        return Err(Error::MalformedPattern(format!(
            "column {g}: left end selects {star} but right end selects {}",
            group.char_conj(&right_sector)
        )));
    }
    report.spectral = Some(star);
    Ok(Column { report, ends: Some((e_l, e_r, lead.overlap())) })
}

/// Measures the pattern of zeros of a state, optionally after a channel,
/// with default sampling options.
pub fn pattern_extract(state: &SymmetricMps, ch: Option<&dyn Channel>) -> Result<PatternReport> {
    pattern_extract_with(&Probe::new(state, ch)?, &ExtractOptions::default())
}

/// Two routes to the stars of every column `g`:
///
/// * spectral: the leading eigenvectors of `T_{M_g}` define end vectors
///   `N_l, N_r` with `⟨s⟩ = Tr(N_l O^l) Tr(N_r O^r) / (l·r)` at `N = ∞`;
///   pushed through the channel they must lie in a single sector, which is
///   the star;
/// * sampled: `samples` random operators per sector as generic ends, a star
///   wherever the largest `|⟨s⟩|` exceeds `1e-8`.
///
/// The sampled route works with absolute values, so columns whose ends the
/// channel damps below about `1e-4` show up as empty there while the spectral
/// route still resolves them; `routes_agree` reports the difference.
///
/// A column with leading modulus below `1 − 1e-8`, or whose end vectors the
/// channel annihilates, has no star.
pub fn pattern_extract_with(probe: &Probe<'_>, opts: &ExtractOptions) -> Result<PatternReport> {
    let rep = &probe.state().rep;
    let group = rep.group().clone();
    let chars = group.characters();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let lefts = sector_samples(rep, opts.samples, &mut rng);
    let rights = sector_samples(rep, opts.samples, &mut rng);
    let mut columns = Vec::with_capacity(group.order());
    for g in group.elements() {
        let Column { mut report, ends } = spectral_column(probe, &g)?;
        if let Some((e_l, e_r, overlap)) = ends {
            for (ai, alpha) in chars.iter().enumerate() {
                let conj = group.character_index(&group.char_conj(alpha));
                let best = lefts[ai]
                    .iter()
                    .zip(&rights[conj])
                    .map(|(ol, or)| (trace_prod(&e_l, ol) * trace_prod(&e_r, or) / overlap).norm())
                    .fold(0.0, f64::max);
                report.sampled_max[ai] = best;
            }
            let hits: Vec<usize> = (0..chars.len()).filter(|&i| report.sampled_max[i] > ZERO_THRESHOLD).collect();
            if hits.len() > 1 {
                return Err(Error::MalformedPattern(format!("column {g} has {} sampled stars", hits.len())));
            }
            report.sampled = hits.first().map(|&i| chars[i].clone());
        }
        columns.push(report);
    }
    let routes_agree = columns.iter().all(|c| c.spectral == c.sampled);
    let pattern = PatternOfZeros::new(&group, columns.iter().map(|c| c.spectral.clone()).collect())?;
    let (invariant, invariant_error) = match invariant_from_pattern(&pattern) {
        Ok(k) => (Some(k), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(PatternReport { pattern, invariant, invariant_error, columns, routes_agree, options: *opts })
}
