//! JSON formats for channels, Lindbladians, states and representations.
//!
//! Complex numbers are `[re, im]` pairs and matrices are lists of rows.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sptchan::channel::{validate, Lindbladian, QuantumChannel, COMPLETENESS_TOL};
use sptchan::group::FiniteAbelianGroup;
use sptchan::linalg;
use sptchan::mps::{aklt, canonicalize, MpsTensor, OnsiteRep, SymmetricMps};
use sptchan::{CMat, C64};
use std::path::Path;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

/// Hermiticity tolerance for Hamiltonians read from disk.
const HERMITIAN_TOL: f64 = 1e-10;

pub fn matrix_to_json(m: &CMat) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

/// `rows` must be `dim × dim`; `what` names the field in error messages.
pub fn matrix_from_json(rows: &JsonMatrix, dim: usize, what: &str) -> Result<CMat> {
    if rows.len() != dim {
        bail!("{what}: expected {dim} rows, found {}", rows.len());
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != dim {
            bail!("{what}[{i}]: expected {dim} entries, found {}", row.len());
        }
    }
    Ok(CMat::from_fn(dim, dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelJson {
    dim: usize,
    kraus: Vec<JsonMatrix>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LindbladianJson {
    dim: usize,
    h: JsonMatrix,
    jumps: Vec<JsonMatrix>,
}

#[derive(Clone, Debug)]
pub enum ChannelFile {
    Channel(QuantumChannel),
    Lindbladian(Lindbladian),
}

pub fn channel_to_json(ch: &QuantumChannel) -> String {
    let dim = ch.kraus()[0].nrows();
    let doc = ChannelJson { dim, kraus: ch.kraus().iter().map(matrix_to_json).collect() };
    serde_json::to_string_pretty(&doc).expect("plain data")
}

pub fn lindbladian_to_json(lb: &Lindbladian) -> String {
    let doc = LindbladianJson {
        dim: lb.dim(),
        h: matrix_to_json(lb.hamiltonian()),
        jumps: lb.jumps().iter().map(matrix_to_json).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data")
}

/// Reads a channel or Lindbladian, telling them apart by their keys, and
/// enforces completeness or Hermiticity.
pub fn parse_channel_file(path: &Path) -> Result<ChannelFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_channel_str(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse_channel_str(text: &str) -> Result<ChannelFile> {
    let value: Value = serde_json::from_str(text)?;
    let obj = value.as_object().ok_or_else(|| anyhow!("top level must be a JSON object"))?;
    if obj.contains_key("kraus") {
        let doc: ChannelJson = serde_json::from_str(text)?;
        if doc.kraus.is_empty() {
            bail!("kraus: at least one operator is required");
        }
        let kraus = doc
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| matrix_from_json(k, doc.dim, &format!("kraus[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let report = validate(&kraus);
        if !report.pass {
            bail!(
                "kraus: operators are not complete, max |sum K^dag K - 1| deviation {:?} exceeds {COMPLETENESS_TOL:e}",
                report.deviation
            );
        }
        Ok(ChannelFile::Channel(QuantumChannel::new(kraus)?))
    } else if obj.contains_key("h") || obj.contains_key("jumps") {
        let doc: LindbladianJson = serde_json::from_str(text)?;
        let h = matrix_from_json(&doc.h, doc.dim, "h")?;
        let defect = linalg::hermiticity_defect(&h);
        if defect > HERMITIAN_TOL {
            bail!("h: matrix is not Hermitian, max deviation {defect:?}");
        }
        let jumps = doc
            .jumps
            .iter()
            .enumerate()
            .map(|(i, j)| matrix_from_json(j, doc.dim, &format!("jumps[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChannelFile::Lindbladian(Lindbladian::new(h, jumps)?))
    } else {
        bail!("expected either a \"kraus\" field (channel) or \"h\" and \"jumps\" fields (Lindbladian)")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateJson {
    group: Vec<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    dim: usize,
    bond: usize,
    /// `[d][D][D]`.
    tensor: Vec<JsonMatrix>,
    /// One matrix per group element, in canonical element order.
    rep: Vec<JsonMatrix>,
}

pub fn state_to_json(st: &SymmetricMps) -> String {
    let doc = StateJson {
        group: st.group().moduli().to_vec(),
        k: st.k,
        seed: st.seed,
        dim: st.tensor.physical_dim(),
        bond: st.tensor.bond_dim(),
        tensor: st.tensor.mats().iter().map(matrix_to_json).collect(),
        rep: st.rep.mats().iter().map(matrix_to_json).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("plain data")
}

pub fn parse_state_str(text: &str) -> Result<SymmetricMps> {
    let doc: StateJson = serde_json::from_str(text)?;
    if doc.tensor.len() != doc.dim {
        bail!("tensor: expected {} physical components, found {}", doc.dim, doc.tensor.len());
    }
    let mats = doc
        .tensor
        .iter()
        .enumerate()
        .map(|(i, a)| matrix_from_json(a, doc.bond, &format!("tensor[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let group = FiniteAbelianGroup::new(doc.group)?;
    let us = doc
        .rep
        .iter()
        .enumerate()
        .map(|(i, u)| matrix_from_json(u, doc.dim, &format!("rep[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    let mut tensor = MpsTensor::new(mats)?;
    if tensor.left_identity_defect() > 1e-10 {
        tensor = canonicalize(&tensor)?;
    }
    let mut st = SymmetricMps::new(tensor, OnsiteRep::new(&group, us)?)?;
    st.k = doc.k;
    st.seed = doc.seed;
    Ok(st)
}

/// `builtin:aklt` or a state file.
pub fn load_state(arg: &str) -> Result<SymmetricMps> {
    match arg.strip_prefix("builtin:") {
        Some("aklt") => Ok(aklt()),
        Some(other) => bail!("unknown builtin state '{other}' (known: aklt)"),
        None => {
            let text = std::fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?;
            parse_state_str(&text).with_context(|| format!("in {arg}"))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepJson {
    group: Vec<usize>,
    /// One matrix per group element, in canonical element order.
    mats: Vec<JsonMatrix>,
}

/// `builtin:spin1`, `builtin:regular` (diagonal regular rep of dimension
/// `dim`), or a file with `group` and `mats`.
pub fn load_rep(arg: &str, group: &FiniteAbelianGroup, dim: usize) -> Result<OnsiteRep> {
    let rep = match arg.strip_prefix("builtin:").unwrap_or(arg) {
        "spin1" => sptchan::mps::spin1_z2z2(),
        "regular" => OnsiteRep::regular_diagonal(group, dim)?,
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let doc: RepJson = serde_json::from_str(&text).with_context(|| format!("in {path}"))?;
            let file_group = FiniteAbelianGroup::new(doc.group)?;
            let mats = doc
                .mats
                .iter()
                .enumerate()
                .map(|(i, u)| matrix_from_json(u, dim, &format!("mats[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            OnsiteRep::new(&file_group, mats)?
        }
    };
    if rep.group() != group {
        bail!("representation is of Z{:?} but --group asks for Z{:?}", rep.group().moduli(), group.moduli());
    }
    if rep.dim() != dim {
        bail!("representation has dimension {} but the channel acts on d={dim}", rep.dim());
    }
    Ok(rep)
}
