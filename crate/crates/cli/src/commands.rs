//! Subcommands other than the presets.

use crate::io::{self, ChannelFile};
use crate::output::{num, Csv, Run};
use anyhow::{bail, Context, Result};
use serde_json::{json, Value};
use sptchan::channel::{classify_with, lindblad_symmetry, zoo, Channel, SymmetryReport, Tolerances, ZooItem};
use sptchan::group::{
    complexity, is_mnc, pattern_of_zeros, pullback, transform_pattern, Cocycle, Endomorphism, FiniteAbelianGroup,
    GroupElement, PatternOfZeros,
};
use sptchan::linalg;
use sptchan::mps::{extract_virtual_rep, random_symmetric_mps, spin1, spin1_pi_rotations, SymmetricMps};
use sptchan::observables::{
    irrep_probabilities, pattern_extract_with, string_table, time_series, ExtractOptions, Length, Probe, StringOrderTable,
    StringSpec, TableMode,
};
use std::path::{Path, PathBuf};

/// Flags shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Global {
    pub seed: u64,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub force: bool,
}

impl Global {
    /// `--tol` sets the commutation and phase thresholds; the genericness
    /// floor keeps its ratio to them.
    pub fn tolerances(&self) -> Tolerances {
        let base = Tolerances::default();
        match self.tol {
            Some(t) => Tolerances { commutation: t, phase: t, generic_floor: t * base.generic_floor / base.commutation },
            None => base,
        }
    }
}

pub fn parse_pair(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().with_context(|| format!("'{s}' is not a comma-separated list of integers")))
        .collect()
}

pub fn parse_group(s: &str) -> Result<FiniteAbelianGroup> {
    Ok(FiniteAbelianGroup::new(parse_pair(s)?)?)
}

/// `a:b` labels keep CSV headers free of commas.
pub fn element_label(g: &GroupElement) -> String {
    g.residues().iter().map(|r| r.to_string()).collect::<Vec<_>>().join(":")
}

pub fn pattern_csv(zeta: &PatternOfZeros) -> Vec<u8> {
    let group = zeta.group();
    let mut header = vec!["character".to_string()];
    header.extend(group.elements().iter().map(element_label));
    let mut csv = Csv::new(&header.iter().map(String::as_str).collect::<Vec<_>>());
    for (alpha, row) in group.characters().iter().zip(zeta.array()) {
        let mut fields = vec![alpha.residues().iter().map(|r| r.to_string()).collect::<Vec<_>>().join(":")];
        fields.extend(row.iter().map(|&star| if star { "*" } else { "0" }.to_string()));
        csv.row(fields);
    }
    csv.into_bytes()
}

/// Writes a single-file result to `--out` (with a manifest beside it) or
/// prints it.
fn emit_one(global: &Global, command: &str, bytes: Vec<u8>, parameters: Value) -> Result<()> {
    match &global.out {
        Some(path) => {
            let mut run = Run::new(command, global.seed, global.tol, global.force);
            run.add(path.clone(), bytes);
            run.finish(&manifest_beside(path), parameters)?;
        }
        None => stdout(&bytes)?,
    }
    Ok(())
}

/// A closed pipe (`| head`) is not an error.
fn stdout(bytes: &[u8]) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(bytes).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn manifest_beside(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    path.with_file_name(format!("{stem}.manifest.json"))
}

fn json_bytes(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s.into_bytes()
}

/// A channel from `builtin:<zoo name>[:p1,p2,...]` or a JSON file. A
/// Lindbladian needs `time` and is exponentiated.
pub fn load_channel(arg: &str, time: Option<f64>) -> Result<Box<dyn Channel>> {
    match load_channel_item(arg)? {
        ChannelFile::Channel(ch) => {
            if time.is_some() {
                bail!("--time only applies to Lindbladians");
            }
            Ok(Box::new(ch))
        }
        ChannelFile::Lindbladian(lb) => {
            let t = time.context("a Lindbladian needs --time to define a channel")?;
            Ok(Box::new(lb.evolve(t)?))
        }
    }
}

fn load_channel_item(arg: &str) -> Result<ChannelFile> {
    match arg.strip_prefix("builtin:") {
        Some(spec) => {
            let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
            let params = if params.is_empty() {
                Vec::new()
            } else {
                params
                    .split(',')
                    .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad parameter '{p}' for {name}")))
                    .collect::<Result<Vec<_>>>()?
            };
            Ok(match zoo(name, &params)? {
                ZooItem::Channel(ch) => ChannelFile::Channel(ch),
                ZooItem::Lindbladian(lb) => ChannelFile::Lindbladian(lb),
            })
        }
        None => io::parse_channel_file(Path::new(arg)),
    }
}

pub fn cohomology(global: &Global, n: usize, k: i64, endo: Option<&str>) -> Result<()> {
    let group = FiniteAbelianGroup::square(n)?;
    let omega = Cocycle::new(&group, k)?;
    let zeta = pattern_of_zeros(&omega);
    let mut flags = json!({
        "n": n,
        "k": omega.k(),
        "complexity": complexity(&omega),
        "mnc": is_mnc(&omega),
    });
    let mut orbit = None;
    if let Some(e) = endo {
        let m: Vec<i64> = e
            .split(',')
            .map(|p| p.trim().parse::<i64>().with_context(|| format!("--endo expects a,b,c,d, got '{e}'")))
            .collect::<Result<_>>()?;
        let [a, b, c, d] = m[..] else { bail!("--endo expects four integers a,b,c,d, got '{e}'") };
        let sigma = Endomorphism::from_matrix(n, [a, b, c, d])?;
        let det = sigma.det().expect("square group");
        let pulled = pullback(&sigma, &omega)?;
        flags["endomorphism"] = json!({
            "matrix": sigma.matrix(),
            "det": det,
            "automorphism": sigma.is_automorphism(),
            "pulled_k": pulled.k(),
            "pulled_complexity": complexity(&pulled),
            "pulled_mnc": is_mnc(&pulled),
            "pattern_commutes": transform_pattern(&sigma, &zeta)? == pattern_of_zeros(&pulled),
        });
        let mut csv = Csv::new(&["k", "image", "complexity", "image_complexity"]);
        for j in 0..n {
            let w = Cocycle::new(&group, j as i64)?;
            let p = pullback(&sigma, &w)?;
            csv.row([j.to_string(), p.k().to_string(), complexity(&w).to_string(), complexity(&p).to_string()]);
        }
        orbit = Some(csv.into_bytes());
    }
    let params = json!({ "n": n, "k": k, "endo": endo });
    match &global.out {
        Some(dir) => {
            let mut run = Run::new("cohomology", global.seed, global.tol, global.force);
            run.add(dir.join("pattern.csv"), pattern_csv(&zeta));
            if let Some(bytes) = orbit {
                run.add(dir.join("orbits.csv"), bytes);
            }
            run.add(dir.join("cohomology.json"), json_bytes(&flags));
            run.finish(&dir.join("manifest.json"), params)?;
        }
        None => {
            stdout(&pattern_csv(&zeta))?;
            if let Some(bytes) = orbit {
                stdout(&bytes)?;
            }
            stdout(&json_bytes(&flags))?;
        }
    }
    Ok(())
}

pub fn random_state(global: &Global, group: &str, k: usize, bond: usize, dim: Option<usize>) -> Result<()> {
    let g = parse_group(group)?;
    let d = dim.unwrap_or(g.order());
    let st = random_symmetric_mps(&g, k, bond, d, global.seed)?;
    let params = json!({ "group": g.moduli(), "k": k, "bond": bond, "dim": d });
    emit_one(global, "random-state", (io::state_to_json(&st) + "\n").into_bytes(), params)
}

pub fn invariant(global: &Global, state: &str) -> Result<()> {
    let st = io::load_state(state)?;
    let vr = extract_virtual_rep(&st)?;
    let table: Vec<Vec<[f64; 2]>> =
        vr.commutator_table.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect();
    let doc = json!({
        "group": vr.group.moduli(),
        "elements": vr.group.elements().iter().map(element_label).collect::<Vec<_>>(),
        "commutator_table": table,
        "matched_k": vr.matched_k(1e-8),
        "residual": vr.residual,
    });
    emit_one(global, "invariant", json_bytes(&doc), json!({ "state": state }))
}

fn report_json(r: &SymmetryReport) -> Value {
    let theta = r.strong.as_ref().or(r.twist.as_ref().map(|t| &t.theta)).map(|p| p.theta.clone());
    json!({
        "weak": r.weak,
        "strong": r.strong.is_some(),
        "theta": theta,
        "twist_matrix": r.twist.as_ref().map(|t| t.sigma.matrix().to_vec()),
        "twist_det": r.twist.as_ref().and_then(|t| t.sigma.det()),
        "generic": r.genericness.as_ref().map(|g| g.generic),
        "generic_irreps": r.generic_irreps().iter().map(|c| c.residues().to_vec()).collect::<Vec<_>>(),
        "notes": r.notes,
        "tolerances": r.tolerances,
    })
}

pub fn classify(global: &Global, channel: &str, group: &str, rep: &str, time: Option<f64>) -> Result<()> {
    let g = parse_group(group)?;
    let item = load_channel_item(channel)?;
    let params = json!({ "channel": channel, "group": g.moduli(), "rep": rep, "time": time });
    let doc = match (item, time) {
        (ChannelFile::Lindbladian(lb), None) => {
            let rep = io::load_rep(rep, &g, lb.dim())?;
            let s = lindblad_symmetry(&lb, &rep)?;
            json!({ "kind": "lindbladian", "weak": s.weak, "strong": s.strong, "tolerances": global.tolerances() })
        }
        (item, time) => {
            let ch: Box<dyn Channel> = match item {
                ChannelFile::Channel(ch) if time.is_none() => Box::new(ch),
                ChannelFile::Channel(_) => bail!("--time only applies to Lindbladians"),
                ChannelFile::Lindbladian(lb) => Box::new(lb.evolve(time.expect("matched above"))?),
            };
            let rep = io::load_rep(rep, &g, ch.dim())?;
            report_json(&classify_with(ch.as_ref(), &rep, &global.tolerances())?)
        }
    };
    emit_one(global, "classify", json_bytes(&doc), params)
}

fn table_mode(st: &SymmetricMps, seed: u64) -> TableMode {
    let spin1 = st.tensor.physical_dim() == 3 && st.group().moduli() == [2, 2] && is_spin1_rep(st);
    if spin1 {
        TableMode::Spin1
    } else {
        TableMode::Sectors { seed }
    }
}

fn is_spin1_rep(st: &SymmetricMps) -> bool {
    let rots = spin1_pi_rotations();
    rots.iter().all(|r| st.rep.mats().iter().any(|u| linalg::max_diff(u, r) < 1e-12))
}

pub fn table_csv(table: &StringOrderTable) -> Vec<u8> {
    let mut csv = Csv::new(&["bulk", "end", "re", "im", "abs", "indeterminate"]);
    for (b, row) in table.values.iter().enumerate() {
        for (e, v) in row.iter().enumerate() {
            csv.row([
                table.bulk_labels[b].clone(),
                table.end_labels[e].clone(),
                num(v.value.re),
                num(v.value.im),
                num(v.value.norm()),
                v.indeterminate.to_string(),
            ]);
        }
    }
    csv.into_bytes()
}

pub fn string_table_cmd(global: &Global, state: &str, channel: Option<&str>, length: Length, time: Option<f64>) -> Result<()> {
    let st = io::load_state(state)?;
    let ch = channel.map(|c| load_channel(c, time)).transpose()?;
    let table = string_table(&st, ch.as_deref(), length, table_mode(&st, global.seed))?;
    let params = json!({ "state": state, "channel": channel, "length": length.to_string(), "time": time });
    emit_one(global, "string-table", table_csv(&table), params)
}

pub fn pattern(global: &Global, state: &str, channel: Option<&str>, time: Option<f64>, samples: usize) -> Result<()> {
    let st = io::load_state(state)?;
    let ch = channel.map(|c| load_channel(c, time)).transpose()?;
    let probe = Probe::new(&st, ch.as_deref())?;
    let report = pattern_extract_with(&probe, &ExtractOptions { samples, seed: global.seed })?;
    let doc = json!({
        "matched_k": report.invariant,
        "invariant_error": report.invariant_error,
        "routes_agree": report.routes_agree,
        "empty_columns": report.pattern.empty_columns().iter().map(element_label).collect::<Vec<_>>(),
        "columns": report.columns,
    });
    let params = json!({ "state": state, "channel": channel, "time": time, "samples": samples });
    match &global.out {
        Some(dir) => {
            let mut run = Run::new("pattern", global.seed, global.tol, global.force);
            run.add(dir.join("pattern.csv"), pattern_csv(&report.pattern));
            run.add(dir.join("pattern.json"), json_bytes(&doc));
            run.finish(&dir.join("manifest.json"), params)?;
        }
        None => {
            stdout(&pattern_csv(&report.pattern))?;
            stdout(format!("{}\n", json!({ "matched_k": report.invariant, "routes_agree": report.routes_agree })).as_bytes())?;
        }
    }
    Ok(())
}

pub fn irreps(global: &Global, state: &str, channel: Option<&str>, length: Length, time: Option<f64>) -> Result<()> {
    let st = io::load_state(state)?;
    let ch = channel.map(|c| load_channel(c, time)).transpose()?;
    let p = irrep_probabilities(&st, ch.as_deref(), length)?;
    let mut csv = Csv::new(&["irrep", "p"]);
    for (i, x) in p.p.iter().enumerate() {
        csv.row([i.to_string(), num(*x)]);
    }
    let params = json!({ "state": state, "channel": channel, "length": length.to_string(), "time": time });
    emit_one(global, "irreps", csv.into_bytes(), params)
}

/// The default string: `s_zz` on spin-1 states, otherwise identity ends
/// around the given element.
fn series_spec(st: &SymmetricMps, element: Option<&str>) -> Result<StringSpec> {
    let group = st.group();
    match element {
        Some(e) => {
            let r: Vec<i64> = parse_pair(e)?.into_iter().map(|x| x as i64).collect();
            Ok(StringSpec::bare(group.element(&r)?, st.tensor.physical_dim(), Length::Infinite)?)
        }
        None if is_spin1_rep(st) => {
            let rz = &spin1_pi_rotations()[2];
            let g = group.elements().into_iter().find(|g| linalg::max_diff(st.rep.get(g), rz) < 1e-12).expect("spin-1 rep");
            let [.., sz] = spin1();
            Ok(StringSpec::new(g, sz.clone(), sz, Length::Infinite)?)
        }
        None => bail!("--element is required for states other than spin-1 ones"),
    }
}

pub fn series_csv(values: &[sptchan::C64]) -> Vec<u8> {
    let mut csv = Csv::new(&["t", "re", "im", "abs"]);
    for (t, v) in values.iter().enumerate() {
        csv.row([t.to_string(), num(v.re), num(v.im), num(v.norm())]);
    }
    csv.into_bytes()
}

pub fn timeseries(
    global: &Global,
    state: &str,
    channel: &str,
    steps: usize,
    element: Option<&str>,
    time: Option<f64>,
) -> Result<()> {
    let st = io::load_state(state)?;
    let ch = load_channel(channel, time)?;
    let spec = series_spec(&st, element)?;
    let values = time_series(&st, ch.as_ref(), steps, &spec)?;
    let params = json!({ "state": state, "channel": channel, "steps": steps, "element": element, "time": time });
    emit_one(global, "timeseries", series_csv(&values), params)
}

/// Writes a built-in or file channel back out in the JSON channel format.
pub fn export_channel(global: &Global, channel: &str) -> Result<()> {
    let text = match load_channel_item(channel)? {
        ChannelFile::Channel(ch) => io::channel_to_json(&ch),
        ChannelFile::Lindbladian(lb) => io::lindbladian_to_json(&lb),
    };
    emit_one(global, "export-channel", (text + "\n").into_bytes(), json!({ "channel": channel }))
}
