//! Named experiments that regenerate the figure and table data.

use crate::commands::{series_csv, table_csv, Global};
use crate::output::{num, Csv, Run, RunManifest};
use anyhow::{bail, Result};
use serde_json::json;
use sptchan::channel::{zoo, Channel, QuantumChannel};
use sptchan::group::{complexity, is_mnc, pullback, Cocycle, Endomorphism, FiniteAbelianGroup};
use sptchan::mps::{aklt, random_symmetric_mps, spin1, StateSpectra};
use sptchan::observables::{
    inaccessible_entanglement, irrep_probabilities_with, string_table, time_series, Length, Probe, StringSpec,
    TableMode,
};
use std::path::Path;

pub const PRESETS: [&str; 5] = ["fig3_decay", "fig4_7_irreps", "fig2_orbits", "table_patternSS", "table_depolarising"];

pub fn run_preset(global: &Global, name: &str, dir: &Path) -> Result<RunManifest> {
    let mut run = Run::new(&format!("run-preset {name}"), global.seed, global.tol, global.force);
    let mut params = match name {
        "fig3_decay" => fig3_decay(&mut run, dir)?,
        "fig4_7_irreps" => fig4_7_irreps(&mut run, dir, global.seed)?,
        "fig2_orbits" => fig2_orbits(&mut run, dir)?,
        "table_patternSS" => table_pattern_ss(&mut run, dir)?,
        "table_depolarising" => table_depolarising(&mut run, dir)?,
        _ => bail!("unknown preset '{name}' (known: {})", PRESETS.join(", ")),
    };
    params["preset"] = json!(name);
    run.finish(&dir.join("manifest.json"), params)
}

fn aklt_zz() -> StringSpec {
    let st = aklt();
    let rz = &sptchan::mps::spin1_pi_rotations()[2];
    let g = st
        .group()
        .elements()
        .into_iter()
        .find(|g| sptchan::linalg::max_diff(st.rep.get(g), rz) < 1e-12)
        .expect("AKLT carries the π rotations");
    let [.., sz] = spin1();
    StringSpec::new(g, sz.clone(), sz, Length::Infinite).expect("valid spec")
}

fn fig3_decay(run: &mut Run, dir: &Path) -> Result<serde_json::Value> {
    let steps = 10;
    let st = aklt();
    let spec = aklt_zz();
    let channels = [
        ("dephasing", 0.5, zoo::dephasing(0.5)?),
        ("dephasing", 1.0, zoo::dephasing(1.0)?),
        ("depolarising", 0.5, zoo::depolarising(3, 0.5)?),
    ];
    let mut csv = Csv::new(&["channel", "lambda", "t", "re", "im", "abs"]);
    for (name, lambda, ch) in &channels {
        let values = time_series(&st, ch, steps, &spec)?;
        for (t, v) in values.iter().enumerate() {
            csv.row([name.to_string(), num(*lambda), t.to_string(), num(v.re), num(v.im), num(v.norm())]);
        }
        if *name == "dephasing" && *lambda == 0.5 {
            run.add(dir.join("series.csv"), series_csv(&values));
        }
    }
    run.add(dir.join("series_all.csv"), csv.into_bytes());
    Ok(json!({ "state": "aklt", "string": "s_zz", "length": "inf", "steps": steps,
        "channels": channels.iter().map(|(n, l, _)| json!({ "name": n, "lambda": l })).collect::<Vec<_>>() }))
}

fn fig4_7_irreps(run: &mut Run, dir: &Path, seed: u64) -> Result<serde_json::Value> {
    let group = zoo::zoo_group();
    let rep = zoo::zoo_rep();
    let (bond, length) = (16, 64);
    let channels: Vec<(&str, QuantumChannel)> = vec![
        ("identity", QuantumChannel::identity(16)),
        ("1-SS dephasing", zoo::dephasing_group(&rep, 0.5)?),
        ("0-SS", zoo::k_ss(0)?),
        ("2-SS", zoo::k_ss(2)?),
        ("3-SS", zoo::k_ss(3)?),
        ("1-WS depolarising", zoo::ws_depolarising16(0.5)?),
    ];
    let mut probs = Csv::new(&["k", "channel", "irrep", "p"]);
    let mut entropy = Csv::new(&["k", "channel", "bits", "lower", "upper"]);
    // trivial, maximally non-commutative and intermediate classes
    for k in [0usize, 1, 2] {
        let st = random_symmetric_mps(&group, k, bond, 16, seed)?;
        let omega = Cocycle::new(&group, k as i64)?;
        let (lower, upper) = sptchan::observables::entanglement_bounds(&omega);
        let mut spectra = StateSpectra::new(&st)?;
        for (name, ch) in &channels {
            let probe = Probe::with_channel(spectra, Some(ch as &dyn Channel))?;
            let p = irrep_probabilities_with(&probe, Length::Finite(length))?;
            spectra = probe.into_spectra();
            for (i, x) in p.p.iter().enumerate() {
                probs.row([k.to_string(), name.to_string(), i.to_string(), num(*x)]);
            }
            entropy.row([k.to_string(), name.to_string(), num(inaccessible_entanglement(&p)), num(lower), num(upper)]);
        }
    }
    run.add(dir.join("irreps.csv"), probs.into_bytes());
    run.add(dir.join("entanglement.csv"), entropy.into_bytes());
    Ok(json!({ "group": [4, 4], "k": [0, 1, 2], "bond": bond, "dim": 16, "length": length, "seed": seed,
        "channels": channels.iter().map(|(n, _)| n).collect::<Vec<_>>() }))
}

fn fig2_orbits(run: &mut Run, dir: &Path) -> Result<serde_json::Value> {
    let n = 12;
    let group = FiniteAbelianGroup::square(n)?;
    for det in [5i64, 3] {
        let sigma = Endomorphism::from_matrix(n, [det, 0, 0, 1])?;
        let mut csv = Csv::new(&["k", "image", "complexity", "image_complexity", "mnc", "image_mnc"]);
        for k in 0..n {
            let omega = Cocycle::new(&group, k as i64)?;
            let image = pullback(&sigma, &omega)?;
            csv.row([
                k.to_string(),
                image.k().to_string(),
                complexity(&omega).to_string(),
                complexity(&image).to_string(),
                is_mnc(&omega).to_string(),
                is_mnc(&image).to_string(),
            ]);
        }
        run.add(dir.join(format!("orbits_det{det}.csv")), csv.into_bytes());
    }
    Ok(json!({ "n": n, "endomorphisms": [[5, 0, 0, 1], [3, 0, 0, 1]] }))
}

fn table_pattern_ss(run: &mut Run, dir: &Path) -> Result<serde_json::Value> {
    let (lambda, length) = (0.5, 64);
    let ch = zoo::dephasing(lambda)?;
    let table = string_table(&aklt(), Some(&ch), Length::Finite(length), TableMode::Spin1)?;
    run.add(dir.join("table_patternSS.csv"), table_csv(&table));
    Ok(json!({ "state": "aklt", "channel": "dephasing", "lambda": lambda, "length": length }))
}

fn table_depolarising(run: &mut Run, dir: &Path) -> Result<serde_json::Value> {
    let lambdas = [0.1, 0.3];
    let lengths = [4usize, 8, 20];
    let st = aklt();
    let mut csv = Csv::new(&["lambda", "length", "bulk", "end", "re", "im", "abs"]);
    for &lambda in &lambdas {
        let ch = zoo::depolarising(3, lambda)?;
        for &n in &lengths {
            let table = string_table(&st, Some(&ch), Length::Finite(n), TableMode::Spin1)?;
            for (b, row) in table.values.iter().enumerate() {
                for (e, v) in row.iter().enumerate() {
                    csv.row([
                        num(lambda),
                        n.to_string(),
                        table.bulk_labels[b].clone(),
                        table.end_labels[e].clone(),
                        num(v.value.re),
                        num(v.value.im),
                        num(v.value.norm()),
                    ]);
                }
            }
        }
    }
    run.add(dir.join("table_depolarising.csv"), csv.into_bytes());
    Ok(json!({ "state": "aklt", "channel": "depolarising", "lambda": lambdas, "length": lengths }))
}
