//! Executes a [`RunManifest`] and renders its report.

use std::fs;
use std::path::Path;

use coherence_bounds::formats::{load_bisystem, load_signal, BiSystemFile, SignalFile, SystemFile, to_json_pretty};
use coherence_bounds::{
    admissible_space, coherence_profile, exhaustive_verify, min_sparsity_product, sample_admissible,
    BiSystem, Error, PairedSystem, PreparedBiSystem, SearchOptions, Signal,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::manifest::{Command, OutputFormat, RunManifest};

/// Stable process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const STRUCTURAL: i32 = 1;
    pub const HYPOTHESIS: i32 = 2;
    pub const NO_ADMISSIBLE: i32 = 3;
    pub const GUARD: i32 = 4;
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis { .. } => exit::HYPOTHESIS,
        Error::NoAdmissibleSignal => exit::NO_ADMISSIBLE,
        Error::GuardExceeded { .. } => exit::GUARD,
        Error::Shape(_) | Error::Degenerate(_) | Error::Parameter(_) | Error::Parse(_) | Error::Io(_) => {
            exit::STRUCTURAL
        }
    }
}

pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Error> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn resolve_bisystem(m: &RunManifest) -> Result<BiSystem, Error> {
    match (&m.inputs.system, &m.inputs.descriptor) {
        (Some(path), None) => load_bisystem(path),
        (None, Some(desc)) => desc.generate(),
        (Some(_), Some(_)) => Err(Error::Parameter("give either a system file or a family, not both".into())),
        (None, None) => Err(Error::Parameter("no input: pass --system, --descriptor, or --family".into())),
    }
}

pub fn execute(m: &RunManifest) -> Result<Outcome, Error> {
    match m.command {
        Command::Validate => validate(m),
        Command::Coherence => coherence(m),
        Command::Verify => verify(m),
        Command::Search => search(m),
        Command::Generate => generate(m),
        Command::Sample => sample(m),
    }
}

fn validate(m: &RunManifest) -> Result<Outcome, Error> {
    let path = m
        .inputs
        .system
        .as_ref()
        .ok_or_else(|| Error::Parameter("validate needs a system file".into()))?;
    let raw: Value = serde_json::from_str(&fs::read_to_string(path)?)?;
    let base = path.parent().unwrap_or(Path::new(""));
    let systems: Vec<PairedSystem> = if raw.get("first").is_some() {
        let file: BiSystemFile = serde_json::from_value(raw)?;
        let b = file.to_bisystem(base)?;
        vec![b.first().clone(), b.second().clone()]
    } else {
        let file: SystemFile = serde_json::from_value(raw)?;
        vec![file.to_system(base)?]
    };
    let reports: Vec<_> = systems.iter().map(|p| p.validate_pairing(m.parameters.tol_hyp)).collect();
    let ok = reports.iter().all(|r| r.ok);
    Ok(Outcome {
        report: json!({ "ok": ok, "systems": to_value(&reports)? }),
        code: if ok { exit::OK } else { exit::HYPOTHESIS },
    })
}

fn coherence(m: &RunManifest) -> Result<Outcome, Error> {
    let b = resolve_bisystem(m)?;
    Ok(Outcome {
        report: json!({
            "d": b.dim(),
            "n": b.first().len(),
            "m": b.second().len(),
            "field": to_value(&b.field())?,
            "coherences": to_value(&coherence_profile(&b))?,
        }),
        code: exit::OK,
    })
}

fn parse_signal(m: &RunManifest, b: &BiSystem) -> Result<(Signal, Option<usize>), Error> {
    let p = &m.parameters;
    match (&m.inputs.signal, m.inputs.sample_seed) {
        (Some(path), None) => Ok((load_signal(path, p.eta)?, None)),
        (None, Some(seed)) => {
            let space = admissible_space(b, p.tol_rank);
            Ok((sample_admissible(&space, seed)?, Some(space.dim())))
        }
        _ => Err(Error::Parameter("verify needs exactly one of --signal or --sample".into())),
    }
}

fn verify(m: &RunManifest) -> Result<Outcome, Error> {
    let b = resolve_bisystem(m)?;
    let p = &m.parameters;
    let tol = p.tolerances();

    if let Some(trials) = p.trials {
        let seed = m
            .inputs
            .sample_seed
            .ok_or_else(|| Error::Parameter("--trials needs --sample as the first seed".into()))?;
        let space = admissible_space(&b, p.tol_rank);
        let summary = exhaustive_verify(&b, &space, trials, seed, tol)?;
        let code = if summary.all_passed() { exit::OK } else { exit::HYPOTHESIS };
        return Ok(Outcome {
            report: json!({ "admissible_dim": space.dim(), "summary": to_value(&summary)? }),
            code,
        });
    }

    let (x, admissible_dim) = parse_signal(m, &b)?;
    if x.dim() != b.dim() {
        return Err(Error::Shape(format!("signal has dimension {}, system {}", x.dim(), b.dim())));
    }
    let prepared = PreparedBiSystem::new(&b, tol);
    let analyzed = prepared.analyze(&x)?;
    let cert = match (&m.inputs.set_m, &m.inputs.set_n) {
        (None, None) => analyzed.sparsity_certificate(),
        (Some(set_m), Some(set_n)) => analyzed.concentration_certificate(set_m, set_n)?,
        _ => return Err(Error::Parameter("--set-m and --set-n must be given together".into())),
    };
    let code = if cert.hypothesis_ok && cert.satisfied { exit::OK } else { exit::HYPOTHESIS };
    let mut report = json!({ "certificate": to_value(&cert)?, "signal": to_value(&SignalFile::from_signal(&x))? });
    if let Some(w) = admissible_dim {
        report["admissible_dim"] = json!(w);
    }
    Ok(Outcome { report, code })
}

fn search(m: &RunManifest) -> Result<Outcome, Error> {
    let b = resolve_bisystem(m)?;
    let p = &m.parameters;
    let options = SearchOptions {
        eta: p.eta,
        tol_rank: p.tol_rank,
        tol_cert: p.tol_cert,
        guard: p.guard,
        parallel: p.parallel,
    };
    // check the guard before the null-space work
    let total = b.first().len() + b.second().len();
    if total > options.guard {
        return Err(Error::GuardExceeded { requested: total, guard: options.guard });
    }
    let space = admissible_space(&b, p.tol_rank);
    let report = min_sparsity_product(&b, &space, options)?;
    Ok(Outcome {
        report: json!({
            "admissible_dim": space.dim(),
            "consistent": report.consistent(p.tol_cert),
            "tightness": to_value(&report)?,
        }),
        code: exit::OK,
    })
}

fn generate(m: &RunManifest) -> Result<Outcome, Error> {
    let desc = m
        .inputs
        .descriptor
        .as_ref()
        .ok_or_else(|| Error::Parameter("generate needs a family".into()))?;
    let b = desc.generate()?;
    let bisystem = BiSystemFile::from_bisystem(&b);
    let space = admissible_space(&b, m.parameters.tol_rank);
    let mut report = json!({
        "descriptor": to_value(desc)?,
        "admissible_dim": space.dim(),
        "coherences": to_value(&coherence_profile(&b))?,
    });
    match &m.inputs.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("bisystem.json"), to_json_pretty(&bisystem)?)?;
            fs::write(dir.join("descriptor.json"), to_json_pretty(desc)?)?;
            fs::write(dir.join("manifest.json"), to_json_pretty(m)?)?;
            report["files"] = json!(["bisystem.json", "descriptor.json", "manifest.json"]);
        }
        None => report["bisystem"] = to_value(&bisystem)?,
    }
    Ok(Outcome { report, code: exit::OK })
}

fn sample(m: &RunManifest) -> Result<Outcome, Error> {
    let b = resolve_bisystem(m)?;
    let seed = m.inputs.sample_seed.unwrap_or(0);
    let space = admissible_space(&b, m.parameters.tol_rank);
    let x = sample_admissible(&space, seed)?;
    let signal = SignalFile::from_signal(&x);
    if let Some(path) = &m.inputs.out {
        fs::write(path, to_json_pretty(&signal)?)?;
    }
    Ok(Outcome {
        report: json!({ "admissible_dim": space.dim(), "signal": to_value(&signal)? }),
        code: exit::OK,
    })
}

/// `{"manifest": ..., "report": ...}` in the requested format.
pub fn render(m: &RunManifest, report: &Value) -> Result<String, Error> {
    let envelope = json!({ "manifest": to_value(m)?, "report": report });
    match m.parameters.format {
        OutputFormat::Json => to_json_pretty(&envelope),
        OutputFormat::Text => {
            let mut rows = Vec::new();
            flatten("", &envelope, &mut rows);
            let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            Ok(rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect())
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(&key(k), child, out);
            }
        }
        // short numeric arrays read better on one line
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array() || i.as_array().is_some_and(|a| a.len() == 2 && a.iter().all(Value::is_number))) => {
            out.push((prefix.to_string(), Value::Array(items.clone()).to_string()));
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        other => out.push((prefix.to_string(), other.to_string())),
    }
}
