//! `coherence-bounds`: validate paired systems, compute coherences, certify
//! the uncertainty inequality on signals and search for its tightness.

mod manifest;
mod run;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence_bounds::{Error, Family, FamilyDescriptor};
use serde_json::Value;

use manifest::{Command, Inputs, OutputFormat, Parameters, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "coherence-bounds", version, about = "Uncertainty bounds for pairs of paired systems")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Check the pairing hypothesis of a system or bisystem file.
    Validate {
        #[arg(long)]
        system: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sub- and cross-coherences of a bisystem.
    Coherence {
        #[command(flatten)]
        input: SystemInput,
        #[command(flatten)]
        common: Common,
    },
    /// Certify the sparsity or concentration bound on a signal.
    Verify {
        #[command(flatten)]
        input: SystemInput,
        /// Signal file.
        #[arg(long, conflicts_with = "sample")]
        signal: Option<PathBuf>,
        /// Draw the signal from the admissible space with this seed.
        #[arg(long)]
        sample: Option<u64>,
        /// Comma-separated index set for the first system, e.g. "0,2".
        #[arg(long, requires = "set_n")]
        set_m: Option<String>,
        /// Comma-separated index set for the second system.
        #[arg(long, requires = "set_m")]
        set_n: Option<String>,
        /// Verify this many sampled signals, seeds starting at --sample.
        #[arg(long, requires = "sample")]
        trials: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Minimal sparsity product over the admissible space.
    Search {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long, default_value_t = coherence_bounds::tolerances::SEARCH_GUARD)]
        guard: usize,
        /// Disable the parallel pattern scan.
        #[arg(long)]
        serial: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a bisystem from a family.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Directory for bisystem.json, descriptor.json and manifest.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw an admissible signal.
    Sample {
        #[command(flatten)]
        input: SystemInput,
        #[arg(long, default_value_t = 0)]
        sample: u64,
        /// Write the signal file here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Re-run the manifest stored in a manifest or report file.
    Replay {
        file: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SystemInput {
    /// Bisystem file.
    #[arg(long, conflicts_with_all = ["descriptor", "family"])]
    system: Option<PathBuf>,
    /// Family descriptor file.
    #[arg(long, conflicts_with = "family")]
    descriptor: Option<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyName {
    IdentityPair,
    DftPair,
    RotatedPair,
    SubspaceUnion,
    Perturbed,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long)]
    family: Option<FamilyName>,
    #[arg(long)]
    d: Option<usize>,
    /// Rotation angle in degrees.
    #[arg(long)]
    angle: Option<f64>,
    #[arg(long)]
    split: Option<usize>,
    /// Base family of `perturbed`.
    #[arg(long)]
    base: Option<FamilyName>,
    #[arg(long)]
    magnitude: Option<f64>,
    #[arg(long, env = "COHERENCE_BOUNDS_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    tol_hyp: Option<f64>,
    #[arg(long)]
    tol_fp: Option<f64>,
    #[arg(long)]
    tol_cert: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

fn parse_set(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| Error::Parameter(format!("bad index {t:?}: {e}"))))
        .collect()
}

fn require<T>(v: Option<T>, name: &str, family: &str) -> Result<T, Error> {
    v.ok_or_else(|| Error::Parameter(format!("family {family} needs --{name}")))
}

fn build_family(name: FamilyName, a: &FamilyArgs, nested: bool) -> Result<Family, Error> {
    let label = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let d = || require(a.d, "d", &label);
    Ok(match name {
        FamilyName::IdentityPair => Family::IdentityPair { d: d()? },
        FamilyName::DftPair => Family::DftPair { d: d()? },
        FamilyName::RotatedPair => Family::RotatedPair { d: d()?, angle: require(a.angle, "angle", "rotated_pair")? },
        FamilyName::SubspaceUnion => {
            Family::SubspaceUnion { d: d()?, split: require(a.split, "split", "subspace_union")? }
        }
        FamilyName::Perturbed => {
            if nested {
                return Err(Error::Parameter("perturbed cannot be its own base".into()));
            }
            let base = require(a.base, "base", "perturbed")?;
            Family::Perturbed {
                base: Box::new(build_family(base, a, true)?),
                magnitude: require(a.magnitude, "magnitude", "perturbed")?,
            }
        }
    })
}

fn descriptor_from(a: &FamilyArgs) -> Result<Option<FamilyDescriptor>, Error> {
    a.family
        .map(|name| Ok(FamilyDescriptor { family: build_family(name, a, false)?, seed: a.seed }))
        .transpose()
}

fn load_descriptor(path: &PathBuf) -> Result<FamilyDescriptor, Error> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn system_inputs(s: &SystemInput) -> Result<Inputs, Error> {
    let descriptor = match &s.descriptor {
        Some(p) => Some(load_descriptor(p)?),
        None => descriptor_from(&s.family)?,
    };
    Ok(Inputs { system: s.system.clone(), descriptor, ..Inputs::default() })
}

fn parameters(c: &Common) -> Parameters {
    let mut p = Parameters::default();
    p.eta = c.eta.unwrap_or(p.eta);
    p.tol_hyp = c.tol_hyp.unwrap_or(p.tol_hyp);
    p.tol_fp = c.tol_fp.unwrap_or(p.tol_fp);
    p.tol_cert = c.tol_cert.unwrap_or(p.tol_cert);
    p.tol_rank = c.tol_rank.unwrap_or(p.tol_rank);
    p.format = c.format;
    p
}

fn check_parameters(p: &Parameters) -> Result<(), Error> {
    for (name, v) in [
        ("eta", p.eta),
        ("tol-hyp", p.tol_hyp),
        ("tol-fp", p.tol_fp),
        ("tol-cert", p.tol_cert),
        ("tol-rank", p.tol_rank),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Parameter(format!("--{name} must be finite and non-negative")));
        }
    }
    Ok(())
}

fn manifest_of(sub: Sub) -> Result<RunManifest, Error> {
    let m = match sub {
        Sub::Validate { system, common } => RunManifest::new(
            Command::Validate,
            Inputs { system: Some(system), ..Inputs::default() },
            parameters(&common),
        ),
        Sub::Coherence { input, common } => {
            RunManifest::new(Command::Coherence, system_inputs(&input)?, parameters(&common))
        }
        Sub::Verify { input, signal, sample, set_m, set_n, trials, common } => {
            let mut inputs = system_inputs(&input)?;
            inputs.signal = signal;
            inputs.sample_seed = sample;
            inputs.set_m = set_m.as_deref().map(parse_set).transpose()?;
            inputs.set_n = set_n.as_deref().map(parse_set).transpose()?;
            let mut p = parameters(&common);
            p.trials = trials;
            RunManifest::new(Command::Verify, inputs, p)
        }
        Sub::Search { input, guard, serial, common } => {
            let mut p = parameters(&common);
            p.guard = guard;
            p.parallel = !serial;
            RunManifest::new(Command::Search, system_inputs(&input)?, p)
        }
        Sub::Generate { family, out, common } => {
            let descriptor = descriptor_from(&family)?
                .ok_or_else(|| Error::Parameter("generate needs --family".into()))?;
            RunManifest::new(
                Command::Generate,
                Inputs { descriptor: Some(descriptor), out, ..Inputs::default() },
                parameters(&common),
            )
        }
        Sub::Sample { input, sample, out, common } => {
            let mut inputs = system_inputs(&input)?;
            inputs.sample_seed = Some(sample);
            inputs.out = out;
            RunManifest::new(Command::Sample, inputs, parameters(&common))
        }
        Sub::Replay { file } => {
            let v: Value = serde_json::from_str(&fs::read_to_string(&file)?)?;
            let v = v.get("manifest").cloned().unwrap_or(v);
            serde_json::from_value(v)?
        }
    };
    check_parameters(&m.parameters)?;
    Ok(m)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { run::exit::STRUCTURAL } else { run::exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = manifest_of(cli.command).and_then(|m| {
        let outcome = run::execute(&m)?;
        Ok((run::render(&m, &outcome.report)?, outcome.code))
    });
    match result {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(run::exit_code(&e) as u8)
        }
    }
}
