//! Command-line front end. `run` returns the process exit code:
//! 0 when every check passes, 1 on a verification failure, 2 on a usage or
//! configuration error (reported as JSON on stderr).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::basis::{build_basis, verify_orthonormal, BasisLabel, HermitianBasis};
use crate::error::{Error, Result};
use crate::linalg::BipartiteOperator;
use crate::mum::{build_mums, kappa_opt, verify_mum};
use crate::report::{all_pass, matrix_to_csv, reports_to_csv, CheckReport};
use crate::reproduce::Reproduction;
use crate::rotations::{parse_rotation_list, verify_rotation, StarRotation};
use crate::verify::{
    block_positivity_search, check_positivity_condition, detect, search_decomposition,
    verify_decomposition, Verdict, SEESAW_ITERS, SEESAW_RESTARTS, STATE_TOL,
};
use crate::witness::{witness_w, witness_wtilde, wtilde_over_w, Provenance, WitnessSpec};

pub const SEED_ENV: &str = "MUMW_SEED";

#[derive(Debug, Parser)]
#[command(name = "mumw", version, about = "Entanglement witnesses from mutually unbiased measurements")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an operator basis and check orthonormality.
    Basis(BasisArgs),
    /// Build a measurement family and check its defining relations.
    Mums(MumArgs),
    /// Build W and W̃ for a recipe.
    Witness(WitnessArgs),
    /// Run checks on a witness file (and optionally a state or decomposition).
    Verify(VerifyArgs),
    /// Rebuild a reference example and compare with embedded golden data.
    Reproduce(ReproduceArgs),
    /// Enumerate subtraction patterns and try to decompose each witness.
    Explore(ExploreArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    W,
    #[value(name = "w-tilde")]
    WTilde,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    #[arg(long)]
    pub dim: usize,
    /// gellmann, appendix-b or mub
    #[arg(long, default_value = "gellmann")]
    pub basis: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MumArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value = "gellmann")]
    pub basis: String,
    /// Number or `opt`.
    #[arg(long, default_value = "opt")]
    pub kappa: String,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub allow_nonpositive: bool,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value = "gellmann")]
    pub basis: String,
    /// Number or `opt`.
    #[arg(long, default_value = "opt")]
    pub kappa: String,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long = "L")]
    pub l: usize,
    /// Comma separated rotations (`id`, `perm:r`, `haar:seed`, `haar-neg:seed`);
    /// defaults to N identities.
    #[arg(long)]
    pub rot: Option<String>,
    /// Comma separated basis groups used as measurements 1..=N; the first L
    /// are subtracted. Defaults to 1,2,…,N.
    #[arg(long)]
    pub alphas: Option<String>,
    /// Allow κ above κ_opt (measurement operators need not be positive).
    #[arg(long)]
    pub allow_nonpositive: bool,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Matrix written in CSV mode.
    #[arg(long, value_enum, default_value_t = Which::WTilde)]
    pub which: Which,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Witness file written by `witness`, or a bare {dim, matrix} operator.
    #[arg(long)]
    pub witness: PathBuf,
    #[arg(long, value_enum, default_value_t = Which::WTilde)]
    pub which: Which,
    /// State file {dim, matrix}; runs detection.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Require this detection verdict.
    #[arg(long)]
    pub expect: Option<String>,
    /// File {"a": operator, "b": operator}; validates W = A + B^Γ.
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
    /// Samples for the map positivity check (needs provenance in the file).
    #[arg(long)]
    pub positivity_samples: Option<usize>,
    /// See-saw restarts; 0 disables the block-positivity check.
    #[arg(long, default_value_t = SEESAW_RESTARTS)]
    pub restarts: usize,
    /// Iterations for a heuristic decomposition search (informational).
    #[arg(long)]
    pub search_decomposition: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = STATE_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// 1, 2, 3, 4 or appendixB
    pub id: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, default_value = "mub")]
    pub basis: String,
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Iteration budget for each decomposition search.
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Seed from `MUMW_SEED` when set, the flag otherwise.
fn effective_seed(flag: u64) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn basis_label(s: &str) -> Result<BasisLabel> {
    let label: BasisLabel = s.parse()?;
    if label == BasisLabel::Custom {
        return Err(Error::InvalidBasis("custom bases cannot be built from flags".into()));
    }
    Ok(label)
}

fn parse_kappa(s: &str, basis: &HermitianBasis) -> Result<f64> {
    if s == "opt" {
        return Ok(kappa_opt(basis));
    }
    s.parse()
        .map_err(|_| Error::Parse(format!("--kappa expects a number or 'opt', got '{s}'")))
}

fn parse_alphas(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad measurement index '{p}'")))
        })
        .collect()
}

pub fn spec_from_args(a: &SpecArgs) -> Result<WitnessSpec> {
    let basis = build_basis(basis_label(&a.basis)?, a.dim)?;
    let kappa = parse_kappa(&a.kappa, &basis)?;
    let rotations = match &a.rot {
        Some(r) => parse_rotation_list(r, a.dim)?,
        None => (0..a.n).map(|_| StarRotation::identity(a.dim)).collect(),
    };
    let alphas = match &a.alphas {
        Some(s) => parse_alphas(s)?,
        None => (1..=a.n).collect(),
    };
    WitnessSpec::build(basis, a.n, a.l, kappa, rotations, alphas, !a.allow_nonpositive)
}

/// One witness matrix with the recipe that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessRecord {
    pub dim: usize,
    pub matrix: crate::linalg::ComplexMatrix,
    pub provenance: Provenance,
    pub scale: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessFile {
    pub w: WitnessRecord,
    pub w_tilde: WitnessRecord,
}

pub fn witness_file(spec: &WitnessSpec) -> Result<WitnessFile> {
    let w = witness_w(spec)?;
    let wt = witness_wtilde(spec)?;
    let prov = spec.provenance();
    let ratio = wtilde_over_w(spec.dim(), spec.kappa());
    Ok(WitnessFile {
        w: WitnessRecord {
            dim: w.dim(),
            matrix: w.into_matrix(),
            provenance: prov.clone(),
            scale: "W = (dκ−1)·Choi(Φ)".into(),
        },
        w_tilde: WitnessRecord {
            dim: wt.dim(),
            matrix: wt.into_matrix(),
            provenance: prov,
            scale: format!("W̃ = d(d−1)(√d+1)²/(dκ−1)·W = {ratio:.17e}·W"),
        },
    })
}

fn emit(out: &OutputArgs, body: &str) -> Result<()> {
    match &out.out {
        Some(p) => fs::write(p, body)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn emit_reports(out: &OutputArgs, doc: Value, reports: &[CheckReport]) -> Result<i32> {
    let body = match out.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => reports_to_csv(reports),
    };
    emit(out, &body)?;
    Ok(if all_pass(reports) { 0 } else { 1 })
}

fn cmd_basis(a: &BasisArgs) -> Result<i32> {
    let basis = build_basis(basis_label(&a.basis)?, a.dim)?;
    let rep = verify_orthonormal(&basis, a.tol);
    let check = CheckReport::at_most(
        "basis orthonormality",
        json!({ "dim": a.dim, "basis": basis.label().to_string() }),
        rep.max_gram_deviation.max(rep.max_trace).max(rep.hermiticity_residual),
        a.tol,
    );
    let doc = json!({ "basis": basis.to_file(), "report": rep });
    emit_reports(&a.output, doc, &[check])
}

fn cmd_mums(a: &MumArgs) -> Result<i32> {
    let basis = build_basis(basis_label(&a.basis)?, a.dim)?;
    let kappa = parse_kappa(&a.kappa, &basis)?;
    let n = a.n.unwrap_or(a.dim + 1);
    let family = build_mums(&basis, kappa, n, !a.allow_nonpositive)?;
    let rep = verify_mum(&family, a.tol, !a.allow_nonpositive);
    let check = CheckReport::flag(
        "measurement family relations",
        json!({ "dim": a.dim, "basis": basis.label().to_string(), "kappa": kappa, "N": n }),
        rep.pass,
    );
    let doc = json!({ "family": family.to_file(), "report": rep });
    emit_reports(&a.output, doc, &[check])
}

fn cmd_witness(a: &WitnessArgs) -> Result<i32> {
    let spec = spec_from_args(&a.spec)?;
    let file = witness_file(&spec)?;
    let body = match a.output.format {
        Format::Json => to_json(&file)?,
        Format::Csv => match a.which {
            Which::W => matrix_to_csv(&file.w.matrix)?,
            Which::WTilde => matrix_to_csv(&file.w_tilde.matrix)?,
        },
    };
    emit(&a.output, &body)?;
    Ok(0)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn operator_from_value(v: &Value) -> Result<BipartiteOperator> {
    Ok(serde_json::from_value(v.clone())?)
}

/// Reads a witness file; returns the operator and its recipe if recorded.
fn load_witness(path: &Path, which: Which) -> Result<(BipartiteOperator, Option<Provenance>)> {
    let v = read_json(path)?;
    let key = match which {
        Which::W => "w",
        Which::WTilde => "w_tilde",
    };
    let rec = match v.get(key) {
        Some(r) => r,
        None if v.get("matrix").is_some() => &v,
        None => {
            return Err(Error::Parse(format!(
                "{} has neither '{key}' nor a top-level 'matrix'",
                path.display()
            )))
        }
    };
    let op = operator_from_value(rec)?;
    let prov = match rec.get("provenance") {
        Some(p) => Some(serde_json::from_value(p.clone())?),
        None => None,
    };
    Ok((op, prov))
}

fn parse_verdict(s: &str) -> Result<Verdict> {
    serde_json::from_value(Value::String(s.to_string())).map_err(|_| {
        Error::Parse(format!(
            "unknown verdict '{s}' (expected detected-PPT-entangled, detected-NPT, not-detected, invalid-state)"
        ))
    })
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let seed = effective_seed(a.seed)?;
    let (w, prov) = load_witness(&a.witness, a.which)?;
    let expect = a.expect.as_deref().map(parse_verdict).transpose()?;
    let mut checks = Vec::new();
    let mut doc = serde_json::Map::new();
    doc.insert("witness".into(), json!(a.witness.display().to_string()));
    doc.insert("seed".into(), json!(seed));

    if a.restarts > 0 {
        let ss = block_positivity_search(&w, a.restarts, SEESAW_ITERS, seed)?;
        checks.push(CheckReport::at_least(
            "block positivity (see-saw)",
            json!({ "restarts": a.restarts, "iters": SEESAW_ITERS, "seed": seed }),
            ss.value,
            -1e-8 * w.matrix().max_abs().max(1.0),
        ));
    }
    if let Some(samples) = a.positivity_samples {
        let prov = prov.as_ref().ok_or_else(|| {
            Error::InvalidSpec("positivity sampling needs a witness file with provenance".into())
        })?;
        let spec = prov.to_spec()?;
        let rep = check_positivity_condition(&spec, samples, seed)?;
        checks.push(
            CheckReport::at_most(
                "map positivity condition Tr(Φ[P]²) ≤ 1/(d−1)",
                json!({ "seed": seed }),
                rep.max_purity,
                rep.threshold,
            )
            .with_samples(samples),
        );
        doc.insert("positivity".into(), serde_json::to_value(&rep)?);
    }
    if let Some(path) = &a.state {
        let rho = operator_from_value(&read_json(path)?)?;
        let res = detect(&w, &rho, a.tol)?;
        let ok = match expect {
            Some(v) => res.verdict == v,
            None => res.verdict != Verdict::InvalidState,
        };
        checks.push(CheckReport::flag(
            "detection",
            json!({ "state": path.display().to_string(), "verdict": res.verdict, "expected": expect }),
            ok,
        ));
        doc.insert("detection".into(), serde_json::to_value(&res)?);
    }
    if let Some(path) = &a.decomposition {
        let v = read_json(path)?;
        let part = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("decomposition file lacks '{k}'")))
                .and_then(operator_from_value)
        };
        let cert = verify_decomposition(&w, &part("a")?, &part("b")?, a.tol)?;
        checks.push(CheckReport::flag(
            "decomposition W = A + B^Γ",
            json!({ "residual": cert.residual, "min_eig_a": cert.min_eig_a, "min_eig_b": cert.min_eig_b }),
            cert.valid,
        ));
        doc.insert("certificate".into(), serde_json::to_value(&cert)?);
    }
    if let Some(iters) = a.search_decomposition {
        let found = search_decomposition(&w, iters, a.tol)?;
        doc.insert(
            "decomposition_search".into(),
            json!({
                "iters": iters,
                "found": found.is_some(),
                "certificate": found,
                "note": "no certificate does not prove indecomposability",
            }),
        );
    }
    doc.insert("checks".into(), serde_json::to_value(&checks)?);
    doc.insert("pass".into(), json!(all_pass(&checks)));
    emit_reports(&a.output, Value::Object(doc), &checks)
}

fn cmd_reproduce(a: &ReproduceArgs) -> Result<i32> {
    let which: Reproduction = a.id.parse()?;
    let checks = which.run()?;
    let doc = json!({ "id": which.id(), "checks": checks, "pass": all_pass(&checks) });
    emit_reports(&a.output, doc, &checks)
}

fn subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let (head, rest) = (items[0], &items[1..]);
    let mut out: Vec<Vec<usize>> = subsets(rest, size - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, head);
            s
        })
        .collect();
    out.extend(subsets(rest, size));
    out
}

fn cmd_explore(a: &ExploreArgs) -> Result<i32> {
    let seed = effective_seed(a.seed)?;
    let d = a.dim;
    let basis = build_basis(basis_label(&a.basis)?, d)?;
    let n = a.n.unwrap_or(d + 1);
    let kappa = kappa_opt(&basis);
    let groups: Vec<usize> = (1..=d + 1).collect();
    let mut entries = Vec::new();
    for used in subsets(&groups, n) {
        for l in 0..=n {
            for minus in subsets(&used, l) {
                let mut alphas = minus.clone();
                alphas.extend(used.iter().filter(|g| !minus.contains(g)));
                let rots = (0..n).map(|_| StarRotation::identity(d)).collect();
                let spec = WitnessSpec::build(basis.clone(), n, l, kappa, rots, alphas, true)?;
                let w = witness_wtilde(&spec)?;
                let min_eig = w.min_eigenvalue()?;
                let scale = w.matrix().max_abs().max(1.0);
                let is_witness = min_eig < -1e-9 * scale;
                let (seesaw, found) = if is_witness {
                    let ss = block_positivity_search(&w, a.restarts, SEESAW_ITERS, seed)?.value;
                    (Some(ss), Some(search_decomposition(&w, a.iters, 1e-8 * scale)?.is_some()))
                } else {
                    (None, None)
                };
                entries.push(json!({
                    "used": used,
                    "subtracted": minus,
                    "L": l,
                    "min_eigenvalue": min_eig,
                    "entangling": is_witness,
                    "seesaw_min": seesaw,
                    "decomposition_found": found,
                }));
            }
        }
    }
    let no_cert = entries
        .iter()
        .filter(|e| e["decomposition_found"] == json!(false))
        .count();
    let doc = json!({
        "dim": d,
        "basis": basis.label().to_string(),
        "N": n,
        "kappa": kappa,
        "iters": a.iters,
        "seed": seed,
        "entries": entries,
        "witnesses_without_certificate": no_cert,
        "note": "a missing certificate is consistent with, but does not prove, indecomposability",
    });
    emit(&a.output, &to_json(&doc)?)?;
    Ok(0)
}

/// Runs a parsed command. Rotation and family checks that a command
/// depends on are part of its preconditions, so they surface as errors.
pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Basis(a) => cmd_basis(a),
        Command::Mums(a) => cmd_mums(a),
        Command::Witness(a) => {
            if let Some(r) = &a.spec.rot {
                for o in parse_rotation_list(r, a.spec.dim)? {
                    let rep = verify_rotation(&o, 1e-10);
                    if !rep.pass {
                        return Err(Error::InvalidRotation(format!("{} fails its checks", o.descriptor())));
                    }
                }
            }
            cmd_witness(a)
        }
        Command::Verify(a) => cmd_verify(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Explore(a) => cmd_explore(a),
    }
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

/// Full entry point: parses `args`, runs, and maps errors to exit code 2.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprintln!("{}", error_json("usage", e.to_string().trim()));
            return 2;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_json(e.kind(), &e.to_string()));
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(&[1, 2, 3, 4], 2).len(), 6);
        assert_eq!(subsets(&[1, 2, 3, 4], 0), vec![Vec::<usize>::new()]);
        assert!(subsets(&[1], 2).is_empty());
    }

    #[test]
    fn spec_flags_match_library_recipe() {
        let cli = Cli::try_parse_from([
            "mumw", "witness", "--dim", "3", "--basis", "gellmann", "--N", "4", "--L", "4", "--rot",
            "id,id,id,perm:1",
        ])
        .unwrap();
        let Command::Witness(a) = cli.command else { panic!() };
        let spec = spec_from_args(&a.spec).unwrap();
        let lib = crate::reproduce::gellmann_shift_spec(1).unwrap();
        let diff = witness_wtilde(&spec).unwrap().max_abs_diff(&witness_wtilde(&lib).unwrap());
        assert!(diff < 1e-12);
    }

    #[test]
    fn mub_rejects_composite_dimension() {
        let cli = Cli::try_parse_from(["mumw", "basis", "--dim", "4", "--basis", "mub"]).unwrap();
        assert!(matches!(execute(&cli), Err(Error::NotPrime(4))));
    }
}
