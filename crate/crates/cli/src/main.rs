//! `sepsos`: fixtures, SOS checks and verification, the zero-curve prover,
//! PPT tests, Choi conversions and the reproduction report.
//!
//! Exit codes: 0 affirmed, 1 refuted, 2 indeterminate, 64 bad input, 74 I/O.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sepsos::choi::{MatrixMap, Orientation};
use sepsos::fixtures::{self, FIXTURE_NAMES};
use sepsos::json::{self as sj, Certificate};
use sepsos::par::Exec;
use sepsos::repro::{self, ReproInputs, ReproOptions};
use sepsos::scalar::{GaussRat, Regime, C64};
use sepsos::sos::{
    candidate_basis, sos_check, verify_gram, verify_moment, CertScalar, GramBasis, SosOptions, SosVerdict,
};
use sepsos::states::ppt_check;
use sepsos::zeros::{proof_moment_certificate, prove_not_sos, ZerosOutcome};
use sepsos::Error;

const EXIT_AFFIRM: u8 = 0;
const EXIT_REFUTE: u8 = 1;
const EXIT_INDETERMINATE: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_IO: u8 = 74;

const DEFAULT_SEED: u64 = 2024;

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser)]
#[command(name = "sepsos", version, about = "Hermitian sum-of-squares certificates, Choi maps and PPT tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every reproduction claim and write a JSON and text report.
    Repro(ReproArgs),
    /// Check or verify sum-of-squares certificates.
    #[command(subcommand)]
    Sos(SosCommand),
    /// Refute SOS membership from a zero curve.
    NotsosZeros(ZerosArgs),
    /// PPT test of a bipartite state.
    Ppt(PptArgs),
    /// Convert between maps and biquadratic forms.
    #[command(subcommand)]
    Choi(ChoiCommand),
    /// List or emit the built-in fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Args)]
struct ReproArgs {
    /// Report path; the text report goes beside it with extension `.txt`.
    #[arg(long, default_value = "repro-report.json")]
    out: PathBuf,
    /// Run only these claims.
    #[arg(long)]
    only: Vec<String>,
    /// Run independent claims concurrently.
    #[arg(long)]
    parallel: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory of `<fixture>.json` files replacing the built-in inputs.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Float,
}

#[derive(Subcommand)]
enum SosCommand {
    /// Search for a Gram or moment certificate.
    Check(SosCheckArgs),
    /// Verify a certificate against a polynomial.
    Verify(SosVerifyArgs),
}

#[derive(Args)]
struct SosCheckArgs {
    poly: PathBuf,
    /// Defaults to the regime of the input.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Basis monomials as `{"monomials": [{u, v}, ...]}`; closed under conjugation.
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Certificate path; defaults to `<input>.cert.json`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SosVerifyArgs {
    poly: PathBuf,
    cert: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

#[derive(Args)]
struct ZerosArgs {
    poly: PathBuf,
    curve: PathBuf,
    #[arg(long)]
    basis: Option<PathBuf>,
    /// Also write a moment certificate built from the proof.
    #[arg(long)]
    certificate: Option<PathBuf>,
}

#[derive(Args)]
struct PptArgs {
    state: PathBuf,
    /// `n,m`; overrides the dims stored in the file.
    #[arg(long, value_parser = parse_dims)]
    dims: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    InputFirst,
    OutputFirst,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::InputFirst => Orientation::InputFirst,
            OrientationArg::OutputFirst => Orientation::OutputFirst,
        }
    }
}

#[derive(Subcommand)]
enum ChoiCommand {
    /// Map JSON to its biquadratic form.
    ToPoly {
        map: PathBuf,
        /// Overrides the orientation stored in the map file.
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Biquadratic form to map JSON.
    FromPoly {
        poly: PathBuf,
        #[arg(long, value_enum, default_value = "input-first")]
        orientation: OrientationArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FixturesCommand {
    List,
    Emit {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected n,m, got {s:?}"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

type Outcome = Result<u8, Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    fs::write(path, text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), Failure> {
    match out {
        Some(p) => write_json(p, v),
        None => {
            say!("{}", serde_json::to_string_pretty(v).expect("serializable"));
            Ok(())
        }
    }
}

fn regime(mode: Option<Mode>, inputs: &[&Value]) -> Result<Regime, Failure> {
    let detected = if inputs.iter().all(|v| sj::detect_regime(v) == Regime::Exact) {
        Regime::Exact
    } else {
        Regime::Float
    };
    match (mode, detected) {
        (None, r) => Ok(r),
        (Some(Mode::Float), _) => Ok(Regime::Float),
        (Some(Mode::Exact), Regime::Exact) => Ok(Regime::Exact),
        (Some(Mode::Exact), Regime::Float) => Err(usage("exact mode needs integer or p/q scalars")),
    }
}

/// `dir/name.json` → `dir/name.cert.json`
fn beside(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    input.with_file_name(format!("{stem}.{suffix}.json"))
}

fn cmd_repro(a: ReproArgs) -> Outcome {
    let inputs = match &a.fixtures {
        Some(dir) => ReproInputs::from_dir(dir)?,
        None => ReproInputs::builtin(),
    };
    let opts = ReproOptions {
        seed: a.seed,
        exec: Exec::default(),
        parallel_claims: a.parallel,
        only: (!a.only.is_empty()).then(|| a.only.clone()),
    };
    let report = repro::run(&inputs, &opts)?;
    let text = report.to_text();
    say!("{}", text.trim_end());
    write_json(&a.out, &report.to_json())?;
    let txt = a.out.with_extension("txt");
    fs::write(&txt, &text).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", txt.display()),
    })?;
    Ok(if report.all_pass() { EXIT_AFFIRM } else { EXIT_REFUTE })
}

fn check_in<K: CertScalar>(a: &SosCheckArgs, pv: &Value, basis: Option<&Value>) -> Outcome {
    let p = sj::poly_from_json::<K>(pv)?;
    let basis = match basis {
        Some(b) => GramBasis::new(p.nvars(), sj::monomials_from_json(b)?)?,
        None => candidate_basis(&p),
    };
    let opts = SosOptions {
        tol: a.tol,
        seed: a.seed,
        ..SosOptions::default()
    };
    let report = sos_check(&p, &basis, &opts)?;
    let names = p.poly().names();
    let out = a.out.clone().unwrap_or_else(|| beside(&a.poly, "cert"));
    let mut summary = serde_json::to_value(report.summary()).expect("serializable");
    let code = match &report.verdict {
        SosVerdict::Sos(cert) => {
            write_json(&out, &sj::gram_certificate_to_json(cert, Some(names)))?;
            summary["certificate"] = json!(out.display().to_string());
            EXIT_AFFIRM
        }
        SosVerdict::NotSos(cert) => {
            write_json(&out, &sj::moment_certificate_to_json(cert, Some(names)))?;
            summary["certificate"] = json!(out.display().to_string());
            EXIT_REFUTE
        }
        SosVerdict::Indeterminate(m) => {
            summary["margins"] = serde_json::to_value(m).expect("serializable");
            EXIT_INDETERMINATE
        }
    };
    say!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    Ok(code)
}

fn cmd_sos_check(a: SosCheckArgs) -> Outcome {
    let pv = read_json(&a.poly)?;
    let bv = a.basis.as_deref().map(read_json).transpose()?;
    match regime(a.mode, &[&pv])? {
        Regime::Exact => check_in::<GaussRat>(&a, &pv, bv.as_ref()),
        Regime::Float => check_in::<C64>(&a, &pv, bv.as_ref()),
    }
}

fn verify_in<K: CertScalar>(pv: &Value, cv: &Value) -> Outcome {
    let p = sj::poly_from_json::<K>(pv)?;
    let (kind, ok) = match sj::certificate_from_json::<K>(cv)? {
        Certificate::Gram(g) => ("gram", verify_gram(&p, &g)?),
        Certificate::Moment(m) => ("moment", verify_moment(&p, &m)?),
    };
    let establishes = match (kind, ok) {
        (_, false) => "nothing",
        ("gram", true) => "sos",
        _ => "not-sos",
    };
    say!(
        "{}",
        serde_json::to_string_pretty(&json!({ "type": kind, "verified": ok, "establishes": establishes }))
            .expect("serializable")
    );
    Ok(if ok { EXIT_AFFIRM } else { EXIT_REFUTE })
}

fn cmd_sos_verify(a: SosVerifyArgs) -> Outcome {
    let pv = read_json(&a.poly)?;
    let cv = read_json(&a.cert)?;
    match regime(a.mode, &[&pv, &cv])? {
        Regime::Exact => verify_in::<GaussRat>(&pv, &cv),
        Regime::Float => verify_in::<C64>(&pv, &cv),
    }
}

fn cmd_zeros(a: ZerosArgs) -> Outcome {
    let pv = read_json(&a.poly)?;
    let cv = read_json(&a.curve)?;
    if regime(None, &[&pv, &cv])? != Regime::Exact {
        return Err(usage("the zero-curve prover needs exact scalars"));
    }
    let p = sj::poly_from_json::<GaussRat>(&pv)?;
    let curve = sj::curve_from_json(&cv)?;
    let basis = match &a.basis {
        Some(b) => GramBasis::new(p.nvars(), sj::monomials_from_json(&read_json(b)?)?)?,
        None => candidate_basis(&p),
    };
    match prove_not_sos(&p, &curve, &basis)? {
        ZerosOutcome::NotSosProof(report) => {
            if let Some(path) = &a.certificate {
                let cert = proof_moment_certificate(&p, &curve, &report)?;
                write_json(path, &sj::moment_certificate_to_json(&cert, Some(p.poly().names())))?;
            }
            let v = sj::proof_report_to_json(&report);
            say!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            Ok(EXIT_REFUTE)
        }
        ZerosOutcome::NoContradiction => {
            say!("{}", json!({ "verdict": "indeterminate", "reason": "no contradiction from this curve" }));
            Ok(EXIT_INDETERMINATE)
        }
    }
}

fn cmd_ppt(a: PptArgs) -> Outcome {
    let v = read_json(&a.state)?;
    let r = match sj::detect_regime(&v) {
        Regime::Exact => ppt_check(&sj::state_from_json::<GaussRat>(&v, a.dims)?, a.tol),
        Regime::Float => ppt_check(&sj::state_from_json::<C64>(&v, a.dims)?, a.tol),
    };
    say!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "ppt": r.pass,
            "min_eigenvalue": r.min_eigenvalue,
            "min_eigenvalue_partial_transpose": r.min_eigenvalue_pt,
        }))
        .expect("serializable")
    );
    Ok(if r.pass { EXIT_AFFIRM } else { EXIT_REFUTE })
}

fn to_poly_in<K: sepsos::scalar::Scalar>(v: &Value, o: Option<OrientationArg>) -> Result<Value, Failure> {
    let (phi, stored) = sj::map_from_json::<K>(v)?;
    let o = o.map(Orientation::from).unwrap_or(stored);
    Ok(sj::poly_to_json(&phi.map_to_biquadratic(o)))
}

fn from_poly_in<K: sepsos::scalar::Scalar>(v: &Value, o: Orientation) -> Result<Value, Failure> {
    let p = sj::poly_from_json::<K>(v)?;
    let phi = MatrixMap::biquadratic_to_map(&p, o)?;
    Ok(sj::map_to_json(&phi, o))
}

fn cmd_choi(c: ChoiCommand) -> Outcome {
    match c {
        ChoiCommand::ToPoly { map, orientation, out } => {
            let v = read_json(&map)?;
            let p = match sj::detect_regime(&v) {
                Regime::Exact => to_poly_in::<GaussRat>(&v, orientation)?,
                Regime::Float => to_poly_in::<C64>(&v, orientation)?,
            };
            emit(out.as_deref(), &p)?;
        }
        ChoiCommand::FromPoly { poly, orientation, out } => {
            let v = read_json(&poly)?;
            let m = match sj::detect_regime(&v) {
                Regime::Exact => from_poly_in::<GaussRat>(&v, orientation.into())?,
                Regime::Float => from_poly_in::<C64>(&v, orientation.into())?,
            };
            emit(out.as_deref(), &m)?;
        }
    }
    Ok(EXIT_AFFIRM)
}

fn cmd_fixtures(c: FixturesCommand) -> Outcome {
    match c {
        FixturesCommand::List => {
            for n in FIXTURE_NAMES {
                say!("{n}");
            }
        }
        FixturesCommand::Emit { name, out } => {
            let f = fixtures::fixture(&name)?;
            emit(out.as_deref(), &sj::fixture_to_json(&f))?;
        }
    }
    Ok(EXIT_AFFIRM)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_AFFIRM };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Repro(a) => cmd_repro(a),
        Command::Sos(SosCommand::Check(a)) => cmd_sos_check(a),
        Command::Sos(SosCommand::Verify(a)) => cmd_sos_verify(a),
        Command::NotsosZeros(a) => cmd_zeros(a),
        Command::Ppt(a) => cmd_ppt(a),
        Command::Choi(c) => cmd_choi(c),
        Command::Fixtures(c) => cmd_fixtures(c),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("sepsos: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
