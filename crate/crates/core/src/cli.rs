//! Command-line front end: argument parsing, pipeline orchestration and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::annihilator::{
    annihilator_transfer, build_levels, index_check, index_formulas, jump_basis, norm_membership_checks, oracle_probes,
    unit_lattices, z_map, LevelSolution, UnitLattices,
};
use crate::error::{Error, Result};
use crate::frame::{validate, Frame, RamificationInstance};
use crate::module::{build_uq, chi_embeddings, hom_sweep, solve_beta, Presentation, PrimeQuotient, SmModule};
use crate::report;

#[derive(Parser, Debug)]
#[command(name = "ellunit", version, about = "Exact lattice models of elliptic-unit norm relations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check an instance file and summarize the group data.
    Validate(Common),
    /// Decomposition indices, ramified sets, jumps, r, ν, φ_L and the index formulas.
    Derive(Common),
    /// Build the module and its e-free quotient and report rank diagnostics.
    Build(Common),
    /// Solve for the per-level roots with certificates.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Adjoin an auxiliary prime and check the embeddings and the β certificate.
    Extend {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        m: u64,
        /// Comma-separated exponents of the new Frobenius element.
        #[arg(long = "lambda-extra", value_delimiter = ',', allow_hyphen_values = true)]
        lambda_extra: Vec<i64>,
    },
    /// Transfer an annihilator and evaluate the z-map on the top root.
    Annihilate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kappa: String,
        #[arg(long, default_value = "1")]
        f: String,
    },
    /// Run every invariant suite and report pass/fail counts.
    Selftest(Common),
    /// Consolidated report of the whole pipeline.
    Report {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "1")]
        kappa: String,
    },
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also span C by the relative norms of every elliptic number.
    #[arg(long = "all-J", alias = "all-j")]
    pub all_j: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Derive(_) => "derive",
            Command::Build(_) => "build",
            Command::Solve { .. } => "solve",
            Command::Extend { .. } => "extend",
            Command::Annihilate { .. } => "annihilate",
            Command::Selftest(_) => "selftest",
            Command::Report { .. } => "report",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Validate(c) | Command::Derive(c) | Command::Build(c) | Command::Selftest(c) => c,
            Command::Solve { common, .. }
            | Command::Extend { common, .. }
            | Command::Annihilate { common, .. }
            | Command::Report { common, .. } => common,
        }
    }
}

/// Built pipeline state shared by the heavier commands.
struct Pipeline {
    frame: Frame,
    u: SmModule,
    levels: Vec<LevelSolution>,
    lattices: UnitLattices,
}

impl Pipeline {
    fn new(frame: Frame, all_j: bool) -> Result<Self> {
        let u = SmModule::build(&Presentation::from_frame(&frame))?;
        let levels = build_levels(&frame, &u)?;
        let lattices = unit_lattices(&frame, &u, &levels, all_j);
        Ok(Pipeline { frame, u, levels, lattices })
    }
}

fn parse_int(s: &str, what: &str) -> Result<BigInt> {
    s.trim().parse().map_err(|_| Error::InvalidInput(format!("{what}: {s:?} is not an integer")))
}

fn derive_body(frame: &Frame) -> Result<Value> {
    let formulas = match &frame.analytic {
        Some(_) => Some(index_formulas(frame)?),
        None => None,
    };
    let r = frame.r_characterization()?;
    report::derive_section(frame, formulas.as_ref(), r)
}

fn build_body(u: &SmModule) -> Result<Value> {
    let up = PrimeQuotient::build(u)?;
    Ok(report::rank_section(&u.rank_diagnostic(), up.dim()))
}

fn solve_body(pl: &Pipeline, level: Option<u32>) -> Result<Value> {
    if let Some(i) = level {
        if i == 0 || i > pl.frame.k {
            return Err(Error::InvalidInput(format!("level {i} is outside 1..={}", pl.frame.k)));
        }
    }
    let levels = pl
        .levels
        .iter()
        .filter(|l| level.is_none_or(|i| l.level == i))
        .map(|l| report::level_section(&pl.frame, l, pl.u.is_unit(&l.delta)))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "levels": levels }))
}

fn annihilate_body(pl: &Pipeline, kappa: &str, f: &BigInt) -> Result<Value> {
    let p = BigInt::from(pl.frame.p);
    if f.sign() != num_bigint::Sign::Plus || (f % &p) == BigInt::from(0) {
        return Err(Error::InvalidInput(format!("f = {f} must be positive and prime to p")));
    }
    let kappa = pl.frame.ring.parse(kappa)?;
    let transfer = annihilator_transfer(&pl.frame, &kappa)?;
    let jb = jump_basis(&pl.frame, &pl.u, &pl.levels, &pl.lattices);
    let top = &pl.levels.last().expect("k >= 1").delta;
    let z = z_map(&pl.frame, &pl.u, &jb, top, f, &kappa)?;
    let expected = transfer.scale(f);
    Ok(json!({
        "kappa": report::poly(&kappa),
        "f": report::int(f),
        "r": pl.frame.jump_profile().r,
        "transfer": report::poly(&transfer),
        "z_map_top_root": report::poly(&z),
        "z_map_expected": report::poly(&expected),
        "z_map_matches": z == expected,
    }))
}

fn index_body(pl: &Pipeline) -> Result<Value> {
    let idx = index_check(&pl.frame, &pl.lattices)?;
    let jb = jump_basis(&pl.frame, &pl.u, &pl.levels, &pl.lattices);
    let norms = norm_membership_checks(&pl.frame, &pl.u, &pl.levels)?;
    Ok(json!({
        "index": report::index_section(&idx),
        "jump_basis": report::jump_section(&jb),
        "norm_checks": report::norm_section(&norms),
    }))
}

/// A command detached from file and output handling, runnable on an in-memory frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    Validate,
    Derive,
    Build,
    Solve { level: Option<u32> },
    Extend { m: u64, lambda_extra: Vec<i64> },
    Annihilate { kappa: String, f: String },
    Selftest,
    Report { kappa: String },
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::Validate => "validate",
            Request::Derive => "derive",
            Request::Build => "build",
            Request::Solve { .. } => "solve",
            Request::Extend { .. } => "extend",
            Request::Annihilate { .. } => "annihilate",
            Request::Selftest => "selftest",
            Request::Report { .. } => "report",
        }
    }
}

impl Command {
    pub fn request(&self) -> Request {
        match self {
            Command::Validate(_) => Request::Validate,
            Command::Derive(_) => Request::Derive,
            Command::Build(_) => Request::Build,
            Command::Solve { level, .. } => Request::Solve { level: *level },
            Command::Extend { m, lambda_extra, .. } => Request::Extend { m: *m, lambda_extra: lambda_extra.clone() },
            Command::Annihilate { kappa, f, .. } => Request::Annihilate { kappa: kappa.clone(), f: f.clone() },
            Command::Selftest(_) => Request::Selftest,
            Command::Report { kappa, .. } => Request::Report { kappa: kappa.clone() },
        }
    }
}

/// Body of a complete document plus a failed check it records, if any.
type Outcome = (Value, Option<Error>);

fn run_body(frame: &Frame, req: &Request, seed: u64, all_j: bool) -> Result<Outcome> {
    let mut failure = None;
    let body = match req {
        Request::Validate => json!({ "frame": report::frame_section(frame) }),
        Request::Derive => json!({ "frame": report::frame_section(frame), "derived": derive_body(frame)? }),
        Request::Build => {
            let u = SmModule::build(&Presentation::from_frame(frame))?;
            json!({ "module": build_body(&u)? })
        }
        Request::Solve { level } => {
            let pl = Pipeline::new(frame.clone(), false)?;
            solve_body(&pl, *level)?
        }
        Request::Extend { m, lambda_extra } => {
            let u = SmModule::build(&Presentation::from_frame(frame))?;
            let up = PrimeQuotient::build(&u)?;
            let (uq, warnings) = build_uq(frame, *m, lambda_extra)?;
            let chi = chi_embeddings(&u, &up, &uq)?;
            let beta = solve_beta(&uq, frame, None)?;
            if !chi.passed() {
                failure = Some(Error::ModelDiscrepancy("embedding checks failed".into()));
            }
            match &beta {
                None => failure = Some(Error::ModelDiscrepancy("no root exists for the auxiliary-prime target".into())),
                Some(b) if !b.passed() => failure = Some(Error::ModelDiscrepancy("auxiliary-prime certificate failed".into())),
                _ => {}
            }
            json!({
                "lambda_extra": lambda_extra,
                "warnings": warnings,
                "embeddings": report::chi_section(&chi),
                "beta": report::beta_section(beta.as_ref()),
            })
        }
        Request::Annihilate { kappa, f } => {
            let f = parse_int(f, "f")?;
            let pl = Pipeline::new(frame.clone(), false)?;
            let body = annihilate_body(&pl, kappa, &f)?;
            if body["z_map_matches"] != Value::Bool(true) {
                failure = Some(Error::ModelDiscrepancy("z-map disagrees with the transferred annihilator".into()));
            }
            body
        }
        Request::Selftest => {
            let body = crate::selftest::run(frame, seed)?;
            if body["failed"].as_u64() != Some(0) {
                failure = Some(Error::ModelDiscrepancy("self-test suites report failures".into()));
            }
            body
        }
        Request::Report { kappa } => {
            let pl = Pipeline::new(frame.clone(), all_j)?;
            let u = &pl.u;
            let w = u.relative_norm(0, &frame.group.kernel_elements(frame.k));
            let sweep = hom_sweep(u, &frame.group.kernel_generators(frame.k), &w, frame.ring, &frame.n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let oracle = oracle_probes(frame, u, 10, &mut rng)?;
            let index = index_body(&pl)?;
            let annihilator = annihilate_body(&pl, kappa, &BigInt::from(1))?;
            let checks = [
                index["index"]["passed"] == Value::Bool(true),
                index["jump_basis"]["verified"] == Value::Bool(true),
                sweep.passed(),
                oracle.passed(),
                annihilator["z_map_matches"] == Value::Bool(true),
            ];
            if checks.contains(&false) {
                failure = Some(Error::ModelDiscrepancy("a consolidated check failed".into()));
            }
            json!({
                "frame": report::frame_section(frame),
                "derived": derive_body(frame)?,
                "module": build_body(u)?,
                "roots": solve_body(&pl, None)?["levels"].clone(),
                "unit_lattices": index,
                "hom_sweep": report::sweep_section(&sweep),
                "oracle": report::oracle_section(&oracle),
                "annihilator": annihilator,
            })
        }
    };
    Ok((body, failure))
}

/// Run a request on a validated frame and wrap the result in a report document.
///
/// The returned error is the one that decides the exit status; the document is
/// always complete and carries the matching `status`.
pub fn run_request(frame: &Frame, req: &Request, seed: u64, all_j: bool) -> (Value, Option<Error>) {
    match run_body(frame, req, seed, all_j) {
        Ok((body, failure)) => {
            let status = failure.as_ref().map_or("OK", Error::kind);
            (report::document(req.name(), Some(frame), status, body), failure)
        }
        Err(e) => (error_document(req.name(), &e), Some(e)),
    }
}

fn run_command(cmd: &Command) -> (Value, Option<Error>) {
    let common = cmd.common();
    let frame = RamificationInstance::from_path(&common.instance).and_then(|inst| validate(&inst));
    match frame {
        Ok(frame) => run_request(&frame, &cmd.request(), common.seed, common.all_j),
        Err(e) => (error_document(cmd.name(), &e), Some(e)),
    }
}

fn render(doc: &Value, format: Format) -> String {
    match format {
        Format::Json => report::to_json(doc),
        Format::Markdown => report::to_markdown(doc),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string()))
        }
    }
}

/// Document reporting a failure before any result was produced.
pub fn error_document(command: &str, err: &Error) -> Value {
    let messages = match err {
        Error::Validation(v) => v.clone(),
        other => vec![other.to_string()],
    };
    report::document(command, None, err.kind(), json!({ "errors": messages }))
}

/// Run one parsed command and return the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let common = cli.command.common();
    let (doc, failure) = run_command(&cli.command);
    if let Err(e) = emit(&render(&doc, common.format), common.out.as_ref()) {
        eprintln!("ellunit: {e}");
        return e.exit_code();
    }
    match failure {
        Some(e) => {
            eprintln!("ellunit: {e}");
            e.exit_code()
        }
        None => 0,
    }
}

/// Parse arguments and run; usage errors exit with the parse-error code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { Error::Io(String::new()).exit_code() } else { 0 };
            let _ = e.print();
            code
        }
    }
}
