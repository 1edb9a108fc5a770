//! Command-line front end: `sdefi <command> <system.json> [flags]`.
//!
//! Exit codes: 0 when the command completed (verdicts are inside the
//! report), 2 for input errors, 3 for numeric failures.

mod render;
pub mod system_file;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::LaurentPoly;
use crate::error::{Error, Result};
use crate::ito::{self, Mode, SdeSystem};
use crate::mc::{self, Allowances, BallCentre, ConservationReport, SimConfig};
use crate::perturb;
use crate::resonance::{self, Lattice, LatticeReport, ResonanceReport};
use crate::search::{self, CountBoundCheck, IntegralBasisSummary};

pub use system_file::{parse_candidate, parse_point, parse_system, parse_system_str, serialize_system, LoadedSystem, SystemSpecFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "sdefi", version, about = "First integrals of polynomial SDEs: exact checks, resonance criteria, perturbations, Monte Carlo")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact test of the strong (pathwise) conservation conditions.
    CheckStrong(CheckArgs),
    /// Exact test of the weak (in-mean) conservation condition.
    CheckWeak(CheckArgs),
    /// All first integrals spanned by monomials of a degree window.
    Search(SearchArgs),
    /// Resonance criteria at the origin.
    Resonance(ResonanceArgs),
    /// Linearization, resonance, search and candidate checks in one report.
    Analyze(AnalyzeArgs),
    /// Linear noise that destroys every weak integral.
    Perturb(PerturbArgs),
    /// Monte Carlo conservation test.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub system: PathBuf,
    /// Candidate integral: polynomial text or a file. Defaults to the candidates in the system file.
    #[arg(long)]
    pub candidate: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub system: PathBuf,
    #[arg(long, value_parser = parse_mode, default_value = "weak")]
    pub mode: Mode,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub dmin: i64,
    #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
    pub dmax: i64,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    pub system: PathBuf,
    #[arg(long, default_value_t = resonance::DEFAULT_K)]
    pub kbound: usize,
    #[arg(long, default_value_t = resonance::DEFAULT_TOL)]
    pub tol: f64,
    /// `zplus` or `z`; `z` adds integer-lattice resonance sets to the report.
    #[arg(long, default_value = "zplus")]
    pub lattice: Lattice,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub step: f64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Radius of the exit ball.
    #[arg(long, default_value_t = 10.0)]
    pub radius: f64,
    #[arg(long, value_enum, default_value = "initial")]
    pub centre: CentreArg,
    /// Initial point, comma separated. Defaults to `x0` in the system file.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    /// Overrides the weak-test bias allowance `c_bias`.
    #[arg(long)]
    pub c_bias: Option<f64>,
    /// Overrides the strong-test path allowance `c_path`.
    #[arg(long)]
    pub c_path: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CentreArg {
    Origin,
    Initial,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub system: PathBuf,
    #[arg(long, default_value_t = resonance::DEFAULT_K)]
    pub kbound: usize,
    #[arg(long, default_value_t = resonance::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub dmin: i64,
    #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
    pub dmax: i64,
    #[arg(long)]
    pub candidate: Vec<String>,
    /// Cross-check the candidates by simulation; requires --seed.
    #[arg(long, requires = "seed")]
    pub simulate: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    pub system: PathBuf,
    /// Base of the noise eigenvalues, in (0, 1).
    #[arg(long, default_value_t = 0.37)]
    pub u: f64,
    /// Bound on |l| for the non-vanishing scan.
    #[arg(long, default_value_t = 8)]
    pub lbound: usize,
    /// Degree up to which the absence of weak integrals is verified; 0 skips it.
    #[arg(long, default_value_t = 4)]
    pub degree: i64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub system: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub candidate: Vec<String>,
    /// Test only one mode; both by default.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub sim: SimArgs,
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    match s.to_ascii_lowercase().as_str() {
        "weak" => Ok(Mode::Weak),
        "strong" => Ok(Mode::Strong),
        _ => Err(format!("unknown mode `{s}` (expected weak or strong)")),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemSummary {
    pub dim: usize,
    pub noise_dim: usize,
    pub var_names: Vec<String>,
    pub drift: Vec<String>,
    pub diffusion: Vec<Vec<String>>,
}

impl SystemSummary {
    pub fn new(sys: &SdeSystem) -> Self {
        SystemSummary {
            dim: sys.dim(),
            noise_dim: sys.noise_dim(),
            var_names: sys.var_names.clone(),
            drift: sys.drift.components.iter().map(|p| sys.poly_text(p)).collect(),
            diffusion: sys.diffusions.iter().map(|g| g.components.iter().map(|p| sys.poly_text(p)).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualText {
    pub name: String,
    pub poly: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateCheck {
    pub name: String,
    pub phi: String,
    pub mode: Mode,
    pub holds: bool,
    /// Residuals that do not vanish.
    pub residuals: Vec<ResidualText>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub checks: Vec<CandidateCheck>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResonanceOutput {
    #[serde(flatten)]
    pub report: ResonanceReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub integer_lattices: Vec<LatticeReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<IntegralBasisSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedConservation {
    pub name: String,
    pub report: ConservationReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub config: SimConfig,
    pub checks: Vec<NamedConservation>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub system: SystemSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ResonanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonance_error: Option<String>,
    pub searches: Vec<SearchOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_bound: Option<CountBoundCheck>,
    pub candidates: Vec<CandidateCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulateReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationText {
    pub pass: bool,
    pub dmax: i64,
    pub counterexamples: Vec<String>,
    pub scope_note: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct PerturbReport {
    pub plan: perturb::PerturbationPlan,
    pub diffusion: Vec<String>,
    /// The perturbed system in system-file form.
    pub system: SystemSpecFile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationText>,
}

/// 2 for bad input, 3 for numeric failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::RootNonConvergence { .. } | Error::Numeric(_) | Error::NoSamplePoint(_) | Error::NoAdmissibleBase { .. } => 3,
        _ => 2,
    }
}

/// Reads `SDEFI_THREADS` and sizes the global worker pool.
pub fn init_threads_from_env() -> Result<()> {
    let Ok(v) = std::env::var("SDEFI_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("SDEFI_THREADS must be a positive integer, got `{v}`")))?;
    if n == 0 {
        return Err(Error::Config("SDEFI_THREADS must be at least 1".into()));
    }
    // a second initialisation (e.g. in tests) keeps the existing pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses arguments, runs the command, writes the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            if !text.ends_with('\n') {
                let _ = writeln!(out);
            }
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn emit<T: Serialize>(fmt: OutputFormat, value: &T, text: impl FnOnce(&T) -> String) -> Result<String> {
    match fmt {
        OutputFormat::Json => Ok(serde_json::to_string_pretty(value)?),
        OutputFormat::Text => Ok(text(value)),
    }
}

/// Runs a parsed command and returns the rendered report.
pub fn execute(cli: &Cli) -> Result<String> {
    let fmt = cli.output;
    match &cli.command {
        Command::CheckStrong(a) => check_command(a, Mode::Strong, fmt),
        Command::CheckWeak(a) => check_command(a, Mode::Weak, fmt),
        Command::Search(a) => {
            let loaded = parse_system(&a.system)?;
            let basis = search::find_first_integrals(&loaded.system, a.mode, a.dmin, a.dmax)?;
            let summary = basis.summary(&loaded.system.var_names)?;
            emit(fmt, &summary, |s| {
                let mut out = String::new();
                render::search(s, &mut out);
                out
            })
        }
        Command::Resonance(a) => {
            let loaded = parse_system(&a.system)?;
            let report = resonance::nonintegrability_report(&loaded.system, a.kbound, a.tol)?;
            let mut integer_lattices = Vec::new();
            if a.lattice == Lattice::Z && !report.lattices.is_empty() {
                let spec = &report.spectral;
                integer_lattices.push(resonance::lattice_report("A0", &spec.lambda.values, a.kbound, a.tol, Lattice::Z)?);
                for (i, mu) in spec.mu.iter().enumerate() {
                    let label = format!("Dg_{}(0)", i + 1);
                    integer_lattices.push(resonance::lattice_report(&label, &mu.values, a.kbound, a.tol, Lattice::Z)?);
                }
            }
            emit(fmt, &ResonanceOutput { report, integer_lattices }, render::resonance_output)
        }
        Command::Analyze(a) => emit(fmt, &analyze(a)?, render::analyze),
        Command::Perturb(a) => emit(fmt, &perturb_command(a)?, render::perturb),
        Command::Simulate(a) => {
            let loaded = parse_system(&a.system)?;
            let candidates = candidates(&loaded, &a.candidate)?;
            let modes = match a.mode {
                Some(m) => vec![m],
                None => vec![Mode::Weak, Mode::Strong],
            };
            let report = simulate(&loaded, &candidates, &modes, &a.sim, a.seed)?;
            emit(fmt, &report, render::simulate)
        }
    }
}

fn candidate_label(arg: &str) -> String {
    let p = Path::new(arg);
    if p.is_file() {
        p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| arg.to_string())
    } else {
        arg.trim().to_string()
    }
}

/// Command-line candidates, or the system file's own when none are given.
fn candidates(loaded: &LoadedSystem, args: &[String]) -> Result<Vec<(String, LaurentPoly)>> {
    if args.is_empty() {
        return Ok(loaded.candidates.clone());
    }
    args.iter()
        .map(|a| Ok((candidate_label(a), parse_candidate(a, &loaded.system.var_names)?)))
        .collect()
}

fn check_one(sys: &SdeSystem, name: &str, phi: &LaurentPoly, mode: Mode) -> Result<CandidateCheck> {
    let v = ito::check(sys, phi, mode)?;
    Ok(CandidateCheck {
        name: name.to_string(),
        phi: sys.poly_text(phi),
        mode,
        holds: v.holds,
        residuals: v.nonvanishing().map(|r| ResidualText { name: r.name.clone(), poly: sys.poly_text(&r.poly) }).collect(),
    })
}

fn check_command(a: &CheckArgs, mode: Mode, fmt: OutputFormat) -> Result<String> {
    let loaded = parse_system(&a.system)?;
    let cands = candidates(&loaded, &a.candidate)?;
    if cands.is_empty() {
        return Err(Error::Config("no candidate: pass --candidate or list candidates in the system file".into()));
    }
    let checks = cands.iter().map(|(n, p)| check_one(&loaded.system, n, p, mode)).collect::<Result<Vec<_>>>()?;
    emit(fmt, &CheckReport { checks }, render::check)
}

fn initial_point(loaded: &LoadedSystem, arg: Option<&str>) -> Result<Vec<num_complex::Complex64>> {
    match (arg, &loaded.x0) {
        (Some(s), _) => parse_point(s),
        (None, Some(x)) => Ok(x.iter().map(|z| z.to_c64()).collect()),
        (None, None) => Err(Error::Config("no initial point: pass --x0 or add x0 to the system file".into())),
    }
}

fn simulate(loaded: &LoadedSystem, cands: &[(String, LaurentPoly)], modes: &[Mode], a: &SimArgs, seed: u64) -> Result<SimulateReport> {
    if cands.is_empty() {
        return Err(Error::Config("no candidate to simulate: pass --candidate or list candidates in the system file".into()));
    }
    let centre = match a.centre {
        CentreArg::Origin => BallCentre::Origin,
        CentreArg::Initial => BallCentre::Initial,
    };
    let x0 = initial_point(loaded, a.x0.as_deref())?;
    let cfg = SimConfig::new(x0, a.step, a.horizon, a.paths, seed).with_radius(a.radius, centre);
    let ens = mc::simulate_paths(&loaded.system, &cfg)?;
    let allow = Allowances { c_bias: a.c_bias, c_path: a.c_path };
    let mut checks = Vec::new();
    for (name, phi) in cands {
        for &m in modes {
            checks.push(NamedConservation { name: name.clone(), report: mc::conservation_test(&ens, phi, m, allow)? });
        }
    }
    Ok(SimulateReport { config: cfg, checks })
}

fn analyze(a: &AnalyzeArgs) -> Result<AnalyzeReport> {
    let loaded = parse_system(&a.system)?;
    let sys = &loaded.system;
    let (resonance, resonance_error) = match resonance::nonintegrability_report(sys, a.kbound, a.tol) {
        Ok(r) => (Some(r), None),
        Err(e @ (Error::Config(_) | Error::Io(_) | Error::Json(_))) => return Err(e),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut searches = Vec::new();
    let mut count_bound = None;
    for mode in [Mode::Strong, Mode::Weak] {
        match search::find_first_integrals(sys, mode, a.dmin, a.dmax) {
            Ok(basis) => {
                if let (Mode::Strong, Some(r)) = (mode, &resonance) {
                    if r.spectral.all_diffusions_vanish() {
                        count_bound = search::count_bound_check(&basis, r).ok();
                    }
                }
                let summary = basis.summary(&sys.var_names);
                let (result, error) = match summary {
                    Ok(s) => (Some(s), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                searches.push(SearchOutcome { mode, result, error });
            }
            Err(e @ Error::InvalidWindow { .. }) => return Err(e),
            Err(e) => searches.push(SearchOutcome { mode, result: None, error: Some(e.to_string()) }),
        }
    }
    let cands = candidates(&loaded, &a.candidate)?;
    let mut checks = Vec::new();
    for (name, phi) in &cands {
        for mode in [Mode::Strong, Mode::Weak] {
            checks.push(check_one(sys, name, phi, mode)?);
        }
    }
    let simulation = match (a.simulate, a.seed) {
        (true, Some(seed)) => Some(simulate(&loaded, &cands, &[Mode::Weak, Mode::Strong], &a.sim, seed)?),
        _ => None,
    };
    Ok(AnalyzeReport {
        system: SystemSummary::new(sys),
        resonance,
        resonance_error,
        searches,
        count_bound,
        candidates: checks,
        simulation,
    })
}

fn perturb_command(a: &PerturbArgs) -> Result<PerturbReport> {
    let loaded = parse_system(&a.system)?;
    let sys = &loaded.system;
    let plan = perturb::build_perturbation(sys, a.u, a.lbound)?;
    let perturbed = plan.perturbed_system(sys)?;
    let verification = if a.degree > 0 {
        let v = perturb::verify_perturbation(sys, &plan, a.degree)?;
        Some(VerificationText {
            pass: v.pass,
            dmax: v.dmax,
            counterexamples: v.counterexamples.basis.iter().map(|p| sys.poly_text(p)).collect(),
            scope_note: perturb::PerturbationVerdict::SCOPE_NOTE,
        })
    } else {
        None
    };
    let diffusion = perturbed.diffusions[0].components.iter().map(|p| perturbed.poly_text(p)).collect();
    Ok(PerturbReport {
        system: SystemSpecFile::from_system(&perturbed, &[], None),
        diffusion,
        plan,
        verification,
    })
}
