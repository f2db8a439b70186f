//! Command-line front end.
//!
//! Every command prints one JSON report (newline-terminated) on stdout and a
//! short human summary on stderr. Exit codes: 0 success, 1 verification
//! failure, 2 infeasible, 3 capacity, 4 usage.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::coreset::{compose_and_report, PartitionPlan};
use crate::distribution::{DppDistribution, SetDistribution, Tabulated};
use crate::downup::{
    apply_field, build_downup, chain_report, empirical, sample_walk, tv_distance, FieldVector,
};
use crate::error::{Error, Result};
use crate::exchange::{brute_force_map, verify_all_pairs};
use crate::greedy::standard_greedy;
use crate::instances;
use crate::kernel::{Kernel, NPSD_TOL};
use crate::linalg::Matrix;
use crate::localsearch::{local_search, map_inference, SearchConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "ndpp",
    version,
    about = "MAP inference and exchange verification for nonsymmetric k-DPPs"
)]
pub struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Generate a kernel file.
    Gen(GenArgs),
    /// Greedy initialization followed by r-local search.
    Map(MapArgs),
    /// Run verification suites against brute force.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    RandomNpsd,
    SkewBlock,
    SymPsd,
    LowrankNpsd,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long)]
    pub n: Option<usize>,
    /// Rank of the low-rank factorization (lowrank-npsd) or of the PSD matrix (sym-psd).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Scale of the skew-symmetric part (random-npsd).
    #[arg(long, default_value_t = 1.0)]
    pub skew: f64,
    /// Block diagonals, strictly decreasing and > 1 (skew-block).
    #[arg(long, value_delimiter = ',', default_value = "4,3,2")]
    pub c: Vec<f64>,
    /// Block off-diagonals, strictly increasing with min x >= 10 max c (skew-block).
    #[arg(long, value_delimiter = ',', default_value = "100,200,300")]
    pub x: Vec<f64>,
    /// Emit the identity (sym-psd).
    #[arg(long)]
    pub identity: bool,
    /// Kernel file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Superset-marginal greedy.
    Induced,
    /// Determinant greedy.
    Standard,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MapArgs {
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 2)]
    pub r: usize,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Cross-check against brute force.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value_t = Init::Induced)]
    pub init: Init,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Exchange,
    Walk,
    Coreset,
    All,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub kernel: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Number of parts (coreset suite).
    #[arg(long, default_value_t = 3)]
    pub parts: usize,
    /// Down-step target size; defaults to k - 1 (walk suite).
    #[arg(long)]
    pub l: Option<usize>,
    /// Random external fields checked in addition to the bare chain (walk suite).
    #[arg(long, default_value_t = 0)]
    pub fields: usize,
    /// Sampler steps compared against the exact stationary density (walk suite).
    #[arg(long, default_value_t = 0)]
    pub steps: usize,
    /// Also write the report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Deterministic given the command and seed, apart from `timing_ms`.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Value,
    pub seed: Option<u64>,
    pub instance: Value,
    pub results: Value,
    pub passed: bool,
    pub timing_ms: f64,
    #[serde(skip)]
    pub exit_code: i32,
}

/// Process exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::TrappedState { .. } | Error::SingularConditioning { .. } => {
            EXIT_INFEASIBLE
        }
        Error::Capacity { .. } => EXIT_CAPACITY,
        Error::IncompleteSearch { .. } => EXIT_VERIFY,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(stderr, "{e}");
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: thread pool: {e}");
            return EXIT_USAGE;
        }
    };
    let t0 = Instant::now();
    let outcome = pool.install(|| execute(&cli.command));
    match outcome {
        Ok((mut report, summary, out)) => {
            report.timing_ms = t0.elapsed().as_secs_f64() * 1e3;
            let text = serde_json::to_string(&report).expect("report serializes") + "\n";
            if let Some(path) = out {
                if let Err(e) = fs::write(&path, &text) {
                    let _ = writeln!(stderr, "error: writing {}: {e}", path.display());
                    return EXIT_USAGE;
                }
            }
            let _ = stdout.write_all(text.as_bytes());
            let _ = writeln!(stderr, "{summary}");
            report.exit_code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

type Outcome = (RunReport, String, Option<PathBuf>);

fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Gen(a) => cmd_gen(a).map(|(r, s)| (r, s, None)),
        Command::Map(a) => cmd_map(a).map(|(r, s)| (r, s, a.out.clone())),
        Command::Verify(a) => cmd_verify(a).map(|(r, s)| (r, s, a.out.clone())),
    }
}

fn echo(cmd: &Command) -> Value {
    serde_json::to_value(cmd).expect("arguments serialize")
}

fn load_kernel(path: &Path) -> Result<Kernel<f64>> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Kernel::parse_text(&text)
}

fn describe(kernel: &Kernel<f64>, path: &Path, k: usize) -> Value {
    json!({
        "kernel": path.display().to_string(),
        "n": kernel.n(),
        "d": kernel.lowrank().map(|lr| lr.c.rows()),
        "k": k,
    })
}

fn generate(a: &GenArgs) -> Result<Kernel<f64>> {
    let need_n = || {
        a.n.ok_or_else(|| Error::Domain("--n is required for this kind".into()))
    };
    match a.kind {
        Kind::RandomNpsd => Ok(instances::random_npsd(need_n()?, a.skew, a.seed)),
        Kind::SkewBlock => instances::skew_block(&a.c, &a.x),
        Kind::SymPsd => {
            let n = need_n()?;
            if a.identity {
                Kernel::new(Matrix::identity(n))
            } else {
                Ok(instances::sym_psd(n, a.d.unwrap_or(n), a.seed))
            }
        }
        Kind::LowrankNpsd => {
            let d =
                a.d.ok_or_else(|| Error::Domain("--d is required for lowrank-npsd".into()))?;
            Ok(instances::lowrank_npsd(need_n()?, d, a.seed))
        }
    }
}

pub fn cmd_gen(a: &GenArgs) -> Result<(RunReport, String)> {
    let kernel = generate(a)?;
    fs::write(&a.out, kernel.to_text())
        .map_err(|e| Error::Io(format!("{}: {e}", a.out.display())))?;
    let npsd = kernel.is_npsd(NPSD_TOL);
    let report = RunReport {
        command: echo(&Command::Gen(a.clone())),
        seed: Some(a.seed),
        instance: json!({
            "kind": a.kind,
            "n": kernel.n(),
            "d": kernel.lowrank().map(|lr| lr.c.rows()),
        }),
        results: json!({
            "path": a.out.display().to_string(),
            "npsd": npsd,
            "max_abs": kernel.max_abs(),
        }),
        passed: npsd,
        timing_ms: 0.0,
        exit_code: if npsd { EXIT_OK } else { EXIT_VERIFY },
    };
    let summary = format!(
        "wrote {} (n = {}, nPSD = {npsd})",
        a.out.display(),
        kernel.n()
    );
    Ok((report, summary))
}

pub fn cmd_map(a: &MapArgs) -> Result<(RunReport, String)> {
    let kernel = load_kernel(&a.kernel)?;
    if a.k == 0 || a.k > kernel.n() {
        return Err(Error::Domain(format!(
            "k = {} must lie in [1, n = {}]",
            a.k,
            kernel.n()
        )));
    }
    let cfg = SearchConfig::for_kernel(&kernel, a.k).with(a.r, a.zeta);
    let mu = DppDistribution::new(kernel.clone(), a.k)?;
    let mut results = match a.init {
        Init::Induced => {
            let (_, rep) = map_inference(&kernel, a.k, &cfg)?;
            serde_json::to_value(&rep).expect("report serializes")
        }
        Init::Standard => {
            cfg.validate(a.k)?;
            if !kernel.is_npsd(NPSD_TOL) {
                return Err(Error::Precondition("kernel is not nPSD".into()));
            }
            let init = standard_greedy(&kernel, a.k)?;
            let (set, trace) = local_search(&mu, &init.final_set, &cfg)?;
            json!({
                "set": set,
                "value": trace.steps.last().map(|s| s.value),
                "initial_set": init.final_set,
                "initial_value": init.final_value,
                "iterations": trace.moves(),
                "neighborhood_evals": trace.neighborhood_evals,
                "certified_local_max": trace.certified_local_max,
            })
        }
    };
    let value = results["value"].as_f64().unwrap_or(0.0);
    let mut passed = results["certified_local_max"].as_bool().unwrap_or(false);
    if a.oracle {
        let (opt_set, opt) = brute_force_map(&mu)?;
        let matches = results["set"] == json!(opt_set);
        results["oracle"] = json!({
            "set": opt_set,
            "value": opt,
            "ratio": if value > 0.0 { opt / value } else { f64::INFINITY },
            "matches": matches,
        });
        let k4 = (a.k as f64).powi(4);
        passed &= (k4 / a.zeta).powi(a.k as i32) * value >= opt * (1.0 - 1e-9);
    }
    let summary = format!(
        "map: k = {}, r = {}, set = {}, value = {value:e}",
        a.k, a.r, results["set"]
    );
    let report = RunReport {
        command: echo(&Command::Map(a.clone())),
        seed: None,
        instance: describe(&kernel, &a.kernel, a.k),
        results,
        passed,
        timing_ms: 0.0,
        exit_code: if passed { EXIT_OK } else { EXIT_VERIFY },
    };
    Ok((report, summary))
}

/// One suite's JSON result and whether it passed; errors are reported inline.
fn suite_result(r: Result<(Value, bool)>) -> (Value, bool, Option<i32>) {
    match r {
        Ok((v, ok)) => (v, ok, None),
        Err(e) => (
            json!({ "error": e.to_string() }),
            false,
            Some(exit_code(&e)),
        ),
    }
}

fn exchange_suite(mu: &DppDistribution<f64>) -> Result<(Value, bool)> {
    let tab = Tabulated::from_distribution(mu)?;
    let s = verify_all_pairs(&tab)?;
    let ok = s.failures == 0 && s.summed_failures == 0 && s.hurwitz_failures == 0;
    Ok((serde_json::to_value(&s).expect("summary serializes"), ok))
}

fn walk_suite(mu: &DppDistribution<f64>, a: &VerifyArgs) -> Result<(Value, bool)> {
    let k = mu.k();
    let l = a.l.unwrap_or(k - 1);
    let tab = Tabulated::from_distribution(mu)?;
    let mut reports = Vec::with_capacity(a.fields + 1);
    let mut ok = true;
    for f in 0..=a.fields {
        let field = if f == 0 {
            FieldVector::ones(mu.ground_size())
        } else {
            FieldVector::random(mu.ground_size(), 1.0, a.seed.wrapping_add(f as u64))
        };
        let rep = chain_report(&apply_field(&tab, &field)?, l)?;
        ok &= rep.validity.ok && rep.cheeger_ok && rep.gap > 0.0;
        reports.push(rep);
    }
    let mut out = json!({ "chains": reports });
    if a.steps > 0 {
        let chain = build_downup(&tab, l)?;
        let start = chain.states[0].clone();
        let traj = sample_walk(&tab, &start, l, a.steps, a.seed)?;
        let tv = tv_distance(&empirical(&chain, &traj), &chain.pi)?;
        out["sampler"] = json!({ "steps": a.steps, "seed": a.seed, "tv": tv });
        ok &= tv < 0.05;
    }
    Ok((out, ok))
}

fn coreset_suite(mu: &DppDistribution<f64>, a: &VerifyArgs) -> Result<(Value, bool)> {
    let tab = Tabulated::from_distribution(mu)?;
    let plan = PartitionPlan::random_balanced(mu.ground_size(), a.parts, a.seed)?;
    let rep = compose_and_report(&tab, &plan, a.zeta)?;
    let ok = rep.bound_ok && rep.chain_ok;
    Ok((serde_json::to_value(&rep).expect("report serializes"), ok))
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<(RunReport, String)> {
    let kernel = load_kernel(&a.kernel)?;
    let mu = DppDistribution::new(kernel.clone(), a.k)?;
    let run_exchange = matches!(a.suite, Suite::Exchange | Suite::All);
    let run_walk = matches!(a.suite, Suite::Walk | Suite::All);
    let run_coreset = matches!(a.suite, Suite::Coreset | Suite::All);
    let mut results = serde_json::Map::new();
    let mut passed = 0usize;
    let mut failed = 0usize;
    let mut verify_failed = false;
    let mut worst: Option<i32> = None;
    let mut record = |name: &str, r: Result<(Value, bool)>| {
        let (v, ok, code) = suite_result(r);
        results.insert(name.to_string(), json!({ "passed": ok, "report": v }));
        if ok {
            passed += 1;
        } else {
            failed += 1;
        }
        match code {
            Some(c) => worst = Some(worst.map_or(c, |w| w.max(c))),
            None => verify_failed |= !ok,
        }
    };
    if run_exchange {
        record("exchange", exchange_suite(&mu));
    }
    if run_walk {
        record("walk", walk_suite(&mu, a));
    }
    if run_coreset {
        record("coreset", coreset_suite(&mu, a));
    }
    let summary = format!("verify: {passed} suite(s) passed, {failed} failed");
    let report = RunReport {
        command: echo(&Command::Verify(a.clone())),
        seed: Some(a.seed),
        instance: describe(&kernel, &a.kernel, a.k),
        results: Value::Object(results),
        passed: failed == 0,
        timing_ms: 0.0,
        // Verification failures take precedence over suites that could not run.
        exit_code: if verify_failed {
            EXIT_VERIFY
        } else {
            worst.unwrap_or(EXIT_OK)
        },
    };
    Ok((report, summary))
}
