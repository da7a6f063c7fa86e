// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command-line front end: `verify`, `run` and `dump`.
//!
//! Exit codes: 0 on success, 1 when a verification check fails, 2 for usage
//! and input errors. Outputs are rendered in full before anything is
//! written, and files are written through a temporary sibling and renamed,
//! so a rejected invocation never leaves a partial file behind.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::correlated::{self, Decomposition};
use crate::error::{Error, Result};
use crate::hybrid::{self, Ancilla, PauliErrorTag};
use crate::linalg::{max_abs_diff, ComplexMatrix};
use crate::noise_exp::{run_named, ExperimentSpec, NoiseModel};
use crate::random::{haar_su2, haar_u2, random_state, rng_for};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CORRQEC_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "corrqec",
    version,
    about = "Codes for fully-correlated qubit noise: verification and experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run the verification battery and print one PASS/FAIL line per check.
    Verify(VerifyArgs),
    /// Simulate an experiment and write its report.
    Run(RunArgs),
    /// Print a matrix or circuit in text form.
    Dump(DumpArgs),
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Add DELTA to one entry of the encoder before checking.
    #[arg(long, hide = true, value_name = "ROW,COL,DELTA")]
    perturb_entry: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecompositionArg {
    Standard,
    Basic,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Experiment spec in JSON; flags given alongside override its fields.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// corr3, corr5 or hybrid.
    #[arg(long)]
    scheme: Option<String>,
    /// Register size for the hybrid scheme.
    #[arg(long)]
    n: Option<usize>,
    /// Collective unitary: h, x, y, z, i, ry:<angle> or matrix:[...].
    #[arg(long)]
    w: Option<String>,
    /// Channel JSON file for the correlated schemes.
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long, value_enum)]
    decomposition: Option<DecompositionArg>,
    /// Data bits, lowest data wire first.
    #[arg(long)]
    data: Option<String>,
    /// Ancilla bits or ry:<angle>.
    #[arg(long)]
    ancilla: Option<String>,
    /// Comma-separated Pauli errors for the hybrid scheme.
    #[arg(long)]
    errors: Option<String>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// 0, synthetic, or p1=..,p2=..,readout=..
    #[arg(long)]
    noise: Option<String>,
    /// Override the report name (also the RNG stream label).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Reverse histogram keys so the last wire prints first.
    #[arg(long)]
    ibm_bit_order: bool,
}

#[derive(Debug, clap::Args)]
struct DumpArgs {
    /// u, old-u, legacy, p2, p3, pn:<n>, or circuit:<standard3|basic3|five-qubit|recursive:<k>|hybrid:<n>>
    what: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Entry point used by the binary.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let target: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = match cli.command {
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Run(a) => cmd_run(&a, out),
        Command::Dump(a) => cmd_dump(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Inputs to the verification battery.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    /// Encoder whose decompositions and block structure are checked.
    pub encoder: ComplexMatrix,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            encoder: correlated::build_new_u(),
            seed: 2024,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation seen; for the legacy-product comparison it is the
    /// distance that must be large.
    pub max_deviation: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:<28} max_dev={:.3e}",
            self.name, self.max_deviation
        );
        if !self.detail.is_empty() {
            s.push_str("  ");
            s.push_str(&self.detail);
        }
        s
    }
}

fn check(name: &'static str, outcome: Result<(bool, f64, String)>) -> CheckResult {
    match outcome {
        Ok((passed, max_deviation, detail)) => CheckResult {
            name,
            passed,
            max_deviation,
            detail,
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            max_deviation: f64::NAN,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check against `cfg`.
pub fn run_checks(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let u = &cfg.encoder;
    let mut out = Vec::new();

    out.push(check(
        "encoder-unitary",
        u.unitarity_deviation()
            .map(|d| (d <= 1e-12, d, String::new())),
    ));

    out.push(check(
        "standard-decomposition",
        max_abs_diff(&correlated::standard_decomposition().realize(), u)
            .map(|d| (d <= 1e-12, d, "6 gates".into())),
    ));

    let basic = correlated::basic_decomposition();
    let (two, one) = (basic.count_arity(2), basic.count_arity(1));
    out.push(check(
        "basic-decomposition",
        max_abs_diff(&basic.realize(), u).map(|d| {
            (
                d <= 1e-12 && two == 6 && one == 8,
                d,
                format!("{two} two-wire, {one} one-wire"),
            )
        }),
    ));

    let legacy = correlated::erroneous_decomposition_product();
    out.push(check("legacy-product-as-published", {
        let printed: Vec<f64> = correlated::ERRONEOUS_PRODUCT_ROUNDED
            .iter()
            .flatten()
            .copied()
            .collect();
        ComplexMatrix::from_real(8, 8, &printed)
            .and_then(|m| max_abs_diff(&legacy, &m))
            .map(|d| (d <= 5e-5, d, String::new()))
    }));
    out.push(check(
        "legacy-product-vs-old-u",
        max_abs_diff(&legacy, &correlated::build_old_u())
            .map(|d| (d >= 0.5, d, format!("max_diff={d:.6} (must be >= 0.5)"))),
    ));

    out.push(check("block-structure-su2", block_su2(u, cfg.seed)));
    out.push(check("block-structure-hadamard", {
        correlated::verify_block_structure(u, crate::gates::h().matrix()).map(|r| {
            let d = r.off_diag_norm.max(r.phase_adjusted_deviation);
            (
                d <= 1e-12,
                d,
                format!(
                    "det(H)={:+.0}, |top-left - I2(x)H|={:.4}",
                    r.det_w.re, r.top_left_deviation
                ),
            )
        })
    }));
    out.push(check(
        "three-qubit-recovery",
        three_qubit_recovery(u, cfg.seed),
    ));
    out.push(check("recursive-recovery", recursive_recovery(cfg.seed)));
    out.push(check(
        "explicit-five-qubit-circuit",
        correlated::recursive_encoder(2).and_then(|r| {
            let d = max_abs_diff(
                &correlated::explicit_five_qubit_encoder(correlated::alpha()).realize(),
                &r.realize(),
            )?;
            Ok((d <= 1e-12, d, String::new()))
        }),
    ));
    out.push(check("hybrid-conjugation", hybrid_conjugation(cfg.seed)));
    out.push(check("hybrid-circuits", hybrid_circuits()));
    out
}

fn block_su2(u: &ComplexMatrix, seed: u64) -> Result<(bool, f64, String)> {
    let mut rng = rng_for(seed, "block-structure");
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = correlated::verify_block_structure(u, &haar_su2(&mut rng))?;
        worst = worst.max(r.off_diag_norm).max(r.top_left_deviation);
    }
    Ok((worst <= 1e-10, worst, "100 Haar SU(2)".into()))
}

fn three_qubit_recovery(u: &ComplexMatrix, seed: u64) -> Result<(bool, f64, String)> {
    let mut rng = rng_for(seed, "three-qubit");
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let psi = random_state(1, &mut rng);
        let v = random_state(1, &mut rng);
        let ch = correlated::CorrelatedChannel::single(3, haar_u2(&mut rng))?;
        for m in [1, 3, 7] {
            let f = correlated::protect_with_encoder(u, &psi, &v, &ch, m)?.fidelity_data;
            worst = worst.max((1.0 - f).abs());
        }
    }
    Ok((worst <= 1e-9, worst, "50 triples, m in {1,3,7}".into()))
}

fn recursive_recovery(seed: u64) -> Result<(bool, f64, String)> {
    let mut rng = rng_for(seed, "recursive");
    let enc = correlated::recursive_encoder(2)?;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let data = [random_state(1, &mut rng), random_state(1, &mut rng)];
        let v = random_state(1, &mut rng);
        let w = haar_u2(&mut rng);
        let out = correlated::recursive_protect(&enc, &data, &v, &w, 1)?;
        for f in out.data_fidelities.iter().chain(&out.ancilla_fidelities) {
            worst = worst.max((1.0 - f).abs());
        }
    }
    Ok((worst <= 1e-9, worst, "20 random inputs".into()))
}

fn hybrid_conjugation(seed: u64) -> Result<(bool, f64, String)> {
    let mut rng = rng_for(seed, "hybrid");
    let mut worst: f64 = 0.0;
    for n in 2..=crate::circuit::MAX_WIRES {
        let k = hybrid::ancilla_wires(n).len();
        let data = random_state(n - k, &mut rng);
        for tag in [PauliErrorTag::X, PauliErrorTag::Y, PauliErrorTag::Z] {
            for b in 0..(1usize << k) {
                let bits = crate::circuit::format_bits(b, k);
                let out = hybrid::hybrid_protect(n, &data, &Ancilla::Basis(bits), &[tag])?;
                worst = worst.max((1.0 - out.fidelity_data).abs());
                if n.is_multiple_of(2) {
                    worst = worst.max(out.ancilla_deviation.unwrap_or(f64::INFINITY));
                }
            }
        }
    }
    Ok((worst <= 1e-10, worst, "n = 2..8, X/Y/Z".into()))
}

fn hybrid_circuits() -> Result<(bool, f64, String)> {
    let mut worst: f64 = 0.0;
    for n in 2..=crate::circuit::MAX_WIRES {
        let enc = hybrid::hybrid_encoder(n)?;
        worst = worst.max(max_abs_diff(&enc.circuit.realize(), &enc.matrix)?);
    }
    Ok((worst <= 1e-10, worst, "n = 2..8".into()))
}

fn parse_perturbation(text: &str) -> Result<(usize, usize, f64)> {
    let bad = || {
        Error::Parse(format!(
            "--perturb-entry expects ROW,COL,DELTA, got `{text}`"
        ))
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let row: usize = parts[0].parse().map_err(|_| bad())?;
    let col: usize = parts[1].parse().map_err(|_| bad())?;
    let delta: f64 = parts[2].parse().map_err(|_| bad())?;
    if row >= 8 || col >= 8 || !delta.is_finite() {
        return Err(bad());
    }
    Ok((row, col, delta))
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = VerifyConfig {
        seed: args.seed,
        ..VerifyConfig::default()
    };
    if let Some(p) = &args.perturb_entry {
        let (row, col, delta) = parse_perturbation(p)?;
        let v = cfg.encoder.get(row, col) + delta;
        cfg.encoder = cfg.encoder.with_entry(row, col, v)?;
    }
    let results = run_checks(&cfg);
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    text.push_str(&format!("{} checks, {failed} failed\n", results.len()));
    out.write_all(text.as_bytes())?;
    Ok(if failed == 0 {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = match (&args.spec, &args.scheme) {
        (Some(path), _) => ExperimentSpec::from_json(&read_file(path)?)?,
        (None, Some(scheme)) => ExperimentSpec::new(scheme),
        (None, None) => return Err(Error::Parse("run needs --scheme or --spec".into())),
    };
    if let Some(s) = &args.scheme {
        spec.scheme = s.clone();
    }
    if let Some(path) = &args.channel {
        spec.channel = Some(serde_json::from_str(&read_file(path)?)?);
    }
    if args.n.is_some() {
        spec.n = args.n;
    }
    if args.w.is_some() {
        spec.w = args.w.clone();
    }
    if let Some(d) = args.decomposition {
        spec.decomposition = match d {
            DecompositionArg::Standard => Decomposition::Standard,
            DecompositionArg::Basic => Decomposition::Basic,
        };
    }
    if args.data.is_some() {
        spec.data = args.data.clone();
    }
    if args.ancilla.is_some() {
        spec.ancilla = args.ancilla.clone();
    }
    if args.errors.is_some() {
        spec.errors = args.errors.clone();
    }
    if args.name.is_some() {
        spec.name = args.name.clone();
    }
    if let Some(r) = args.rounds {
        spec.rounds = r;
    }
    if let Some(s) = args.shots {
        spec.shots = s;
    }
    if let Some(s) = args.seed {
        spec.seed = s;
    }
    if let Some(n) = &args.noise {
        spec.noise = NoiseModel::parse(n)?;
    }
    Ok(spec)
}

fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = build_spec(args)?;
    let mut report = run_named(&spec)?;
    if args.ibm_bit_order {
        report = report.with_reversed_bit_order()?;
    }
    let (text, ext) = match args.format {
        Format::Json => (report.to_json(), "json"),
        Format::Csv => (report.to_csv(), "csv"),
    };
    emit(
        &text,
        args.output.as_deref(),
        &format!("{}.{ext}", sanitize(&report.name)),
        out,
    )?;
    Ok(EXIT_OK)
}

/// Renders a dump target.
pub fn dump_text(what: &str) -> Result<String> {
    let parse_n = |s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::Parse(format!("bad size in `{what}`")))
    };
    if let Some(c) = what.strip_prefix("circuit:") {
        let circuit = match c {
            "standard3" => correlated::standard_decomposition(),
            "basic3" => correlated::basic_decomposition(),
            "five-qubit" => correlated::explicit_five_qubit_encoder(correlated::alpha()),
            "p2" => hybrid::p2_circuit(),
            "p3" => hybrid::p3_circuit(),
            _ => {
                if let Some(k) = c.strip_prefix("recursive:") {
                    correlated::recursive_encoder(parse_n(k)?)?
                } else if let Some(n) = c.strip_prefix("hybrid:") {
                    hybrid::hybrid_circuit(parse_n(n)?)?
                } else {
                    return Err(Error::Parse(format!("unknown circuit `{c}`")));
                }
            }
        };
        return Ok(circuit.to_text());
    }
    let m = match what {
        "u" => correlated::build_new_u(),
        "old-u" => correlated::build_old_u(),
        "legacy" => correlated::erroneous_decomposition_product(),
        "p2" => hybrid::p2_matrix(),
        "p3" => hybrid::p3_matrix(),
        _ => match what.strip_prefix("pn:") {
            Some(n) => hybrid::hybrid_matrix(parse_n(n)?)?,
            None => return Err(Error::Parse(format!("unknown dump target `{what}`"))),
        },
    };
    Ok(m.to_text())
}

fn cmd_dump(args: &DumpArgs, out: &mut dyn Write) -> Result<i32> {
    let text = dump_text(&args.what)?;
    emit(
        &text,
        args.output.as_deref(),
        &format!("{}.txt", sanitize(&args.what)),
        out,
    )?;
    Ok(EXIT_OK)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Writes to `explicit`, else to `$CORRQEC_OUT_DIR/default_name`, else to `out`.
fn emit(
    text: &str,
    explicit: Option<&Path>,
    default_name: &str,
    out: &mut dyn Write,
) -> Result<()> {
    let target = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(default_name)),
    };
    match target {
        Some(path) => write_atomic(&path, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, text).map_err(|e| Error::Io(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(format!("{}: {e}", path.display()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("corrqec").chain(args.iter().copied());
        let code = run_cli(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn all_checks_pass_on_the_encoder() {
        let results = run_checks(&VerifyConfig::default());
        for r in &results {
            assert!(r.passed, "{}", r.line());
        }
        assert_eq!(results.len(), 12);
    }

    #[test]
    fn perturbed_encoder_fails_decomposition() {
        let mut cfg = VerifyConfig::default();
        let v = cfg.encoder.get(1, 0) + 1e-6;
        cfg.encoder = cfg.encoder.with_entry(1, 0, v).unwrap();
        let results = run_checks(&cfg);
        let std = results
            .iter()
            .find(|r| r.name == "standard-decomposition")
            .unwrap();
        assert!(!std.passed);
    }

    #[test]
    fn verify_command_output() {
        let (code, out, _) = run(&["verify"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("max_diff=1.000000"));
        let (code, out, _) = run(&["verify", "--perturb-entry", "0,7,0.001"]);
        assert_eq!(code, EXIT_VERIFY_FAILED);
        assert!(out.contains("FAIL standard-decomposition"));
        let (code, _, err) = run(&["verify", "--perturb-entry", "9,0,1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("ROW,COL,DELTA"));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&[]).0, EXIT_USAGE);
        assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run(&["run"]).0, EXIT_USAGE);
        assert_eq!(run(&["run", "--scheme", "nope"]).0, EXIT_USAGE);
        assert_eq!(
            run(&["run", "--scheme", "corr3", "--noise", "p1=3"]).0,
            EXIT_USAGE
        );
        assert_eq!(run(&["dump", "pn:9"]).0, EXIT_USAGE);
        assert_eq!(run(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn dump_targets() {
        let (code, out, _) = run(&["dump", "circuit:basic3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 14);
        let (_, out, _) = run(&["dump", "pn:5"]);
        let m = ComplexMatrix::parse_text(&out).unwrap();
        assert_eq!((m.rows(), m.cols()), (32, 32));
        let (_, out, _) = run(&["dump", "u"]);
        assert_eq!(
            ComplexMatrix::parse_text(&out).unwrap(),
            correlated::build_new_u()
        );
    }

    #[test]
    fn run_command_reports() {
        let (code, out, _) = run(&[
            "run", "--scheme", "corr3", "--w", "h", "--shots", "8192", "--seed", "1", "--noise",
            "0",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["success_probability"].as_f64().unwrap(), 1.0);
        let (_, csv, _) = run(&["run", "--scheme", "corr3", "--format", "csv"]);
        assert!(csv.starts_with("bitstring,count\n"));
    }
}
