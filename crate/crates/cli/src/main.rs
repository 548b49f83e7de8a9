//! `acs`: non-existence certificates for almost complex structures on sphere
//! bundles over CP^n, Chern class divisibility bounds, and brute-force
//! verification suites.
//!
//! Exit codes: 0 on success (certificate found, zero violations), 1 when a
//! check comes back negative, 2 on usage or resource-limit errors.

use std::fmt::Write as _;
use std::process::ExitCode;

use acs_core::cherndiv::{self, DivisibilityRange, TermValuationReport};
use acs_core::verify::{self, Bounds, Suite, VerifyReport};
use acs_core::{
    a_of_n, corollary_threshold, find_witness, scan_grid, BundleParams, Condition, Prime,
    ScanRow, WitnessCertificate,
};
use anyhow::{anyhow, bail, Context};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Largest fibre parameter accepted by `check` and `scan`.
const MAX_Q: u64 = 512;

#[derive(Parser, Debug)]
#[command(name = "acs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search for a witness prime for one (n, q).
    Check {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        /// Euler characteristic of the base (default n + 1, i.e. CP^n).
        #[arg(long)]
        chi: Option<u64>,
        /// Include divisibility ranges and the minimizing term for c_{n+q}.
        #[arg(long)]
        explain: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Scan the rectangle 1..=n_max × 1..=q_max over CP^n.
    Scan {
        #[arg(long)]
        n_max: u64,
        #[arg(long)]
        q_max: u64,
        #[arg(long, value_enum, default_value_t = ChiMode::Cpn)]
        chi_mode: ChiMode,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Guaranteed divisibility ranges (with --l) or the computed bound for c_k (with --k).
    #[command(group(ArgGroup::new("target").required(true).args(["l", "k"])))]
    Divisibility {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a brute-force verification suite.
    Verify {
        /// One of lemma-sp, lemma-vp, newton, legendre, dchern, corollary, main-theorem.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        q_span: Option<u64>,
        #[arg(long)]
        l_max: Option<u64>,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print n, a(n) and the p = 2 threshold for 1 <= n <= n_max.
    ATable {
        #[arg(long)]
        n_max: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ChiMode {
    /// χ = n + 1.
    Cpn,
}

/// Argument or resource errors; reported with exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

type CmdResult = Result<(String, bool), Usage>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::Check {
            n,
            q,
            chi,
            explain,
            format,
        } => cmd_check(n, q, chi, explain, format),
        Command::Scan {
            n_max,
            q_max,
            chi_mode,
            format,
        } => cmd_scan(n_max, q_max, chi_mode, format),
        Command::Divisibility { p, q, l, k, format } => cmd_divisibility(p, q, l, k, format),
        Command::Verify {
            suite,
            n_max,
            p_max,
            q_max,
            q_span,
            l_max,
            k_max,
            samples,
            seed,
            format,
        } => {
            let bounds = Bounds {
                n_max,
                p_max,
                q_max,
                q_span,
                l_max,
                k_max,
                samples,
                seed,
            };
            cmd_verify(&suite, &bounds, format)
        }
        Command::ATable { n_max } => cmd_a_table(n_max),
    };
    match result {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var("ACS_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .with_context(|| format!("ACS_THREADS must be a positive integer, got `{raw}`"))?;
    if threads == 0 {
        bail!("ACS_THREADS must be positive");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker pool")?;
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn require_format(format: Format, allowed: &[Format]) -> Result<(), Usage> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(anyhow!("format {format:?} is not supported by this command").into())
    }
}

fn check_q(q: u64) -> Result<(), Usage> {
    if q > MAX_Q {
        return Err(anyhow!("q = {q} exceeds the limit of {MAX_Q}").into());
    }
    Ok(())
}

fn describe_certificate(cert: &WitnessCertificate) -> String {
    match cert.condition {
        Condition::A => format!(
            "prime {}, condition A: p = {} > n + 1 = {} and v_p((q-1)!) = {} >= v_p(chi) + delta_p + 1 = {}",
            cert.prime,
            cert.prime,
            cert.n + 1,
            cert.lhs,
            cert.rhs
        ),
        Condition::B => format!(
            "prime {}, condition B: {}^{} - {} = {} {} {}{}",
            cert.prime,
            cert.prime,
            cert.exponent.unwrap_or_default(),
            cert.q,
            cert.lhs,
            if cert.strict { ">" } else { ">=" },
            cert.rhs,
            if cert.strict {
                ""
            } else {
                " (p - 1 does not divide q - 1)"
            }
        ),
    }
}

#[derive(Serialize)]
struct TopClass {
    k: u64,
    report: TermValuationReport,
}

#[derive(Serialize)]
struct Explanation {
    prime: u64,
    /// Exponent needed to rule out `c_{n+q} = χ(E)`: `v_p(χ) + δ_p + 1`.
    l: u64,
    range_i: DivisibilityRange,
    range_ii: Option<DivisibilityRange>,
    top_class: TopClass,
}

#[derive(Serialize)]
struct CheckOutput<'a> {
    #[serde(flatten)]
    row: &'a ScanRow,
    chi: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    explain: Option<Vec<Explanation>>,
}

fn explain(params: &BundleParams, witness: Option<&WitnessCertificate>) -> Result<Vec<Explanation>, Usage> {
    let primes: Vec<Prime> = match witness {
        Some(cert) => vec![Prime::new(cert.prime)?],
        None => vec![Prime::TWO, Prime::THREE],
    };
    let k = params.n + params.q;
    primes
        .into_iter()
        .map(|p| {
            let l = acs_core::padic::vp_u64(p, params.chi)
                .finite()
                .expect("chi is nonzero") as u64
                + p.delta()
                + 1;
            let (range_i, range_ii) = cherndiv::dchern_ranges(p, params.q, l)?;
            let report = cherndiv::ck_divisibility_report(p, params.q, k)
                .context("explaining the top Chern class")?;
            Ok(Explanation {
                prime: p.get(),
                l,
                range_i,
                range_ii,
                top_class: TopClass { k, report },
            })
        })
        .collect()
}

fn fmt_range(r: &DivisibilityRange) -> String {
    format!(
        "k in [{}, {}{}  exponent {}",
        r.k_min,
        r.k_max,
        if r.inclusive { "]" } else { ")" },
        r.exponent
    )
}

fn fmt_report(r: &TermValuationReport) -> String {
    let parts: Vec<String> = r
        .breakdown
        .iter()
        .map(|f| format!("{}^{} (v={})", f.part, f.multiplicity, f.factor_valuation))
        .collect();
    format!(
        "partition {} - v_p(({})!) = {}: valuation {}",
        parts.join(" "),
        r.partition.total_parts(),
        r.parts_factorial_valuation,
        r.term_valuation
    )
}

fn cmd_check(n: u64, q: u64, chi: Option<u64>, want_explain: bool, format: Format) -> CmdResult {
    require_format(format, &[Format::Text, Format::Json])?;
    check_q(q)?;
    let chi = chi.unwrap_or(n + 1);
    let params = BundleParams::new(n, q, chi)?;
    let a_n = a_of_n(n)?;
    let row = ScanRow {
        n,
        q,
        a_n,
        expected_by_theorem: q >= a_n,
        witness: find_witness(&params)?,
    };
    let explanation = if want_explain {
        Some(explain(&params, row.witness.as_ref())?)
    } else {
        None
    };
    let found = row.witness.is_some();

    let out = match format {
        Format::Json => to_json(&CheckOutput {
            row: &row,
            chi,
            explain: explanation,
        }),
        _ => {
            let mut s = String::new();
            writeln!(
                s,
                "n={n} q={q} chi={chi} a(n)={a_n} q>=a(n): {}",
                if row.expected_by_theorem { "yes" } else { "no" }
            )
            .unwrap();
            match &row.witness {
                Some(cert) => writeln!(s, "certificate: {}", describe_certificate(cert)).unwrap(),
                None => writeln!(s, "no certificate").unwrap(),
            }
            for e in explanation.iter().flatten() {
                writeln!(s, "p={} l={}", e.prime, e.l).unwrap();
                writeln!(s, "  (i)  {}", fmt_range(&e.range_i)).unwrap();
                match &e.range_ii {
                    Some(r) => writeln!(s, "  (ii) {}", fmt_range(r)).unwrap(),
                    None => writeln!(s, "  (ii) empty").unwrap(),
                }
                writeln!(s, "  c_{}: {}", e.top_class.k, fmt_report(&e.top_class.report)).unwrap();
            }
            s
        }
    };
    Ok((out, found))
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    rows: &'a [ScanRow],
    violations: usize,
}

fn cmd_scan(n_max: u64, q_max: u64, chi_mode: ChiMode, format: Format) -> CmdResult {
    if n_max == 0 || q_max == 0 {
        return Err(anyhow!("bounds must be at least 1").into());
    }
    check_q(q_max)?;
    let ChiMode::Cpn = chi_mode;
    eprintln!("scanning {} cells", n_max * q_max);
    let rows = scan_grid(n_max, q_max)?;
    let violations = rows.iter().filter(|r| r.is_violation()).count();
    let expected = rows.iter().filter(|r| r.expected_by_theorem).count();
    let summary = format!(
        "rows={} expected={expected} certified={} violations={violations}",
        rows.len(),
        rows.iter().filter(|r| r.witness.is_some()).count()
    );

    let out = match format {
        Format::Json => to_json(&ScanOutput {
            rows: &rows,
            violations,
        }),
        Format::Csv => {
            let mut s = String::from("n,q,a_n,expected,witness_prime,condition\n");
            for r in &rows {
                let (prime, cond) = match &r.witness {
                    Some(c) => (c.prime.to_string(), format!("{:?}", c.condition)),
                    None => (String::new(), String::new()),
                };
                writeln!(s, "{},{},{},{},{prime},{cond}", r.n, r.q, r.a_n, r.expected_by_theorem).unwrap();
            }
            eprintln!("{summary}");
            s
        }
        Format::Text => {
            let mut s = format!("{:>4} {:>4} {:>4} {:>8} {:>6} {:>4}\n", "n", "q", "a_n", "expected", "prime", "cond");
            for r in &rows {
                let (prime, cond) = match &r.witness {
                    Some(c) => (c.prime.to_string(), format!("{:?}", c.condition)),
                    None => ("-".into(), "-".into()),
                };
                writeln!(
                    s,
                    "{:>4} {:>4} {:>4} {:>8} {:>6} {:>4}",
                    r.n,
                    r.q,
                    r.a_n,
                    if r.expected_by_theorem { "yes" } else { "no" },
                    prime,
                    cond
                )
                .unwrap();
            }
            writeln!(s, "{summary}").unwrap();
            s
        }
    };
    Ok((out, violations == 0))
}

#[derive(Serialize)]
struct RangesOutput {
    p: u64,
    q: u64,
    l: u64,
    range_i: DivisibilityRange,
    range_ii: Option<DivisibilityRange>,
}

#[derive(Serialize)]
struct BoundOutput {
    p: u64,
    q: u64,
    k: u64,
    bound: i64,
    report: TermValuationReport,
}

fn cmd_divisibility(p: u64, q: u64, l: Option<u64>, k: Option<u64>, format: Format) -> CmdResult {
    require_format(format, &[Format::Text, Format::Json])?;
    let prime = Prime::new(p)?;
    if q == 0 {
        return Err(anyhow!("q must be positive").into());
    }
    let out = match (l, k) {
        (Some(l), None) => {
            if l == 0 {
                return Err(anyhow!("l must be positive").into());
            }
            let (range_i, range_ii) = cherndiv::dchern_ranges(prime, q, l)?;
            match format {
                Format::Json => to_json(&RangesOutput {
                    p,
                    q,
                    l,
                    range_i,
                    range_ii,
                }),
                _ => {
                    let mut s = format!("p={p} q={q} l={l}\n(i)  {}\n", fmt_range(&range_i));
                    match &range_ii {
                        Some(r) => writeln!(s, "(ii) {}", fmt_range(r)).unwrap(),
                        None => writeln!(s, "(ii) empty").unwrap(),
                    }
                    s
                }
            }
        }
        (None, Some(k)) => {
            if k < q {
                return Err(anyhow!("k = {k} must be at least q = {q}").into());
            }
            let report = cherndiv::ck_divisibility_report(prime, q, k)?;
            match format {
                Format::Json => to_json(&BoundOutput {
                    p,
                    q,
                    k,
                    bound: report.term_valuation,
                    report,
                }),
                _ => format!(
                    "p={p} q={q} k={k}\nbound {}\nminimizing term: {}\n",
                    report.term_valuation,
                    fmt_report(&report)
                ),
            }
        }
        _ => unreachable!("clap enforces exactly one of --l and --k"),
    };
    Ok((out, true))
}

fn cmd_verify(suite: &str, bounds: &Bounds, format: Format) -> CmdResult {
    require_format(format, &[Format::Text, Format::Json])?;
    let suite: Suite = suite.parse()?;
    eprintln!("running suite {suite}");
    let report = verify::run(suite, bounds)?;
    let ok = report.passed();
    let out = match format {
        Format::Json => to_json(&report),
        _ => fmt_verify(&report),
    };
    Ok((out, ok))
}

fn fmt_verify(r: &VerifyReport) -> String {
    let mut s = String::new();
    let bounds: Vec<String> = r.bounds.iter().map(|(k, v)| format!("{k}={v}")).collect();
    writeln!(s, "suite {} ({})", r.suite, bounds.join(", ")).unwrap();
    writeln!(s, "cases checked: {}", r.cases_checked).unwrap();
    writeln!(s, "failures: {}", r.failures.len()).unwrap();
    for f in r.failures.iter().take(20) {
        writeln!(s, "  {}: {}", f.case, f.detail).unwrap();
    }
    if r.failures.len() > 20 {
        writeln!(s, "  ... {} more", r.failures.len() - 20).unwrap();
    }
    for a in &r.anomalies {
        writeln!(s, "note: {a}").unwrap();
    }
    s
}

fn cmd_a_table(n_max: u64) -> CmdResult {
    if n_max == 0 {
        return Err(anyhow!("n_max must be at least 1").into());
    }
    let mut s = format!("{:>6} {:>6} {:>9}\n", "n", "a(n)", "threshold");
    for n in 1..=n_max {
        writeln!(s, "{:>6} {:>6} {:>9}", n, a_of_n(n)?, corollary_threshold(n)).unwrap();
    }
    Ok((s, true))
}
