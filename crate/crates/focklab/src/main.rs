//! Command-line laboratory: truncated matrices, Schatten diagnostics,
//! Berezin transforms, membership criteria, and the verification suites.
//!
//! Exit codes: 0 success / all checks pass, 1 any verification check
//! failed, 2 configuration error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use focklab::criteria::{
    berezin_lp_integral, berezin_transform, classify_symbolic, companion_comparison,
    criterion_integral, TransformWhich,
};
use focklab::fock::FockParams;
use focklab::harness::{
    emit_report, run_suites, CheckStatus, ExperimentConfig, OutputFormat, ResultRecord, SuiteName,
};
use focklab::operator::{SymbolPair, TruncatedOperator};
use focklab::poly::parse_complex;
use focklab::quadrature::{IntegralResult, ProbeSettings, QuadratureGrid};
use focklab::spectrum::{convergence_diagnose, singular_values, SchattenOrder};

/// Entries below this modulus are suppressed in matrix dumps.
const MATRIX_DUMP_FLOOR: f64 = 1e-300;

#[derive(Parser)]
#[command(
    name = "focklab",
    version,
    about = "Numerical laboratory for Volterra-type integral operators on Fock spaces"
)]
struct Cli {
    /// TOML experiment config; command-line flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Weight parameter of the space (alpha > 0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    alpha: Option<f64>,

    /// Schatten exponent (p > 0).
    #[arg(long, global = true, allow_negative_numbers = true)]
    p: Option<f64>,

    /// Symbol g: comma-separated complex coefficients, lowest degree first.
    #[arg(long, global = true)]
    g: Option<String>,

    /// Symbol psi in the same grammar; empty string removes it.
    #[arg(long, global = true)]
    psi: Option<String>,

    /// Operator kind: vg | ig | mg | igpsi | cgpsi | vgup | cgup.
    #[arg(long, global = true)]
    op: Option<String>,

    /// Truncation sizes, comma separated (e.g. 32,64,128).
    #[arg(long, global = true)]
    n: Option<String>,

    /// Quadrature tolerance.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tol: Option<f64>,

    /// Report output path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Report format: csv | json.
    #[arg(long, global = true)]
    format: Option<String>,

    /// Runtime column policy: none (deterministic output) | wall.
    #[arg(long, global = true)]
    timing: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dump the truncated operator matrix as CSV (m,n,re,im).
    Matrix {
        /// Use the quadrature path instead of the exact builder.
        #[arg(long)]
        quadrature: bool,
    },
    /// Singular values and Schatten norms across the truncation sizes.
    Schatten,
    /// Berezin-type transform at a point, or its L^{p/2} integral.
    Berezin {
        /// Which transform: i (companion family) | c (composition family).
        #[arg(long, default_value = "i")]
        which: String,
        /// Evaluation point as a complex literal.
        #[arg(long, default_value = "0")]
        w: String,
        /// Integrate B^{p/2} over the plane instead of evaluating at w.
        #[arg(long)]
        lp: bool,
    },
    /// Criterion integral with symbolic divergence analysis first.
    Criterion {
        #[arg(long, default_value = "i")]
        which: String,
    },
    /// Exact membership classification of the symbol pair.
    Classify,
    /// Convergence comparison across the companion and Volterra families.
    Compare,
    /// Run named verification suites.
    Verify {
        /// Comma-separated list out of kernel | shifts | paper-example |
        /// dichotomy | corollary | theorem1 | all.
        #[arg(long, default_value = "all")]
        suite: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("config {}: {e}", path.display()))?;
            ExperimentConfig::parse(&text).map_err(|e| e.to_string())?
        }
        None => ExperimentConfig::default(),
    };

    // flags override config
    if let Some(alpha) = cli.alpha {
        config.alpha = alpha;
    }
    if let Some(p) = cli.p {
        config.p = p;
    }
    if let Some(g) = &cli.g {
        config.g = g.clone();
    }
    if let Some(psi) = &cli.psi {
        config.psi = psi.clone();
    }
    if let Some(op) = &cli.op {
        config.op = op.clone();
    }
    if let Some(n) = &cli.n {
        config.sizes = n
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|e| format!("--n: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    if let Some(out) = &cli.out {
        config.output.path = out.display().to_string();
    }
    if let Some(format) = &cli.format {
        config.output.format = format.clone();
    }
    if let Some(timing) = &cli.timing {
        config.output.timing = timing.clone();
    }
    config.validate().map_err(|e| e.to_string())?;

    let params = FockParams::new(config.alpha);
    let order = SchattenOrder::new(config.p).map_err(|e| e.to_string())?;
    let pair = SymbolPair::new(config.parsed_g(), config.parsed_psi());

    match cli.command {
        Command::Matrix { quadrature } => {
            let size = *config.sizes.last().expect("validated nonempty");
            let kind = config.parsed_op();
            let op = if quadrature {
                let hint = 2 * size + 6;
                let grid =
                    QuadratureGrid::gaussian(config.alpha, (config.tol * 1e-3).max(1e-13), hint)
                        .map_err(|e| e.to_string())?;
                TruncatedOperator::build_by_quadrature(kind, &pair, params, size, &grid, config.tol)
                    .map_err(|e| e.to_string())?
            } else {
                TruncatedOperator::build(kind, &pair, params, size).map_err(|e| e.to_string())?
            };
            let mut text = String::from("m,n,re,im\n");
            for n in 0..size {
                for m in 0..size {
                    let e = op.entry(m, n);
                    if e.norm() < MATRIX_DUMP_FLOOR {
                        continue;
                    }
                    text.push_str(&format!("{m},{n},{},{}\n", e.re, e.im));
                }
            }
            let flagged = op.flagged_columns();
            if !flagged.is_empty() {
                eprintln!(
                    "note: truncation leakage above {:.0e} in columns {flagged:?}",
                    focklab::operator::LEAKAGE_FLAG_THRESHOLD
                );
            }
            write_or_print(&config, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Schatten => {
            let mut records = Vec::new();
            for &n in &config.sizes {
                let started = Instant::now();
                let op = TruncatedOperator::build(config.parsed_op(), &pair, params, n)
                    .map_err(|e| e.to_string())?;
                let spectrum = singular_values(&op);
                let norm = spectrum.schatten_norm(order);
                let power = spectrum.power_sum(order);
                println!(
                    "N={n}: S_{}-norm = {:.12e} (power sum {:.12e}, largest {:.6e})",
                    config.p,
                    norm,
                    power,
                    spectrum.largest()
                );
                records.push(measurement_record(
                    &config,
                    "schatten",
                    &format!("norm-n{n}"),
                    norm,
                    started,
                    &[("power_sum", format!("{power}"))],
                ));
            }
            if config.sizes.len() >= 3 {
                let report = convergence_diagnose(
                    config.parsed_op(),
                    &pair,
                    params,
                    order,
                    &config.sizes,
                    config.thresholds.diagnostics(),
                )
                .map_err(|e| e.to_string())?;
                println!(
                    "verdict: {} (fitted slope {:.4}, plateau {:.1e}, slope threshold {})",
                    report.verdict, report.slope, config.thresholds.plateau, config.thresholds.slope
                );
            }
            maybe_emit(&config, &records)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Berezin { which, w, lp } => {
            let which = parse_which(&which)?;
            let started = Instant::now();
            if lp {
                let outer = ProbeSettings {
                    radial_nodes: 10,
                    angular_nodes: 16,
                    doublings: 8,
                    trigger_run: config.thresholds.annulus_trigger,
                    ..ProbeSettings::default()
                };
                let outcome = berezin_lp_integral(which, &pair, params, order, &outer, config.tol)
                    .map_err(|e| e.to_string())?;
                let records = match &outcome.result {
                    IntegralResult::Finite {
                        value,
                        error_estimate,
                        ..
                    } => {
                        println!(
                            "L^(p/2) Berezin integral: finite, value = {value:.9e} \
                             (tail estimate {error_estimate:.2e}), norm estimate = {:.9e}",
                            outcome.norm_estimate.unwrap_or(f64::NAN)
                        );
                        vec![measurement_record(
                            &config,
                            "berezin",
                            "lp-integral",
                            *value,
                            started,
                            &[("status", "finite".into())],
                        )]
                    }
                    IntegralResult::Divergent { annulus_trace } => {
                        println!(
                            "L^(p/2) Berezin integral: divergent (annulus trace {annulus_trace:?})"
                        );
                        vec![measurement_record(
                            &config,
                            "berezin",
                            "lp-integral",
                            0.0,
                            started,
                            &[("status", "divergent".into())],
                        )]
                    }
                };
                maybe_emit(&config, &records)?;
            } else {
                let w = parse_complex(&w).map_err(|e| e.to_string())?;
                let value = berezin_transform(which, &pair, params, w, config.tol)
                    .map_err(|e| e.to_string())?;
                println!("B({w}) = {value:.12e}");
                let records = vec![measurement_record(
                    &config,
                    "berezin",
                    "transform",
                    value,
                    started,
                    &[("w", format!("{w}"))],
                )];
                maybe_emit(&config, &records)?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Criterion { which } => {
            let which = parse_which(&which)?;
            let started = Instant::now();
            let verdict = classify_symbolic(&pair).map_err(|e| e.to_string())?;
            let result = criterion_integral(which, &pair, params, order, config.tol)
                .map_err(|e| e.to_string())?;
            let records = match &result {
                IntegralResult::Finite {
                    value,
                    error_estimate,
                    ..
                } => {
                    println!(
                        "criterion integral: finite, value = {value:.12e} \
                         (error estimate {error_estimate:.2e}); classifier: {verdict}"
                    );
                    vec![measurement_record(
                        &config,
                        "criterion",
                        "integral",
                        *value,
                        started,
                        &[
                            ("status", "finite".into()),
                            ("classifier", format!("{verdict}")),
                            ("error_estimate", format!("{error_estimate}")),
                        ],
                    )]
                }
                IntegralResult::Divergent { .. } => {
                    println!("criterion integral: divergent; classifier: {verdict}");
                    vec![measurement_record(
                        &config,
                        "criterion",
                        "integral",
                        0.0,
                        started,
                        &[
                            ("status", "divergent".into()),
                            ("classifier", format!("{verdict}")),
                        ],
                    )]
                }
            };
            maybe_emit(&config, &records)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify => {
            let verdict = classify_symbolic(&pair).map_err(|e| e.to_string())?;
            println!("{verdict}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare => {
            let started = Instant::now();
            let report = companion_comparison(
                &pair,
                params,
                order,
                &config.sizes,
                config.thresholds.diagnostics(),
            )
            .map_err(|e| e.to_string())?;
            println!("companion (psi inside the integrand):  {}", report.companion.verdict);
            println!("volterra  (psi inside the integrand):  {}", report.volterra.verdict);
            println!("companion (composed after integrating): {}", report.companion_composed.verdict);
            println!("volterra  (composed after integrating): {}", report.volterra_composed.verdict);
            println!(
                "implication companion=>volterra holds: {} / {}",
                report.companion_implies_volterra, report.composed_implication
            );
            let ok = report.companion_implies_volterra && report.composed_implication;
            let records = vec![
                verdict_record(&config, "compare", "companion", &report.companion, started),
                verdict_record(&config, "compare", "volterra", &report.volterra, started),
                ResultRecord {
                    suite: "compare".into(),
                    check: "implication".into(),
                    status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    value: if ok { 1.0 } else { 0.0 },
                    expected: 1.0,
                    tolerance: 0.0,
                    runtime_ms: runtime(&config, started),
                    details: base_details(&config),
                },
            ];
            maybe_emit(&config, &records)?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Verify { suite } => {
            let names = suite
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    SuiteName::parse(s).ok_or_else(|| {
                        format!("unknown suite `{s}` (expected one of {:?})", SuiteName::TOKENS)
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let started = Instant::now();
            let outcome = run_suites(&names, &config);
            for r in &outcome.records {
                println!(
                    "[{}] {}/{}: value={:.6e} expected={:.6e} tol={:.1e}",
                    if r.status == CheckStatus::Pass { "PASS" } else { "FAIL" },
                    r.suite,
                    r.check,
                    r.value,
                    r.expected,
                    r.tolerance
                );
            }
            let passed = outcome
                .records
                .iter()
                .filter(|r| r.status == CheckStatus::Pass)
                .count();
            println!(
                "{}/{} checks passed in {:.1}s: {}",
                passed,
                outcome.records.len(),
                started.elapsed().as_secs_f64(),
                if outcome.all_pass { "PASS" } else { "FAIL" }
            );
            maybe_emit(&config, &outcome.records)?;
            Ok(if outcome.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn parse_which(s: &str) -> Result<TransformWhich, String> {
    match s {
        "i" => Ok(TransformWhich::ForI),
        "c" => Ok(TransformWhich::ForC),
        other => Err(format!("--which expects i or c, got `{other}`")),
    }
}

fn runtime(config: &ExperimentConfig, started: Instant) -> u64 {
    if config.output.timing == "wall" {
        started.elapsed().as_millis() as u64
    } else {
        0
    }
}

fn base_details(config: &ExperimentConfig) -> std::collections::BTreeMap<String, String> {
    let mut details = std::collections::BTreeMap::new();
    details.insert("alpha".into(), format!("{}", config.alpha));
    details.insert("p".into(), format!("{}", config.p));
    details.insert("g".into(), config.g.clone());
    details.insert("psi".into(), config.psi.clone());
    details.insert("op".into(), config.op.clone());
    details.insert("plateau".into(), format!("{}", config.thresholds.plateau));
    details.insert("slope".into(), format!("{}", config.thresholds.slope));
    details.insert(
        "annulus_trigger".into(),
        format!("{}", config.thresholds.annulus_trigger),
    );
    details
}

/// A measurement (not an assertion): status pass, expected mirrors value,
/// while the details make the record self-describing.
fn measurement_record(
    config: &ExperimentConfig,
    suite: &str,
    check: &str,
    value: f64,
    started: Instant,
    extra: &[(&str, String)],
) -> ResultRecord {
    let mut details = base_details(config);
    for (k, v) in extra {
        details.insert((*k).into(), v.clone());
    }
    ResultRecord {
        suite: suite.into(),
        check: check.into(),
        status: CheckStatus::Pass,
        value,
        expected: value,
        tolerance: 0.0,
        runtime_ms: runtime(config, started),
        details,
    }
}

fn verdict_record(
    config: &ExperimentConfig,
    suite: &str,
    check: &str,
    report: &focklab::spectrum::ConvergenceReport,
    started: Instant,
) -> ResultRecord {
    let mut details = base_details(config);
    details.insert("verdict".into(), report.verdict.to_string());
    details.insert("slope".into(), format!("{}", report.slope));
    details.insert("power_sums".into(), format!("{:?}", report.power_sums));
    ResultRecord {
        suite: suite.into(),
        check: check.into(),
        status: CheckStatus::Pass,
        value: *report.power_sums.last().unwrap_or(&0.0),
        expected: *report.power_sums.last().unwrap_or(&0.0),
        tolerance: 0.0,
        runtime_ms: runtime(config, started),
        details,
    }
}

fn maybe_emit(config: &ExperimentConfig, records: &[ResultRecord]) -> Result<(), String> {
    if config.output.path.is_empty() {
        return Ok(());
    }
    let format = OutputFormat::parse(&config.output.format)
        .ok_or_else(|| format!("unknown format `{}`", config.output.format))?;
    emit_report(records, format, config.output.path.as_ref())
        .map_err(|e| format!("writing {}: {e}", config.output.path))
}

fn write_or_print(config: &ExperimentConfig, text: &str) -> Result<(), String> {
    if config.output.path.is_empty() {
        print!("{text}");
        Ok(())
    } else {
        fs::write(&config.output.path, text)
            .map_err(|e| format!("writing {}: {e}", config.output.path))
    }
}
