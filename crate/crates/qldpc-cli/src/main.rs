//! Command-line surface for constructing, analyzing, and simulating
//! assisted quantum LDPC codes built from combinatorial designs.

mod spec;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qldpc::analysis::{
    count_configurations, degeneracy_audit, even_freeness, girth, odd_point_bound_check, phi_e,
    rank_predictions, AnalysisError, ConfigurationKind, Girth,
};
use qldpc::decode_sim::{gnuplot_script, sweep, write_csv, AuxProbability, SimConfig};
use qldpc::designs::export_alist;
use qldpc::galois::GeometryKind;
use qldpc::gf2::BinaryMatrix;
use qldpc::qcode::{
    ea_params, format_rate, rqa_params, DesignDistance, DistanceProvenance, QuantumCodeParams,
};

use spec::{assemble, AssembledCode, Assembly, Mode, Source};

/// Analysis found a theorem prediction violated.
const EXIT_VIOLATION: u8 = 2;
/// A requested check exceeded its search budget.
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qldpc",
    about = "Assisted quantum LDPC codes from combinatorial designs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Code source: ag(m,q), pg(m,q), bose(v), peg(rows,cols,w,seed), or
    /// alist(path).
    #[arg(long)]
    spec: Source,
    /// Matrix assembly; defaults to standard_form for rqa and, for ea, to
    /// addr_extend on even-replicate Steiner sources and incidence
    /// otherwise.
    #[arg(long, value_enum)]
    assembly: Option<Assembly>,
    /// Assistance mode.
    #[arg(long, value_enum, default_value = "rqa")]
    mode: Mode,
}

#[derive(Subcommand)]
enum Command {
    /// Write the assembled parity-check matrix as an alist file and print a
    /// shape and weight summary.
    Construct {
        #[command(flatten)]
        spec: SpecArgs,
        /// Output alist path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the derived quantum code parameters.
    Params {
        #[command(flatten)]
        spec: SpecArgs,
        /// Report the full derived dimension instead of the catalytic one.
        #[arg(long)]
        raw_dimension: bool,
    },
    /// Run structural checks and verify the applicable theorem predictions.
    Analyze {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated subset of girth,evenfree,configs,ranks,oddpoint,
        /// degeneracy.
        #[arg(long, value_delimiter = ',', required = true)]
        checks: Vec<String>,
        /// Search bound for evenfree (max 12) and oddpoint (max 9).
        #[arg(long, default_value_t = 7)]
        budget: usize,
    },
    /// Monte Carlo block-error-rate sweep over a crossover grid.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated, strictly increasing crossover probabilities in
        /// (0, 0.5].
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        /// Stop a grid point after this many block errors.
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        /// Hard cap on trials per grid point.
        #[arg(long, default_value_t = 10_000)]
        max_trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads (default: QLDPC_THREADS or all cores). Never
        /// affects results.
        #[arg(long)]
        threads: Option<usize>,
        /// Crossover expression for the first rows(H) positions: "p",
        /// "p/DIV", "p*FACTOR", or a constant.
        #[arg(long)]
        split: Option<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Re-derive the reference parameter table and check every entry.
    VerifyTable1,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Construct { spec, out } => cmd_construct(&spec, &out),
        Command::Params {
            spec,
            raw_dimension,
        } => cmd_params(&spec, raw_dimension),
        Command::Analyze {
            spec,
            checks,
            budget,
        } => cmd_analyze(&spec, &checks, budget),
        Command::Simulate {
            spec,
            grid,
            min_errors,
            max_trials,
            seed,
            threads,
            split,
            out,
            plot,
        } => cmd_simulate(
            &spec, grid, min_errors, max_trials, seed, threads, split, &out, plot,
        ),
        Command::VerifyTable1 => cmd_verify_table1(),
    }
}

fn assemble_args(spec: &SpecArgs) -> Result<AssembledCode> {
    assemble(&spec.spec, spec.assembly, spec.mode)
}

/// Truncate `numerator/denominator` to two decimals and trim zeros, the
/// convention used by the reference weight table.
fn weight_str(numerator: usize, denominator: usize) -> String {
    let scaled = numerator * 100 / denominator;
    if scaled.is_multiple_of(100) {
        format!("{}", scaled / 100)
    } else if scaled.is_multiple_of(10) {
        format!("{}.{}", scaled / 100, scaled % 100 / 10)
    } else {
        format!("{}.{:02}", scaled / 100, scaled % 100)
    }
}

fn mean_weights(m: &BinaryMatrix) -> String {
    let ones = m.count_ones();
    format!("{}/{}", weight_str(ones, m.cols()), weight_str(ones, m.rows()))
}

fn max_weights(m: &BinaryMatrix) -> String {
    format!(
        "{}/{}",
        m.column_weights().into_iter().max().unwrap_or(0),
        m.row_weights().into_iter().max().unwrap_or(0)
    )
}

fn weight_summary(m: &BinaryMatrix) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "rows: {}", m.rows());
    let _ = writeln!(out, "cols: {}", m.cols());
    let _ = writeln!(out, "mean_column_row_weight: {}", mean_weights(m));
    let _ = write!(out, "max_column_row_weight: {}", max_weights(m));
    out
}

fn cmd_construct(spec: &SpecArgs, out: &PathBuf) -> Result<ExitCode> {
    let code = assemble_args(spec)?;
    fs::write(out, export_alist(&code.matrix))
        .with_context(|| format!("writing {}", out.display()))?;
    println!("code: {}", code.id);
    println!("{}", weight_summary(&code.matrix));
    println!("alist: {}", out.display());
    Ok(ExitCode::SUCCESS)
}

/// Design distance for entanglement-assisted parameters: computed
/// even-freeness plus one where that is cheap, otherwise the structural
/// value for odd-order geometries.
fn ea_design_distance(code: &AssembledCode) -> Option<DesignDistance> {
    if let Some(design) = &code.design {
        let incidence = design.incidence();
        let cheap =
            design.steiner_block_size() == Some(3) || incidence.cols() - incidence.rank() <= 24;
        if cheap {
            if let Ok(report) = even_freeness(design, 7) {
                if report.witness.is_some() || report.r >= 7 {
                    return Some(DesignDistance {
                        value: report.r + 1,
                        provenance: DistanceProvenance::EvenFreeness,
                    });
                }
            }
        }
    }
    match code.geometry {
        Some((GeometryKind::Affine, _, q)) if q % 2 == 1 => Some(DesignDistance {
            value: 2 * q as usize,
            provenance: DistanceProvenance::Theorem,
        }),
        Some((GeometryKind::Projective, m, q)) if q % 2 == 1 && m >= 3 => Some(DesignDistance {
            value: 2 * q as usize + 2,
            provenance: DistanceProvenance::Theorem,
        }),
        _ => None,
    }
}

fn derive_params(code: &AssembledCode) -> Result<QuantumCodeParams> {
    match code.mode {
        Mode::Rqa => {
            let standard = code
                .standard
                .as_ref()
                .ok_or_else(|| anyhow!("rqa parameters need a standard-form assembly"))?;
            Ok(rqa_params(standard))
        }
        Mode::Ea => Ok(ea_params(&code.matrix, ea_design_distance(code))?),
    }
}

fn cmd_params(spec: &SpecArgs, raw_dimension: bool) -> Result<ExitCode> {
    let code = assemble_args(spec)?;
    let params = derive_params(&code)?;
    println!("code: {}", code.id);
    println!("{}", params.record(raw_dimension));
    Ok(ExitCode::SUCCESS)
}

#[derive(Default)]
struct CheckStatus {
    violations: usize,
    budget_exceeded: usize,
}

fn cmd_analyze(spec: &SpecArgs, checks: &[String], budget: usize) -> Result<ExitCode> {
    let code = assemble_args(spec)?;
    println!("code: {}", code.id);
    let mut status = CheckStatus::default();
    for check in checks {
        println!("--- {check} ---");
        match check.as_str() {
            "girth" => analyze_girth(&code, &mut status),
            "evenfree" => analyze_evenfree(&code, budget, &mut status)?,
            "configs" => analyze_configs(&code)?,
            "ranks" => analyze_ranks(&code, &mut status)?,
            "oddpoint" => analyze_oddpoint(&code, budget, &mut status)?,
            "degeneracy" => analyze_degeneracy(&code, &mut status)?,
            other => bail!(
                "unknown check {other:?} (expected girth, evenfree, configs, ranks, oddpoint, degeneracy)"
            ),
        }
    }
    Ok(if status.violations > 0 {
        ExitCode::from(EXIT_VIOLATION)
    } else if status.budget_exceeded > 0 {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    })
}

fn analyze_girth(code: &AssembledCode, status: &mut CheckStatus) {
    let g = girth(&code.matrix);
    println!("girth: {g}");
    // Index-1 design assemblies have girth exactly 6.
    if code.design.is_some() {
        let ok = g == Girth::Length(6);
        println!("predicted: 6, {}", if ok { "ok" } else { "VIOLATED" });
        if !ok {
            status.violations += 1;
        }
    }
}

fn analyze_evenfree(code: &AssembledCode, budget: usize, status: &mut CheckStatus) -> Result<()> {
    let Some(design) = &code.design else {
        println!("skipped: source has no design structure");
        return Ok(());
    };
    match even_freeness(design, budget.min(12)) {
        Ok(report) => {
            println!("{report}");
            let mut check = |label: String, ok: bool| {
                println!("{label}: {}", if ok { "ok" } else { "VIOLATED" });
                if !ok {
                    status.violations += 1;
                }
            };
            if design.steiner_block_size() == Some(3) {
                check("bound r <= 7".into(), report.r <= 7);
            }
            if let Some((kind, m, q)) = code.geometry {
                if q % 2 == 1 {
                    let predicted = match kind {
                        GeometryKind::Affine => Some(2 * q as usize - 1),
                        GeometryKind::Projective if m >= 3 => Some(2 * q as usize + 1),
                        GeometryKind::Projective => None,
                    };
                    if let Some(predicted) = predicted.filter(|&p| p <= budget.min(12)) {
                        check(format!("predicted r = {predicted}"), report.r == predicted);
                    }
                }
            }
        }
        Err(AnalysisError::SearchBudget { verified }) => {
            println!("budget exceeded: verified only up to size {verified}");
            status.budget_exceeded += 1;
        }
        Err(other) => return Err(other.into()),
    }
    Ok(())
}

fn analyze_configs(code: &AssembledCode) -> Result<()> {
    let Some(design) = &code.design else {
        println!("skipped: source has no design structure");
        return Ok(());
    };
    match design.steiner_block_size() {
        Some(3) => {
            let pasch = count_configurations(design, ConfigurationKind::Pasch)?;
            let grids = count_configurations(design, ConfigurationKind::Grid)?;
            let prisms = count_configurations(design, ConfigurationKind::DoubleTriangle)?;
            println!("pasch: {pasch}");
            println!("grid: {grids}");
            println!("double_triangle: {prisms}");
        }
        Some(mu) => {
            let count = count_configurations(design, ConfigurationKind::GeneralizedPasch(mu))?;
            println!("generalized_pasch({mu}): {count}");
        }
        None => {
            println!("skipped: configuration census requires a Steiner 2-design");
        }
    }
    Ok(())
}

fn analyze_ranks(code: &AssembledCode, status: &mut CheckStatus) -> Result<()> {
    let Some(design) = &code.design else {
        println!("skipped: source has no design structure");
        return Ok(());
    };
    let report = rank_predictions(design)?;
    println!("{report}");
    if !report.all_consistent {
        status.violations += 1;
    }
    if let Some((kind, m, q)) = code.geometry {
        let predicted: u64 = match (kind, q % 2) {
            (GeometryKind::Affine, 1) => q.pow(m),
            (GeometryKind::Projective, 1) => (q.pow(m + 1) - 1) / (q - 1) - 1,
            (GeometryKind::Projective, _) => phi_e(m, q)?,
            (GeometryKind::Affine, _) => phi_e(m, q)? - phi_e(m - 1, q)?,
        };
        let ok = report.rank as u64 == predicted;
        println!(
            "geometry_rank_prediction: {predicted}, {}",
            if ok { "ok" } else { "VIOLATED" }
        );
        if !ok {
            status.violations += 1;
        }
    }
    Ok(())
}

fn analyze_oddpoint(code: &AssembledCode, budget: usize, status: &mut CheckStatus) -> Result<()> {
    let Some(design) = &code.design else {
        println!("skipped: source has no design structure");
        return Ok(());
    };
    // Odd-order geometries carry a bound; anything else is informational.
    let (limit, bound) = match code.geometry {
        Some((GeometryKind::Affine, _, q)) if q % 2 == 1 => {
            ((2 * q as usize - 1).min(9), Some(2 * q as usize))
        }
        Some((GeometryKind::Projective, _, q)) if q % 2 == 1 => {
            ((2 * q as usize + 1).min(9), Some(2 * q as usize + 2))
        }
        _ => (budget.min(9), None),
    };
    match odd_point_bound_check(design, limit, bound.unwrap_or(0)) {
        Ok(report) => {
            println!("limit: {limit}");
            println!("{report}");
            if let Some(bound) = bound {
                println!(
                    "predicted: min >= {bound}, {}",
                    if report.holds { "ok" } else { "VIOLATED" }
                );
                if !report.holds {
                    status.violations += 1;
                }
            }
        }
        Err(AnalysisError::SearchBudget { verified }) => {
            println!("budget exceeded: verified only up to size {verified}");
            status.budget_exceeded += 1;
        }
        Err(other) => return Err(other.into()),
    }
    Ok(())
}

fn analyze_degeneracy(code: &AssembledCode, status: &mut CheckStatus) -> Result<()> {
    let Some(distance) = ea_design_distance(code) else {
        println!("skipped: no design distance available for this source");
        return Ok(());
    };
    match degeneracy_audit(&code.matrix, distance.value) {
        Ok(report) => {
            println!("{report}");
            // The extension of an even-replicate triple system is predicted
            // non-degenerate except at orders 21, 33, and 45.
            let applicable = code.assembly == Assembly::AddrExtend
                && code
                    .design
                    .as_ref()
                    .is_some_and(|d| d.steiner_block_size() == Some(3))
                && !matches!(code.design.as_ref().map(|d| d.v()), Some(21 | 33 | 45));
            if applicable {
                println!(
                    "predicted: non-degenerate, {}",
                    if report.non_degenerate { "ok" } else { "VIOLATED" }
                );
                if !report.non_degenerate {
                    status.violations += 1;
                }
            }
        }
        Err(AnalysisError::TooManyRows { rows, limit }) => {
            println!("not audited: {rows} rows exceed the exhaustive limit of {limit}");
            status.budget_exceeded += 1;
        }
        Err(other) => return Err(other.into()),
    }
    Ok(())
}

fn parse_split(expr: &str) -> Result<AuxProbability> {
    let expr = expr.trim();
    if expr == "p" {
        return Ok(AuxProbability::Same);
    }
    if let Some(divisor) = expr.strip_prefix("p/") {
        let d: f64 = divisor
            .trim()
            .parse()
            .context("bad divisor in split expression")?;
        if d <= 0.0 {
            bail!("split divisor must be positive");
        }
        return Ok(AuxProbability::Scaled(1.0 / d));
    }
    if let Some(factor) = expr.strip_prefix("p*") {
        return Ok(AuxProbability::Scaled(
            factor
                .trim()
                .parse()
                .context("bad factor in split expression")?,
        ));
    }
    if let Some(factor) = expr.strip_suffix("*p") {
        return Ok(AuxProbability::Scaled(
            factor
                .trim()
                .parse()
                .context("bad factor in split expression")?,
        ));
    }
    Ok(AuxProbability::Fixed(expr.parse().context(
        "split expression must be p, p/DIV, p*FACTOR, FACTOR*p, or a constant",
    )?))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    spec: &SpecArgs,
    grid: Vec<f64>,
    min_errors: u64,
    max_trials: u64,
    seed: u64,
    threads: Option<usize>,
    split: Option<String>,
    out: &PathBuf,
    plot: bool,
) -> Result<ExitCode> {
    if grid.contains(&0.0) {
        bail!("p = 0 is a degenerate grid point; start the grid above zero");
    }
    let threads = match threads {
        Some(t) => t,
        None => std::env::var("QLDPC_THREADS")
            .ok()
            .map(|raw| raw.parse::<usize>().context("bad QLDPC_THREADS value"))
            .transpose()?
            .unwrap_or(0),
    };
    let code = assemble_args(spec)?;
    let aux = match &split {
        Some(expr) => parse_split(expr)?,
        None => AuxProbability::Same,
    };
    let cfg = SimConfig {
        grid,
        min_block_errors: min_errors,
        max_trials,
        seed,
        threads,
    };
    let points = sweep(&code.matrix, &cfg, aux)?;
    let mut buffer = Vec::new();
    write_csv(&mut buffer, &code.id, &code.mode.to_string(), &points)?;
    fs::write(out, &buffer).with_context(|| format!("writing {}", out.display()))?;
    println!("csv: {}", out.display());
    if plot {
        let script_path = out.with_extension("gp");
        let csv_name = out
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| out.display().to_string());
        fs::write(&script_path, gnuplot_script(&csv_name, &code.id))
            .with_context(|| format!("writing {}", script_path.display()))?;
        println!("plot: {}", script_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify_table1() -> Result<ExitCode> {
    let mut failures = 0usize;
    let mut check = |label: &str, actual: String, expected: &str| {
        let ok = actual == expected;
        println!(
            "{}: {} (expected {expected}, got {actual})",
            label,
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            failures += 1;
        }
    };

    let rqa = assemble(&Source::Ag(4, 3), None, Mode::Rqa)?;
    let params = derive_params(&rqa)?;
    check("rqa length", params.length.to_string(), "1242");
    check("rqa dimension", params.dimension.to_string(), "1080");
    check("rqa reliable qubits", params.assist_count.to_string(), "162");
    check("rqa rate", format_rate(params.rate), "0.8696");
    check("rqa mean weights", mean_weights(&rqa.matrix), "2.86/41");
    check("rqa max weights", max_weights(&rqa.matrix), "3/41");
    check(
        "rqa distance",
        params
            .design_distance
            .map(|d| d.value.to_string())
            .unwrap_or_default(),
        "4",
    );

    let ea = assemble(&Source::Ag(4, 3), None, Mode::Ea)?;
    let params = derive_params(&ea)?;
    check("ea length", params.length.to_string(), "1161");
    check(
        "ea catalytic dimension",
        params.catalytic_dimension.unwrap_or_default().to_string(),
        "997",
    );
    check("ea ebits", params.assist_count.to_string(), "1");
    check("ea rate", format_rate(params.rate), "0.8587");
    check("ea mean weights", mean_weights(&ea.matrix), "2.93/41.48");
    check("ea max weights", max_weights(&ea.matrix), "3/81");
    check(
        "ea distance",
        params
            .design_distance
            .map(|d| d.value.to_string())
            .unwrap_or_default(),
        "6",
    );

    // The hypothetical comparison code uses the bare incidence matrix with
    // the unconstrained construction.
    let hypothetical = assemble(&Source::Ag(4, 3), Some(Assembly::Incidence), Mode::Ea)?;
    let params = derive_params(&hypothetical)?;
    check("h-ag length", params.length.to_string(), "1080");
    check(
        "h-ag dimension",
        params.catalytic_dimension.unwrap_or_default().to_string(),
        "918",
    );
    check(
        "h-ag ebits if assisted",
        params.assist_count.to_string(),
        "80",
    );
    check("h-ag rate", format_rate(params.rate), "0.85");
    check(
        "h-ag weights",
        mean_weights(&hypothetical.matrix),
        "3/40",
    );

    if failures == 0 {
        println!("table regression: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("table regression: FAIL ({failures} mismatches)");
        Ok(ExitCode::from(EXIT_VIOLATION))
    }
}
