//! `possalloc` — moments, allocations, sweeps and verification for the
//! possibilistic portfolio choice model.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use possalloc::allocation::PortfolioModel;
use possalloc::config::{parse_model_document, ModelDoc};
use possalloc::oracle::{solve_foc, total_utility, FocSolverConfig, OracleResult};
use possalloc::verify;

#[derive(Parser)]
#[command(
    name = "possalloc",
    version,
    about = "Possibilistic portfolio choice toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the model document (JSON).
    config: PathBuf,
    /// Override both quadrature node counts.
    #[arg(long)]
    nodes: Option<usize>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Print quadrature moments (and closed forms where available).
    Moments {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the approximate and exact optimal allocations.
    Allocate {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the risk scale from the document.
        #[arg(long)]
        k: Option<f64>,
        /// Highest approximation order to report (2 or 3).
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(2..=3))]
        order: u32,
        /// Also print factor terms and the coefficient chain.
        #[arg(long)]
        verbose: bool,
    },
    /// Emit a CSV sweep over the risk scale.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        k_min: f64,
        #[arg(long)]
        k_max: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Run the verification battery; exits non-zero on any failure.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
}

/// 17 significant digits: round-trip safe for f64.
fn fmt_full(v: f64) -> String {
    format!("{v:.16e}")
}

fn load_document(common: &CommonArgs) -> Result<ModelDoc, String> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| format!("cannot read {}: {e}", common.config.display()))?;
    parse_model_document(&text).map_err(|e| e.to_string())
}

fn build_model(
    doc: &ModelDoc,
    common: &CommonArgs,
    k: Option<f64>,
) -> Result<PortfolioModel, String> {
    doc.build(k, common.nodes).map_err(|e| e.to_string())
}

fn run_moments(common: &CommonArgs) -> Result<(), String> {
    let doc = load_document(common)?;
    let model = build_model(&doc, common, None)?;
    let quadrature = model
        .operator()
        .central_moments(model.risk())
        .map_err(|e| e.to_string())?;
    let closed = model.risk().as_triangular().and_then(|(a, alpha, beta)| {
        model
            .operator()
            .triangular_closed_moments(a, alpha, beta)
            .ok()
    });

    match common.format {
        OutputFormat::Json => {
            // flat key-value document; closed forms ride along when present
            let mut doc = serde_json::to_value(quadrature).unwrap();
            if let Some(cf) = closed {
                doc["closed_form"] = serde_json::to_value(cf).unwrap();
                doc["max_abs_discrepancy"] =
                    serde_json::to_value(quadrature.max_abs_diff(&cf)).unwrap();
            }
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        OutputFormat::Csv => {
            let mut line = String::from("quantity,quadrature,closed_form\n");
            let rows = [
                (
                    "expected_value",
                    quadrature.expected_value,
                    closed.map(|c| c.expected_value),
                ),
                ("variance", quadrature.variance, closed.map(|c| c.variance)),
                ("skewness", quadrature.skewness, closed.map(|c| c.skewness)),
                ("kurtosis", quadrature.kurtosis, closed.map(|c| c.kurtosis)),
                ("m2", quadrature.m2, closed.map(|c| c.m2)),
                ("m3", quadrature.m3, closed.map(|c| c.m3)),
                ("m4", quadrature.m4, closed.map(|c| c.m4)),
            ];
            for (name, q, c) in rows {
                let closed_cell = c.map(fmt_full).unwrap_or_default();
                let _ = writeln!(line, "{name},{},{closed_cell}", fmt_full(q));
            }
            print!("{line}");
        }
        OutputFormat::Table => {
            println!(
                "{:<16} {:>24} {:>24}",
                "quantity", "quadrature", "closed form"
            );
            let rows = [
                (
                    "expected_value",
                    quadrature.expected_value,
                    closed.map(|c| c.expected_value),
                ),
                ("variance", quadrature.variance, closed.map(|c| c.variance)),
                ("skewness", quadrature.skewness, closed.map(|c| c.skewness)),
                ("kurtosis", quadrature.kurtosis, closed.map(|c| c.kurtosis)),
            ];
            for (name, q, c) in rows {
                match c {
                    Some(value) => println!("{name:<16} {q:>24.16} {value:>24.16}"),
                    None => println!("{name:<16} {q:>24.16} {:>24}", "n/a"),
                }
            }
            if let Some(cf) = closed {
                println!(
                    "max |quadrature - closed| = {:.3e}",
                    quadrature.max_abs_diff(&cf)
                );
            }
        }
    }
    Ok(())
}

fn warn_outside_bounds(model: &PortfolioModel, alpha: f64, label: &str) {
    if alpha < 0.0 || alpha > model.initial_wealth() {
        eprintln!(
            "warning: {label} allocation {alpha:.6} lies outside [0, w0 = {}]",
            model.initial_wealth()
        );
    }
}

fn run_allocate(
    common: &CommonArgs,
    k: Option<f64>,
    order: u32,
    verbose: bool,
) -> Result<(), String> {
    let doc = load_document(common)?;
    let model = build_model(&doc, common, k)?;
    if model.k() <= 0.0 {
        return Err("allocate needs a positive risk scale k (use --k or the document)".into());
    }
    let result = model.evaluate().map_err(|e| e.to_string())?;
    let oracle: Result<OracleResult, String> =
        solve_foc(&model, &FocSolverConfig::default()).map_err(|e| e.to_string());

    let order2 = result.alpha_order2;
    let order3 = result.alpha_order3;
    warn_outside_bounds(&model, order2, "order-2");

    match common.format {
        OutputFormat::Json => {
            let mut doc = serde_json::json!({
                "k": model.k(),
                "order2": order2,
                "result": result,
            });
            if order == 3 {
                doc["order3"] = serde_json::to_value(order3).unwrap();
            }
            match &oracle {
                Ok(o) => doc["oracle"] = serde_json::to_value(o).unwrap(),
                Err(e) => doc["oracle_error"] = serde_json::Value::String(e.clone()),
            }
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        OutputFormat::Csv => {
            println!("method,alpha,err_vs_oracle");
            let oracle_alpha = oracle.as_ref().ok().map(|o| o.alpha_star);
            let err_cell = |alpha: f64| match oracle_alpha {
                Some(star) => fmt_full((alpha - star).abs()),
                None => String::new(),
            };
            println!("order2,{},{}", fmt_full(order2), err_cell(order2));
            if order == 3 {
                println!("order3,{},{}", fmt_full(order3), err_cell(order3));
            }
            if let Ok(o) = &oracle {
                println!(
                    "oracle,{},{}",
                    fmt_full(o.alpha_star),
                    fmt_full(o.foc_residual.abs())
                );
            }
        }
        OutputFormat::Table => {
            println!("{:<8} {:>24} {:>16}", "method", "alpha", "err vs oracle");
            let oracle_alpha = oracle.as_ref().ok().map(|o| o.alpha_star);
            let err_cell = |alpha: f64| match oracle_alpha {
                Some(star) => format!("{:>16.3e}", (alpha - star).abs()),
                None => format!("{:>16}", "n/a"),
            };
            // probe the total utility at each approximate allocation so
            // domain overshoots surface as structured per-row errors
            let print_row = |label: &str, alpha: f64| {
                println!("{label:<8} {alpha:>24.16} {}", err_cell(alpha));
                if let Err(e) = total_utility(&model, alpha) {
                    println!("         {label} allocation infeasible: {e}");
                }
            };
            print_row("order2", order2);
            if order == 3 {
                print_row("order3", order3);
            }
            match &oracle {
                Ok(o) => {
                    println!(
                        "{:<8} {:>24.16} {:>16.3e}",
                        "oracle",
                        o.alpha_star,
                        o.foc_residual.abs()
                    );
                    warn_outside_bounds(&model, o.alpha_star, "oracle");
                }
                Err(e) => println!("oracle   failed: {e}"),
            }
            if verbose {
                println!();
                println!(
                    "coefficient chain: a1 = {:.12e}, a2 = {:.12e}, a3 = {:.12e}",
                    result.alpha_deriv1, result.alpha_deriv2, result.alpha_deriv3
                );
                let f = &result.factors;
                println!(
                    "factor terms: F1 = {:.9e}, F2 = {:.9e}, F3 = {:.9e}, F4 = {:.9e}, F5 = {:.9e}, F6 = {:.9e}",
                    f.f1, f.f2, f.f3, f.f4, f.f5, f.f6
                );
                let ms = &result.moments;
                println!(
                    "moments: E = {:.9e}, Var = {:.9e}, Sk = {:.9e}, K = {:.9e}",
                    ms.expected_value, ms.variance, ms.skewness, ms.kurtosis
                );
                if let Some(ind) = &result.indicators {
                    println!(
                        "indicators at w = {}: r = {:.9e}, P = {:.9e}, T = {:.9e}",
                        result.wealth, ind.risk_aversion, ind.prudence, ind.temperance
                    );
                }
            }
        }
    }
    Ok(())
}

fn run_sweep(common: &CommonArgs, k_min: f64, k_max: f64, steps: usize) -> Result<(), String> {
    if k_min.is_nan() || k_min < 0.0 {
        return Err(format!("k-min must be non-negative, got {k_min}"));
    }
    if steps < 2 {
        return Err(format!("sweep needs at least 2 steps, got {steps}"));
    }
    if k_max.is_nan() || k_max < k_min {
        return Err(format!("k-max {k_max} must not be below k-min {k_min}"));
    }
    let doc = load_document(common)?;
    let base = build_model(&doc, common, None)?;

    let mut out = String::from("k,alpha_order2,alpha_order3,alpha_oracle,err2,err3\n");
    for i in 0..steps {
        let k = k_min + (k_max - k_min) * i as f64 / (steps - 1) as f64;
        let model = base.with_k(k).map_err(|e| e.to_string())?;
        let order2 = model.allocation_order2().map_err(|e| e.to_string())?;
        let order3 = model.allocation_order3().map_err(|e| e.to_string())?;
        // per-k oracle failures leave the oracle columns empty
        let oracle = if k == 0.0 {
            Some(0.0)
        } else {
            solve_foc(&model, &FocSolverConfig::default())
                .ok()
                .map(|o| o.alpha_star)
        };
        let (oracle_cell, err2_cell, err3_cell) = match oracle {
            Some(star) => (
                fmt_full(star),
                fmt_full((order2 - star).abs()),
                fmt_full((order3 - star).abs()),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{oracle_cell},{err2_cell},{err3_cell}",
            fmt_full(k),
            fmt_full(order2),
            fmt_full(order3)
        );
    }
    print!("{out}");
    Ok(())
}

fn run_verify(common: &CommonArgs) -> Result<bool, String> {
    let doc = load_document(common)?;
    // weighting checks run even when the model cannot be built
    let checks = match build_model(&doc, common, None) {
        Ok(model) => verify::run_model_checks(&model),
        Err(build_error) => {
            let mut checks = match doc.weighting_function() {
                Ok(w) => verify::run_weighting_only(&w),
                Err(_) => Vec::new(),
            };
            checks.push(possalloc::verify::CheckResult {
                name: "model-construction".into(),
                measured: f64::NAN,
                threshold: 0.0,
                passed: false,
                detail: build_error,
            });
            checks
        }
    };
    let mut all_ok = true;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        all_ok &= check.passed;
        if check.measured.is_finite() {
            println!(
                "[{status}] {:<34} measured {: >12.3e}  threshold {: >9.1e}  {}",
                check.name, check.measured, check.threshold, check.detail
            );
        } else {
            println!("[{status}] {:<34} {}", check.name, check.detail);
        }
    }
    println!(
        "{} of {} checks passed",
        checks.iter().filter(|c| c.passed).count(),
        checks.len()
    );
    Ok(all_ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Moments { common } => run_moments(common).map(|()| true),
        Command::Allocate {
            common,
            k,
            order,
            verbose,
        } => run_allocate(common, *k, *order, *verbose).map(|()| true),
        Command::Sweep {
            common,
            k_min,
            k_max,
            steps,
        } => run_sweep(common, *k_min, *k_max, *steps).map(|()| true),
        Command::Verify { common } => run_verify(common),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
