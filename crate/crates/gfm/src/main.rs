//! `gfm` — g-frame multiplier scenarios: reports, generation, certified
//! inversion, and parameter sweeps.
//!
//! Exit codes: 0 when every asserted inequality holds, 1 on usage or format
//! errors (including unsatisfied certificates asked to run), 2 when a proved
//! bound fails numerically, which signals a bug in the library itself.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use gfm::generate::{generate_scenario, GenerateParams, SymbolSpec};
use gfm::report::{report_json, run_report, ReportOptions};
use gfm::scenario::{load_scenario, save_scenario, SweepParam, SweepSpec};
use gfm::sweep::{render_csv, run_sweep};
use gfm::{HarnessError, Result};
use gfm_core::invertibility::{
    cert_combined, cert_cooor, cert_dualframes, cert_thm_main, run_certified_inversion, CertKind,
};
use gfm_core::multiplier::assemble_multiplier;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gfm", version, about = "g-frame multiplier toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a scenario and print the report.
    Report {
        #[arg(long)]
        scenario: PathBuf,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Term cap for certified Neumann runs.
        #[arg(long, default_value_t = 30)]
        nmax: usize,
        /// A-priori error target for certified Neumann runs.
        #[arg(long, default_value_t = 1e-10)]
        target_err: f64,
        /// Fault injection: scale predicted bounds by this factor to verify
        /// that the violation detector trips (self-test; use e.g. 1e-3).
        #[arg(long)]
        inject_bound_error: Option<f64>,
    },
    /// Generate a random scenario with controlled targets.
    Generate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        points: usize,
        /// Target frame-bound ratio A/B in (0, 1].
        #[arg(long)]
        ratio: f64,
        /// Target perturbation level for Θ.
        #[arg(long)]
        nu: f64,
        /// Symbol spec: constant:<c> | near-one:<r> | positive:<lo>,<hi> | complex:<r>.
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        out: PathBuf,
        /// Rows per block (uniform); defaults to 1.
        #[arg(long)]
        block_dim: Option<usize>,
        /// Attach the canonical dual of Λ to the scenario.
        #[arg(long)]
        with_dual: bool,
    },
    /// Run one certificate's certified Neumann inversion on a scenario.
    Invert {
        #[arg(long)]
        scenario: PathBuf,
        /// Certificate id: thm_main | cooor | combined | dualframes.
        #[arg(long)]
        cert: String,
        /// Run exactly this many series terms.
        #[arg(long, conflicts_with = "target_err")]
        terms: Option<usize>,
        /// Run until the a-priori error bound drops below this.
        #[arg(long)]
        target_err: Option<f64>,
    },
    /// Sweep one parameter and write a CSV table.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Parameter id: lambda_shift | nu_scale | symbol_scale.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_theorem_violation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Report {
            scenario,
            json,
            nmax,
            target_err,
            inject_bound_error,
        } => {
            if let Some(f) = inject_bound_error {
                if !(f.is_finite() && f > 0.0) {
                    return Err(HarnessError::Validation(format!(
                        "--inject-bound-error must be a positive finite factor, got {f}"
                    )));
                }
            }
            let scenario = load_scenario(&scenario)?;
            let opts = ReportOptions {
                n_max: nmax,
                target_err,
                inject_bound_error,
            };
            let report = run_report(&scenario, &opts)?;
            if json {
                println!("{}", report_json(&report)?);
            } else {
                print!("{}", report.render_text());
            }
            Ok(if report.has_violations() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Generate {
            seed,
            dim,
            points,
            ratio,
            nu,
            symbol,
            out,
            block_dim,
            with_dual,
        } => {
            let params = GenerateParams {
                seed,
                dim,
                points,
                block_dims: block_dim.map(|k| vec![k; points]),
                ratio,
                nu,
                symbol: symbol.parse::<SymbolSpec>()?,
                with_dual,
            };
            let scenario = generate_scenario(&params)?;
            save_scenario(&out, &scenario)?;
            let bounds = scenario.lambda.frame_bounds(scenario.tolerances.frame_tol);
            let achieved_nu = gfm_core::gframe::estimate_nu(
                &scenario.lambda,
                scenario.theta_or_lambda(),
            )?;
            println!(
                "wrote {} (A={:.6e}, B={:.6e}, A/B={:.6}, nu={:.6e})",
                out.display(),
                bounds.lower,
                bounds.upper,
                bounds.lower / bounds.upper,
                achieved_nu
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Invert {
            scenario,
            cert,
            terms,
            target_err,
        } => {
            let scenario = load_scenario(&scenario)?;
            let kind: CertKind = cert.parse()?;
            let tol = scenario.tolerances;
            let lambda = &scenario.lambda;
            let theta = scenario.theta_or_lambda();
            let m = &scenario.symbol;
            let (certificate, target) = match kind {
                CertKind::PositiveSymbol => {
                    let c = cert_thm_main(lambda, theta, m, scenario.nu_override, &tol)?;
                    (c, assemble_multiplier(m, lambda, theta)?)
                }
                CertKind::NearOne => {
                    let c = cert_cooor(lambda, m, &tol)?;
                    (c, assemble_multiplier(m, lambda, lambda)?)
                }
                CertKind::Combined => {
                    let c = cert_combined(lambda, theta, m, scenario.nu_override, &tol)?;
                    (c, assemble_multiplier(m, lambda, theta)?)
                }
                CertKind::DualPair => {
                    let dual = scenario.dual.as_ref().ok_or_else(|| {
                        HarnessError::Validation(
                            "scenario has no dual family; dualframes needs one".into(),
                        )
                    })?;
                    let c = cert_dualframes(lambda, dual, m, &tol)?;
                    (c, assemble_multiplier(m, lambda, dual)?)
                }
            };
            if !certificate.satisfied {
                println!(
                    "certificate {kind} not satisfied: lhs={:.6e} rhs={:.6e} margin={:.6e}{}",
                    certificate.condition_lhs,
                    certificate.condition_rhs,
                    certificate.margin,
                    if certificate.borderline {
                        " (borderline)"
                    } else {
                        ""
                    }
                );
                return Ok(ExitCode::from(1));
            }
            let (n_max, err) = match (terms, target_err) {
                (Some(n), _) => (n, 0.0),
                (None, Some(te)) => (10_000, te),
                (None, None) => (10_000, 1e-10),
            };
            let run = run_certified_inversion(&certificate, &target, n_max, err)?;
            let p = certificate.prediction.expect("satisfied");
            println!("certificate {kind}: satisfied, margin={:.6e}", certificate.margin);
            println!(
                "predicted: inv_lower={:.6e} inv_upper={:.6e} ratio={:.6e} prefactor={:.6e}",
                p.inv_lower, p.inv_upper, p.ratio, p.prefactor
            );
            println!(
                "series: terms={} q={:.6e} a_priori={:.6e} residual={:.6e} oracle_gap={}",
                run.result.terms_used,
                run.result.contraction,
                run.result.a_priori_bound,
                run.result.a_posteriori_residual,
                run.result
                    .oracle_gap
                    .map(|g| format!("{g:.6e}"))
                    .unwrap_or_else(|| "unavailable".to_string()),
            );
            println!(
                "validated: 1/‖M‖={:.6e} ≥ {:.6e}, ‖M⁻¹‖={:.6e} ≤ {:.6e}, all truncation bounds hold",
                run.lower_check.lhs, run.lower_check.rhs, run.upper_check.lhs, run.upper_check.rhs
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            scenario,
            param,
            from,
            to,
            steps,
            out,
        } => {
            let scenario = load_scenario(&scenario)?;
            let param: SweepParam = param.parse()?;
            let spec = SweepSpec::new(param, from, to, steps)?;
            let rows = run_sweep(&scenario, &spec)?;
            std::fs::write(&out, render_csv(&rows))?;
            println!("wrote {} ({} rows)", out.display(), rows.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}
