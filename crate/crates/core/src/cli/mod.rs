//! The `bslab` command-line front end.
//!
//! Exit codes: 0 on success (and for `--help`), 1 for usage errors, 2 when a
//! computation fails.

mod args;
mod report;

use std::io::Write;

use serde_json::Value;

pub use args::{
    parse_args, parse_config_text, Command, ExperimentConfig, OutputFormat, RunConfig,
    VarianceConfig, SUBCOMMANDS,
};
pub use report::Report;

use crate::clt_lab::{
    analytic_lindeberg, lindeberg_statistic, max_cell_variance, run_convergence_experiment,
    variance_linearity_check, ArraySpec, IncrementModel,
};
use crate::lattice_mc::{crr_tree_price, mc_forward_check, mc_price};
use crate::pricing::{bs_call_price, OptionSpec, PriceResult};
use crate::rng::derive_seed;
use crate::Execution;
use report::num;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Help or version text was requested.
    #[error("{0}")]
    Help(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Help(_) => 0,
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
        }
    }
}

fn option_inputs(r: &mut Report, o: &OptionSpec) {
    r.input("spot", num(o.spot))
        .input("strike", num(o.strike))
        .input("rate", num(o.rate))
        .input("expiry", num(o.expiry))
        .input("volatility", num(o.volatility));
}

fn model_inputs(r: &mut Report, m: &IncrementModel, samples: usize, seed: u64) {
    r.input("model", m.kind().as_str())
        .input("variance", num(m.per_unit_variance()))
        .input("samples", samples as u64)
        .input("seed", seed);
    if let IncrementModel::PoissonJump { jump, intensity } = *m {
        r.input("jump", num(jump))
            .input("intensity", num(intensity));
    }
}

fn price_results(r: &mut Report, p: &PriceResult) {
    r.result("price", num(p.price));
    if let (Some(dp), Some(dm)) = (p.d_plus, p.d_minus) {
        r.result("d_plus", num(dp)).result("d_minus", num(dm));
    }
    r.diagnostic("method", p.method.as_str());
    for (k, v) in &p.detail {
        if !r.inputs.contains_key(k) {
            r.diagnostic(k, num(*v));
        }
    }
}

fn ladder_value(ladder: &[usize]) -> Value {
    Value::Array(ladder.iter().map(|&n| Value::from(n as u64)).collect())
}

fn experiment_inputs(r: &mut Report, e: &ExperimentConfig) {
    model_inputs(r, &e.model, e.samples, e.seed);
    r.input("horizon", num(e.horizon))
        .input("ladder", ladder_value(&e.ladder))
        .input("epsilon", num(e.epsilon));
}

fn build_report(command: &Command, exec: Execution) -> Result<Report, CliError> {
    let mut r = Report::new(command.name());
    match command {
        Command::Price(o) => {
            option_inputs(&mut r, o);
            price_results(&mut r, &bs_call_price(o)?);
        }
        Command::Mc(o, mc) => {
            let mc = mc.execution(exec);
            option_inputs(&mut r, o);
            r.input("paths", mc.paths as u64)
                .input("seed", mc.seed)
                .input("batch_size", mc.batch_size as u64);
            let p = mc_price(o, &mc)?;
            let se = p.std_error.unwrap_or(0.0);
            price_results(&mut r, &p);
            r.result("std_error", num(se));
            let exact = bs_call_price(o)?.price;
            r.diagnostic("closed_form_price", num(exact));
            r.diagnostic(
                "z_score",
                num(if se > 0.0 {
                    (p.price - exact) / se
                } else {
                    0.0
                }),
            );
            let fwd = mc_forward_check(o, &mc)?;
            r.result("forward_ratio", num(fwd.ratio))
                .result("forward_std_error", num(fwd.std_error));
            r.diagnostic("forward_z_score", num(fwd.z_score()));
        }
        Command::Tree(o, t) => {
            option_inputs(&mut r, o);
            r.input("steps", t.steps as u64);
            let p = crr_tree_price(o, *t)?;
            price_results(&mut r, &p);
            let exact = bs_call_price(o)?.price;
            r.diagnostic("closed_form_price", num(exact));
            r.diagnostic("error", num((p.price - exact).abs()));
        }
        Command::CltDemo(e) => {
            experiment_inputs(&mut r, e);
            let spec =
                ArraySpec::new(e.model, e.horizon, e.ladder[0], e.samples, e.seed)?.execution(exec);
            let rep = run_convergence_experiment(&spec, &e.ladder, e.epsilon)?;
            let total = e.model.per_unit_variance() * e.horizon;
            r.result("verdict", rep.verdict.as_str())
                .result("ks_threshold", num(rep.ks_threshold));
            r.diagnostic("limit_variance", num(total))
                .diagnostic("lindeberg_vanishing", rep.lindeberg_vanishing(total));
            r.columns = [
                "n",
                "ks_statistic",
                "lindeberg",
                "lindeberg_std_error",
                "lindeberg_analytic",
                "max_cell_variance",
            ]
            .map(String::from)
            .to_vec();
            for (i, &n) in rep.n_ladder.iter().enumerate() {
                r.rows.push(vec![
                    Value::from(n as u64),
                    num(rep.ks_statistics[i]),
                    num(rep.lindeberg_values[i]),
                    num(rep.lindeberg_std_errors[i]),
                    num(rep.lindeberg_analytic[i]),
                    num(rep.max_cell_variance[i]),
                ]);
            }
        }
        Command::Lindeberg(e) => {
            experiment_inputs(&mut r, e);
            r.columns = [
                "n",
                "lindeberg",
                "lindeberg_std_error",
                "lindeberg_analytic",
                "max_cell_variance",
            ]
            .map(String::from)
            .to_vec();
            let mut values = Vec::with_capacity(e.ladder.len());
            for &n in &e.ladder {
                let spec = ArraySpec::new(
                    e.model,
                    e.horizon,
                    n,
                    e.samples,
                    derive_seed(e.seed, n as u64),
                )?
                .execution(exec);
                let est = lindeberg_statistic(&spec, e.epsilon)?;
                values.push(est.estimate);
                r.rows.push(vec![
                    Value::from(n as u64),
                    num(est.estimate),
                    num(est.std_error),
                    num(est.analytic),
                    num(max_cell_variance(&e.model, n, e.horizon)?),
                ]);
            }
            r.result("lindeberg_first", num(values[0])).result(
                "lindeberg_last",
                num(*values.last().expect("non-empty ladder")),
            );
            let last_n = *e.ladder.last().expect("non-empty ladder");
            r.diagnostic(
                "analytic_last",
                num(analytic_lindeberg(&e.model, last_n, e.horizon, e.epsilon)?),
            );
        }
        Command::VarLinearity(v) => {
            model_inputs(&mut r, &v.model, v.samples, v.seed);
            r.input(
                "horizons",
                Value::Array(v.horizons.iter().map(|&h| num(h)).collect()),
            )
            .input("rows", v.rows as u64);
            let fit =
                variance_linearity_check(&v.model, &v.horizons, v.rows, v.samples, v.seed, exec)?;
            r.result("slope", num(fit.slope))
                .result("slope_std_error", num(fit.slope_std_error))
                .result("intercept", num(fit.intercept))
                .result("intercept_std_error", num(fit.intercept_std_error))
                .result("max_residual", num(fit.max_residual));
            r.diagnostic("expected_slope", num(v.model.per_unit_variance()));
            r.columns = ["horizon", "variance", "std_error", "fitted", "residual"]
                .map(String::from)
                .to_vec();
            for p in &fit.points {
                let fitted = fit.intercept + fit.slope * p.horizon;
                r.rows.push(vec![
                    num(p.horizon),
                    num(p.variance),
                    num(p.std_error),
                    num(fitted),
                    num(p.variance - fitted),
                ]);
            }
        }
    }
    Ok(r)
}

/// Runs the command and returns its report, honouring `threads`.
pub fn report(config: &RunConfig) -> Result<Report, CliError> {
    match config.threads {
        Some(1) => build_report(&config.command, Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| CliError::Usage(format!("invalid threads: {e}")))?;
            pool.install(|| build_report(&config.command, Execution::Parallel))
        }
        _ => build_report(&config.command, Execution::default()),
    }
}

/// Runs the command and writes the rendered report to `config.output_path`
/// or, if unset, to `out`.
pub fn execute(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let text = report(config)?.render(config.format);
    match &config.output_path {
        Some(path) => std::fs::write(path, text)?,
        None => {
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses, executes and reports; returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let outcome = parse_args(argv).and_then(|cfg| execute(&cfg, out));
    match outcome {
        Ok(()) => 0,
        Err(CliError::Help(text)) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(CliError::Usage(msg)) => {
            let _ = write!(
                err,
                "{}",
                if msg.ends_with('\n') { msg } else { msg + "\n" }
            );
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
