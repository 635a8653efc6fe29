//! Single-run experiment: build or load an instance, solve, emit files.

use std::fs;
use std::path::PathBuf;

use proxgrad::problems::{
    gen_lasso_with_lambda, gen_logistic_with_lambda, gen_qp, instance_from_text, instance_to_text,
    ProblemInstance, SimplexQpInstance, GENERATOR_VERSION,
};
use proxgrad::solver::{run, SolveResult, TerminationReason};

use crate::config::{CliError, ExperimentConfig, Family};
use crate::writers::{fmt_f64, manifest_text, rate_summary, trace_csv};

/// What a finished run left behind.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub result: SolveResult,
    pub instance: ProblemInstance,
    /// Whether the run stopped on the iteration cap even though a
    /// convergence test was configured.
    pub hit_cap: bool,
    pub trace_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rate_path: PathBuf,
}

/// Materializes the configured instance: loads a saved file when given,
/// otherwise generates from the seed.
pub fn build_instance(config: &ExperimentConfig) -> Result<ProblemInstance, CliError> {
    if let Some(path) = &config.load_instance {
        let text = fs::read_to_string(path)?;
        return Ok(instance_from_text(&text)?);
    }
    let instance = match config.family {
        Family::Lasso => ProblemInstance::Lasso(gen_lasso_with_lambda(
            config.m,
            config.n,
            config.sparsity,
            config.lambda,
            config.seed,
        )?),
        Family::Logistic => ProblemInstance::Logistic(gen_logistic_with_lambda(
            config.m,
            config.n,
            config.sparsity,
            config.lambda,
            config.seed,
        )?),
        Family::Qp => {
            let inst = gen_qp(config.n, config.seed)?;
            match config.simplex_sum {
                Some(s) => ProblemInstance::SimplexQp(SimplexQpInstance::new(
                    inst.matrix().clone(),
                    inst.linear_term().to_vec(),
                    s,
                    config.seed,
                )?),
                None => ProblemInstance::SimplexQp(inst),
            }
        }
    };
    Ok(instance)
}

/// Runs one configured experiment and writes `trace.csv`, `manifest.txt`
/// and `rate.txt` (plus `instance.txt` on request) into the output
/// directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, CliError> {
    config.validate()?;
    let instance = build_instance(config)?;
    let objective = instance.objective()?;
    let moduli = objective.moduli();
    let threshold = moduli.beta_threshold();

    let schedule = config.schedule.build(threshold, config.restart_interval)?;
    let rule = config.termination_rule();
    let beta_sup = schedule.nominal_beta_sup();

    let gap_hook = |x: &[f64]| {
        instance
            .gap_value(x)
            .expect("gap hook only installed for families with a dual")
    };
    let hook: Option<&proxgrad::solver::GapFn> = if instance.has_dual() {
        Some(&gap_hook)
    } else {
        None
    };

    let result = run(
        &objective,
        &instance.default_start(),
        schedule,
        &rule,
        config.alpha,
        hook,
    )
    .map_err(|e| match e {
        proxgrad::Error::SolveFailed {
            iteration,
            message,
            trace,
        } => {
            // Preserve whatever trace exists before bailing out.
            let _ = fs::create_dir_all(&config.out_dir);
            let _ = fs::write(config.out_dir.join("trace.csv"), trace_csv(&trace));
            CliError::Numerical(format!("solve failed at iteration {iteration}: {message}"))
        }
        other => CliError::from(other),
    })?;

    fs::create_dir_all(&config.out_dir)?;
    let trace_path = config.out_dir.join("trace.csv");
    fs::write(&trace_path, trace_csv(&result.trace))?;

    let hit_cap = result.termination_reason == TerminationReason::MaxIterReached
        && rule.has_convergence_leaf();

    let mut pairs: Vec<(&str, String)> = vec![
        ("family", instance.family().into()),
        ("generator", GENERATOR_VERSION.into()),
        ("seed", config.seed.to_string()),
    ];
    match &instance {
        ProblemInstance::Lasso(p) => {
            pairs.push(("m", p.design().rows().to_string()));
            pairs.push(("n", p.design().cols().to_string()));
            pairs.push(("lambda", fmt_f64(p.lambda())));
        }
        ProblemInstance::Logistic(p) => {
            pairs.push(("m", p.design().rows().to_string()));
            pairs.push(("n", p.design().cols().to_string()));
            pairs.push(("lambda", fmt_f64(p.lambda())));
        }
        ProblemInstance::SimplexQp(p) => {
            pairs.push(("n", p.matrix().rows().to_string()));
            pairs.push(("s", fmt_f64(p.simplex_sum())));
        }
    }
    // Sparsity describes the generator, not a loaded instance.
    if config.load_instance.is_none() && config.family != Family::Qp {
        pairs.push(("sparsity", config.sparsity.to_string()));
    }
    pairs.extend([
        ("schedule", config.schedule.label()),
        ("restart_interval", config.restart_interval.to_string()),
        ("tol", fmt_f64(config.tol)),
        ("max_iter", config.max_iter.to_string()),
        ("alpha", fmt_f64(result.alpha)),
        ("modulus_lipschitz", fmt_f64(moduli.lipschitz)),
        ("modulus_concavity", fmt_f64(moduli.concavity)),
        ("beta_threshold", fmt_f64(threshold)),
        ("beta_nominal_sup", fmt_f64(beta_sup)),
        // Linear-convergence theory wants a strictly sub-threshold beta
        // supremum, and the FISTA recurrence a convex smooth part.
        (
            "within_guarantee",
            (beta_sup < threshold
                && !(config.schedule.is_fista_variant() && moduli.concavity > 0.0))
                .to_string(),
        ),
        (
            "fista_heuristic_on_nonconvex",
            (config.schedule.is_fista_variant() && moduli.concavity > 0.0).to_string(),
        ),
        ("iterations", result.iterations.to_string()),
        (
            "termination",
            result.termination_reason.as_str().to_string(),
        ),
        (
            "final_objective",
            fmt_f64(result.trace.last().expect("nonempty trace").f_value),
        ),
        ("hit_cap", hit_cap.to_string()),
    ]);
    let manifest_path = config.out_dir.join("manifest.txt");
    fs::write(&manifest_path, manifest_text(&pairs))?;

    // Single-run experiment: f_min is this run's own final objective.
    let f_min = result.trace.last().expect("nonempty trace").f_value;
    let rate_path = config.out_dir.join("rate.txt");
    fs::write(&rate_path, rate_summary(&result, f_min, 0.5))?;

    if config.save_instance {
        fs::write(
            config.out_dir.join("instance.txt"),
            instance_to_text(&instance),
        )?;
    }

    Ok(ExperimentOutcome {
        result,
        instance,
        hit_cap,
        trace_path,
        manifest_path,
        rate_path,
    })
}
