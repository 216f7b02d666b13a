use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relent_core::entropy::{evaluate_all, EntropyOptions, EntropyValue};
use relent_core::hermitian::{random_state_with, ProjectionChain};
use relent_core::lab::{
    counterexample_search, monotonicity_trials, projection_sweep_with, ConvergenceTrace, SearchOptions, TableRow,
};
use relent_core::loewner::{check_rep_consistency, integrability_diagnostics, EndpointIntegral, IntegrabilityReport, RepConsistencyReport};
use serde::Serialize;

use crate::args::{ChainKind, Cli, ComputeArgs, ConvergeArgs, RepcheckArgs, TolArgs, TrialsArgs};
use crate::io::{check_dim, emit, load_phi, load_projectors, load_state};
use crate::{Failure, Status};

fn options(t: &TolArgs) -> EntropyOptions {
    EntropyOptions { agreement_tol: t.tol_agree, tol_lambda: t.tol_lambda, tol_t: t.tol_t, ..EntropyOptions::default() }
}

fn csv_lines(header: &str, rows: impl IntoIterator<Item = (String, String, String)>) -> String {
    let mut s = format!("{header}\n");
    for (a, b, c) in rows {
        s.push_str(&format!("{a},{b},{c}\n"));
    }
    s
}

fn cell(v: &EntropyValue) -> (String, String) {
    (v.to_cell(), v.reason().map(|r| r.to_string()).unwrap_or_default())
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

#[derive(Serialize)]
struct ComputeReport {
    phi: String,
    options: EntropyOptions,
    #[serde(flatten)]
    formulas: relent_core::entropy::FormulaReport,
}

pub fn compute(cli: &Cli, args: &ComputeArgs) -> Result<Status, Failure> {
    let spec = load_phi(&args.phi)?;
    let a = load_state(cli, "--a", &args.a)?;
    let b = load_state(cli, "--b", &args.b)?;
    if a.dim() != b.dim() {
        return Err(Failure::input(format!("--b: dimension {} differs from --a dimension {}", b.dim(), a.dim())));
    }
    let opts = options(&args.tol);
    let formulas = evaluate_all(&spec, &a, &b, &opts)?;
    let agree = formulas.agree;
    let report = ComputeReport { phi: spec.name.clone(), options: opts, formulas };
    emit(cli, &report, || {
        let f = &report.formulas;
        let mut rows = Vec::new();
        for (name, v) in [("direct", &f.direct), ("gateaux", &f.gateaux), ("integral", &f.integral)] {
            let (value, reason) = cell(v);
            rows.push((name.to_string(), value, reason));
        }
        rows.push(("theorem4_difference".into(), num(f.theorem4.map(|t| t.difference)), String::new()));
        rows.push(("klein_ratio".into(), num(f.klein_ratio.value()), String::new()));
        Ok(csv_lines("quantity,value,reason", rows))
    })?;
    Ok(if agree { Status::Pass } else { Status::Disagreement })
}

#[derive(Serialize)]
struct ConvergeReport {
    phi: String,
    dim: usize,
    chain: String,
    #[serde(flatten)]
    trace: ConvergenceTrace,
    passed: bool,
}

pub fn converge(cli: &Cli, args: &ConvergeArgs) -> Result<Status, Failure> {
    let spec = load_phi(&args.phi)?;
    let (a, b) = match (&args.a, &args.b, args.ambient) {
        (Some(pa), Some(pb), _) => (load_state(cli, "--a", pa)?, load_state(cli, "--b", pb)?),
        (_, _, Some(n)) => {
            check_dim(cli, "--ambient", n)?;
            let seed = args.seed.ok_or_else(|| Failure::input("--seed: required with --ambient"))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (random_state_with(n, 0.1, 0.9, &mut rng)?, random_state_with(n, 0.1, 0.9, &mut rng)?)
        }
        _ => return Err(Failure::input("either --a and --b or --ambient is required")),
    };
    if a.dim() != b.dim() {
        return Err(Failure::input(format!("--b: dimension {} differs from --a dimension {}", b.dim(), a.dim())));
    }
    let n = a.dim();
    let (chain, label) = match &args.chain_file {
        Some(path) => {
            let chain = ProjectionChain::new(load_projectors(cli, path)?).map_err(|e| Failure::input(format!("--chain-file: {e}")))?;
            (chain, "file".to_string())
        }
        None => {
            let ranks = args.ranks.clone().unwrap_or_else(|| (1..=n).collect());
            let chain = match args.chain {
                ChainKind::Prefix => ProjectionChain::prefix(n, &ranks),
                ChainKind::Random => {
                    let seed = args.seed.ok_or_else(|| Failure::input("--seed: required with --chain random"))?;
                    ProjectionChain::random_nested(n, &ranks, seed)
                }
            }
            .map_err(|e| Failure::input(format!("--ranks: {e}")))?;
            (chain, format!("{:?}", args.chain).to_lowercase())
        }
    };
    if chain.ambient_dim() != n {
        return Err(Failure::input(format!("--chain-file: ambient dimension {} differs from {n}", chain.ambient_dim())));
    }
    let trace = projection_sweep_with(&spec, &a, &b, &chain, &options(&args.tol))?;
    let passed = trace.passed();
    let report = ConvergeReport { phi: spec.name.clone(), dim: n, chain: label, trace, passed };
    emit(cli, &report, || TableRow::to_csv(&report.trace.rows(), "rank").map_err(Failure::from))?;
    Ok(if passed { Status::Pass } else { Status::Disagreement })
}

pub fn trials(cli: &Cli, args: &TrialsArgs) -> Result<Status, Failure> {
    let spec = load_phi(&args.phi)?;
    if args.trials == 0 {
        return Err(Failure::input("--trials: must be positive, nothing would be tested"));
    }
    if args.counterexample {
        let r = counterexample_search(&spec, args.trials, args.seed, &SearchOptions::default())?;
        emit(cli, &r, || TableRow::to_csv(&r.report.rows(), "trial").map_err(Failure::from))?;
        return Ok(if r.inconclusive { Status::Inconclusive } else { Status::Pass });
    }
    check_dim(cli, "--dim-a", args.dim_a)?;
    check_dim(cli, "--dim-b", args.dim_b)?;
    let r = monotonicity_trials(&spec, args.dim_a, args.dim_b, args.trials, args.seed, args.tol)?;
    emit(cli, &r, || TableRow::to_csv(&r.rows(), "trial").map_err(Failure::from))?;
    Ok(if r.violations.is_empty() { Status::Pass } else { Status::Disagreement })
}

#[derive(Serialize)]
struct RepcheckReport {
    consistency: RepConsistencyReport,
    integrability: IntegrabilityReport,
}

fn endpoint_cell(e: &EndpointIntegral) -> String {
    match e {
        EndpointIntegral::Finite(v) => format!("{v:.16e}"),
        EndpointIntegral::Divergent => "divergent".into(),
    }
}

pub fn repcheck(cli: &Cli, args: &RepcheckArgs) -> Result<Status, Failure> {
    let spec = load_phi(&args.phi)?;
    if args.grid == 0 {
        return Err(Failure::input("--grid: must be positive"));
    }
    let consistency = check_rep_consistency(&spec, args.grid, args.tol)?;
    let integrability = integrability_diagnostics(&spec)?;
    let pass = consistency.pass;
    let report = RepcheckReport { consistency, integrability };
    emit(cli, &report, || {
        let (c, i) = (&report.consistency, &report.integrability);
        let rows = [
            ("max_dev_phi_prime", format!("{:.16e}", c.max_dev_phi_prime)),
            ("max_dev_phi", format!("{:.16e}", c.max_dev_phi)),
            ("log_integral_upper", endpoint_cell(&i.log_integral_upper)),
            ("log_integral_lower", endpoint_cell(&i.log_integral_lower)),
            ("inverse_integral_upper", endpoint_cell(&i.inverse_integral_upper)),
            ("inverse_integral_lower", endpoint_cell(&i.inverse_integral_lower)),
        ];
        Ok(csv_lines("quantity,value,reason", rows.into_iter().map(|(k, v)| (k.to_string(), v, String::new()))))
    })?;
    Ok(if pass { Status::Pass } else { Status::Disagreement })
}
