//! Dispatch from a validated config to the experiments.

use crate::config::{Command, RunConfig};
use crate::emit::{Cell, Output};
use crate::CliError;
use intrinsic_metrics::caps::{affentranger_a, affentranger_ratio, ConstantsBundle};
use intrinsic_metrics::experiments::{
    appendix_b_expectation, best_approx_search, lemma_validation_suite, missed_volume, theorem1_run,
};
use intrinsic_metrics::rng::{stream, substream};
use intrinsic_metrics::stats::weighted_line_fit;
use intrinsic_metrics::{BetaParams, ExperimentSpec};
use serde_json::json;

pub fn execute(rc: &RunConfig) -> Result<Output, CliError> {
    match rc.command {
        Command::Validate => validate(rc),
        Command::Theorem1 => theorem1(rc),
        Command::Rate => rate(rc),
        Command::Optimize => optimize(rc),
        Command::Constants => constants(rc),
        Command::AppendixB => appendix_b(rc),
    }
}

const RATE_HEADER: [&str; 5] = ["N", "mean", "stderr", "bound", "ratio"];

fn validate(rc: &RunConfig) -> Result<Output, CliError> {
    let report = lemma_validation_suite(rc.seed);
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Text(r.name.clone()),
                Cell::Num(r.statistic),
                Cell::Num(r.threshold),
                Cell::Flag(r.passed),
                Cell::Text(r.error.clone().unwrap_or_default()),
            ]
        })
        .collect();
    Ok(Output {
        header: vec!["check", "statistic", "threshold", "passed", "error"],
        rows,
        result: json!({ "all_passed": report.all_passed(), "report": report }),
    })
}

fn theorem1(rc: &RunConfig) -> Result<Output, CliError> {
    let spec = ExperimentSpec {
        n: rc.dim()?,
        j: rc.sub_dim()?,
        n_grid: rc.n_grid.clone(),
        reps: rc.reps,
        seed: rc.seed,
        cfg: rc.cfg,
        scaling: rc.scaling,
    };
    let result = theorem1_run(&spec)?;
    let rows = result
        .rows
        .iter()
        .map(|r| {
            vec![
                Cell::Int(r.n_vertices as u64),
                Cell::Num(r.mean),
                Cell::Num(r.std_error),
                Cell::Num(r.bound),
                Cell::Num(r.ratio),
            ]
        })
        .collect();
    let expected = -2.0 / (spec.n as f64 - 1.0);
    Ok(Output {
        header: RATE_HEADER.to_vec(),
        rows,
        result: json!({ "expected_slope": expected, "experiment": result }),
    })
}

/// Expected missed volume of beta polytopes next to `A_{n,β}N^{−2/(n+2β+1)}`.
fn rate(rc: &RunConfig) -> Result<Output, CliError> {
    let n = rc.dim()?;
    let beta = rc.beta_value()?;
    let params = BetaParams::new(n, beta)?;
    let a = affentranger_a(n, beta)?;
    let exponent = -2.0 / (n as f64 + 2.0 * beta + 1.0);
    let mut rows = Vec::new();
    let mut table = Vec::new();
    for &n_points in &rc.n_grid {
        let est = missed_volume(
            params,
            n_points,
            rc.reps,
            rc.cfg.volume_samples,
            &mut substream(rc.seed, &[n_points as u64]),
        )?;
        let bound = a * (n_points as f64).powf(exponent);
        rows.push(vec![
            Cell::Int(n_points as u64),
            Cell::Num(est.value),
            Cell::Num(est.std_error),
            Cell::Num(bound),
            Cell::Num(est.value / bound),
        ]);
        table.push((n_points, est));
    }
    let x: Vec<f64> = table.iter().map(|(m, _)| (*m as f64).ln()).collect();
    let y: Vec<f64> = table.iter().map(|(_, e)| e.value.ln()).collect();
    let w = vec![1.0; x.len()];
    let fit = weighted_line_fit(&x, &y, &w);
    let rows_json: Vec<_> = table
        .iter()
        .map(|(m, e)| json!({ "n_vertices": m, "missed_volume": e }))
        .collect();
    Ok(Output {
        header: RATE_HEADER.to_vec(),
        rows,
        result: json!({
            "asymptotic_constant": a,
            "expected_slope": exponent,
            "fit": fit,
            "rows": rows_json,
        }),
    })
}

fn optimize(rc: &RunConfig) -> Result<Output, CliError> {
    let (n, j) = (rc.dim()?, rc.sub_dim()?);
    let out = best_approx_search(n, j, rc.n_grid[0], rc.budget, &rc.cfg, &mut stream(rc.seed))?;
    let summary = out.summary();
    let rows = summary
        .history
        .iter()
        .enumerate()
        .map(|(k, &v)| vec![Cell::Int(k as u64), Cell::Num(v)])
        .collect();
    Ok(Output {
        header: vec!["accepted", "objective"],
        rows,
        result: json!({ "search": summary }),
    })
}

fn constants(rc: &RunConfig) -> Result<Output, CliError> {
    let (n, j, beta) = (rc.dim()?, rc.sub_dim()?, rc.beta_value()?);
    let c = ConstantsBundle::compute(n, j, beta, rc.l)?;
    let ratio = affentranger_ratio(n, beta)?;
    let mut rows = vec![
        vec![Cell::Text("d".into()), Cell::Num(c.d)],
        vec![Cell::Text("A".into()), Cell::Num(c.a)],
        vec![Cell::Text("A_over_sphere_area".into()), Cell::Num(ratio)],
        vec![Cell::Text("flag".into()), Cell::Num(c.flag)],
        vec![Cell::Text("chern".into()), Cell::Num(c.chern)],
    ];
    if let Some(m) = c.secmom {
        rows.push(vec![Cell::Text("simplex_second_moment".into()), Cell::Num(m)]);
    }
    Ok(Output {
        header: vec!["name", "value"],
        rows,
        result: json!({ "constants": c, "A_over_sphere_area": ratio }),
    })
}

fn appendix_b(rc: &RunConfig) -> Result<Output, CliError> {
    let beta = rc.beta_value()?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &n_points in &rc.n_grid {
        let v = appendix_b_expectation(n_points, beta)?;
        rows.push(vec![Cell::Int(n_points as u64), Cell::Num(v)]);
        values.push(json!({ "n_vertices": n_points, "expected_length": v }));
    }
    Ok(Output {
        header: vec!["N", "expected_length"],
        rows,
        result: json!({ "rows": values }),
    })
}
