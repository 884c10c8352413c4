use std::process::ExitCode;

use clap::Parser;
use si_maxcut_cli::cli::Args;
use si_maxcut_cli::{data, report, run_experiment};

fn main() -> anyhow::Result<ExitCode> {
    let cfg = Args::parse().into_config()?;
    let best_known = data::load_best_known(cfg.best_known.as_deref())?;
    let outcome = run_experiment(&cfg)?;
    for f in &outcome.failures {
        eprintln!("warning: {}: {}", f.graph, f.message);
    }
    if outcome.records.is_empty() {
        eprintln!("error: no runs completed");
        return Ok(ExitCode::FAILURE);
    }
    let rows = report::write_reports(&cfg.out, &outcome.records, &outcome.timings, &best_known)?;
    println!("{:<12} {:<5} {:>4} {:>5} {:>10} {:>12} {:>10} {:>8}", "graph", "algo", "p", "runs", "min", "mean", "max", "ratio");
    for r in &rows {
        println!(
            "{:<12} {:<5} {:>4} {:>5} {:>10} {:>12.2} {:>10} {:>8}",
            r.graph,
            r.algo,
            r.p,
            r.runs,
            r.min,
            r.mean,
            r.max,
            r.ratio().map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
        );
    }
    println!("wrote {} records to {}", outcome.records.len(), cfg.out.display());
    Ok(ExitCode::SUCCESS)
}
