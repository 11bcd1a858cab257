use std::io::Write;
use std::process::ExitCode;

use agr_bench::oracle_checks::{shaping_preserves_policies, tree_search_against_exact, ShapingCheck, TreeCheck};
use agr_bench::output::{render_csv, write_output};
use agr_bench::{run_sweep, BenchError, RunOptions};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "agr", about = "Assistive planning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Sweep planners and simulation budgets on one domain and write a CSV summary.
    Run(RunOptions),
    /// Compare the planner against exact solvers on small problems.
    OracleTests,
}

fn main() -> ExitCode {
    let result = match Cli::parse().command {
        Command::Run(options) => run(options),
        Command::OracleTests => oracle_tests(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(options: RunOptions) -> Result<bool, BenchError> {
    let experiment = options.load()?.resolve()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(threads) = experiment.threads {
        pool = pool.num_threads(threads);
    }
    let pool = pool.build().map_err(|e| BenchError::Invalid(e.to_string()))?;
    let results = pool.install(|| {
        run_sweep(&experiment, |point| {
            eprintln!(
                "{} {} param={} sims={} mean={:.3} se={:.3} done={:.2}",
                point.domain,
                point.planner,
                point.param,
                point.simulations,
                point.summary.mean_return,
                point.summary.std_err,
                point.summary.completion_rate,
            );
        })
    })?;
    match &experiment.out {
        Some(path) => write_output(&results, path)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(render_csv(&results).as_bytes())
                .map_err(|source| BenchError::Io { path: "<stdout>".into(), source })?;
        }
    }
    Ok(true)
}

fn oracle_tests() -> Result<bool, BenchError> {
    let tree = TreeCheck::default();
    let mut ok = true;
    for row in tree_search_against_exact(&tree)? {
        let error = row.max_error();
        let pass = error <= tree.tolerance;
        ok &= pass;
        println!(
            "{} tree search depth={} seed={} max_error={:.4} exact={:?} estimated={:?}",
            if pass { "PASS" } else { "FAIL" },
            row.depth,
            row.seed,
            error,
            row.exact,
            row.estimated,
        );
    }
    let shaping = shaping_preserves_policies(&ShapingCheck::default())?;
    let pass = shaping.mismatches == 0;
    ok &= pass;
    println!(
        "{} shaping keeps greedy policies: {} mdps, {} states, {} mismatches",
        if pass { "PASS" } else { "FAIL" },
        shaping.mdps,
        shaping.states_compared,
        shaping.mismatches,
    );
    Ok(ok)
}
