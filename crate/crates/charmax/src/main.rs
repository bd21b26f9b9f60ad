//! Command-line front end.
//!
//! Subcommands: scan, delta, counterexample, reduction, discrepancy,
//! rearrange. Global flags --seed, --config, --format; the env var
//! CHARMAX_CONFIG supplies a default config path. Identical command line
//! and seed produce byte-identical JSON output.
//!
//! Exit codes: 0 success, 2 usage, 3 budget, 4 failed identity check,
//! 1 other errors. Failures print a single line "error[code]: message".

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use charmax::chargroup::CoefficientVector;
use charmax::config::{OutputFormat, RunConfig};
use charmax::delta::{delta_exact_small, delta_heuristic, rm_upper_bound, DeltaEstimate};
use charmax::discrepancy::{
    empirical_grid_discrepancy, etk_bound, etk_m_schedule, grid_box_coverage, subgroup_point_set,
};
use charmax::error::Error;
use charmax::numtheory::{scan_fouvry_primes, GroupContext, SubgroupContext};
use charmax::pipeline::{
    build_counterexample, build_counterexample_from_witness, scan_counterexamples,
    CounterexampleConfig,
};
use charmax::rearrangement::{search_bad_permutation, BadOrderWitness, SearchParams};
use charmax::report;

#[derive(Parser)]
#[command(
    name = "charmax",
    version,
    about = "Maximal partial-sum operators for Dirichlet characters"
)]
struct Cli {
    /// RNG seed (overrides config file).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Config file of key=value lines; defaults to $CHARMAX_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output format: json, csv, or text.
    #[arg(long, global = true)]
    format: Option<String>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan primes p <= limit with a large prime factor of p-1.
    Scan {
        #[arg(long)]
        limit: u64,
        /// Constant B in q >= B p^exponent.
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        exponent: Option<f64>,
    },
    /// Estimate Delta(N): exact oracle, heuristic lower bound, or ceiling.
    Delta {
        #[arg(long)]
        n: u64,
        /// exact, heuristic, or rm.
        #[arg(long)]
        mode: String,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Build the subgroup-supported counterexample for one prime or a scan.
    Counterexample {
        #[arg(long, conflicts_with = "limit")]
        p: Option<u64>,
        /// Scan mode: run over every scanned prime up to this limit.
        #[arg(long)]
        limit: Option<u64>,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long)]
        s_cap: Option<usize>,
        /// Dimension scale delta in floor(delta log^{1/2} p).
        #[arg(long)]
        delta: Option<f64>,
        /// Reuse an exported (sigma, b) witness instead of searching.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Verify the reduction chain for random coefficients on powers of 2.
    Reduction {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
    },
    /// Subgroup orbit equidistribution: coverage, bound, empirical check.
    Discrepancy {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        s: usize,
        /// Frequency cutoff; defaults to the preset floor(s^{delta1 s}).
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        resolution: Option<u64>,
        /// Write the orbit point set as CSV (exact rationals + doubles).
        #[arg(long)]
        export_points: Option<PathBuf>,
    },
    /// Search for an adversarial permutation and coefficients.
    Rearrange {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        budget: Option<u64>,
        /// Write the witness JSON here for reuse by counterexample.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) | Error::NotPrime(_) | Error::ZeroVector | Error::Config(_) => 2,
        Error::BudgetExceeded(_) | Error::UnsupportedModulus(_, _) => 3,
        Error::IdentityCheckFailed { .. } | Error::MonotonicityViolated { .. } => 4,
        Error::NonConvergence(_) | Error::NoOrderedElement { .. } => 1,
    }
}

fn error_tag(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument(_) | Error::NotPrime(_) | Error::ZeroVector => "usage",
        Error::Config(_) => "config",
        Error::BudgetExceeded(_) | Error::UnsupportedModulus(_, _) => "budget",
        Error::IdentityCheckFailed { .. } => "identity",
        Error::MonotonicityViolated { .. } => "monotonicity",
        Error::NonConvergence(_) => "convergence",
        Error::NoOrderedElement { .. } => "no-ordered-element",
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error[{}]: {e}", error_tag(&e));
            std::process::exit(exit_code(&e));
        }
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    let path = cli
        .config
        .clone()
        .or_else(|| std::env::var_os("CHARMAX_CONFIG").map(PathBuf::from));
    if let Some(path) = path {
        cfg.apply_file(&path)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(fmt) = &cli.format {
        cfg.format = Some(fmt.parse()?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    println!("{}", report::to_json(value)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = load_config(&cli)?;
    match &cli.cmd {
        Command::Scan { limit, b, exponent } => {
            cmd_scan(&cfg, *limit, b.unwrap_or(cfg.b_constant), exponent.unwrap_or(cfg.fouvry_exponent))
        }
        Command::Delta {
            n,
            mode,
            restarts,
            iters,
        } => cmd_delta(
            &cfg,
            *n,
            mode,
            restarts.unwrap_or(cfg.restarts),
            iters.unwrap_or(cfg.iters),
        ),
        Command::Counterexample {
            p,
            limit,
            budget,
            s_cap,
            delta,
            witness,
        } => {
            let ccfg = CounterexampleConfig {
                dimension_scale: delta.unwrap_or(cfg.dimension_scale),
                s_cap: s_cap.unwrap_or(cfg.s_cap),
                budget: budget.unwrap_or(cfg.budget),
                seed: cfg.seed,
                search: SearchParams {
                    restarts: cfg.restarts,
                    iters: cfg.iters,
                    c1: cfg.c1,
                },
            };
            cmd_counterexample(&cfg, &ccfg, *p, *limit, witness.as_deref())
        }
        Command::Reduction { p, k } => cmd_reduction(&cfg, *p, *k),
        Command::Discrepancy {
            p,
            q,
            s,
            m,
            resolution,
            export_points,
        } => cmd_discrepancy(
            &cfg,
            *p,
            *q,
            *s,
            *m,
            resolution.unwrap_or(6),
            export_points.as_deref(),
        ),
        Command::Rearrange {
            n,
            m,
            budget,
            export,
        } => cmd_rearrange(&cfg, *n, *m, budget.unwrap_or(cfg.budget), export.as_deref()),
    }
}

fn cmd_scan(cfg: &RunConfig, limit: u64, b: f64, exponent: f64) -> Result<(), Error> {
    if limit == 0 {
        return Err(Error::InvalidArgument(
            "scan requires --limit >= 1".into(),
        ));
    }
    let pairs = scan_fouvry_primes(limit, b, exponent)?;
    match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => {
            let mut out = String::from("p,q,exponent_achieved\n");
            for pp in &pairs {
                out.push_str(&format!(
                    "{},{},{}\n",
                    pp.p,
                    pp.q,
                    report::csv_f64(pp.ratio_exponent)
                ));
            }
            print!("{out}");
        }
        OutputFormat::Json => print_json(&pairs)?,
        OutputFormat::Text => {
            for pp in &pairs {
                println!("p={:<8} q={:<8} exponent={:.4}", pp.p, pp.q, pp.ratio_exponent);
            }
            println!("{} primes found up to {limit}", pairs.len());
        }
    }
    Ok(())
}

fn cmd_delta(
    cfg: &RunConfig,
    n: u64,
    mode: &str,
    restarts: usize,
    iters: usize,
) -> Result<(), Error> {
    let estimate: DeltaEstimate = match mode {
        "exact" => {
            if n > cfg.exact_cap {
                return Err(Error::BudgetExceeded(format!(
                    "exact mode is capped at N <= {} (set exact_cap to raise it)",
                    cfg.exact_cap
                )));
            }
            delta_exact_small(n, cfg.seed)?
        }
        "heuristic" => delta_heuristic(n, restarts, iters, cfg.seed)?,
        "rm" => rm_upper_bound(n)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown mode '{other}' (expected exact, heuristic, or rm)"
            )))
        }
    };
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => print_json(&estimate)?,
        OutputFormat::Csv => {
            println!("n,value,kind,method");
            println!(
                "{},{},{:?},{}",
                estimate.n,
                report::csv_f64(estimate.value),
                estimate.kind,
                estimate.method
            );
        }
        OutputFormat::Text => {
            let lower = if mode == "heuristic" {
                estimate.value
            } else {
                delta_heuristic(n, restarts, iters, cfg.seed)?.value
            };
            let exact = if mode == "exact" {
                Some(estimate.value)
            } else if n <= cfg.exact_cap {
                Some(delta_exact_small(n, cfg.seed)?.value)
            } else {
                None
            };
            let ceiling = rm_upper_bound(n)?.value;
            println!(
                "N={n}  lower_bound={lower:.12}  exact={}  rm_ceiling={ceiling}",
                exact.map_or("-".into(), |v| format!("{v:.12}"))
            );
        }
    }
    Ok(())
}

fn counterexample_csv_row(report: &charmax::pipeline::CounterexampleReport, ms: u64) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        report.p,
        report.q,
        report.s,
        report::csv_f64(report.delta_lower_bound),
        report::csv_f64(report.reference_scale),
        ms
    )
}

fn cmd_counterexample(
    cfg: &RunConfig,
    ccfg: &CounterexampleConfig,
    p: Option<u64>,
    limit: Option<u64>,
    witness: Option<&std::path::Path>,
) -> Result<(), Error> {
    match (p, limit) {
        (Some(p), None) => {
            let report = if let Some(path) = witness {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read witness: {e}")))?;
                let witness: BadOrderWitness = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("bad witness JSON: {e}")))?;
                build_counterexample_from_witness(p, &witness)?
            } else {
                build_counterexample(p, ccfg)?
            };
            match cfg.format.unwrap_or(OutputFormat::Json) {
                OutputFormat::Json => print_json(&report)?,
                OutputFormat::Csv => {
                    print!(
                        "p,q,s,delta_lower_bound,ref_scale,runtime_ms\n{}",
                        counterexample_csv_row(&report, 0)
                    );
                }
                OutputFormat::Text => {
                    println!(
                        "p={} q={} s={} g={} delta_lower_bound={:.9} ref_scale={:.6}",
                        report.p,
                        report.q,
                        report.s,
                        report.g,
                        report.delta_lower_bound,
                        report.reference_scale
                    );
                    for id in &report.identities {
                        println!(
                            "  identity {:<35} abs_error={:.3e}",
                            id.name, id.abs_error
                        );
                    }
                }
            }
            Ok(())
        }
        (None, Some(limit)) => {
            let entries = scan_counterexamples(limit, cfg.b_constant, cfg.fouvry_exponent, ccfg)?;
            match cfg.format.unwrap_or(OutputFormat::Csv) {
                OutputFormat::Csv => {
                    let mut out = String::from("p,q,s,delta_lower_bound,ref_scale,runtime_ms\n");
                    for e in &entries {
                        out.push_str(&counterexample_csv_row(&e.report, e.runtime_ms));
                    }
                    print!("{out}");
                }
                OutputFormat::Json => {
                    let reports: Vec<_> = entries.iter().map(|e| &e.report).collect();
                    print_json(&reports)?;
                }
                OutputFormat::Text => {
                    for e in &entries {
                        println!(
                            "p={:<8} q={:<8} s={} bound={:.6} ref={:.4}",
                            e.report.p,
                            e.report.q,
                            e.report.s,
                            e.report.delta_lower_bound,
                            e.report.reference_scale
                        );
                    }
                }
            }
            Ok(())
        }
        _ => Err(Error::InvalidArgument(
            "counterexample requires exactly one of --p or --limit".into(),
        )),
    }
}

fn cmd_reduction(cfg: &RunConfig, p: u64, k: usize) -> Result<(), Error> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be positive".into()));
    }
    // Random complex coefficients from the run seed.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let values: Vec<Complex64> = charmax::delta::random_unit_vector(k, &mut rng);
    let a = CoefficientVector::from_dense(&values);
    let report = charmax::pipeline::verify_ch_reduction(p, &a)?;
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => print_json(&report)?,
        OutputFormat::Csv => {
            println!("p,k,nu2,l,m,v_char,v_index,v_fraction,v_additive");
            println!(
                "{},{},{},{},{},{},{},{},{}",
                report.p,
                report.k,
                report.nu2,
                report.l,
                report.m,
                report::csv_f64(report.chain_values[0]),
                report::csv_f64(report.chain_values[1]),
                report::csv_f64(report.chain_values[2]),
                report::csv_f64(report.chain_values[3]),
            );
        }
        OutputFormat::Text => {
            println!(
                "p={} k={} nu(2)={} L/M={}/{} (M > log2 p: {})",
                report.p, report.k, report.nu2, report.l, report.m, report.m_exceeds_log
            );
            println!("chain values: {:?}", report.chain_values);
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct DiscrepancyReport {
    p: u64,
    q: u64,
    s: usize,
    m: u64,
    etk_bound: f64,
    empirical_lower: f64,
    covered: bool,
    missing_count: usize,
}

fn cmd_discrepancy(
    cfg: &RunConfig,
    p: u64,
    q: u64,
    s: usize,
    m: Option<u64>,
    resolution: u64,
    export_points: Option<&std::path::Path>,
) -> Result<(), Error> {
    let ctx = GroupContext::build(p)?;
    let sub = SubgroupContext::build(&ctx, q)?;
    let ps = subgroup_point_set(&sub, s)?;
    if let Some(path) = export_points {
        std::fs::write(path, ps.to_csv())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    let m = m.unwrap_or_else(|| etk_m_schedule(s, cfg.etk_delta1));
    let bound = etk_bound(&ps, m)?;
    let empirical = empirical_grid_discrepancy(&ps, resolution)?;
    if bound < empirical - 1e-9 {
        return Err(Error::IdentityCheckFailed {
            name: "etk bound dominates empirical discrepancy".into(),
            lhs: bound,
            rhs: empirical,
        });
    }
    let coverage = grid_box_coverage(&ps)?;
    let report = DiscrepancyReport {
        p,
        q,
        s,
        m,
        etk_bound: bound,
        empirical_lower: empirical,
        covered: coverage.covered,
        missing_count: coverage.missing.len(),
    };
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => print_json(&report)?,
        OutputFormat::Csv => {
            println!("p,q,s,m,etk_bound,empirical_lower,covered,missing_count");
            println!(
                "{},{},{},{},{},{},{},{}",
                report.p,
                report.q,
                report.s,
                report.m,
                report::csv_f64(report.etk_bound),
                report::csv_f64(report.empirical_lower),
                report.covered,
                report.missing_count
            );
        }
        OutputFormat::Text => {
            println!(
                "p={p} q={q} s={s} m={m}: etk_bound={:.6} empirical={:.6} covered={} missing={}",
                report.etk_bound, report.empirical_lower, report.covered, report.missing_count
            );
            // Display decomposition of the bound: the 1/m term and the
            // Weil-driven term s p^{-.1687} log^s(m), with the constant
            // treated as 1.
            let weil_term = s as f64 * (p as f64).powf(-0.1687) * (m as f64).ln().max(0.0).powi(s as i32);
            println!(
                "  bound terms: 1/m={:.6}  s*p^-0.1687*log^s(m)={:.6}  target (3s)^-s={:.6}",
                1.0 / m as f64,
                weil_term,
                (3.0 * s as f64).powi(-(s as i32))
            );
        }
    }
    Ok(())
}

fn cmd_rearrange(
    cfg: &RunConfig,
    n: usize,
    m: u64,
    budget: u64,
    export: Option<&std::path::Path>,
) -> Result<(), Error> {
    let params = SearchParams {
        restarts: cfg.restarts,
        iters: cfg.iters,
        c1: cfg.c1,
    };
    let witness = search_bad_permutation(n, m, budget, cfg.seed, &params)?;
    let json = report::to_json(&witness)?;
    if let Some(path) = export {
        std::fs::write(path, format!("{json}\n"))
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    match cfg.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => println!("{json}"),
        OutputFormat::Csv => {
            println!("n,m,score,threshold,level_mass");
            println!(
                "{},{},{},{},{}",
                witness.n,
                m,
                report::csv_f64(witness.score),
                report::csv_f64(witness.threshold),
                report::csv_f64(witness.level_mass)
            );
        }
        OutputFormat::Text => {
            let sigma: Vec<usize> = witness.sigma.values().collect();
            println!(
                "n={} m={m} score={:.9} threshold={:.4} level_mass={:.4} (c2={})",
                witness.n, witness.score, witness.threshold, witness.level_mass, cfg.c2
            );
            println!("sigma={sigma:?}");
            // Shift discretization: the best tau in [0, 1/M) and how many
            // grid points clear the threshold there.
            let (tau0, count) = charmax::rearrangement::discretize_via_shift(
                &witness.b,
                &witness.sigma,
                m,
                cfg.tau_grid,
                witness.threshold,
            )?;
            println!("best shift tau0={tau0:.8} clears threshold at {count}/{m} points");
        }
    }
    Ok(())
}
