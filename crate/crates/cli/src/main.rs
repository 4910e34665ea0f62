//! `carnot`: command-line front end for the cohomology tables, exponent
//! ranges and contracted-complex checks.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use carnot_core::algebra::{validate, Grading};
use carnot_core::cohomology::{
    check_duality, check_extremes, check_weight_steps, cohomology, spectrum_lines, CohomologyTable,
};
use carnot_core::contracted::ContractedComplex;
use carnot_core::corpus;
use carnot_core::ranges::{best_nonvanishing, classify, range_report, LpExponent, RangeQuery};
use carnot_core::rational::{format_rational, int, parse_rational, Rational};
use carnot_core::spec_format::{parse_spec, AlgebraSpec};

#[derive(Parser)]
#[command(
    name = "carnot",
    version,
    about = "Graded cohomology and contracted complexes of nilpotent Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the algebra (Jacobi, nilpotency) and every grading in the spec.
    Check { spec: String },
    /// Print the weight table of the graded cohomology.
    Cohomology {
        spec: String,
        #[arg(long)]
        grading: String,
        /// Also list Betti numbers and weight multisets.
        #[arg(long)]
        spectrum: bool,
        #[arg(long)]
        json: bool,
    },
    /// Print exponent thresholds, or classify one (p, q, k) query.
    Ranges {
        spec: String,
        #[arg(long)]
        grading: String,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, requires = "q")]
        p: Option<LpExponent>,
        #[arg(long, requires = "p")]
        q: Option<LpExponent>,
        #[arg(long)]
        json: bool,
    },
    /// Check the contracted-complex identities on generators up to a weight.
    Contracted {
        spec: String,
        #[arg(long)]
        grading: String,
        /// Total weight cap for the sweeps (default 2Q); polynomial weight
        /// cap for --witness (default 3).
        #[arg(long, value_parser = parse_rational)]
        weight_cap: Option<Rational>,
        #[arg(long)]
        degree: Option<usize>,
        /// Search for a non-closed contracted form of this degree instead.
        #[arg(long)]
        witness: Option<usize>,
    },
    /// List the built-in algebras.
    Corpus,
}

enum Failure {
    /// Bad input: exit code 2.
    Usage(String),
    /// A check ran and failed: exit code 1.
    Check(String),
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn load_spec(arg: &str) -> Result<AlgebraSpec, Failure> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{arg}: {e}")))?;
        return parse_spec(&text).map_err(|e| usage(format!("{arg}: {e}")));
    }
    corpus::lookup(arg).ok_or_else(|| {
        usage(format!(
            "`{arg}` is neither a spec file nor a built-in algebra (see `carnot corpus`)"
        ))
    })
}

fn load_grading(spec: &AlgebraSpec, name: &str) -> Result<Grading, Failure> {
    spec.grading(name).map_err(usage)
}

fn json(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("serialisable")
}

fn table_header(table: &CohomologyTable, grading: &str) -> String {
    let symbol = if table.is_carnot { "Q" } else { "T" };
    format!(
        "{}, grading {grading} ({}), {symbol} = {}",
        table.algebra,
        if table.is_carnot {
            "Carnot"
        } else {
            "non-Carnot"
        },
        format_rational(&table.homogeneous_dim)
    )
}

fn cmd_check(spec_arg: &str) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let alg = &spec.algebra;
    let mut problems = Vec::new();
    let report = validate(alg);
    match alg.nilpotency_step() {
        Some(step) => println!(
            "{}: dimension {}, nilpotent of step {step}",
            alg.name(),
            alg.dim()
        ),
        None => println!("{}: dimension {}", alg.name(), alg.dim()),
    }
    for v in &report.violations {
        println!("  FAIL {v}");
        problems.push(v.to_string());
    }
    if report.is_valid() {
        for name in spec.grading_names() {
            match spec.grading(name) {
                Ok(g) => println!("  grading {name}: {g}"),
                Err(e) => {
                    println!("  FAIL grading {name}: {e}");
                    problems.push(e.to_string());
                }
            }
        }
    }
    if problems.is_empty() {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Check(format!("{} problem(s)", problems.len())))
    }
}

fn cmd_cohomology(spec_arg: &str, grading: &str, spectrum: bool, as_json: bool) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let g = load_grading(&spec, grading)?;
    let table = cohomology(&spec.algebra, &g);
    if as_json {
        println!(
            "{}",
            json(&serde_json::to_value(&table).expect("serialisable"))
        );
        return Ok(());
    }
    println!("{}", table_header(&table, grading));
    print!("{table}");
    if spectrum {
        println!();
        for line in spectrum_lines(&table) {
            println!("{line}");
        }
    }
    let mut problems = Vec::new();
    for report in [
        check_duality(&table),
        check_weight_steps(&table),
        check_extremes(&table),
    ] {
        problems.extend(report.violations);
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(problems.join("; ")))
    }
}

fn cmd_ranges(
    spec_arg: &str,
    grading: &str,
    degree: Option<usize>,
    p: Option<LpExponent>,
    q: Option<LpExponent>,
    as_json: bool,
) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let g = load_grading(&spec, grading)?;
    let table = cohomology(&spec.algebra, &g);
    let n = table.dimension;
    if let Some(k) = degree {
        if k == 0 || k > n {
            return Err(usage(format!("--degree must be in 1..={n}")));
        }
    }
    if let (Some(p), Some(q)) = (p, q) {
        let k = degree.ok_or_else(|| usage("--p/--q need --degree"))?;
        let query = RangeQuery::new(k, p, q);
        let c = classify(&table, &query).map_err(usage)?;
        if as_json {
            println!(
                "{}",
                json(&serde_json::json!({ "query": query, "classification": c }))
            );
        } else {
            println!("{c}");
        }
        return Ok(());
    }

    // best non-vanishing bound over every grading of the spec that builds
    let others: Vec<(String, CohomologyTable)> = spec
        .grading_names()
        .into_iter()
        .filter_map(|name| {
            spec.grading(name)
                .ok()
                .map(|g| (name.to_string(), cohomology(&spec.algebra, &g)))
        })
        .collect();
    let mut report = range_report(&table);
    if let Some(k) = degree {
        report.degrees.retain(|d| d.degree == k);
    }
    let best: Vec<_> = report
        .degrees
        .iter()
        .filter_map(|d| {
            best_nonvanishing(others.iter().map(|(n, t)| (n.as_str(), t)), d.degree)
                .map(|b| (d.degree, b))
        })
        .collect();
    if as_json {
        let best_json: Vec<_> = best
            .iter()
            .map(|(k, b)| serde_json::json!({ "degree": k, "grading": b.grading, "threshold": format_rational(&b.threshold) }))
            .collect();
        println!(
            "{}",
            json(&serde_json::json!({ "report": report, "best_nonvanishing": best_json }))
        );
        return Ok(());
    }
    print!("{report}");
    if others.len() > 1 {
        println!("best non-vanishing bound over all gradings (1<=p,q<inf):");
        for (k, b) in best {
            println!(
                "  k = {k}: gap < {} via {}",
                format_rational(&b.threshold),
                b.grading
            );
        }
    }
    Ok(())
}

fn cmd_contracted(
    spec_arg: &str,
    grading: &str,
    weight_cap: Option<Rational>,
    degree: Option<usize>,
    witness: Option<usize>,
) -> CmdResult {
    let spec = load_spec(spec_arg)?;
    let g = load_grading(&spec, grading)?;
    let engine = ContractedComplex::new(&spec.algebra, &g).map_err(usage)?;
    let n = spec.algebra.dim();
    if let Some(k) = degree {
        if k > n {
            return Err(usage(format!("--degree must be in 0..={n}")));
        }
    }
    if let Some(k) = witness {
        let cap = weight_cap.unwrap_or_else(|| int(3));
        return match engine.find_nonclosed_witness(k, &cap) {
            Ok(w) => {
                println!("{}", w.display(&spec.algebra));
                Ok(())
            }
            Err(e @ carnot_core::contracted::ContractedError::DegreeOutOfRange { .. }) => {
                Err(usage(e))
            }
            Err(e) => Err(Failure::Check(e.to_string())),
        };
    }
    let cap = weight_cap.unwrap_or_else(|| g.homogeneous_dim() * int(2));
    let projectors = engine.sweep_projectors(&cap, degree);
    print!("{projectors}");
    let dc = engine.sweep_dc(&cap, degree);
    print!("{dc}");
    let failed = projectors.failures.len() + dc.failures.len();
    if failed == 0 {
        println!("ok");
        Ok(())
    } else {
        Err(Failure::Check(format!("{failed} failure(s)")))
    }
}

fn cmd_corpus() -> CmdResult {
    for spec in corpus::specs() {
        let alg = &spec.algebra;
        let step = alg
            .nilpotency_step()
            .map_or("-".to_string(), |s| s.to_string());
        println!(
            "{:<12} dim {:<2} step {:<2} gradings: {}",
            alg.name(),
            alg.dim(),
            step,
            spec.grading_names().join(", ")
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Check { spec } => cmd_check(&spec),
        Command::Cohomology {
            spec,
            grading,
            spectrum,
            json,
        } => cmd_cohomology(&spec, &grading, spectrum, json),
        Command::Ranges {
            spec,
            grading,
            degree,
            p,
            q,
            json,
        } => cmd_ranges(&spec, &grading, degree, p, q, json),
        Command::Contracted {
            spec,
            grading,
            weight_cap,
            degree,
            witness,
        } => cmd_contracted(&spec, &grading, weight_cap, degree, witness),
        Command::Corpus => cmd_corpus(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("carnot: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("carnot: {msg}");
            ExitCode::from(2)
        }
    }
}
