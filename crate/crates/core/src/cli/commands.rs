use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::{BenchArgs, CheckLatticeArgs, CliError, ExtractArgs, OracleArgs, SolveArgs};
use crate::augmentation::{brute_force_optimum, maple_solve_with_pool, AugmentError, SolveReport};
use crate::extraction::{extract_directions, DirectionPool, ExtractionError};
use crate::graver::{graver_oracle, EnumerationLimits, GraverError};
use crate::lattice::{hnf, is_lll_reduced, lll_reduce, IntegerMatrix};
use crate::model::{import_qplib, parse_instance_json, write_report, Problem};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

/// Parse an instance, choosing the format by extension.
pub(crate) fn load_problem(path: &Path) -> Result<Problem, CliError> {
    let text = read(path)?;
    let is_qplib = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("qplib"));
    let parsed = if is_qplib {
        import_qplib(&text)
    } else {
        parse_instance_json(&text)
    };
    parsed.map_err(|e| CliError::new("parse", e))
}

fn extraction_error(e: ExtractionError) -> CliError {
    let kind = match e {
        ExtractionError::InvalidConfig(_) => "config",
        ExtractionError::Lattice(_) => "lattice",
        ExtractionError::PoolFormat(_) => "pool_format",
        ExtractionError::PoolMismatch(_) => "pool_mismatch",
        _ => "extraction",
    };
    CliError::new(kind, e)
}

fn solve_error(e: AugmentError) -> CliError {
    match e {
        AugmentError::Extraction(inner) => extraction_error(inner),
        AugmentError::InvalidConfig(_) => CliError::new("config", e),
        other => CliError::new("solve", other),
    }
}

fn graver_error(e: GraverError) -> CliError {
    match e {
        GraverError::TooLarge(_) => CliError::new("too_large", e),
        other => CliError::new("oracle", other),
    }
}

pub(super) fn extract(args: &ExtractArgs) -> Result<(), CliError> {
    let problem = load_problem(&args.instance)?;
    let cfg = args.flags.config();
    let started = Instant::now();
    let pool = extract_directions(problem.matrix(), problem.lower(), problem.upper(), &cfg)
        .map_err(extraction_error)?;
    let elapsed = started.elapsed().as_secs_f64() * 1e3;
    write(&args.out, &pool.to_json())?;
    println!("pool size: {}", pool.len());
    println!("extraction time: {elapsed:.1} ms");
    Ok(())
}

fn load_pool(path: &Path, problem: &Problem) -> Result<DirectionPool, CliError> {
    let pool = DirectionPool::from_json(&read(path)?).map_err(extraction_error)?;
    pool.check_compatible(problem).map_err(extraction_error)?;
    Ok(pool)
}

pub(super) fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let problem = load_problem(&args.instance)?;
    let pool = args
        .pool
        .as_deref()
        .map(|p| load_pool(p, &problem))
        .transpose()?;
    let report = maple_solve_with_pool(&problem, pool.as_ref(), &args.flags.config())
        .map_err(solve_error)?;
    let text = write_report(&report);
    match &args.out {
        Some(path) => {
            write(path, &text)?;
            print_summary(&report);
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn print_summary(report: &SolveReport) {
    match &report.best {
        Some(s) => println!("best objective: {}", s.objective),
        None => println!("best objective: none (no feasible point found)"),
    }
    let t = &report.timings;
    println!("augmentation time: {:.1} ms", t.feasibility_ms + t.augmentation_ms);
    println!("extraction time: {:.1} ms", t.extraction_ms);
}

pub(super) fn oracle(args: &OracleArgs) -> Result<(), CliError> {
    let problem = load_problem(&args.instance)?;
    let limits = EnumerationLimits {
        max_dim: args.max_dim,
        node_budget: args.node_budget,
    };
    let bx = problem.difference_box();
    let elements = graver_oracle(problem.matrix(), &bx, &limits).map_err(graver_error)?;
    let mut pool = DirectionPool::for_problem(&problem);
    for g in &elements {
        pool.insert_pair(g);
    }
    write(&args.out, &pool.to_json())?;
    println!("graver elements: {}", pool.len());
    Ok(())
}

fn rows_i64(m: &IntegerMatrix) -> serde_json::Value {
    match m.to_i64_rows() {
        Some(rows) => json!(rows),
        None => json!(m
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    }
}

pub(super) fn check_lattice(args: &CheckLatticeArgs) -> Result<(), CliError> {
    let problem = load_problem(&args.instance)?;
    let a = problem.matrix();
    let res = hnf(a).map_err(|e| CliError::new("lattice", e))?;
    let (m, n) = (a.rows(), a.cols());
    let ac = a.mul(&res.c).map_err(|e| CliError::new("lattice", e))?;
    let echelon = (0..m).all(|i| (0..n).all(|j| {
        if j < m {
            ac.get(i, j) == res.h.get(i, j)
        } else {
            ac.get(i, j) == &0.into()
        }
    }));
    let det = res.c.determinant().map_err(|e| CliError::new("lattice", e))?;
    let unimodular = det == 1.into() || det == (-1).into();
    let reduced = match &res.b {
        Some(b) => Some(lll_reduce(b).map_err(|e| CliError::new("lattice", e))?),
        None => None,
    };
    let is_reduced = match &reduced {
        Some(b) => is_lll_reduced(b).map_err(|e| CliError::new("lattice", e))?,
        None => true,
    };
    let summary = json!({
        "n": n,
        "m": m,
        "kernel_dim": n - m,
        "hnf": rows_i64(&res.h),
        "echelon_ok": echelon,
        "unimodular": unimodular,
        "lll_reduced": is_reduced,
        "kernel_basis": reduced.as_ref().map(|b| rows_i64(&b.transpose())),
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("json"));
    if echelon && unimodular && is_reduced {
        Ok(())
    } else {
        Err(CliError::new("check_failed", "lattice verification failed"))
    }
}

struct BenchRow {
    name: String,
    cells: Result<[String; 7], String>,
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.6}"))
}

fn bench_one(path: &Path, args: &BenchArgs) -> Result<[String; 7], String> {
    let problem = load_problem(path).map_err(|e| {
        if e.kind == "parse" {
            "parse_error".to_string()
        } else {
            e.kind.to_string()
        }
    })?;
    let limits = EnumerationLimits {
        max_dim: args.max_dim,
        ..EnumerationLimits::default()
    };
    let cfg = args.flags.config();
    let mut oracle_ms = None;
    let pool = if args.oracle_pool {
        let started = Instant::now();
        match graver_oracle(problem.matrix(), &problem.difference_box(), &limits) {
            Ok(elements) => {
                let mut pool = DirectionPool::for_problem(&problem);
                for g in &elements {
                    pool.insert_pair(g);
                }
                oracle_ms = Some(started.elapsed().as_secs_f64() * 1e3);
                Some(pool)
            }
            Err(_) => None,
        }
    } else {
        None
    };
    let report = maple_solve_with_pool(&problem, pool.as_ref(), &cfg).map_err(|e| solve_error(e).kind.to_string())?;
    let objective = report.best.as_ref().map(|s| s.objective);
    let brute = brute_force_optimum(&problem, &limits).ok().flatten().map(|s| s.objective);
    let gap = objective.zip(brute).map(|(a, b)| a - b);
    let t = report.timings;
    Ok([
        problem.n().to_string(),
        problem.m().to_string(),
        format!("{:.1}", t.feasibility_ms + t.augmentation_ms),
        format!("{:.1}", oracle_ms.unwrap_or(t.extraction_ms)),
        objective.map_or_else(|| "infeasible".into(), |v| format!("{v:.6}")),
        fmt_value(brute),
        fmt_value(gap),
    ])
}

fn instance_files(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::new("io", format!("{}: {e}", dir.display())))?;
    let mut files: Vec<_> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .is_some_and(|e| e.eq_ignore_ascii_case("json") || e.eq_ignore_ascii_case("qplib"))
        })
        .collect();
    files.sort();
    Ok(files)
}

pub(super) fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let rows: Vec<BenchRow> = instance_files(&args.dir)?
        .par_iter()
        .map(|path| BenchRow {
            name: path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            cells: bench_one(path, args),
        })
        .collect();
    let header = ["name", "n", "m", "MA ms", "PLE ms", "obj", "brute_obj", "gap"];
    let mut out = header.join("\t");
    out.push('\n');
    for row in &rows {
        match &row.cells {
            Ok(cells) => {
                let _ = writeln!(out, "{}\t{}", row.name, cells.join("\t"));
            }
            Err(kind) => {
                let _ = writeln!(out, "{}\t{kind}\t-\t-\t-\t-\t-\t-", row.name);
            }
        }
    }
    print!("{out}");
    Ok(())
}
