use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::{approximate_alwdr, edge_lp_value, instance_digest, ratio, Algorithm, DriverCaps, DriverError, RunRecord};
use crate::instance::{format_rational, segment_map, Instance};
use crate::oracle::{brute_force_optimal, fpt_exact};
use crate::Rational;

pub const CSV_HEADER: &str = "instance,digest,algorithm,delta,gamma,eps,seed,lp_value,weight,oracle,ratio_lp,ratio_oracle,wall_ms,phase_weights,error";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub algorithms: Vec<Algorithm>,
    pub seeds: Vec<u64>,
    pub eps: Option<Rational>,
    /// Compute the brute-force optimum for every instance.
    pub oracle: bool,
    pub caps: DriverCaps,
}

/// Runs every (instance, algorithm, seed) cell, in parallel.
///
/// Deterministic algorithms (`lp`, `fpt`, `derandomized`) run once per
/// instance with seed 0. A failing cell keeps its row with the error text.
/// Rows come back sorted by instance name, algorithm and seed.
pub fn bench(corpus: &[(String, Instance)], spec: &BenchSpec) -> Vec<RunRecord> {
    let oracles: Vec<Option<Result<Rational, String>>> = corpus
        .par_iter()
        .map(|(_, inst)| {
            spec.oracle.then(|| {
                brute_force_optimal(inst, inst.antennae(), &spec.caps.oracle)
                    .map(|r| r.optimum)
                    .map_err(|e| e.to_string())
            })
        })
        .collect();

    let mut cells = Vec::new();
    for (i, _) in corpus.iter().enumerate() {
        for &a in &spec.algorithms {
            let seeds: &[u64] = if matches!(a, Algorithm::PathRounding | Algorithm::Collective) {
                &spec.seeds
            } else {
                &[0]
            };
            for &seed in seeds {
                cells.push((i, a, seed));
            }
        }
    }
    let mut rows: Vec<RunRecord> = cells
        .into_par_iter()
        .map(|(i, a, seed)| {
            let (name, inst) = &corpus[i];
            let mut rec = run_cell(inst, a, seed, spec);
            rec.instance = name.clone();
            match &oracles[i] {
                Some(Ok(opt)) => {
                    rec.oracle = Some(format_rational(opt));
                    if let Some(w) = rec.weight.as_deref().and_then(parse_q) {
                        rec.ratio_oracle = Some(ratio(&w, opt));
                    }
                }
                Some(Err(e)) => {
                    let msg = format!("oracle: {e}");
                    rec.error = Some(match rec.error.take() {
                        Some(prev) => format!("{prev}; {msg}"),
                        None => msg,
                    });
                }
                None => {}
            }
            rec
        })
        .collect();
    rows.sort_by(|a, b| {
        (&a.instance, &a.algorithm, a.seed).cmp(&(&b.instance, &b.algorithm, b.seed))
    });
    rows
}

fn parse_q(s: &str) -> Option<Rational> {
    s.parse().ok()
}

fn run_cell(inst: &Instance, algorithm: Algorithm, seed: u64, spec: &BenchSpec) -> RunRecord {
    let start = Instant::now();
    let mut rec = RunRecord {
        instance: String::new(),
        digest: instance_digest(inst),
        algorithm: algorithm.name().to_string(),
        delta: inst.antennae(),
        gamma: segment_map(inst).gamma(),
        eps: spec.eps.as_ref().map(format_rational),
        seed,
        lp_value: None,
        weight: None,
        oracle: None,
        ratio_lp: None,
        ratio_oracle: None,
        wall_ms: 0.0,
        phase_weights: String::new(),
        error: None,
    };
    let outcome: Result<(), DriverError> = (|| {
        match algorithm {
            Algorithm::Lp => {
                let lp = edge_lp_value(inst, inst.antennae())?;
                rec.lp_value = Some(format_rational(&lp));
                rec.weight = rec.lp_value.clone();
                rec.ratio_lp = Some(1.0);
            }
            Algorithm::Fpt => {
                let lp = edge_lp_value(inst, inst.antennae())?;
                let opt = fpt_exact(inst, inst.antennae(), spec.caps.fpt)?.optimum;
                rec.lp_value = Some(format_rational(&lp));
                rec.weight = Some(format_rational(&opt));
                rec.ratio_lp = Some(ratio(&opt, &lp));
            }
            _ => {
                let (_, r) = approximate_alwdr(inst, spec.eps.as_ref(), algorithm, seed, &spec.caps)?;
                rec = RunRecord {
                    instance: String::new(),
                    wall_ms: 0.0,
                    ..r
                };
            }
        }
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    rec
}

/// Mean and minimum ratios per algorithm, plus failure counts.
pub fn summarize(rows: &[RunRecord]) -> String {
    #[derive(Default)]
    struct Acc {
        runs: usize,
        failed: usize,
        lp: Vec<f64>,
        oracle: Vec<f64>,
    }
    let mut by_alg: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in rows {
        let acc = by_alg.entry(r.algorithm.as_str()).or_default();
        acc.runs += 1;
        acc.failed += r.error.is_some() as usize;
        acc.lp.extend(r.ratio_lp);
        acc.oracle.extend(r.ratio_oracle);
    }
    let stat = |v: &[f64]| -> String {
        if v.is_empty() {
            return "       -        -".to_string();
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        format!("{mean:8.4} {min:8.4}")
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14} {:>5} {:>6} {:>8} {:>8} {:>8} {:>8}",
        "algorithm", "runs", "failed", "mean/lp", "min/lp", "mean/opt", "min/opt"
    );
    for (name, acc) in &by_alg {
        let _ = writeln!(
            out,
            "{:<14} {:>5} {:>6} {} {}",
            name,
            acc.runs,
            acc.failed,
            stat(&acc.lp),
            stat(&acc.oracle)
        );
    }
    out
}

/// Writes `bench.csv`, `summary.txt` and, when any cell failed,
/// `failures.txt` into `dir`.
pub fn write_report(dir: &Path, rows: &[RunRecord]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(dir.join("bench.csv"))?;
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    fs::write(dir.join("summary.txt"), summarize(rows))?;
    let failures: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            r.error
                .as_ref()
                .map(|e| format!("{} {} seed={}: {}", r.instance, r.algorithm, r.seed, e))
        })
        .collect();
    let manifest = dir.join("failures.txt");
    if failures.is_empty() {
        if manifest.exists() {
            fs::remove_file(manifest)?;
        }
    } else {
        fs::write(manifest, failures.join("\n") + "\n")?;
    }
    Ok(())
}
