//! Argument parsing and dispatch for the `fqprod` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use fqprod_core::product::FkOptions;
use fqprod_core::sumset::DEFAULT_SEARCH_CAP;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::commands::{self, MRow};
use crate::{config, config_err, verify, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "fqprod", version, about = "Product representations by polynomial values over finite fields")]
pub struct Cli {
    /// Append-only JSON-lines result cache.
    #[arg(long, global = true)]
    pub cache: Option<PathBuf>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output format for tabular results.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Recompute cache hits and fail if they differ from the stored payload.
    #[arg(long, global = true)]
    pub recheck: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modulus, generator and table backend of F_{p^m}.
    FieldInfo {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
    },
    /// Factorization and the decomposition h = C·f^ℓ.
    PowerPart {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Coefficients c0,c1,…; extension-field coefficients as a:b:….
        #[arg(long)]
        h: String,
    },
    /// The image h(F_q).
    ValueSet {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        h: String,
    },
    /// Weil bound check, one line per (f, χ) with the worst a.
    WeilVerify {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        deg: usize,
        /// Check one polynomial instead of every monic one of degree --deg.
        #[arg(long)]
        h: Option<String>,
    },
    /// Exact m(k, n; s) with a witness.
    MExact {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        s: u64,
    },
    /// m(k, n; s) for all n ≤ n-max and all s, with bound checks.
    MTable {
        #[arg(long)]
        k: u64,
        /// Also include every k up to this value.
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        n_max: u64,
    },
    /// Exact F_k(q; h), or a bracket beyond the search caps.
    FkExact {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        node_limit: Option<u64>,
    },
    /// The coset-union lower bound for F_k(q; h).
    FkConstruct {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: u64,
    },
    /// F_k(q; x^L) for every prime power q ≤ q-max.
    FkSweep {
        /// Polynomial family, currently only x^L.
        #[arg(long)]
        h_family: String,
        #[arg(long)]
        k: u64,
        #[arg(long)]
        q_max: u64,
    },
    /// Distance from a star set to the nearest admissible coset union.
    StructureDistance {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        h: String,
        #[arg(long)]
        k: u64,
        /// Discrete logs of the set; defaults to the exact search witness.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<u64>>,
    },
    /// Progression star set for αx² - 1 over F_{p²}.
    Remark3 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: u64,
    },
    /// Progression star set for αx^m - 1 over F_{p^m}, p ≡ 1 (mod m).
    Remark4 {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u64,
    },
    /// Run the acceptance criteria and print a pass/fail matrix.
    VerifyAll {
        /// Criterion numbers or groups: zn, chars, fk, constructions, determinism.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
    },
    /// Run the sweeps described by a TOML config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(" "),
        other => other.to_string(),
    }
}

/// Writes rows as JSON lines or as CSV with columns in field order.
pub fn emit<T: Serialize>(out: &mut dyn Write, rows: &[T], format: Format) -> Result<(), Failure> {
    let values: Vec<Value> = rows
        .iter()
        .map(|r| serde_json::to_value(r).map_err(config_err))
        .collect::<Result<_, _>>()?;
    match format {
        Format::Json => {
            for v in &values {
                writeln!(out, "{v}").map_err(config_err)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for (i, v) in values.iter().enumerate() {
                let Value::Object(map) = v else {
                    return Err(Failure::Config("CSV rows must be objects".into()));
                };
                if i == 0 {
                    w.write_record(map.keys()).map_err(config_err)?;
                }
                w.write_record(map.values().map(cell)).map_err(config_err)?;
            }
            w.flush().map_err(config_err)?;
        }
    }
    Ok(())
}

fn open_cache(cli: &Cli) -> Result<Cache, Failure> {
    match &cli.cache {
        Some(path) => Cache::open(path, cli.recheck),
        None => Ok(Cache::disabled()),
    }
}

/// Cached `m(k, n; s)` cells, computed in parallel and stored in order.
pub fn m_rows(cache: &mut Cache, cells: &[(u64, u64, u64)], cap: u64) -> Result<Vec<MRow>, Failure> {
    use rayon::prelude::*;
    let key = |&(k, n, s): &(u64, u64, u64)| json!({ "k": k, "n": n, "s": s, "cap": cap });
    let shared: &Cache = cache;
    let fresh: Vec<Option<MRow>> = cells
        .par_iter()
        .map(|c| {
            let hit = shared.get(&crate::cache::fingerprint("m", &key(c))).is_some();
            (!hit || shared.rechecking())
                .then(|| commands::m_row(c.0, c.1, c.2, cap))
                .transpose()
        })
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(cells.len());
    for (c, row) in cells.iter().zip(fresh) {
        let v = cache.get_or_compute("m", &key(c), || {
            let row = row.ok_or_else(|| Failure::Assertion("cache hit without payload".into()))?;
            serde_json::to_value(row).map_err(config_err)
        })?;
        rows.push(serde_json::from_value(v).map_err(|e| Failure::Assertion(format!("cached m record: {e}")))?);
    }
    Ok(rows)
}

fn assert_clean(violations: Vec<String>) -> Result<(), Failure> {
    match violations.into_iter().next() {
        None => Ok(()),
        Some(v) => Err(Failure::Assertion(v)),
    }
}

fn fk_options(node_limit: Option<u64>) -> FkOptions {
    let mut opts = FkOptions::default();
    if let Some(l) = node_limit {
        opts.node_limit = l;
    }
    opts
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    if let Some(t) = cli.threads {
        // Fails only if a global pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let json_out = |out: &mut dyn Write, v: &Value| -> Result<(), Failure> {
        emit(out, std::slice::from_ref(v), cli.format.unwrap_or(Format::Json))
    };
    match &cli.command {
        Command::FieldInfo { p, m } => {
            let field = commands::field_pm(*p, *m)?;
            json_out(out, &commands::field_info(&field))
        }
        Command::PowerPart { p, m, h } => {
            let field = commands::field_pm(*p, *m)?;
            let h = commands::parse_poly(&field, h)?;
            json_out(out, &commands::power_part_info(&field, &h)?)
        }
        Command::ValueSet { p, m, h } => {
            let field = commands::field_pm(*p, *m)?;
            let h = commands::parse_poly(&field, h)?;
            json_out(out, &commands::value_set_info(&field, &h))
        }
        Command::WeilVerify { q, deg, h } => {
            let field = commands::field_q(*q)?;
            let only = h.as_deref().map(|t| commands::parse_poly(&field, t)).transpose()?;
            let rows = commands::weil_rows(&field, *deg, only.as_ref())?;
            emit(out, &rows, cli.format.unwrap_or(Format::Json))?;
            assert_clean(
                rows.iter()
                    .filter(|r| !r.pass)
                    .map(|r| format!("Weil bound fails for f = {}, χ_{}, a = {}", r.f, r.char_index, r.a))
                    .collect(),
            )
        }
        Command::MExact { k, n, s } => {
            let mut cache = open_cache(cli)?;
            let rows = m_rows(&mut cache, &[(*k, *n, *s)], DEFAULT_SEARCH_CAP)?;
            if rows[0].value.is_none() {
                return Err(Failure::Config(format!("n = {n} exceeds the search cap {DEFAULT_SEARCH_CAP}")));
            }
            emit(out, &rows, cli.format.unwrap_or(Format::Json))?;
            assert_clean(rows[0].violations())
        }
        Command::MTable { k, k_max, n_max } => {
            let mut cache = open_cache(cli)?;
            if *k < 2 {
                return Err(Failure::Config(format!("k = {k} must be at least 2")));
            }
            let cells = commands::m_cells((*k, k_max.unwrap_or(*k)), (1, *n_max));
            let rows = m_rows(&mut cache, &cells, DEFAULT_SEARCH_CAP)?;
            emit(out, &rows, cli.format.unwrap_or(Format::Csv))?;
            assert_clean(rows.iter().flat_map(MRow::violations).collect())
        }
        Command::FkExact { p, m, h, k, node_limit } => {
            let field = commands::field_pm(*p, *m)?;
            let h = commands::parse_poly(&field, h)?;
            let opts = fk_options(*node_limit);
            let mut cache = open_cache(cli)?;
            let inputs = json!({
                "p": p, "m": m, "modulus": field.modulus(), "h": h.format(&field), "k": k,
                "node_limit": opts.node_limit,
            });
            let v = cache.get_or_compute("fk", &inputs, || {
                serde_json::to_value(commands::fk_exact_report(&field, &h, *k, &opts)?).map_err(config_err)
            })?;
            json_out(out, &v)
        }
        Command::FkConstruct { p, m, h, k } => {
            let field = commands::field_pm(*p, *m)?;
            let h = commands::parse_poly(&field, h)?;
            let r = commands::fk_construct_report(&field, &h, *k)?;
            json_out(out, &serde_json::to_value(r).map_err(config_err)?)
        }
        Command::FkSweep { h_family, k, q_max } => {
            let ell = commands::parse_monomial_family(h_family)?;
            let rows = commands::fk_sweep(ell, *k, *q_max, &FkOptions::default())?;
            emit(out, &rows, cli.format.unwrap_or(Format::Csv))
        }
        Command::StructureDistance { p, m, h, k, set } => {
            let field = commands::field_pm(*p, *m)?;
            let h = commands::parse_poly(&field, h)?;
            let v = commands::structure_info(&field, &h, *k, set.as_deref(), &FkOptions::default())?;
            json_out(out, &v)
        }
        Command::Remark3 { p, k } => {
            let (v, passed) = commands::remark3(*p, *k)?;
            json_out(out, &v)?;
            assert_clean(if passed { vec![] } else { vec![format!("construction fails for p = {p}, k = {k}")] })
        }
        Command::Remark4 { p, m, k } => {
            let (v, passed) = commands::remark4(*p, *m, *k)?;
            json_out(out, &v)?;
            assert_clean(if passed { vec![] } else { vec![format!("construction fails for p = {p}, m = {m}, k = {k}")] })
        }
        Command::VerifyAll { only } => {
            let ids = verify::select(only)?;
            let mut cache = open_cache(cli)?;
            let report = verify::verify_with(&ids, &mut cache, &mut |o| {
                let _ = writeln!(out, "{}", o.line());
                let _ = out.flush();
            });
            for m in &report.cache_mismatches {
                writeln!(out, "cache FAIL {m}").map_err(config_err)?;
            }
            let passed = report.outcomes.iter().filter(|o| o.passed).count();
            writeln!(out, "{passed}/{} criteria passed", report.outcomes.len()).map_err(config_err)?;
            if report.passed() {
                Ok(())
            } else {
                let first = report
                    .outcomes
                    .iter()
                    .find(|o| !o.passed)
                    .map(|o| format!("criterion {}: {}", o.id, o.detail))
                    .or_else(|| report.cache_mismatches.first().cloned())
                    .unwrap_or_default();
                Err(Failure::Assertion(first))
            }
        }
        Command::Run { config: path } => {
            let mut cfg = config::ExperimentConfig::load(path)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(t) = cli.threads {
                cfg.threads = t;
            }
            let mut cache = open_cache(cli)?;
            let summary = config::run(&cfg, &mut cache, cli.format)?;
            for line in &summary.lines {
                writeln!(out, "{line}").map_err(config_err)?;
            }
            assert_clean(summary.failures)
        }
    }
}
