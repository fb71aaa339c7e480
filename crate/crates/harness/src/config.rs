//! Sweep configuration files (TOML) and the runner behind `fqprod run`.
//!
//! ```toml
//! seed = 7
//! threads = 0            # 0: all cores
//!
//! [output]
//! dir = "results"        # one file per section; omit to print only the summary
//! format = "csv"         # csv | json
//!
//! [caps]
//! search_n = 28
//! fk_pairs = 64
//! fk_higher = 32
//! node_limit = 50000000
//!
//! [m_table]
//! k = [2, 6]             # inclusive ranges
//! n = [1, 18]
//!
//! [weil]
//! q = [5, 7, 9]
//! deg = [2, 3]
//!
//! [fk_sweep]
//! ell = 3
//! k = 2
//! q_max = 61
//!
//! [representation]
//! q = [7, 11, 13]
//! deg = [2, 3]
//! samples = 1000
//! ```

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use fqprod_core::arith::prime_power;
use fqprod_core::character::{representation_threshold_check, CharError};
use fqprod_core::product::FkOptions;
use fqprod_core::{FieldElement, Poly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cache::Cache;
use crate::cli::{emit, m_rows, Format};
use crate::commands::{self, MRow};
use crate::{config_err, Failure};

/// Largest `q` accepted in `weil` and `representation` grids.
pub const GRID_Q_CAP: u64 = 1024;
/// Largest `q_max` accepted in `fk_sweep`.
pub const SWEEP_Q_CAP: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: usize,
    #[serde(default)]
    pub output: Output,
    #[serde(default)]
    pub caps: Caps,
    pub m_table: Option<MTableGrid>,
    pub weil: Option<WeilGrid>,
    pub fk_sweep: Option<SweepGrid>,
    pub representation: Option<RepresentationGrid>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub search_n: u64,
    pub fk_pairs: u64,
    pub fk_higher: u64,
    pub node_limit: u64,
}

impl Default for Caps {
    fn default() -> Self {
        let fk = FkOptions::default();
        Caps {
            search_n: fqprod_core::sumset::DEFAULT_SEARCH_CAP,
            fk_pairs: fk.cap_pairs,
            fk_higher: fk.cap_higher,
            node_limit: fk.node_limit,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MTableGrid {
    pub k: [u64; 2],
    pub n: [u64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeilGrid {
    pub q: Vec<u64>,
    pub deg: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub ell: u64,
    pub k: u64,
    pub q_max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationGrid {
    pub q: Vec<u64>,
    pub deg: Vec<usize>,
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let bad = |msg: String| Err(Failure::Config(msg));
        if self.caps.search_n == 0 || self.caps.search_n > 64 {
            return bad(format!("caps.search_n = {} outside 1..=64", self.caps.search_n));
        }
        if self.caps.fk_pairs > 65 || self.caps.fk_higher > 65 {
            return bad("fk caps may not exceed 65".into());
        }
        if let Some(g) = &self.m_table {
            if g.k[0] < 2 {
                return bad(format!("m_table.k starts at {} < 2", g.k[0]));
            }
            if g.n[1] > self.caps.search_n {
                return bad(format!("m_table.n ends at {} > caps.search_n", g.n[1]));
            }
        }
        let check_qs = |qs: &[u64], section: &str| -> Result<(), Failure> {
            for &q in qs {
                if prime_power(q).is_none() || q > GRID_Q_CAP {
                    return Err(Failure::Config(format!("{section}.q contains {q}")));
                }
            }
            Ok(())
        };
        if let Some(g) = &self.weil {
            check_qs(&g.q, "weil")?;
            if g.deg.contains(&0) {
                return bad("weil.deg must be positive".into());
            }
        }
        if let Some(g) = &self.representation {
            check_qs(&g.q, "representation")?;
            if g.deg.iter().any(|&d| d < 2) {
                return bad("representation.deg must be at least 2".into());
            }
        }
        if let Some(g) = &self.fk_sweep {
            if g.k < 2 || g.ell == 0 || g.q_max > SWEEP_Q_CAP {
                return bad(format!("fk_sweep parameters out of range: {g:?}"));
            }
        }
        Ok(())
    }

    fn fk_options(&self) -> FkOptions {
        FkOptions {
            cap_pairs: self.caps.fk_pairs,
            cap_higher: self.caps.fk_higher,
            node_limit: self.caps.node_limit,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunSummary {
    pub lines: Vec<String>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
struct RepresentationRow {
    q: u64,
    deg: usize,
    samples: usize,
    skipped: usize,
    above_threshold: usize,
    violations: usize,
}

fn write_rows<T: Serialize>(cfg: &ExperimentConfig, name: &str, rows: &[T], format: Format) -> Result<(), Failure> {
    let Some(dir) = &cfg.output.dir else {
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(config_err)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "jsonl",
    };
    let path = dir.join(format!("{name}.{ext}"));
    let mut file = File::create(&path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    emit(&mut file, rows, format)
}

fn representation_rows(g: &RepresentationGrid, seed: u64) -> Result<Vec<RepresentationRow>, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &q in &g.q {
        let field = commands::field_q(q)?;
        for &deg in &g.deg {
            let mut row = RepresentationRow {
                q,
                deg,
                samples: g.samples,
                skipped: 0,
                above_threshold: 0,
                violations: 0,
            };
            for _ in 0..g.samples {
                let mut coeffs: Vec<FieldElement> = (0..deg)
                    .map(|_| field.element(rng.random_range(0..q)).expect("in range"))
                    .collect();
                coeffs.push(field.one());
                let f = Poly::new(coeffs);
                let density: f64 = rng.random_range(0.2..1.0);
                let a: Vec<FieldElement> = field.units().filter(|_| rng.random_bool(density)).collect();
                let b: Vec<FieldElement> = field.units().filter(|_| rng.random_bool(density)).collect();
                match representation_threshold_check(&field, &f, &a, &b) {
                    Ok(rep) => {
                        row.above_threshold += rep.above_threshold as usize;
                        row.violations += !rep.implication_holds as usize;
                    }
                    Err(CharError::HypothesisViolated(_)) => row.skipped += 1,
                    Err(e) => return Err(config_err(e)),
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Runs every section present in the config, writing one output file per
/// section and collecting assertion failures.
pub fn run(cfg: &ExperimentConfig, cache: &mut Cache, format: Option<Format>) -> Result<RunSummary, Failure> {
    cfg.validate()?;
    if cfg.threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let format = format.or(cfg.output.format).unwrap_or(Format::Csv);
    let mut summary = RunSummary::default();

    if let Some(g) = &cfg.m_table {
        let cells = commands::m_cells((g.k[0], g.k[1]), (g.n[0], g.n[1]));
        let rows = m_rows(cache, &cells, cfg.caps.search_n)?;
        let violations: Vec<String> = rows.iter().flat_map(MRow::violations).collect();
        summary.lines.push(format!(
            "m_table    {:>6} cells  {:>4} violations",
            rows.len(),
            violations.len()
        ));
        summary.failures.extend(violations);
        write_rows(cfg, "m_table", &rows, format)?;
    }
    if let Some(g) = &cfg.weil {
        let mut rows = Vec::new();
        for &q in &g.q {
            let field = commands::field_q(q)?;
            for &deg in &g.deg {
                rows.extend(commands::weil_rows(&field, deg, None)?);
            }
        }
        let bad: Vec<String> = rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("Weil bound fails: q={} f={} chi_{}", r.q, r.f, r.char_index))
            .collect();
        summary.lines.push(format!("weil       {:>6} rows   {:>4} violations", rows.len(), bad.len()));
        summary.failures.extend(bad);
        write_rows(cfg, "weil", &rows, format)?;
    }
    if let Some(g) = &cfg.fk_sweep {
        let rows = commands::fk_sweep(g.ell, g.k, g.q_max, &cfg.fk_options())?;
        let exact = rows.iter().filter(|r| r.mode == fqprod_core::product::FkMode::Exact).count();
        summary.lines.push(format!("fk_sweep   {:>6} rows   {:>4} exact", rows.len(), exact));
        write_rows(cfg, "fk_sweep", &rows, format)?;
    }
    if let Some(g) = &cfg.representation {
        let rows = representation_rows(g, cfg.seed)?;
        let violations: usize = rows.iter().map(|r| r.violations).sum();
        summary.lines.push(format!(
            "repr       {:>6} rows   {:>4} violations",
            rows.len(),
            violations
        ));
        for r in rows.iter().filter(|r| r.violations > 0) {
            summary
                .failures
                .push(format!("representation check fails {} times at q={} deg={}", r.violations, r.q, r.deg));
        }
        write_rows(cfg, "representation", &rows, format)?;
    }
    Ok(summary)
}
