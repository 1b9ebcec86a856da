//! Report files written by a run.
//!
//! | file | rows |
//! |------|------|
//! | `windows.csv` | one per window: moments, counts, leading fractions and PRs |
//! | `eigenvalues.csv` | one per (window, rank), all N ranks |
//! | `asset_pc_corr.csv` | one per (window, asset, rank ≤ max_rank) |
//! | `null_baselines.json` | null ensemble lists and Marchenko–Pastur bounds |
//! | `run_manifest.json` | configuration, tickers, column lists, conventions |
//!
//! Floats in CSV files use [`crate::format::float`]; undefined values are
//! `NA`. Outputs are assembled in memory, written to temporary names and
//! renamed only after every file is on disk.

use std::fs;
use std::path::PathBuf;

use corrscope_core::nulls::ABS_CORR_PERCENTILE;
use corrscope_core::{mp_bounds, CoefficientMoments, NaiveDate, NullEnsembleStats};
use serde::Serialize;

use crate::cache::tmp_path;
use crate::error::{Error, Result};
use crate::format::{float, opt_float};
use crate::pipeline::{AnalysisOutput, RunConfig};

pub const SCHEMA_VERSION: u32 = 1;

pub const WINDOWS_FILE: &str = "windows.csv";
pub const EIGENVALUES_FILE: &str = "eigenvalues.csv";
pub const ASSET_PC_FILE: &str = "asset_pc_corr.csv";
pub const BASELINES_FILE: &str = "null_baselines.json";
pub const MANIFEST_FILE: &str = "run_manifest.json";

pub const REPORT_FILES: [&str; 5] = [
    WINDOWS_FILE,
    EIGENVALUES_FILE,
    ASSET_PC_FILE,
    BASELINES_FILE,
    MANIFEST_FILE,
];

const EIGENVALUES_COLUMNS: [&str; 6] = [
    "window_index",
    "end_date",
    "rank",
    "eigenvalue",
    "variance_fraction",
    "pr",
];
const ASSET_PC_COLUMNS: [&str; 5] = ["window_index", "asset", "rank", "abs_r", "abs_r_adjusted"];

#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub window_index: usize,
    pub end_date: NaiveDate,
    /// `None` below three assets.
    pub moments: Option<CoefficientMoments>,
    pub eigenvalues: Vec<f64>,
    pub fractions: Vec<f64>,
    pub cumulative: Vec<f64>,
    pub pr: Vec<f64>,
    pub kaiser_count: usize,
    pub scree_count: usize,
    pub scree_exceedances: usize,
    /// `[asset][rank - 1]` for ranks up to `max_rank`.
    pub abs_r: Vec<Vec<f64>>,
    pub abs_r_adjusted: Vec<Vec<Option<f64>>>,
}

pub fn windows_columns(max_rank: usize) -> Vec<String> {
    let mut cols: Vec<String> = [
        "window_index",
        "end_date",
        "mean_r",
        "std_r",
        "skewness_r",
        "kurtosis_r",
        "kaiser_count",
        "scree_count",
        "scree_exceedances",
    ]
    .map(String::from)
    .to_vec();
    for prefix in ["fraction", "cumulative_fraction", "pr"] {
        cols.extend((1..=max_rank).map(|k| format!("{prefix}_{k}")));
    }
    cols
}

fn date(d: NaiveDate) -> String {
    d.to_string()
}

fn csv_bytes(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn windows_csv(reports: &[WindowReport], max_rank: usize) -> Vec<u8> {
    let rows = reports.iter().map(|r| {
        let m = r.moments;
        let mut row = vec![
            r.window_index.to_string(),
            date(r.end_date),
            opt_float(m.map(|m| m.mean)),
            opt_float(m.map(|m| m.std)),
            opt_float(m.and_then(|m| m.skewness)),
            opt_float(m.and_then(|m| m.kurtosis)),
            r.kaiser_count.to_string(),
            r.scree_count.to_string(),
            r.scree_exceedances.to_string(),
        ];
        for series in [&r.fractions, &r.cumulative, &r.pr] {
            row.extend(series[..max_rank].iter().map(|&x| float(x)));
        }
        row
    });
    csv_bytes(&windows_columns(max_rank), rows)
}

pub fn eigenvalues_csv(reports: &[WindowReport]) -> Vec<u8> {
    let rows = reports.iter().flat_map(|r| {
        (0..r.eigenvalues.len()).map(move |k| {
            vec![
                r.window_index.to_string(),
                date(r.end_date),
                (k + 1).to_string(),
                float(r.eigenvalues[k]),
                float(r.fractions[k]),
                float(r.pr[k]),
            ]
        })
    });
    csv_bytes(&EIGENVALUES_COLUMNS.map(String::from), rows)
}

pub fn asset_pc_csv(out: &AnalysisOutput) -> Vec<u8> {
    let rows = out.reports.iter().flat_map(|r| {
        out.meta.iter().enumerate().flat_map(move |(i, m)| {
            r.abs_r[i]
                .iter()
                .zip(&r.abs_r_adjusted[i])
                .enumerate()
                .map(move |(k, (&a, &adj))| {
                    vec![
                        r.window_index.to_string(),
                        m.ticker.clone(),
                        (k + 1).to_string(),
                        float(a),
                        opt_float(adj),
                    ]
                })
        })
    });
    csv_bytes(&ASSET_PC_COLUMNS.map(String::from), rows)
}

#[derive(Serialize)]
struct MpBoundsJson {
    q: f64,
    sigma2: f64,
    gamma_minus: f64,
    gamma_plus: f64,
}

#[derive(Serialize)]
struct BaselinesJson<'a> {
    schema_version: u32,
    null_kind: &'static str,
    n_assets: usize,
    window_len: usize,
    sims: usize,
    master_seed: u64,
    source_digest: Option<String>,
    abs_corr_percentile: f64,
    /// `None` when `T < N`.
    marchenko_pastur: Option<MpBoundsJson>,
    scree_mean: &'a [f64],
    pr_mean: &'a [f64],
    pr_std: &'a [f64],
    abs_corr_p99: &'a [f64],
}

pub fn baselines_json(stats: &NullEnsembleStats, source_digest: Option<String>) -> Vec<u8> {
    let c = &stats.config;
    let q = c.window_len as f64 / c.n_assets as f64;
    let marchenko_pastur = mp_bounds(q, 1.0).ok().map(|b| MpBoundsJson {
        q: b.q,
        sigma2: b.sigma2,
        gamma_minus: b.gamma_minus,
        gamma_plus: b.gamma_plus,
    });
    let doc = BaselinesJson {
        schema_version: SCHEMA_VERSION,
        null_kind: c.kind.as_str(),
        n_assets: c.n_assets,
        window_len: c.window_len,
        sims: c.sims,
        master_seed: c.master_seed,
        source_digest,
        abs_corr_percentile: ABS_CORR_PERCENTILE,
        marchenko_pastur,
        scree_mean: &stats.scree_mean,
        pr_mean: &stats.pr_mean,
        pr_std: &stats.pr_std,
        abs_corr_p99: &stats.abs_corr_p99,
    };
    json_bytes(&doc)
}

fn json_bytes(doc: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(doc).expect("report documents serialize");
    v.push(b'\n');
    v
}

#[derive(Serialize)]
struct ManifestConfig<'a> {
    prices: &'a str,
    meta: &'a str,
    window: usize,
    step: usize,
    sims: usize,
    seed: u64,
    null: &'static str,
    max_rank: usize,
    classes: Option<Vec<&'static str>>,
}

#[derive(Serialize)]
struct ManifestAsset<'a> {
    ticker: &'a str,
    asset_class: &'static str,
}

#[derive(Serialize)]
struct ManifestFile {
    name: &'static str,
    columns: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    generator: String,
    config: ManifestConfig<'a>,
    num_returns: usize,
    num_windows: usize,
    assets: Vec<ManifestAsset<'a>>,
    files: Vec<ManifestFile>,
    conventions: [(&'static str, &'static str); 8],
}

const CONVENTIONS: [(&str, &str); 8] = [
    (
        "float_format",
        "15 significant digits, scientific notation; exact zero written as 0",
    ),
    ("undefined", "NA"),
    ("rank", "1-based, descending eigenvalue order"),
    ("end_date", "date of the last return in the window"),
    ("standard_deviation", "population (divide by T)"),
    ("kurtosis", "fourth standardized central moment, not excess"),
    (
        "eigenvector_sign",
        "entry sum positive; largest-magnitude entry positive when the sum vanishes",
    ),
    (
        "abs_r_adjusted",
        "component rebuilt without the asset itself; NA when it has no spread",
    ),
];

pub fn manifest_json(out: &AnalysisOutput, config: &RunConfig) -> Vec<u8> {
    let doc = Manifest {
        schema_version: SCHEMA_VERSION,
        generator: format!("corrscope {}", env!("CARGO_PKG_VERSION")),
        config: ManifestConfig {
            prices: config.prices_path.to_str().unwrap_or("<non-utf8>"),
            meta: config.meta_path.to_str().unwrap_or("<non-utf8>"),
            window: config.window,
            step: config.step,
            sims: config.sims,
            seed: config.master_seed,
            null: config.null_kind.as_str(),
            max_rank: config.max_rank,
            classes: config
                .classes
                .as_ref()
                .map(|cs| cs.iter().map(|c| c.as_str()).collect()),
        },
        num_returns: out.num_returns,
        num_windows: out.reports.len(),
        assets: out
            .meta
            .iter()
            .map(|m| ManifestAsset {
                ticker: &m.ticker,
                asset_class: m.asset_class.as_str(),
            })
            .collect(),
        files: vec![
            ManifestFile {
                name: WINDOWS_FILE,
                columns: windows_columns(config.max_rank),
            },
            ManifestFile {
                name: EIGENVALUES_FILE,
                columns: EIGENVALUES_COLUMNS.map(String::from).to_vec(),
            },
            ManifestFile {
                name: ASSET_PC_FILE,
                columns: ASSET_PC_COLUMNS.map(String::from).to_vec(),
            },
            ManifestFile {
                name: BASELINES_FILE,
                columns: Vec::new(),
            },
        ],
        conventions: CONVENTIONS,
    };
    json_bytes(&doc)
}

/// Renders all five report files.
pub fn render(out: &AnalysisOutput, config: &RunConfig) -> Vec<(&'static str, Vec<u8>)> {
    vec![
        (WINDOWS_FILE, windows_csv(&out.reports, config.max_rank)),
        (EIGENVALUES_FILE, eigenvalues_csv(&out.reports)),
        (ASSET_PC_FILE, asset_pc_csv(out)),
        (
            BASELINES_FILE,
            baselines_json(&out.baseline, out.baseline_key.source_digest.clone()),
        ),
        (MANIFEST_FILE, manifest_json(out, config)),
    ]
}

/// Writes the report files into `config.output_dir`. Either every file is
/// replaced or none is left behind.
pub fn emit_reports(out: &AnalysisOutput, config: &RunConfig) -> Result<Vec<PathBuf>> {
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = render(out, config);
    let targets: Vec<PathBuf> = files.iter().map(|(name, _)| dir.join(name)).collect();
    let tmps: Vec<PathBuf> = targets.iter().map(|p| tmp_path(p)).collect();

    let discard = |paths: &[PathBuf]| {
        for p in paths {
            let _ = fs::remove_file(p);
        }
    };
    for (i, ((_, bytes), tmp)) in files.iter().zip(&tmps).enumerate() {
        if let Err(e) = fs::write(tmp, bytes) {
            discard(&tmps[..=i]);
            return Err(Error::io(tmp, e));
        }
    }
    for (i, (tmp, target)) in tmps.iter().zip(&targets).enumerate() {
        if let Err(e) = fs::rename(tmp, target) {
            discard(&targets[..i]);
            discard(&tmps[i..]);
            return Err(Error::io(target, e));
        }
    }
    Ok(targets)
}
