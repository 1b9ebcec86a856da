#![allow(dead_code)]

use std::path::{Path, PathBuf};

use corrscope::ingest::{write_meta, write_prices};
use corrscope::RunConfig;
use corrscope_core::{synthetic_factor_panel, AssetClass, AssetMeta, FactorSpec, NullKind, PricePanel};

/// Prices from a two-block factor model, one row per date, with classes
/// assigned round-robin from `classes`.
pub fn factor_prices(n: usize, dates: usize, seed: u64, classes: &[AssetClass]) -> PricePanel {
    let spec = FactorSpec {
        block_sizes: vec![n / 2, n - n / 2],
        loadings: vec![0.7, 0.5],
        noise_std: 0.8,
    };
    let returns = synthetic_factor_panel(&spec, dates - 1, seed).unwrap();
    let first = returns.dates()[0] - chrono::Duration::days(7);
    let initial: Vec<f64> = (0..n).map(|i| 50.0 + i as f64).collect();
    let scaled = corrscope_core::ReturnPanel::new(
        returns.dates().to_vec(),
        corrscope_core::Matrix::from_fn(n, dates - 1, |i, t| 0.02 * returns.returns()[(i, t)]),
        (0..n)
            .map(|i| AssetMeta::new(format!("T{i:02}"), classes[i % classes.len()]))
            .collect(),
    )
    .unwrap();
    scaled.cumulate(first, &initial).unwrap()
}

pub fn write_inputs(dir: &Path, stem: &str, panel: &PricePanel) -> (PathBuf, PathBuf) {
    let prices = dir.join(format!("{stem}_prices.csv"));
    let meta = dir.join(format!("{stem}_meta.csv"));
    write_prices(panel, std::fs::File::create(&prices).unwrap()).unwrap();
    write_meta(panel.meta(), std::fs::File::create(&meta).unwrap()).unwrap();
    (prices, meta)
}

pub fn config(prices: PathBuf, meta: PathBuf, out: PathBuf, window: usize, sims: usize, max_rank: usize) -> RunConfig {
    RunConfig {
        window,
        sims,
        max_rank,
        master_seed: 7,
        null_kind: NullKind::Shuffled,
        ..RunConfig::new(prices, meta, out)
    }
}

pub fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
