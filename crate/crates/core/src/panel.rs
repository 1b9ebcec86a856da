//! Price and return panels, standardized rolling windows and asset-class
//! subsetting.
//!
//! Panels are asset-major: row `i` holds the full time series of asset `i`
//! and columns follow the date axis.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssetClass {
    Equities,
    GovBonds,
    CorpBonds,
    Currencies,
    Metals,
    Fuels,
    Commodities,
}

impl AssetClass {
    pub const ALL: [AssetClass; 7] = [
        AssetClass::Equities,
        AssetClass::GovBonds,
        AssetClass::CorpBonds,
        AssetClass::Currencies,
        AssetClass::Metals,
        AssetClass::Fuels,
        AssetClass::Commodities,
    ];

    /// The exact token used in metadata files.
    pub fn as_str(self) -> &'static str {
        match self {
            AssetClass::Equities => "equities",
            AssetClass::GovBonds => "gov_bonds",
            AssetClass::CorpBonds => "corp_bonds",
            AssetClass::Currencies => "currencies",
            AssetClass::Metals => "metals",
            AssetClass::Fuels => "fuels",
            AssetClass::Commodities => "commodities",
        }
    }
}

impl fmt::Display for AssetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AssetClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AssetClass::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownAssetClass(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetMeta {
    pub ticker: String,
    pub asset_class: AssetClass,
}

impl AssetMeta {
    pub fn new(ticker: impl Into<String>, asset_class: AssetClass) -> Self {
        Self {
            ticker: ticker.into(),
            asset_class,
        }
    }
}

fn validate_meta(meta: &[AssetMeta]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for (index, m) in meta.iter().enumerate() {
        if m.ticker.is_empty() {
            return Err(Error::EmptyTicker { index });
        }
        if !seen.insert(m.ticker.as_str()) {
            return Err(Error::DuplicateTicker(m.ticker.clone()));
        }
    }
    Ok(())
}

fn validate_dates(dates: &[NaiveDate]) -> Result<()> {
    match dates.windows(2).position(|w| w[1] <= w[0]) {
        Some(p) => Err(Error::DatesNotIncreasing { row: p + 1 }),
        None => Ok(()),
    }
}

fn check_shape(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { what, expected, found });
    }
    Ok(())
}

/// Weekly dates starting Friday 2000-01-07, used to stamp synthetic panels.
pub fn synthetic_weekly_dates(count: usize) -> Vec<NaiveDate> {
    let origin = NaiveDate::from_ymd_opt(2000, 1, 7).expect("valid origin date");
    (0..count)
        .map(|k| origin.checked_add_days(Days::new(7 * k as u64)).expect("date in range"))
        .collect()
}

/// Validated N x (L+1) panel of strictly positive prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    dates: Vec<NaiveDate>,
    prices: Matrix,
    meta: Vec<AssetMeta>,
}

impl PricePanel {
    pub fn new(dates: Vec<NaiveDate>, prices: Matrix, meta: Vec<AssetMeta>) -> Result<Self> {
        check_shape("price rows vs asset metadata", meta.len(), prices.rows())?;
        check_shape("price columns vs dates", dates.len(), prices.cols())?;
        validate_meta(&meta)?;
        validate_dates(&dates)?;
        for (i, row) in prices.iter_rows().enumerate() {
            if let Some(t) = row.iter().position(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(Error::InvalidPrice {
                    row: t,
                    ticker: meta[i].ticker.clone(),
                    value: row[t],
                });
            }
        }
        Ok(Self { dates, prices, meta })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &Matrix {
        &self.prices
    }

    pub fn meta(&self) -> &[AssetMeta] {
        &self.meta
    }

    pub fn n_assets(&self) -> usize {
        self.meta.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    /// Keeps the listed assets in the given order.
    pub fn select_assets(&self, indices: &[usize]) -> PricePanel {
        PricePanel {
            dates: self.dates.clone(),
            prices: self.prices.select_rows(indices),
            meta: indices.iter().map(|&i| self.meta[i].clone()).collect(),
        }
    }
}

/// N x L panel of log returns. `dates[t]` is the date of the price that
/// closes return `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    dates: Vec<NaiveDate>,
    returns: Matrix,
    meta: Vec<AssetMeta>,
}

impl ReturnPanel {
    pub fn new(dates: Vec<NaiveDate>, returns: Matrix, meta: Vec<AssetMeta>) -> Result<Self> {
        check_shape("return rows vs asset metadata", meta.len(), returns.rows())?;
        check_shape("return columns vs dates", dates.len(), returns.cols())?;
        validate_meta(&meta)?;
        validate_dates(&dates)?;
        for (i, row) in returns.iter_rows().enumerate() {
            if let Some(t) = row.iter().position(|z| !z.is_finite()) {
                return Err(Error::NonFinite {
                    what: "return",
                    row: i,
                    col: t,
                });
            }
        }
        Ok(Self { dates, returns, meta })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn returns(&self) -> &Matrix {
        &self.returns
    }

    pub fn meta(&self) -> &[AssetMeta] {
        &self.meta
    }

    pub fn n_assets(&self) -> usize {
        self.meta.len()
    }

    /// Number of returns per asset (L).
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn select_assets(&self, indices: &[usize]) -> ReturnPanel {
        ReturnPanel {
            dates: self.dates.clone(),
            returns: self.returns.select_rows(indices),
            meta: indices.iter().map(|&i| self.meta[i].clone()).collect(),
        }
    }

    /// Rebuilds prices by exp-cumulating from `initial` prices dated
    /// `first_date`.
    pub fn cumulate(&self, first_date: NaiveDate, initial: &[f64]) -> Result<PricePanel> {
        check_shape("initial prices vs assets", self.n_assets(), initial.len())?;
        let l = self.len();
        let mut prices = Matrix::zeros(self.n_assets(), l + 1);
        for (i, &p0) in initial.iter().enumerate() {
            let z = self.returns.row(i);
            let row = prices.row_mut(i);
            row[0] = p0;
            let mut acc = 0.0;
            for t in 0..l {
                acc += z[t];
                row[t + 1] = p0 * libm::exp(acc);
            }
        }
        let mut dates = Vec::with_capacity(l + 1);
        dates.push(first_date);
        dates.extend_from_slice(&self.dates);
        PricePanel::new(dates, prices, self.meta.clone())
    }
}

/// `z_i(t) = ln(p_i(t+1) / p_i(t))` for every asset.
pub fn compute_log_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    let n_dates = panel.n_dates();
    if n_dates < 2 {
        return Err(Error::TooFewDates {
            found: n_dates,
            required: 2,
        });
    }
    let l = n_dates - 1;
    let mut returns = Matrix::zeros(panel.n_assets(), l);
    for i in 0..panel.n_assets() {
        let p = panel.prices.row(i);
        for (t, z) in returns.row_mut(i).iter_mut().enumerate() {
            *z = libm::log(p[t + 1] / p[t]);
        }
    }
    ReturnPanel::new(panel.dates[1..].to_vec(), returns, panel.meta.clone())
}

/// One standardized slice of a return panel: every row has zero mean and
/// unit population standard deviation over the window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowView {
    pub window_index: usize,
    /// Column of the return panel where the window starts.
    pub start: usize,
    pub end_date: NaiveDate,
    pub z_hat: Matrix,
}

impl WindowView {
    pub fn n_assets(&self) -> usize {
        self.z_hat.rows()
    }

    /// Window length T.
    pub fn len(&self) -> usize {
        self.z_hat.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.z_hat.cols() == 0
    }
}

/// Standardizes `returns[.., start..start + window]` row by row.
pub fn standardize_window(
    returns: &ReturnPanel,
    start: usize,
    window: usize,
    window_index: usize,
) -> Result<WindowView> {
    if window < 2 {
        return Err(Error::WindowTooShort { window });
    }
    let available = returns.len();
    if start + window > available {
        return Err(Error::WindowOutOfRange {
            start,
            window,
            available,
        });
    }
    let n = returns.n_assets();
    let mut z_hat = Matrix::zeros(n, window);
    for i in 0..n {
        let src = &returns.returns.row(i)[start..start + window];
        let dst = z_hat.row_mut(i);
        standardize_into(src, dst).ok_or_else(|| Error::ZeroVariance {
            window_index,
            asset: i,
            ticker: returns.meta[i].ticker.clone(),
        })?;
    }
    Ok(WindowView {
        window_index,
        start,
        end_date: returns.dates[start + window - 1],
        z_hat,
    })
}

/// Writes the standardized copy of `src` into `dst`. `None` when the series
/// has no spread relative to its magnitude.
pub(crate) fn standardize_into(src: &[f64], dst: &mut [f64]) -> Option<()> {
    let t = src.len() as f64;
    let mean = src.iter().sum::<f64>() / t;
    let var = src.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / t;
    let sd = libm::sqrt(var);
    let scale = src.iter().fold(0.0_f64, |m, z| m.max(z.abs()));
    if sd.is_nan() || sd <= 4.0 * f64::EPSILON * scale {
        return None;
    }
    for (d, z) in dst.iter_mut().zip(src) {
        *d = (z - mean) / sd;
    }
    Some(())
}

/// Lazily materialized rolling windows; see [`roll_windows`].
#[derive(Debug, Clone)]
pub struct Windows<'a> {
    returns: &'a ReturnPanel,
    window: usize,
    step: usize,
    count: usize,
    next: usize,
}

impl<'a> Windows<'a> {
    /// Window length T.
    pub fn window_len(&self) -> usize {
        self.window
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Total number of windows, independent of iteration progress.
    pub fn count_total(&self) -> usize {
        self.count
    }

    pub fn start_of(&self, index: usize) -> usize {
        index * self.step
    }

    /// Random access to window `index`.
    pub fn get(&self, index: usize) -> Result<WindowView> {
        if index >= self.count {
            return Err(Error::WindowOutOfRange {
                start: self.start_of(index),
                window: self.window,
                available: self.returns.len(),
            });
        }
        standardize_window(self.returns, self.start_of(index), self.window, index)
    }
}

impl Iterator for Windows<'_> {
    type Item = Result<WindowView>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.next >= self.count {
            return None;
        }
        let k = self.next;
        self.next += 1;
        Some(self.get(k))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.count - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Windows<'_> {}

/// Windows of `window` returns starting at `0, step, 2 step, ...`;
/// `floor((L - T) / step) + 1` of them.
pub fn roll_windows(returns: &ReturnPanel, window: usize, step: usize) -> Result<Windows<'_>> {
    if step == 0 {
        return Err(Error::ZeroStep);
    }
    if window < 2 {
        return Err(Error::WindowTooShort { window });
    }
    let available = returns.len();
    if window > available {
        return Err(Error::WindowOutOfRange {
            start: 0,
            window,
            available,
        });
    }
    let count = (available - window) / step + 1;
    Ok(Windows {
        returns,
        window,
        step,
        count,
        next: 0,
    })
}

/// Indices of the assets whose class is in `classes`, in panel order.
pub fn class_indices(meta: &[AssetMeta], classes: &[AssetClass]) -> Vec<usize> {
    meta.iter()
        .enumerate()
        .filter(|(_, m)| classes.contains(&m.asset_class))
        .map(|(i, _)| i)
        .collect()
}

pub fn subset_by_class(panel: &PricePanel, classes: &[AssetClass]) -> Result<PricePanel> {
    if classes.is_empty() {
        return Err(Error::EmptyClassSelection);
    }
    let keep = class_indices(panel.meta(), classes);
    if keep.len() < 2 {
        return Err(Error::TooFewAssets { found: keep.len() });
    }
    Ok(panel.select_assets(&keep))
}
