//! CSV readers and writers for price panels and asset metadata.
//!
//! Prices: header `date,<ticker>,...`, one row per date (`YYYY-MM-DD`),
//! positive decimal prices. Metadata: header `ticker,asset_class`. Tickers
//! must match between the two files in both directions; asset order follows
//! the prices header.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use corrscope_core::{AssetClass, AssetMeta, Matrix, NaiveDate, PricePanel};

use crate::error::{Error, Result};

pub fn load_price_panel(prices_path: &Path, meta_path: &Path) -> Result<PricePanel> {
    let classes = read_meta(meta_path)?;
    let file = std::fs::File::open(prices_path).map_err(|e| Error::io(prices_path, e))?;
    read_prices(file, prices_path, classes)
}

/// Ticker to class, in file order.
fn read_meta(path: &Path) -> Result<Vec<(String, AssetClass)>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = reader(file);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.len() != 2 || &header[0] != "ticker" || &header[1] != "asset_class" {
        return Err(Error::input(path, "header must be `ticker,asset_class`"));
    }
    let mut out: Vec<(String, AssetClass)> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let at = location(&rec, row + 1);
        if rec.len() != 2 {
            return Err(Error::input(
                path,
                format!("{at}: expected 2 cells, found {}", rec.len()),
            ));
        }
        let ticker = &rec[0];
        if ticker.is_empty() {
            return Err(Error::input(path, format!("{at}: empty ticker")));
        }
        let class: AssetClass = rec[1]
            .parse()
            .map_err(|_| Error::input(path, format!("{at}: unknown asset_class `{}`", &rec[1])))?;
        if out.iter().any(|(t, _)| t == ticker) {
            return Err(Error::input(path, format!("{at}: duplicate ticker `{ticker}`")));
        }
        out.push((ticker.to_owned(), class));
    }
    Ok(out)
}

fn read_prices(src: impl Read, path: &Path, classes: Vec<(String, AssetClass)>) -> Result<PricePanel> {
    let mut rdr = reader(src);
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    if header.get(0) != Some("date") {
        return Err(Error::input(path, "first header cell must be `date`"));
    }
    let tickers: Vec<&str> = header.iter().skip(1).collect();
    if tickers.is_empty() {
        return Err(Error::input(path, "no ticker columns"));
    }

    let lookup: HashMap<&str, AssetClass> = classes.iter().map(|(t, c)| (t.as_str(), *c)).collect();
    let mut meta = Vec::with_capacity(tickers.len());
    for (j, t) in tickers.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::input(path, format!("column {}: empty ticker", j + 2)));
        }
        if tickers[..j].contains(t) {
            return Err(Error::input(path, format!("duplicate ticker `{t}`")));
        }
        let class = lookup
            .get(t)
            .ok_or_else(|| Error::input(path, format!("ticker `{t}` has no asset_class in the metadata file")))?;
        meta.push(AssetMeta::new(*t, *class));
    }
    if let Some((t, _)) = classes.iter().find(|(t, _)| !tickers.contains(&t.as_str())) {
        return Err(Error::input(
            path,
            format!("metadata ticker `{t}` is absent from the prices header"),
        ));
    }

    let n = tickers.len();
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut columns: Vec<f64> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let at = location(&rec, row + 1);
        if rec.len() != n + 1 {
            return Err(Error::input(
                path,
                format!("{at}: missing cell, expected {} cells, found {}", n + 1, rec.len()),
            ));
        }
        let date =
            parse_date(&rec[0]).ok_or_else(|| Error::input(path, format!("{at}: invalid date `{}`", &rec[0])))?;
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(Error::input(path, format!("{at}: date {date} does not follow {prev}")));
            }
        }
        dates.push(date);
        for (j, cell) in rec.iter().skip(1).enumerate() {
            let col = format!("column {} (`{}`)", j + 2, tickers[j]);
            if cell.is_empty() {
                return Err(Error::input(path, format!("{at}, {col}: missing price")));
            }
            let p: f64 = cell
                .parse()
                .map_err(|_| Error::input(path, format!("{at}, {col}: non-numeric price `{cell}`")))?;
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::input(
                    path,
                    format!("{at}, {col}: price must be positive, found `{cell}`"),
                ));
            }
            columns.push(p);
        }
    }

    // rows were read date-major; the panel is asset-major
    let d = dates.len();
    let prices = Matrix::from_fn(n, d, |i, t| columns[t * n + i]);
    PricePanel::new(dates, prices, meta).map_err(|e| Error::input(path, e.to_string()))
}

/// Strict `YYYY-MM-DD`.
fn parse_date(s: &str) -> Option<NaiveDate> {
    let b = s.as_bytes();
    let shape = b.len() == 10 && b[4] == b'-' && b[7] == b'-';
    let digits = b
        .iter()
        .enumerate()
        .all(|(i, c)| i == 4 || i == 7 || c.is_ascii_digit());
    if !(shape && digits) {
        return None;
    }
    s.parse().ok()
}

fn reader<R: Read>(src: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).from_reader(src)
}

fn location(rec: &csv::StringRecord, row: usize) -> String {
    match rec.position() {
        Some(p) => format!("line {} (data row {row})", p.line()),
        None => format!("data row {row}"),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        if let csv::ErrorKind::Io(io) = e.into_kind() {
            return Error::io(path, io);
        }
        unreachable!()
    }
    Error::input(path, e.to_string())
}

/// Writes `panel` in the prices format. Prices use the shortest exact
/// decimal form, so reading the file back reproduces every bit.
pub fn write_prices(panel: &PricePanel, out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut rec = vec!["date".to_owned()];
    rec.extend(panel.meta().iter().map(|m| m.ticker.clone()));
    w.write_record(&rec)?;
    for (t, date) in panel.dates().iter().enumerate() {
        rec.clear();
        rec.push(date.to_string());
        rec.extend((0..panel.n_assets()).map(|i| panel.prices()[(i, t)].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()
}

pub fn write_meta(meta: &[AssetMeta], out: impl Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["ticker", "asset_class"])?;
    for m in meta {
        w.write_record([m.ticker.as_str(), m.asset_class.as_str()])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(prices: &str, meta: &str) -> Result<PricePanel> {
        let dir = tempfile::tempdir().unwrap();
        let (p, m) = (dir.path().join("p.csv"), dir.path().join("m.csv"));
        std::fs::write(&p, prices).unwrap();
        std::fs::write(&m, meta).unwrap();
        load_price_panel(&p, &m)
    }

    const META: &str = "ticker,asset_class\nAAA,equities\nBBB,metals\n";

    #[test]
    fn well_formed_pair() {
        let p = parse(
            "date,BBB,AAA\n2001-01-05,1.5,100\n2001-01-12,1.6,101\n2001-01-19,1.4,99\n",
            META,
        )
        .unwrap();
        assert_eq!(p.n_assets(), 2);
        assert_eq!(p.n_dates(), 3);
        assert_eq!(p.meta()[0].ticker, "BBB");
        assert_eq!(p.meta()[0].asset_class, AssetClass::Metals);
        assert_eq!(p.prices().row(1), &[100.0, 101.0, 99.0]);
    }

    #[test]
    fn rejects_bad_cells() {
        let cases = [
            (
                "date,AAA,BBB\n2001-01-05,1,2\n2001-01-12,x,2\n",
                "data row 2), column 2 (`AAA`): non-numeric",
            ),
            (
                "date,AAA,BBB\n2001-01-05,1,2\n2001-01-12,1,-2\n",
                "column 3 (`BBB`): price must be positive",
            ),
            (
                "date,AAA,BBB\n2001-01-05,1,2\n2001-01-12,1\n",
                "line 3 (data row 2): missing cell",
            ),
            ("date,AAA,BBB\n2001-01-05,1,\n", "missing price"),
            ("date,AAA,BBB\n2001-01-12,1,2\n2001-01-05,1,2\n", "does not follow"),
            ("date,AAA,BBB\n2001/01/12,1,2\n", "invalid date"),
            ("date,AAA,BBB\n2001-1-12,1,2\n", "invalid date"),
            ("date,AAA,BBB\n2001-02-30,1,2\n", "invalid date"),
            ("date,AAA,CCC\n2001-01-12,1,2\n", "ticker `CCC` has no asset_class"),
        ];
        for (prices, needle) in cases {
            let msg = parse(prices, META).unwrap_err().to_string();
            assert!(msg.contains(needle), "{msg:?} lacks {needle:?}");
        }
    }

    #[test]
    fn rejects_bad_meta() {
        let prices = "date,AAA,BBB\n2001-01-05,1,2\n";
        let msg = parse(prices, "ticker,asset_class\nAAA,equities\nBBB,bonds\n")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("unknown asset_class `bonds`"), "{msg}");
        let msg = parse(prices, "ticker,asset_class\nAAA,equities\nAAA,metals\n")
            .unwrap_err()
            .to_string();
        assert!(msg.contains("duplicate ticker"), "{msg}");
    }

    #[test]
    fn write_then_read_is_exact() {
        let dates = corrscope_core::panel::synthetic_weekly_dates(4);
        let prices = Matrix::from_rows(&[[1.0 / 3.0, 2.5e-7, 1e10, 7.0], [0.1, 0.2, 0.30000000000000004, 9.99]]);
        let meta = vec![
            AssetMeta::new("C 1", AssetClass::Fuels),
            AssetMeta::new("X,Y", AssetClass::Equities),
        ];
        let panel = PricePanel::new(dates, prices, meta).unwrap();
        let (mut p, mut m) = (Vec::new(), Vec::new());
        write_prices(&panel, &mut p).unwrap();
        write_meta(panel.meta(), &mut m).unwrap();
        let back = parse(std::str::from_utf8(&p).unwrap(), std::str::from_utf8(&m).unwrap()).unwrap();
        assert_eq!(back, panel);
    }
}
