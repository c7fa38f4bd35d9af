//! Panel data model: price/return panels, factor series, sustainability
//! score tables, and the delimited-text loaders that feed the pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use log::warn;
use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Canonical factor column names.
pub const MKT_RF: &str = "MKT_RF";
pub const SMB: &str = "SMB";
pub const HML: &str = "HML";
pub const RMW: &str = "RMW";
pub const CMA: &str = "CMA";
pub const RF: &str = "RF";

/// The five Fama-French regressor columns (excludes the risk-free rate).
pub const FF5_COLUMNS: [&str; 5] = [MKT_RF, SMB, HML, RMW, CMA];

/// The closed GICS sector set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sector {
    CommunicationServices,
    ConsumerDiscretionary,
    ConsumerStaples,
    Energy,
    Financials,
    HealthCare,
    Industrials,
    InformationTechnology,
    Materials,
    RealEstate,
    Utilities,
}

impl Sector {
    pub const ALL: [Sector; 11] = [
        Sector::CommunicationServices,
        Sector::ConsumerDiscretionary,
        Sector::ConsumerStaples,
        Sector::Energy,
        Sector::Financials,
        Sector::HealthCare,
        Sector::Industrials,
        Sector::InformationTechnology,
        Sector::Materials,
        Sector::RealEstate,
        Sector::Utilities,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Sector::CommunicationServices => "Communication Services",
            Sector::ConsumerDiscretionary => "Consumer Discretionary",
            Sector::ConsumerStaples => "Consumer Staples",
            Sector::Energy => "Energy",
            Sector::Financials => "Financials",
            Sector::HealthCare => "Health Care",
            Sector::Industrials => "Industrials",
            Sector::InformationTechnology => "Information Technology",
            Sector::Materials => "Materials",
            Sector::RealEstate => "Real Estate",
            Sector::Utilities => "Utilities",
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_lowercase().replace(['_', '-'], " ");
        let norm = norm.split_whitespace().collect::<Vec<_>>().join(" ");
        Sector::ALL
            .iter()
            .find(|sec| sec.as_str().to_lowercase() == norm)
            .copied()
            .ok_or_else(|| Error::data(format!("unknown GICS sector: {s:?}")))
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Date-indexed matrix of adjusted close prices, one column per ticker.
///
/// Invariants: dates strictly increasing, every cell finite and > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Date-indexed matrix of daily log returns. A return row carries the date
/// of the later of the two prices it was computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    pub dates: Vec<NaiveDate>,
    pub tickers: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Date-indexed factor return series (FF5 + RF + any constructed factors).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPanel {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    pub values: DMatrix<f64>,
}

/// Per-ticker sustainability measures; any subset may be absent.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreRow {
    pub co2_scope1: Option<f64>,
    pub co2_scope2: Option<f64>,
    pub market_cap: Option<f64>,
    pub esg: Option<f64>,
    pub esg_promised: Option<f64>,
    pub esg_realized: Option<f64>,
    pub sector: Option<Sector>,
}

/// Cross-sectional score snapshot keyed by ticker.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreTable {
    pub rows: BTreeMap<String, ScoreRow>,
}

impl PricePanel {
    pub fn new(dates: Vec<NaiveDate>, tickers: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        validate_dates(&dates)?;
        if values.nrows() != dates.len() || values.ncols() != tickers.len() {
            return Err(Error::data(format!(
                "price matrix shape {}x{} does not match {} dates x {} tickers",
                values.nrows(),
                values.ncols(),
                dates.len(),
                tickers.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::data("price panel contains non-positive or non-finite cells"));
        }
        Ok(PricePanel { dates, tickers, values })
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn n_tickers(&self) -> usize {
        self.tickers.len()
    }

    /// Restrict to dates within `[start, end]` (inclusive bounds, either side optional).
    pub fn restrict(&self, start: Option<NaiveDate>, end: Option<NaiveDate>) -> Result<PricePanel> {
        let keep: Vec<usize> = self
            .dates
            .iter()
            .enumerate()
            .filter(|(_, d)| start.is_none_or(|s| **d >= s) && end.is_none_or(|e| **d <= e))
            .map(|(i, _)| i)
            .collect();
        if keep.len() < 2 {
            return Err(Error::data("fewer than 2 price rows in the requested window"));
        }
        let dates = keep.iter().map(|&i| self.dates[i]).collect();
        let values = self.values.select_rows(keep.iter());
        PricePanel::new(dates, self.tickers.clone(), values)
    }

    /// Serialize as `date,T1,T2,...` rows; floats written in shortest
    /// round-trip form so load(write(p)) == p.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut wtr = csv::Writer::from_path(path)?;
        let mut header = vec!["date".to_string()];
        header.extend(self.tickers.iter().cloned());
        wtr.write_record(&header)?;
        for (t, date) in self.dates.iter().enumerate() {
            let mut rec = vec![date.to_string()];
            rec.extend((0..self.tickers.len()).map(|i| self.values[(t, i)].to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl ReturnsPanel {
    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }

    pub fn column(&self, ticker: &str) -> Option<Vec<f64>> {
        let i = self.tickers.iter().position(|t| t == ticker)?;
        Some(self.values.column(i).iter().copied().collect())
    }
}

impl FactorPanel {
    pub fn new(dates: Vec<NaiveDate>, names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        validate_dates(&dates)?;
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(Error::data(format!("duplicate factor column: {name}")));
            }
        }
        if values.nrows() != dates.len() || values.ncols() != names.len() {
            return Err(Error::data("factor matrix shape mismatch"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::data("factor panel contains non-finite cells"));
        }
        Ok(FactorPanel { dates, names, values })
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.values.column(i).iter().copied().collect())
    }

    pub fn has_ff5(&self) -> bool {
        FF5_COLUMNS.iter().all(|c| self.names.iter().any(|n| n == c))
    }

    /// Return a copy with an extra named column appended (dates must match).
    pub fn with_column(&self, name: &str, series: &[f64]) -> Result<FactorPanel> {
        if series.len() != self.dates.len() {
            return Err(Error::data(format!(
                "column {name} has {} values for {} dates",
                series.len(),
                self.dates.len()
            )));
        }
        let mut values = self.values.clone().insert_column(self.names.len(), 0.0);
        for (t, v) in series.iter().enumerate() {
            values[(t, self.names.len())] = *v;
        }
        let mut names = self.names.clone();
        names.push(name.to_string());
        FactorPanel::new(self.dates.clone(), names, values)
    }
}

impl ScoreTable {
    pub fn get(&self, ticker: &str) -> Option<&ScoreRow> {
        self.rows.get(ticker)
    }
}

fn validate_dates(dates: &[NaiveDate]) -> Result<()> {
    for w in dates.windows(2) {
        if w[1] == w[0] {
            return Err(Error::data(format!("duplicate dates: {}", w[0])));
        }
        if w[1] < w[0] {
            return Err(Error::data("dates not strictly increasing"));
        }
    }
    Ok(())
}

/// Pick the delimiter (comma, semicolon, or tab) that splits the header into
/// the most fields.
fn detect_delimiter(header: &str) -> u8 {
    [b',', b';', b'\t']
        .into_iter()
        .max_by_key(|&d| header.bytes().filter(|&b| b == d).count())
        .unwrap()
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let head = std::fs::read_to_string(path)?
        .lines()
        .next()
        .map(str::to_string)
        .unwrap_or_default();
    Ok(csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(&head))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)?)
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| Error::data(format!("unparseable ISO-8601 date: {s:?}")))
}

/// Load a price panel from `date,TICKER,...` delimited text.
///
/// Rows containing a missing, unparseable, or non-positive price are dropped;
/// the second return value counts the dropped rows.
pub fn load_price_panel(path: &Path) -> Result<(PricePanel, usize)> {
    let mut rdr = open_reader(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::data("price file needs a date column and at least one ticker"));
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    let mut dropped = 0usize;
    for record in rdr.records() {
        let record = record?;
        let date = parse_date(&record[0])?;
        let mut prices = Vec::with_capacity(tickers.len());
        let mut ok = true;
        for cell in record.iter().skip(1) {
            match cell.parse::<f64>() {
                Ok(v) if v > 0.0 && v.is_finite() => prices.push(v),
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            rows.push((date, prices));
        } else {
            dropped += 1;
        }
    }
    if dropped > 0 {
        warn!("{}: dropped {dropped} row(s) with missing or non-positive prices", path.display());
    }
    if rows.len() < 2 {
        return Err(Error::data(format!(
            "fewer than 2 usable price rows in {}",
            path.display()
        )));
    }
    rows.sort_by_key(|(d, _)| *d);
    let dates: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
    validate_dates(&dates)?;
    let n = tickers.len();
    let values = DMatrix::from_row_iterator(rows.len(), n, rows.iter().flat_map(|(_, p)| p.iter().copied()));
    Ok((PricePanel::new(dates, tickers, values)?, dropped))
}

/// How factor file values are scaled on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FactorScale {
    /// Values are decimal daily returns (0.01 = 1%).
    #[default]
    Decimal,
    /// Values are percent daily returns (1.0 = 1%), rescaled by 1/100 on load.
    Percent,
}

/// Load a factor panel from `date,MKT_RF,SMB,...` delimited text.
pub fn load_factor_panel(path: &Path, scale: FactorScale) -> Result<FactorPanel> {
    let mut rdr = open_reader(path)?;
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::data("factor file needs a date column and at least one factor"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let rescale = match scale {
        FactorScale::Decimal => 1.0,
        FactorScale::Percent => 0.01,
    };

    let mut rows: Vec<(NaiveDate, Vec<f64>)> = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let date = parse_date(&record[0])?;
        let mut vals = Vec::with_capacity(names.len());
        for cell in record.iter().skip(1) {
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::data(format!("unparseable factor value {cell:?} on {date}")))?;
            vals.push(v * rescale);
        }
        rows.push((date, vals));
    }
    if rows.is_empty() {
        return Err(Error::data(format!("no factor rows in {}", path.display())));
    }
    rows.sort_by_key(|(d, _)| *d);
    let dates: Vec<NaiveDate> = rows.iter().map(|(d, _)| *d).collect();
    let values =
        DMatrix::from_row_iterator(rows.len(), names.len(), rows.iter().flat_map(|(_, v)| v.iter().copied()));
    FactorPanel::new(dates, names, values)
}

/// Load a score table. Expected columns: `ticker, co2_scope1, co2_scope2,
/// market_cap, esg, esg_promised, esg_realized, sector`; empty cell = absent.
/// An optional `as_of` date column selects a snapshot (latest row ≤ `as_of`
/// per ticker; latest overall if `as_of` is `None`).
pub fn load_scores(path: &Path, as_of: Option<NaiveDate>) -> Result<ScoreTable> {
    let mut rdr = open_reader(path)?;
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
    let ticker_col = col("ticker").ok_or_else(|| Error::data("score file missing `ticker` column"))?;
    let asof_col = col("as_of");

    let num = |record: &csv::StringRecord, idx: Option<usize>, what: &str| -> Result<Option<f64>> {
        match idx {
            Some(i) => {
                let cell = record.get(i).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::data(format!("unparseable {what} value: {cell:?}")))
                }
            }
            None => Ok(None),
        }
    };

    let cols = [
        col("co2_scope1"),
        col("co2_scope2"),
        col("market_cap"),
        col("esg"),
        col("esg_promised"),
        col("esg_realized"),
    ];
    let sector_col = col("sector");

    // (as_of, row) per ticker; later snapshots win.
    let mut best: BTreeMap<String, (Option<NaiveDate>, ScoreRow)> = BTreeMap::new();
    for record in rdr.records() {
        let record = record?;
        let ticker = record[ticker_col].to_string();
        if ticker.is_empty() {
            return Err(Error::data("score row with empty ticker"));
        }
        let row_date = match asof_col {
            Some(i) if !record[i].is_empty() => Some(parse_date(&record[i])?),
            _ => None,
        };
        if let (Some(cutoff), Some(d)) = (as_of, row_date) {
            if d > cutoff {
                continue;
            }
        }
        let row = ScoreRow {
            co2_scope1: num(&record, cols[0], "co2_scope1")?,
            co2_scope2: num(&record, cols[1], "co2_scope2")?,
            market_cap: num(&record, cols[2], "market_cap")?,
            esg: num(&record, cols[3], "esg")?,
            esg_promised: num(&record, cols[4], "esg_promised")?,
            esg_realized: num(&record, cols[5], "esg_realized")?,
            sector: match sector_col {
                Some(i) if !record[i].is_empty() => Some(record[i].parse()?),
                _ => None,
            },
        };
        if let Some(mcap) = row.market_cap {
            if mcap <= 0.0 {
                return Err(Error::data(format!("non-positive market cap for {ticker}")));
            }
        }
        match best.get(&ticker) {
            Some((prev, _)) if row_date < *prev => {}
            _ => {
                best.insert(ticker, (row_date, row));
            }
        }
    }
    Ok(ScoreTable { rows: best.into_iter().map(|(k, (_, r))| (k, r)).collect() })
}

/// Daily log returns: entry (t, i) = ln(P[t+1][i] / P[t][i]).
pub fn compute_log_returns(panel: &PricePanel) -> Result<ReturnsPanel> {
    if panel.n_dates() < 2 {
        return Err(Error::data("need at least 2 dates to compute returns"));
    }
    let t = panel.n_dates() - 1;
    let n = panel.n_tickers();
    let values = DMatrix::from_fn(t, n, |r, c| (panel.values[(r + 1, c)] / panel.values[(r, c)]).ln());
    Ok(ReturnsPanel {
        dates: panel.dates[1..].to_vec(),
        tickers: panel.tickers.clone(),
        values,
    })
}

/// Restrict both panels to their common dates, in chronological order.
pub fn align(
    returns: &ReturnsPanel,
    factors: &FactorPanel,
    min_obs: usize,
) -> Result<(ReturnsPanel, FactorPanel)> {
    let factor_dates: BTreeSet<NaiveDate> = factors.dates.iter().copied().collect();
    let keep_r: Vec<usize> = returns
        .dates
        .iter()
        .enumerate()
        .filter(|(_, d)| factor_dates.contains(d))
        .map(|(i, _)| i)
        .collect();
    if keep_r.is_empty() {
        return Err(Error::data("empty intersection of return and factor dates"));
    }
    if keep_r.len() < min_obs {
        return Err(Error::data(format!(
            "aligned sample too small: {} < {min_obs} observations",
            keep_r.len()
        )));
    }
    let common: BTreeSet<NaiveDate> = keep_r.iter().map(|&i| returns.dates[i]).collect();
    let keep_f: Vec<usize> = factors
        .dates
        .iter()
        .enumerate()
        .filter(|(_, d)| common.contains(d))
        .map(|(i, _)| i)
        .collect();

    let aligned_returns = ReturnsPanel {
        dates: keep_r.iter().map(|&i| returns.dates[i]).collect(),
        tickers: returns.tickers.clone(),
        values: returns.values.select_rows(keep_r.iter()),
    };
    let aligned_factors = FactorPanel {
        dates: keep_f.iter().map(|&i| factors.dates[i]).collect(),
        names: factors.names.clone(),
        values: factors.values.select_rows(keep_f.iter()),
    };
    debug_assert_eq!(aligned_returns.dates, aligned_factors.dates);
    Ok((aligned_returns, aligned_factors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn loads_simple_price_file() {
        let f = write_tmp("date,A\n2020-01-01,100\n2020-01-02,110\n2020-01-03,121\n");
        let (panel, dropped) = load_price_panel(f.path()).unwrap();
        assert_eq!(panel.n_dates(), 3);
        assert_eq!(panel.tickers, vec!["A"]);
        assert_eq!(dropped, 0);
        assert_relative_eq!(panel.values[(2, 0)], 121.0);
    }

    #[test]
    fn drops_rows_with_bad_prices() {
        let f = write_tmp("date,A,B\n2020-01-01,100,50\n2020-01-02,0,51\n2020-01-03,110,\n2020-01-06,120,53\n");
        let (panel, dropped) = load_price_panel(f.path()).unwrap();
        assert_eq!(dropped, 2);
        assert_eq!(panel.n_dates(), 2);
        assert_eq!(panel.dates, vec![date("2020-01-01"), date("2020-01-06")]);
    }

    #[test]
    fn duplicate_dates_rejected() {
        let f = write_tmp("date,A\n2020-01-01,100\n2020-01-01,101\n2020-01-02,102\n");
        let err = load_price_panel(f.path()).unwrap_err();
        assert!(err.to_string().contains("duplicate dates"), "{err}");
    }

    #[test]
    fn too_few_rows_rejected() {
        let f = write_tmp("date,A\n2020-01-01,100\n");
        assert!(load_price_panel(f.path()).is_err());
    }

    #[test]
    fn semicolon_delimiter_detected() {
        let f = write_tmp("date;A;B\n2020-01-01;100;50\n2020-01-02;101;51\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        assert_eq!(panel.tickers, vec!["A", "B"]);
    }

    #[test]
    fn log_returns_definition() {
        let f = write_tmp("date,A\n2020-01-01,100\n2020-01-02,110\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let returns = compute_log_returns(&panel).unwrap();
        assert_eq!(returns.n_dates(), 1);
        assert_relative_eq!(returns.values[(0, 0)], 1.1f64.ln(), epsilon = 1e-12);
        assert_relative_eq!(returns.values[(0, 0)], 0.095310, epsilon = 1e-6);
    }

    #[test]
    fn log_returns_constant_prices() {
        let f = write_tmp("date,A\n2020-01-01,50\n2020-01-02,50\n2020-01-03,50\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let returns = compute_log_returns(&panel).unwrap();
        assert_eq!(returns.values.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn log_returns_halving() {
        let f = write_tmp("date,A\n2020-01-01,100\n2020-01-02,50\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let returns = compute_log_returns(&panel).unwrap();
        assert_relative_eq!(returns.values[(0, 0)], -0.693147, epsilon = 1e-6);
    }

    #[test]
    fn align_intersects_dates() {
        let returns = ReturnsPanel {
            dates: vec![date("2020-01-01"), date("2020-01-02"), date("2020-01-03")],
            tickers: vec!["A".into()],
            values: DMatrix::from_column_slice(3, 1, &[0.1, 0.2, 0.3]),
        };
        let factors = FactorPanel::new(
            vec![date("2020-01-02"), date("2020-01-03"), date("2020-01-06")],
            vec![MKT_RF.into()],
            DMatrix::from_column_slice(3, 1, &[0.01, 0.02, 0.03]),
        )
        .unwrap();
        let (r, f) = align(&returns, &factors, 2).unwrap();
        assert_eq!(r.dates, vec![date("2020-01-02"), date("2020-01-03")]);
        assert_eq!(f.dates, r.dates);
        assert_eq!(r.values.as_slice(), &[0.2, 0.3]);
        assert_eq!(f.values.as_slice(), &[0.01, 0.02]);
    }

    #[test]
    fn align_identity_and_idempotence() {
        let returns = ReturnsPanel {
            dates: vec![date("2020-01-01"), date("2020-01-02")],
            tickers: vec!["A".into()],
            values: DMatrix::from_column_slice(2, 1, &[0.1, 0.2]),
        };
        let factors = FactorPanel::new(
            returns.dates.clone(),
            vec![MKT_RF.into()],
            DMatrix::from_column_slice(2, 1, &[0.01, 0.02]),
        )
        .unwrap();
        let (r1, f1) = align(&returns, &factors, 2).unwrap();
        assert_eq!(r1, returns);
        assert_eq!(f1, factors);
        let (r2, f2) = align(&r1, &f1, 2).unwrap();
        assert_eq!(r2, r1);
        assert_eq!(f2, f1);
    }

    #[test]
    fn align_disjoint_errors() {
        let returns = ReturnsPanel {
            dates: vec![date("2020-01-01")],
            tickers: vec!["A".into()],
            values: DMatrix::from_column_slice(1, 1, &[0.1]),
        };
        let factors = FactorPanel::new(
            vec![date("2021-01-01")],
            vec![MKT_RF.into()],
            DMatrix::from_column_slice(1, 1, &[0.01]),
        )
        .unwrap();
        let err = align(&returns, &factors, 2).unwrap_err();
        assert!(err.to_string().contains("empty intersection"), "{err}");
    }

    #[test]
    fn scores_roundtrip_fields() {
        let f = write_tmp(
            "ticker,co2_scope1,co2_scope2,market_cap,esg,esg_promised,esg_realized,sector\n\
             A,10,5,1000000000,55,,40,Utilities\n",
        );
        let table = load_scores(f.path(), None).unwrap();
        let row = table.get("A").unwrap();
        assert_eq!(row.co2_scope1, Some(10.0));
        assert_eq!(row.co2_scope2, Some(5.0));
        assert_eq!(row.market_cap, Some(1e9));
        assert_eq!(row.esg, Some(55.0));
        assert_eq!(row.esg_promised, None);
        assert_eq!(row.esg_realized, Some(40.0));
        assert_eq!(row.sector, Some(Sector::Utilities));
    }

    #[test]
    fn scores_unknown_sector_rejected() {
        let f = write_tmp("ticker,sector\nA,Banking\n");
        let err = load_scores(f.path(), None).unwrap_err();
        assert!(err.to_string().contains("unknown GICS sector"), "{err}");
    }

    #[test]
    fn scores_negative_market_cap_rejected() {
        let f = write_tmp("ticker,market_cap\nA,-5\n");
        assert!(load_scores(f.path(), None).is_err());
    }

    #[test]
    fn scores_as_of_snapshot() {
        let f = write_tmp("ticker,esg,as_of\nA,10,2019-01-01\nA,20,2020-01-01\nA,30,2021-01-01\n");
        let latest = load_scores(f.path(), None).unwrap();
        assert_eq!(latest.get("A").unwrap().esg, Some(30.0));
        let cutoff = load_scores(f.path(), Some(date("2020-06-01"))).unwrap();
        assert_eq!(cutoff.get("A").unwrap().esg, Some(20.0));
    }

    #[test]
    fn price_panel_csv_roundtrip_is_fixed_point() {
        let f = write_tmp("date,A,B\n2020-01-01,100.25,3.14159\n2020-01-02,101.5,2.71828\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        panel.write_csv(out.path()).unwrap();
        let (reloaded, _) = load_price_panel(out.path()).unwrap();
        assert_eq!(panel, reloaded);
    }

    #[test]
    fn cumulated_returns_recover_price_ratio() {
        // ln-return cumulative sums exponentiate back to P_t / P_0.
        let f = write_tmp(
            "date,A,B\n2020-01-01,100,55.5\n2020-01-02,103.7,54.2\n2020-01-03,99.1,58.8\n2020-01-06,107.3,60.1\n",
        );
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let returns = compute_log_returns(&panel).unwrap();
        for i in 0..panel.n_tickers() {
            let mut acc = 0.0;
            for t in 0..returns.n_dates() {
                acc += returns.values[(t, i)];
                let recovered = acc.exp();
                let actual = panel.values[(t + 1, i)] / panel.values[(0, i)];
                assert_relative_eq!(recovered, actual, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn restrict_window() {
        let f = write_tmp("date,A\n2020-01-01,1\n2020-06-01,2\n2021-01-04,3\n2021-06-01,4\n");
        let (panel, _) = load_price_panel(f.path()).unwrap();
        let sliced = panel.restrict(Some(date("2020-06-01")), Some(date("2021-01-04"))).unwrap();
        assert_eq!(sliced.dates, vec![date("2020-06-01"), date("2021-01-04")]);
    }
}
