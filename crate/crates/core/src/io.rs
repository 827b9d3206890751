//! Flat-file formats.
//!
//! Orders as CSV use the header `side,id,timestamp,price,qty` with side `B`
//! or `A`; matchings use `bid_id,ask_id,qty,price`. All values are decimal
//! naturals. The JSON forms are arrays of objects with the same field names.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bench::BenchRecord;
use crate::error::{Error, Result};
use crate::orders::{Matching, Order, OrderBook, Price, Side, Transaction};
use crate::verify::check_valid;

pub const ORDER_HEADER: [&str; 5] = ["side", "id", "timestamp", "price", "qty"];
pub const MATCHING_HEADER: [&str; 4] = ["bid_id", "ask_id", "qty", "price"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Domain(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderRecord {
    side: Side,
    id: u64,
    timestamp: u64,
    price: u64,
    qty: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransactionRecord {
    bid_id: u64,
    ask_id: u64,
    qty: u64,
    price: u64,
}

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_reader<R: Read>(reader: R, expected: &[&str]) -> Result<csv::Reader<R>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_error(1, e.to_string()))?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(parse_error(
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(rdr)
}

fn field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    i: usize,
    name: &str,
    line: u64,
) -> Result<T> {
    let raw = record
        .get(i)
        .ok_or_else(|| parse_error(line, format!("missing column `{name}`")))?;
    raw.parse().map_err(|_| {
        parse_error(
            line,
            format!("column `{name}`: `{raw}` is not a natural number"),
        )
    })
}

fn orders_from_csv<R: Read>(reader: R) -> Result<Vec<(Order, u64)>> {
    let mut rdr = csv_reader(reader, &ORDER_HEADER)?;
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let side = match record.get(0) {
            Some("B") => Side::Bid,
            Some("A") => Side::Ask,
            Some(other) => {
                return Err(parse_error(
                    line,
                    format!("unknown side `{other}` (expected B or A)"),
                ))
            }
            None => return Err(parse_error(line, "missing column `side`")),
        };
        let id = field(&record, 1, "id", line)?;
        let timestamp = field(&record, 2, "timestamp", line)?;
        let price: u64 = field(&record, 3, "price", line)?;
        let qty = field(&record, 4, "qty", line)?;
        out.push((Order::new(side, id, timestamp, price, qty), line));
    }
    Ok(out)
}

fn orders_from_json<R: Read>(reader: R) -> Result<Vec<(Order, u64)>> {
    let records: Vec<OrderRecord> =
        serde_json::from_reader(reader).map_err(|e| parse_error(e.line() as u64, e.to_string()))?;
    Ok(records
        .into_iter()
        .map(|r| (Order::new(r.side, r.id, r.timestamp, r.price, r.qty), 0))
        .collect())
}

/// Reads an order book, enforcing every book invariant.
pub fn read_orders<R: Read>(reader: R, format: Format) -> Result<OrderBook> {
    let rows = match format {
        Format::Csv => orders_from_csv(reader)?,
        Format::Json => orders_from_json(reader)?,
    };
    let mut bids = Vec::new();
    let mut asks = Vec::new();
    for (order, line) in rows {
        if order.qty == 0 {
            return Err(parse_error(
                line,
                format!("order {} has zero quantity", order.id),
            ));
        }
        match order.side {
            Side::Bid => bids.push(order),
            Side::Ask => asks.push(order),
        }
    }
    Ok(OrderBook::new(bids, asks)?)
}

pub fn parse_orders(path: &Path, format: Format) -> Result<OrderBook> {
    read_orders(BufReader::new(File::open(path)?), format)
}

pub fn write_orders_to<W: Write>(book: &OrderBook, writer: W, format: Format) -> Result<()> {
    let records = book.bids().iter().chain(book.asks()).map(|o| OrderRecord {
        side: o.side,
        id: o.id,
        timestamp: o.timestamp,
        price: o.price.finite().expect("books hold finite prices"),
        qty: o.qty,
    });
    match format {
        Format::Csv => {
            let mut w = csv_writer(writer);
            w.write_record(ORDER_HEADER).map_err(csv_io)?;
            for r in records {
                let side = match r.side {
                    Side::Bid => "B",
                    Side::Ask => "A",
                };
                w.write_record([
                    side,
                    &r.id.to_string(),
                    &r.timestamp.to_string(),
                    &r.price.to_string(),
                    &r.qty.to_string(),
                ])
                .map_err(csv_io)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(writer, &records.collect::<Vec<_>>())?,
    }
    Ok(())
}

pub fn write_orders(book: &OrderBook, path: &Path, format: Format) -> Result<()> {
    write_orders_to(book, BufWriter::new(File::create(path)?), format)
}

fn csv_writer<W: Write>(writer: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer)
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn write_json<W: Write, T: Serialize>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value).map_err(|e| Error::Io(e.into()))?;
    writeln!(writer)?;
    writer.flush()?;
    Ok(())
}

/// Writes a matching in engine order. The matching must be valid over
/// `book`.
pub fn write_matching_to<W: Write>(
    matching: &Matching,
    book: &OrderBook,
    writer: W,
    format: Format,
) -> Result<()> {
    let report = check_valid(matching, book);
    if let Some(first) = report.violations.first() {
        return Err(Error::InvalidMatching {
            violations: report.violations.len(),
            first: first.to_string(),
        });
    }
    let records: Vec<TransactionRecord> = matching
        .transactions
        .iter()
        .map(|t| TransactionRecord {
            bid_id: t.bid_id,
            ask_id: t.ask_id,
            qty: t.qty,
            // validity rules out sentinel transaction prices
            price: t.price.finite().unwrap_or_default(),
        })
        .collect();
    match format {
        Format::Csv => {
            let mut w = csv_writer(writer);
            w.write_record(MATCHING_HEADER).map_err(csv_io)?;
            for r in &records {
                w.write_record([r.bid_id, r.ask_id, r.qty, r.price].map(|v| v.to_string()))
                    .map_err(csv_io)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(writer, &records)?,
    }
    Ok(())
}

pub fn write_matching(
    matching: &Matching,
    book: &OrderBook,
    path: &Path,
    format: Format,
) -> Result<()> {
    write_matching_to(matching, book, BufWriter::new(File::create(path)?), format)
}

pub fn read_matching_from<R: Read>(reader: R, format: Format) -> Result<Matching> {
    let records: Vec<TransactionRecord> = match format {
        Format::Csv => {
            let mut rdr = csv_reader(reader, &MATCHING_HEADER)?;
            let mut out = Vec::new();
            for record in rdr.records() {
                let record = record.map_err(|e| {
                    parse_error(e.position().map_or(0, |p| p.line()), e.to_string())
                })?;
                let line = record.position().map_or(0, |p| p.line());
                out.push(TransactionRecord {
                    bid_id: field(&record, 0, "bid_id", line)?,
                    ask_id: field(&record, 1, "ask_id", line)?,
                    qty: field(&record, 2, "qty", line)?,
                    price: field(&record, 3, "price", line)?,
                });
            }
            out
        }
        Format::Json => serde_json::from_reader(reader)
            .map_err(|e| parse_error(e.line() as u64, e.to_string()))?,
    };
    Ok(Matching::new(
        records
            .into_iter()
            .map(|r| Transaction {
                bid_id: r.bid_id,
                ask_id: r.ask_id,
                qty: r.qty,
                price: Price::Finite(r.price),
            })
            .collect(),
    ))
}

pub fn read_matching(path: &Path, format: Format) -> Result<Matching> {
    read_matching_from(BufReader::new(File::open(path)?), format)
}

pub const BENCH_HEADER: [&str; 4] = ["algorithm", "n", "wall_time", "volume"];

/// Writes benchmark records; `wall_time` is in seconds.
pub fn write_bench_to<W: Write>(records: &[BenchRecord], writer: W, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv_writer(writer);
            w.write_record(BENCH_HEADER).map_err(csv_io)?;
            for r in records {
                w.write_record([
                    r.algorithm.name().to_string(),
                    r.n.to_string(),
                    format!("{:.9}", r.wall_time),
                    r.volume.to_string(),
                ])
                .map_err(csv_io)?;
            }
            w.flush()?;
        }
        Format::Json => write_json(writer, &records)?,
    }
    Ok(())
}

/// Reads one natural number per line. Blank lines are skipped.
pub fn read_naturals<R: Read>(reader: R) -> Result<Vec<u64>> {
    let mut text = String::new();
    BufReader::new(reader).read_to_string(&mut text)?;
    text.lines()
        .zip(1..)
        .filter(|(l, _)| !l.trim().is_empty())
        .map(|(l, line)| {
            let l = l.trim();
            l.parse()
                .map_err(|_| parse_error(line, format!("`{l}` is not a natural number")))
        })
        .collect()
}
