//! CSV records and the per-cell summary table.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::io::{Read, Write};

use biopt_core::instances::Family;

use crate::{Algorithm, BenchError, BenchRecord};

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "size",
    "seed",
    "algorithm",
    "threads",
    "elapsed_ms",
    "ip_solves",
    "pareto_size",
    "verified",
];

/// `verified` holds `true`/`false` when the oracle ran, `timeout` for a run
/// stopped by the time limit, and is empty otherwise.
fn verified_field(r: &BenchRecord) -> &'static str {
    match (r.timed_out, r.verified) {
        (true, _) => "timeout",
        (false, Some(true)) => "true",
        (false, Some(false)) => "false",
        (false, None) => "",
    }
}

pub(crate) fn write_record<W: Write>(w: &mut csv::Writer<W>, r: &BenchRecord) -> Result<(), csv::Error> {
    w.write_record([
        r.family.as_str().to_string(),
        r.size.to_string(),
        r.seed.to_string(),
        r.algorithm.as_str().to_string(),
        r.threads.to_string(),
        r.elapsed_ms.to_string(),
        r.ip_solves.to_string(),
        r.pareto_size.to_string(),
        verified_field(r).to_string(),
    ])
}

/// Writes the header and every record.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        write_record(&mut w, r)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses what [`write_csv`] produces.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(BenchError::InvalidConfig(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or_default();
        let bad = |i: usize| BenchError::InvalidConfig(format!("bad {} value {:?}", CSV_HEADER[i], field(i)));
        let num = |i: usize| field(i).parse::<u64>().map_err(|_| bad(i));
        let (verified, timed_out) = match field(8) {
            "true" => (Some(true), false),
            "false" => (Some(false), false),
            "timeout" => (None, true),
            "" => (None, false),
            _ => return Err(bad(8)),
        };
        out.push(BenchRecord {
            family: field(0).parse::<Family>().map_err(|_| bad(0))?,
            size: num(1)? as usize,
            seed: num(2)?,
            algorithm: field(3).parse::<Algorithm>().map_err(|_| bad(3))?,
            threads: num(4)? as usize,
            elapsed_ms: field(5).parse::<f64>().map_err(|_| bad(5))?,
            ip_solves: num(6)?,
            pareto_size: num(7)? as usize,
            verified,
            timed_out,
        });
    }
    Ok(out)
}

/// Aggregate of one (family, size, algorithm) cell. Timed-out runs are
/// counted but left out of the means.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub family: Family,
    pub size: usize,
    pub algorithm: Algorithm,
    pub threads: usize,
    pub runs: usize,
    pub timed_out: usize,
    pub mean_ms: Option<f64>,
    /// Sample standard deviation; zero for a single run.
    pub std_ms: Option<f64>,
    pub mean_ip_solves: Option<f64>,
    /// Sequential mean over this cell's mean, when both exist.
    pub speedup: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

/// Groups records by (family, size, algorithm) in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Summary {
    let mut order: Vec<(Family, usize, Algorithm)> = Vec::new();
    let mut groups: HashMap<(Family, usize, Algorithm), Vec<&BenchRecord>> = HashMap::new();
    for r in records {
        let key = (r.family, r.size, r.algorithm);
        groups.entry(key).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        groups.get_mut(&key).expect("just inserted").push(r);
    }

    let mut rows: Vec<SummaryRow> = order
        .iter()
        .map(|key| {
            let group = &groups[key];
            let done: Vec<&&BenchRecord> = group.iter().filter(|r| !r.timed_out).collect();
            let times: Vec<f64> = done.iter().map(|r| r.elapsed_ms).collect();
            let solves: Vec<f64> = done.iter().map(|r| r.ip_solves as f64).collect();
            SummaryRow {
                family: key.0,
                size: key.1,
                algorithm: key.2,
                threads: group[0].threads,
                runs: group.len(),
                timed_out: group.len() - done.len(),
                mean_ms: mean(&times),
                std_ms: std_dev(&times),
                mean_ip_solves: mean(&solves),
                speedup: None,
            }
        })
        .collect();

    let sequential: HashMap<(Family, usize), f64> = rows
        .iter()
        .filter(|r| r.algorithm == Algorithm::Sequential)
        .filter_map(|r| Some(((r.family, r.size), r.mean_ms?)))
        .collect();
    for row in &mut rows {
        if let (Some(seq), Some(m)) = (sequential.get(&(row.family, row.size)), row.mean_ms) {
            if m > 0.0 {
                row.speedup = Some(seq / m);
            }
        }
    }
    Summary { rows }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn std_dev(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    if v.len() < 2 {
        return Some(0.0);
    }
    let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (v.len() - 1) as f64).sqrt())
}

const SUMMARY_COLUMNS: [&str; 10] = [
    "family",
    "size",
    "algorithm",
    "threads",
    "runs",
    "timed_out",
    "mean_ms",
    "std_ms",
    "mean_ip_solves",
    "speedup",
];

impl Summary {
    fn cells(&self) -> Vec<[String; 10]> {
        let opt = |v: Option<f64>, digits: usize| v.map_or(String::new(), |x| format!("{x:.digits$}"));
        self.rows
            .iter()
            .map(|r| {
                [
                    r.family.to_string(),
                    r.size.to_string(),
                    r.algorithm.to_string(),
                    r.threads.to_string(),
                    r.runs.to_string(),
                    r.timed_out.to_string(),
                    opt(r.mean_ms, 3),
                    opt(r.std_ms, 3),
                    opt(r.mean_ip_solves, 2),
                    opt(r.speedup, 2),
                ]
            })
            .collect()
    }

    /// Machine-readable rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BenchError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SUMMARY_COLUMNS)?;
        for row in self.cells() {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Aligned text table: text columns left, numbers right.
impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells = self.cells();
        let mut widths = SUMMARY_COLUMNS.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.len());
            }
        }
        let mut line = |row: &[String]| {
            let mut s = String::new();
            for (i, (c, w)) in row.iter().zip(widths).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                if i == 0 || i == 2 {
                    write!(s, "{c:<w$}").unwrap();
                } else {
                    write!(s, "{c:>w$}").unwrap();
                }
            }
            writeln!(f, "{}", s.trim_end())
        };
        line(&SUMMARY_COLUMNS.map(String::from))?;
        for row in &cells {
            line(row)?;
        }
        Ok(())
    }
}
