//! CSV and JSON artifacts.
//!
//! Numbers are written in scientific notation with 17 significant digits so
//! every value round-trips exactly.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::ConvergenceSeries;
use crate::error::{Error, Result};
use crate::signals::{DenoiseResult, SampledSignal};

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

/// Columns `n, max_error, mean_abs_error, bound`; `bound` is empty when not computed.
pub fn write_series_csv(path: &Path, series: &ConvergenceSeries) -> Result<()> {
    let rows = series.entries.iter().map(|e| {
        vec![
            e.report.n.to_string(),
            fmt_num(e.report.max_error),
            fmt_num(e.report.mean_abs_error),
            e.bound.map(fmt_num).unwrap_or_default(),
        ]
    });
    write_csv(path, &["n", "max_error", "mean_abs_error", "bound"], rows)
}

/// Columns `s, truth, noisy_nearest, reconstruction`.
pub fn write_denoise_csv(path: &Path, result: &DenoiseResult, signal: &SampledSignal) -> Result<()> {
    let rows = (0..result.grid.len()).map(|i| {
        let s = result.grid[i];
        vec![
            fmt_num(s),
            fmt_num(result.truth[i]),
            fmt_num(signal.nearest(s)),
            fmt_num(result.reconstruction[i]),
        ]
    });
    write_csv(path, &["s", "truth", "noisy_nearest", "reconstruction"], rows)
}

/// Signal CSV: `# key=value` metadata lines for `n`, `noise_std` and `seed`,
/// then columns `k, s_k, y_k`.
pub fn write_signal<W: Write>(out: W, signal: &SampledSignal) -> Result<()> {
    let mut out = out;
    let meta = format!(
        "# n={}\n# noise_std={}\n# seed={}\n",
        signal.n,
        fmt_num(signal.noise_std),
        signal.seed
    );
    out.write_all(meta.as_bytes())
        .map_err(|e| Error::io("<signal>", e))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "s_k", "y_k"])?;
    for (k, &y) in signal.values.iter().enumerate() {
        w.write_record([k.to_string(), fmt_num(signal.node(k)), fmt_num(y)])?;
    }
    w.flush().map_err(|e| Error::io("<signal>", e))?;
    Ok(())
}

pub fn write_signal_csv(path: &Path, signal: &SampledSignal) -> Result<()> {
    write_signal(create(path)?, signal)
}

pub fn read_signal<R: Read>(input: R) -> Result<SampledSignal> {
    let mut text = String::new();
    BufReader::new(input)
        .read_to_string(&mut text)
        .map_err(|e| Error::io("<signal>", e))?;

    let (mut n, mut noise_std, mut seed) = (None, None, None);
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        let Some((key, value)) = line.trim_start_matches('#').split_once('=') else {
            continue;
        };
        let value = value.trim();
        let bad = |what: &str| Error::Data(format!("bad {what} in signal header: '{value}'"));
        match key.trim() {
            "n" => n = Some(value.parse::<u32>().map_err(|_| bad("n"))?),
            "noise_std" => noise_std = Some(value.parse::<f64>().map_err(|_| bad("noise_std"))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("seed"))?),
            _ => {}
        }
    }
    let n = n.ok_or_else(|| Error::Data("signal header lacks n".into()))?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("signal CSV lacks column '{name}'")))
    };
    let (k_col, y_col) = (col("k")?, col("y_k")?);
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let k: usize = record[k_col]
            .parse()
            .map_err(|_| Error::Data(format!("row {row}: bad k '{}'", &record[k_col])))?;
        if k != row {
            return Err(Error::Data(format!("row {row}: expected k={row}, found k={k}")));
        }
        let y: f64 = record[y_col]
            .parse()
            .map_err(|_| Error::Data(format!("row {row}: bad y_k '{}'", &record[y_col])))?;
        values.push(y);
    }
    SampledSignal::new(n, values, noise_std.unwrap_or(0.0), seed.unwrap_or(0))
}

pub fn read_signal_csv(path: &Path) -> Result<SampledSignal> {
    read_signal(File::open(path).map_err(|e| Error::io(path, e))?)
}

/// Reads a two-or-more column numeric CSV with a header row (used in tests and tooling).
pub fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|v| {
                if v.is_empty() {
                    Ok(f64::NAN)
                } else {
                    v.parse::<f64>()
                        .map_err(|_| Error::Data(format!("non-numeric cell '{v}' in {}", path.display())))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}
