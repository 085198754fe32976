//! Series CSV: a `# benchmark=<name> dt=<dt> seed=<seed>` header line, then
//! one row per time step with one column per dimension.

use std::io::{BufRead, Write};

use super::{SeriesError, TimeSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMeta {
    pub benchmark: String,
    pub dt: f64,
    pub seed: u64,
}

pub fn write_csv<W: Write>(mut out: W, meta: &SeriesMeta, ts: &TimeSeries) -> std::io::Result<()> {
    writeln!(out, "# benchmark={} dt={} seed={}", meta.benchmark, meta.dt, meta.seed)?;
    let mut line = String::new();
    for sample in ts.samples() {
        line.clear();
        for (i, x) in sample.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&x.to_string());
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> Result<(SeriesMeta, TimeSeries), SeriesError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.ok_or(SeriesError::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let meta = parse_header(&header)?;

    let mut dim = None;
    let mut data = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| SeriesError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(SeriesError::Parse {
                    line: line_no,
                    message: format!("expected {d} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        data.extend(row);
    }
    let dim = dim.ok_or(SeriesError::Parse {
        line: 2,
        message: "no samples".into(),
    })?;
    let ts = TimeSeries::from_flat(dim, meta.dt, data)?;
    Ok((meta, ts))
}

fn parse_header(header: &str) -> Result<SeriesMeta, SeriesError> {
    let bad = |message: String| SeriesError::Parse { line: 1, message };
    let body = header
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '# benchmark=... dt=... seed=...' header".into()))?;
    let (mut benchmark, mut dt, mut seed) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header field '{field}'")))?;
        match key {
            "benchmark" => benchmark = Some(value.to_string()),
            "dt" => dt = Some(value.parse::<f64>().map_err(|e| bad(format!("dt: {e}")))?),
            "seed" => seed = Some(value.parse::<u64>().map_err(|e| bad(format!("seed: {e}")))?),
            _ => {}
        }
    }
    Ok(SeriesMeta {
        benchmark: benchmark.ok_or_else(|| bad("header lacks benchmark".into()))?,
        dt: dt.ok_or_else(|| bad("header lacks dt".into()))?,
        seed: seed.ok_or_else(|| bad("header lacks seed".into()))?,
    })
}
