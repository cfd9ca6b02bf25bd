//! Grid output formats and a reader that accepts any of them.
//!
//! * text: a `# kind=… n=… seed=… index=… uniform=…` comment, then one line of
//!   space-separated symbols per row; designs separated by a blank line. Plain
//!   rows without the comment are accepted on input.
//! * json: one object per line, `{kind, n, p?, grid, seed, uniform, trace}`.
//!   A single object or an array of objects is accepted on input.
//! * csv: header `kind,n,p,seed,index,uniform,r1c1,…,rncn`, one design per
//!   record, cells row-major.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::sampler::{Sample, SampleTrace};
use super::Grid;
use crate::derange::DesignKind;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridFormat {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub kind: DesignKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    pub grid: Vec<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_uniform")]
    pub uniform: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<SampleTrace>,
}

fn default_uniform() -> bool {
    true
}

impl DesignRecord {
    pub fn from_sample(s: &Sample) -> Self {
        DesignRecord {
            kind: s.design.kind(),
            n: s.design.grid().n(),
            p: s.design.partition().map(|b| b.p()),
            grid: s.design.grid().rows(),
            seed: Some(s.trace.seed),
            uniform: s.trace.uniform,
            trace: Some(s.trace.clone()),
        }
    }
}

pub fn write_samples<W: Write>(samples: &[Sample], format: GridFormat, mut w: W) -> Result<()> {
    match format {
        GridFormat::Text => {
            for (i, s) in samples.iter().enumerate() {
                if i > 0 {
                    writeln!(w)?;
                }
                let t = &s.trace;
                write!(w, "# kind={} n={}", t.kind, t.n)?;
                if let Some(b) = s.design.partition() {
                    write!(w, " p={}", b.p())?;
                }
                writeln!(
                    w,
                    " seed={} index={} uniform={}",
                    t.seed, t.index, t.uniform
                )?;
                write!(w, "{}", s.design.grid())?;
            }
        }
        GridFormat::Json => {
            for s in samples {
                serde_json::to_writer(&mut w, &DesignRecord::from_sample(s))
                    .map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(w)?;
            }
        }
        GridFormat::Csv => {
            let mut cw = csv::Writer::from_writer(&mut w);
            if let Some(first) = samples.first() {
                let n = first.design.grid().n();
                let mut header: Vec<String> = ["kind", "n", "p", "seed", "index", "uniform"]
                    .map(String::from)
                    .to_vec();
                for r in 1..=n {
                    for c in 1..=n {
                        header.push(format!("r{r}c{c}"));
                    }
                }
                cw.write_record(&header).map_err(csv_err)?;
            }
            for s in samples {
                let t = &s.trace;
                let mut rec = vec![
                    t.kind.to_string(),
                    t.n.to_string(),
                    s.design
                        .partition()
                        .map(|b| b.p().to_string())
                        .unwrap_or_default(),
                    t.seed.to_string(),
                    t.index.to_string(),
                    t.uniform.to_string(),
                ];
                rec.extend(s.design.grid().cells().iter().map(|v| v.to_string()));
                cw.write_record(&rec).map_err(csv_err)?;
            }
            cw.flush()?;
        }
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// A grid read back from a file, with whatever metadata the format carried.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedGrid {
    /// Human-readable position in the input, e.g. `"design 3"`.
    pub label: String,
    pub kind: Option<DesignKind>,
    pub p: Option<usize>,
    pub uniform: Option<bool>,
    pub grid: Grid,
}

/// Reads every grid in `text`, detecting the format from its first
/// non-blank character (`{`/`[` for JSON, a `kind,` header for CSV, anything
/// else is text).
pub fn read_grids(text: &str) -> Result<Vec<ParsedGrid>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        read_json(trimmed)
    } else if trimmed.starts_with("kind,") {
        read_csv(trimmed)
    } else {
        read_text(text)
    }
}

fn read_json(text: &str) -> Result<Vec<ParsedGrid>> {
    let mut records = Vec::new();
    for value in serde_json::Deserializer::from_str(text).into_iter::<serde_json::Value>() {
        let value = value.map_err(|e| Error::Parse(e.to_string()))?;
        match value {
            serde_json::Value::Array(items) => records.extend(items),
            v => records.push(v),
        }
    }
    records
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let r: DesignRecord = serde_json::from_value(v)
                .map_err(|e| Error::Parse(format!("design {}: {e}", i + 1)))?;
            let grid = Grid::from_rows(&r.grid)?;
            if grid.n() != r.n {
                return Err(Error::Parse(format!(
                    "design {}: declared n={} but grid is {}x{}",
                    i + 1,
                    r.n,
                    grid.n(),
                    grid.n()
                )));
            }
            Ok(ParsedGrid {
                label: format!("design {}", i + 1),
                kind: Some(r.kind),
                p: r.p,
                uniform: Some(r.uniform),
                grid,
            })
        })
        .collect()
}

fn read_csv(text: &str) -> Result<Vec<ParsedGrid>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |why: &str| Error::Parse(format!("record {}: {why}", i + 1));
        let kind = match rec.get(0) {
            Some("latin") => DesignKind::Latin,
            Some("sudoku") => DesignKind::Sudoku,
            _ => return Err(bad("unknown kind")),
        };
        let n: usize = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad n"))?;
        let p = rec
            .get(2)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse())
            .transpose()
            .map_err(|_| bad("bad p"))?;
        let uniform = rec.get(5).map(|s| s == "true");
        let cells = rec
            .iter()
            .skip(6)
            .map(|s| s.parse::<u8>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("bad cell"))?;
        out.push(ParsedGrid {
            label: format!("record {}", i + 1),
            kind: Some(kind),
            p,
            uniform,
            grid: Grid::new(n, cells)?,
        });
    }
    Ok(out)
}

fn read_text(text: &str) -> Result<Vec<ParsedGrid>> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut meta: Option<(Option<DesignKind>, Option<usize>, Option<bool>)> = None;

    let mut flush = |rows: &mut Vec<Vec<u8>>,
                     meta: &mut Option<(Option<DesignKind>, Option<usize>, Option<bool>)>|
     -> Result<()> {
        if rows.is_empty() {
            return Ok(());
        }
        let (kind, p, uniform) = meta.take().unwrap_or((None, None, None));
        let label = format!("design {}", out.len() + 1);
        let grid = Grid::from_rows(rows).map_err(|e| Error::Parse(format!("{label}: {e}")))?;
        rows.clear();
        out.push(ParsedGrid {
            label,
            kind,
            p,
            uniform,
            grid,
        });
        Ok(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() {
            flush(&mut rows, &mut meta)?;
        } else if let Some(comment) = t.strip_prefix('#') {
            flush(&mut rows, &mut meta)?;
            let mut kind = None;
            let mut p = None;
            let mut uniform = None;
            for kv in comment.split_whitespace() {
                match kv.split_once('=') {
                    Some(("kind", "latin")) => kind = Some(DesignKind::Latin),
                    Some(("kind", "sudoku")) => kind = Some(DesignKind::Sudoku),
                    Some(("p", v)) => p = v.parse().ok(),
                    Some(("uniform", v)) => uniform = Some(v == "true"),
                    _ => {}
                }
            }
            meta = Some((kind, p, uniform));
        } else {
            let row = t
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u8>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("line {}: {line:?}", lineno + 1)))?;
            rows.push(row);
        }
    }
    flush(&mut rows, &mut meta)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_text_blocks() {
        let text = "1 2\n2 1\n\n1 2 3\n2 3 1\n3 1 2\n";
        let g = read_grids(text).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].grid.n(), 3);
        assert_eq!(g[0].kind, None);
    }

    #[test]
    fn text_header_sets_kind() {
        let text = "# kind=sudoku n=4 p=2 seed=1 index=0 uniform=false\n\
                    1 3 2 4\n2 4 1 3\n3 1 4 2\n4 2 3 1\n";
        let g = read_grids(text).unwrap();
        assert_eq!(g[0].kind, Some(DesignKind::Sudoku));
        assert_eq!(g[0].p, Some(2));
        assert_eq!(g[0].uniform, Some(false));
    }

    #[test]
    fn json_single_and_array() {
        let one = r#"{"kind":"latin","n":2,"grid":[[1,2],[2,1]]}"#;
        let g = read_grids(one).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].uniform, Some(true));
        let arr = format!("[{one},{one}]");
        assert_eq!(read_grids(&arr).unwrap().len(), 2);
        assert!(read_grids(r#"{"kind":"latin","n":3,"grid":[[1,2],[2,1]]}"#).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(read_grids("1 2\n2\n").is_err());
        assert!(read_grids("1 x\n").is_err());
    }
}
