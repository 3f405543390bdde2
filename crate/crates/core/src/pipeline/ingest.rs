use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::PipelineError;
use crate::graph::Detection;

/// False-positive probability given to point detections, which carry no
/// confidence column.
pub const DEFAULT_POINT_BETA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFormat {
    /// `frame,id,x,y,w,h,conf[,...]`, positioned at box centres.
    #[default]
    MotCsv,
    /// `frame,x,y[,z]`.
    PointsCsv,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mot-csv" => Ok(InputFormat::MotCsv),
            "points-csv" => Ok(InputFormat::PointsCsv),
            other => Err(format!("unknown input format {other:?} (expected mot-csv or points-csv)")),
        }
    }
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFormat::MotCsv => "mot-csv",
            InputFormat::PointsCsv => "points-csv",
        })
    }
}

pub fn read_detections(path: &Path, format: InputFormat) -> Result<Vec<Detection<f64>>, PipelineError> {
    let label = path.display().to_string();
    let file = File::open(path).map_err(|e| PipelineError::Io {
        path: label.clone(),
        source: e,
    })?;
    parse_detections(file, format, &label)
}

/// Parses detections; the detection id is the 0-based data row index. A
/// first line that does not start with a number is taken as a header.
pub fn parse_detections<R: Read>(
    input: R,
    format: InputFormat,
    label: &str,
) -> Result<Vec<Detection<f64>>, PipelineError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let mut out = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| PipelineError::Parse {
            path: label.to_string(),
            line: e.position().map_or(k + 1, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        let err = |msg: String| PipelineError::Parse {
            path: label.to_string(),
            line,
            msg,
        };
        if record.iter().all(str::is_empty) {
            continue;
        }
        if out.is_empty() && k == 0 && record.get(0).is_some_and(|f| f.parse::<f64>().is_err()) {
            continue;
        }
        let num = |i: usize, name: &str| -> Result<f64, PipelineError> {
            let field = record.get(i).ok_or_else(|| err(format!("missing {name} column")))?;
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("bad {name} value {field:?}")))
        };
        let frame_field = record.get(0).unwrap_or("");
        let frame: u32 = frame_field
            .parse()
            .map_err(|_| err(format!("bad frame value {frame_field:?}")))?;
        let id = out.len() as u64;
        let det = match format {
            InputFormat::MotCsv => {
                if record.len() < 7 {
                    return Err(err(format!("expected at least 7 fields, got {}", record.len())));
                }
                let (x, y, w, h) = (num(2, "x")?, num(3, "y")?, num(4, "w")?, num(5, "h")?);
                let conf = num(6, "conf")?.clamp(0.0, 1.0);
                Detection::new(id, frame, vec![x + w / 2.0, y + h / 2.0], 1.0 - conf)
            }
            InputFormat::PointsCsv => {
                if !(3..=4).contains(&record.len()) {
                    return Err(err(format!("expected 3 or 4 fields, got {}", record.len())));
                }
                let pos = (1..record.len())
                    .map(|i| num(i, ["x", "y", "z"][i - 1]))
                    .collect::<Result<Vec<_>, _>>()?;
                Detection::new(id, frame, pos, DEFAULT_POINT_BETA)
            }
        };
        out.push(det);
    }
    if let Some(first) = out.first() {
        let dim = first.position.len();
        if let Some(bad) = out.iter().find(|d| d.position.len() != dim) {
            return Err(PipelineError::Parse {
                path: label.to_string(),
                line: bad.id as usize + 1,
                msg: format!("mixed dimensions ({dim} vs {})", bad.position.len()),
            });
        }
    }
    Ok(out)
}
