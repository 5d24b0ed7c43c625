//! Plain-text trajectory files: one `x y` pair per line, trajectories
//! separated by blank lines.

use std::fmt::Write as _;
use std::path::Path;

use subtraj::{Point, Trajectory};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: expected two numbers, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: coordinates must be finite")]
    NonFinite { line: usize },
    #[error("dataset contains no trajectories")]
    Empty,
}

pub fn parse_dataset(text: &str) -> Result<Vec<Trajectory>, DatasetError> {
    let mut out = Vec::new();
    let mut cur: Vec<Point> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            if !cur.is_empty() {
                out.push(Trajectory::new(std::mem::take(&mut cur)).expect("validated vertices"));
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let parsed = match (it.next(), it.next(), it.next()) {
            (Some(x), Some(y), None) => x.parse::<f64>().ok().zip(y.parse::<f64>().ok()),
            _ => None,
        };
        let Some((x, y)) = parsed else {
            return Err(DatasetError::Malformed { line: k + 1, text: raw.to_string() });
        };
        if !x.is_finite() || !y.is_finite() {
            return Err(DatasetError::NonFinite { line: k + 1 });
        }
        cur.push(Point::new(x, y));
    }
    if !cur.is_empty() {
        out.push(Trajectory::new(cur).expect("validated vertices"));
    }
    if out.is_empty() {
        return Err(DatasetError::Empty);
    }
    Ok(out)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<Trajectory>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| DatasetError::Io { path: path.display().to_string(), source })?;
    parse_dataset(&text)
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_dataset(trajectories: &[Trajectory]) -> String {
    let mut s = String::new();
    for (k, t) in trajectories.iter().enumerate() {
        if k > 0 {
            s.push('\n');
        }
        for p in t.vertices() {
            writeln!(s, "{} {}", p.x, p.y).unwrap();
        }
    }
    s
}

pub fn write_dataset(path: impl AsRef<Path>, trajectories: &[Trajectory]) -> std::io::Result<()> {
    std::fs::write(path, format_dataset(trajectories))
}
