//! Landmark CSV files.
//!
//! One shape per row, `x₁,y₁,…,x_K,y_K`, after a header line `# landmarks=K`.
//! Blank lines and further `#` lines are skipped.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use manifold_mom::Point64;

use crate::error::{CliError, Result};
use crate::table::write_text;

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkDataset {
    /// Preshapes: centred, unit-norm configurations.
    pub shapes: Vec<Point64>,
    pub landmarks: usize,
    pub source: PathBuf,
}

impl LandmarkDataset {
    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }
}

pub fn load_landmarks(path: &Path) -> Result<LandmarkDataset> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_landmarks(&text, path)
}

/// Parses landmark CSV text; `source` is only used in error messages and the result.
pub fn parse_landmarks(text: &str, source: &Path) -> Result<LandmarkDataset> {
    let err = |line: usize, column: usize, message: String| CliError::Parse {
        path: source.to_path_buf(),
        line,
        column,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(1, 1, "empty file".into()))?;
    let landmarks = header
        .trim()
        .strip_prefix('#')
        .and_then(|h| h.trim().strip_prefix("landmarks="))
        .ok_or_else(|| {
            err(
                hline,
                1,
                format!("expected header '# landmarks=K', found '{}'", header.trim()),
            )
        })?;
    let landmarks: usize = match landmarks.trim().parse() {
        Ok(k) if k >= 3 => k,
        _ => {
            return Err(err(
                hline,
                1,
                format!("landmark count '{landmarks}' is not an integer of at least 3"),
            ))
        }
    };

    let mut shapes = Vec::new();
    for (line, row) in lines {
        if row.trim_start().starts_with('#') {
            continue;
        }
        let mut values = Vec::with_capacity(2 * landmarks);
        for (i, field) in row.split(',').enumerate() {
            let column = i + 1;
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| err(line, column, format!("'{}' is not a number", field.trim())))?;
            if !v.is_finite() {
                return Err(err(line, column, format!("{v} is not finite")));
            }
            values.push(v);
        }
        if values.len() != 2 * landmarks {
            let column = values.len().min(2 * landmarks) + 1;
            return Err(err(
                line,
                column,
                format!("expected {} values, found {}", 2 * landmarks, values.len()),
            ));
        }
        let pts: Vec<[f64; 2]> = values.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let n = landmarks as f64;
        let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
        let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
        let size = pts
            .iter()
            .map(|p| (p[0] - cx).powi(2) + (p[1] - cy).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale = pts
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0, f64::max);
        if !(size > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
            return Err(CliError::DegenerateShape {
                path: source.to_path_buf(),
                line,
            });
        }
        shapes.push(Point64::shape_from_landmarks(&pts)?);
    }
    Ok(LandmarkDataset {
        shapes,
        landmarks,
        source: source.to_path_buf(),
    })
}

/// Shapes as landmark CSV. Values use the shortest exact decimal form, so
/// reading the file back gives the same preshapes.
pub fn format_landmarks(shapes: &[Point64]) -> String {
    let k = shapes.first().map_or(0, |s| s.coords().len() / 2);
    let mut out = format!("# landmarks={k}\n");
    for s in shapes {
        for (i, v) in s.coords().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_landmarks(path: &Path, shapes: &[Point64]) -> Result<()> {
    write_text(path, &format_landmarks(shapes))
}

/// The synthetic 18-hand dataset shipped with the crate (72 landmarks per hand).
pub const BUNDLED_HANDS: &str = include_str!("../data/hands_synthetic.csv");

pub fn bundled_hands() -> Result<LandmarkDataset> {
    parse_landmarks(BUNDLED_HANDS, Path::new("<bundled>/hands_synthetic.csv"))
}
