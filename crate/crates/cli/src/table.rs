//! Per-cell replicate values and their CSV summaries.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

/// Header of the mean-estimation result table.
pub const RESULT_HEADER: &str =
    "k,m,rho_mom_mean,rho_mom_se,rho_submean_mean,rho_submean_se,runs,failures";

/// Header of the PGA/RPGA residual table.
pub const MSSR_HEADER: &str = "k,method,m,dim,mssr_mean,mssr_se,runs,failures";

/// Mean and standard error of the successful replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Summary {
    pub fn of(values: &[Option<f64>]) -> Self {
        let ok: Vec<f64> = values.iter().flatten().copied().collect();
        let count = ok.len();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                count,
            };
        }
        let mean = ok.iter().sum::<f64>() / count as f64;
        let se = if count > 1 {
            let var = ok.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            f64::NAN
        };
        Self { mean, se, count }
    }
}

/// Summary of the replicate-wise differences `a − b` over replicates where both succeeded.
pub fn paired_difference(a: &[Option<f64>], b: &[Option<f64>]) -> Summary {
    let d: Vec<Option<f64>> = a.iter().zip(b).map(|(x, y)| Some((*x)? - (*y)?)).collect();
    Summary::of(&d)
}

fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.10}")
    }
}

/// One (outlier count, group count) cell of a mean-estimation experiment.
/// Entry `r` of each vector is replicate `r`, `None` when it failed.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultCell {
    pub k: usize,
    pub m: usize,
    /// Distance from the median-of-means estimate to the true mean.
    pub rho_mom: Vec<Option<f64>>,
    /// Average distance from the subset means to the true mean.
    pub rho_submean: Vec<Option<f64>>,
}

impl ResultCell {
    pub fn failures(&self) -> usize {
        self.rho_mom.iter().filter(|x| x.is_none()).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub cells: Vec<ResultCell>,
}

impl ResultTable {
    pub fn cell(&self, k: usize, m: usize) -> Option<&ResultCell> {
        self.cells.iter().find(|c| c.k == k && c.m == m)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(RESULT_HEADER);
        out.push('\n');
        for c in &self.cells {
            let mom = Summary::of(&c.rho_mom);
            let sub = Summary::of(&c.rho_submean);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.k,
                c.m,
                number(mom.mean),
                number(mom.se),
                number(sub.mean),
                number(sub.se),
                c.rho_mom.len(),
                c.failures()
            );
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgaMethod {
    Pga,
    Rpga,
}

impl PgaMethod {
    fn as_str(self) -> &'static str {
        match self {
            Self::Pga => "pga",
            Self::Rpga => "rpga",
        }
    }
}

/// Mean squared residual of the clean data to the `dim`-dimensional
/// submanifold fitted by `method` with `m` groups (`m = 1` for PGA).
#[derive(Debug, Clone, PartialEq)]
pub struct MssrCell {
    pub k: usize,
    pub method: PgaMethod,
    pub m: usize,
    pub dim: usize,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MssrTable {
    pub cells: Vec<MssrCell>,
}

impl MssrTable {
    pub fn cell(&self, k: usize, method: PgaMethod, m: usize, dim: usize) -> Option<&MssrCell> {
        self.cells.iter().find(|c| {
            c.k == k && c.method == method && c.dim == dim && (method == PgaMethod::Pga || c.m == m)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(MSSR_HEADER);
        out.push('\n');
        for c in &self.cells {
            let s = Summary::of(&c.values);
            let failures = c.values.iter().filter(|x| x.is_none()).count();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.k,
                c.method.as_str(),
                c.m,
                c.dim,
                number(s.mean),
                number(s.se),
                c.values.len(),
                failures
            );
        }
        out
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}
