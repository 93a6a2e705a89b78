//! JSON document shapes for batch verification runs. Matrices travel as
//! row-major [re, im] pairs so reports stay language-neutral and lossless
//! for doubles.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use locopy_core::ComplexMatrix;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixDocument {
    /// [rows, cols]
    pub dims: [usize; 2],
    /// Row-major [re, im] pairs, dims[0] * dims[1] of them.
    pub data: Vec<[f64; 2]>,
}

impl MatrixDocument {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.rows * m.cols);
        for i in 0..m.rows {
            for j in 0..m.cols {
                let v = m.get(i, j);
                data.push([v.re, v.im]);
            }
        }
        MatrixDocument {
            dims: [m.rows, m.cols],
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let [rows, cols] = self.dims;
        if self.data.len() != rows * cols {
            bail!(
                "matrix document claims {rows}x{cols} but carries {} entries",
                self.data.len()
            );
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            bail!("matrix document contains a non-finite number");
        }
        let data: Vec<Complex64> = self
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        ComplexMatrix::new(rows, cols, data).map_err(|e| anyhow::anyhow!("{e:?}"))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading matrix document {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing matrix document {}", path.display()))
    }
}

/// One product term of a measurement element: the element operator is the
/// sum over its terms of a (x) b.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmTermDocument {
    pub a: MatrixDocument,
    pub b: MatrixDocument,
}

/// Separable measurement given by explicit product terms per element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PovmDocument {
    pub dim: usize,
    pub elements: Vec<Vec<PovmTermDocument>>,
}

impl PovmDocument {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading measurement document {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing measurement document {}", path.display()))
    }
}

/// Final machine-readable result of one CLI run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// One of "pass", "fail", "no-witness", "unproven-regime".
    pub verdict: String,
    /// Named scalar diagnostics, sorted by key for stable output.
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<serde_json::Value>,
    pub caveats: Vec<String>,
}

pub const VERDICT_PASS: &str = "pass";
pub const VERDICT_FAIL: &str = "fail";
pub const VERDICT_NO_WITNESS: &str = "no-witness";
pub const VERDICT_UNPROVEN: &str = "unproven-regime";

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            verdict: VERDICT_FAIL.to_string(),
            residuals: BTreeMap::new(),
            witnesses: None,
            caveats: Vec::new(),
        }
    }

    /// Exit code is a function of the verdict alone: 0 for pass, 1 for
    /// every non-pass verdict. Usage errors exit 2 before a report exists.
    pub fn exit_code(&self) -> i32 {
        if self.verdict == VERDICT_PASS {
            0
        } else {
            1
        }
    }
}
