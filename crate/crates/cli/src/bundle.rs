//! JSON interchange: matrices with explicit `[re, im]` entry pairs and map
//! bundles carrying dims, partition, factors, and the vec-action matrix.
//!
//! Writing is canonical — keys sorted, two-space indent, floats printed with
//! 17 significant digits — so write → read → write is byte-identical.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use rankone::forms::Partition;
use rankone::{ComplexMatrix, DimsProfile};

/// Dense complex matrix on disk: row-major nested arrays of `[re, im]`.
#[derive(Debug, Clone, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let data = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| {
                        let z = m.get(r, c);
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect();
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.data.len() != self.rows {
            return Err(format!(
                "matrix file declares {} rows but data has {}",
                self.rows,
                self.data.len()
            ));
        }
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for row in &self.data {
            if row.len() != self.cols {
                return Err(format!(
                    "matrix file declares {} cols but a row has {}",
                    self.cols,
                    row.len()
                ));
            }
            entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        ComplexMatrix::new(self.rows, self.cols, entries).map_err(|e| e.to_string())
    }

    /// Standalone canonical JSON document.
    pub fn canonical_json(&self) -> String {
        let mut out = String::new();
        write_matrix(&mut out, self, 0);
        out.push('\n');
        out
    }
}

/// Serialized conclusion data of a preserver: dims, partition, `M`, `N`, and
/// optionally the dense vec-action matrix `phi`. A bundle may instead carry
/// only `phi` (recovery input).
#[derive(Debug, Clone, Deserialize)]
pub struct MapBundle {
    pub dims: Vec<usize>,
    #[serde(default)]
    pub m: Option<MatrixFile>,
    #[serde(default)]
    pub n: Option<MatrixFile>,
    #[serde(default)]
    pub partition: Option<[Vec<usize>; 4]>,
    #[serde(default)]
    pub phi: Option<MatrixFile>,
}

impl MapBundle {
    pub fn dims_profile(&self) -> Result<DimsProfile, String> {
        DimsProfile::new(self.dims.clone()).map_err(|e| e.to_string())
    }

    pub fn partition_value(&self) -> Result<Option<Partition>, String> {
        let Some(sets) = &self.partition else {
            return Ok(None);
        };
        let k = self.dims.len();
        let as_set = |v: &Vec<usize>| -> BTreeSet<usize> { v.iter().cloned().collect() };
        Partition::new(
            k,
            as_set(&sets[0]),
            as_set(&sets[1]),
            as_set(&sets[2]),
            as_set(&sets[3]),
        )
        .map(Some)
        .map_err(|e| e.to_string())
    }

    pub fn canonical_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        write!(out, "  \"dims\": {}", int_array(&self.dims)).unwrap();
        if let Some(m) = &self.m {
            out.push_str(",\n  \"m\": ");
            write_matrix(&mut out, m, 2);
        }
        if let Some(n) = &self.n {
            out.push_str(",\n  \"n\": ");
            write_matrix(&mut out, n, 2);
        }
        if let Some(p) = &self.partition {
            out.push_str(",\n  \"partition\": [");
            for (i, class) in p.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&int_array(class));
            }
            out.push(']');
        }
        if let Some(phi) = &self.phi {
            out.push_str(",\n  \"phi\": ");
            write_matrix(&mut out, phi, 2);
        }
        out.push_str("\n}\n");
        out
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed bundle: {e}"))
    }

    pub fn write(&self, path: &Path) -> Result<(), String> {
        std::fs::write(path, self.canonical_json())
            .map_err(|e| format!("cannot write {}: {e}", path.display()))
    }
}

pub fn read_matrix_file(path: &Path) -> Result<MatrixFile, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("malformed matrix file: {e}"))
}

/// 17 significant digits, fixed scientific layout.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn int_array(v: &[usize]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn write_matrix(out: &mut String, m: &MatrixFile, indent: usize) {
    let pad = " ".repeat(indent);
    out.push_str("{\n");
    write!(out, "{pad}  \"cols\": {},\n", m.cols).unwrap();
    write!(out, "{pad}  \"data\": [\n").unwrap();
    for (r, row) in m.data.iter().enumerate() {
        write!(out, "{pad}    [").unwrap();
        for (c, &[re, im]) in row.iter().enumerate() {
            if c > 0 {
                out.push_str(", ");
            }
            write!(out, "[{}, {}]", fmt_f64(re), fmt_f64(im)).unwrap();
        }
        out.push(']');
        if r + 1 < m.data.len() {
            out.push(',');
        }
        out.push('\n');
    }
    write!(out, "{pad}  ],\n").unwrap();
    write!(out, "{pad}  \"rows\": {}\n", m.rows).unwrap();
    write!(out, "{pad}}}").unwrap();
}

/// Parses `"2,3"` into factor dimensions.
pub fn parse_dims_arg(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad dimension {tok:?}"))
        })
        .collect()
}

/// Parses the partition syntax `"1|2||"`: four |-separated comma lists of
/// 1-based indices (`P₁|P₂|P₃|P₄`).
pub fn parse_partition_arg(s: &str, k: usize) -> Result<Partition, String> {
    let groups: Vec<&str> = s.split('|').collect();
    if groups.len() != 4 {
        return Err(format!(
            "partition needs four |-separated groups, got {}",
            groups.len()
        ));
    }
    let mut sets: Vec<BTreeSet<usize>> = Vec::with_capacity(4);
    for group in groups {
        let mut set = BTreeSet::new();
        for tok in group.split(',') {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            let i: usize = tok.parse().map_err(|_| format!("bad index {tok:?}"))?;
            set.insert(i);
        }
        sets.push(set);
    }
    Partition::new(
        k,
        sets[0].clone(),
        sets[1].clone(),
        sets[2].clone(),
        sets[3].clone(),
    )
    .map_err(|e| e.to_string())
}

pub fn format_partition(p: &Partition) -> String {
    (1..=4)
        .map(|ell| {
            p.set(ell)
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join("|")
}

pub fn partition_to_arrays(p: &Partition) -> [Vec<usize>; 4] {
    [
        p.set(1).iter().cloned().collect(),
        p.set(2).iter().cloned().collect(),
        p.set(3).iter().cloned().collect(),
        p.set(4).iter().cloned().collect(),
    ]
}
