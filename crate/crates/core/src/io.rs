//! Plain-text formats: edge lists, signals, subband and curve CSVs, kernel
//! specifications and basis dumps.
//!
//! Reals are written with Rust's shortest round-trip formatting, so every
//! file parses back to bit-identical values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::NlaCurve;
use crate::filterbank::{
    design_butterworth_kernel, design_ideal_kernel, FilterKernel, SubbandCoefficients,
};
use crate::graph::Graph;
use crate::spectral::SpectralBasis;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("invalid number `{tok}`")))
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// `u v w` per line, each undirected edge once. A `# vertices <n>` header
/// preserves trailing isolated vertices.
pub fn write_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "# vertices {}", g.n()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w).unwrap();
    }
    out
}

pub fn read_edge_list(text: &str) -> Result<Graph> {
    let mut declared = None;
    for line in text.lines() {
        let mut toks = line.trim().trim_start_matches('#').split_whitespace();
        if line.trim_start().starts_with('#') && toks.next() == Some("vertices") {
            declared = toks.next().and_then(|t| t.parse::<usize>().ok());
        }
    }
    let mut edges = Vec::new();
    for (line, content) in data_lines(text) {
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(line, "expected `u v w`"));
        }
        let idx = |t: &str| t.parse::<usize>().map_err(|_| parse_err(line, format!("invalid vertex `{t}`")));
        edges.push((idx(toks[0])?, idx(toks[1])?, parse_f64(toks[2], line)?));
    }
    let inferred = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
    Graph::new(declared.unwrap_or(inferred), &edges)
}

/// One value per line, line `i` is vertex `i`.
pub fn write_signal(values: &[f64]) -> String {
    let mut out = String::with_capacity(values.len() * 24);
    for v in values {
        writeln!(out, "{v}").unwrap();
    }
    out
}

pub fn read_signal(text: &str) -> Result<Vec<f64>> {
    data_lines(text).map(|(line, l)| parse_f64(l, line)).collect()
}

pub fn write_subbands(sub: &SubbandCoefficients) -> String {
    let mut out = String::from("d_lp,d_hp\n");
    for (a, b) in sub.d_lp.iter().zip(&sub.d_hp) {
        writeln!(out, "{a},{b}").unwrap();
    }
    out
}

fn read_two_columns(text: &str, header: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h.replace(' ', "") == header => {}
        Some((line, _)) => return Err(parse_err(line, format!("expected header `{header}`"))),
        None => return Err(parse_err(1, "empty file")),
    }
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (line, l) in lines {
        let (x, y) = l.split_once(',').ok_or_else(|| parse_err(line, "expected two columns"))?;
        a.push(parse_f64(x, line)?);
        b.push(parse_f64(y, line)?);
    }
    Ok((a, b))
}

pub fn read_subbands(text: &str) -> Result<SubbandCoefficients> {
    let (d_lp, d_hp) = read_two_columns(text, "d_lp,d_hp")?;
    Ok(SubbandCoefficients { d_lp, d_hp })
}

pub fn write_nla_curve(curve: &NlaCurve) -> String {
    let mut out = String::from("fraction,snr_db\n");
    for (p, s) in curve.fractions.iter().zip(&curve.snr_db) {
        writeln!(out, "{p},{s}").unwrap();
    }
    out
}

pub fn read_nla_curve(text: &str) -> Result<NlaCurve> {
    let (fractions, snr_db) = read_two_columns(text, "fraction,snr_db")?;
    Ok(NlaCurve { fractions, snr_db })
}

pub fn write_per_run(per_run: &[f64]) -> String {
    let mut out = String::from("run,delta_snr_db\n");
    for (r, v) in per_run.iter().enumerate() {
        writeln!(out, "{r},{v}").unwrap();
    }
    out
}

/// Eigenvalues as one CSV column and eigenvectors as an `N x N` CSV matrix
/// (column `k` is eigenvector `k`). Debug output only.
pub fn write_basis(basis: &SpectralBasis) -> (String, String) {
    let mut values = String::from("lambda\n");
    for l in basis.eigenvalues() {
        writeln!(values, "{l}").unwrap();
    }
    let mut vectors = String::new();
    for row in basis.eigenvectors().row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(vectors, "{}", cells.join(",")).unwrap();
    }
    (values, vectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelDesignName {
    Ideal,
    Butterworth,
    Custom,
}

/// Serializable kernel description.
///
/// The cut-off is either `lambda_cut` or the eigenvalue at `cut_index`; when
/// both are absent it defaults to `lambda_{N/2-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub design: KernelDesignName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_cut: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl KernelSpec {
    pub fn ideal(epsilon: f64) -> Self {
        Self {
            design: KernelDesignName::Ideal,
            lambda_cut: None,
            cut_index: None,
            epsilon: Some(epsilon),
            beta: None,
            values: None,
        }
    }

    pub fn butterworth(beta: u32) -> Self {
        Self {
            design: KernelDesignName::Butterworth,
            beta: Some(beta),
            epsilon: None,
            ..Self::ideal(0.0)
        }
    }

    /// Parses `ideal`, `ideal:<eps>`, `butterworth:<beta>` or `custom` (the
    /// last needs `values` filled in separately).
    pub fn parse_short(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::InvalidKernel(format!("cannot parse kernel `{s}`"));
        match (name, arg) {
            ("ideal", None) => Ok(Self::ideal(0.0)),
            ("ideal", Some(a)) => Ok(Self::ideal(a.parse().map_err(|_| bad())?)),
            ("butterworth" | "bw", Some(a)) => Ok(Self::butterworth(a.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidKernel(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("kernel spec serializes")
    }

    pub fn resolve_cut(&self, basis: &SpectralBasis) -> Result<f64> {
        let n = basis.n();
        match (self.lambda_cut, self.cut_index) {
            (Some(l), _) => Ok(l),
            (None, Some(i)) if i < n => Ok(basis.eigenvalues()[i]),
            (None, Some(i)) => Err(Error::InvalidKernel(format!("cut_index {i} out of range"))),
            (None, None) if n >= 2 => Ok(basis.eigenvalues()[n / 2 - 1]),
            (None, None) => Err(Error::InvalidKernel("basis too small".into())),
        }
    }

    pub fn build(&self, basis: &SpectralBasis) -> Result<FilterKernel> {
        match self.design {
            KernelDesignName::Ideal => {
                design_ideal_kernel(basis, self.resolve_cut(basis)?, self.epsilon.unwrap_or(0.0))
            }
            KernelDesignName::Butterworth => {
                let beta = self
                    .beta
                    .ok_or_else(|| Error::InvalidKernel("butterworth needs beta".into()))?;
                design_butterworth_kernel(basis, self.resolve_cut(basis)?, beta)
            }
            KernelDesignName::Custom => {
                let values = self
                    .values
                    .clone()
                    .ok_or_else(|| Error::InvalidKernel("custom kernel needs values".into()))?;
                if values.len() != basis.n() {
                    return Err(Error::LengthMismatch {
                        expected: basis.n(),
                        actual: values.len(),
                    });
                }
                Ok(FilterKernel::custom(values))
            }
        }
    }

    /// Short label used in result files, e.g. `SGFBSS-B5`.
    pub fn label(&self) -> String {
        match self.design {
            KernelDesignName::Ideal => "SGFBSS-I".into(),
            KernelDesignName::Butterworth => format!("SGFBSS-B{}", self.beta.unwrap_or(0)),
            KernelDesignName::Custom => "SGFBSS-custom".into(),
        }
    }
}
