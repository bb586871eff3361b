//! File formats for the pipeline stages. Every polynomial is carried as a
//! string in the shared text grammar, so the artifacts stay readable and
//! byte-stable across runs.

use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::behavior::EquationModule;
use crate::dnnl::{IntegralityCertificate, NormalizationResult, UnimodularTransform};
use crate::error::ParseError;
use crate::flow::TrajectoryWindow;
use crate::laurent::{parse_poly, ExpVec, LaurentMatrix, LaurentPoly};
use crate::realization::{FirstOrderRealization, Generator};
use crate::state::StateSpaceReport;

fn perr(message: impl Into<String>) -> ParseError {
    ParseError {
        column: 0,
        message: message.into(),
    }
}

/// `{ n, q, R: [[poly-string, ...], ...] }`
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SystemFile {
    pub n: usize,
    pub q: usize,
    #[serde(rename = "R")]
    pub r: Vec<Vec<String>>,
}

impl SystemFile {
    pub fn from_system(sys: &EquationModule) -> Self {
        SystemFile {
            n: sys.nvars(),
            q: sys.q(),
            r: sys
                .rows()
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
        }
    }

    pub fn to_system(&self) -> Result<EquationModule, ParseError> {
        let mut rows = Vec::new();
        for row in &self.r {
            if row.len() != self.q {
                return Err(perr(format!(
                    "row has {} entries, expected q = {}",
                    row.len(),
                    self.q
                )));
            }
            let parsed: Result<Vec<LaurentPoly>, ParseError> =
                row.iter().map(|s| parse_poly(self.n, s)).collect();
            rows.push(parsed?);
        }
        EquationModule::new(self.n, self.q, rows).map_err(|e| perr(e.to_string()))
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CertificateEntry {
    /// 1-based variable index.
    pub var: usize,
    pub poly: String,
}

/// `{ T, d, transformed_R, certificates }`
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct NormalizationFile {
    #[serde(rename = "T")]
    pub t: Vec<Vec<i64>>,
    pub d: usize,
    pub n: usize,
    pub q: usize,
    #[serde(rename = "transformed_R")]
    pub transformed_r: Vec<Vec<String>>,
    pub certificates: Vec<CertificateEntry>,
}

impl NormalizationFile {
    pub fn from_result(norm: &NormalizationResult) -> Self {
        NormalizationFile {
            t: norm.t.matrix().to_vec(),
            d: norm.d,
            n: norm.transformed.nvars(),
            q: norm.transformed.q(),
            transformed_r: norm
                .transformed
                .rows()
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
            certificates: norm
                .certificates
                .iter()
                .map(|c| CertificateEntry {
                    var: c.var + 1,
                    poly: c.poly.to_string(),
                })
                .collect(),
        }
    }

    pub fn to_result(&self) -> Result<NormalizationResult, ParseError> {
        let t = UnimodularTransform::new(self.t.clone()).map_err(|e| perr(e.to_string()))?;
        let sys_file = SystemFile {
            n: self.n,
            q: self.q,
            r: self.transformed_r.clone(),
        };
        let transformed = sys_file.to_system()?;
        let mut certificates = Vec::new();
        for c in &self.certificates {
            let poly = parse_poly(self.n, &c.poly)?;
            let degree = poly
                .coeffs_in_var(c.var - 1)
                .keys()
                .last()
                .copied()
                .unwrap_or(0) as usize;
            certificates.push(IntegralityCertificate {
                var: c.var - 1,
                poly,
                degree,
            });
        }
        Ok(NormalizationResult {
            t,
            d: self.d,
            transformed,
            certificates,
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct GeneratorEntry {
    pub monomial: String,
    pub basis: usize,
}

fn matrix_to_strings(m: &LaurentMatrix) -> Vec<Vec<String>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m.entry(i, j).to_string()).collect())
        .collect()
}

fn matrix_from_strings(
    nvars: usize,
    cols: usize,
    rows: &[Vec<String>],
) -> Result<LaurentMatrix, ParseError> {
    if rows.is_empty() {
        return Ok(LaurentMatrix::empty(nvars, cols));
    }
    let mut out = Vec::new();
    for row in rows {
        let parsed: Result<Vec<LaurentPoly>, ParseError> =
            row.iter().map(|s| parse_poly(nvars, s)).collect();
        out.push(parsed?);
    }
    Ok(LaurentMatrix::from_rows(nvars, out))
}

/// `{ d, gamma, generators, X, A, C, certificates }`
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct RealizationFile {
    pub d: usize,
    pub gamma: usize,
    pub generators: Vec<GeneratorEntry>,
    #[serde(rename = "X")]
    pub x: Vec<Vec<String>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<String>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<String>>,
    pub certificates: Vec<CertificateEntry>,
    #[serde(rename = "transformed_R")]
    pub transformed_r: Vec<Vec<String>>,
}

impl RealizationFile {
    pub fn from_realization(real: &FirstOrderRealization) -> Self {
        RealizationFile {
            d: real.d,
            gamma: real.gamma,
            generators: real
                .generators
                .iter()
                .map(|g| GeneratorEntry {
                    monomial: LaurentPoly::monomial(
                        real.n,
                        g.exp.clone(),
                        BigRational::from_integer(1.into()),
                    )
                    .to_string(),
                    basis: g.basis + 1,
                })
                .collect(),
            x: matrix_to_strings(&real.x),
            a: real.a.iter().map(matrix_to_strings).collect(),
            c: matrix_to_strings(&real.c),
            certificates: real
                .certificates
                .iter()
                .map(|c| CertificateEntry {
                    var: c.var + 1,
                    poly: c.poly.to_string(),
                })
                .collect(),
            transformed_r: real
                .system
                .rows()
                .iter()
                .map(|row| row.iter().map(|p| p.to_string()).collect())
                .collect(),
        }
    }

    pub fn to_realization(&self) -> Result<FirstOrderRealization, ParseError> {
        let n = self.d + self.a.len();
        let q = self.c.len();
        let sys_file = SystemFile {
            n,
            q,
            r: self.transformed_r.clone(),
        };
        let sys = sys_file.to_system()?;
        let mut certificates = Vec::new();
        for c in &self.certificates {
            let poly = parse_poly(n, &c.poly)?;
            let degree = poly
                .coeffs_in_var(c.var - 1)
                .keys()
                .last()
                .copied()
                .unwrap_or(0) as usize;
            certificates.push(IntegralityCertificate {
                var: c.var - 1,
                poly,
                degree,
            });
        }
        // rebuild and cross-check the declared pieces
        let real = FirstOrderRealization::build(&sys, self.d, certificates)
            .map_err(|e| perr(e.to_string()))?;
        let x = matrix_from_strings(self.d, self.gamma, &self.x)?;
        if matrix_to_strings(&real.x) != matrix_to_strings(&x) {
            return Err(perr("stored X differs from the rebuilt relation matrix"));
        }
        Ok(real)
    }

    /// Parse only the declared matrices without rebuilding (used by solve).
    pub fn generators_parsed(&self, n: usize) -> Result<Vec<Generator>, ParseError> {
        let mut out = Vec::new();
        for g in &self.generators {
            let p = parse_poly(n, &g.monomial)?;
            let exp = p
                .support()
                .next()
                .cloned()
                .unwrap_or_else(|| ExpVec::zeros(n));
            out.push(Generator {
                exp,
                basis: g.basis - 1,
            });
        }
        Ok(out)
    }
}

/// `{ dim, lo, hi, width, values }` with row-major rational strings.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TrajectoryFile {
    pub dim: usize,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
    pub width: usize,
    pub values: Vec<String>,
}

impl TrajectoryFile {
    pub fn from_window(w: &TrajectoryWindow) -> Self {
        TrajectoryFile {
            dim: w.dim(),
            lo: w.lo().to_vec(),
            hi: w.hi().to_vec(),
            width: w.width(),
            values: w.values().iter().map(|v| v.to_string()).collect(),
        }
    }

    pub fn to_window(&self) -> Result<TrajectoryWindow, ParseError> {
        if self.lo.len() != self.dim || self.hi.len() != self.dim {
            return Err(perr("lo/hi length does not match dim"));
        }
        if self.lo.iter().zip(&self.hi).any(|(a, b)| a > b) {
            return Err(perr("box must satisfy lo <= hi"));
        }
        let mut w = TrajectoryWindow::zeros(self.lo.clone(), self.hi.clone(), self.width);
        if self.values.len() != w.values().len() {
            return Err(perr(format!(
                "expected {} values, found {}",
                w.values().len(),
                self.values.len()
            )));
        }
        let parsed: Result<Vec<BigRational>, ParseError> = self
            .values
            .iter()
            .map(|s| BigRational::from_str(s).map_err(|e| perr(format!("bad rational: {e}"))))
            .collect();
        w.values_mut().clone_from_slice(&parsed?);
        Ok(w)
    }
}

/// CSV export: one lattice point per row, coordinates then values.
pub fn window_to_csv(w: &TrajectoryWindow, float: bool) -> String {
    let mut out = String::new();
    let k = w.dim();
    for ax in 0..k {
        out.push_str(&format!("nu{},", ax + 1));
    }
    for j in 0..w.width() {
        if j > 0 {
            out.push(',');
        }
        out.push_str(&format!("w{}", j + 1));
    }
    out.push('\n');
    for i in 0..w.num_points() {
        let p = w.point_at(i);
        for v in &p {
            out.push_str(&format!("{},", v));
        }
        let vals = w.get(&p);
        for (j, v) in vals.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            if float {
                out.push_str(&format!("{}", rational_to_f64(v)));
            } else {
                out.push_str(&v.to_string());
            }
        }
        out.push('\n');
    }
    out
}

pub fn rational_to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

/// `{ gamma, d, rank, is_free, is_nonautonomous }`
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct StateReportFile {
    pub gamma: usize,
    pub d: usize,
    pub rank: usize,
    pub is_free: bool,
    pub is_nonautonomous: bool,
}

impl StateReportFile {
    pub fn from_report(r: &StateSpaceReport) -> Self {
        StateReportFile {
            gamma: r.gamma,
            d: r.d,
            rank: r.rank,
            is_free: r.is_free,
            is_nonautonomous: r.is_nonautonomous,
        }
    }
}

/// Output of `analyze`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct AnalyzeReport {
    pub n: usize,
    pub q: usize,
    pub autonomous: bool,
    pub autonomy_by_minors: Option<bool>,
    pub annihilator: Vec<String>,
    pub d: usize,
    pub strongly_relevant_at_identity: bool,
    pub identity_certificates: Vec<CertificateEntry>,
}

/// Output of `verify`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct VerifyFile {
    pub max_residual: String,
    pub points_checked: usize,
    pub rows_checked: usize,
    pub exact: bool,
}

/// Output of `membership`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MembershipFile {
    pub member: bool,
    pub witness: Option<Vec<String>>,
    pub realization_member: Option<bool>,
}
