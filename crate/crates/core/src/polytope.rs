//! H-representation polytopes `{x : A_in x <= b_in, A_eq x = b_eq}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{invert, matmul, Matrix};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    a_in: Matrix,
    b_in: Matrix,
    a_eq: Matrix,
    b_eq: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IssueCode {
    ShapeMismatch,
    NoInequalities,
    ZeroRow,
    NonFinite,
    TooManyEqualities,
    RankDeficientEq,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub code: IssueCode,
    /// Offending row, when the finding is row specific.
    pub row: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    fn from_issues(issues: Vec<Issue>) -> Self {
        Self {
            ok: issues.is_empty(),
            issues,
        }
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }
}

impl Polytope {
    /// Assembles a polytope without validating it; see [`Polytope::validate`].
    /// `a_eq` may have zero rows, in which case `b_eq` must too.
    pub fn new(a_in: Matrix, b_in: Matrix, a_eq: Matrix, b_eq: Matrix) -> Self {
        Self {
            a_in,
            b_in,
            a_eq,
            b_eq,
        }
    }

    /// Like [`Polytope::new`], but fails unless [`Polytope::validate`] is clean.
    pub fn checked(a_in: Matrix, b_in: Matrix, a_eq: Matrix, b_eq: Matrix) -> Result<Self> {
        let p = Self::new(a_in, b_in, a_eq, b_eq);
        let report = p.validate();
        if report.ok {
            return Ok(p);
        }
        if let Some(issue) = report
            .issues
            .iter()
            .find(|i| i.code == IssueCode::RankDeficientEq)
        {
            return Err(Error::RankDeficientEq {
                pivot: issue.row.unwrap_or(0),
            });
        }
        let msgs: Vec<_> = report.issues.iter().map(|i| i.message.clone()).collect();
        Err(Error::InvalidInput(msgs.join("; ")))
    }

    pub fn a_in(&self) -> &Matrix {
        &self.a_in
    }

    pub fn b_in(&self) -> &Matrix {
        &self.b_in
    }

    pub fn a_eq(&self) -> &Matrix {
        &self.a_eq
    }

    pub fn b_eq(&self) -> &Matrix {
        &self.b_eq
    }

    pub fn dim(&self) -> usize {
        self.a_in.cols()
    }

    pub fn m_in(&self) -> usize {
        self.a_in.rows()
    }

    pub fn m_eq(&self) -> usize {
        self.a_eq.rows()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.m_eq() == 0
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let n = self.dim();
        let mut shape_issue = |msg: String| {
            issues.push(Issue {
                code: IssueCode::ShapeMismatch,
                row: None,
                message: msg,
            })
        };
        if n == 0 {
            shape_issue("dimension is zero".into());
        }
        if self.b_in.shape() != (self.m_in(), 1) {
            shape_issue(format!(
                "b_in is {:?}, expected ({}, 1)",
                self.b_in.shape(),
                self.m_in()
            ));
        }
        if self.m_eq() > 0 && self.a_eq.cols() != n {
            shape_issue(format!("A_eq has {} columns, expected {n}", self.a_eq.cols()));
        }
        if self.b_eq.rows() != self.m_eq() || (self.m_eq() > 0 && self.b_eq.cols() != 1) {
            shape_issue(format!(
                "b_eq is {:?}, expected ({}, 1)",
                self.b_eq.shape(),
                self.m_eq()
            ));
        }
        if self.m_in() == 0 {
            issues.push(Issue {
                code: IssueCode::NoInequalities,
                row: None,
                message: "at least one inequality is required".into(),
            });
        }
        let shapes_ok = issues.is_empty();

        for (name, m) in [
            ("A_in", &self.a_in),
            ("b_in", &self.b_in),
            ("A_eq", &self.a_eq),
            ("b_eq", &self.b_eq),
        ] {
            if !m.is_finite() {
                issues.push(Issue {
                    code: IssueCode::NonFinite,
                    row: (0..m.rows()).find(|&i| m.row(i).iter().any(|v| !v.is_finite())),
                    message: format!("{name} contains NaN or infinite entries"),
                });
            }
        }
        for i in 0..self.m_in() {
            if self.a_in.row(i).iter().all(|&v| v == 0.0) {
                issues.push(Issue {
                    code: IssueCode::ZeroRow,
                    row: Some(i),
                    message: format!("inequality row {i} is all zeros"),
                });
            }
        }
        if self.m_eq() > 0 && self.m_eq() >= n {
            issues.push(Issue {
                code: IssueCode::TooManyEqualities,
                row: None,
                message: format!("{} equalities leave no freedom in dimension {n}", self.m_eq()),
            });
        }
        if shapes_ok && self.m_eq() > 0 && self.a_eq.is_finite() {
            let gram = matmul(&self.a_eq, &self.a_eq.transpose()).expect("shapes checked");
            if let Err(Error::Singular { pivot, .. }) = invert(&gram) {
                issues.push(Issue {
                    code: IssueCode::RankDeficientEq,
                    row: Some(pivot),
                    message: "equality rows are linearly dependent".into(),
                });
            }
        }
        ValidationReport::from_issues(issues)
    }

    /// Membership within absolute tolerance `eps` on every residual.
    pub fn contains(&self, x: &Matrix, eps: f64) -> Result<bool> {
        if x.shape() != (self.dim(), 1) {
            return Err(Error::DimensionMismatch {
                op: "contains",
                left: self.a_in.shape(),
                right: x.shape(),
            });
        }
        Ok(self.contains_slice(x.as_slice(), eps))
    }

    /// Same as [`Polytope::contains`] for a point given as a slice of length `n`.
    pub fn contains_slice(&self, x: &[f64], eps: f64) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let ineq_ok = (0..self.m_in()).all(|i| dot(self.a_in.row(i)) - self.b_in[(i, 0)] <= eps);
        ineq_ok
            && (0..self.m_eq()).all(|i| (dot(self.a_eq.row(i)) - self.b_eq[(i, 0)]).abs() <= eps)
    }

    /// Largest equality residual `|a_e x - b_e|` at `x`.
    pub fn equality_residual(&self, x: &[f64]) -> f64 {
        (0..self.m_eq())
            .map(|i| {
                let ax: f64 = self.a_eq.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
                (ax - self.b_eq[(i, 0)]).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_document(&self) -> PolytopeDocument {
        PolytopeDocument {
            format_version: FORMAT_VERSION,
            a_in: self.a_in.row_vectors(),
            b_in: self.b_in.as_slice().to_vec(),
            a_eq: self.a_eq.row_vectors(),
            b_eq: self.b_eq.as_slice().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("plain data serializes")
    }

    /// Parses the JSON polytope document and validates the result.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: PolytopeDocument =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.into_polytope()
    }
}

/// On-disk polytope layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDocument {
    #[serde(default = "default_version")]
    pub format_version: u32,
    #[serde(rename = "A_in")]
    pub a_in: Vec<Vec<f64>>,
    pub b_in: Vec<f64>,
    #[serde(rename = "A_eq", default)]
    pub a_eq: Vec<Vec<f64>>,
    #[serde(default)]
    pub b_eq: Vec<f64>,
}

fn default_version() -> u32 {
    FORMAT_VERSION
}

impl PolytopeDocument {
    pub fn into_polytope(self) -> Result<Polytope> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {}",
                self.format_version
            )));
        }
        let n = self.a_in.first().map_or(0, Vec::len);
        let a_in = Matrix::from_rows(&self.a_in, n)?;
        let b_in = Matrix::column_vector(&self.b_in);
        let a_eq = Matrix::from_rows(&self.a_eq, n)?;
        let b_eq = if self.b_eq.is_empty() {
            Matrix::zeros(0, 1)
        } else {
            Matrix::column_vector(&self.b_eq)
        };
        Polytope::checked(a_in, b_in, a_eq, b_eq)
    }
}

/// The box `[-1, 1]^n` as `x_i <= 1` and `-x_i <= 1`.
pub fn make_hypercube(n: usize) -> Result<Polytope> {
    if n == 0 {
        return Err(Error::InvalidInput("hypercube dimension must be >= 1".into()));
    }
    let mut a_in = Matrix::zeros(2 * n, n);
    for i in 0..n {
        a_in[(i, i)] = 1.0;
        a_in[(n + i, i)] = -1.0;
    }
    Ok(Polytope::new(
        a_in,
        Matrix::filled(2 * n, 1, 1.0),
        Matrix::zeros(0, n),
        Matrix::zeros(0, 1),
    ))
}

/// The probability simplex `{x >= 0, sum x = 1}`.
pub fn make_simplex(n: usize) -> Result<Polytope> {
    if n < 2 {
        return Err(Error::InvalidInput("simplex dimension must be >= 2".into()));
    }
    let mut a_in = Matrix::zeros(n, n);
    for i in 0..n {
        a_in[(i, i)] = -1.0;
    }
    Ok(Polytope::new(
        a_in,
        Matrix::zeros(n, 1),
        Matrix::filled(1, n, 1.0),
        Matrix::filled(1, 1, 1.0),
    ))
}
