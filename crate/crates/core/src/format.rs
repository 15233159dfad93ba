//! Line-oriented text formats.
//!
//! Matrix file: `#` lines and blank lines are ignored; the first remaining
//! line is `<rows> <cols>`, followed by exactly `rows` lines of `cols`
//! whitespace-separated decimals.
//!
//! Labels file: one token per non-comment line.
//!
//! Model file:
//!
//! ```text
//! GAPNN-MODEL v1
//! epsilon <decimal>
//! delta_hat <decimal>
//! s <decimal>
//! label_a <token>
//! label_b <token>
//! prototypes_a <0-based indices>
//! prototypes_b <0-based indices>
//! ```
//!
//! Matrix and model decimals are written with 17 significant digits, which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;

use crate::analysis::SeparabilityReport;
use crate::classifier::{Decision, Mode, Outcome, PrototypeModel};
use crate::error::{Error, Result};
use crate::matrix::DissimilarityMatrix;

pub const MODEL_HEADER: &str = "GAPNN-MODEL v1";

/// 17 significant digits in scientific notation.
pub fn decimal(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(line: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| parse_err(line, format!("non-numeric token {token:?}")))
}

fn parse_usize(line: usize, token: &str) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("expected a non-negative integer, got {token:?}"),
        )
    })
}

/// Parses a matrix file. The result is rectangular; call
/// [`DissimilarityMatrix::into_training`] for a training matrix.
pub fn parse_matrix(text: &str) -> Result<DissimilarityMatrix> {
    let mut lines = content_lines(text);
    let (dim_line, dims) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing dimension line \"<rows> <cols>\""))?;
    let dims: Vec<&str> = dims.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(parse_err(
            dim_line,
            format!(
                "dimension line needs 2 integers, found {} tokens",
                dims.len()
            ),
        ));
    }
    let rows = parse_usize(dim_line, dims[0])?;
    let cols = parse_usize(dim_line, dims[1])?;

    let mut values = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 24));
    let mut seen = 0;
    let mut last_line = dim_line;
    for (line, content) in lines {
        last_line = line;
        if seen == rows {
            return Err(parse_err(
                line,
                format!("more than the declared {rows} rows"),
            ));
        }
        let before = values.len();
        for token in content.split_whitespace() {
            values.push(parse_f64(line, token)?);
        }
        let got = values.len() - before;
        if got != cols {
            return Err(parse_err(
                line,
                format!("row {} has {got} of {cols} values", seen + 1),
            ));
        }
        seen += 1;
    }
    if seen != rows {
        return Err(parse_err(
            last_line,
            format!("expected {rows} rows, found {seen}"),
        ));
    }
    DissimilarityMatrix::new(rows, cols, values)
}

pub fn emit_matrix(m: &DissimilarityMatrix) -> String {
    let mut out = format!("{} {}\n", m.n_rows(), m.n_cols());
    for r in 0..m.n_rows() {
        let row: Vec<String> = m.row(r).iter().map(|&v| decimal(v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_labels(text: &str) -> Result<Vec<String>> {
    content_lines(text)
        .map(|(line, l)| {
            if l.split_whitespace().count() != 1 {
                Err(parse_err(
                    line,
                    format!("label must be one token, got {l:?}"),
                ))
            } else {
                Ok(l.to_owned())
            }
        })
        .collect()
}

pub fn emit_labels<S: AsRef<str>>(labels: &[S]) -> String {
    labels.iter().fold(String::new(), |mut out, l| {
        out.push_str(l.as_ref());
        out.push('\n');
        out
    })
}

pub fn emit_model(m: &PrototypeModel) -> String {
    let join = |p: &[usize]| p.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    format!(
        "{MODEL_HEADER}\nepsilon {}\ndelta_hat {}\ns {}\nlabel_a {}\nlabel_b {}\nprototypes_a {}\nprototypes_b {}\n",
        decimal(m.eps()),
        decimal(m.delta_hat()),
        decimal(m.s()),
        m.label_a(),
        m.label_b(),
        join(m.prototypes_a()),
        join(m.prototypes_b()),
    )
}

pub fn parse_model(text: &str) -> Result<PrototypeModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    match lines.next() {
        Some((_, MODEL_HEADER)) => {}
        Some((n, other)) => {
            return Err(parse_err(
                n,
                format!("expected {MODEL_HEADER:?}, got {other:?}"),
            ))
        }
        None => return Err(parse_err(1, "empty model file")),
    }
    let mut field = |key: &str| -> Result<(usize, Vec<String>)> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing {key:?} line")))?;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some(k) if k == key => Ok((n, tokens.map(str::to_owned).collect())),
            other => Err(parse_err(
                n,
                format!("expected key {key:?}, got {:?}", other.unwrap_or("")),
            )),
        }
    };
    let mut scalar = |key: &str| -> Result<f64> {
        let (n, t) = field(key)?;
        match t.as_slice() {
            [v] => parse_f64(n, v),
            _ => Err(parse_err(n, format!("{key} takes one value"))),
        }
    };
    let eps = scalar("epsilon")?;
    let delta_hat = scalar("delta_hat")?;
    let s = scalar("s")?;
    let mut token = |key: &str| -> Result<String> {
        let (n, t) = field(key)?;
        match t.as_slice() {
            [v] => Ok(v.clone()),
            _ => Err(parse_err(n, format!("{key} takes one token"))),
        }
    };
    let label_a = token("label_a")?;
    let label_b = token("label_b")?;
    let mut indices = |key: &str| -> Result<Vec<usize>> {
        let (n, t) = field(key)?;
        t.iter().map(|v| parse_usize(n, v)).collect()
    };
    let prototypes_a = indices("prototypes_a")?;
    let prototypes_b = indices("prototypes_b")?;
    if let Some((n, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(parse_err(n, format!("unexpected trailing line {extra:?}")));
    }
    PrototypeModel::new(
        prototypes_a,
        prototypes_b,
        eps,
        delta_hat,
        s,
        label_a,
        label_b,
    )
}

/// Key-value rendering of an analysis; values use the shortest exact
/// decimal form.
pub fn emit_separability_report(r: &SeparabilityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "delta_hat {}", r.delta_hat);
    let _ = writeln!(out, "eps_conn_a {}", r.eps_conn_a);
    let _ = writeln!(out, "eps_conn_b {}", r.eps_conn_b);
    let _ = writeln!(out, "separable {}", r.separable);
    let _ = writeln!(out, "symmetry_max_abs_diff {}", r.symmetry_max_abs_diff);
    let _ = writeln!(
        out,
        "triangle_violation_count {}",
        r.triangle_violation_count
    );
    let _ = writeln!(out, "zero_offdiag_count {}", r.zero_offdiag_count);
    for (i, j, k) in &r.violating_triples {
        let _ = writeln!(out, "# violating_triple {i} {j} {k}");
    }
    out
}

/// Decisions for one test matrix, with counts and optional error tally.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub mode: Mode,
    pub label_a: String,
    pub label_b: String,
    pub decisions: Vec<Decision>,
    pub truth: Option<Vec<String>>,
}

impl RunReport {
    pub fn new(
        model: &PrototypeModel,
        mode: Mode,
        decisions: Vec<Decision>,
        truth: Option<Vec<String>>,
    ) -> Result<Self> {
        if let Some(t) = &truth {
            if t.len() != decisions.len() {
                return Err(Error::Shape(format!(
                    "{} truth labels for {} test rows",
                    t.len(),
                    decisions.len()
                )));
            }
        }
        Ok(Self {
            mode,
            label_a: model.label_a().to_owned(),
            label_b: model.label_b().to_owned(),
            decisions,
            truth,
        })
    }

    pub fn count(&self, outcome: Outcome) -> usize {
        self.decisions
            .iter()
            .filter(|d| d.outcome == outcome)
            .count()
    }

    pub fn accepted(&self) -> usize {
        self.decisions
            .iter()
            .filter(|d| !d.outcome.is_reject())
            .count()
    }

    /// Label assigned to an accepted decision.
    pub fn predicted_label(&self, d: &Decision) -> Option<&str> {
        match d.outcome {
            Outcome::ClassA => Some(&self.label_a),
            Outcome::ClassB => Some(&self.label_b),
            _ => None,
        }
    }

    /// Accepted decisions whose label differs from the truth.
    pub fn error_count(&self) -> Option<usize> {
        let truth = self.truth.as_ref()?;
        Some(
            self.decisions
                .iter()
                .zip(truth)
                .filter(|(d, t)| self.predicted_label(d).is_some_and(|p| p != t.as_str()))
                .count(),
        )
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# mode {}", self.mode);
        let _ = writeln!(
            out,
            "# decision <row> <outcome> <label|-> <d_a> <d_b> <score|->"
        );
        for (i, d) in self.decisions.iter().enumerate() {
            let _ = writeln!(
                out,
                "decision {i} {} {} {} {} {}",
                d.outcome,
                self.predicted_label(d).unwrap_or("-"),
                decimal(d.d_a),
                decimal(d.d_b),
                d.score.map_or_else(|| "-".to_owned(), decimal),
            );
        }
        let _ = writeln!(out, "total {}", self.decisions.len());
        for o in Outcome::ALL {
            let _ = writeln!(out, "{o} {}", self.count(o));
        }
        if let Some(e) = self.error_count() {
            let _ = writeln!(out, "accepted {}", self.accepted());
            let _ = writeln!(out, "error_count {e}");
        }
        out
    }
}
