//! Plain-text problem files.
//!
//! ```text
//! # comments run to the end of the line
//! n 2
//! A  -1 0
//!     0 1
//! B   1 0
//!     0 3
//! z 1/3 2/3
//! kappa 2/3
//! ```
//!
//! Each keyword is followed by its numbers; layout is free. Numbers are
//! decimal literals or fractions `p/q`.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::config::Tolerances;
use crate::linalg::{Matrix, SymMatrix};
use crate::structure::ProblemDef;

/// Deviation of `‖z‖` from one above which the parser normalises with a warning.
pub const NORM_WARN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnknownKeyword,
    DuplicateField,
    MissingField,
    NonNumeric,
    InvalidDimension,
    DimensionMismatch,
    Asymmetric,
    InvalidValue,
}

impl ParseErrorKind {
    pub fn code(self) -> &'static str {
        match self {
            ParseErrorKind::UnknownKeyword => "E01",
            ParseErrorKind::DuplicateField => "E02",
            ParseErrorKind::MissingField => "E03",
            ParseErrorKind::NonNumeric => "E04",
            ParseErrorKind::InvalidDimension => "E05",
            ParseErrorKind::DimensionMismatch => "E06",
            ParseErrorKind::Asymmetric => "E07",
            ParseErrorKind::InvalidValue => "E08",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: [{code}] {message}", code = kind.code())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsedProblem {
    pub problem: ProblemDef,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    column: usize,
}

struct Token<'a> {
    text: &'a str,
    pos: Pos,
}

fn err(kind: ParseErrorKind, pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError {
        kind,
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut start = None;
        for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(i),
                (true, Some(s)) => {
                    out.push(Token {
                        text: &line[s..i],
                        pos: Pos {
                            line: ln + 1,
                            column: line[..s].chars().count() + 1,
                        },
                    });
                    start = None;
                }
                _ => {}
            }
        }
    }
    out
}

fn parse_number(tok: &Token<'_>) -> Result<f64, ParseError> {
    let bad = || err(ParseErrorKind::NonNumeric, tok.pos, format!("expected a number, found `{}`", tok.text));
    let value = match tok.text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.parse().map_err(|_| bad())?;
            let q: f64 = q.parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(err(ParseErrorKind::InvalidValue, tok.pos, "zero denominator"));
            }
            p / q
        }
        None => tok.text.parse().map_err(|_| bad())?,
    };
    if !value.is_finite() {
        return Err(err(ParseErrorKind::InvalidValue, tok.pos, format!("`{}` is not finite", tok.text)));
    }
    Ok(value)
}

const KEYWORDS: [&str; 5] = ["n", "A", "B", "z", "kappa"];

struct Field<'a> {
    key: Token<'a>,
    values: Vec<Token<'a>>,
}

pub fn parse_problem(text: &str, tol: &Tolerances) -> Result<ParsedProblem, ParseError> {
    let mut fields: Vec<Field<'_>> = Vec::new();
    for tok in tokenize(text) {
        if KEYWORDS.contains(&tok.text) {
            if let Some(prev) = fields.iter().find(|f| f.key.text == tok.text) {
                return Err(err(
                    ParseErrorKind::DuplicateField,
                    tok.pos,
                    format!("`{}` already given at line {}", tok.text, prev.key.pos.line),
                ));
            }
            fields.push(Field { key: tok, values: Vec::new() });
        } else if let Some(f) = fields.last_mut() {
            f.values.push(tok);
        } else {
            let kind = if tok.text.parse::<f64>().is_ok() {
                ParseErrorKind::MissingField
            } else {
                ParseErrorKind::UnknownKeyword
            };
            return Err(err(kind, tok.pos, format!("expected a keyword, found `{}`", tok.text)));
        }
    }
    let end = Pos {
        line: text.lines().count().max(1),
        column: 1,
    };
    let get = |name: &str| -> Result<&Field<'_>, ParseError> {
        fields
            .iter()
            .find(|f| f.key.text == name)
            .ok_or_else(|| err(ParseErrorKind::MissingField, end, format!("missing field `{name}`")))
    };

    let nf = get("n")?;
    if nf.values.len() != 1 {
        return Err(err(ParseErrorKind::DimensionMismatch, nf.key.pos, "`n` takes exactly one value"));
    }
    let n: usize = nf.values[0].text.parse().map_err(|_| {
        err(
            ParseErrorKind::InvalidDimension,
            nf.values[0].pos,
            format!("`{}` is not a positive integer", nf.values[0].text),
        )
    })?;
    if n == 0 {
        return Err(err(ParseErrorKind::InvalidDimension, nf.values[0].pos, "n must be positive"));
    }

    let numbers = |f: &Field<'_>, count: usize| -> Result<Vec<f64>, ParseError> {
        if f.values.len() != count {
            let pos = f.values.get(count).map_or(f.key.pos, |t| t.pos);
            return Err(err(
                ParseErrorKind::DimensionMismatch,
                pos,
                format!("`{}` needs {count} values for n = {n}, found {}", f.key.text, f.values.len()),
            ));
        }
        f.values.iter().map(parse_number).collect()
    };

    let mut matrices = Vec::with_capacity(2);
    for name in ["A", "B"] {
        let f = get(name)?;
        let vals = numbers(f, n * n)?;
        let m = Matrix::from_fn(n, n, |i, j| vals[i * n + j]);
        let limit = tol.symmetry_rel * m.max_abs();
        for i in 0..n {
            for j in (i + 1)..n {
                if (m[(i, j)] - m[(j, i)]).abs() > limit {
                    return Err(err(
                        ParseErrorKind::Asymmetric,
                        f.values[j * n + i].pos,
                        format!(
                            "{name}[{i}][{j}] = {} differs from {name}[{j}][{i}] = {}",
                            m[(i, j)],
                            m[(j, i)]
                        ),
                    ));
                }
            }
        }
        let sym = SymMatrix::new(m, tol).map_err(|e| err(ParseErrorKind::InvalidValue, f.key.pos, e.to_string()))?;
        matrices.push(sym);
    }
    let b = matrices.pop().expect("two matrices");
    let a = matrices.pop().expect("two matrices");

    let zf = get("z")?;
    let mut z = numbers(zf, n)?;
    let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(err(ParseErrorKind::InvalidValue, zf.key.pos, "z must be nonzero"));
    }
    let mut warnings = Vec::new();
    if (norm - 1.0).abs() > NORM_WARN {
        warnings.push(format!("z has norm {norm}; normalised to unit length"));
        z.iter_mut().for_each(|v| *v /= norm);
    }

    let kf = get("kappa")?;
    let kappa = numbers(kf, 1)?[0];

    let problem = ProblemDef::new(a, b, z, kappa, tol).map_err(|e| err(ParseErrorKind::InvalidValue, end, e.to_string()))?;
    Ok(ParsedProblem { problem, warnings })
}

struct Row<'a>(&'a [f64]);

impl fmt::Display for Row<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Writes a problem file that parses back to the identical problem.
pub fn format_problem(p: &ProblemDef, comment: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(s, "# {line}");
        }
    }
    let n = p.dim();
    let _ = writeln!(s, "n {n}");
    for (name, m) in [("A", p.a()), ("B", p.b())] {
        let _ = writeln!(s, "{name}");
        for i in 0..n {
            let _ = writeln!(s, "  {}", Row(m.matrix().row(i)));
        }
    }
    let _ = writeln!(s, "z {}", Row(p.z()));
    let _ = writeln!(s, "kappa {}", p.kappa());
    s
}
