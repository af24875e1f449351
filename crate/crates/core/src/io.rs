//! Plain-text field formats: `csv-1d`, `pgm-2d` (ASCII P2) and `field-nd`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::{Connectivity, ScalarField};
use crate::scalar::Scalar;

const PGM_MAXVAL_LIMIT: u32 = 65535;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldFormat {
    /// One decimal value per line.
    Csv1d,
    /// ASCII `P2` graymap; rows are the first axis.
    Pgm2d,
    /// `FIELD <ndim> <e1> ... <en>` followed by row-major values.
    FieldNd,
}

impl FromStr for FieldFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" | "csv-1d" => Ok(FieldFormat::Csv1d),
            "pgm" | "pgm-2d" => Ok(FieldFormat::Pgm2d),
            "field" | "field-nd" => Ok(FieldFormat::FieldNd),
            other => Err(Error::usage(format!("unknown field format `{other}`"))),
        }
    }
}

impl FieldFormat {
    /// Guess the format from the first token of a document.
    pub fn detect(text: &str) -> FieldFormat {
        match text.split_whitespace().next() {
            Some("FIELD") => FieldFormat::FieldNd,
            Some("P2") => FieldFormat::Pgm2d,
            _ => FieldFormat::Csv1d,
        }
    }

    /// Format matching a file extension, if it is one we know.
    pub fn from_extension(path: &Path) -> Option<FieldFormat> {
        match path.extension()?.to_str()? {
            "csv" | "txt" => Some(FieldFormat::Csv1d),
            "pgm" => Some(FieldFormat::Pgm2d),
            "field" | "fld" => Some(FieldFormat::FieldNd),
            _ => None,
        }
    }
}

/// Whitespace-separated tokens annotated with their 1-based line number.
struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: Option<(usize, std::str::SplitWhitespace<'a>)>,
    strip_comments: bool,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, strip_comments: bool) -> Self {
        Tokens {
            lines: text.lines().enumerate(),
            current: None,
            strip_comments,
            last_line: 1,
        }
    }

    fn next_token(&mut self) -> Option<(usize, &'a str)> {
        loop {
            if let Some((line, words)) = self.current.as_mut() {
                if let Some(w) = words.next() {
                    self.last_line = *line;
                    return Some((*line, w));
                }
            }
            let (i, mut line) = self.lines.next()?;
            if self.strip_comments {
                if let Some(hash) = line.find('#') {
                    line = &line[..hash];
                }
            }
            self.current = Some((i + 1, line.split_whitespace()));
        }
    }

    fn expect<V: FromStr>(&mut self, what: &str) -> Result<V> {
        let (line, tok) = self
            .next_token()
            .ok_or_else(|| Error::parse(self.last_line, format!("missing {what}")))?;
        tok.parse()
            .map_err(|_| Error::parse(line, format!("expected {what}, found `{tok}`")))
    }
}

pub fn parse_csv<T: Scalar>(text: &str) -> Result<ScalarField<T>> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let v: T = tok
            .parse()
            .map_err(|_| Error::parse(i + 1, format!("expected a number, found `{tok}`")))?;
        if !v.is_finite() {
            return Err(Error::parse(i + 1, format!("non-finite value `{tok}`")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::parse(1, "no values"));
    }
    ScalarField::from_1d(values)
}

pub fn parse_field_nd<T: Scalar>(text: &str) -> Result<ScalarField<T>> {
    let mut tokens = Tokens::new(text, false);
    match tokens.next_token() {
        Some((_, "FIELD")) => {}
        Some((line, tok)) => {
            return Err(Error::parse(line, format!("expected `FIELD` header, found `{tok}`")))
        }
        None => return Err(Error::parse(1, "empty document")),
    }
    let ndim: usize = tokens.expect("dimension count")?;
    if ndim == 0 {
        return Err(Error::parse(tokens.last_line, "dimension count must be positive"));
    }
    let shape = (0..ndim)
        .map(|_| tokens.expect::<usize>("axis extent"))
        .collect::<Result<Vec<_>>>()?;
    if shape.contains(&0) {
        return Err(Error::parse(tokens.last_line, "axis extents must be positive"));
    }
    let n: usize = shape.iter().product();
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        let v: T = tokens.expect("value")?;
        if !v.is_finite() {
            return Err(Error::parse(tokens.last_line, "non-finite value"));
        }
        values.push(v);
    }
    if let Some((line, tok)) = tokens.next_token() {
        return Err(Error::parse(
            line,
            format!("dimension mismatch: trailing token `{tok}` after {n} values"),
        ));
    }
    ScalarField::new(shape, values, Connectivity::Axis)
}

pub fn parse_pgm<T: Scalar>(text: &str) -> Result<ScalarField<T>> {
    let mut tokens = Tokens::new(text, true);
    match tokens.next_token() {
        Some((_, "P2")) => {}
        Some((line, tok)) => {
            return Err(Error::parse(line, format!("expected `P2` magic, found `{tok}`")))
        }
        None => return Err(Error::parse(1, "empty document")),
    }
    let width: usize = tokens.expect("width")?;
    let height: usize = tokens.expect("height")?;
    let maxval: u32 = tokens.expect("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::parse(tokens.last_line, "image dimensions must be positive"));
    }
    if maxval == 0 || maxval > PGM_MAXVAL_LIMIT {
        return Err(Error::parse(
            tokens.last_line,
            format!("maxval {maxval} outside 1..={PGM_MAXVAL_LIMIT}"),
        ));
    }
    let mut values = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let v: u32 = tokens.expect("gray level")?;
        if v > maxval {
            return Err(Error::parse(
                tokens.last_line,
                format!("gray level {v} exceeds maxval {maxval}"),
            ));
        }
        values.push(T::from_u32(v).expect("u16 range fits every float"));
    }
    if let Some((line, tok)) = tokens.next_token() {
        return Err(Error::parse(
            line,
            format!("dimension mismatch: trailing token `{tok}`"),
        ));
    }
    ScalarField::new(vec![height, width], values, Connectivity::Axis)
}

pub fn parse_field<T: Scalar>(text: &str, format: FieldFormat) -> Result<ScalarField<T>> {
    match format {
        FieldFormat::Csv1d => parse_csv(text),
        FieldFormat::Pgm2d => parse_pgm(text),
        FieldFormat::FieldNd => parse_field_nd(text),
    }
}

/// Serialize a field. `pgm-2d` rounds values to the nearest integer and
/// clamps them into `0..=maxval`, where maxval is the rounded field maximum
/// (at least 1, at most 65535).
pub fn format_field<T: Scalar>(field: &ScalarField<T>, format: FieldFormat) -> Result<String> {
    use std::fmt::Write as _;
    let mut out = String::new();
    match format {
        FieldFormat::Csv1d => {
            if field.ndim() != 1 {
                return Err(Error::usage(format!(
                    "csv-1d needs a 1-D field, got shape {:?}",
                    field.shape()
                )));
            }
            for v in field.values() {
                writeln!(out, "{v}").unwrap();
            }
        }
        FieldFormat::FieldNd => {
            write!(out, "FIELD {}", field.ndim()).unwrap();
            for e in field.shape() {
                write!(out, " {e}").unwrap();
            }
            out.push('\n');
            let row = *field.shape().last().expect("at least one axis");
            for chunk in field.values().chunks(row) {
                let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
        FieldFormat::Pgm2d => {
            if field.ndim() != 2 {
                return Err(Error::usage(format!(
                    "pgm-2d needs a 2-D field, got shape {:?}",
                    field.shape()
                )));
            }
            let (height, width) = (field.shape()[0], field.shape()[1]);
            let top = field.max_value().as_f64().round();
            let maxval = top.clamp(1.0, PGM_MAXVAL_LIMIT as f64) as u32;
            writeln!(out, "P2\n{width} {height}\n{maxval}").unwrap();
            for chunk in field.values().chunks(width) {
                let line: Vec<String> = chunk
                    .iter()
                    .map(|v| (v.as_f64().round().clamp(0.0, maxval as f64) as u32).to_string())
                    .collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Read a field from `path`; `-` reads standard input. Without an explicit
/// format the extension, then the first token, decides.
pub fn read_field<T: Scalar>(
    path: &Path,
    format: Option<FieldFormat>,
) -> Result<(ScalarField<T>, FieldFormat)> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path)?
    };
    let format = format
        .or_else(|| FieldFormat::from_extension(path))
        .unwrap_or_else(|| FieldFormat::detect(&text));
    Ok((parse_field(&text, format)?, format))
}

/// Write a field to `path`; `-` writes standard output.
pub fn write_field<T: Scalar>(
    field: &ScalarField<T>,
    path: &Path,
    format: FieldFormat,
) -> Result<()> {
    let text = format_field(field, format)?;
    if path.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        fs::write(path, text)?;
    }
    Ok(())
}
