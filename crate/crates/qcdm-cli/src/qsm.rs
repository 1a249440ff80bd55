//! QSM: a line-oriented text format for complex matrices with tensor-factor
//! structure.
//!
//! ```text
//! qsm 1
//! dims 2 2
//! (0.5,0) (0,0) (0,0) (0,0)
//! ...
//! ```
//!
//! Line 1 is the header, line 2 the factor dimensions, then one matrix row
//! per line with entries written `(re,im)`. `#` starts a comment, blank
//! lines are skipped, and any run of spaces/tabs separates tokens on input.
//! [`emit`] writes the canonical form: single-space separation and decimal
//! literals with 17 significant digits (trailing zeros trimmed), which is
//! lossless for `f64` — parsing an emitted document reproduces every bit.

use std::fmt;

use qcdm_core::{Complex, ComplexMatrix};

/// Parsed QSM document: factor dimensions plus the square matrix body.
#[derive(Debug, Clone, PartialEq)]
pub struct QsmDocument {
    pub dims: Vec<usize>,
    pub matrix: ComplexMatrix,
}

/// Parse failure, located at a 1-based line and column of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct QsmError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for QsmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, col {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for QsmError {}

fn err(line: usize, col: usize, message: impl Into<String>) -> QsmError {
    QsmError { line, col, message: message.into() }
}

/// Tokens of one line after comment stripping, with 1-based start columns.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let body = match line.find('#') {
        Some(cut) => &line[..cut],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in body.char_indices() {
        if ch == ' ' || ch == '\t' {
            if let Some(s) = start.take() {
                tokens.push((s + 1, &body[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push((s + 1, &body[s..]));
    }
    tokens
}

fn parse_entry(token: &str, line: usize, col: usize) -> Result<Complex, QsmError> {
    let inner = token
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| err(line, col, format!("malformed complex literal '{token}'")))?;
    let (re_text, im_text) = inner
        .split_once(',')
        .ok_or_else(|| err(line, col, format!("malformed complex literal '{token}'")))?;
    let re: f64 = re_text
        .parse()
        .map_err(|_| err(line, col, format!("malformed real part '{re_text}'")))?;
    let im: f64 = im_text
        .parse()
        .map_err(|_| err(line, col, format!("malformed imaginary part '{im_text}'")))?;
    if !re.is_finite() || !im.is_finite() {
        return Err(err(line, col, format!("non-finite entry '{token}'")));
    }
    Ok(Complex::new(re, im))
}

/// Parse QSM text into a document.
pub fn parse(text: &str) -> Result<QsmDocument, QsmError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokenize(l)))
        .filter(|(_, tokens)| !tokens.is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| err(1, 1, "empty document: expected 'qsm 1' header"))?;
    match header.as_slice() {
        [(_, "qsm"), (_, "1")] => {}
        [(_, "qsm"), (col, version)] => {
            return Err(err(
                header_line,
                *col,
                format!("unsupported version '{version}' (expected 1)"),
            ))
        }
        [(col, other), ..] => {
            return Err(err(
                header_line,
                *col,
                format!("bad header '{other}' (expected 'qsm 1')"),
            ))
        }
        [] => unreachable!("blank lines are filtered"),
    }

    let (dims_line, dims_tokens) = lines
        .next()
        .ok_or_else(|| err(header_line + 1, 1, "expected 'dims ...' line"))?;
    let mut dims = Vec::new();
    match dims_tokens.split_first() {
        Some(((_, "dims"), rest)) if !rest.is_empty() => {
            for (col, token) in rest {
                let d: usize = token.parse().map_err(|_| {
                    err(dims_line, *col, format!("bad factor dimension '{token}'"))
                })?;
                if d == 0 {
                    return Err(err(dims_line, *col, "factor dimension must be positive"));
                }
                dims.push(d);
            }
        }
        _ => {
            let col = dims_tokens.first().map(|(c, _)| *c).unwrap_or(1);
            return Err(err(dims_line, col, "expected 'dims d1 d2 ...'"));
        }
    }
    let dim: usize = dims.iter().product();

    let mut entries = Vec::with_capacity(dim * dim);
    let mut rows_read = 0;
    let mut last_line = dims_line;
    for (line_no, tokens) in lines {
        if rows_read == dim {
            return Err(err(
                line_no,
                tokens[0].0,
                format!("unexpected content after {dim}x{dim} matrix body"),
            ));
        }
        if tokens.len() != dim {
            return Err(err(
                line_no,
                tokens[0].0,
                format!(
                    "shape mismatch: expected {dim}x{dim} body, row {} has {} entries",
                    rows_read + 1,
                    tokens.len()
                ),
            ));
        }
        for (col, token) in tokens {
            entries.push(parse_entry(token, line_no, col)?);
        }
        rows_read += 1;
        last_line = line_no;
    }
    if rows_read != dim {
        return Err(err(
            last_line + 1,
            1,
            format!("shape mismatch: expected {dim}x{dim} body, found {rows_read} rows"),
        ));
    }

    let matrix = ComplexMatrix::new(dim, entries)
        .expect("entry count and finiteness are checked during parsing");
    Ok(QsmDocument { dims, matrix })
}

/// Render `v` with at most `digits` significant digits, trimming trailing
/// zeros. 17 digits round-trip any finite `f64` exactly.
pub fn format_significant(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp_text) = sci.split_once('e').expect("{:e} always has an exponent");
    let exp: i32 = exp_text.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digits_only: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits_only.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-4..=16).contains(&exp) {
        // Positional: value = d1.d2... * 10^exp.
        if exp >= 0 {
            let point = (exp + 1) as usize;
            if point >= trimmed.len() {
                out.push_str(trimmed);
                out.push_str(&"0".repeat(point - trimmed.len()));
            } else {
                out.push_str(&trimmed[..point]);
                out.push('.');
                out.push_str(&trimmed[point..]);
            }
        } else {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(trimmed);
        }
    } else {
        out.push_str(&trimmed[..1]);
        if trimmed.len() > 1 {
            out.push('.');
            out.push_str(&trimmed[1..]);
        }
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

fn format_entry(z: Complex) -> String {
    format!(
        "({},{})",
        format_significant(z.re, 17),
        format_significant(z.im, 17)
    )
}

/// Emit the canonical form of a document; `parse(emit(d)) == d` bit-for-bit.
pub fn emit(doc: &QsmDocument) -> String {
    let dim = doc.matrix.dim();
    let mut out = String::from("qsm 1\n");
    out.push_str("dims");
    for d in &doc.dims {
        out.push(' ');
        out.push_str(&d.to_string());
    }
    out.push('\n');
    for r in 0..dim {
        for c in 0..dim {
            if c > 0 {
                out.push(' ');
            }
            out.push_str(&format_entry(doc.matrix.get(r, c)));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_mixed_qubit_document() {
        let doc = parse("qsm 1\ndims 2\n(0.5,0) (0,0)\n(0,0) (0.5,0)\n").unwrap();
        assert_eq!(doc.dims, vec![2]);
        assert_eq!(doc.matrix.get(0, 0), Complex::new(0.5, 0.0));
        assert_eq!(doc.matrix.get(1, 1), Complex::new(0.5, 0.0));
    }

    #[test]
    fn emit_of_mixed_qubit_matches_the_wire_form() {
        let text = "qsm 1\ndims 2\n(0.5,0) (0,0)\n(0,0) (0.5,0)\n";
        let doc = parse(text).unwrap();
        assert_eq!(emit(&doc), text);
    }

    #[test]
    fn rejects_unsupported_version() {
        let e = parse("qsm 2\ndims 2\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(e.message.contains("unsupported version"));
    }

    #[test]
    fn rejects_shape_mismatch_with_expected_size() {
        let e = parse("qsm 1\ndims 2 2\n(1,0) (0,0)\n(0,0) (1,0)\n").unwrap_err();
        assert!(e.message.contains("expected 4x4"), "{}", e.message);
        assert_eq!(e.line, 3);
    }

    #[test]
    fn locates_malformed_entries() {
        let e = parse("qsm 1\ndims 2\n(0.5,0) (0,0)\n(0,0) (0.5|0)\n").unwrap_err();
        assert_eq!(e.line, 4);
        assert_eq!(e.col, 7);
        assert!(e.message.contains("malformed"));
    }

    #[test]
    fn tolerates_comments_blank_lines_and_tabs() {
        let text = "# a state\nqsm 1\n\ndims 2\t2  # two qubits\n(1,0) (0,0)\t(0,0) (0,0)\n\
                    (0,0) (0,0) (0,0) (0,0)\n(0,0) (0,0) (0,0) (0,0)\n(0,0) (0,0) (0,0) (0,0)\n";
        let doc = parse(text).unwrap();
        assert_eq!(doc.dims, vec![2, 2]);
        assert_eq!(doc.matrix.get(0, 0), Complex::new(1.0, 0.0));
    }

    #[test]
    fn rejects_trailing_content() {
        let e = parse("qsm 1\ndims 1\n(1,0)\n(0,0)\n").unwrap_err();
        assert!(e.message.contains("unexpected content"));
    }

    #[test]
    fn rejects_non_finite_literals() {
        let e = parse("qsm 1\ndims 1\n(1e999,0)\n").unwrap_err();
        assert!(e.message.contains("non-finite"));
    }

    #[test]
    fn seventeen_digit_literals() {
        assert_eq!(format_significant(1.0 / 3.0, 17), "0.33333333333333331");
        assert_eq!(format_significant(0.5, 17), "0.5");
        assert_eq!(format_significant(0.0, 17), "0");
        assert_eq!(format_significant(-0.5, 17), "-0.5");
        assert_eq!(format_significant(1.0, 17), "1");
        assert_eq!(format_significant(100.0, 17), "100");
        assert_eq!(format_significant(12.5, 17), "12.5");
        // 1e-9 is not exactly representable; 17 digits expose the stored value.
        assert_eq!(format_significant(1e-9, 17), "1.0000000000000001e-9");
        assert_eq!(format_significant(1e-9, 12), "1e-9");
        assert_eq!(format_significant(0.25, 12), "0.25");
    }

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for &v in &[
            1.0 / 3.0,
            std::f64::consts::FRAC_1_SQRT_2,
            std::f64::consts::PI,
            0.7 + 0.4,
            -f64::MIN_POSITIVE,
            f64::MAX,
            5e-324,
        ] {
            let text = format_significant(v, 17);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {text} -> {back}");
        }
    }
}
