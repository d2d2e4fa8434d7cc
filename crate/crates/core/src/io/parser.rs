//! Parser for the line-oriented `.sgx` experiment language.
//!
//! ```text
//! experiment <ident>
//! dim <int>            # default 2
//! hbar <float>         # default 1.0
//! alpha <float>        # default 1.0
//! hamiltonian <mexpr>  # default -alpha*Sz
//! observable <ident> <mexpr>
//! source <ident> count=<int> state=(mixed | ground | ket[<c>,...])
//! splitter <ident> observable=<ident> time=<float>
//! sink <ident> kind=(camera|battery)
//! route <ident>[.<branch-int>] -> <ident>
//! ```
//!
//! `<mexpr>` is `[sign][coef*]Sx|Sy|Sz|I`, where `coef` is a float, `alpha`
//! or `<float>*alpha`, or a bracketed literal `[[a+bi, ...], ...]`.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::eigen::HERMITIAN_TOL;
use crate::network::SinkFlavor;

use super::spec::{
    Builtin, Coefficient, DeviceDecl, ExperimentSpec, MatrixExpr, ObservableDecl, ResolveError,
    RouteDecl, StateDecl,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownIdentifier,
    DimensionMismatch,
    DuplicateName,
    NonHermitian,
}

/// First failure in an experiment text. `line` and `column` are 1-based and
/// count characters.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {:?}: {}", self.line, self.column, self.kind, self.message)
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn err(self, kind: ParseErrorKind, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            kind,
            message: message.into(),
        }
    }

    fn syntax(self, message: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax, message)
    }

    fn offset(self, chars: usize) -> Pos {
        Pos {
            line: self.line,
            column: self.column + chars,
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    text: String,
    pos: Pos,
}

/// Splits a line on whitespace outside brackets; stops at `#`.
fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut start = 0;
    let mut depth = 0usize;
    let mut open_at = Vec::new();
    for (i, ch) in line.chars().enumerate() {
        let column = i + 1;
        if ch == '#' {
            break;
        }
        if ch.is_whitespace() && depth == 0 {
            if !current.is_empty() {
                tokens.push(Token {
                    text: std::mem::take(&mut current),
                    pos: Pos { line: line_no, column: start },
                });
            }
            continue;
        }
        if current.is_empty() {
            start = column;
        }
        match ch {
            '[' => {
                depth += 1;
                open_at.push(column);
            }
            ']' => {
                if depth == 0 {
                    return Err(Pos { line: line_no, column }.syntax("unmatched `]`"));
                }
                depth -= 1;
                open_at.pop();
            }
            _ => {}
        }
        if !ch.is_whitespace() {
            current.push(ch);
        }
    }
    if depth > 0 {
        let column = *open_at.last().unwrap();
        return Err(Pos { line: line_no, column }.syntax("unclosed `[`"));
    }
    if !current.is_empty() {
        tokens.push(Token {
            text: current,
            pos: Pos { line: line_no, column: start },
        });
    }
    Ok(tokens)
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn ident(tok: &Token) -> Result<String, ParseError> {
    if is_ident(&tok.text) {
        Ok(tok.text.clone())
    } else {
        Err(tok.pos.syntax(format!("expected identifier, found `{}`", tok.text)))
    }
}

fn parse_float(text: &str, pos: Pos) -> Result<f64, ParseError> {
    let looks_numeric = text
        .chars()
        .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
    match text.parse::<f64>() {
        Ok(v) if looks_numeric && v.is_finite() => Ok(v),
        _ => Err(pos.syntax(format!("expected a finite number, found `{text}`"))),
    }
}

fn parse_int(text: &str, pos: Pos) -> Result<u64, ParseError> {
    if !text.is_empty() && text.chars().all(|c| c.is_ascii_digit()) {
        text.parse::<u64>()
            .map_err(|_| pos.syntax(format!("integer `{text}` out of range")))
    } else {
        Err(pos.syntax(format!("expected a non-negative integer, found `{text}`")))
    }
}

/// `a+bi`, `a`, `bi`, `i`, `-i`, `a-i`, ... (no whitespace).
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let number = |t: &str| -> Option<f64> {
        let ok = !t.is_empty()
            && t.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        t.parse::<f64>().ok().filter(|v| ok && v.is_finite())
    };
    if let Some(body) = s.strip_suffix('i') {
        // Split at the last sign that is not the leading one or an exponent sign.
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let (re_part, im_part) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("", body),
        };
        let re = if re_part.is_empty() { 0.0 } else { number(re_part)? };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            t => number(t)?,
        };
        Some(Complex64::new(re, im))
    } else {
        number(s).map(|re| Complex64::new(re, 0.0))
    }
}

/// Parses a bracketed list whose elements are parsed by `elem`; returns the
/// elements with their column offsets inside `text`.
fn split_bracketed(text: &str, pos: Pos) -> Result<Vec<(&str, usize)>, ParseError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| pos.syntax("expected a bracketed list"))?;
    if inner.is_empty() {
        return Err(pos.syntax("empty list"));
    }
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    let chars: Vec<(usize, char)> = inner.char_indices().collect();
    for (ci, &(bi, ch)) in chars.iter().enumerate() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                let start_byte = chars.get(start).map_or(inner.len(), |c| c.0);
                out.push((&inner[start_byte..bi], start + 1));
                start = ci + 1;
            }
            _ => {}
        }
    }
    let start_byte = chars.get(start).map_or(inner.len(), |c| c.0);
    out.push((&inner[start_byte..], start + 1));
    Ok(out)
}

fn parse_complex_list(text: &str, pos: Pos) -> Result<Vec<Complex64>, ParseError> {
    split_bracketed(text, pos)?
        .into_iter()
        .map(|(cell, off)| {
            parse_complex(cell)
                .ok_or_else(|| pos.offset(off).syntax(format!("malformed complex number `{cell}`")))
        })
        .collect()
}

fn parse_matrix_literal(text: &str, pos: Pos) -> Result<Vec<Vec<Complex64>>, ParseError> {
    let rows = split_bracketed(text, pos)?;
    let mut out = Vec::with_capacity(rows.len());
    for (row, off) in rows {
        let row_pos = pos.offset(off);
        if !row.starts_with('[') {
            return Err(row_pos.syntax("matrix rows must be bracketed"));
        }
        out.push(parse_complex_list(row, row_pos)?);
    }
    let n = out.len();
    if let Some(bad) = out.iter().position(|r| r.len() != n) {
        return Err(pos.err(
            ParseErrorKind::DimensionMismatch,
            format!("matrix literal is not square: row {} has {} entries, expected {n}", bad + 1, out[bad].len()),
        ));
    }
    Ok(out)
}

fn parse_mexpr(text: &str, pos: Pos) -> Result<MatrixExpr, ParseError> {
    if text.starts_with('[') {
        return parse_matrix_literal(text, pos).map(MatrixExpr::Literal);
    }
    let (negate, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let parts: Vec<&str> = rest.split('*').collect();
    let (builtin_text, coef_parts) = parts.split_last().expect("split yields at least one part");
    let builtin = Builtin::from_keyword(builtin_text).ok_or_else(|| {
        pos.syntax(format!(
            "expected `Sx`, `Sy`, `Sz`, `I` or a bracketed matrix, found `{builtin_text}`"
        ))
    })?;
    let mut factor = 1.0;
    let mut times_alpha = false;
    match coef_parts {
        [] => {}
        ["alpha"] => times_alpha = true,
        [num] => factor = parse_float(num, pos)?,
        [num, "alpha"] => {
            factor = parse_float(num, pos)?;
            times_alpha = true;
        }
        _ => return Err(pos.syntax(format!("malformed coefficient in `{text}`"))),
    }
    if negate {
        factor = -factor;
    }
    Ok(MatrixExpr::Scaled {
        coefficient: Coefficient { factor, times_alpha },
        builtin,
    })
}

/// Joins the remaining tokens of a line into one expression.
fn rest_expr(tokens: &[Token], what: &str, line_pos: Pos) -> Result<(String, Pos), ParseError> {
    match tokens.first() {
        None => Err(line_pos.syntax(format!("missing {what}"))),
        Some(first) => Ok((tokens.iter().map(|t| t.text.as_str()).collect(), first.pos)),
    }
}

fn key_values<'a>(
    tokens: &'a [Token],
    allowed: &[&str],
) -> Result<HashMap<&'a str, (&'a str, Pos)>, ParseError> {
    let mut out = HashMap::new();
    for tok in tokens {
        let (key, value) = tok
            .text
            .split_once('=')
            .ok_or_else(|| tok.pos.syntax(format!("expected key=value, found `{}`", tok.text)))?;
        if !allowed.contains(&key) {
            return Err(tok.pos.syntax(format!(
                "unknown key `{key}` (expected one of: {})",
                allowed.join(", ")
            )));
        }
        if value.is_empty() {
            return Err(tok.pos.syntax(format!("missing value for `{key}`")));
        }
        let value_pos = tok.pos.offset(key.chars().count() + 1);
        if out.insert(key, (value, value_pos)).is_some() {
            return Err(tok.pos.syntax(format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

struct Located<T> {
    value: T,
    line: Pos,
    /// Positions of the names this declaration references, in order.
    refs: Vec<Pos>,
    expr_pos: Option<Pos>,
}

/// Parses and validates an experiment description.
pub fn parse_experiment(text: &str) -> Result<ExperimentSpec, ParseError> {
    let mut name: Option<String> = None;
    let mut dim: Option<(usize, Pos)> = None;
    let mut hbar: Option<(f64, Pos)> = None;
    let mut alpha: Option<(f64, Pos)> = None;
    let mut hamiltonian: Option<(MatrixExpr, Pos)> = None;
    let mut observables: Vec<Located<ObservableDecl>> = Vec::new();
    let mut devices: Vec<Located<DeviceDecl>> = Vec::new();
    let mut routes: Vec<Located<RouteDecl>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = tokenize(raw, line_no)?;
        let Some((head, args)) = tokens.split_first() else {
            continue;
        };
        let here = head.pos;
        if name.is_none() && head.text != "experiment" {
            return Err(here.syntax(format!(
                "expected `experiment <name>` as the first statement, found `{}`",
                head.text
            )));
        }
        let single = |what: &str| -> Result<&Token, ParseError> {
            match args {
                [one] => Ok(one),
                [] => Err(here.offset(head.text.chars().count()).syntax(format!("missing {what}"))),
                [_, extra, ..] => Err(extra.pos.syntax(format!("unexpected `{}`", extra.text))),
            }
        };
        let duplicate = |what: &str| here.syntax(format!("`{what}` declared more than once"));

        match head.text.as_str() {
            "experiment" => {
                if name.is_some() {
                    return Err(duplicate("experiment"));
                }
                name = Some(ident(single("experiment name")?)?);
            }
            "dim" => {
                if dim.is_some() {
                    return Err(duplicate("dim"));
                }
                let tok = single("dimension")?;
                let d = parse_int(&tok.text, tok.pos)?;
                if d == 0 || d > 64 {
                    return Err(tok.pos.syntax("dim must be between 1 and 64"));
                }
                dim = Some((d as usize, here));
            }
            "hbar" => {
                if hbar.is_some() {
                    return Err(duplicate("hbar"));
                }
                let tok = single("value of hbar")?;
                let v = parse_float(&tok.text, tok.pos)?;
                if v <= 0.0 {
                    return Err(tok.pos.syntax("hbar must be positive"));
                }
                hbar = Some((v, here));
            }
            "alpha" => {
                if alpha.is_some() {
                    return Err(duplicate("alpha"));
                }
                let tok = single("value of alpha")?;
                alpha = Some((parse_float(&tok.text, tok.pos)?, here));
            }
            "hamiltonian" => {
                if hamiltonian.is_some() {
                    return Err(duplicate("hamiltonian"));
                }
                let (expr, pos) = rest_expr(args, "matrix expression", here)?;
                hamiltonian = Some((parse_mexpr(&expr, pos)?, pos));
            }
            "observable" => {
                let (name_tok, rest) = args
                    .split_first()
                    .ok_or_else(|| here.syntax("missing observable name"))?;
                let obs_name = ident(name_tok)?;
                let (expr, pos) = rest_expr(rest, "matrix expression", name_tok.pos)?;
                observables.push(Located {
                    value: ObservableDecl {
                        name: obs_name,
                        expr: parse_mexpr(&expr, pos)?,
                    },
                    line: name_tok.pos,
                    refs: vec![],
                    expr_pos: Some(pos),
                });
            }
            "source" => {
                let (name_tok, rest) = args.split_first().ok_or_else(|| here.syntax("missing source name"))?;
                let dev_name = ident(name_tok)?;
                let kv = key_values(rest, &["count", "state"])?;
                let (count_text, count_pos) = kv
                    .get("count")
                    .copied()
                    .ok_or_else(|| name_tok.pos.syntax("source needs count=<int>"))?;
                let count = parse_int(count_text, count_pos)?;
                if count == 0 {
                    return Err(count_pos.syntax("source count must be positive"));
                }
                let (state, state_pos) = match kv.get("state").copied() {
                    None | Some(("mixed", _)) => (StateDecl::Mixed, None),
                    Some(("ground", _)) => (StateDecl::Ground, None),
                    Some((s, p)) if s.starts_with("ket[") => {
                        let amps = parse_complex_list(&s[3..], p.offset(3))?;
                        (StateDecl::Ket(amps), Some(p))
                    }
                    Some((s, p)) => {
                        return Err(p.syntax(format!("expected mixed, ground or ket[...], found `{s}`")))
                    }
                };
                devices.push(Located {
                    value: DeviceDecl::Source {
                        name: dev_name,
                        count,
                        state,
                    },
                    line: name_tok.pos,
                    refs: vec![],
                    expr_pos: state_pos,
                });
            }
            "splitter" => {
                let (name_tok, rest) = args
                    .split_first()
                    .ok_or_else(|| here.syntax("missing splitter name"))?;
                let dev_name = ident(name_tok)?;
                let kv = key_values(rest, &["observable", "time"])?;
                let (obs, obs_pos) = kv
                    .get("observable")
                    .copied()
                    .ok_or_else(|| name_tok.pos.syntax("splitter needs observable=<name>"))?;
                if !is_ident(obs) {
                    return Err(obs_pos.syntax(format!("expected identifier, found `{obs}`")));
                }
                let time = match kv.get("time").copied() {
                    Some((t, p)) => parse_float(t, p)?,
                    None => 0.0,
                };
                devices.push(Located {
                    value: DeviceDecl::Splitter {
                        name: dev_name,
                        observable: obs.to_string(),
                        time,
                    },
                    line: name_tok.pos,
                    refs: vec![obs_pos],
                    expr_pos: None,
                });
            }
            "sink" => {
                let (name_tok, rest) = args.split_first().ok_or_else(|| here.syntax("missing sink name"))?;
                let dev_name = ident(name_tok)?;
                let kv = key_values(rest, &["kind"])?;
                let flavor = match kv.get("kind").copied() {
                    Some(("camera", _)) => SinkFlavor::Camera,
                    Some(("battery", _)) => SinkFlavor::Battery,
                    Some((k, p)) => return Err(p.syntax(format!("expected camera or battery, found `{k}`"))),
                    None => return Err(name_tok.pos.syntax("sink needs kind=camera|battery")),
                };
                devices.push(Located {
                    value: DeviceDecl::Sink { name: dev_name, flavor },
                    line: name_tok.pos,
                    refs: vec![],
                    expr_pos: None,
                });
            }
            "route" => routes.push(parse_route(raw, args, here)?),
            other => return Err(here.syntax(format!("unknown statement `{other}`"))),
        }
    }

    let Some(name) = name else {
        return Err(Pos { line: 1, column: 1 }.syntax("missing `experiment <name>`"));
    };
    let dim_val = dim.map_or(2, |d| d.0);
    let hbar_val = hbar.map_or(1.0, |h| h.0);
    let alpha_val = alpha.map_or(1.0, |a| a.0);
    let dim_pos = dim.map_or(Pos { line: 1, column: 1 }, |d| d.1);

    let check_matrix = |expr: &MatrixExpr, pos: Pos, what: &str| -> Result<(), ParseError> {
        let m = expr.resolve(dim_val, hbar_val, alpha_val).map_err(|e| match e {
            ResolveError::Malformed(msg) => pos.syntax(msg),
            other => pos.err(ParseErrorKind::DimensionMismatch, format!("{what}: {other}")),
        })?;
        let dev = m.hermiticity_error();
        if dev > HERMITIAN_TOL {
            return Err(pos.err(
                ParseErrorKind::NonHermitian,
                format!("{what} is not Hermitian (max |M - M^dagger| = {dev:e})"),
            ));
        }
        Ok(())
    };

    let hamiltonian = match hamiltonian {
        Some((expr, pos)) => {
            check_matrix(&expr, pos, "hamiltonian")?;
            expr
        }
        None => {
            if dim_val != 2 {
                return Err(dim_pos.err(
                    ParseErrorKind::DimensionMismatch,
                    "the default hamiltonian -alpha*Sz needs dim 2; declare `hamiltonian`",
                ));
            }
            ExperimentSpec::default_hamiltonian()
        }
    };

    let mut seen_obs: HashMap<&str, ()> = HashMap::new();
    for o in &observables {
        if seen_obs.insert(o.value.name.as_str(), ()).is_some() {
            return Err(o.line.err(
                ParseErrorKind::DuplicateName,
                format!("observable `{}` declared more than once", o.value.name),
            ));
        }
        check_matrix(&o.value.expr, o.expr_pos.unwrap(), &format!("observable `{}`", o.value.name))?;
    }

    let mut seen_dev: HashMap<&str, ()> = HashMap::new();
    for d in &devices {
        if seen_dev.insert(d.value.name(), ()).is_some() {
            return Err(d.line.err(
                ParseErrorKind::DuplicateName,
                format!("device `{}` declared more than once", d.value.name()),
            ));
        }
        match &d.value {
            DeviceDecl::Splitter { observable, .. } if !seen_obs.contains_key(observable.as_str()) => {
                return Err(d.refs[0].err(
                    ParseErrorKind::UnknownIdentifier,
                    format!("unknown observable `{observable}`"),
                ));
            }
            DeviceDecl::Source {
                state: StateDecl::Ket(amps),
                ..
            } => {
                let pos = d.expr_pos.unwrap();
                if amps.len() != dim_val {
                    return Err(pos.err(
                        ParseErrorKind::DimensionMismatch,
                        format!("ket has {} amplitudes, experiment has dim {dim_val}", amps.len()),
                    ));
                }
                if amps.iter().all(|a| a.norm() == 0.0) {
                    return Err(pos.syntax("ket is zero"));
                }
            }
            _ => {}
        }
    }

    for r in &routes {
        for (name, pos) in [(&r.value.from, r.refs[0]), (&r.value.to, r.refs[1])] {
            if !seen_dev.contains_key(name.as_str()) {
                return Err(pos.err(ParseErrorKind::UnknownIdentifier, format!("unknown device `{name}`")));
            }
        }
    }

    Ok(ExperimentSpec {
        name,
        dim: dim_val,
        hbar: hbar_val,
        alpha: alpha_val,
        hamiltonian,
        observables: observables.into_iter().map(|o| o.value).collect(),
        devices: devices.into_iter().map(|d| d.value).collect(),
        routes: routes.into_iter().map(|r| r.value).collect(),
    })
}

fn parse_route(raw: &str, args: &[Token], here: Pos) -> Result<Located<RouteDecl>, ParseError> {
    let first = args.first().ok_or_else(|| here.syntax("missing route endpoints"))?;
    // Work on the original text so `a.1->b` and `a.1 -> b` both parse.
    let chars: Vec<char> = raw.chars().collect();
    let body_start = first.pos.column - 1;
    let body_end = chars.iter().position(|&c| c == '#').unwrap_or(chars.len());
    let body: String = chars[body_start..body_end].iter().collect();
    let arrow = body
        .find("->")
        .ok_or_else(|| first.pos.syntax("expected `<device>[.<branch>] -> <device>`"))?;
    let arrow_col = first.pos.offset(body[..arrow].chars().count());

    let lhs = body[..arrow].trim_end();
    let rhs_raw = &body[arrow + 2..];
    let rhs = rhs_raw.trim();
    let rhs_pos = arrow_col.offset(2 + (rhs_raw.chars().count() - rhs_raw.trim_start().chars().count()));
    if lhs.is_empty() {
        return Err(arrow_col.syntax("missing route origin"));
    }
    if rhs.is_empty() {
        return Err(arrow_col.offset(2).syntax("missing route target"));
    }
    if !is_ident(rhs) {
        return Err(rhs_pos.syntax(format!("expected device name, found `{rhs}`")));
    }
    let (from, branch) = match lhs.split_once('.') {
        Some((dev, b)) => {
            let b_pos = first.pos.offset(dev.chars().count() + 1);
            (dev, Some(parse_int(b, b_pos)? as usize))
        }
        None => (lhs, None),
    };
    if !is_ident(from) {
        return Err(first.pos.syntax(format!("expected device name, found `{from}`")));
    }
    Ok(Located {
        value: RouteDecl {
            from: from.to_string(),
            branch,
            to: rhs.to_string(),
        },
        line: here,
        refs: vec![first.pos, rhs_pos],
        expr_pos: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1"), Some(c(1.0, 0.0)));
        assert_eq!(parse_complex("-0.5"), Some(c(-0.5, 0.0)));
        assert_eq!(parse_complex("2i"), Some(c(0.0, 2.0)));
        assert_eq!(parse_complex("i"), Some(c(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("1+2i"), Some(c(1.0, 2.0)));
        assert_eq!(parse_complex("1-i"), Some(c(1.0, -1.0)));
        assert_eq!(parse_complex("1e-3+2e-3i"), Some(c(1e-3, 2e-3)));
        assert_eq!(parse_complex("-1e+2-4E-1i"), Some(c(-100.0, -0.4)));
        assert_eq!(parse_complex(""), None);
        assert_eq!(parse_complex("1+"), None);
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("inf"), None);
        assert_eq!(parse_complex("1+2j"), None);
    }

    #[test]
    fn empty_input_fails_at_line_one() {
        let e = parse_experiment("").unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (1, 1, ParseErrorKind::Syntax));
        let e = parse_experiment("# only a comment\n\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Syntax);
    }

    #[test]
    fn first_statement_must_be_experiment() {
        let e = parse_experiment("\n  dim 2\nexperiment x\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn mexpr_forms() {
        let p = Pos { line: 1, column: 1 };
        assert_eq!(parse_mexpr("-alpha*Sz", p).unwrap(), MatrixExpr::scaled(-1.0, true, Builtin::Sz));
        assert_eq!(parse_mexpr("0.5*Sx", p).unwrap(), MatrixExpr::scaled(0.5, false, Builtin::Sx));
        assert_eq!(parse_mexpr("-2*alpha*I", p).unwrap(), MatrixExpr::scaled(-2.0, true, Builtin::Identity));
        assert_eq!(parse_mexpr("Sy", p).unwrap(), MatrixExpr::scaled(1.0, false, Builtin::Sy));
        assert!(parse_mexpr("2*Sq", p).is_err());
        assert!(parse_mexpr("beta*Sz", p).is_err());
        let lit = parse_mexpr("[[1,-i],[i,1]]", p).unwrap();
        assert_eq!(
            lit,
            MatrixExpr::Literal(vec![vec![c(1.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(1.0, 0.0)]])
        );
        let e = parse_mexpr("[[1,2],[3]]", p).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DimensionMismatch);
    }

    #[test]
    fn positions_of_errors() {
        let text = "experiment t\nobservable A [[1, 2], [0, 1]]\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonHermitian);
        assert_eq!((e.line, e.column), (2, 14));

        let text = "experiment t\nsplitter B observable=Q\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier);
        assert_eq!((e.line, e.column), (2, 23));

        let text = "experiment t\nsink a kind=camera\nsink a kind=battery\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateName);
        assert_eq!((e.line, e.column), (3, 6));

        let text = "experiment t\nsink a kind=camera\nroute a.x -> a\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (3, 9, ParseErrorKind::Syntax));

        let text = "experiment t\nsink a kind=camera\nroute a -> nowhere\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (3, 12, ParseErrorKind::UnknownIdentifier));

        let text = "experiment t\nsource s count=3 state=ket[1, 0, 0]\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 24, ParseErrorKind::DimensionMismatch));

        let text = "experiment t\ndim 3\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!((e.line, e.kind), (2, ParseErrorKind::DimensionMismatch));

        let text = "experiment t\nobservable A 2*Sz [\n";
        let e = parse_experiment(text).unwrap_err();
        assert_eq!((e.line, e.column, e.kind), (2, 19, ParseErrorKind::Syntax));
    }

    #[test]
    fn route_spacing_is_flexible() {
        let text = "experiment t\nsource s count=1 state=mixed\nsink k kind=camera\nroute s->k # done\n";
        let spec = parse_experiment(text).unwrap();
        assert_eq!(
            spec.routes,
            vec![RouteDecl {
                from: "s".into(),
                branch: None,
                to: "k".into()
            }]
        );
    }
}
