//! The map definition text format.
//!
//! ```text
//! # comment
//! vars: x y
//! x -> -0.5*x + x*y
//! y -> -1/2*y + x*y
//! ```

use std::fmt::Write as _;

use daest_core::{Poly, PolyMap};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, column, message: message.into() }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Cursor over one expression line.
struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    /// column of `s[0]` in the source line, 1-based
    base: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.s.get(self.pos).map(|&b| b as char)
    }

    fn col(&self) -> usize {
        self.base + self.pos
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        err(self.line, self.col(), message)
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let s = self.s;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).unwrap_or("");
        let v: f64 = text.parse().map_err(|_| err(self.line, self.base + start, format!("bad number `{text}`")))?;
        self.pos = i;
        Ok(v)
    }

    fn integer(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        match text.parse::<u32>() {
            Ok(k) if k > 0 => Ok(k),
            _ => Err(err(self.line, self.base + start, "exponent must be a positive integer")),
        }
    }

    fn ident(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && is_ident(self.s[self.pos] as char) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("")
    }
}

/// One term: optional coefficient (decimal or `a/b`) and a monomial.
fn term(cur: &mut Cursor, vars: &[String]) -> Result<(Vec<u32>, f64), ParseError> {
    let n = vars.len();
    let mut exps = vec![0u32; n];
    let mut coef = 1.0;
    if matches!(cur.peek(), Some(c) if c.is_ascii_digit() || c == '.') {
        let col = cur.col();
        let num = cur.number()?;
        coef = num;
        if cur.peek() == Some('/') {
            cur.pos += 1;
            let den = cur.number()?;
            coef = num / den;
        }
        if !coef.is_finite() {
            return Err(err(cur.line, col, "coefficient is not finite"));
        }
        if cur.peek() == Some('*') {
            cur.pos += 1;
        } else {
            return Ok((exps, coef));
        }
    }
    loop {
        match cur.peek() {
            Some(c) if is_ident_start(c) => {
                let col = cur.col();
                let name = cur.ident();
                let k = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| err(cur.line, col, format!("undeclared variable `{name}`")))?;
                let mut e = 1;
                if cur.peek() == Some('^') {
                    cur.pos += 1;
                    e = cur.integer()?;
                }
                exps[k] += e;
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                // numeric factor after a monomial, e.g. `x*2`
                let col = cur.col();
                let v = cur.number()?;
                coef *= v;
                if !coef.is_finite() {
                    return Err(err(cur.line, col, "coefficient is not finite"));
                }
            }
            Some(c) => return Err(cur.error(format!("unexpected `{c}`"))),
            None => return Err(cur.error("expected a term")),
        }
        if cur.peek() == Some('*') {
            cur.pos += 1;
        } else {
            return Ok((exps, coef));
        }
    }
}

fn expression(cur: &mut Cursor, vars: &[String]) -> Result<Vec<(Vec<u32>, f64)>, ParseError> {
    let mut terms = Vec::new();
    let mut sign = 1.0;
    if let Some(c @ ('+' | '-')) = cur.peek() {
        cur.pos += 1;
        if c == '-' {
            sign = -1.0;
        }
    }
    loop {
        let (e, c) = term(cur, vars)?;
        terms.push((e, sign * c));
        match cur.peek() {
            None => return Ok(terms),
            Some('+') => sign = 1.0,
            Some('-') => sign = -1.0,
            Some(c) => return Err(cur.error(format!("unexpected `{c}`"))),
        }
        cur.pos += 1;
    }
}

pub fn parse_map(text: &str) -> Result<PolyMap, ParseError> {
    let mut vars: Option<Vec<String>> = None;
    let mut comps: Vec<Option<Vec<(Vec<u32>, f64)>>> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let indent = raw.len() - raw.trim_start().len();
        match &vars {
            None => {
                let rest = trimmed
                    .strip_prefix("vars:")
                    .ok_or_else(|| err(line, indent + 1, "expected `vars:` declaration"))?;
                let names: Vec<String> = rest.split_whitespace().map(String::from).collect();
                if names.is_empty() {
                    return Err(err(line, indent + 1, "no variables declared"));
                }
                for (i, n) in names.iter().enumerate() {
                    if !n.chars().next().is_some_and(is_ident_start) || !n.chars().all(is_ident) {
                        return Err(err(line, indent + 1, format!("bad identifier `{n}`")));
                    }
                    if names[..i].contains(n) {
                        return Err(err(line, indent + 1, format!("variable `{n}` declared twice")));
                    }
                }
                comps = vec![None; names.len()];
                vars = Some(names);
            }
            Some(names) => {
                let arrow = trimmed
                    .find("->")
                    .ok_or_else(|| err(line, indent + 1, "expected `<var> -> <expr>`"))?;
                let lhs = trimmed[..arrow].trim();
                let k = names
                    .iter()
                    .position(|v| v == lhs)
                    .ok_or_else(|| err(line, indent + 1, format!("undeclared variable `{lhs}`")))?;
                if comps[k].is_some() {
                    return Err(err(line, indent + 1, format!("`{lhs}` defined twice")));
                }
                let body = &trimmed[arrow + 2..];
                let mut cur = Cursor { s: body.as_bytes(), pos: 0, line, base: indent + arrow + 3 };
                comps[k] = Some(expression(&mut cur, names)?);
            }
        }
    }
    let names = vars.ok_or_else(|| err(last_line.max(1), 1, "missing `vars:` declaration"))?;
    let mut polys = Vec::with_capacity(names.len());
    for (name, c) in names.iter().zip(comps) {
        let terms = c.ok_or_else(|| err(last_line.max(1), 1, format!("no equation for `{name}`")))?;
        polys.push(Poly::from_terms(names.len(), terms).map_err(|e| err(0, 0, e.to_string()))?);
    }
    PolyMap::new(names, polys).map_err(|e| err(0, 0, e.to_string()))
}

fn literal(c: f64) -> String {
    let a = c.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

/// Text that [`parse_map`] reads back to the same coefficients.
pub fn serialize_map(f: &PolyMap) -> String {
    let names = f.var_names();
    let mut out = String::new();
    let _ = writeln!(out, "vars: {}", names.join(" "));
    for (name, comp) in names.iter().zip(f.components()) {
        let _ = write!(out, "{name} ->");
        if comp.terms().is_empty() {
            out.push_str(" 0");
        }
        for (i, t) in comp.terms().iter().enumerate() {
            let sign = if t.coef < 0.0 { "-" } else { "+" };
            if i == 0 {
                let _ = write!(out, " {}", if t.coef < 0.0 { "-" } else { "" });
            } else {
                let _ = write!(out, " {sign} ");
            }
            out.push_str(&literal(t.coef.abs()));
            for (k, &e) in t.exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => {
                        let _ = write!(out, "*{}", names[k]);
                    }
                    _ => {
                        let _ = write!(out, "*{}^{e}", names[k]);
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}
