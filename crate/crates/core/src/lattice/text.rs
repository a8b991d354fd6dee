//! The pattern text format.
//!
//! ```text
//! d=2 A=[(0,0),(1,0),(0,1)] U=box(3,2) minus (2,1)
//! (0,0) (1,0) (0,0)
//! (0,1) (0,0) _
//! ```
//!
//! Row y is line y + 1; holes are `_` and must match the `minus` list.
//! `A=` also accepts the tokens `AL`, `A+`, `Aplus` and `Aoplus`.

use std::collections::BTreeSet;

use super::{fmt_point, Pattern, Point, RestrictingSet};
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Parses `(a,b),(c,d)` style lists; whitespace is ignored.
pub fn parse_point_list(s: &str) -> Result<Vec<Point>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        rest = rest.strip_prefix(',').unwrap_or(rest);
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| parse_err(format!("expected '(' in {s:?}")))?;
        let end = body.find(')').ok_or_else(|| parse_err("unclosed '('"))?;
        out.push(parse_point(&body[..end])?);
        rest = &body[end + 1..];
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<Point> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| parse_err(format!("bad integer {t:?}"))))
        .collect()
}

pub fn parse_set(token: &str) -> Result<RestrictingSet> {
    if let Some(p) = RestrictingSet::preset(token.trim()) {
        return Ok(p);
    }
    let inner = token
        .trim()
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| parse_err(format!("unknown restricting set {token:?}")))?;
    let pts = parse_point_list(inner)?;
    let dim = pts.first().map_or(0, Vec::len);
    RestrictingSet::new(dim, pts)
}

/// Parses a pattern file.
pub fn parse_pattern(text: &str) -> Result<Pattern> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| parse_err("empty input"))?;
    let (a_pos, u_pos) = match (header.find("A="), header.find("U=")) {
        (Some(a), Some(u)) if a < u => (a, u),
        _ => return Err(parse_err("header needs d=, A= and U= fields")),
    };
    let d: usize = header[..a_pos]
        .trim()
        .strip_prefix("d=")
        .and_then(|t| t.trim().parse().ok())
        .ok_or_else(|| parse_err("bad d= field"))?;
    if d != 2 {
        return Err(parse_err("only d=2 patterns have a text form"));
    }
    let set = parse_set(&header[a_pos + 2..u_pos])?;
    if set.dim() != 2 {
        return Err(parse_err("restricting set is not planar"));
    }
    let u = header[u_pos + 2..].trim();
    let (bx, holes) = match u.find("minus") {
        Some(i) => (u[..i].trim(), parse_point_list(&u[i + 5..])?),
        None => (u, Vec::new()),
    };
    let dims = bx
        .strip_prefix("box(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| parse_err(format!("bad domain {bx:?}")))?;
    let dims = parse_point(dims)?;
    if dims.len() != 2 || dims.iter().any(|&n| n < 1) {
        return Err(parse_err("box needs two positive sides"));
    }
    let (n1, n2) = (dims[0], dims[1]);
    let holes: BTreeSet<Point> = holes.into_iter().collect();

    let mut entries = Vec::new();
    for y in 0..n2 {
        let row = lines
            .next()
            .ok_or_else(|| parse_err(format!("missing row {y}")))?;
        let tokens = split_tokens(row);
        if tokens.len() != n1 as usize {
            return Err(parse_err(format!("row {y} has {} cells, expected {n1}", tokens.len())));
        }
        for (x, tok) in tokens.iter().enumerate() {
            let cell = vec![x as i64, y];
            let hole = holes.contains(&cell);
            match (tok.as_str(), hole) {
                ("_", true) => {}
                ("_", false) => return Err(parse_err(format!("unexpected hole at {}", fmt_point(&cell)))),
                (_, true) => return Err(parse_err(format!("cell {} is listed as a hole", fmt_point(&cell)))),
                (t, false) => {
                    let v = parse_point_list(t)?;
                    if v.len() != 1 {
                        return Err(parse_err(format!("bad cell token {t:?}")));
                    }
                    entries.push((cell, v.into_iter().next().unwrap()));
                }
            }
        }
    }
    if lines.next().is_some() {
        return Err(parse_err("trailing rows after the pattern"));
    }
    Pattern::new(set, entries)
}

fn split_tokens(row: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for ch in row.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Writes a planar pattern whose domain lies in the first quadrant.
pub fn format_pattern(pat: &Pattern) -> Result<String> {
    if pat.set().dim() != 2 {
        return Err(Error::Domain("only planar patterns have a text form".into()));
    }
    let (lo, hi) = pat.bounding_box();
    if lo.iter().any(|&x| x < 0) {
        return Err(Error::Domain("domain must lie in the first quadrant".into()));
    }
    let (n1, n2) = (hi[0] + 1, hi[1] + 1);
    let mut holes = Vec::new();
    let mut rows = Vec::new();
    for y in 0..n2 {
        let mut toks = Vec::new();
        for x in 0..n1 {
            match pat.value(&[x, y]) {
                Some(v) => toks.push(fmt_point(v)),
                None => {
                    holes.push(fmt_point(&[x, y]));
                    toks.push("_".to_string());
                }
            }
        }
        rows.push(toks.join(" "));
    }
    let mut out = format!("d=2 A={} U=box({n1},{n2})", pat.set());
    if !holes.is_empty() {
        out.push_str(" minus ");
        out.push_str(&holes.join(","));
    }
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}
