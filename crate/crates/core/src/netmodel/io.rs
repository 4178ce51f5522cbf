//! Edge-list text format.
//!
//! ```text
//! # comment
//! undirected 4
//! 0 1 1.0
//! 3 3 0.5      # self-weight (undirected only)
//! ```
//!
//! The header is `directed <n>` or `undirected <n>`. Labels may be any
//! non-negative integers; if some label is `>= n`, the distinct labels are
//! remapped in ascending order onto `0..k` and the originals are kept in the
//! network's label table.

use std::fmt::Write as _;
use std::path::Path;

use super::{Directedness, NetworkBuilder, SocialNetwork};
use crate::error::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_edge_list(text: &str) -> Result<SocialNetwork> {
    let mut header: Option<(Directedness, usize)> = None;
    let mut rows: Vec<(usize, u64, u64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((directedness, _)) = header else {
            if tokens.len() != 2 {
                return Err(parse_error(
                    lineno,
                    "expected header `directed <n>` or `undirected <n>`",
                ));
            }
            let d = match tokens[0] {
                "directed" => Directedness::Directed,
                "undirected" => Directedness::Undirected,
                other => {
                    return Err(parse_error(
                        lineno,
                        format!("unknown network kind `{other}`"),
                    ))
                }
            };
            let n: usize = tokens[1]
                .parse()
                .map_err(|_| parse_error(lineno, format!("invalid buyer count `{}`", tokens[1])))?;
            header = Some((d, n));
            continue;
        };
        if tokens.len() != 3 {
            return Err(parse_error(
                lineno,
                format!("expected `i j w`, found {} fields", tokens.len()),
            ));
        }
        let i: u64 = tokens[0]
            .parse()
            .map_err(|_| parse_error(lineno, format!("invalid buyer label `{}`", tokens[0])))?;
        let j: u64 = tokens[1]
            .parse()
            .map_err(|_| parse_error(lineno, format!("invalid buyer label `{}`", tokens[1])))?;
        let w: f64 = tokens[2]
            .parse()
            .map_err(|_| parse_error(lineno, format!("invalid weight `{}`", tokens[2])))?;
        if !w.is_finite() {
            return Err(Error::Validation(format!(
                "line {lineno}: weight must be finite"
            )));
        }
        if w < 0.0 {
            return Err(Error::Validation(format!(
                "line {lineno}: negative weight {w}"
            )));
        }
        if i == j && directedness.is_directed() {
            return Err(Error::Validation(format!(
                "line {lineno}: self-loop ({i}, {i}) in a directed network; \
                 store it as a self-weight and apply eliminate_selfloops"
            )));
        }
        rows.push((lineno, i, j, w));
    }

    let (directedness, n) = header.ok_or_else(|| parse_error(1, "missing header line"))?;
    if n == 0 {
        return Err(Error::Validation(
            "network must have at least one buyer".into(),
        ));
    }

    let needs_remap = rows
        .iter()
        .any(|&(_, i, j, _)| i >= n as u64 || j >= n as u64);
    let labels: Vec<u64> = if needs_remap {
        let mut distinct: Vec<u64> = rows.iter().flat_map(|&(_, i, j, _)| [i, j]).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > n {
            return Err(Error::Validation(format!(
                "{} distinct buyer labels but header declares n = {n}",
                distinct.len()
            )));
        }
        let next = distinct.last().map_or(0, |&m| m + 1);
        let pad = n - distinct.len();
        distinct.extend((0..pad as u64).map(|k| next + k));
        distinct
    } else {
        (0..n as u64).collect()
    };
    let index_of = |label: u64| -> usize {
        if needs_remap {
            labels.binary_search(&label).expect("label collected above")
        } else {
            label as usize
        }
    };

    let mut b = NetworkBuilder::new(directedness, n);
    for &(lineno, i, j, w) in &rows {
        b.add_edge(index_of(i), index_of(j), w)
            .map_err(|e| Error::Validation(format!("line {lineno}: {e}")))?;
    }
    if b.duplicates_merged() > 0 {
        log::warn!(
            "merged {} duplicate edge entries by summation",
            b.duplicates_merged()
        );
    }
    b.with_labels(labels)?.build()
}

/// Canonical edge-list text: header, sorted edges, then self-weights, all in
/// dense indices. Directed self-weights have no text form.
pub fn to_edge_list(g: &SocialNetwork) -> Result<String> {
    if g.is_directed() && g.total_self_weight() > 0.0 {
        return Err(Error::Unsupported(
            "directed self-weights need the JSON format".into(),
        ));
    }
    let mut out = String::new();
    writeln!(out, "{} {}", g.directedness(), g.n()).unwrap();
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.from, e.to, e.weight).unwrap();
    }
    for (i, &w) in g.self_weights().iter().enumerate() {
        if w > 0.0 {
            writeln!(out, "{i} {i} {w}").unwrap();
        }
    }
    Ok(out)
}

pub fn load_network(path: impl AsRef<Path>) -> Result<SocialNetwork> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|ext| ext == "json") {
        SocialNetwork::from_json(&text)
    } else {
        parse_edge_list(&text)
    }
}

pub fn save_network(g: &SocialNetwork, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = if path.extension().is_some_and(|ext| ext == "json") {
        g.to_json()
    } else {
        to_edge_list(g)?
    };
    std::fs::write(path, text)?;
    Ok(())
}
