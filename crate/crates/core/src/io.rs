//! Text formats.
//!
//! Edge list: a header line `n d`, then one line per stored edge,
//! `i1 ... id w` with 1-based node ids and `w` in `[0, 1]`, or `i1 ... id x`
//! for an explicit erasure. Lines starting with `#` are comments. The comment
//! `# unlisted=erased` marks a censored file in which omitted edges are
//! erasures rather than zero weights.
//!
//! Partition: one line per node, `i label`, both 1-based.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::hypergraph::{HypergraphBuilder, Partition, Unlisted, WeightedHypergraph};

const ERASED_DIRECTIVE: &str = "unlisted=erased";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn io_err(line: usize, e: std::io::Error) -> Error {
    parse_err(line, format!("read failed: {e}"))
}

/// Reads an edge-list hypergraph.
pub fn parse_hypergraph<R: BufRead>(reader: R) -> Result<WeightedHypergraph> {
    let mut builder: Option<HypergraphBuilder> = None;
    let mut unlisted = Unlisted::Zero;
    let mut ids: Vec<u32> = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| io_err(lineno, e))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if let Some(comment) = text.strip_prefix('#') {
            if comment.trim() == ERASED_DIRECTIVE {
                unlisted = Unlisted::Erased;
            }
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();

        let Some(b) = builder.as_mut() else {
            if fields.len() != 2 {
                return Err(parse_err(lineno, "header must be `n d`"));
            }
            let n: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node count `{}`", fields[0])))?;
            let d: usize = fields[1]
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad edge size `{}`", fields[1])))?;
            builder =
                Some(HypergraphBuilder::new(n, d).map_err(|e| parse_err(lineno, e.to_string()))?);
            continue;
        };

        let (n, d) = (b.n(), b.d());
        if fields.len() != d + 1 {
            return Err(parse_err(
                lineno,
                format!(
                    "expected {d} node ids and a weight, found {} fields",
                    fields.len()
                ),
            ));
        }
        ids.clear();
        for f in &fields[..d] {
            let id: u64 = f
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad node id `{f}`")))?;
            if id == 0 || id > n as u64 {
                return Err(parse_err(lineno, format!("node id {id} outside [1, {n}]")));
            }
            ids.push((id - 1) as u32);
        }
        let w = fields[d];
        let res = if w == "x" {
            b.add_erased(&ids)
        } else {
            let weight: f64 = w
                .parse()
                .map_err(|_| parse_err(lineno, format!("bad weight `{w}`")))?;
            if weight.is_nan() {
                return Err(parse_err(lineno, "weight is NaN"));
            }
            if !(0.0..=1.0).contains(&weight) {
                return Err(Error::WeightOutOfRange(weight));
            }
            b.add(&ids, weight)
        };
        res.map_err(|e| match e {
            Error::DuplicateNode(v) => parse_err(lineno, format!("duplicate node {}", v + 1)),
            other => parse_err(lineno, other.to_string()),
        })?;
    }

    let builder = builder.ok_or_else(|| parse_err(0, "missing `n d` header"))?;
    builder
        .unlisted(unlisted)
        .build()
        .map_err(|e| parse_err(0, e.to_string()))
}

/// Writes an edge-list hypergraph with edges in lexicographic order.
pub fn serialize_hypergraph(h: &WeightedHypergraph) -> String {
    let mut out = String::with_capacity(16 + h.len() * (h.d() * 5 + 8));
    if h.unlisted() == Unlisted::Erased {
        let _ = writeln!(out, "# {ERASED_DIRECTIVE}");
    }
    let _ = writeln!(out, "{} {}", h.n(), h.d());
    for e in h.iter() {
        for v in e.nodes {
            let _ = write!(out, "{} ", v + 1);
        }
        if e.observed {
            let _ = writeln!(out, "{}", e.weight);
        } else {
            out.push_str("x\n");
        }
    }
    out
}

/// Reads a partition file. `k` defaults to the largest label present.
pub fn parse_partition<R: BufRead>(reader: R, k: Option<usize>) -> Result<Partition> {
    let mut entries: Vec<(usize, u32)> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| io_err(lineno, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut it = text.split_whitespace();
        let (Some(i), Some(l), None) = (it.next(), it.next(), it.next()) else {
            return Err(parse_err(lineno, "expected `node label`"));
        };
        let i: usize = i
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node id `{i}`")))?;
        let l: u32 = l
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad label `{l}`")))?;
        if i == 0 || l == 0 {
            return Err(parse_err(lineno, "node ids and labels are 1-based"));
        }
        entries.push((i - 1, l - 1));
    }
    let n = entries.len();
    let mut labels = vec![u32::MAX; n];
    for &(i, l) in &entries {
        if i >= n {
            return Err(Error::InvalidPartition(format!(
                "node {} but only {n} lines",
                i + 1
            )));
        }
        if labels[i] != u32::MAX {
            return Err(Error::InvalidPartition(format!(
                "node {} listed twice",
                i + 1
            )));
        }
        labels[i] = l;
    }
    let max_label = labels.iter().map(|&l| l as usize + 1).max().unwrap_or(1);
    let k = k.unwrap_or(max_label);
    Partition::new(labels, k)
}

/// Writes a partition file.
pub fn serialize_partition(p: &Partition) -> String {
    let mut out = String::with_capacity(p.n() * 8);
    for (i, &l) in p.labels().iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, l + 1);
    }
    out
}
