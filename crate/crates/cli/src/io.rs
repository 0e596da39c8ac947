//! On-disk formats: plain-text matrices, labeled graphs with hex adjacency
//! rows, and PGM region-map exports.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use robinson_gauge::approx::{RegionLabel, RegionMap};
use robinson_gauge::bits::BitMatrix;
use robinson_gauge::graph::LabeledGraph;
use robinson_gauge::{StepGraphon, StepKernel};

use crate::CliError;

/// First line `N`, then `N` rows of `N` space-separated decimals.
pub fn matrix_to_string(values: &[f64], n: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{n}");
    for i in 0..n {
        let row: Vec<String> = (0..n).map(|j| format!("{}", values[i * n + j])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn save_graphon(path: &Path, w: &StepGraphon) -> Result<(), CliError> {
    fs::write(path, matrix_to_string(w.values(), w.resolution()))?;
    Ok(())
}

pub fn save_kernel(path: &Path, k: &StepKernel) -> Result<(), CliError> {
    fs::write(path, matrix_to_string(k.values(), k.resolution()))?;
    Ok(())
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let n: usize = lines
        .next()
        .ok_or_else(|| CliError::format("empty matrix file"))?
        .trim()
        .parse()
        .map_err(|_| CliError::format("first line must be the resolution"))?;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| CliError::format(format!("missing row {i}")))?;
        let row: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
        let row = row.map_err(|_| CliError::format(format!("bad number in row {i}")))?;
        if row.len() != n {
            return Err(CliError::format(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Load and validate a step graphon (entries in `[0,1]`, symmetric).
pub fn load_graphon(path: &Path) -> Result<StepGraphon, CliError> {
    let rows = parse_matrix(&fs::read_to_string(path)?)?;
    Ok(StepGraphon::from_rows(rows)?)
}

/// Load and validate a step kernel (entries in `[-1,1]`, symmetric).
pub fn load_kernel(path: &Path) -> Result<StepKernel, CliError> {
    let rows = parse_matrix(&fs::read_to_string(path)?)?;
    Ok(StepKernel::from_rows(rows)?)
}

fn hex_digit(v: u8) -> char {
    char::from_digit(v as u32, 16).expect("nibble")
}

/// Header `n seed`, one line of label decimals, then one hex-encoded
/// adjacency row per vertex (nibble `k` holds bits `4k..4k+3`, bit `4k`
/// in the high position).
pub fn graph_to_string(g: &LabeledGraph) -> String {
    let n = g.n();
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", n, g.seed());
    let labels: Vec<String> = g.labels().iter().map(|x| format!("{x}")).collect();
    let _ = writeln!(out, "{}", labels.join(" "));
    for i in 0..n {
        let mut line = String::with_capacity(n.div_ceil(4));
        for k in 0..n.div_ceil(4) {
            let mut v = 0u8;
            for b in 0..4 {
                let j = 4 * k + b;
                if j < n && g.has_edge(i, j) {
                    v |= 8 >> b;
                }
            }
            line.push(hex_digit(v));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn save_graph(path: &Path, g: &LabeledGraph) -> Result<(), CliError> {
    fs::write(path, graph_to_string(g))?;
    Ok(())
}

/// Parse [`graph_to_string`] output, re-validating every invariant.
pub fn parse_graph(text: &str) -> Result<LabeledGraph, CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| CliError::format("empty graph file"))?;
    let mut parts = header.split_whitespace();
    let n: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::format("header must start with the vertex count"))?;
    let seed: u64 = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::format("header must carry the sampling seed"))?;
    let label_line = lines
        .next()
        .ok_or_else(|| CliError::format("missing label line"))?;
    let labels: Result<Vec<f64>, _> = label_line
        .split_whitespace()
        .map(str::parse::<f64>)
        .collect();
    let labels = labels.map_err(|_| CliError::format("bad label"))?;
    if labels.len() != n {
        return Err(CliError::format("label count does not match header"));
    }
    // claimed[i*n + j]: row i marks j as a neighbour
    let mut claimed = vec![false; n * n];
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| CliError::format(format!("missing adjacency row {i}")))?
            .trim();
        if line.len() != n.div_ceil(4) {
            return Err(CliError::format(format!(
                "adjacency row {i} has length {}, expected {}",
                line.len(),
                n.div_ceil(4)
            )));
        }
        for (k, ch) in line.chars().enumerate() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| CliError::format(format!("bad hex digit in row {i}")))?
                as u8;
            for b in 0..4 {
                let j = 4 * k + b;
                if j < n && v & (8 >> b) != 0 {
                    claimed[i * n + j] = true;
                }
            }
        }
    }
    let mut adj = BitMatrix::zero(n);
    for i in 0..n {
        if claimed[i * n + i] {
            return Err(CliError::format(format!("self-loop at vertex {i}")));
        }
        for j in i + 1..n {
            if claimed[i * n + j] != claimed[j * n + i] {
                return Err(CliError::format(format!(
                    "adjacency rows disagree on edge {{{i},{j}}}"
                )));
            }
            adj.set_edge(i, j, claimed[i * n + j]);
        }
    }
    Ok(LabeledGraph::from_parts(labels, adj, seed)?)
}

pub fn load_graph(path: &Path) -> Result<LabeledGraph, CliError> {
    parse_graph(&fs::read_to_string(path)?)
}

/// One PGM (P2) file per level: black cells 2, white 1, grey 0; the lower
/// triangle mirrors the upper one.
pub fn region_map_pgm(map: &RegionMap, level: usize) -> String {
    let n = map.resolution();
    let mut out = String::new();
    let _ = writeln!(out, "P2");
    let _ = writeln!(
        out,
        "# level {level} of {}, alpha {}, black=2 white=1 grey=0",
        map.levels(),
        map.alpha()
    );
    let _ = writeln!(out, "{n} {n}");
    let _ = writeln!(out, "2");
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                let v = match map.label(level, a, b) {
                    RegionLabel::Black => 2,
                    RegionLabel::White => 1,
                    RegionLabel::Grey => 0,
                };
                v.to_string()
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use robinson_gauge::graph::sample_w_random;
    use robinson_gauge::GraphonSpec;

    #[test]
    fn matrix_round_trip_is_exact() {
        let w = GraphonSpec::steep(0.9, 0.8).unwrap().discretize(7).unwrap();
        let text = matrix_to_string(w.values(), 7);
        let rows = parse_matrix(&text).unwrap();
        let back = StepGraphon::from_rows(rows).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn graph_round_trip_is_exact() {
        let spec = GraphonSpec::flat(0.5, 0.3).unwrap();
        let g = sample_w_random(&spec, 37, 11).unwrap();
        let text = graph_to_string(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn parser_rejects_broken_inputs() {
        assert!(parse_matrix("2\n0.1 0.2\n0.3\n").is_err());
        assert!(parse_graph("3 0\n0.1 0.2 0.9\nz\n0\n0\n").is_err());
        // asymmetric adjacency: vertex 0 claims edge to 1, row 1 says none
        let text = "2 0\n0.25 0.75\n4\n0\n";
        assert!(parse_graph(text).is_err());
        // self loop
        let text = "2 0\n0.25 0.75\n8\n4\n";
        assert!(parse_graph(text).is_err());
    }
}
