//! Graph and voltage JSON files.

use std::io::Read;
use std::path::Path;

use num_bigint::BigInt;
use serde::Deserialize;

use iwagraph::{Multigraph, OddPrime, PadicInt, Precision, VoltageAssignment};

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: usize,
    edges: Vec<EdgeEntry>,
}

/// One undirected edge; vertices are numbered from 1.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    from: usize,
    to: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PrecisionField {
    Digits(u32),
    Word(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VoltageFile {
    ell: u64,
    values: Vec<Number>,
    #[serde(default)]
    precision: Option<PrecisionField>,
}

/// Reads a file, or stdin for "-".
pub fn read_source(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::validation(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::validation(format!("reading {}: {e}", path.display())))?;
    }
    Ok(text)
}

pub fn parse_graph(text: &str) -> Result<Multigraph, Failure> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Failure::validation(format!("graph JSON: {e}")))?;
    let mut pairs = Vec::with_capacity(file.edges.len());
    for (k, e) in file.edges.iter().enumerate() {
        for end in [e.from, e.to] {
            if end == 0 || end > file.vertices {
                return Err(Failure::validation(format!(
                    "edge {} has endpoint {end}; vertices are numbered 1..={}",
                    k + 1,
                    file.vertices
                )));
            }
        }
        pairs.push((e.from - 1, e.to - 1));
    }
    Ok(Multigraph::from_undirected(file.vertices, &pairs)?)
}

pub fn parse_voltage(text: &str, g: &Multigraph) -> Result<VoltageAssignment, Failure> {
    let file: VoltageFile = serde_json::from_str(text).map_err(|e| Failure::validation(format!("voltage JSON: {e}")))?;
    let ell = OddPrime::new(file.ell)?;
    let precision = match file.precision {
        None => Precision::Exact,
        Some(PrecisionField::Digits(p)) => Precision::Mod(p),
        Some(PrecisionField::Word(w)) if w == "exact" => Precision::Exact,
        Some(PrecisionField::Word(w)) => {
            return Err(Failure::validation(format!("precision must be \"exact\" or a digit count, got {w:?}")))
        }
    };
    let values = file
        .values
        .iter()
        .map(|n| {
            let value = match n {
                Number::Int(i) => BigInt::from(*i),
                Number::Text(s) => s.trim().parse::<BigInt>().map_err(|_| Failure::validation(format!("voltage value {s:?} is not an integer")))?,
            };
            Ok(PadicInt::with_precision(value, precision, ell)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(VoltageAssignment::new(g, ell, values)?)
}
