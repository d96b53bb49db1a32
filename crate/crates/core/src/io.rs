//! JSON Lines records for representations.
//!
//! Output lines carry the quadruple together with its relation residual and both
//! moment coordinates. Input lines may be such records or bare quadruples
//! `{"g1": [w,x,y,z], "h1": ..., "g2": ..., "h2": ...}`.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::polytope::{moment_mu_with, mu_lambda_with};
use crate::repvar::Representation;
use crate::tol::Tolerances;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepRecord {
    pub rep: Representation,
    pub residual: f64,
    /// `μ`, absent when the trace angles fall outside Δ̃
    pub mu: Option<[f64; 3]>,
    pub mu_region: Option<String>,
    pub mu_lambda: Option<[f64; 3]>,
    pub mu_lambda_region: Option<String>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub meta: Map<String, Value>,
}

impl RepRecord {
    pub fn new(rep: Representation, tol: &Tolerances) -> Self {
        let mu = moment_mu_with(&rep, tol).ok();
        let ml = mu_lambda_with(&rep, tol).ok();
        RepRecord {
            rep,
            residual: rep.relation_residual(),
            mu: mu.map(|p| p.x),
            mu_region: mu.map(|p| p.region.to_string()),
            mu_lambda: ml.map(|p| p.x),
            mu_lambda_region: ml.map(|p| p.region.to_string()),
            meta: Map::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputLine {
    Record { rep: Representation },
    Bare(Representation),
}

/// Parses one line; blank lines are the caller's concern.
pub fn parse_line(line: &str, number: usize) -> Result<Representation> {
    match serde_json::from_str::<InputLine>(line) {
        Ok(InputLine::Record { rep }) | Ok(InputLine::Bare(rep)) => Ok(rep),
        Err(e) => Err(Error::Parse { line: number, message: e.to_string() }),
    }
}

/// Reads every non-blank line as a representation.
pub fn read_jsonl<R: BufRead>(reader: R) -> Result<Vec<Representation>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_line(&line, i + 1)?);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write, T: Serialize>(mut out: W, items: &[T]) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
