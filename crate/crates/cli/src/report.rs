use std::fs;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::{Command, Failure, Format, OutputArgs};

/// Flat view of a result for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Versions {
    subcrit: &'static str,
    #[serde(rename = "subcrit-cli")]
    cli: &'static str,
}

#[derive(Serialize)]
struct Report<'a> {
    config: &'a Command,
    format: Format,
    input_hash: String,
    versions: Versions,
    result: Value,
}

/// SHA-256 of the git-style blob `"blob <len>\0" + data`.
pub fn blob_hash(data: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", data.len()).as_bytes());
    h.update(data);
    hex::encode(h.finalize())
}

/// Hash of the configuration followed by every input file.
fn input_hash(config: &Command, inputs: &[Vec<u8>]) -> String {
    let mut data = serde_json::to_vec(config).expect("config serializes");
    for i in inputs {
        data.extend_from_slice(i);
    }
    blob_hash(&data)
}

pub fn emit(
    config: &Command,
    out: &OutputArgs,
    inputs: &[Vec<u8>],
    result: Value,
    table: Table,
) -> Result<(), Failure> {
    let hash = input_hash(config, inputs);
    let text = match out.format {
        Format::Json => {
            let report = Report {
                config,
                format: out.format,
                input_hash: hash,
                versions: Versions {
                    subcrit: subcrit::VERSION,
                    cli: env!("CARGO_PKG_VERSION"),
                },
                result,
            };
            let mut s = serde_json::to_string_pretty(&report).map_err(|e| Failure::Numeric(e.to_string()))?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Failure::Config(e.to_string());
            w.write_record(&table.header).map_err(io)?;
            for r in &table.rows {
                w.write_record(r).map_err(io)?;
            }
            let mut bytes = format!("# input_hash={hash}\n").into_bytes();
            bytes.extend(w.into_inner().map_err(|e| Failure::Config(e.to_string()))?);
            bytes
        }
    };
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&text)
            .map_err(|e| Failure::Config(e.to_string())),
    }
}
