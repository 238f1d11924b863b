//! Versioned JSON documents for machines and bags, and histogram emitters.
//!
//! Machine document:
//!
//! ```text
//! {"version": 1, "size": 2, "output": 0,
//!  "nodes": [{"tt": 1, "in": [1, 1]}, {"tt": 8, "in": [0, 0]}]}
//! ```
//!
//! Bag document: `{"version": 1, "entries": [...]}`, where each entry holds a
//! `bnm` body (the machine document without `version`), `out`, `out_len`,
//! `ratio`, optional `lineage: [feeding_id, receiving_id]` and `trial`. Entry
//! ids are zero-based positions in `entries`.

use serde::{Deserialize, Serialize};

use crate::cstring::{canonicalize, parse_bits};
use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::machine::{efficiency_ratio, Bnm, NodeSpec, TruthTable};
use crate::search::{Bag, BagEntry};

pub const FORMAT_VERSION: u64 = 1;

const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    tt: u64,
    #[serde(rename = "in")]
    inputs: [u64; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BnmBody {
    size: u64,
    output: u64,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BnmDoc {
    version: u64,
    size: u64,
    output: u64,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    bnm: BnmBody,
    out: String,
    out_len: u64,
    ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lineage: Option<[u64; 2]>,
    trial: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BagDoc {
    version: u64,
    entries: Vec<EntryDoc>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u64,
}

/// Rejects unknown versions before the body is interpreted.
fn check_version(text: &str) -> Result<()> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion {
            found: probe.version,
            supported: FORMAT_VERSION,
        });
    }
    Ok(())
}

impl From<&Bnm> for BnmBody {
    fn from(m: &Bnm) -> Self {
        BnmBody {
            size: m.size() as u64,
            output: m.output() as u64,
            nodes: m
                .nodes()
                .iter()
                .map(|n| NodeDoc {
                    tt: n.tt.bits().into(),
                    inputs: [n.inputs[0] as u64, n.inputs[1] as u64],
                })
                .collect(),
        }
    }
}

impl TryFrom<BnmBody> for Bnm {
    type Error = Error;

    fn try_from(body: BnmBody) -> Result<Bnm> {
        if body.size != body.nodes.len() as u64 {
            return Err(Error::Document(format!(
                "size mismatch: size is {} but {} nodes are listed",
                body.size,
                body.nodes.len()
            )));
        }
        let index = |v: u64| usize::try_from(v).unwrap_or(usize::MAX);
        let nodes = body
            .nodes
            .iter()
            .map(|n| {
                let tt = u8::try_from(n.tt)
                    .ok()
                    .and_then(|b| TruthTable::new(b).ok())
                    .ok_or(Error::TruthTableRange(n.tt.min(u32::MAX as u64) as u32))?;
                Ok(NodeSpec::new(tt, index(n.inputs[0]), index(n.inputs[1])))
            })
            .collect::<Result<Vec<_>>>()?;
        Bnm::new(nodes, index(body.output))
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn serialize_bnm(m: &Bnm) -> String {
    let body = BnmBody::from(m);
    to_json(&BnmDoc {
        version: FORMAT_VERSION,
        size: body.size,
        output: body.output,
        nodes: body.nodes,
    })
}

pub fn parse_bnm(text: &str) -> Result<Bnm> {
    check_version(text)?;
    let doc: BnmDoc = serde_json::from_str(text)?;
    let body = BnmBody {
        size: doc.size,
        output: doc.output,
        nodes: doc.nodes,
    };
    Bnm::try_from(body)
}

pub fn serialize_bag(bag: &Bag) -> String {
    let entries = bag
        .entries()
        .iter()
        .map(|e| EntryDoc {
            bnm: (&e.machine).into(),
            out: e.out.to_string(),
            out_len: e.out_len,
            ratio: e.ratio,
            lineage: e.lineage.map(|(p, q)| [p as u64, q as u64]),
            trial: e.trial,
        })
        .collect();
    to_json(&BagDoc {
        version: FORMAT_VERSION,
        entries,
    })
}

/// Loads a bag. Every entry's `out` must already be canonical and agree with
/// `out_len` and `ratio`; with `strict` the output is also recomputed from the
/// machine and compared.
pub fn parse_bag(text: &str, strict: bool) -> Result<Bag> {
    check_version(text)?;
    let doc: BagDoc = serde_json::from_str(text)?;
    let entries = doc
        .entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| parse_entry(e, strict).map_err(|err| entry_error(i, err)))
        .collect::<Result<Vec<_>>>()?;
    Bag::from_entries(entries)
}

fn entry_error(entry: usize, err: Error) -> Error {
    match err {
        Error::Document(message) => Error::Entry { entry, message },
        other => Error::Entry {
            entry,
            message: other.to_string(),
        },
    }
}

fn inconsistent(message: String) -> Error {
    Error::Document(message)
}

fn parse_entry(doc: EntryDoc, strict: bool) -> Result<BagEntry> {
    let machine = Bnm::try_from(doc.bnm)?;
    let raw = parse_bits(&doc.out)?;
    let out = canonicalize(&raw)?;
    if out.bits() != raw.as_slice() {
        return Err(inconsistent(format!(
            "out {:?} is not in canonical form",
            doc.out
        )));
    }
    if doc.out_len != out.len() as u64 {
        return Err(inconsistent(format!(
            "out_len {} does not match out length {}",
            doc.out_len,
            out.len()
        )));
    }
    let ratio = efficiency_ratio(machine.size(), doc.out_len);
    if (ratio - doc.ratio).abs() > RATIO_TOLERANCE {
        return Err(inconsistent(format!(
            "ratio {} does not match log2(out_len)/size = {ratio}",
            doc.ratio
        )));
    }
    if strict {
        let actual = machine.output_cstring();
        if actual != out {
            return Err(inconsistent(format!(
                "stored out {} differs from the machine's output {actual}",
                doc.out
            )));
        }
    }
    Ok(BagEntry {
        machine,
        out,
        out_len: doc.out_len,
        ratio,
        lineage: doc.lineage.map(|[p, q]| (p as usize, q as usize)),
        trial: doc.trial,
    })
}

/// Either kind of document, told apart by the presence of `entries`.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Machine(Bnm),
    Bag(Bag),
}

#[derive(Deserialize)]
struct KindProbe {
    entries: Option<serde::de::IgnoredAny>,
}

pub fn parse_document(text: &str, strict: bool) -> Result<Document> {
    check_version(text)?;
    let probe: KindProbe = serde_json::from_str(text)?;
    if probe.entries.is_some() {
        parse_bag(text, strict).map(Document::Bag)
    } else {
        parse_bnm(text).map(Document::Machine)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistogramFormat {
    Csv,
    Json,
}

impl HistogramFormat {
    pub fn extension(self) -> &'static str {
        match self {
            HistogramFormat::Csv => "csv",
            HistogramFormat::Json => "json",
        }
    }
}

/// CSV: header `length,count`, ascending lengths, LF endings. JSON: the
/// histogram's `bins` and `total`.
pub fn emit_histogram(h: &Histogram, format: HistogramFormat) -> String {
    match format {
        HistogramFormat::Csv => {
            let mut s = String::from("length,count\n");
            for (l, c) in &h.bins {
                s.push_str(&format!("{l},{c}\n"));
            }
            s
        }
        HistogramFormat::Json => to_json(h),
    }
}

pub fn parse_histogram_json(text: &str) -> Result<Histogram> {
    let h: Histogram = serde_json::from_str(text)?;
    if h.bins.contains_key(&0) {
        return Err(inconsistent("histogram has a length-0 bin".into()));
    }
    if h.bins.values().sum::<u64>() != h.total {
        return Err(inconsistent(
            "histogram total differs from the sum of counts".into(),
        ));
    }
    Ok(h)
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    to_json(value)
}
