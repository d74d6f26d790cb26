//! Instance file formats.
//!
//! Text format (UTF-8, line based, `#` starts a comment):
//!
//! ```text
//! n m
//! k v1 ... vk SPEC
//! ```
//!
//! with one edge line per edge and `SPEC` one of
//! `table w0 w1 ... wk`, `linear w`, `allornothing w`, `power w a`.
//! Weights are decimal strings; exact fractions like `3/2` are also
//! accepted. A JSON mirror of the same schema is supported.

use std::fmt::Write as _;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Hypergraph, WeightFn, WeightSpec, WeightedHypergraph};
use crate::rational::{format_exact, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

pub fn load_instance<R: Read>(mut reader: R, format: Format) -> Result<WeightedHypergraph> {
    let mut buf = String::new();
    reader.read_to_string(&mut buf)?;
    match format {
        Format::Text => parse_text(&buf),
        Format::Json => parse_json(&buf),
    }
}

/// Load from a string, sniffing JSON by a leading `{`.
pub fn load_instance_str(text: &str) -> Result<WeightedHypergraph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn parse_text(text: &str) -> Result<WeightedHypergraph> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| perr(0, "missing header line `n m`".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(header_no, "bad vertex count".into()))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| perr(header_no, "bad edge count".into()))?;
    if it.next().is_some() {
        return Err(perr(header_no, "trailing tokens after `n m`".into()));
    }

    let mut edges = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for idx in 0..m {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| perr(0, format!("expected {m} edge lines, found {idx}")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let k: usize = tokens
            .first()
            .and_then(|t| t.parse().ok())
            .filter(|&k| k >= 1)
            .ok_or_else(|| perr(line_no, "edge line must start with a size k >= 1".into()))?;
        if tokens.len() < k + 2 {
            return Err(perr(line_no, format!("edge of size {k} is truncated")));
        }
        let mut verts = Vec::with_capacity(k);
        for t in &tokens[1..=k] {
            let v: u32 = t
                .parse()
                .map_err(|_| perr(line_no, format!("bad vertex id {t:?}")))?;
            if v as usize >= n {
                return Err(perr(line_no, format!("vertex {v} out of range (n = {n})")));
            }
            if verts.contains(&v) {
                return Err(perr(line_no, format!("duplicate vertex {v} in edge")));
            }
            verts.push(v);
        }
        let spec = tokens[k + 1];
        let args = &tokens[k + 2..];
        let want = |count: usize| -> Result<()> {
            if args.len() != count {
                Err(perr(
                    line_no,
                    format!("`{spec}` expects {count} argument(s), got {}", args.len()),
                ))
            } else {
                Ok(())
            }
        };
        let parse_w = |t: &str| -> Result<Rational> {
            parse_rational(t).map_err(|_| perr(line_no, format!("bad weight {t:?}")))
        };
        let weight = match spec {
            "table" => {
                want(k + 1)?;
                let values = args.iter().map(|t| parse_w(t)).collect::<Result<Vec<_>>>()?;
                WeightFn::from_values(values)
            }
            "linear" => {
                want(1)?;
                WeightFn::linear(parse_w(args[0])?, k)
            }
            "allornothing" => {
                want(1)?;
                WeightFn::all_or_nothing(parse_w(args[0])?, k)
            }
            "power" => {
                want(2)?;
                let a: u32 = args[1]
                    .parse()
                    .ok()
                    .filter(|&a| a >= 1)
                    .ok_or_else(|| perr(line_no, format!("bad power exponent {:?}", args[1])))?;
                WeightFn::power(parse_w(args[0])?, a, k)
            }
            other => return Err(perr(line_no, format!("unknown weight spec {other:?}"))),
        };
        let weight = weight.map_err(|e| Error::Validation(format!("edge {idx}: {e}")))?;
        edges.push(verts);
        weights.push(weight);
    }
    if lines.next().is_some() {
        return Err(Error::Validation(format!(
            "more than {m} edge lines in input"
        )));
    }
    let graph = Hypergraph::new(n, edges)?;
    WeightedHypergraph::new(graph, weights)
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    n: usize,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    vertices: Vec<u32>,
    weight: WeightJson,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WeightJson {
    Table { values: Vec<NumStr> },
    Linear { w: NumStr },
    AllOrNothing { w: NumStr },
    Power { w: NumStr, a: u32 },
}

/// Weight literal: a string (`"3/2"`, `"1.5"`) or a JSON integer. Floats
/// are rejected to keep the format exact.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumStr {
    Text(String),
    Int(i64),
}

impl NumStr {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            NumStr::Text(s) => parse_rational(s),
            NumStr::Int(i) => Ok(Rational::from_integer((*i).into())),
        }
    }
}

pub fn parse_json(text: &str) -> Result<WeightedHypergraph> {
    let spec: InstanceJson = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let mut edges = Vec::with_capacity(spec.edges.len());
    let mut weights = Vec::with_capacity(spec.edges.len());
    for (idx, e) in spec.edges.into_iter().enumerate() {
        let k = e.vertices.len();
        let with_edge = |err: Error| Error::Validation(format!("edge {idx}: {err}"));
        let weight = match &e.weight {
            WeightJson::Table { values } => {
                let values = values
                    .iter()
                    .map(|v| v.to_rational())
                    .collect::<Result<Vec<_>>>()
                    .map_err(with_edge)?;
                WeightFn::from_values(values)
            }
            WeightJson::Linear { w } => WeightFn::linear(w.to_rational()?, k),
            WeightJson::AllOrNothing { w } => WeightFn::all_or_nothing(w.to_rational()?, k),
            WeightJson::Power { w, a } => WeightFn::power(w.to_rational()?, *a, k),
        };
        edges.push(e.vertices);
        weights.push(weight.map_err(|err| Error::Validation(format!("edge {idx}: {err}")))?);
    }
    let graph = Hypergraph::new(spec.n, edges)?;
    WeightedHypergraph::new(graph, weights)
}

/// Render an instance in the text format. Tables written by this function
/// reload to an identical instance.
pub fn write_text(h: &WeightedHypergraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.vertex_count(), h.edge_count());
    for (edge, w) in h.graph().edges().iter().zip(h.weights()) {
        let _ = write!(out, "{}", edge.len());
        for v in edge {
            let _ = write!(out, " {v}");
        }
        match w.source() {
            WeightSpec::Table => {
                let _ = write!(out, " table");
                for v in w.values() {
                    let _ = write!(out, " {}", fmt_weight(v));
                }
            }
            WeightSpec::Linear(c) => {
                let _ = write!(out, " linear {}", fmt_weight(c));
            }
            WeightSpec::AllOrNothing(c) => {
                let _ = write!(out, " allornothing {}", fmt_weight(c));
            }
            WeightSpec::Power(c, a) => {
                let _ = write!(out, " power {} {a}", fmt_weight(c));
            }
        }
        out.push('\n');
    }
    out
}

/// Render an instance as JSON (tables only, values as exact strings).
pub fn write_json(h: &WeightedHypergraph) -> String {
    let spec = InstanceJson {
        n: h.vertex_count(),
        edges: h
            .graph()
            .edges()
            .iter()
            .zip(h.weights())
            .map(|(edge, w)| EdgeJson {
                vertices: edge.clone(),
                weight: match w.source() {
                    WeightSpec::Linear(c) => WeightJson::Linear {
                        w: NumStr::Text(fmt_weight(c)),
                    },
                    WeightSpec::AllOrNothing(c) => WeightJson::AllOrNothing {
                        w: NumStr::Text(fmt_weight(c)),
                    },
                    WeightSpec::Power(c, a) => WeightJson::Power {
                        w: NumStr::Text(fmt_weight(c)),
                        a: *a,
                    },
                    WeightSpec::Table => WeightJson::Table {
                        values: w.values().iter().map(|v| NumStr::Text(fmt_weight(v))).collect(),
                    },
                },
            })
            .collect(),
    };
    serde_json::to_string_pretty(&spec).expect("instance serialization cannot fail")
}

fn fmt_weight(r: &Rational) -> String {
    use num_traits::One;
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format_exact(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Shape;
    use crate::rational::int;

    #[test]
    fn parses_table_instance() {
        let h = parse_text("3 1\n3 0 1 2 table 0 1 3 6\n").unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 1);
        assert_eq!(h.graph().edge(0), &[0, 1, 2]);
        assert_eq!(h.weight(0).values(), &[int(0), int(1), int(3), int(6)]);
        assert_eq!(h.weight(0).shape(), Shape::Convex);
    }

    #[test]
    fn shifts_nonzero_offset() {
        let h = parse_text("2 1\n2 0 1 table 5 6 8\n").unwrap();
        assert_eq!(h.weight(0).values(), &[int(0), int(1), int(3)]);
        assert_eq!(h.weight(0).shape(), Shape::Convex);
    }

    #[test]
    fn rejects_decreasing_table() {
        let err = parse_text("2 1\n2 0 1 table 0 2 1\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        assert!(err.to_string().contains("edge 0"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_text("2 1\n# comment\n2 0 5 table 0 1 2\n").unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("out of range"));
            }
            other => panic!("unexpected error {other}"),
        }
        assert!(parse_text("2 1\n2 0 0 table 0 1 2\n").is_err()); // duplicate vertex
        assert!(parse_text("2 1\n2 0 1 table 0 1\n").is_err()); // short table
        assert!(parse_text("2 1\n2 0 1 frob 1\n").is_err());
    }

    #[test]
    fn comments_and_specs() {
        let text = "# instance\n4 3  # header\n2 0 1 linear 2\n2 1 2 allornothing 1\n3 0 2 3 power 1 2\n";
        let h = parse_text(text).unwrap();
        assert_eq!(h.weight(0).values(), &[int(0), int(2), int(4)]);
        assert_eq!(h.weight(1).values(), &[int(0), int(0), int(1)]);
        assert_eq!(h.weight(2).values(), &[int(0), int(1), int(4), int(9)]);
        assert_eq!(*h.psi(), int(14));
    }

    #[test]
    fn json_mirror() {
        let json = r#"{
            "n": 3,
            "edges": [
                {"vertices": [0, 1, 2], "weight": {"kind": "table", "values": ["0", "1", "3", 6]}},
                {"vertices": [0, 1], "weight": {"kind": "linear", "w": "1/2"}}
            ]
        }"#;
        let h = parse_json(json).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.weight(0).values(), &[int(0), int(1), int(3), int(6)]);
        assert_eq!(h.weight(1).values(), &[int(0), crate::rational::ratio(1, 2), int(1)]);
        // floats must not sneak exactness away
        assert!(parse_json(r#"{"n":1,"edges":[{"vertices":[0],"weight":{"kind":"linear","w":1.5}}]}"#).is_err());
    }

    #[test]
    fn text_round_trip() {
        let text = "5 3\n2 0 1 linear 2\n3 1 2 4 table 0 1 3 7\n2 2 3 allornothing 3\n";
        let h = parse_text(text).unwrap();
        let rendered = write_text(&h);
        let h2 = parse_text(&rendered).unwrap();
        assert_eq!(h, h2);
        let h3 = parse_json(&write_json(&h)).unwrap();
        assert_eq!(h, h3);
    }
}
