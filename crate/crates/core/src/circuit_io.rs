//! Circuit exchange formats: RevLib-style `.real` text and a JSON document.
//!
//! `.real` output always uses positive controls only; negative controls are
//! written as NOT pairs around the gate (after redundant NOT pairs have been
//! cancelled). Lines are named `x0..` for inputs and `y0..` for outputs, and
//! `.constants` marks the output lines as zero-initialised.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::{expand_negative_controls, remove_superfluous_nots, Circuit, Gate};

fn line_names(c: &Circuit) -> Vec<String> {
    (0..c.inputs)
        .map(|i| format!("x{i}"))
        .chain((0..c.outputs).map(|j| format!("y{j}")))
        .collect()
}

pub fn write_real(c: &Circuit) -> String {
    let flat = remove_superfluous_nots(&expand_negative_controls(c));
    let names = line_names(c);
    let mut out = String::new();
    if let Some(name) = &c.name {
        let _ = writeln!(out, "# {name}");
    }
    let _ = writeln!(out, ".version 1.0");
    let _ = writeln!(out, ".numvars {}", c.width());
    let _ = writeln!(out, ".variables {}", names.join(" "));
    let _ = writeln!(out, ".inputs {}", names.join(" "));
    let _ = writeln!(out, ".outputs {}", names.join(" "));
    let _ = writeln!(
        out,
        ".constants {}{}",
        "-".repeat(c.inputs),
        "0".repeat(c.outputs)
    );
    let _ = writeln!(
        out,
        ".garbage {}{}",
        "1".repeat(c.inputs),
        "-".repeat(c.outputs)
    );
    let _ = writeln!(out, ".begin");
    for g in &flat.gates {
        let _ = write!(out, "t{}", g.control_count() + 1);
        for &l in &g.controls {
            let _ = write!(out, " {}", names[l]);
        }
        let _ = writeln!(out, " {}", names[g.target]);
    }
    let _ = writeln!(out, ".end");
    out
}

/// Read the `.real` subset produced by [`write_real`]: Toffoli-family gates
/// (`t<k>`) only, with inputs as the leading non-constant lines and the
/// remaining lines constant zero.
pub fn read_real(text: &str) -> Result<Circuit> {
    let mut numvars: Option<usize> = None;
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut constants: Option<String> = None;
    let mut gates = Vec::new();
    let mut in_body = false;
    let mut name = None;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let trimmed = raw.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            if name.is_none() && !in_body && !comment.trim().is_empty() {
                name = Some(comment.trim().to_string());
            }
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let head = parts.next().unwrap_or("");
        let args: Vec<&str> = parts.collect();
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        match head {
            ".version" | ".inputs" | ".outputs" | ".garbage" | ".define" | ".enddefine" => {}
            ".numvars" => {
                numvars = Some(
                    args.first()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| parse_err("bad .numvars".into()))?,
                )
            }
            ".variables" => {
                for (i, v) in args.iter().enumerate() {
                    if index.insert(v.to_string(), i).is_some() {
                        return Err(parse_err(format!("variable {v} declared twice")));
                    }
                }
            }
            ".constants" => constants = Some(args.concat()),
            ".begin" => in_body = true,
            ".end" => break,
            _ if in_body => {
                let arity: usize = head
                    .strip_prefix('t')
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::Unsupported(format!("line {line_no}: gate {head}")))?;
                if arity == 0 || args.len() != arity {
                    return Err(parse_err(format!("{head} expects {arity} lines")));
                }
                let mut lines = Vec::with_capacity(arity);
                for a in &args {
                    lines.push(
                        *index
                            .get(*a)
                            .ok_or_else(|| parse_err(format!("unknown variable {a}")))?,
                    );
                }
                let target = lines.pop().expect("arity checked");
                gates.push(Gate::toffoli(lines, target));
            }
            other => return Err(parse_err(format!("unexpected {other}"))),
        }
    }

    let width = numvars.ok_or_else(|| Error::Structure("missing .numvars".into()))?;
    if index.len() != width {
        return Err(Error::Structure(format!(
            ".variables names {} lines, .numvars says {width}",
            index.len()
        )));
    }
    let constants =
        constants.ok_or_else(|| Error::Structure("missing .constants line roles".into()))?;
    if constants.len() != width {
        return Err(Error::Structure(
            ".constants length differs from .numvars".into(),
        ));
    }
    let inputs = constants.chars().take_while(|&c| c == '-').count();
    if !constants[inputs..].chars().all(|c| c == '0') {
        return Err(Error::Unsupported(
            "lines must be inputs followed by zero constants".into(),
        ));
    }
    let mut c = Circuit::new(inputs, width - inputs, gates)?;
    c.name = name;
    Ok(c)
}

/// JSON form of a circuit with explicit line roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitDocument {
    #[serde(default)]
    pub name: Option<String>,
    pub width: usize,
    pub input_lines: Vec<usize>,
    pub output_lines: Vec<usize>,
    pub gates: Vec<Gate>,
}

impl From<&Circuit> for CircuitDocument {
    fn from(c: &Circuit) -> Self {
        CircuitDocument {
            name: c.name.clone(),
            width: c.width(),
            input_lines: c.input_lines().collect(),
            output_lines: c.output_lines().collect(),
            gates: c.gates.clone(),
        }
    }
}

pub fn to_json(c: &Circuit) -> String {
    serde_json::to_string_pretty(&CircuitDocument::from(c)).expect("circuit serializes")
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let doc: CircuitDocument =
        serde_json::from_str(text).map_err(|e| Error::Structure(format!("circuit json: {e}")))?;
    let n = doc.input_lines.len();
    if doc.input_lines != (0..n).collect::<Vec<_>>()
        || doc.output_lines != (n..doc.width).collect::<Vec<_>>()
    {
        return Err(Error::Unsupported(
            "line roles must list inputs first, then outputs".into(),
        ));
    }
    let mut c = Circuit::new(n, doc.width - n, doc.gates)?;
    c.name = doc.name;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::synthesize;
    use crate::{Cube, EsopCover};

    fn sample() -> Circuit {
        let cover = EsopCover::new(
            3,
            2,
            vec![
                Cube::parse("1-0", "11"),
                Cube::parse("0-1", "01"),
                Cube::parse("---", "10"),
            ],
        )
        .unwrap();
        synthesize(&cover)
    }

    #[test]
    fn real_lists_expanded_gates() {
        let text = write_real(&sample());
        assert!(text.contains(".numvars 5"));
        assert!(text.contains(".variables x0 x1 x2 y0 y1"));
        assert!(text.contains(".constants ---00"));
        assert!(text.contains("t3 x0 x2 y0"));
        assert!(text.contains("t1 y0"));
    }

    #[test]
    fn real_round_trip_matches_positive_form() {
        let c = sample();
        let back = read_real(&write_real(&c)).unwrap();
        let flat = remove_superfluous_nots(&expand_negative_controls(&c));
        assert_eq!(back.gates, flat.gates);
        assert_eq!((back.inputs, back.outputs), (3, 2));
    }

    #[test]
    fn real_rejects_unknown_gates_and_names() {
        let header = ".numvars 2\n.variables a b\n.constants -0\n.begin\n";
        assert!(matches!(
            read_real(&format!("{header}f2 a b\n.end\n")),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            read_real(&format!("{header}t2 a c\n.end\n")),
            Err(Error::Parse { line: 5, .. })
        ));
        assert!(read_real(".numvars 2\n.variables a b\n.begin\n.end\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let mut c = sample();
        c.name = Some("demo".into());
        let text = to_json(&c);
        assert!(text.contains("\"width\": 5"));
        assert_eq!(from_json(&text).unwrap(), c);
    }
}
