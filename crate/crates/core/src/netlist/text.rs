//! The `QAPNET 1` text format.
//!
//! ```text
//! QAPNET 1
//! width 3
//! label flag 2 1
//! mark 0:beta1 4
//! gate NOT 2
//! ```
//!
//! `#` starts a comment and blank lines are ignored. Serialization is
//! canonical: labels in line order, marks by stage then checkpoint,
//! then gates in execution order.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::bitcore::LineRange;
use crate::error::{Error, Result};
use crate::netlist::{Checkpoint, Gate, GateKind, Layout, Marks, Role, WiringDiagram};

const MAGIC: &str = "QAPNET 1";

pub fn serialize_netlist(diagram: &WiringDiagram) -> String {
    let mut out = String::with_capacity(16 * diagram.gate_count() + 64);
    out.push_str(MAGIC);
    out.push('\n');
    let _ = writeln!(out, "width {}", diagram.width());
    for (role, range) in diagram.layout().iter() {
        let _ = writeln!(out, "label {role} {} {}", range.start(), range.len());
    }
    for (&(stage, cp), &idx) in diagram.marks() {
        let _ = writeln!(out, "mark {stage}:{} {idx}", cp.as_str());
    }
    for g in diagram.gates() {
        let _ = writeln!(out, "gate {g}");
    }
    out
}

fn err(line: usize, token: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        token: token.to_string(),
        message: message.into(),
    }
}

fn number(line: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| err(line, token, "expected a non-negative integer"))
}

fn expect_args(line: usize, head: &str, args: &[&str], count: usize) -> Result<()> {
    if args.len() != count {
        let token = args.get(count).copied().unwrap_or(head);
        return Err(err(
            line,
            token,
            format!("`{head}` takes {count} arguments, found {}", args.len()),
        ));
    }
    Ok(())
}

pub fn parse_netlist(text: &str) -> Result<WiringDiagram> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, l)) if l.split_whitespace().eq(MAGIC.split_whitespace()) => {}
        Some((no, l)) => return Err(err(no, l, format!("expected `{MAGIC}` header"))),
        None => return Err(err(1, "", "empty netlist")),
    }
    let width = match lines.next() {
        Some((no, l)) => {
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks[0] != "width" {
                return Err(err(no, toks[0], "expected `width <lines>`"));
            }
            expect_args(no, "width", &toks[1..], 1)?;
            number(no, toks[1])?
        }
        None => return Err(err(1, "", "missing `width` line")),
    };

    let mut labels = Vec::new();
    let mut marks = Marks::new();
    let mut gates = Vec::new();
    for (no, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let (head, args) = (toks[0], &toks[1..]);
        match head {
            "label" => {
                expect_args(no, head, args, 3)?;
                let role =
                    Role::from_str(args[0]).map_err(|_| err(no, args[0], "unknown role"))?;
                let start = number(no, args[1])?;
                let len = number(no, args[2])?;
                let range = LineRange::new(start, len).map_err(|_| err(no, args[2], "empty range"))?;
                if range.end() > width {
                    return Err(err(no, args[2], "range exceeds width"));
                }
                labels.push((role, range));
            }
            "mark" => {
                expect_args(no, head, args, 2)?;
                let (stage, cp) = args[0]
                    .split_once(':')
                    .ok_or_else(|| err(no, args[0], "expected <stage>:<checkpoint>"))?;
                let stage = number(no, stage)?;
                let cp = Checkpoint::from_str(cp).map_err(|_| err(no, cp, "unknown checkpoint"))?;
                let idx = number(no, args[1])?;
                if marks.insert((stage, cp), idx).is_some() {
                    return Err(err(no, args[0], "duplicate mark"));
                }
            }
            "gate" => {
                let Some((&kind_tok, lines)) = args.split_first() else {
                    return Err(err(no, head, "missing gate kind"));
                };
                let kind =
                    GateKind::from_str(kind_tok).map_err(|_| err(no, kind_tok, "unknown gate kind"))?;
                expect_args(no, kind_tok, lines, kind.arity() + 1)?;
                let idx = lines
                    .iter()
                    .map(|t| number(no, t))
                    .collect::<Result<Vec<_>>>()?;
                let (target, controls) = idx.split_last().expect("arity + 1 >= 1");
                let gate = Gate::from_parts(kind, controls, *target)
                    .map_err(|e| err(no, kind_tok, e.to_string()))?;
                if let Some(&bad) = idx.iter().find(|&&i| i >= width) {
                    return Err(err(no, &bad.to_string(), "line index exceeds width"));
                }
                gates.push(gate);
            }
            _ => return Err(err(no, head, "unknown directive")),
        }
    }

    let layout = Layout::new(labels).map_err(|e| err(0, "label", e.to_string()))?;
    WiringDiagram::new(width, gates, layout, marks).map_err(|e| err(0, "", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_document() {
        let d = WiringDiagram::new(3, vec![Gate::not(2)], Layout::empty(), Marks::new()).unwrap();
        assert_eq!(serialize_netlist(&d), "QAPNET 1\nwidth 3\ngate NOT 2\n");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\nQAPNET 1\n\nwidth 4 # four lines\n  gate CNOT 0 3\n# end\n";
        let d = parse_netlist(text).unwrap();
        assert_eq!(d.width(), 4);
        assert_eq!(d.gates(), &[Gate::cnot(0, 3)]);
    }

    #[test]
    fn full_document_round_trips() {
        let text = "QAPNET 1\nwidth 4\nlabel divisor 0 2\nlabel carries 2 1\nlabel flag 3 1\n\
                    mark 0:alpha 1\nmark 0:gamma 3\nmark 1:beta1 3\n\
                    gate TOFFOLI 0 1 3\ngate RESET 2\ngate CRESET 3 2\n";
        let d = parse_netlist(text).unwrap();
        assert!(!d.is_reversible());
        assert_eq!(serialize_netlist(&d), text);
    }

    fn parse_err(text: &str) -> (usize, String) {
        match parse_netlist(text) {
            Err(Error::Parse { line, token, .. }) => (line, token),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_entries_report_line_and_token() {
        assert_eq!(parse_err("QAPNET 1\nwidth 6\ngate CNOT 5 5\n"), (3, "CNOT".into()));
        assert_eq!(parse_err("QAPNET 2\nwidth 6\n"), (1, "QAPNET 2".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth x\n"), (2, "x".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\n\ngate NOT 3\n"), (4, "3".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\ngate NAND 1 2\n"), (3, "NAND".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\ngate NOT 1 2\n"), (3, "2".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\nlabel bogus 0 3\n"), (3, "bogus".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\nmark 0:delta 1\n"), (3, "delta".into()));
        assert_eq!(parse_err("QAPNET 1\nwidth 3\nwire 0\n"), (3, "wire".into()));
        assert_eq!(parse_err(""), (1, "".into()));
    }

    #[test]
    fn layout_and_marks_are_validated() {
        assert!(parse_netlist("QAPNET 1\nwidth 3\nlabel flag 0 2\n").is_err());
        assert!(parse_netlist("QAPNET 1\nwidth 1\nmark 0:gamma 1\n").is_err());
    }
}
