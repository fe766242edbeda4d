// Copyright 2026 The qgrade Authors
// SPDX-License-Identifier: Apache-2.0

//! OpenQASM 2/3 export and a parser for the same restricted grammar.
//!
//! Only `h`, `x`, `z`, `rx`, `rz`, `cx` and a terminal full-register
//! measurement are emitted. Qubit `i` is measured into classical bit `i`.
//! Angles are written with the shortest decimal form that parses back to
//! the identical `f64`, without reduction modulo 2π.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{Circuit, CircuitMeta, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QasmVersion {
    V2,
    #[default]
    V3,
}

const META_PREFIX: &str = "// qgrade:";

pub fn export_qasm(circuit: &Circuit, version: QasmVersion) -> String {
    let n = circuit.n_qubits();
    let mut out = String::new();
    match version {
        QasmVersion::V2 => out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n"),
        QasmVersion::V3 => out.push_str("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n"),
    }
    if let Some(m) = circuit.meta() {
        let _ = writeln!(
            out,
            "{META_PREFIX} L={} vison={} t_max={} n_steps={} theta_z={} theta_x={}",
            m.size,
            u8::from(m.with_vison),
            m.t_max,
            m.n_steps,
            m.theta_z,
            m.theta_x
        );
    }
    match version {
        QasmVersion::V2 => {
            let _ = writeln!(out, "qreg q[{n}];\ncreg c[{n}];");
        }
        QasmVersion::V3 => {
            let _ = writeln!(out, "qubit[{n}] q;\nbit[{n}] c;");
        }
    }
    let sep = match version {
        QasmVersion::V2 => ",",
        QasmVersion::V3 => ", ",
    };
    for g in circuit.gates() {
        let _ = match *g {
            Gate::H(q) => writeln!(out, "h q[{q}];"),
            Gate::X(q) => writeln!(out, "x q[{q}];"),
            Gate::Z(q) => writeln!(out, "z q[{q}];"),
            Gate::Rx { qubit, theta } => writeln!(out, "rx({theta}) q[{qubit}];"),
            Gate::Rz { qubit, theta } => writeln!(out, "rz({theta}) q[{qubit}];"),
            Gate::Cnot { control, target } => writeln!(out, "cx q[{control}]{sep}q[{target}];"),
        };
    }
    match version {
        QasmVersion::V2 => out.push_str("measure q -> c;\n"),
        QasmVersion::V3 => out.push_str("c = measure q;\n"),
    }
    out
}

fn syntax(line: usize, message: impl Into<String>) -> Error {
    Error::QasmSyntax {
        line,
        message: message.into(),
    }
}

struct Parser {
    version: Option<QasmVersion>,
    qreg: Option<(String, usize)>,
    creg: Option<(String, usize)>,
    gates: Vec<Gate>,
    meta: Option<CircuitMeta>,
    measured: bool,
}

/// `name[idx]`
fn parse_indexed(text: &str, line: usize) -> Result<(&str, usize)> {
    let text = text.trim();
    let open = text
        .find('[')
        .ok_or_else(|| syntax(line, format!("expected `reg[index]`, found `{text}`")))?;
    let close = text
        .strip_suffix(']')
        .ok_or_else(|| syntax(line, format!("missing `]` in `{text}`")))?;
    let name = text[..open].trim();
    let index = close[open + 1..]
        .trim()
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("bad index in `{text}`")))?;
    if !is_identifier(name) {
        return Err(syntax(line, format!("bad register name `{name}`")));
    }
    Ok((name, index))
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_angle(text: &str, line: usize) -> Result<f64> {
    let v = text
        .trim()
        .parse::<f64>()
        .map_err(|_| syntax(line, format!("bad angle `{}`", text.trim())))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("non-finite angle `{}`", text.trim())));
    }
    Ok(v)
}

impl Parser {
    fn qubit(&self, operand: &str, line: usize) -> Result<usize> {
        let (name, index) = parse_indexed(operand, line)?;
        let (reg, size) = self
            .qreg
            .as_ref()
            .ok_or_else(|| syntax(line, "gate before qubit register declaration"))?;
        if name != reg {
            return Err(syntax(line, format!("unknown qubit register `{name}`")));
        }
        if index >= *size {
            return Err(syntax(line, format!("qubit index {index} out of range for `{reg}[{size}]`")));
        }
        Ok(index)
    }

    fn declare(&mut self, quantum: bool, name: &str, size: usize, line: usize) -> Result<()> {
        if !is_identifier(name) {
            return Err(syntax(line, format!("bad register name `{name}`")));
        }
        let slot = if quantum { &mut self.qreg } else { &mut self.creg };
        if slot.is_some() {
            return Err(syntax(line, "only one register of each kind is supported"));
        }
        *slot = Some((name.to_string(), size));
        Ok(())
    }

    fn measurement(&mut self, lhs: &str, rhs: &str, line: usize) -> Result<()> {
        // lhs: quantum operand, rhs: classical target.
        let (q, c) = (lhs.trim(), rhs.trim());
        let qname = self.qreg.as_ref().map(|r| r.0.as_str());
        let cname = self.creg.as_ref().map(|r| r.0.as_str());
        if qname.is_none() || cname.is_none() {
            return Err(syntax(line, "measurement before register declarations"));
        }
        let ok = if q.contains('[') {
            let (qn, qi) = parse_indexed(q, line)?;
            let (cn, ci) = parse_indexed(c, line)?;
            Some(qn) == qname && Some(cn) == cname && qi == ci
        } else {
            Some(q) == qname && Some(c) == cname
        };
        if !ok {
            return Err(syntax(line, "measurement must map q[i] to c[i]"));
        }
        self.measured = true;
        Ok(())
    }

    fn statement(&mut self, stmt: &str, line: usize) -> Result<()> {
        let stmt = stmt.trim();
        let is_measure = stmt.starts_with("measure ") || stmt.contains("= measure ");
        if self.measured && !is_measure {
            return Err(syntax(line, "statements after the terminal measurement"));
        }
        if let Some(rest) = stmt.strip_prefix("OPENQASM") {
            if self.version.is_some() {
                return Err(syntax(line, "duplicate OPENQASM header"));
            }
            self.version = Some(match rest.trim() {
                "2.0" => QasmVersion::V2,
                "3.0" | "3" => QasmVersion::V3,
                other => return Err(syntax(line, format!("unsupported OpenQASM version `{other}`"))),
            });
            return Ok(());
        }
        if self.version.is_none() {
            return Err(syntax(line, "missing OPENQASM header"));
        }
        if let Some(rest) = stmt.strip_prefix("include") {
            let rest = rest.trim();
            if rest.len() < 2 || !rest.starts_with('"') || !rest.ends_with('"') {
                return Err(syntax(line, "include expects a quoted file name"));
            }
            return Ok(());
        }
        if let Some(rest) = stmt.strip_prefix("qreg ").or_else(|| stmt.strip_prefix("creg ")) {
            let (name, size) = parse_indexed(rest, line)?;
            return self.declare(stmt.starts_with('q'), name, size, line);
        }
        if stmt.starts_with("qubit[") || stmt.starts_with("bit[") {
            let close = stmt.find(']').ok_or_else(|| syntax(line, "missing `]`"))?;
            let open = stmt.find('[').unwrap_or(0);
            let size = stmt[open + 1..close]
                .trim()
                .parse::<usize>()
                .map_err(|_| syntax(line, "bad register size"))?;
            let name = stmt[close + 1..].trim();
            return self.declare(stmt.starts_with('q'), name, size, line);
        }
        if let Some(rest) = stmt.strip_prefix("measure ") {
            let (q, c) = rest
                .split_once("->")
                .ok_or_else(|| syntax(line, "expected `measure q -> c`"))?;
            return self.measurement(q, c, line);
        }
        if let Some((c, rhs)) = stmt.split_once('=') {
            let q = rhs
                .trim()
                .strip_prefix("measure ")
                .ok_or_else(|| syntax(line, "assignments must be measurements"))?;
            return self.measurement(q, c, line);
        }
        self.gate(stmt, line)
    }

    fn gate(&mut self, stmt: &str, line: usize) -> Result<()> {
        let name_end = stmt
            .find(|c: char| c == '(' || c.is_whitespace())
            .unwrap_or(stmt.len());
        let name = &stmt[..name_end];
        if !is_identifier(name) {
            return Err(syntax(line, format!("unexpected `{stmt}`")));
        }
        let mut rest = stmt[name_end..].trim_start();
        let mut angle = None;
        if let Some(after) = rest.strip_prefix('(') {
            let close = after
                .find(')')
                .ok_or_else(|| syntax(line, "missing `)` after angle"))?;
            angle = Some(&after[..close]);
            rest = &after[close + 1..];
        }
        let operands: Vec<&str> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').collect()
        };

        let (params, arity) = match name {
            "h" | "x" | "z" => (0, 1),
            "rx" | "rz" => (1, 1),
            "cx" => (0, 2),
            _ => {
                return Err(Error::UnsupportedGate {
                    line,
                    name: name.to_string(),
                })
            }
        };
        match (params, angle) {
            (1, None) => return Err(syntax(line, format!("`{name}` needs an angle"))),
            (0, Some(_)) => return Err(syntax(line, format!("`{name}` takes no angle"))),
            _ => {}
        }
        if operands.len() != arity {
            return Err(syntax(
                line,
                format!("`{name}` takes {arity} operand(s), found {}", operands.len()),
            ));
        }
        let q0 = self.qubit(operands[0], line)?;
        let gate = match name {
            "h" => Gate::H(q0),
            "x" => Gate::X(q0),
            "z" => Gate::Z(q0),
            "rx" => Gate::Rx {
                qubit: q0,
                theta: parse_angle(angle.unwrap_or_default(), line)?,
            },
            "rz" => Gate::Rz {
                qubit: q0,
                theta: parse_angle(angle.unwrap_or_default(), line)?,
            },
            _ => {
                let target = self.qubit(operands[1], line)?;
                if target == q0 {
                    return Err(syntax(line, "cx control equals target"));
                }
                Gate::Cnot { control: q0, target }
            }
        };
        self.gates.push(gate);
        Ok(())
    }

    fn meta_comment(&mut self, text: &str, line: usize) -> Result<()> {
        let mut fields: [Option<&str>; 6] = [None; 6];
        const KEYS: [&str; 6] = ["L", "vison", "t_max", "n_steps", "theta_z", "theta_x"];
        for token in text.split_whitespace() {
            let (k, v) = token
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("bad metadata token `{token}`")))?;
            if let Some(i) = KEYS.iter().position(|key| *key == k) {
                fields[i] = Some(v);
            }
        }
        let get = |i: usize| fields[i].ok_or_else(|| syntax(line, format!("metadata lacks `{}`", KEYS[i])));
        let int = |i: usize| -> Result<usize> {
            get(i)?.parse().map_err(|_| syntax(line, format!("bad metadata `{}`", KEYS[i])))
        };
        let float = |i: usize| -> Result<f64> { parse_angle(get(i)?, line) };
        self.meta = Some(CircuitMeta {
            size: int(0)?,
            with_vison: match get(1)? {
                "0" => false,
                "1" => true,
                _ => return Err(syntax(line, "metadata `vison` must be 0 or 1")),
            },
            t_max: float(2)?,
            n_steps: int(3)?,
            theta_z: float(4)?,
            theta_x: float(5)?,
        });
        Ok(())
    }
}

/// Parse text in the grammar produced by [`export_qasm`].
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut p = Parser {
        version: None,
        qreg: None,
        creg: None,
        gates: Vec::new(),
        meta: None,
        measured: false,
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if let Some(meta) = trimmed.strip_prefix(META_PREFIX) {
            p.meta_comment(meta, line)?;
            continue;
        }
        let code = match trimmed.find("//") {
            Some(pos) => &trimmed[..pos],
            None => trimmed,
        };
        if code.trim().is_empty() {
            continue;
        }
        let mut pieces: Vec<&str> = code.split(';').collect();
        let tail = pieces.pop().unwrap_or("");
        if !tail.trim().is_empty() {
            return Err(syntax(line, format!("missing `;` after `{}`", tail.trim())));
        }
        for stmt in pieces {
            if stmt.trim().is_empty() {
                return Err(syntax(line, "empty statement"));
            }
            p.statement(stmt, line)?;
        }
    }
    let (_, n_qubits) = p
        .qreg
        .clone()
        .ok_or_else(|| syntax(text.lines().count().max(1), "no qubit register declared"))?;
    if let Some((_, bits)) = &p.creg {
        if *bits != n_qubits {
            return Err(syntax(1, "classical register size differs from qubit register"));
        }
    }
    let mut circuit = Circuit::from_gates(n_qubits, p.gates)?;
    circuit.set_meta(p.meta);
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_full_circuit;
    use crate::ring::RingConfig;
    use alloc::vec;

    #[test]
    fn single_hadamard_export() {
        let c = Circuit::from_gates(1, vec![Gate::H(0)]).unwrap();
        let v3 = export_qasm(&c, QasmVersion::V3);
        assert_eq!(
            v3,
            "OPENQASM 3.0;\ninclude \"stdgates.inc\";\nqubit[1] q;\nbit[1] c;\nh q[0];\nc = measure q;\n"
        );
        let v2 = export_qasm(&c, QasmVersion::V2);
        assert_eq!(
            v2,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\ncreg c[1];\nh q[0];\nmeasure q -> c;\n"
        );
    }

    #[test]
    fn full_circuit_round_trips_in_both_versions() {
        let c = build_full_circuit(&RingConfig::new(4), 16.0, 6, true).unwrap();
        for v in [QasmVersion::V2, QasmVersion::V3] {
            let text = export_qasm(&c, v);
            assert_eq!(parse_qasm(&text).unwrap(), c);
        }
        let text = export_qasm(&c, QasmVersion::V3);
        let negative = text.lines().filter(|l| l.starts_with("rz(-")).count();
        assert_eq!(negative, 6, "one negative rz per step");
    }

    #[test]
    fn one_negative_literal_per_step_and_no_angle_reduction() {
        let c = build_full_circuit(&RingConfig::new(6), 21.0, 8, false).unwrap();
        let text = export_qasm(&c, QasmVersion::V3);
        assert!(text.contains("rz(5.25) q[2];"));
        assert!(text.contains("rz(-5.25) q[1];"));
        assert!(text.contains("rx(0.525) q[5];"));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let bad = "OPENQASM 3.0;\nqubit[1] q;\nrz q[0];\n";
        assert!(matches!(parse_qasm(bad), Err(Error::QasmSyntax { line: 3, .. })));
        let bad = "OPENQASM 3.0;\nqubit[2] q;\nh q[0]\n";
        assert!(matches!(parse_qasm(bad), Err(Error::QasmSyntax { line: 3, .. })));
        let bad = "qubit[2] q;\n";
        assert!(matches!(parse_qasm(bad), Err(Error::QasmSyntax { line: 1, .. })));
        let bad = "OPENQASM 3.0;\nqubit[2] q;\nh q[5];\n";
        assert!(matches!(parse_qasm(bad), Err(Error::QasmSyntax { line: 3, .. })));
        let bad = "OPENQASM 3.0;\nqubit[2] q;\nh(0.1) q[0];\n";
        assert!(matches!(parse_qasm(bad), Err(Error::QasmSyntax { line: 3, .. })));
    }

    #[test]
    fn unsupported_gate_is_named() {
        let text = "OPENQASM 2.0;\nqreg q[3];\nccx q[0],q[1],q[2];\n";
        assert_eq!(
            parse_qasm(text),
            Err(Error::UnsupportedGate {
                line: 3,
                name: "ccx".into()
            })
        );
    }

    #[test]
    fn accepts_per_qubit_measurements_and_comments() {
        let text = "OPENQASM 2.0;\n// hello\nqreg q[2];\ncreg c[2];\nh q[0]; cx q[0],q[1]; // bell\nmeasure q[0] -> c[0];\nmeasure q[1] -> c[1];\n";
        let c = parse_qasm(text).unwrap();
        assert_eq!(c.gates(), &[Gate::H(0), Gate::Cnot { control: 0, target: 1 }]);
    }
}
