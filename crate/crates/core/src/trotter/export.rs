//! OpenQASM 2.0 and JSON interchange for circuits.

use std::fmt::Write as _;
use std::str::FromStr;

use super::circuit::{Circuit, Gate, InitState};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitFormat {
    Qasm2,
    Json,
}

impl FromStr for CircuitFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qasm" | "qasm2" | "openqasm" => Ok(CircuitFormat::Qasm2),
            "json" => Ok(CircuitFormat::Json),
            other => Err(Error::Usage(format!("unknown circuit format {other:?}"))),
        }
    }
}

const META_PREFIX: &str = "// lcdrive:";

/// 17 significant digits, enough to round-trip any `f64`.
fn angle(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn export_circuit(c: &Circuit, format: CircuitFormat) -> Result<String> {
    match format {
        CircuitFormat::Json => Ok(serde_json::to_string_pretty(c)?),
        CircuitFormat::Qasm2 => Ok(to_qasm(c)),
    }
}

pub fn to_qasm(c: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if c.spec_hash.is_some() || c.steps != 1 {
        let _ = write!(s, "{META_PREFIX} steps={}", c.steps);
        if let Some(h) = &c.spec_hash {
            let _ = write!(s, " hash={h}");
        }
        s.push('\n');
    }
    let _ = writeln!(s, "qreg q[{}];", c.sites);
    if c.init == InitState::Ones {
        for i in 0..c.sites {
            let _ = writeln!(s, "x q[{i}];");
        }
    }
    for g in &c.gates {
        match *g {
            Gate::Rz { site, angle: a } => {
                let _ = writeln!(s, "rz({}) q[{site}];", angle(a));
            }
            Gate::Rx { site, angle: a } => {
                let _ = writeln!(s, "rx({}) q[{site}];", angle(a));
            }
            Gate::Ry { site, angle: a } => {
                let _ = writeln!(s, "ry({}) q[{site}];", angle(a));
            }
            Gate::Rzz { a, b, angle: t } => {
                let _ = writeln!(s, "cx q[{a}],q[{b}];\nrz({}) q[{b}];\ncx q[{a}],q[{b}];", angle(t));
            }
        }
    }
    s
}

#[derive(Debug, PartialEq)]
enum Stmt {
    Rot(char, f64, usize),
    Cx(usize, usize),
    Rzz(usize, usize, f64),
    X(usize),
}

fn perr<T>(line: usize, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::Parse(format!("line {line}: {msg}")))
}

fn qubit(tok: &str, line: usize) -> Result<usize> {
    let t = tok.trim();
    let inner = t
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("line {line}: expected q[i], got {t:?}")))?;
    inner
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad qubit index {inner:?}")))
}

/// Float literal, or a simple multiple/fraction of `pi`.
fn parse_angle(expr: &str, line: usize) -> Result<f64> {
    let e = expr.trim().replace(' ', "");
    if let Ok(v) = e.parse::<f64>() {
        return Ok(v);
    }
    let (neg, body) = match e.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, e.as_str()),
    };
    let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: bad angle {expr:?}")));
    let v = if body == "pi" {
        std::f64::consts::PI
    } else if let Some(d) = body.strip_prefix("pi/") {
        std::f64::consts::PI / num(d)?
    } else if let Some(m) = body.strip_suffix("*pi") {
        num(m)? * std::f64::consts::PI
    } else if let Some(m) = body.strip_prefix("pi*") {
        num(m)? * std::f64::consts::PI
    } else {
        return perr(line, format!("bad angle {expr:?}"));
    };
    Ok(if neg { -v } else { v })
}

/// Parses the QASM subset produced by [`to_qasm`] (plus `rzz` and `pi` angles).
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut sites: Option<usize> = None;
    let mut steps = 1;
    let mut hash = None;
    let mut stmts: Vec<(usize, Stmt)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let trimmed = raw.trim();
        if let Some(meta) = trimmed.strip_prefix(META_PREFIX) {
            for kv in meta.split_whitespace() {
                match kv.split_once('=') {
                    Some(("steps", v)) => {
                        steps = v.parse().map_err(|_| Error::Parse(format!("line {line}: bad steps {v:?}")))?
                    }
                    Some(("hash", v)) => hash = Some(v.to_string()),
                    _ => {}
                }
            }
            continue;
        }
        let code = match trimmed.find("//") {
            Some(i) => &trimmed[..i],
            None => trimmed,
        };
        for stmt in code.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if stmt.starts_with("OPENQASM") || stmt.starts_with("include") || stmt.starts_with("creg") || stmt.starts_with("barrier") {
                continue;
            }
            if let Some(r) = stmt.strip_prefix("qreg") {
                let n = r.trim();
                let n = n
                    .strip_prefix("q[")
                    .and_then(|x| x.strip_suffix(']'))
                    .ok_or_else(|| Error::Parse(format!("line {line}: only a register named q is supported")))?;
                if sites.is_some() {
                    return perr(line, "more than one qreg");
                }
                sites = Some(n.parse().map_err(|_| Error::Parse(format!("line {line}: bad register size")))?);
                continue;
            }
            if let Some(args) = stmt.strip_prefix("cx") {
                let (a, b) = args
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("line {line}: cx needs two qubits")))?;
                stmts.push((line, Stmt::Cx(qubit(a, line)?, qubit(b, line)?)));
                continue;
            }
            if let Some(args) = stmt.strip_prefix("x ") {
                stmts.push((line, Stmt::X(qubit(args, line)?)));
                continue;
            }
            let open = stmt.find('(');
            let close = stmt.find(')');
            let (Some(o), Some(c)) = (open, close) else {
                return perr(line, format!("unsupported statement {stmt:?}"));
            };
            let name = stmt[..o].trim();
            let theta = parse_angle(&stmt[o + 1..c], line)?;
            let operands = &stmt[c + 1..];
            match name {
                "rz" | "rx" | "ry" => {
                    stmts.push((line, Stmt::Rot(name.as_bytes()[1] as char, theta, qubit(operands, line)?)))
                }
                "rzz" => {
                    let (a, b) = operands
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("line {line}: rzz needs two qubits")))?;
                    stmts.push((line, Stmt::Rzz(qubit(a, line)?, qubit(b, line)?, theta)));
                }
                other => return perr(line, format!("unsupported gate {other:?}")),
            }
        }
    }

    let sites = sites.ok_or_else(|| Error::Parse("missing qreg declaration".into()))?;
    let mut circuit = Circuit::new(sites);
    circuit.steps = steps;
    circuit.spec_hash = hash;

    // Leading x on every qubit encodes the all-ones initial state.
    let mut start = 0;
    let xs = stmts.iter().take_while(|(_, s)| matches!(s, Stmt::X(_))).count();
    if xs > 0 {
        let mut seen: Vec<usize> = stmts[..xs]
            .iter()
            .map(|(_, s)| if let Stmt::X(q) = s { *q } else { unreachable!() })
            .collect();
        seen.sort_unstable();
        if seen != (0..sites).collect::<Vec<_>>() {
            return perr(stmts[0].0, "x gates are only supported as an all-ones preparation");
        }
        circuit.init = InitState::Ones;
        start = xs;
    }

    let mut i = start;
    while i < stmts.len() {
        let (line, ref s) = stmts[i];
        let gate = match *s {
            Stmt::Rzz(a, b, t) => Gate::Rzz { a, b, angle: t },
            Stmt::Rot('z', a, q) => Gate::Rz { site: q, angle: a },
            Stmt::Rot('x', a, q) => Gate::Rx { site: q, angle: a },
            Stmt::Rot(_, a, q) => Gate::Ry { site: q, angle: a },
            Stmt::X(_) => return perr(line, "x gates are only supported as an all-ones preparation"),
            Stmt::Cx(a, b) => {
                let fused = match (stmts.get(i + 1), stmts.get(i + 2)) {
                    (Some((_, Stmt::Rot('z', t, q))), Some((_, Stmt::Cx(a2, b2)))) if *q == b && *a2 == a && *b2 == b => {
                        Some(Gate::Rzz { a, b, angle: *t })
                    }
                    _ => None,
                };
                match fused {
                    Some(g) => {
                        i += 2;
                        g
                    }
                    None => return perr(line, "cx outside a cx-rz-cx block is not supported"),
                }
            }
        };
        circuit.push(gate).map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        i += 1;
    }
    circuit.validate()?;
    Ok(circuit)
}

pub fn parse_circuit_json(text: &str) -> Result<Circuit> {
    let c: Circuit = serde_json::from_str(text)?;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::{ProtocolKind, ProtocolSpec};
    use crate::trotter::synthesize;

    #[test]
    fn empty_circuit() {
        let text = to_qasm(&Circuit::new(3));
        assert_eq!(text, "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\n");
        assert_eq!(parse_qasm(&text).unwrap(), Circuit::new(3));
    }

    #[test]
    fn rzz_expansion() {
        let mut c = Circuit::new(2);
        c.push(Gate::Rzz { a: 0, b: 1, angle: 0.25 }).unwrap();
        let text = to_qasm(&c);
        assert!(text.ends_with("cx q[0],q[1];\nrz(2.5000000000000000e-1) q[1];\ncx q[0],q[1];\n"));
        assert_eq!(parse_qasm(&text).unwrap(), c);
    }

    #[test]
    fn synthesized_round_trip() {
        let spec = ProtocolSpec::new(4, 0.5, ProtocolKind::Lcdlu).with_lambda_f(3.0);
        let c = synthesize(&spec, 20).unwrap();
        let text = to_qasm(&c);
        let back = parse_qasm(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(to_qasm(&back), text);
        let json = export_circuit(&c, CircuitFormat::Json).unwrap();
        assert_eq!(parse_circuit_json(&json).unwrap(), c);
    }

    #[test]
    fn foreign_syntax() {
        let text = "OPENQASM 2.0;\nqreg q[2];\ncreg c[2];\nrx(pi/4) q[0]; rzz(-pi) q[0],q[1];\nry(0.5*pi) q[1];\n";
        let c = parse_qasm(text).unwrap();
        assert_eq!(c.gates.len(), 3);
        assert!((c.gates[0].angle() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(c.gates[1], Gate::Rzz { a: 0, b: 1, .. }));
    }

    #[test]
    fn errors() {
        assert!(parse_qasm("rx(0.1) q[0];").is_err());
        assert!(parse_qasm("qreg q[2];\ncx q[0],q[1];\n").is_err());
        assert!(parse_qasm("qreg q[2];\nh q[0];\n").is_err());
        assert!(parse_qasm("qreg q[2];\nrx(0.1) q[4];\n").is_err());
        assert!(parse_qasm("qreg q[2];\nx q[0];\n").is_err());
    }
}
