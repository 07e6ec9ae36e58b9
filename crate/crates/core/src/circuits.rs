//! Circuit representation, the line-oriented `.mqc` text format, and
//! generators for the benchmark families: T-doped random Cliffords, the
//! forward-then-inverse U†U variant, both CCZ decompositions, and the hidden
//! bit shift circuit.

use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;

use crate::tableau::{CliffordGate, StabilizerTableau};
use crate::{Error, Result};

/// One gate record. `CliffordBlock` carries a whole Clifford as a tableau
/// payload so generators can compose exactly without gate inflation; blocks
/// are synthesized into {H, S, CNOT} only where gates are required (text
/// emission and the dense oracle).
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cx(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    T(usize),
    Tdg(usize),
    Rz(f64, usize),
    Ccz(usize, usize, usize),
    /// Z-basis measurement. `forced` pins the outcome to a branch:
    /// Some(false) is the |0> (+1) branch, Some(true) the |1> (-1) branch.
    Measure {
        qubit: usize,
        forced: Option<bool>,
    },
    CliffordBlock {
        qubits: Vec<usize>,
        tableau: StabilizerTableau,
    },
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => {
                vec![*q]
            }
            Gate::T(q) | Gate::Tdg(q) | Gate::Rz(_, q) => vec![*q],
            Gate::Cx(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::Ccz(a, b, c) => vec![*a, *b, *c],
            Gate::Measure { qubit, .. } => vec![*qubit],
            Gate::CliffordBlock { qubits, .. } => qubits.clone(),
        }
    }

    /// Clifford gates update only the stabilizer frame.
    pub fn as_clifford(&self) -> Option<CliffordGate> {
        match *self {
            Gate::H(q) => Some(CliffordGate::H(q)),
            Gate::S(q) => Some(CliffordGate::S(q)),
            Gate::Sdg(q) => Some(CliffordGate::Sdg(q)),
            Gate::X(q) => Some(CliffordGate::X(q)),
            Gate::Y(q) => Some(CliffordGate::Y(q)),
            Gate::Z(q) => Some(CliffordGate::Z(q)),
            Gate::Cx(a, b) => Some(CliffordGate::Cnot(a, b)),
            Gate::Cz(a, b) => Some(CliffordGate::Cz(a, b)),
            Gate::Swap(a, b) => Some(CliffordGate::Swap(a, b)),
            _ => None,
        }
    }

    pub fn is_non_clifford(&self) -> bool {
        matches!(
            self,
            Gate::T(_) | Gate::Tdg(_) | Gate::Rz(_, _) | Gate::Ccz(_, _, _)
        )
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            Error::check_qubit(q, n)?;
        }
        let mut sorted = qs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != qs.len() {
            return Err(Error::DuplicateQubits);
        }
        if let Gate::CliffordBlock { qubits, tableau } = self {
            if tableau.n() != qubits.len() {
                return Err(Error::DimensionMismatch(tableau.n(), qubits.len()));
            }
        }
        Ok(())
    }
}

/// Ordered gate sequence over n qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Circuit> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(Circuit {
            n,
            gates: Vec::new(),
        })
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn count_non_clifford(&self) -> usize {
        self.gates.iter().filter(|g| g.is_non_clifford()).count()
    }

    pub fn count_measurements(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Measure { .. }))
            .count()
    }

    /// Replace every clifford block by an equivalent {H, S, CNOT} sequence.
    pub fn synthesize_blocks(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.n)?;
        for g in &self.gates {
            match g {
                Gate::CliffordBlock { qubits, tableau } => {
                    for cg in tableau.synthesize()? {
                        out.push(match cg {
                            CliffordGate::H(q) => Gate::H(qubits[q]),
                            CliffordGate::S(q) => Gate::S(qubits[q]),
                            CliffordGate::Sdg(q) => Gate::Sdg(qubits[q]),
                            CliffordGate::X(q) => Gate::X(qubits[q]),
                            CliffordGate::Y(q) => Gate::Y(qubits[q]),
                            CliffordGate::Z(q) => Gate::Z(qubits[q]),
                            CliffordGate::Cnot(a, b) => Gate::Cx(qubits[a], qubits[b]),
                            CliffordGate::Cz(a, b) => Gate::Cz(qubits[a], qubits[b]),
                            CliffordGate::Swap(a, b) => Gate::Swap(qubits[a], qubits[b]),
                        })?;
                    }
                }
                g => out.push(g.clone())?,
            }
        }
        Ok(out)
    }
}

/// Parse the `.mqc` text format: one gate per non-empty, non-comment line,
/// `#` starts a comment, mandatory `qubits <n>` header, grammar
/// `<mnemonic> [angle] <q0> [q1 [q2]]`.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mnemonic = tokens.next().expect("non-empty line has a token");
        let rest: Vec<&str> = tokens.collect();
        let circuit = match circuit.as_mut() {
            Some(c) => c,
            None => {
                if mnemonic != "qubits" {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "expected `qubits <n>` header".into(),
                    });
                }
                let n = parse_count(&rest, line_no)?;
                circuit = Some(Circuit::new(n).map_err(|_| Error::Parse {
                    line: line_no,
                    msg: "qubit count must be at least 1".into(),
                })?);
                continue;
            }
        };
        let gate = parse_gate_line(mnemonic, &rest, line_no)?;
        circuit.push(gate).map_err(|e| Error::Parse {
            line: line_no,
            msg: e.to_string(),
        })?;
    }
    circuit.ok_or(Error::Parse {
        line: 0,
        msg: "missing `qubits <n>` header".into(),
    })
}

fn parse_count(rest: &[&str], line: usize) -> Result<usize> {
    if rest.len() != 1 {
        return Err(Error::Parse {
            line,
            msg: "expected exactly one argument".into(),
        });
    }
    rest[0].parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid count '{}'", rest[0]),
    })
}

fn parse_gate_line(mnemonic: &str, rest: &[&str], line: usize) -> Result<Gate> {
    let qubit = |tok: &str| -> Result<usize> {
        tok.parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid qubit index '{tok}'"),
        })
    };
    let arity = |want: usize| -> Result<()> {
        if rest.len() != want {
            Err(Error::Parse {
                line,
                msg: format!("'{mnemonic}' takes {want} operand(s), got {}", rest.len()),
            })
        } else {
            Ok(())
        }
    };
    match mnemonic {
        "h" | "s" | "sdg" | "x" | "y" | "z" | "t" | "tdg" | "measure" | "measure0"
        | "measure1" => {
            arity(1)?;
            let q = qubit(rest[0])?;
            Ok(match mnemonic {
                "h" => Gate::H(q),
                "s" => Gate::S(q),
                "sdg" => Gate::Sdg(q),
                "x" => Gate::X(q),
                "y" => Gate::Y(q),
                "z" => Gate::Z(q),
                "t" => Gate::T(q),
                "tdg" => Gate::Tdg(q),
                "measure" => Gate::Measure {
                    qubit: q,
                    forced: None,
                },
                "measure0" => Gate::Measure {
                    qubit: q,
                    forced: Some(false),
                },
                _ => Gate::Measure {
                    qubit: q,
                    forced: Some(true),
                },
            })
        }
        "cx" | "cz" | "swap" => {
            arity(2)?;
            let (a, b) = (qubit(rest[0])?, qubit(rest[1])?);
            Ok(match mnemonic {
                "cx" => Gate::Cx(a, b),
                "cz" => Gate::Cz(a, b),
                _ => Gate::Swap(a, b),
            })
        }
        "ccz" => {
            arity(3)?;
            Ok(Gate::Ccz(qubit(rest[0])?, qubit(rest[1])?, qubit(rest[2])?))
        }
        "rz" => {
            arity(2)?;
            let angle = parse_angle(rest[0], line)?;
            Ok(Gate::Rz(angle, qubit(rest[1])?))
        }
        "qubits" => Err(Error::Parse {
            line,
            msg: "duplicate `qubits` header".into(),
        }),
        other => Err(Error::Parse {
            line,
            msg: format!("unknown mnemonic '{other}'"),
        }),
    }
}

/// Angles are decimal radians or pi multiples: `pi`, `-pi/4`, `3pi/2`.
fn parse_angle(tok: &str, line: usize) -> Result<f64> {
    let bad = || Error::Parse {
        line,
        msg: format!("malformed angle '{tok}'"),
    };
    if let Some(pos) = tok.find("pi") {
        let (head, tail) = (&tok[..pos], &tok[pos + 2..]);
        let mut value = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        } * std::f64::consts::PI;
        if !tail.is_empty() {
            let denom = tail.strip_prefix('/').ok_or_else(bad)?;
            let d = denom.parse::<f64>().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            value /= d;
        }
        Ok(value)
    } else {
        tok.parse::<f64>().map_err(|_| bad())
    }
}

/// Emit the canonical text form: decimal shortest-round-trip angles, one gate
/// per line. Clifford blocks must be synthesized first.
pub fn emit_circuit(circuit: &Circuit) -> Result<String> {
    let mut out = format!("qubits {}\n", circuit.n);
    for g in &circuit.gates {
        let line = match g {
            Gate::H(q) => format!("h {q}"),
            Gate::S(q) => format!("s {q}"),
            Gate::Sdg(q) => format!("sdg {q}"),
            Gate::X(q) => format!("x {q}"),
            Gate::Y(q) => format!("y {q}"),
            Gate::Z(q) => format!("z {q}"),
            Gate::Cx(a, b) => format!("cx {a} {b}"),
            Gate::Cz(a, b) => format!("cz {a} {b}"),
            Gate::Swap(a, b) => format!("swap {a} {b}"),
            Gate::T(q) => format!("t {q}"),
            Gate::Tdg(q) => format!("tdg {q}"),
            Gate::Rz(angle, q) => format!("rz {angle} {q}"),
            Gate::Ccz(a, b, c) => format!("ccz {a} {b} {c}"),
            Gate::Measure { qubit, forced } => match forced {
                None => format!("measure {qubit}"),
                Some(false) => format!("measure0 {qubit}"),
                Some(true) => format!("measure1 {qubit}"),
            },
            Gate::CliffordBlock { .. } => return Err(Error::UnsynthesizedBlock),
        };
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// Spec for random T-doped Clifford circuits: t layers, each a uniformly
/// random n-qubit Clifford followed by a T on qubit 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TDopedSpec {
    pub n: usize,
    pub t: usize,
    pub seed: u64,
}

pub fn gen_t_doped(spec: &TDopedSpec) -> Result<Circuit> {
    let mut rng = Pcg64Mcg::seed_from_u64(spec.seed);
    let mut circuit = Circuit::new(spec.n)?;
    let all: Vec<usize> = (0..spec.n).collect();
    for _ in 0..spec.t {
        circuit.push(Gate::CliffordBlock {
            qubits: all.clone(),
            tableau: StabilizerTableau::random(spec.n, &mut rng)?,
        })?;
        circuit.push(Gate::T(0))?;
    }
    Ok(circuit)
}

/// The forward circuit followed by its exact inverse, so the overall action
/// is the identity while intermediate states are highly entangled and magical.
pub fn gen_uudagger(spec: &TDopedSpec) -> Result<Circuit> {
    let forward = gen_t_doped(spec)?;
    let mut circuit = forward.clone();
    for g in forward.gates.iter().rev() {
        circuit.push(match g {
            Gate::T(q) => Gate::Tdg(*q),
            Gate::Tdg(q) => Gate::T(*q),
            Gate::CliffordBlock { qubits, tableau } => Gate::CliffordBlock {
                qubits: qubits.clone(),
                tableau: tableau.inverse()?,
            },
            _ => return Err(Error::UnsupportedGate("unexpected gate in T-doped circuit")),
        })?;
    }
    Ok(circuit)
}

/// CCZ on (c0, c1, target) using 7 T/T† gates and no ancillas.
pub fn ccz_seven_t(c0: usize, c1: usize, target: usize) -> Vec<Gate> {
    vec![
        // H sandwich turns the Toffoli below into a CCZ
        Gate::H(target),
        // standard 7-T Toffoli
        Gate::H(target),
        Gate::Cx(c1, target),
        Gate::Tdg(target),
        Gate::Cx(c0, target),
        Gate::T(target),
        Gate::Cx(c1, target),
        Gate::Tdg(target),
        Gate::Cx(c0, target),
        Gate::T(target),
        Gate::T(c1),
        Gate::H(target),
        Gate::Cx(c0, c1),
        Gate::T(c0),
        Gate::Tdg(c1),
        Gate::Cx(c0, c1),
        Gate::H(target),
    ]
}

/// CCZ on (c0, c1, target) using 4 T/T† gates and two |0> ancillas. The
/// in-gadget measurement is recorded as a forced |0> branch so the
/// classically-controlled CZ correction never fires; anc1 returns to |0>
/// by construction and anc0 is measured out.
pub fn ccz_four_t(c0: usize, c1: usize, target: usize, anc0: usize, anc1: usize) -> Vec<Gate> {
    vec![
        Gate::H(target), // CCZ -> CCX conversion
        Gate::H(anc0),
        Gate::Cx(c0, anc1),
        Gate::Cx(anc0, c0),
        Gate::Cx(anc0, c1),
        Gate::Cx(c1, anc1),
        Gate::Tdg(c0),
        Gate::Tdg(c1),
        Gate::T(anc0),
        Gate::T(anc1),
        Gate::Cx(c1, anc1),
        Gate::Cx(anc0, c0),
        Gate::Cx(anc0, c1),
        Gate::Cx(c0, anc1),
        Gate::H(anc0),
        Gate::S(anc0),
        Gate::Cx(anc0, target),
        Gate::H(anc0),
        Gate::Measure {
            qubit: anc0,
            forced: Some(false),
        },
        Gate::H(target),
    ]
}

/// Which CCZ realization a hidden-shift circuit uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CczDecomposition {
    FourT,
    SevenT,
}

/// Hidden bit shift benchmark over an even number of data qubits. The oracle
/// phase polynomial g is built from `clifford_phase_count` gates in {Z, CZ}
/// plus `ccz_count` CCZ gates, all on one half-register; the dual oracle
/// applies the same pattern on the other half together with Z(s). The final
/// measurement returns `shift` with certainty.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenShiftSpec {
    pub n: usize,
    pub shift: Vec<bool>,
    pub ccz_count: usize,
    pub clifford_phase_count: usize,
    pub ccz_decomposition: CczDecomposition,
    pub seed: u64,
}

impl HiddenShiftSpec {
    /// Harness default: phase-gate count 3n, random shift drawn from the seed.
    pub fn random(
        n: usize,
        ccz_count: usize,
        ccz_decomposition: CczDecomposition,
        seed: u64,
    ) -> Result<HiddenShiftSpec> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "hidden shift needs an even, positive qubit count".into(),
            ));
        }
        let mut rng = Pcg64Mcg::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let shift = (0..n).map(|_| rng.gen()).collect();
        Ok(HiddenShiftSpec {
            n,
            shift,
            ccz_count,
            clifford_phase_count: 3 * n,
            ccz_decomposition,
            seed,
        })
    }
}

enum PhaseGate {
    Z(usize),
    Cz(usize, usize),
}

pub fn gen_hidden_shift(spec: &HiddenShiftSpec) -> Result<Circuit> {
    let n = spec.n;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(
            "hidden shift needs an even, positive qubit count".into(),
        ));
    }
    if spec.shift.len() != n {
        return Err(Error::InvalidConfig("shift length must equal n".into()));
    }
    let m = n / 2;
    if spec.ccz_count > 0 && m < 3 {
        return Err(Error::InvalidConfig(
            "ccz gates need at least 3 qubits per half-register".into(),
        ));
    }
    let triples_available = if m >= 3 { m * (m - 1) * (m - 2) / 6 } else { 0 };
    if spec.ccz_count > triples_available {
        return Err(Error::InvalidConfig(format!(
            "ccz_count {} exceeds the {} distinct operand triples",
            spec.ccz_count, triples_available
        )));
    }

    let mut rng = Pcg64Mcg::seed_from_u64(spec.seed);
    let mut g: Vec<PhaseGate> = Vec::new();
    for _ in 0..spec.clifford_phase_count {
        if m >= 2 && rng.gen::<bool>() {
            let a = rng.gen_range(0..m);
            let b = (a + 1 + rng.gen_range(0..m - 1)) % m;
            g.push(PhaseGate::Cz(a.min(b), a.max(b)));
        } else {
            g.push(PhaseGate::Z(rng.gen_range(0..m)));
        }
    }
    // ccz operand triples sampled without replacement, shared by both oracles
    let mut triples: Vec<(usize, usize, usize)> = Vec::new();
    while triples.len() < spec.ccz_count {
        let mut picks = [
            rng.gen_range(0..m),
            rng.gen_range(0..m),
            rng.gen_range(0..m),
        ];
        picks.sort_unstable();
        if picks[0] == picks[1] || picks[1] == picks[2] {
            continue;
        }
        let t = (picks[0], picks[1], picks[2]);
        if !triples.contains(&t) {
            triples.push(t);
        }
    }

    // n data qubits plus 2 fresh ancillas per 4-T CCZ instance
    let ccz_instances = 2 * spec.ccz_count;
    let extra = match spec.ccz_decomposition {
        CczDecomposition::FourT => 2 * ccz_instances,
        CczDecomposition::SevenT => 0,
    };
    let mut circuit = Circuit::new(n + extra)?;
    let mut next_ancilla = n;

    let apply_oracle = |circuit: &mut Circuit,
                            next_ancilla: &mut usize,
                            offset: usize|
     -> Result<()> {
        // inner-product pairs tie the two halves together
        for i in 0..m {
            circuit.push(Gate::Cz(i, m + i))?;
        }
        for pg in &g {
            circuit.push(match *pg {
                PhaseGate::Z(a) => Gate::Z(a + offset),
                PhaseGate::Cz(a, b) => Gate::Cz(a + offset, b + offset),
            })?;
        }
        for &(a, b, c) in &triples {
            let (a, b, c) = (a + offset, b + offset, c + offset);
            match spec.ccz_decomposition {
                CczDecomposition::SevenT => circuit.extend(ccz_seven_t(a, b, c))?,
                CczDecomposition::FourT => {
                    let (x, y) = (*next_ancilla, *next_ancilla + 1);
                    *next_ancilla += 2;
                    circuit.extend(ccz_four_t(a, b, c, x, y))?;
                }
            }
        }
        Ok(())
    };

    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    // oracle for f(x, y) = x.y + g(x)
    apply_oracle(&mut circuit, &mut next_ancilla, 0)?;
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    // dual oracle f~(x, y) = x.y + g(y), with the shift phase Z(s)
    apply_oracle(&mut circuit, &mut next_ancilla, m)?;
    for (q, &bit) in spec.shift.iter().enumerate() {
        if bit {
            circuit.push(Gate::Z(q))?;
        }
    }
    for q in 0..n {
        circuit.push(Gate::H(q))?;
    }
    for q in 0..n {
        circuit.push(Gate::Measure {
            qubit: q,
            forced: None,
        })?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bell_prep() {
        let c = parse_circuit("qubits 2\nh 0\ncx 0 1\n").unwrap();
        assert_eq!(c.n, 2);
        assert_eq!(c.gates, vec![Gate::H(0), Gate::Cx(0, 1)]);
    }

    #[test]
    fn parse_rz_pi_multiples() {
        let c = parse_circuit("qubits 1\nrz pi/4 0\n").unwrap();
        match &c.gates[0] {
            Gate::Rz(angle, 0) => {
                assert!((angle - std::f64::consts::FRAC_PI_4).abs() < 1e-15)
            }
            g => panic!("unexpected {g:?}"),
        }
        for (text, want) in [
            ("pi", std::f64::consts::PI),
            ("-pi", -std::f64::consts::PI),
            ("3pi/2", 1.5 * std::f64::consts::PI),
            ("0.25", 0.25),
            ("-1.5e-3", -1.5e-3),
        ] {
            let c = parse_circuit(&format!("qubits 1\nrz {text} 0\n")).unwrap();
            match &c.gates[0] {
                Gate::Rz(angle, _) => assert!((angle - want).abs() < 1e-12, "{text}"),
                g => panic!("unexpected {g:?}"),
            }
        }
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_circuit("qubits 2\ncx 0 2\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match parse_circuit("qubits 1\nfoo 0\n") {
            Err(Error::Parse { line: 2, msg }) => assert!(msg.contains("foo")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_circuit("h 0\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(parse_circuit("").is_err());
        assert!(parse_circuit("qubits 2\ncx 0\n").is_err());
        assert!(parse_circuit("qubits 1\nrz pie 0\n").is_err());
        assert!(parse_circuit("qubits 2\ncx 1 1\n").is_err());
        let c = parse_circuit("qubits 1\n# comment\n\nh 0 # trailing\n").unwrap();
        assert_eq!(c.gates.len(), 1);
    }

    #[test]
    fn emit_round_trips() {
        let text =
            "qubits 3\nh 0\ncx 0 1\nrz 0.7853981633974483 2\nmeasure0 1\nccz 0 1 2\nmeasure 2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(emit_circuit(&c).unwrap(), text);
        let empty = Circuit::new(4).unwrap();
        assert_eq!(emit_circuit(&empty).unwrap(), "qubits 4\n");
    }

    #[test]
    fn emit_rejects_unsynthesized_blocks() {
        let c = gen_t_doped(&TDopedSpec { n: 2, t: 1, seed: 0 }).unwrap();
        assert!(matches!(emit_circuit(&c), Err(Error::UnsynthesizedBlock)));
        let synth = c.synthesize_blocks().unwrap();
        let text = emit_circuit(&synth).unwrap();
        assert_eq!(parse_circuit(&text).unwrap(), synth);
    }

    #[test]
    fn t_doped_structure() {
        let spec = TDopedSpec { n: 4, t: 3, seed: 9 };
        let c = gen_t_doped(&spec).unwrap();
        assert_eq!(c.gates.len(), 6);
        assert_eq!(c.count_non_clifford(), 3);
        for (i, g) in c.gates.iter().enumerate() {
            if i % 2 == 0 {
                assert!(matches!(g, Gate::CliffordBlock { .. }));
            } else {
                assert_eq!(*g, Gate::T(0));
            }
        }
        assert_eq!(gen_t_doped(&spec).unwrap(), c);
        assert!(gen_t_doped(&TDopedSpec { n: 4, t: 0, seed: 9 })
            .unwrap()
            .gates
            .is_empty());
    }

    #[test]
    fn t_doped_layers_are_prefix_stable_in_t() {
        // same seed, larger t: the first layers coincide
        let short = gen_t_doped(&TDopedSpec { n: 4, t: 2, seed: 5 }).unwrap();
        let long = gen_t_doped(&TDopedSpec { n: 4, t: 5, seed: 5 }).unwrap();
        assert_eq!(&long.gates[..short.gates.len()], &short.gates[..]);
    }

    #[test]
    fn uudagger_structure() {
        let spec = TDopedSpec { n: 3, t: 2, seed: 4 };
        let fwd = gen_t_doped(&spec).unwrap();
        let both = gen_uudagger(&spec).unwrap();
        assert_eq!(both.gates.len(), 2 * fwd.gates.len());
        assert_eq!(both.count_non_clifford(), 2 * fwd.count_non_clifford());
        assert!(gen_uudagger(&TDopedSpec { n: 3, t: 0, seed: 4 })
            .unwrap()
            .gates
            .is_empty());
    }

    #[test]
    fn ccz_gate_counts() {
        let seven = ccz_seven_t(0, 1, 2);
        assert_eq!(
            seven
                .iter()
                .filter(|g| matches!(g, Gate::T(_) | Gate::Tdg(_)))
                .count(),
            7
        );
        let four = ccz_four_t(0, 1, 2, 3, 4);
        assert_eq!(
            four.iter()
                .filter(|g| matches!(g, Gate::T(_) | Gate::Tdg(_)))
                .count(),
            4
        );
        assert_eq!(
            four.iter()
                .filter(|g| matches!(g, Gate::Measure { .. }))
                .count(),
            1
        );
    }

    #[test]
    fn hidden_shift_specs_validate() {
        assert!(HiddenShiftSpec::random(5, 0, CczDecomposition::SevenT, 1).is_err());
        assert!(HiddenShiftSpec::random(0, 0, CczDecomposition::SevenT, 1).is_err());
        // 4 qubits = half-register of 2: no room for a ccz
        let mut spec = HiddenShiftSpec::random(4, 0, CczDecomposition::SevenT, 1).unwrap();
        spec.ccz_count = 1;
        assert!(gen_hidden_shift(&spec).is_err());
        // zero-ccz circuit is pure Clifford + measurement
        let spec = HiddenShiftSpec::random(8, 0, CczDecomposition::SevenT, 7).unwrap();
        let c = gen_hidden_shift(&spec).unwrap();
        assert_eq!(c.n, 8);
        assert_eq!(c.count_non_clifford(), 0);
        assert_eq!(c.count_measurements(), 8);
    }

    #[test]
    fn hidden_shift_ancilla_accounting() {
        let spec = HiddenShiftSpec::random(8, 2, CczDecomposition::FourT, 3).unwrap();
        let c = gen_hidden_shift(&spec).unwrap();
        // 2 ccz per oracle, 2 oracles, 2 ancillas each
        assert_eq!(c.n, 8 + 8);
        let seven = gen_hidden_shift(&HiddenShiftSpec {
            ccz_decomposition: CczDecomposition::SevenT,
            ..spec.clone()
        })
        .unwrap();
        assert_eq!(seven.n, 8);
        assert_eq!(seven.count_non_clifford(), 7 * 4);
    }

    #[test]
    fn generators_are_deterministic_and_emit_byte_equal() {
        let spec = HiddenShiftSpec::random(8, 1, CczDecomposition::SevenT, 11).unwrap();
        let a = emit_circuit(&gen_hidden_shift(&spec).unwrap()).unwrap();
        let b = emit_circuit(&gen_hidden_shift(&spec).unwrap()).unwrap();
        assert_eq!(a, b);
        let tspec = TDopedSpec { n: 5, t: 4, seed: 2 };
        let a = emit_circuit(&gen_t_doped(&tspec).unwrap().synthesize_blocks().unwrap()).unwrap();
        let b = emit_circuit(&gen_t_doped(&tspec).unwrap().synthesize_blocks().unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_circuits_round_trip_through_text() {
        use rand::{Rng, SeedableRng};
        let mut rng = Pcg64Mcg::seed_from_u64(1234);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let mut c = Circuit::new(n).unwrap();
            for _ in 0..rng.gen_range(0..20) {
                let q = rng.gen_range(0..n);
                let r = if n > 1 {
                    (q + 1 + rng.gen_range(0..n - 1)) % n
                } else {
                    0
                };
                let gate = match rng.gen_range(0..10) {
                    0 => Gate::H(q),
                    1 => Gate::S(q),
                    2 => Gate::Sdg(q),
                    3 => Gate::X(q),
                    4 => Gate::T(q),
                    5 => Gate::Tdg(q),
                    6 => Gate::Rz(rng.gen::<f64>() * 7.0 - 3.5, q),
                    7 if n > 1 => Gate::Cx(q, r),
                    8 if n > 1 => Gate::Cz(q, r),
                    _ => Gate::Measure {
                        qubit: q,
                        forced: match rng.gen_range(0..3) {
                            0 => None,
                            1 => Some(false),
                            _ => Some(true),
                        },
                    },
                };
                c.push(gate).unwrap();
            }
            let text = emit_circuit(&c).unwrap();
            let parsed = parse_circuit(&text).unwrap();
            assert_eq!(parsed, c);
            assert_eq!(emit_circuit(&parsed).unwrap(), text);
        }
    }
}
