//! Brute-force dense statevector simulator, the ground truth every other
//! backend is checked against. Deliberately naive; capped at 14 qubits.

use num_complex::Complex64;
use rand::Rng;

use crate::circuits::{Circuit, Gate};
use crate::pauli::{Pauli, PauliString};
use crate::stn::StnState;
use crate::tableau::{CliffordGate, RowKind, RowSelector};
use crate::{Error, Result};

pub const MAX_DENSE_QUBITS: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Full 2^n amplitude vector; qubit 0 is the most significant index bit.
#[derive(Clone, Debug)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero_state(n: usize) -> Result<DenseState> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit {
                requested: n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<DenseState> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        if n > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit {
                requested: n,
                max: MAX_DENSE_QUBITS,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch(amps.len(), 1 << n));
        }
        Ok(DenseState { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    fn stride(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    pub fn apply_1q(&mut self, u: &[[Complex64; 2]; 2], q: usize) -> Result<()> {
        Error::check_qubit(q, self.n)?;
        let stride = self.stride(q);
        for base in 0..self.amps.len() {
            if base & stride == 0 {
                let (a, b) = (self.amps[base], self.amps[base | stride]);
                self.amps[base] = u[0][0] * a + u[0][1] * b;
                self.amps[base | stride] = u[1][0] * a + u[1][1] * b;
            }
        }
        Ok(())
    }

    pub fn apply_2q(&mut self, u: &[[Complex64; 4]; 4], a: usize, b: usize) -> Result<()> {
        Error::check_qubit(a, self.n)?;
        Error::check_qubit(b, self.n)?;
        if a == b {
            return Err(Error::DuplicateQubits);
        }
        let (sa, sb) = (self.stride(a), self.stride(b));
        for base in 0..self.amps.len() {
            if base & sa == 0 && base & sb == 0 {
                let idx = [base, base | sb, base | sa, base | sa | sb];
                let old = idx.map(|i| self.amps[i]);
                for (r, &i) in idx.iter().enumerate() {
                    let mut acc = ZERO;
                    for (c, &o) in old.iter().enumerate() {
                        acc += u[r][c] * o;
                    }
                    self.amps[i] = acc;
                }
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch(p.n(), self.n));
        }
        for q in 0..self.n {
            match p.letter(q) {
                Pauli::I => {}
                l => self.apply_1q(&l.matrix(), q)?,
            }
        }
        let scale = p.phase().to_complex();
        if scale != ONE {
            for a in &mut self.amps {
                *a *= scale;
            }
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, gate: CliffordGate) -> Result<()> {
        match gate {
            CliffordGate::H(q) => self.apply_1q(&h_matrix(), q),
            CliffordGate::S(q) => self.apply_1q(&phase_matrix(std::f64::consts::FRAC_PI_2), q),
            CliffordGate::Sdg(q) => self.apply_1q(&phase_matrix(-std::f64::consts::FRAC_PI_2), q),
            CliffordGate::X(q) => self.apply_1q(&Pauli::X.matrix(), q),
            CliffordGate::Y(q) => self.apply_1q(&Pauli::Y.matrix(), q),
            CliffordGate::Z(q) => self.apply_1q(&Pauli::Z.matrix(), q),
            CliffordGate::Cnot(a, b) => self.apply_2q(&cnot_matrix(), a, b),
            CliffordGate::Cz(a, b) => self.apply_2q(&cz_matrix(), a, b),
            CliffordGate::Swap(a, b) => self.apply_2q(&swap_matrix(), a, b),
        }
    }

    /// Apply one circuit gate; measurements take the forced branch when set,
    /// otherwise sample from `rng`. Returns Some(outcome) for measurements.
    pub fn apply_gate(&mut self, gate: &Gate, rng: &mut impl Rng) -> Result<Option<u8>> {
        if let Some(c) = gate.as_clifford() {
            self.apply_clifford(c)?;
            return Ok(None);
        }
        match gate {
            Gate::T(q) => self.apply_1q(&phase_matrix(std::f64::consts::FRAC_PI_4), *q)?,
            Gate::Tdg(q) => self.apply_1q(&phase_matrix(-std::f64::consts::FRAC_PI_4), *q)?,
            Gate::Rz(angle, q) => self.apply_1q(&rz_matrix(*angle), *q)?,
            Gate::Ccz(a, b, c) => {
                Error::check_qubit(*a, self.n)?;
                Error::check_qubit(*b, self.n)?;
                Error::check_qubit(*c, self.n)?;
                let mask = self.stride(*a) | self.stride(*b) | self.stride(*c);
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            Gate::Measure { qubit, forced } => {
                let outcome = self.measure_z(*qubit, forced.map(u8::from), rng)?;
                return Ok(Some(outcome));
            }
            Gate::CliffordBlock { qubits, tableau } => {
                for cg in tableau.synthesize()? {
                    let mapped = match cg {
                        CliffordGate::H(q) => CliffordGate::H(qubits[q]),
                        CliffordGate::S(q) => CliffordGate::S(qubits[q]),
                        CliffordGate::Sdg(q) => CliffordGate::Sdg(qubits[q]),
                        CliffordGate::X(q) => CliffordGate::X(qubits[q]),
                        CliffordGate::Y(q) => CliffordGate::Y(qubits[q]),
                        CliffordGate::Z(q) => CliffordGate::Z(qubits[q]),
                        CliffordGate::Cnot(a, b) => CliffordGate::Cnot(qubits[a], qubits[b]),
                        CliffordGate::Cz(a, b) => CliffordGate::Cz(qubits[a], qubits[b]),
                        CliffordGate::Swap(a, b) => CliffordGate::Swap(qubits[a], qubits[b]),
                    };
                    self.apply_clifford(mapped)?;
                }
            }
            _ => unreachable!("clifford gates handled above"),
        }
        Ok(None)
    }

    /// Z measurement of one qubit: project, renormalize, return the bit.
    pub fn measure_z(
        &mut self,
        q: usize,
        forced: Option<u8>,
        rng: &mut impl Rng,
    ) -> Result<u8> {
        Error::check_qubit(q, self.n)?;
        let stride = self.stride(q);
        let p1: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & stride != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / self.norm().powi(2);
        let outcome = match forced {
            Some(v) => {
                let p = if v == 1 { p1 } else { 1.0 - p1 };
                if p < 1e-12 {
                    return Err(Error::ImpossibleOutcome);
                }
                v
            }
            None => u8::from(rng.gen::<f64>() < p1),
        };
        for (i, a) in self.amps.iter_mut().enumerate() {
            let bit = u8::from(i & stride != 0);
            if bit != outcome {
                *a = ZERO;
            }
        }
        self.renormalize();
        Ok(outcome)
    }

    pub fn expectation_pauli(&self, obs: &PauliString) -> Result<f64> {
        if obs.n() != self.n {
            return Err(Error::DimensionMismatch(obs.n(), self.n));
        }
        let mut applied = self.clone();
        applied.apply_pauli(obs)?;
        let mut acc = ZERO;
        for (a, b) in self.amps.iter().zip(&applied.amps) {
            acc += a.conj() * b;
        }
        let denom = self.norm().powi(2);
        debug_assert!(acc.im.abs() / denom.max(1e-300) < 1e-9 || !obs.is_hermitian());
        Ok(acc.re / denom)
    }
}

/// |<a|b>|^2 with both sides normalized: global-phase invariant, in [0, 1].
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch(a.n, b.n));
    }
    let mut acc = ZERO;
    for (x, y) in a.amps.iter().zip(&b.amps) {
        acc += x.conj() * y;
    }
    Ok(acc.norm_sqr() / (a.norm().powi(2) * b.norm().powi(2)))
}

/// Run a circuit densely. `forced_outcomes` overrides sampling per
/// measurement, in encounter order; gate-level forced branches take
/// precedence over sampling but are themselves overridden by the map.
pub fn dense_run(
    circuit: &Circuit,
    forced_outcomes: Option<&[u8]>,
    rng: &mut impl Rng,
) -> Result<(DenseState, Vec<u8>)> {
    let mut state = DenseState::zero_state(circuit.n)?;
    let mut outcomes = Vec::new();
    let mut measure_idx = 0usize;
    for gate in &circuit.gates {
        let gate = match (gate, forced_outcomes) {
            (Gate::Measure { qubit, forced }, Some(map)) => {
                let forced = map
                    .get(measure_idx)
                    .map(|&v| v != 0)
                    .or(*forced);
                Gate::Measure {
                    qubit: *qubit,
                    forced,
                }
            }
            _ => gate.clone(),
        };
        if let Some(outcome) = state.apply_gate(&gate, rng)? {
            outcomes.push(outcome);
            measure_idx += 1;
        }
    }
    Ok((state, outcomes))
}

/// Materialize an STN state: contract the MPS coefficients, build the frame
/// state through gate synthesis, and sum coefficient-weighted destabilizer
/// images.
pub fn stn_to_dense(state: &StnState) -> Result<DenseState> {
    let n = state.n();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::SizeLimit {
            requested: n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let coeffs = state.mps().to_statevector()?;
    // |phi> from the tableau
    let gates = state.tableau().synthesize()?;
    let mut phi = DenseState::zero_state(n)?;
    for g in gates {
        phi.apply_clifford(g)?;
    }
    let mut out = vec![ZERO; 1 << n];
    for (index, coeff) in coeffs.iter().enumerate() {
        if coeff.norm_sqr() < 1e-30 {
            continue;
        }
        let mut sel = RowSelector::empty(n, RowKind::Destabilizer);
        for q in 0..n {
            if index & (1 << (n - 1 - q)) != 0 {
                sel.set(q, true);
            }
        }
        let d = state.tableau().row_product(&sel)?;
        let mut term = phi.clone();
        term.apply_pauli(&d)?;
        for (o, t) in out.iter_mut().zip(&term.amps) {
            *o += coeff * t;
        }
    }
    DenseState::from_amplitudes(n, out)
}

pub fn h_matrix() -> [[Complex64; 2]; 2] {
    let s = 1.0 / 2f64.sqrt();
    [
        [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
    ]
}

/// diag(1, e^{i phi}): S at pi/2, T at pi/4.
pub fn phase_matrix(phi: f64) -> [[Complex64; 2]; 2] {
    [
        [ONE, ZERO],
        [ZERO, Complex64::from_polar(1.0, phi)],
    ]
}

pub fn rz_matrix(angle: f64) -> [[Complex64; 2]; 2] {
    [
        [Complex64::from_polar(1.0, -angle / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, angle / 2.0)],
    ]
}

pub fn cnot_matrix() -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = ONE;
    m[2][3] = ONE;
    m[3][2] = ONE;
    m
}

pub fn cz_matrix() -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = ONE;
    m[2][2] = ONE;
    m[3][3] = -ONE;
    m
}

pub fn swap_matrix() -> [[Complex64; 4]; 4] {
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][2] = ONE;
    m[2][1] = ONE;
    m[3][3] = ONE;
    m
}
