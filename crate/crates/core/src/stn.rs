//! The hybrid state: a stabilizer frame (tableau) paired with an MPS of
//! coefficients over that frame. Clifford gates touch only the tableau;
//! non-Clifford rotations become two-term operators on the MPS; projective
//! measurement updates both halves against the same pivot row.
//!
//! The frame map sends a product of destabilizer rows D_d and stabilizer
//! rows S_s to the coefficient-space Pauli X_d Z_s: destabilizer factors flip
//! frame-basis bits, stabilizer factors flip signs. All phase bookkeeping
//! runs through exact Pauli multiplication.

use rand::Rng;

use crate::mps::{BondTrace, MatrixProductState, TruncationPolicy};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::tableau::{CliffordGate, RowSelector, StabilizerTableau};
use crate::{Error, Result};

/// Two-term operator U = c1 D_{d1} S_{s1} + c2 D_{d2} S_{s2}, with
/// c1 = cos(theta) and c2 = e^{i alpha} sin(theta).
#[derive(Clone, Debug)]
pub struct TwoTermDecomposition {
    pub theta: f64,
    pub alpha: f64,
    pub d1: RowSelector,
    pub s1: RowSelector,
    pub d2: RowSelector,
    pub s2: RowSelector,
    /// (-1)^{d1.(s1+s2)} relating D2 S2 S1 D1 to D2 D1 S2 S1.
    pub sign: i8,
    /// Tableau revision this decomposition was built against.
    stamp: u64,
}

/// Frame data for a projective measurement of O = alpha_phase * D_a * S_b:
/// k is the pivot row (first set destabilizer-selector bit) and
/// `mps_operator` is the coefficient-space image of O.
#[derive(Clone, Debug)]
pub struct ProjectionFrame {
    pub k: usize,
    pub a_bits: RowSelector,
    pub b_bits: RowSelector,
    pub alpha_phase: Phase,
    pub mps_operator: PauliString,
}

/// Tableau + MPS pair with bond-dimension instrumentation.
#[derive(Clone, Debug)]
pub struct StnState {
    tableau: StabilizerTableau,
    mps: MatrixProductState,
    trace: BondTrace,
    step: u64,
    revision: u64,
}

impl StnState {
    /// |0...0>: fresh tableau, product MPS.
    pub fn new(n: usize) -> Result<StnState> {
        Ok(StnState {
            tableau: StabilizerTableau::new(n)?,
            mps: MatrixProductState::zero_state(n)?,
            trace: BondTrace::new(),
            step: 0,
            revision: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.tableau.n()
    }

    pub fn tableau(&self) -> &StabilizerTableau {
        &self.tableau
    }

    pub fn mps(&self) -> &MatrixProductState {
        &self.mps
    }

    pub fn trace(&self) -> &BondTrace {
        &self.trace
    }

    pub fn max_bond(&self) -> usize {
        self.mps.max_bond()
    }

    pub fn peak_bond(&self) -> usize {
        self.trace.peak().max(self.mps.max_bond())
    }

    fn record_bond(&mut self) {
        self.step += 1;
        let chi = self.mps.max_bond();
        self.trace.record(self.step, chi);
    }

    /// Clifford gates conjugate the frame and leave the MPS untouched.
    pub fn apply_clifford(&mut self, gate: CliffordGate) -> Result<()> {
        self.tableau.apply(gate)?;
        self.revision += 1;
        Ok(())
    }

    /// Compose a whole Clifford tableau over a subset of qubits.
    pub fn apply_clifford_block(
        &mut self,
        block: &StabilizerTableau,
        qubits: &[usize],
    ) -> Result<()> {
        self.tableau.compose_block(block, qubits)?;
        self.revision += 1;
        Ok(())
    }

    /// Coefficient-space image of D_d * S_s with exact phase: the product of
    /// X letters on the destabilizer selector and Z letters on the stabilizer
    /// selector, multiplied in operator order.
    fn frame_pauli(&self, d: &RowSelector, s: &RowSelector) -> Result<PauliString> {
        let n = self.n();
        let mut x_part = PauliString::identity(n)?;
        for j in d.indices() {
            x_part.set_letter(j, Pauli::X);
        }
        let mut z_part = PauliString::identity(n)?;
        for j in s.indices() {
            z_part.set_letter(j, Pauli::Z);
        }
        x_part.mul(&z_part)
    }

    /// Decompose exp(-i angle/2 axis) = cos(angle/2) I - i sin(angle/2) axis
    /// into tableau rows. Covers T (axis Z, angle pi/4) and arbitrary Rz.
    pub fn decompose_rotation(
        &self,
        axis: &PauliString,
        angle: f64,
    ) -> Result<TwoTermDecomposition> {
        if axis.n() != self.n() {
            return Err(Error::DimensionMismatch(axis.n(), self.n()));
        }
        if !axis.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        if axis.is_identity_letters() {
            return Err(Error::IdentityAxis);
        }
        let identity = PauliString::identity(self.n())?;
        let (d1, s1, phase1) = self.tableau.decompose(&identity)?;
        let (d2, s2, phase2) = self.tableau.decompose(axis)?;
        debug_assert_eq!(phase1, Phase::PlusOne);
        let c1 = num_complex::Complex64::new((angle / 2.0).cos(), 0.0);
        let c2 = num_complex::Complex64::new(0.0, -(angle / 2.0).sin()) * phase2.to_complex();
        // c1 is real by construction; theta, alpha with c1 = cos(theta),
        // c2 = e^{i alpha} sin(theta)
        let theta = c2.norm().atan2(c1.re);
        let alpha = if c2.norm() > 0.0 { c2.arg() } else { 0.0 };
        let sign = {
            let mut dot = 0usize;
            for j in d1.indices() {
                if s1.bit(j) ^ s2.bit(j) {
                    dot += 1;
                }
            }
            if dot.is_multiple_of(2) {
                1
            } else {
                -1
            }
        };
        Ok(TwoTermDecomposition {
            theta,
            alpha,
            d1,
            s1,
            d2,
            s2,
            sign,
            stamp: self.revision,
        })
    }

    /// Apply a previously built two-term decomposition to the MPS. The
    /// tableau is unchanged; the decomposition must have been built against
    /// the current tableau.
    pub fn apply_nonclifford(
        &mut self,
        dec: &TwoTermDecomposition,
        policy: TruncationPolicy,
    ) -> Result<()> {
        if dec.stamp != self.revision {
            return Err(Error::StaleDecomposition);
        }
        // U = (c1 I + c2 D2 S2 S1 D1) * (D1 S1); the right factor is a frame
        // Pauli on the MPS, the left factor a two-term rotation.
        let right = self.frame_pauli(&dec.d1, &dec.s1)?;
        if !right.is_identity_letters() || right.phase() != Phase::PlusOne {
            self.mps.apply_pauli(&right)?;
        }
        let p2 = self.frame_pauli(&dec.d2, &dec.s2)?;
        let p1 = self.frame_pauli(&dec.d1, &dec.s1)?;
        let axis = p2.mul(&p1.adjoint())?;
        if axis.is_identity_letters() {
            // both terms share letters: U is diagonal in the frame basis and
            // acts as the scalar two-term combination on each component
            return Err(Error::IdentityAxis);
        }
        self.mps
            .apply_pauli_rotation(&axis, dec.theta, dec.alpha, policy)?;
        self.record_bond();
        Ok(())
    }

    /// Convenience: decompose and apply exp(-i angle/2 axis).
    pub fn apply_rotation(
        &mut self,
        axis: &PauliString,
        angle: f64,
        policy: TruncationPolicy,
    ) -> Result<()> {
        let dec = self.decompose_rotation(axis, angle)?;
        self.apply_nonclifford(&dec, policy)
    }

    /// Build the projection frame for a Hermitian Pauli observable.
    pub fn projection_frame(&self, obs: &PauliString) -> Result<ProjectionFrame> {
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let (a_bits, b_bits, alpha_phase) = self.tableau.decompose(obs)?;
        let mut mps_operator = self.frame_pauli(&a_bits, &b_bits)?;
        mps_operator.set_phase(mps_operator.phase().mul(alpha_phase));
        if !mps_operator.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        Ok(ProjectionFrame {
            k: a_bits.first_set().unwrap_or(0),
            a_bits,
            b_bits,
            alpha_phase,
            mps_operator,
        })
    }

    /// <psi|obs|psi> through the single-term frame decomposition.
    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        let frame = self.projection_frame(obs)?;
        let value = self.mps.expectation_pauli(&frame.mps_operator)?;
        debug_assert!(value.im.abs() < 1e-9, "expectation must be real");
        Ok(value.re)
    }

    /// Projective measurement of a Hermitian Pauli. The outcome is sampled
    /// from the MPS expectation unless forced. Both halves update: the MPS by
    /// the two-term operator (I + p M)/sqrt(2) followed by a |0> projection
    /// at the pivot site, the tableau by the standard row update with the
    /// same pivot and outcome.
    pub fn measure(
        &mut self,
        obs: &PauliString,
        forced: Option<i8>,
        rng: &mut impl Rng,
        policy: TruncationPolicy,
    ) -> Result<i8> {
        let frame = self.projection_frame(obs)?;
        let exp = self.mps.expectation_pauli(&frame.mps_operator)?.re;
        let outcome = match forced {
            Some(v) if v == 1 || v == -1 => v,
            Some(_) => return Err(Error::OutcomeContradiction),
            None => {
                let p_plus = ((1.0 + exp) / 2.0).clamp(0.0, 1.0);
                if rng.gen::<f64>() < p_plus {
                    1
                } else {
                    -1
                }
            }
        };
        let branch_probability = (1.0 + f64::from(outcome) * exp) / 2.0;
        if branch_probability < 1e-12 {
            return Err(Error::ImpossibleOutcome);
        }
        let alpha = if outcome == 1 { 0.0 } else { std::f64::consts::PI };
        if frame.a_bits.is_empty() {
            // obs is (up to sign) in the stabilizer group: the frame stays
            // put and the projector is diagonal on the coefficients
            self.mps.apply_pauli_rotation(
                &frame.mps_operator,
                std::f64::consts::FRAC_PI_4,
                alpha,
                policy,
            )?;
            self.mps.renormalize();
        } else {
            self.mps.apply_pauli_rotation(
                &frame.mps_operator,
                std::f64::consts::FRAC_PI_4,
                alpha,
                policy,
            )?;
            self.mps.project_site(frame.k, 0, true)?;
            let tableau_outcome = self.tableau.measure(obs, Some(outcome), rng)?;
            debug_assert!(!tableau_outcome.deterministic);
            self.revision += 1;
        }
        self.record_bond();
        Ok(outcome)
    }
}
