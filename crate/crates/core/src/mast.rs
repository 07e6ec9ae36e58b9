//! Gadgetized execution: every non-Clifford rotation becomes a magic-state
//! injection on a fresh ancilla whose Z-measurement is predetermined to the
//! |0> branch and delayed. All in-circuit work is then Clifford plus free
//! single-site rotations on unentangled ancillas; the simulation cost moves
//! to the final projection sweep, whose order is the schedule.

use std::time::Instant;

use rand::Rng;

use crate::circuits::{Circuit, Gate};
use crate::mps::{BondTrace, TruncationPolicy};
use crate::pauli::{Pauli, PauliString};
use crate::stn::StnState;
use crate::{Error, Result};

/// Correction the gadget would need on the |1> branch; recorded for
/// completeness, never applied because the |0> branch is always forced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Correction {
    SGate,
    SdgGate,
    Rotation(f64),
}

#[derive(Clone, Debug)]
pub struct DeferredProjection {
    /// Absolute qubit index of the gadget ancilla.
    pub ancilla: usize,
    pub correction: Correction,
}

/// A circuit after gadgetization: only Clifford gates, measurements, and
/// single-qubit non-Clifford preparations on fresh unentangled ancillas.
#[derive(Clone, Debug)]
pub struct GadgetizedCircuit {
    pub data_n: usize,
    pub magic_t: usize,
    pub ops: Vec<Gate>,
    pub deferred: Vec<DeferredProjection>,
}

impl GadgetizedCircuit {
    pub fn total_qubits(&self) -> usize {
        self.data_n + self.magic_t
    }
}

/// Replace each T / T† / Rz by a state-injection gadget on the next fresh
/// ancilla; Clifford gates and measurements pass through unchanged.
pub fn gadgetize(circuit: &Circuit) -> Result<GadgetizedCircuit> {
    let data_n = circuit.n;
    let magic_t = circuit
        .gates
        .iter()
        .filter(|g| g.is_non_clifford())
        .count();
    if circuit
        .gates
        .iter()
        .any(|g| matches!(g, Gate::Ccz(_, _, _)))
    {
        return Err(Error::UnsupportedGate(
            "ccz must be expanded into a T decomposition before gadgetizing",
        ));
    }
    let mut ops = Vec::with_capacity(circuit.gates.len() + 2 * magic_t);
    let mut deferred = Vec::with_capacity(magic_t);
    let mut next = data_n;
    for g in &circuit.gates {
        match g {
            Gate::T(q) | Gate::Tdg(q) | Gate::Rz(_, q) => {
                let m = next;
                next += 1;
                ops.push(Gate::H(m));
                let correction = match g {
                    Gate::T(_) => {
                        ops.push(Gate::T(m));
                        Correction::SGate
                    }
                    Gate::Tdg(_) => {
                        ops.push(Gate::Tdg(m));
                        Correction::SdgGate
                    }
                    Gate::Rz(angle, _) => {
                        ops.push(Gate::Rz(*angle, m));
                        Correction::Rotation(2.0 * angle)
                    }
                    _ => unreachable!(),
                };
                ops.push(Gate::Cx(*q, m));
                deferred.push(DeferredProjection {
                    ancilla: m,
                    correction,
                });
            }
            g => ops.push(g.clone()),
        }
    }
    Ok(GadgetizedCircuit {
        data_n,
        magic_t,
        ops,
        deferred,
    })
}

/// Order in which deferred ancilla projections are resolved. Offsets index
/// into the magic register (0 is the first allocated ancilla).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjectionSchedule {
    LeftToRight,
    RightToLeft,
    MiddleOutPairwise,
    Explicit(Vec<usize>),
}

impl ProjectionSchedule {
    pub fn parse(text: &str) -> Result<ProjectionSchedule> {
        match text {
            "left-to-right" => Ok(ProjectionSchedule::LeftToRight),
            "right-to-left" => Ok(ProjectionSchedule::RightToLeft),
            "middle-out-pairwise" => Ok(ProjectionSchedule::MiddleOutPairwise),
            other => Err(Error::InvalidConfig(format!(
                "unknown schedule '{other}'"
            ))),
        }
    }

    /// Concrete permutation of {0, .., t-1}.
    pub fn order(&self, t: usize) -> Result<Vec<usize>> {
        let order = match self {
            ProjectionSchedule::LeftToRight => (0..t).collect(),
            ProjectionSchedule::RightToLeft => (0..t).rev().collect(),
            ProjectionSchedule::MiddleOutPairwise => {
                // pairs (ceil(t/2)-1-j, ceil(t/2)+j) walking outwards
                let mid = t.div_ceil(2);
                let mut order = Vec::with_capacity(t);
                for j in 0..t {
                    if mid > j && mid - 1 - j < t {
                        order.push(mid - 1 - j);
                    }
                    if mid + j < t {
                        order.push(mid + j);
                    }
                    if order.len() >= t {
                        break;
                    }
                }
                order
            }
            ProjectionSchedule::Explicit(order) => order.clone(),
        };
        let mut seen = vec![false; t];
        if order.len() != t {
            return Err(Error::InvalidConfig(format!(
                "schedule covers {} of {t} ancillas",
                order.len()
            )));
        }
        for &o in &order {
            if o >= t || seen[o] {
                return Err(Error::InvalidConfig(
                    "schedule must be a permutation of the magic register".into(),
                ));
            }
            seen[o] = true;
        }
        Ok(order)
    }
}

/// Outcome of one full simulation.
#[derive(Debug)]
pub struct RunResult {
    pub final_state: StnState,
    pub trace: BondTrace,
    pub outcomes: Vec<u8>,
    pub peak_chi: usize,
    pub wall_ms: f64,
}

fn z_obs(n: usize, q: usize) -> Result<PauliString> {
    PauliString::single(n, q, Pauli::Z)
}

/// Force the +1 (|0>) branch of every scheduled ancilla. The |0> branch is
/// exactly the intended gate, so no correction is ever applied.
pub fn resolve_deferred(
    state: &mut StnState,
    gadget: &GadgetizedCircuit,
    schedule: &ProjectionSchedule,
    policy: TruncationPolicy,
    rng: &mut impl Rng,
) -> Result<Vec<i8>> {
    let order = schedule.order(gadget.deferred.len())?;
    let mut outcomes = Vec::with_capacity(order.len());
    for offset in order {
        let ancilla = gadget.deferred[offset].ancilla;
        let obs = z_obs(state.n(), ancilla)?;
        let v = state.measure(&obs, Some(1), rng, policy)?;
        outcomes.push(v);
    }
    Ok(outcomes)
}

/// A measurement whose branch was predetermined and pushed past the end of
/// the gate stream: gadget ancilla projections plus forced data measurements
/// on qubits the circuit never touches again.
struct PendingProjection {
    qubit: usize,
    branch: i8,
    /// Outcome slot for data measurements; None for gadget ancillas.
    slot: Option<usize>,
    /// Number of gadget ancillas allocated before this event; a data
    /// projection fires once that many ancillas are resolved, keeping it
    /// adjacent to the gadget cluster it belongs to.
    prereq_magic: usize,
}

/// Execution plan for measurements inside `run_mast`: a forced measurement on
/// a qubit that is never touched again can be deferred like a gadget
/// projection; anything else must happen in place, after the pending magic
/// projections it does not commute past are resolved.
struct MeasurePlan {
    deferrable: Vec<bool>,
}

fn plan_measures(ops: &[Gate]) -> MeasurePlan {
    let mut deferrable = Vec::new();
    for (i, g) in ops.iter().enumerate() {
        if let Gate::Measure { qubit, forced } = g {
            let touched_later = ops[i + 1..].iter().any(|h| h.qubits().contains(qubit));
            deferrable.push(forced.is_some() && !touched_later);
        }
    }
    MeasurePlan { deferrable }
}

/// Gadgetized execution: Cliffords through the tableau, magic preparations
/// through the free unentangled-rotation path, all projections delayed to the
/// end and resolved in schedule order, data measurements last.
pub fn run_mast(
    circuit: &Circuit,
    schedule: &ProjectionSchedule,
    policy: TruncationPolicy,
    rng: &mut impl Rng,
) -> Result<RunResult> {
    let started = Instant::now();
    let gadget = gadgetize(circuit)?;
    let n = gadget.total_qubits();
    let mut state = StnState::new(n)?;
    let plan = plan_measures(&gadget.ops);
    let mut measure_idx = 0usize;
    let mut allocated_magic = 0usize;
    let mut deferred_data: Vec<PendingProjection> = Vec::new();
    let mut outcome_slots: Vec<Option<u8>> = vec![None; plan.deferrable.len()];
    let mut resolved = false;

    for g in &gadget.ops {
        match g {
            Gate::CliffordBlock { qubits, tableau } => {
                state.apply_clifford_block(tableau, qubits)?;
            }
            Gate::T(q) | Gate::Tdg(q) | Gate::Rz(_, q) => {
                if *q >= gadget.data_n {
                    allocated_magic += 1;
                }
                let angle = match g {
                    Gate::T(_) => std::f64::consts::FRAC_PI_4,
                    Gate::Tdg(_) => -std::f64::consts::FRAC_PI_4,
                    Gate::Rz(a, _) => *a,
                    _ => unreachable!(),
                };
                let axis = z_obs(n, *q)?;
                state.apply_rotation(&axis, angle, policy)?;
            }
            Gate::Measure { qubit, forced } => {
                let slot = measure_idx;
                measure_idx += 1;
                if plan.deferrable[slot] {
                    let branch = if forced == &Some(true) { -1 } else { 1 };
                    deferred_data.push(PendingProjection {
                        qubit: *qubit,
                        branch,
                        slot: Some(slot),
                        prereq_magic: allocated_magic,
                    });
                    continue;
                }
                let forced_value = forced.map(|f| if f { -1 } else { 1 });
                if forced_value.is_none() && !resolved {
                    // sampling must condition on every predetermined branch
                    resolve_all_pending(
                        &mut state,
                        &gadget,
                        schedule,
                        &deferred_data,
                        &mut outcome_slots,
                        policy,
                        rng,
                    )?;
                    deferred_data.clear();
                    resolved = true;
                }
                let obs = z_obs(n, *qubit)?;
                let v = state.measure(&obs, forced_value, rng, policy)?;
                outcome_slots[slot] = Some(u8::from(v == -1));
            }
            g => {
                let c = g
                    .as_clifford()
                    .ok_or(Error::UnsupportedGate("gadgetized stream"))?;
                state.apply_clifford(c)?;
            }
        }
    }
    if !resolved {
        resolve_all_pending(
            &mut state,
            &gadget,
            schedule,
            &deferred_data,
            &mut outcome_slots,
            policy,
            rng,
        )?;
    }
    let outcomes = outcome_slots.into_iter().flatten().collect();
    let peak_chi = state.peak_bond();
    Ok(RunResult {
        trace: state.trace().clone(),
        outcomes,
        peak_chi,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        final_state: state,
    })
}

/// Resolve every predetermined projection: gadget ancillas in schedule
/// order, with each deferred data projection fired as soon as the gadget
/// ancillas allocated before it have all been resolved. This keeps a data
/// projection adjacent to its own gadget cluster instead of leaving its
/// entanglement hanging until the very end.
fn resolve_all_pending(
    state: &mut StnState,
    gadget: &GadgetizedCircuit,
    schedule: &ProjectionSchedule,
    deferred_data: &[PendingProjection],
    outcome_slots: &mut [Option<u8>],
    policy: TruncationPolicy,
    rng: &mut impl Rng,
) -> Result<()> {
    let n = state.n();
    let order = schedule.order(gadget.deferred.len())?;
    let mut resolved_magic = 0usize;
    let mut next_data = 0usize;
    let fire_ready = |state: &mut StnState,
                          resolved_magic: usize,
                          next_data: &mut usize,
                          outcome_slots: &mut [Option<u8>],
                          rng: &mut _|
     -> Result<()> {
        while *next_data < deferred_data.len()
            && deferred_data[*next_data].prereq_magic <= resolved_magic
        {
            let pending = &deferred_data[*next_data];
            let obs = z_obs(n, pending.qubit)?;
            let v = state.measure(&obs, Some(pending.branch), rng, policy)?;
            if let Some(slot) = pending.slot {
                outcome_slots[slot] = Some(u8::from(v == -1));
            }
            *next_data += 1;
        }
        Ok(())
    };
    fire_ready(state, resolved_magic, &mut next_data, outcome_slots, rng)?;
    for offset in order {
        let ancilla = gadget.deferred[offset].ancilla;
        let obs = z_obs(n, ancilla)?;
        state.measure(&obs, Some(1), rng, policy)?;
        resolved_magic += 1;
        fire_ready(state, resolved_magic, &mut next_data, outcome_slots, rng)?;
    }
    debug_assert_eq!(next_data, deferred_data.len());
    Ok(())
}

/// Baseline: non-Clifford rotations applied in place on the MPS, without
/// gadgetization; measurements happen where they stand.
pub fn run_stn(
    circuit: &Circuit,
    policy: TruncationPolicy,
    rng: &mut impl Rng,
) -> Result<RunResult> {
    let started = Instant::now();
    let n = circuit.n;
    let mut state = StnState::new(n)?;
    let mut outcomes = Vec::new();
    for g in &circuit.gates {
        match g {
            Gate::CliffordBlock { qubits, tableau } => {
                state.apply_clifford_block(tableau, qubits)?;
            }
            Gate::T(q) => {
                state.apply_rotation(&z_obs(n, *q)?, std::f64::consts::FRAC_PI_4, policy)?;
            }
            Gate::Tdg(q) => {
                state.apply_rotation(&z_obs(n, *q)?, -std::f64::consts::FRAC_PI_4, policy)?;
            }
            Gate::Rz(angle, q) => {
                state.apply_rotation(&z_obs(n, *q)?, *angle, policy)?;
            }
            Gate::Ccz(_, _, _) => return Err(Error::MultiTermUnsupported),
            Gate::Measure { qubit, forced } => {
                let forced_value = forced.map(|f| if f { -1 } else { 1 });
                let v = state.measure(&z_obs(n, *qubit)?, forced_value, rng, policy)?;
                outcomes.push(u8::from(v == -1));
            }
            g => {
                let c = g
                    .as_clifford()
                    .ok_or(Error::UnsupportedGate("stn stream"))?;
                state.apply_clifford(c)?;
            }
        }
    }
    let peak_chi = state.peak_bond();
    Ok(RunResult {
        trace: state.trace().clone(),
        outcomes,
        peak_chi,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
        final_state: state,
    })
}
