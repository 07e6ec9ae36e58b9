//! Stabilizer/destabilizer tableau with phase-exact Clifford conjugation,
//! generalized Pauli measurement, exactly-uniform random sampling, and
//! synthesis back to {H, S, CNOT} gates.

use rand::Rng;

use crate::pauli::{Pauli, PauliString, Phase};
use crate::{Error, Result};

/// Clifford generators understood by the tableau (and by the MPS and dense
/// backends). Two-qubit operands must be distinct.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q)
            | CliffordGate::S(q)
            | CliffordGate::Sdg(q)
            | CliffordGate::X(q)
            | CliffordGate::Y(q)
            | CliffordGate::Z(q) => vec![q],
            CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) | CliffordGate::Swap(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn inverse(&self) -> CliffordGate {
        match *self {
            CliffordGate::S(q) => CliffordGate::Sdg(q),
            CliffordGate::Sdg(q) => CliffordGate::S(q),
            g => g,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let qs = self.qubits();
        for &q in &qs {
            Error::check_qubit(q, n)?;
        }
        if qs.len() == 2 && qs[0] == qs[1] {
            return Err(Error::DuplicateQubits);
        }
        Ok(())
    }
}

/// Which half of the tableau a selector indexes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RowKind {
    Stabilizer,
    Destabilizer,
}

/// A subset of tableau rows, as a bit vector over row indices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RowSelector {
    bits: Vec<bool>,
    kind: RowKind,
}

impl RowSelector {
    pub fn empty(n: usize, kind: RowKind) -> RowSelector {
        RowSelector {
            bits: vec![false; n],
            kind,
        }
    }

    pub fn from_bits(bits: Vec<bool>, kind: RowKind) -> RowSelector {
        RowSelector { bits, kind }
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn kind(&self) -> RowKind {
        self.kind
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, v: bool) {
        self.bits[j] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    pub fn first_set(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(j, &b)| b.then_some(j))
    }

    /// Symmetric difference, used for rotation supports.
    pub fn xor(&self, other: &RowSelector) -> RowSelector {
        RowSelector {
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| a ^ b)
                .collect(),
            kind: self.kind,
        }
    }
}

/// Outcome of a tableau measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeasureOutcome {
    pub value: i8,
    pub deterministic: bool,
}

/// N stabilizer and N destabilizer generators. Row j of one half
/// anticommutes with row j of the other and commutes with everything else.
#[derive(Clone, PartialEq)]
pub struct StabilizerTableau {
    n: usize,
    stabs: Vec<PauliString>,
    destabs: Vec<PauliString>,
}

impl StabilizerTableau {
    /// Fresh tableau for |0...0>: destabilizer j = X_j, stabilizer j = Z_j.
    pub fn new(n: usize) -> Result<StabilizerTableau> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let stabs = (0..n)
            .map(|j| PauliString::single(n, j, Pauli::Z))
            .collect::<Result<Vec<_>>>()?;
        let destabs = (0..n)
            .map(|j| PauliString::single(n, j, Pauli::X))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilizerTableau { n, stabs, destabs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizer(&self, j: usize) -> &PauliString {
        &self.stabs[j]
    }

    pub fn destabilizer(&self, j: usize) -> &PauliString {
        &self.destabs[j]
    }

    pub fn is_fresh(&self) -> bool {
        StabilizerTableau::new(self.n).map(|f| f == *self).unwrap_or(false)
    }

    /// Conjugate every row by the gate: row -> C row C^dag.
    pub fn apply(&mut self, gate: CliffordGate) -> Result<()> {
        gate.validate(self.n)?;
        for row in self.stabs.iter_mut().chain(self.destabs.iter_mut()) {
            conjugate_row(row, gate);
        }
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[CliffordGate]) -> Result<()> {
        for &g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Phase-exact ordered product of the selected rows (ascending row index).
    pub fn row_product(&self, sel: &RowSelector) -> Result<PauliString> {
        if sel.n() != self.n {
            return Err(Error::DimensionMismatch(sel.n(), self.n));
        }
        let rows = match sel.kind() {
            RowKind::Stabilizer => &self.stabs,
            RowKind::Destabilizer => &self.destabs,
        };
        let mut acc = PauliString::identity(self.n)?;
        for j in sel.indices() {
            acc.mul_assign(&rows[j])?;
        }
        Ok(acc)
    }

    /// Decompose `p` over tableau rows: p = phase * D_d * S_s, where the
    /// destabilizer selector bit j is set iff p anticommutes with stabilizer
    /// row j, and vice versa.
    pub fn decompose(&self, p: &PauliString) -> Result<(RowSelector, RowSelector, Phase)> {
        if p.n() != self.n {
            return Err(Error::DimensionMismatch(p.n(), self.n));
        }
        let mut d = RowSelector::empty(self.n, RowKind::Destabilizer);
        let mut s = RowSelector::empty(self.n, RowKind::Stabilizer);
        for j in 0..self.n {
            d.set(j, !p.commutes(&self.stabs[j])?);
            s.set(j, !p.commutes(&self.destabs[j])?);
        }
        let product = self.row_product(&d)?.mul(&self.row_product(&s)?)?;
        // p = phase * product, so phase = p.phase / product.phase; the
        // symplectic parts must already agree.
        let mut check = product.clone();
        check.set_phase(p.phase());
        if check != *p {
            return Err(Error::ReconstructionMismatch);
        }
        let phase = p.phase().mul(product.phase().conj());
        Ok((d, s, phase))
    }

    /// Measure a Hermitian Pauli observable. Commuting observables give a
    /// deterministic outcome and leave the tableau unchanged; anticommuting
    /// ones update the frame via the row with the lowest anticommuting index.
    pub fn measure(
        &mut self,
        obs: &PauliString,
        forced: Option<i8>,
        rng: &mut impl Rng,
    ) -> Result<MeasureOutcome> {
        if obs.n() != self.n {
            return Err(Error::DimensionMismatch(obs.n(), self.n));
        }
        if !obs.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let anti_stab: Vec<bool> = self
            .stabs
            .iter()
            .map(|s| Ok(!obs.commutes(s)?))
            .collect::<Result<_>>()?;
        if let Some(k) = anti_stab.iter().position(|&b| b) {
            let value = match forced {
                Some(v) if v == 1 || v == -1 => v,
                Some(_) => return Err(Error::OutcomeContradiction),
                None => {
                    if rng.gen::<bool>() {
                        1
                    } else {
                        -1
                    }
                }
            };
            let pivot = self.stabs[k].clone();
            for j in 0..self.n {
                if j != k && anti_stab[j] {
                    self.stabs[j].mul_assign(&pivot)?;
                }
                if j != k && !obs.commutes(&self.destabs[j])? {
                    self.destabs[j].mul_assign(&pivot)?;
                }
            }
            self.destabs[k] = pivot;
            let mut new_stab = obs.clone();
            if value == -1 {
                new_stab.set_phase(new_stab.phase().negate());
            }
            self.stabs[k] = new_stab;
            Ok(MeasureOutcome {
                value,
                deterministic: false,
            })
        } else {
            // obs is in +/- the stabilizer group; reconstruct the sign.
            let mut sel = RowSelector::empty(self.n, RowKind::Stabilizer);
            for j in 0..self.n {
                sel.set(j, !obs.commutes(&self.destabs[j])?);
            }
            let product = self.row_product(&sel)?;
            let sign = obs
                .phase()
                .mul(product.phase().conj())
                .real_sign()
                .ok_or(Error::NonHermitian)?;
            if let Some(f) = forced {
                if f != sign {
                    return Err(Error::OutcomeContradiction);
                }
            }
            Ok(MeasureOutcome {
                value: sign,
                deterministic: true,
            })
        }
    }

    /// Exactly uniform sample over n-qubit Cliffords modulo global phase,
    /// returned as the image tableau of the fresh frame.
    ///
    /// Pairs of rows are drawn by rejection inside the symplectic complement
    /// of the pairs chosen so far, which makes the symplectic part uniform;
    /// uniform row signs complete the group.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<StabilizerTableau> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        let mut destabs: Vec<PauliString> = Vec::with_capacity(n);
        let mut stabs: Vec<PauliString> = Vec::with_capacity(n);

        let random_row = |rng: &mut dyn rand::RngCore| -> Result<PauliString> {
            let mut p = PauliString::identity(n)?;
            for j in 0..n {
                p.set_x_bit(j, rng.gen());
                p.set_z_bit(j, rng.gen());
            }
            Ok(p)
        };
        // Project onto the symplectic complement of the chosen pairs.
        let project = |mut v: PauliString,
                       destabs: &[PauliString],
                       stabs: &[PauliString]|
         -> Result<PauliString> {
            for (d, s) in destabs.iter().zip(stabs) {
                if !v.commutes(s)? {
                    v = xor_letters(&v, d);
                }
                if !v.commutes(d)? {
                    v = xor_letters(&v, s);
                }
            }
            v.set_phase(Phase::PlusOne);
            Ok(v)
        };

        for _ in 0..n {
            let d = loop {
                let v = project(random_row(rng)?, &destabs, &stabs)?;
                if !v.is_identity_letters() {
                    break v;
                }
            };
            let s = loop {
                let v = project(random_row(rng)?, &destabs, &stabs)?;
                if !v.commutes(&d)? {
                    break v;
                }
            };
            destabs.push(d);
            stabs.push(s);
        }
        for row in destabs.iter_mut().chain(stabs.iter_mut()) {
            row.set_phase(if rng.gen::<bool>() {
                Phase::PlusOne
            } else {
                Phase::MinusOne
            });
        }
        Ok(StabilizerTableau { n, stabs, destabs })
    }

    /// Compose a Clifford given as a tableau over a subset of qubits onto this
    /// tableau (the block acts after everything already applied).
    pub fn compose_block(&mut self, block: &StabilizerTableau, qubits: &[usize]) -> Result<()> {
        if block.n != qubits.len() {
            return Err(Error::DimensionMismatch(block.n, qubits.len()));
        }
        let mut seen = vec![false; self.n];
        for &q in qubits {
            Error::check_qubit(q, self.n)?;
            if seen[q] {
                return Err(Error::DuplicateQubits);
            }
            seen[q] = true;
        }
        let embedded_destab: Vec<PauliString> = (0..block.n)
            .map(|i| embed(&block.destabs[i], self.n, qubits))
            .collect::<Result<_>>()?;
        let embedded_stab: Vec<PauliString> = (0..block.n)
            .map(|i| embed(&block.stabs[i], self.n, qubits))
            .collect::<Result<_>>()?;

        for row in self.stabs.iter_mut().chain(self.destabs.iter_mut()) {
            *row = conjugate_by_block(row, qubits, &embedded_destab, &embedded_stab)?;
        }
        Ok(())
    }

    /// Tableau of the inverse Clifford.
    pub fn inverse(&self) -> Result<StabilizerTableau> {
        let gates = self.synthesize()?;
        let mut t = StabilizerTableau::new(self.n)?;
        for g in gates.iter().rev() {
            t.apply(g.inverse())?;
        }
        Ok(t)
    }

    /// Gate sequence over {H, S, CNOT} whose action on a fresh tableau
    /// reproduces this tableau exactly, including row phases.
    pub fn synthesize(&self) -> Result<Vec<CliffordGate>> {
        let mut t = self.clone();
        let n = self.n;
        let mut applied: Vec<CliffordGate> = Vec::new();
        let push = |t: &mut StabilizerTableau, g: CliffordGate, out: &mut Vec<CliffordGate>| {
            t.apply(g).expect("synthesis gates are in range");
            out.push(g);
        };

        for j in 0..n {
            // destabilizer row j -> +/- X_j
            if !(j..n).any(|c| t.destabs[j].x_bit(c)) {
                let c = (j..n)
                    .find(|&c| t.destabs[j].z_bit(c))
                    .ok_or(Error::InvalidTableau("rank-deficient destabilizer"))?;
                push(&mut t, CliffordGate::H(c), &mut applied);
            }
            let c = (j..n)
                .find(|&c| t.destabs[j].x_bit(c))
                .ok_or(Error::InvalidTableau("rank-deficient destabilizer"))?;
            if c != j {
                push(&mut t, CliffordGate::Swap(j, c), &mut applied);
            }
            for c in j + 1..n {
                if t.destabs[j].x_bit(c) {
                    push(&mut t, CliffordGate::Cnot(j, c), &mut applied);
                }
            }
            if (j..n).any(|c| t.destabs[j].z_bit(c)) {
                if !t.destabs[j].z_bit(j) {
                    push(&mut t, CliffordGate::S(j), &mut applied);
                }
                for c in j + 1..n {
                    if t.destabs[j].z_bit(c) {
                        push(&mut t, CliffordGate::Cnot(c, j), &mut applied);
                    }
                }
                push(&mut t, CliffordGate::S(j), &mut applied);
            }
            // stabilizer row j -> +/- Z_j, leaving X_j fixed
            if t.stabs[j].x_bit(j) {
                // sqrt(X): X -> X, Y -> Z
                push(&mut t, CliffordGate::H(j), &mut applied);
                push(&mut t, CliffordGate::S(j), &mut applied);
                push(&mut t, CliffordGate::H(j), &mut applied);
            }
            for c in j + 1..n {
                match t.stabs[j].letter(c) {
                    Pauli::X => push(&mut t, CliffordGate::H(c), &mut applied),
                    Pauli::Y => {
                        push(&mut t, CliffordGate::S(c), &mut applied);
                        push(&mut t, CliffordGate::H(c), &mut applied);
                    }
                    _ => {}
                }
                if t.stabs[j].z_bit(c) {
                    push(&mut t, CliffordGate::Cnot(c, j), &mut applied);
                }
            }
            debug_assert_eq!(t.destabs[j].letters(), x_row_letters(n, j));
            debug_assert_eq!(t.stabs[j].letters(), z_row_letters(n, j));
        }
        for j in 0..n {
            if t.destabs[j].phase() == Phase::MinusOne {
                push(&mut t, CliffordGate::Z(j), &mut applied);
            }
            if t.stabs[j].phase() == Phase::MinusOne {
                push(&mut t, CliffordGate::X(j), &mut applied);
            }
        }
        if !t.is_fresh() {
            return Err(Error::InvalidTableau("synthesis did not reach the fresh frame"));
        }

        // `applied` maps self -> fresh, so self = applied_1^-1 ... applied_k^-1
        // read right-to-left; expand everything into {H, S, CNOT}.
        let mut gates = Vec::new();
        for g in applied.iter().rev() {
            expand_hsc(g.inverse(), &mut gates);
        }
        Ok(gates)
    }

    /// Structural invariants: pairwise commutation pattern and independence.
    pub fn check_invariants(&self) -> Result<()> {
        for j in 0..self.n {
            for k in 0..self.n {
                if !self.stabs[j].commutes(&self.stabs[k])?
                    || !self.destabs[j].commutes(&self.destabs[k])?
                {
                    return Err(Error::InvalidTableau("same-half rows must commute"));
                }
                let anti = !self.destabs[j].commutes(&self.stabs[k])?;
                if anti != (j == k) {
                    return Err(Error::InvalidTableau(
                        "destabilizer j must anticommute with stabilizer j only",
                    ));
                }
                if !self.stabs[j].is_hermitian() || !self.destabs[j].is_hermitian() {
                    return Err(Error::InvalidTableau("rows must carry real phases"));
                }
            }
        }
        if symplectic_rank(self) != 2 * self.n {
            return Err(Error::InvalidTableau("rows are not independent"));
        }
        Ok(())
    }
}

impl std::fmt::Debug for StabilizerTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "StabilizerTableau(n={})", self.n)?;
        for j in 0..self.n {
            writeln!(f, "  D{j}: {}   S{j}: {}", self.destabs[j], self.stabs[j])?;
        }
        Ok(())
    }
}

/// XOR of symplectic parts only; phases untouched (used while building random
/// symplectic bases, where signs are assigned at the end).
fn xor_letters(a: &PauliString, b: &PauliString) -> PauliString {
    let mut out = a.clone();
    for j in 0..a.n() {
        out.set_x_bit(j, a.x_bit(j) ^ b.x_bit(j));
        out.set_z_bit(j, a.z_bit(j) ^ b.z_bit(j));
    }
    out
}

fn x_row_letters(n: usize, j: usize) -> Vec<Pauli> {
    (0..n).map(|c| if c == j { Pauli::X } else { Pauli::I }).collect()
}

fn z_row_letters(n: usize, j: usize) -> Vec<Pauli> {
    (0..n).map(|c| if c == j { Pauli::Z } else { Pauli::I }).collect()
}

fn expand_hsc(g: CliffordGate, out: &mut Vec<CliffordGate>) {
    match g {
        CliffordGate::H(_) | CliffordGate::S(_) | CliffordGate::Cnot(_, _) => out.push(g),
        CliffordGate::Sdg(q) => out.extend([CliffordGate::S(q); 3]),
        CliffordGate::Z(q) => out.extend([CliffordGate::S(q); 2]),
        CliffordGate::X(q) => out.extend([
            CliffordGate::H(q),
            CliffordGate::S(q),
            CliffordGate::S(q),
            CliffordGate::H(q),
        ]),
        CliffordGate::Y(q) => {
            expand_hsc(CliffordGate::Z(q), out);
            expand_hsc(CliffordGate::X(q), out);
        }
        CliffordGate::Swap(a, b) => out.extend([
            CliffordGate::Cnot(a, b),
            CliffordGate::Cnot(b, a),
            CliffordGate::Cnot(a, b),
        ]),
        CliffordGate::Cz(a, b) => out.extend([
            CliffordGate::H(b),
            CliffordGate::Cnot(a, b),
            CliffordGate::H(b),
        ]),
    }
}

/// Rank over GF(2) of the 2n x 2n symplectic bit matrix.
fn symplectic_rank(t: &StabilizerTableau) -> usize {
    let n = t.n;
    let mut rows: Vec<Vec<bool>> = Vec::with_capacity(2 * n);
    for p in t.destabs.iter().chain(t.stabs.iter()) {
        let mut r = Vec::with_capacity(2 * n);
        for j in 0..n {
            r.push(p.x_bit(j));
        }
        for j in 0..n {
            r.push(p.z_bit(j));
        }
        rows.push(r);
    }
    let mut rank = 0;
    for col in 0..2 * n {
        if let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) {
            rows.swap(rank, pivot);
            for r in 0..rows.len() {
                if r != rank && rows[r][col] {
                    let (head, tail) = rows.split_at_mut(rank.max(r));
                    let (a, b) = if r > rank {
                        (&head[rank], &mut tail[0])
                    } else {
                        (&tail[0], &mut head[r])
                    };
                    for c in 0..2 * n {
                        b[c] ^= a[c];
                    }
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Conjugation action of a single gate on a Pauli row, exact phases.
fn conjugate_row(row: &mut PauliString, gate: CliffordGate) {
    let mut flip = false;
    match gate {
        CliffordGate::H(q) => {
            let (x, z) = (row.x_bit(q), row.z_bit(q));
            flip = x && z;
            row.set_x_bit(q, z);
            row.set_z_bit(q, x);
        }
        CliffordGate::S(q) => {
            let (x, z) = (row.x_bit(q), row.z_bit(q));
            flip = x && z;
            row.set_z_bit(q, z ^ x);
        }
        CliffordGate::Sdg(q) => {
            let (x, z) = (row.x_bit(q), row.z_bit(q));
            flip = x && !z;
            row.set_z_bit(q, z ^ x);
        }
        CliffordGate::X(q) => flip = row.z_bit(q),
        CliffordGate::Y(q) => flip = row.x_bit(q) ^ row.z_bit(q),
        CliffordGate::Z(q) => flip = row.x_bit(q),
        CliffordGate::Cnot(a, b) => {
            let (xa, za) = (row.x_bit(a), row.z_bit(a));
            let (xb, zb) = (row.x_bit(b), row.z_bit(b));
            flip = xa && zb && (xb == za);
            row.set_x_bit(b, xb ^ xa);
            row.set_z_bit(a, za ^ zb);
        }
        CliffordGate::Cz(a, b) => {
            let (xa, za) = (row.x_bit(a), row.z_bit(a));
            let (xb, zb) = (row.x_bit(b), row.z_bit(b));
            flip = xa && xb && (za ^ zb);
            row.set_z_bit(b, zb ^ xa);
            row.set_z_bit(a, za ^ xb);
        }
        CliffordGate::Swap(a, b) => {
            let (xa, za) = (row.x_bit(a), row.z_bit(a));
            let (xb, zb) = (row.x_bit(b), row.z_bit(b));
            row.set_x_bit(a, xb);
            row.set_z_bit(a, zb);
            row.set_x_bit(b, xa);
            row.set_z_bit(b, za);
        }
    }
    if flip {
        row.set_phase(row.phase().negate());
    }
}

/// Lift a Pauli over `qubits` into the full register.
fn embed(p: &PauliString, n: usize, qubits: &[usize]) -> Result<PauliString> {
    let mut out = PauliString::identity(n)?;
    out.set_phase(p.phase());
    for (i, &q) in qubits.iter().enumerate() {
        out.set_letter(q, p.letter(i));
    }
    Ok(out)
}

/// Conjugate an arbitrary row by a Clifford block known through its row
/// images. The row is split as phase * i^{#Y in block} * prod X^x Z^z over the
/// block columns; each X_q / Z_q is then replaced by its image.
fn conjugate_by_block(
    row: &PauliString,
    qubits: &[usize],
    img_x: &[PauliString],
    img_z: &[PauliString],
) -> Result<PauliString> {
    let _ = row.n();
    let mut rest = row.clone();
    let mut y_count = 0i64;
    for &q in qubits {
        if row.x_bit(q) && row.z_bit(q) {
            y_count += 1;
        }
        rest.set_letter(q, Pauli::I);
    }
    rest.set_phase(row.phase().mul(Phase::from_exponent(y_count)));
    let mut acc = rest;
    for (i, &q) in qubits.iter().enumerate() {
        if row.x_bit(q) {
            acc.mul_assign(&img_x[i])?;
        }
        if row.z_bit(q) {
            acc.mul_assign(&img_z[i])?;
        }
    }
    Ok(acc)
}
