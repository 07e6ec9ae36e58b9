//! Phase-exact Pauli strings in symplectic (X-bits, Z-bits) form.
//!
//! Rows are packed into machine words so that multiplication and commutation
//! checks are word-parallel; the phase is tracked separately as a power of i.

use num_complex::Complex64;

use crate::{Error, Result};

/// One of the four phase units {+1, +i, -1, -i}, stored as the exponent of i.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: i64) -> Phase {
        match k.rem_euclid(4) {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() as i64 + other.exponent() as i64)
    }

    pub fn conj(self) -> Phase {
        Phase::from_exponent(-(self.exponent() as i64))
    }

    pub fn negate(self) -> Phase {
        self.mul(Phase::MinusOne)
    }

    pub fn is_real(self) -> bool {
        matches!(self, Phase::PlusOne | Phase::MinusOne)
    }

    /// Sign for a real phase: +1 or -1.
    pub fn real_sign(self) -> Option<i8> {
        match self {
            Phase::PlusOne => Some(1),
            Phase::MinusOne => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::PlusOne => write!(f, "+"),
            Phase::PlusI => write!(f, "+i"),
            Phase::MinusOne => write!(f, "-"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// 2x2 matrix in the computational basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

const WORD_BITS: usize = 64;

fn word_count(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

fn get_bit(words: &[u64], j: usize) -> bool {
    (words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
}

fn set_bit(words: &mut [u64], j: usize, v: bool) {
    let mask = 1u64 << (j % WORD_BITS);
    if v {
        words[j / WORD_BITS] |= mask;
    } else {
        words[j / WORD_BITS] &= !mask;
    }
}

/// A phase-tracked N-qubit Pauli operator.
///
/// The letter at site j is determined by the bit pair (x[j], z[j]):
/// (0,0) I, (1,0) X, (1,1) Y, (0,1) Z. The operator represented is
/// `phase * prod_j letter_j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Result<PauliString> {
        if n == 0 {
            return Err(Error::EmptyRegister);
        }
        Ok(PauliString {
            n,
            x: vec![0; word_count(n)],
            z: vec![0; word_count(n)],
            phase: Phase::PlusOne,
        })
    }

    /// Single-letter Pauli at one site, phase +1.
    pub fn single(n: usize, site: usize, letter: Pauli) -> Result<PauliString> {
        Error::check_qubit(site, n)?;
        let mut p = PauliString::identity(n)?;
        p.set_letter(site, letter);
        Ok(p)
    }

    /// Parse a label like "XIZ", "-YY" or "+iXZ" (leftmost letter is qubit 0).
    pub fn from_label(label: &str) -> Result<PauliString> {
        let mut rest = label;
        let mut phase = Phase::PlusOne;
        for (pre, ph) in [
            ("+i", Phase::PlusI),
            ("-i", Phase::MinusI),
            ("+", Phase::PlusOne),
            ("-", Phase::MinusOne),
        ] {
            if let Some(tail) = rest.strip_prefix(pre) {
                phase = ph;
                rest = tail;
                break;
            }
        }
        if rest.is_empty() {
            return Err(Error::EmptyRegister);
        }
        let mut p = PauliString::identity(rest.len())?;
        p.phase = phase;
        for (j, c) in rest.chars().enumerate() {
            let letter = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("invalid Pauli letter '{c}'"),
                    })
                }
            };
            p.set_letter(j, letter);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    pub fn x_bit(&self, j: usize) -> bool {
        get_bit(&self.x, j)
    }

    pub fn z_bit(&self, j: usize) -> bool {
        get_bit(&self.z, j)
    }

    pub fn set_x_bit(&mut self, j: usize, v: bool) {
        set_bit(&mut self.x, j, v);
    }

    pub fn set_z_bit(&mut self, j: usize, v: bool) {
        set_bit(&mut self.z, j, v);
    }

    pub fn letter(&self, j: usize) -> Pauli {
        Pauli::from_bits(self.x_bit(j), self.z_bit(j))
    }

    pub fn set_letter(&mut self, j: usize, letter: Pauli) {
        let (x, z) = letter.bits();
        self.set_x_bit(j, x);
        self.set_z_bit(j, z);
    }

    pub fn is_identity_letters(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    /// Sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.letter(j) != Pauli::I).collect()
    }

    pub fn weight(&self) -> usize {
        let mut w = 0;
        for k in 0..self.x.len() {
            w += (self.x[k] | self.z[k]).count_ones() as usize;
        }
        w
    }

    /// Hermitian Paulis square to the identity and carry a real phase.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// True iff the two operators commute.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let mut acc = 0u32;
        for k in 0..self.x.len() {
            acc ^= (self.x[k] & other.z[k]).count_ones() & 1;
            acc ^= (self.z[k] & other.x[k]).count_ones() & 1;
        }
        Ok(acc & 1 == 0)
    }

    /// Phase-exact product `self * other` (operator composition).
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        // Per-site exponent of i from letter products. Cyclic pairs
        // (X,Y),(Y,Z),(Z,X) contribute +1, anticyclic pairs -1.
        let mut plus = 0i64;
        let mut minus = 0i64;
        let mut x = vec![0u64; self.x.len()];
        let mut z = vec![0u64; self.z.len()];
        for k in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[k], self.z[k], other.x[k], other.z[k]);
            let cyc = (x1 & !z1 & x2 & z2) | (x1 & z1 & !x2 & z2) | (!x1 & z1 & x2 & !z2);
            let acyc = (x1 & z1 & x2 & !z2) | (!x1 & z1 & x2 & z2) | (x1 & !z1 & !x2 & z2);
            plus += cyc.count_ones() as i64;
            minus += acyc.count_ones() as i64;
            x[k] = x1 ^ x2;
            z[k] = z1 ^ z2;
        }
        let phase = Phase::from_exponent(
            self.phase.exponent() as i64 + other.phase.exponent() as i64 + plus - minus,
        );
        Ok(PauliString {
            n: self.n,
            x,
            z,
            phase,
        })
    }

    pub fn adjoint(&self) -> PauliString {
        let mut p = self.clone();
        // letters are Hermitian; only the scalar conjugates
        p.phase = self.phase.conj();
        p
    }

    /// In-place `self *= other`, used by tableau row updates.
    pub fn mul_assign(&mut self, other: &PauliString) -> Result<()> {
        *self = self.mul(other)?;
        Ok(())
    }

    /// Dense 2^n x 2^n matrix action on a state vector index (test helper for
    /// small n lives in the dense module; here we only expose letters/phase).
    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n).map(|j| self.letter(j)).collect()
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.phase)?;
        if self.phase.is_real() {
            write!(f, " ")?;
        }
        for j in 0..self.n {
            write!(
                f,
                "{}",
                match self.letter(j) {
                    Pauli::I => 'I',
                    Pauli::X => 'X',
                    Pauli::Y => 'Y',
                    Pauli::Z => 'Z',
                }
            )?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PauliString({self})")
    }
}
