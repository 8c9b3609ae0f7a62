//! Bit-packed Pauli strings on up to 64 qubits.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::majorana::Phase;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        match c.to_ascii_uppercase() {
            'I' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }
}

/// `phase · ⊗_j σ_j` with `σ_j` given by the bits `(x_j, z_j)`:
/// `(0,0) = I`, `(1,0) = X`, `(1,1) = Y`, `(0,1) = Z`. Qubit `j` is bit `j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: u8,
    x: u64,
    z: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64);
        PauliString { n: n as u8, x: 0, z: 0, phase: Phase::ONE }
    }

    pub fn from_bits(n: usize, x: u64, z: u64, phase: Phase) -> Self {
        assert!(n <= 64);
        let m = low_mask(n);
        assert!(x & !m == 0 && z & !m == 0, "bits outside {n} qubits");
        PauliString { n: n as u8, x, z, phase }
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        assert!(qubit < n);
        let (x, z) = letter.bits();
        PauliString::from_bits(n, (x as u64) << qubit, (z as u64) << qubit, Phase::ONE)
    }

    /// Parses strings like `XIZY` (qubit 0 first), optionally prefixed by
    /// `+`, `-`, `i`, `+i` or `-i`.
    pub fn parse(s: &str) -> Option<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::ONE, r)
        } else {
            (Phase::ONE, s)
        };
        let n = rest.chars().count();
        if n > 64 {
            return None;
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (j, c) in rest.chars().enumerate() {
            let (bx, bz) = Letter::from_char(c)?.bits();
            x |= (bx as u64) << j;
            z |= (bz as u64) << j;
        }
        Some(PauliString { n: n as u8, x, z, phase })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn letter(&self, qubit: usize) -> Letter {
        match ((self.x >> qubit) & 1, (self.z >> qubit) & 1) {
            (0, 0) => Letter::I,
            (1, 0) => Letter::X,
            (1, 1) => Letter::Y,
            _ => Letter::Z,
        }
    }

    pub fn letters(&self) -> Vec<Letter> {
        (0..self.n()).map(|j| self.letter(j)).collect()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn locality(&self) -> usize {
        self.support().count_ones() as usize
    }

    /// True when only `I` and `Z` letters occur.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        debug_assert_eq!(self.n, other.n);
        // letter form -> X^x Z^z form: Y = i X Z
        let e = self.phase.exponent() as i64
            + other.phase.exponent() as i64
            + self.y_count() as i64
            + other.y_count() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y = (x & z).count_ones() as i64;
        PauliString { n: self.n, x, z, phase: Phase::from_exponent(e - y) }
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `P|b⟩ = coeff · |b'⟩`, returning `(coeff, b')`.
    pub fn apply_to_basis(&self, b: u64) -> (Phase, u64) {
        let e = self.phase.exponent() as i64 + self.y_count() as i64;
        let sign = (self.z & b).count_ones() % 2 == 1;
        (Phase::from_exponent(e) * Phase::from_sign(sign), b ^ self.x)
    }

    /// `⟨b|P|b⟩` as `{-1, 0, 1}`; `None` if the diagonal entry is imaginary.
    pub fn diagonal_element(&self, b: u64) -> Option<i8> {
        if self.x != 0 {
            return Some(0);
        }
        self.apply_to_basis(b).0.as_sign()
    }

    /// Dense `2^n × 2^n` matrix with qubit `j` as bit `j` of the basis index.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        assert!(self.n <= 16, "dense Pauli matrices are capped at 16 qubits");
        let dim = 1usize << self.n;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (c, out) = self.apply_to_basis(b);
            m[(out as usize, b as usize)] = c.to_complex();
        }
        m
    }
}

fn low_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for l in self.letters() {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
