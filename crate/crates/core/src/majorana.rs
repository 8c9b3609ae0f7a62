//! Majorana monomials `Γ_μ = (-i)^{C(d,2)} γ_{μ_1} ⋯ γ_{μ_d}` indexed by sorted
//! tuples drawn from `0..2n`.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;

use crate::combinatorics::{combinations_mask, mask_to_indices};
use crate::error::{Error, Result};

/// Largest mode count supported by the bit-packed index representation.
pub const MAX_MODES: usize = 64;

/// A fourth root of unity `i^e`, stored as the exponent `e mod 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(e: i64) -> Phase {
        Phase(e.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn from_sign(negative: bool) -> Phase {
        if negative {
            Phase::MINUS_ONE
        } else {
            Phase::ONE
        }
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `±1` for real phases, `None` otherwise.
    pub fn as_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl std::ops::MulAssign for Phase {
    fn mul_assign(&mut self, rhs: Phase) {
        *self = *self * rhs;
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self * Phase::MINUS_ONE
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// Exponent of `-i` in the normalization of a degree-`d` monomial.
fn norm_exponent(d: u32) -> i64 {
    let d = d as i64;
    d * (d - 1) / 2
}

/// Sorted set of Majorana wires on `n` modes, stored as a bitmask over `0..2n`.
///
/// Ordering is by degree, then colex rank within the degree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MajoranaIndex {
    n: u8,
    mask: u128,
}

impl MajoranaIndex {
    pub fn new(n: usize, indices: &[usize]) -> Result<Self> {
        if n > MAX_MODES {
            return Err(Error::SizeLimit { n, limit: MAX_MODES });
        }
        crate::combinatorics::validate_combination(2 * n, indices)?;
        let mask = indices.iter().fold(0u128, |m, &i| m | (1u128 << i));
        Ok(MajoranaIndex { n: n as u8, mask })
    }

    /// Builds from an arbitrary-order sequence of distinct wires, returning the
    /// sign of the permutation that sorts it (`+1` or `-1`).
    pub fn from_unsorted(n: usize, wires: &[usize]) -> Result<(i8, Self)> {
        if n > MAX_MODES {
            return Err(Error::SizeLimit { n, limit: MAX_MODES });
        }
        let mut mask = 0u128;
        for &w in wires {
            if w >= 2 * n || mask & (1u128 << w) != 0 {
                return Err(Error::InvalidCombination(wires.to_vec()));
            }
            mask |= 1u128 << w;
        }
        Ok((sorting_sign(wires), MajoranaIndex { n: n as u8, mask }))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_MODES);
        MajoranaIndex { n: n as u8, mask: 0 }
    }

    pub(crate) fn from_mask(n: usize, mask: u128) -> Self {
        debug_assert!(n <= MAX_MODES);
        debug_assert!(2 * n == 128 || mask >> (2 * n) == 0);
        MajoranaIndex { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u128 {
        self.mask
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.mask == 0
    }

    pub fn indices(&self) -> Vec<usize> {
        mask_to_indices(self.mask)
    }

    pub fn contains(&self, wire: usize) -> bool {
        wire < 128 && self.mask & (1u128 << wire) != 0
    }

    /// Modes touched by this monomial (wire `w` belongs to mode `w / 2`).
    pub fn modes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for w in self.indices() {
            let p = w / 2;
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        out
    }

    /// `Γ_a · Γ_b = phase · Γ_result`.
    pub fn product(&self, other: &MajoranaIndex) -> (Phase, MajoranaIndex) {
        debug_assert_eq!(self.n, other.n);
        // sign from moving each γ of `other` left past the larger γ's of `self`
        let mut swaps: u32 = 0;
        let mut b = other.mask;
        while b != 0 {
            let j = b.trailing_zeros();
            let above = if j >= 127 { 0 } else { self.mask >> (j + 1) };
            swaps += above.count_ones();
            b &= b - 1;
        }
        let result = self.mask ^ other.mask;
        let exp = norm_exponent(self.mask.count_ones()) + norm_exponent(other.mask.count_ones())
            - norm_exponent(result.count_ones());
        // (-i)^exp * (-1)^swaps
        let phase = Phase::from_exponent(-exp) * Phase::from_sign(swaps % 2 == 1);
        (phase, MajoranaIndex { n: self.n, mask: result })
    }

    /// All monomials of degree `d` on `n` modes, in colex order.
    pub fn all_of_degree(n: usize, d: usize) -> impl Iterator<Item = MajoranaIndex> {
        assert!(n <= MAX_MODES);
        combinations_mask(2 * n, d).map(move |mask| MajoranaIndex { n: n as u8, mask })
    }

    /// All even-degree monomials with degree in `2..=2k`.
    pub fn even_up_to(n: usize, k: usize) -> Vec<MajoranaIndex> {
        (1..=k).flat_map(|j| Self::all_of_degree(n, 2 * j)).collect()
    }
}

/// `(-1)^{inversions}` of a sequence of distinct values.
pub fn sorting_sign(seq: &[usize]) -> i8 {
    let mut inv = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl PartialOrd for MajoranaIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MajoranaIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then(self.degree().cmp(&other.degree())).then(self.mask.cmp(&other.mask))
    }
}

impl fmt::Debug for MajoranaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Γ{}", self)
    }
}

impl fmt::Display for MajoranaIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.indices();
        write!(f, "(")?;
        for (i, x) in idx.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}
