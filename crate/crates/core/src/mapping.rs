//! Fermion-to-qubit mappings: Jordan–Wigner and Bravyi–Kitaev.
//!
//! Both use `|1⟩` for an occupied mode (JW) or an odd stored parity (BK).
//! Single Majoranas map as
//!
//! * JW: `γ_{2p} = Z_{<p} X_p`, `γ_{2p+1} = Z_{<p} Y_p`
//! * BK: `γ_{2j} = X_{U(j)} X_j Z_{P(j)}`, `γ_{2j+1} = X_{U(j)} Y_j Z_{R(j)}`
//!
//! The BK variant is the Fenwick-tree one: qubit `j` stores the parity of
//! occupations in `[j & (j + 1), j]`. `U`, `P`, `F` are the update, parity
//! and flip sets and `R = P \ F`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinatorics::combinations_mask;
use crate::error::{Error, Result};
use crate::majorana::{MajoranaIndex, Phase, MAX_MODES};
use crate::pauli::{Letter, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingKind {
    JordanWigner,
    BravyiKitaev,
}

impl MappingKind {
    pub fn short_name(self) -> &'static str {
        match self {
            MappingKind::JordanWigner => "jw",
            MappingKind::BravyiKitaev => "bk",
        }
    }
}

impl fmt::Display for MappingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MappingKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jw" | "jordan-wigner" | "jordanwigner" => Ok(MappingKind::JordanWigner),
            "bk" | "bravyi-kitaev" | "bravyikitaev" => Ok(MappingKind::BravyiKitaev),
            other => Err(Error::InvalidArgument(format!("unsupported mapping `{other}`"))),
        }
    }
}

/// A mapping on `n` modes with cached single-Majorana images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mapping {
    kind: MappingKind,
    n: usize,
    gammas: Vec<PauliString>,
}

impl Mapping {
    pub fn new(kind: MappingKind, n: usize) -> Result<Self> {
        if n > MAX_MODES {
            return Err(Error::SizeLimit { n, limit: MAX_MODES });
        }
        let gammas = (0..2 * n)
            .map(|w| match kind {
                MappingKind::JordanWigner => jw_gamma(n, w),
                MappingKind::BravyiKitaev => bk_gamma(n, w),
            })
            .collect();
        Ok(Mapping { kind, n, gammas })
    }

    pub fn jordan_wigner(n: usize) -> Result<Self> {
        Self::new(MappingKind::JordanWigner, n)
    }

    pub fn bravyi_kitaev(n: usize) -> Result<Self> {
        Self::new(MappingKind::BravyiKitaev, n)
    }

    pub fn kind(&self) -> MappingKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Pauli image of the single Majorana `γ_w`.
    pub fn gamma(&self, w: usize) -> &PauliString {
        &self.gammas[w]
    }

    fn check(&self, mu: &MajoranaIndex) -> Result<()> {
        if mu.n() != self.n {
            return Err(Error::ModeMismatch { expected: self.n, found: mu.n() });
        }
        Ok(())
    }

    /// Pauli image of `Γ_μ`, including the `(-i)^{C(d,2)}` normalization.
    pub fn to_pauli(&self, mu: &MajoranaIndex) -> Result<PauliString> {
        self.check(mu)?;
        Ok(self.to_pauli_unchecked(mu))
    }

    pub(crate) fn to_pauli_unchecked(&self, mu: &MajoranaIndex) -> PauliString {
        let mut acc = PauliString::identity(self.n);
        let mut m = mu.mask();
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            acc = acc.mul(&self.gammas[w]);
            m &= m - 1;
        }
        let d = mu.degree() as i64;
        acc.with_phase(acc.phase() * Phase::from_exponent(-(d * (d - 1) / 2)))
    }

    pub fn locality(&self, mu: &MajoranaIndex) -> Result<usize> {
        Ok(self.to_pauli(mu)?.locality())
    }

    /// Degree-`2k` monomials whose image is diagonal in the computational basis.
    ///
    /// For both supported mappings these are exactly the products of `k`
    /// distinct mode parities `Γ_{(2p, 2p+1)}`; the result is in colex order.
    pub fn diagonal_set(&self, k: usize) -> Result<Vec<MajoranaIndex>> {
        if k > self.n {
            return Err(Error::DegreeOutOfRange { n: self.n, k });
        }
        Ok(combinations_mask(self.n, k)
            .map(|modes| MajoranaIndex::from_mask(self.n, spread_pairs(modes as u64)))
            .collect())
    }

    pub fn is_diagonal(&self, mu: &MajoranaIndex) -> bool {
        let m = mu.mask();
        // every touched mode must contribute both of its wires
        (m & EVEN_BITS) << 1 == m & !EVEN_BITS
    }

    /// `⟨z|Γ_μ|z⟩ ∈ {-1, 0, 1}`, with `z` a qubit bitstring (qubit `j` = bit `j`).
    pub fn diag_matrix_element(&self, mu: &MajoranaIndex, z: u64) -> Result<i8> {
        self.check(mu)?;
        if !self.is_diagonal(mu) {
            return Ok(0);
        }
        let p = self.to_pauli_unchecked(mu);
        p.diagonal_element(z).ok_or_else(|| Error::InvalidArgument(format!("{mu} has an imaginary diagonal")))
    }

    /// Qubit basis state encoding the occupation vector `occ` (mode `p` = bit `p`).
    pub fn encode_occupation(&self, occ: u64) -> u64 {
        match self.kind {
            MappingKind::JordanWigner => occ,
            MappingKind::BravyiKitaev => (0..self.n).fold(0u64, |acc, j| {
                let lo = j & (j + 1);
                let range = range_mask(lo, j);
                acc | ((((occ & range).count_ones() & 1) as u64) << j)
            }),
        }
    }

    pub fn decode_occupation(&self, bits: u64) -> u64 {
        match self.kind {
            MappingKind::JordanWigner => bits,
            // n_j = b_j xor the parity stored on the flip-set qubits
            MappingKind::BravyiKitaev => (0..self.n).fold(0u64, |acc, j| {
                let occ = ((bits >> j) ^ (bits & flip_set(j)).count_ones() as u64) & 1;
                acc | (occ << j)
            }),
        }
    }
}

const EVEN_BITS: u128 = 0x5555_5555_5555_5555_5555_5555_5555_5555;

/// Mode bitmask -> wire bitmask with both wires of every mode set.
pub(crate) fn spread_pairs(modes: u64) -> u128 {
    let mut out = 0u128;
    let mut m = modes;
    while m != 0 {
        let p = m.trailing_zeros();
        out |= 3u128 << (2 * p);
        m &= m - 1;
    }
    out
}

fn range_mask(lo: usize, hi: usize) -> u64 {
    // bits lo..=hi
    let top = if hi >= 63 { u64::MAX } else { (1u64 << (hi + 1)) - 1 };
    top & !((1u64 << lo) - 1)
}

fn jw_gamma(n: usize, w: usize) -> PauliString {
    let p = w / 2;
    let letter = if w.is_multiple_of(2) { Letter::X } else { Letter::Y };
    let zs = (1u64 << p) - 1;
    PauliString::single(n, p, letter).mul(&PauliString::from_bits(n, 0, zs, Phase::ONE))
}

pub(crate) fn update_set(n: usize, j: usize) -> u64 {
    let mut s = 0u64;
    let mut k = j | (j + 1);
    while k < n {
        s |= 1u64 << k;
        k |= k + 1;
    }
    s
}

pub(crate) fn parity_set(j: usize) -> u64 {
    let mut s = 0u64;
    let mut idx = j as i64 - 1;
    while idx >= 0 {
        s |= 1u64 << idx;
        idx = (idx & (idx + 1)) - 1;
    }
    s
}

pub(crate) fn flip_set(j: usize) -> u64 {
    let lo = (j & (j + 1)) as i64;
    let mut s = 0u64;
    let mut idx = j as i64 - 1;
    while idx >= lo {
        s |= 1u64 << idx;
        idx = (idx & (idx + 1)) - 1;
    }
    s
}

fn bk_gamma(n: usize, w: usize) -> PauliString {
    let j = w / 2;
    let u = update_set(n, j);
    let p = parity_set(j);
    let (x, z) = if w.is_multiple_of(2) { (u | 1u64 << j, p) } else { (u | 1u64 << j, (p & !flip_set(j)) | 1u64 << j) };
    PauliString::from_bits(n, x, z, Phase::ONE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jw_examples() {
        let m = Mapping::jordan_wigner(1).unwrap();
        let g01 = MajoranaIndex::new(1, &[0, 1]).unwrap();
        assert_eq!(m.to_pauli(&g01).unwrap(), PauliString::parse("Z").unwrap());

        let m = Mapping::jordan_wigner(2).unwrap();
        let g0 = MajoranaIndex::new(2, &[0]).unwrap();
        assert_eq!(m.to_pauli(&g0).unwrap(), PauliString::parse("XI").unwrap());
        let g02 = MajoranaIndex::new(2, &[0, 2]).unwrap();
        // -i · X_0 · Z_0 X_1 = -i(XZ) X = -Y X
        assert_eq!(m.to_pauli(&g02).unwrap(), PauliString::parse("-YX").unwrap());
        assert_eq!(m.locality(&g02).unwrap(), 2);

        let m = Mapping::jordan_wigner(3).unwrap();
        let g05 = MajoranaIndex::new(3, &[0, 5]).unwrap();
        assert_eq!(m.locality(&g05).unwrap(), 3);
        assert_eq!(m.locality(&MajoranaIndex::identity(3)).unwrap(), 0);
    }

    #[test]
    fn jw_diagonal_sets() {
        let m = Mapping::jordan_wigner(2).unwrap();
        let d = m.diagonal_set(1).unwrap();
        assert_eq!(d, vec![MajoranaIndex::new(2, &[0, 1]).unwrap(), MajoranaIndex::new(2, &[2, 3]).unwrap()]);
        let m = Mapping::jordan_wigner(4).unwrap();
        let d = m.diagonal_set(2).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.contains(&MajoranaIndex::new(4, &[0, 1, 2, 3]).unwrap()));
    }

    #[test]
    fn diag_elements() {
        let m = Mapping::jordan_wigner(1).unwrap();
        let g01 = MajoranaIndex::new(1, &[0, 1]).unwrap();
        assert_eq!(m.diag_matrix_element(&g01, 0).unwrap(), 1);
        assert_eq!(m.diag_matrix_element(&g01, 1).unwrap(), -1);
        let m = Mapping::jordan_wigner(2).unwrap();
        let g02 = MajoranaIndex::new(2, &[0, 2]).unwrap();
        for z in 0..4 {
            assert_eq!(m.diag_matrix_element(&g02, z).unwrap(), 0);
        }
    }

    #[test]
    fn fenwick_sets() {
        // n = 8: qubit 7 stores the total parity
        assert_eq!(update_set(8, 0), 0b1000_1010);
        assert_eq!(update_set(8, 7), 0);
        assert_eq!(parity_set(0), 0);
        assert_eq!(parity_set(7), 0b0110_1000);
        assert_eq!(flip_set(7), 0b0110_1000);
        assert_eq!(flip_set(5), 0b0001_0000);
        assert_eq!(parity_set(5), 0b0001_1000);
    }

    #[test]
    fn occupation_encoding_roundtrip() {
        for kind in [MappingKind::JordanWigner, MappingKind::BravyiKitaev] {
            let m = Mapping::new(kind, 7).unwrap();
            for occ in 0..128u64 {
                assert_eq!(m.decode_occupation(m.encode_occupation(occ)), occ);
            }
        }
    }

    #[test]
    fn mode_mismatch_is_reported() {
        let m = Mapping::jordan_wigner(2).unwrap();
        let g = MajoranaIndex::new(3, &[0, 1]).unwrap();
        assert!(matches!(m.to_pauli(&g), Err(Error::ModeMismatch { .. })));
        assert!("parity".parse::<MappingKind>().is_err());
    }
}
