//! Measurement-setting groups: `Alt(2n)` on Majorana wires and
//! `(Alt(n), basis letters)` for the number-conserving ensemble.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::MajoranaIndex;
use crate::pauli::Letter;

/// `true` if the image array is a bijection on `0..len`.
pub fn is_bijection(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x >= p.len() || seen[x] {
            return false;
        }
        seen[x] = true;
    }
    true
}

/// `true` for even permutations. Assumes a bijection.
pub fn is_even(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut cycles = 0;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        cycles += 1;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
        }
    }
    (p.len() - cycles).is_multiple_of(2)
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (j, &x) in p.iter().enumerate() {
        inv[x] = j;
    }
    inv
}

/// `(a ∘ b)(j) = a(b(j))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Uniform element of `Alt(d)`: uniform shuffle, then swap the first two
/// images if the result is odd.
pub fn sample_alt<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Vec<usize>> {
    if d == 0 {
        return Err(Error::InvalidArgument("Alt(0) is not a valid setting group".into()));
    }
    let mut p: Vec<usize> = (0..d).collect();
    p.shuffle(rng);
    if d >= 2 && !is_even(&p) {
        p.swap(0, 1);
    }
    Ok(p)
}

/// All elements of `Alt(d)` in lexicographic order of image arrays.
pub fn alternating_group(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..d).collect();
    loop {
        if is_even(&p) {
            out.push(p.clone());
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// An element `Q ∈ Alt(2n)` acting on Majorana wires, `Q_{π(j), j} = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PermSetting {
    pi: Vec<usize>,
}

impl TryFrom<Vec<usize>> for PermSetting {
    type Error = Error;
    fn try_from(pi: Vec<usize>) -> Result<Self> {
        PermSetting::new(pi)
    }
}

impl From<PermSetting> for Vec<usize> {
    fn from(s: PermSetting) -> Self {
        s.pi
    }
}

impl PermSetting {
    pub fn new(pi: Vec<usize>) -> Result<Self> {
        if pi.is_empty() || !pi.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "wire permutation must have positive even length, got {}",
                pi.len()
            )));
        }
        if !is_bijection(&pi) {
            return Err(Error::InvalidArgument(format!("{pi:?} is not a bijection")));
        }
        if !is_even(&pi) {
            return Err(Error::InvalidArgument(format!("{pi:?} is an odd permutation")));
        }
        Ok(PermSetting { pi })
    }

    pub fn identity(n: usize) -> Self {
        PermSetting { pi: (0..2 * n).collect() }
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Ok(PermSetting { pi: sample_alt(2 * n, rng)? })
    }

    pub fn n(&self) -> usize {
        self.pi.len() / 2
    }

    pub fn images(&self) -> &[usize] {
        &self.pi
    }

    pub fn inverse(&self) -> PermSetting {
        PermSetting { pi: inverse(&self.pi) }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PermSetting) -> PermSetting {
        PermSetting { pi: compose(&self.pi, &other.pi) }
    }

    /// `(sign, σ)` with `σ` the sorted image of `τ` and `sign` the parity of
    /// the sort; equals `det Q_{σ,τ}`.
    pub fn act_on_tuple(&self, tau: &MajoranaIndex) -> (i8, MajoranaIndex) {
        debug_assert_eq!(tau.n(), self.n());
        let images: Vec<usize> = tau.indices().iter().map(|&t| self.pi[t]).collect();
        let (sign, sigma) = MajoranaIndex::from_unsorted(self.n(), &images).expect("bijection maps to valid wires");
        (sign, sigma)
    }

    /// `det Q_{rows, cols}` computed exactly by fraction-free elimination.
    pub fn subdeterminant(&self, rows: &MajoranaIndex, cols: &MajoranaIndex) -> Result<i8> {
        let r = rows.indices();
        let c = cols.indices();
        if r.len() != c.len() {
            return Err(Error::InvalidArgument(format!(
                "row and column tuples differ in length ({} vs {})",
                r.len(),
                c.len()
            )));
        }
        let m: Vec<Vec<i64>> = r.iter().map(|&i| c.iter().map(|&j| (self.pi[j] == i) as i64).collect()).collect();
        Ok(det_bareiss(m) as i8)
    }
}

impl fmt::Display for PermSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.pi)
    }
}

/// Exact integer determinant (Bareiss).
pub fn det_bareiss(mut m: Vec<Vec<i64>>) -> i64 {
    let k = m.len();
    if k == 0 {
        return 1;
    }
    let mut sign = 1i64;
    let mut prev = 1i64;
    for i in 0..k - 1 {
        if m[i][i] == 0 {
            match (i + 1..k).find(|&r| m[r][i] != 0) {
                Some(r) => {
                    m.swap(i, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for r in i + 1..k {
            for c in i + 1..k {
                m[r][c] = (m[r][c] * m[i][i] - m[r][i] * m[i][c]) / prev;
            }
        }
        prev = m[i][i];
    }
    sign * m[k - 1][k - 1]
}

/// Layers of disjoint adjacent transpositions `(a, a+1)` on `wires` wires.
/// Layer `l` is applied after layer `l - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranspositionNetwork {
    pub wires: usize,
    pub layers: Vec<Vec<usize>>,
}

impl TranspositionNetwork {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// The permutation realized by applying the layers in order.
    pub fn replay(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.wires).collect();
        for layer in &self.layers {
            for &a in layer {
                for x in perm.iter_mut() {
                    if *x == a {
                        *x = a + 1;
                    } else if *x == a + 1 {
                        *x = a;
                    }
                }
            }
        }
        perm
    }

    /// Transpositions in application order.
    pub fn gates(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers.iter().flatten().copied()
    }
}

/// Odd–even transposition network realizing `pi`; depth is at most `pi.len()`.
pub fn decompose_transpositions(pi: &[usize]) -> TranspositionNetwork {
    // Sorting the array `pi` by swaps s_1, s_2, ... gives pi ∘ s_1 ∘ s_2 ⋯ = id,
    // so pi = ⋯ ∘ s_2 ∘ s_1 and the swaps in sorting order are the layers.
    let d = pi.len();
    let mut arr = pi.to_vec();
    let mut layers = Vec::new();
    let mut round = 0usize;
    let mut quiet = 0usize;
    while quiet < 2 && d > 1 {
        let mut layer = Vec::new();
        let mut a = round % 2;
        while a + 1 < d {
            if arr[a] > arr[a + 1] {
                arr.swap(a, a + 1);
                layer.push(a);
            }
            a += 2;
        }
        if layer.is_empty() {
            quiet += 1;
        } else {
            quiet = 0;
            layers.push(layer);
        }
        round += 1;
    }
    TranspositionNetwork { wires: d, layers }
}

/// A number-conserving setting: even mode permutation plus per-qubit basis letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NCSetting {
    u: Vec<usize>,
    basis: Vec<Letter>,
}

impl NCSetting {
    pub fn new(u: Vec<usize>, basis: Vec<Letter>) -> Result<Self> {
        if u.is_empty() || u.len() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "mode permutation of length {} with {} basis letters",
                u.len(),
                basis.len()
            )));
        }
        if !is_bijection(&u) || !is_even(&u) {
            return Err(Error::InvalidArgument(format!("{u:?} is not an even permutation")));
        }
        if basis.contains(&Letter::I) {
            return Err(Error::InvalidArgument("basis letters must be X, Y or Z".into()));
        }
        Ok(NCSetting { u, basis })
    }

    pub fn n(&self) -> usize {
        self.u.len()
    }

    pub fn modes(&self) -> &[usize] {
        &self.u
    }

    pub fn basis(&self) -> &[Letter] {
        &self.basis
    }

    pub fn basis_string(&self) -> String {
        self.basis.iter().map(|l| l.as_char()).collect()
    }

    /// Lifted wire permutation `ũ(2p + x) = 2u(p) + x`.
    pub fn wire_permutation(&self) -> PermSetting {
        PermSetting { pi: lift_mode_perm(&self.u) }
    }

    /// Bitmasks `(x, z)` of the letters the basis can read on each qubit.
    pub fn basis_bits(&self) -> (u64, u64) {
        let mut x = 0u64;
        let mut z = 0u64;
        for (j, l) in self.basis.iter().enumerate() {
            match l {
                Letter::X => x |= 1 << j,
                Letter::Y => {
                    x |= 1 << j;
                    z |= 1 << j
                }
                Letter::Z => z |= 1 << j,
                Letter::I => {}
            }
        }
        (x, z)
    }
}

/// A measurement setting from either ensemble.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Setting {
    Fgu(PermSetting),
    Nc(NCSetting),
}

impl Setting {
    pub fn n(&self) -> usize {
        match self {
            Setting::Fgu(q) => q.n(),
            Setting::Nc(s) => s.n(),
        }
    }
}

pub(crate) fn lift_mode_perm(u: &[usize]) -> Vec<usize> {
    (0..2 * u.len()).map(|w| 2 * u[w / 2] + w % 2).collect()
}

pub fn sample_nc_setting<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<NCSetting> {
    let u = sample_alt(n, rng)?;
    const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
    let basis = (0..n).map(|_| LETTERS[rng.random_range(0..3)]).collect();
    Ok(NCSetting { u, basis })
}

/// `(sign, ũ(μ))` with the image sorted and `sign` the sorting parity.
pub fn mode_perm_image(u: &[usize], mu: &MajoranaIndex) -> (i8, MajoranaIndex) {
    debug_assert_eq!(u.len(), mu.n());
    let images: Vec<usize> = mu.indices().iter().map(|&w| 2 * u[w / 2] + w % 2).collect();
    MajoranaIndex::from_unsorted(mu.n(), &images).expect("mode permutation maps to valid wires")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn leibniz(m: &[Vec<i64>]) -> i64 {
        let k = m.len();
        let mut p: Vec<usize> = (0..k).collect();
        let mut total = 0;
        loop {
            let s = if is_even(&p) { 1 } else { -1 };
            total += s * (0..k).map(|i| m[i][p[i]]).product::<i64>();
            if !next_permutation(&mut p) {
                break;
            }
        }
        total
    }

    fn idx(n: usize, v: &[usize]) -> MajoranaIndex {
        MajoranaIndex::new(n, v).unwrap()
    }

    #[test]
    fn alt_sizes() {
        assert_eq!(alternating_group(1).len(), 1);
        assert_eq!(alternating_group(2).len(), 1);
        assert_eq!(alternating_group(4).len(), 12);
        assert_eq!(alternating_group(6).len(), 360);
    }

    #[test]
    fn sample_alt_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(sample_alt(2, &mut rng).unwrap(), vec![0, 1]);
            assert_eq!(sample_alt(1, &mut rng).unwrap(), vec![0]);
            assert!(is_even(&sample_alt(7, &mut rng).unwrap()));
        }
        assert!(sample_alt(0, &mut rng).is_err());
    }

    #[test]
    fn act_on_tuple_examples() {
        // 3-cycle 0 -> 1 -> 2 -> 0 on four wires
        let q = PermSetting::new(vec![1, 2, 0, 3]).unwrap();
        assert_eq!(q.act_on_tuple(&idx(2, &[0, 1])), (1, idx(2, &[1, 2])));
        let (s, sigma) = q.act_on_tuple(&idx(2, &[0, 2]));
        assert_eq!(sigma, idx(2, &[0, 1]));
        assert_eq!(s, q.subdeterminant(&sigma, &idx(2, &[0, 2])).unwrap());
        assert_eq!(s, -1);
        let id = PermSetting::identity(2);
        assert_eq!(id.act_on_tuple(&idx(2, &[1, 3])), (1, idx(2, &[1, 3])));
    }

    #[test]
    fn subdeterminant_against_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q = PermSetting::sample(3, &mut rng).unwrap();
            let rows = idx(3, &{
                let mut v: Vec<usize> = (0..6).collect();
                v.shuffle(&mut rng);
                let mut v = v[..3].to_vec();
                v.sort();
                v
            });
            let cols = idx(3, &{
                let mut v: Vec<usize> = (0..6).collect();
                v.shuffle(&mut rng);
                let mut v = v[..3].to_vec();
                v.sort();
                v
            });
            let m: Vec<Vec<i64>> = rows
                .indices()
                .iter()
                .map(|&i| cols.indices().iter().map(|&j| (q.images()[j] == i) as i64).collect())
                .collect();
            assert_eq!(q.subdeterminant(&rows, &cols).unwrap() as i64, leibniz(&m));
        }
        let id = PermSetting::identity(2);
        assert_eq!(id.subdeterminant(&idx(2, &[0, 1]), &idx(2, &[0, 1])).unwrap(), 1);
        assert_eq!(id.subdeterminant(&idx(2, &[0, 2]), &idx(2, &[0, 1])).unwrap(), 0);
        assert!(id.subdeterminant(&idx(2, &[0]), &idx(2, &[0, 1])).is_err());
    }

    #[test]
    fn bareiss_signed_matrices() {
        let m = vec![vec![0, -1, 0], vec![0, 0, 1], vec![1, 0, 0]];
        assert_eq!(det_bareiss(m.clone()), leibniz(&m));
        let m = vec![vec![2, 3, 1], vec![4, 1, -2], vec![0, 5, 7]];
        assert_eq!(det_bareiss(m.clone()), leibniz(&m));
    }

    #[test]
    fn transposition_networks() {
        assert_eq!(decompose_transpositions(&[0, 1, 2, 3]).depth(), 0);
        let rev = [3, 2, 1, 0];
        let net = decompose_transpositions(&rev);
        assert!(net.depth() <= 4);
        assert_eq!(net.replay(), rev.to_vec());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let q = PermSetting::sample(6, &mut rng).unwrap();
            let net = decompose_transpositions(q.images());
            assert!(net.depth() <= 12);
            assert_eq!(net.replay(), q.images());
        }
    }

    #[test]
    fn nc_settings() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sample_nc_setting(1, &mut rng).unwrap();
        assert_eq!(s.modes(), &[0]);
        for _ in 0..50 {
            let s = sample_nc_setting(5, &mut rng).unwrap();
            assert!(is_even(s.modes()));
            assert!(is_even(s.wire_permutation().images()));
        }
        assert!(NCSetting::new(vec![1, 0], vec![Letter::X, Letter::Z]).is_err());
        assert!(NCSetting::new(vec![0, 1], vec![Letter::I, Letter::Z]).is_err());
    }

    #[test]
    fn mode_perm_examples() {
        let u = [1, 2, 0];
        assert_eq!(mode_perm_image(&u, &idx(3, &[0, 2])), (1, idx(3, &[2, 4])));
        assert_eq!(mode_perm_image(&[0, 1, 2], &idx(3, &[1, 4])), (1, idx(3, &[1, 4])));
        // (1,3) -> (5,1): one inversion
        assert_eq!(mode_perm_image(&u, &idx(3, &[1, 5])), (-1, idx(3, &[1, 3])));
    }

    #[test]
    fn serde_rejects_odd() {
        assert!(serde_json::from_str::<PermSetting>("[1,0,2,3]").is_err());
        let q: PermSetting = serde_json::from_str("[1,2,0,3]").unwrap();
        assert_eq!(q.n(), 2);
    }
}
