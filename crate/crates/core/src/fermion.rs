//! Ladder-operator monomials and their expansion over Majorana monomials.
//!
//! `a_p = (γ_{2p} + iγ_{2p+1})/2` and `a_p† = (γ_{2p} − iγ_{2p+1})/2`. Every
//! coefficient produced is a dyadic rational times a power of `i`, so the
//! `f64` arithmetic below is exact for any practical monomial length.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::majorana::MajoranaIndex;
use crate::observables::ObservableDecomposition;

/// One ladder operator: mode and whether it is a creation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Ladder { mode, dagger: false }
    }
}

/// `coefficient · op_1 op_2 ⋯ op_m`, operators applied right to left.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionTerm {
    pub ops: Vec<Ladder>,
    pub coefficient: Complex64,
}

impl FermionTerm {
    pub fn new(ops: Vec<Ladder>, coefficient: Complex64) -> Self {
        FermionTerm { ops, coefficient }
    }

    /// `coefficient · a†_{c_1} ⋯ a†_{c_k} a_{d_1} ⋯ a_{d_l}`.
    pub fn normal(creations: &[usize], annihilations: &[usize], coefficient: Complex64) -> Self {
        let ops = creations
            .iter()
            .map(|&p| Ladder::create(p))
            .chain(annihilations.iter().map(|&q| Ladder::annihilate(q)))
            .collect();
        FermionTerm { ops, coefficient }
    }

    /// The `(p, q)` element operator `a†_{p_1}⋯a†_{p_k} a_{q_k}⋯a_{q_1}` of a
    /// k-RDM, with `p` and `q` given as increasing tuples.
    pub fn rdm_element(p: &[usize], q: &[usize]) -> Self {
        let rev: Vec<usize> = q.iter().rev().copied().collect();
        FermionTerm::normal(p, &rev, Complex64::new(1.0, 0.0))
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.ops.iter().map(|o| o.mode).max()
    }

    /// Canonical normal order when the term is already creation-then-annihilation:
    /// creations increasing, annihilations decreasing, with the permutation sign
    /// folded into the coefficient. `None` if a mode repeats within either group
    /// (the monomial vanishes).
    pub fn canonical(&self) -> Result<Option<FermionTerm>> {
        let split = self.ops.iter().position(|o| !o.dagger).unwrap_or(self.ops.len());
        if self.ops[split..].iter().any(|o| o.dagger) {
            return Err(Error::InvalidArgument("term is not in creation-before-annihilation form".into()));
        }
        let mut cre: Vec<usize> = self.ops[..split].iter().map(|o| o.mode).collect();
        let mut ann: Vec<usize> = self.ops[split..].iter().map(|o| o.mode).collect();
        let mut sign = sort_with_sign(&mut cre);
        ann.reverse();
        sign *= sort_with_sign(&mut ann);
        ann.reverse();
        if cre.windows(2).any(|w| w[0] == w[1]) || ann.windows(2).any(|w| w[0] == w[1]) {
            return Ok(None);
        }
        Ok(Some(FermionTerm::normal(&cre, &ann, self.coefficient * sign as f64)))
    }

    /// Hermitian conjugate.
    pub fn adjoint(&self) -> FermionTerm {
        let ops = self.ops.iter().rev().map(|o| Ladder { mode: o.mode, dagger: !o.dagger }).collect();
        FermionTerm { ops, coefficient: self.coefficient.conj() }
    }
}

/// Sorts ascending, returning the permutation parity as `±1`.
fn sort_with_sign(v: &mut [usize]) -> i32 {
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    sign
}

/// Complex linear combination of Majorana monomials on `n` modes.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MajoranaExpansion {
    pub n: usize,
    pub terms: BTreeMap<MajoranaIndex, Complex64>,
}

impl MajoranaExpansion {
    pub fn zero(n: usize) -> Self {
        MajoranaExpansion { n, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, mu: MajoranaIndex, c: Complex64) {
        *self.terms.entry(mu).or_insert(Complex64::new(0.0, 0.0)) += c;
    }

    pub fn add(&mut self, other: &MajoranaExpansion) {
        for (mu, c) in &other.terms {
            self.add_term(*mu, *c);
        }
    }

    pub fn coefficient(&self, mu: &MajoranaIndex) -> Complex64 {
        self.terms.get(mu).copied().unwrap_or_default()
    }

    /// Drops entries with magnitude at most `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|_, c| c.norm() > tol);
    }

    /// Real observable; fails if any imaginary part exceeds `tol`.
    pub fn into_real(self, tol: f64) -> Result<ObservableDecomposition> {
        let mut obs = ObservableDecomposition::zero(self.n);
        for (mu, c) in self.terms {
            if c.im.abs() > tol {
                return Err(Error::NonHermitian { index: mu.to_string(), imag: c.im });
            }
            if c.re != 0.0 {
                obs.add(mu, c.re)?;
            }
        }
        Ok(obs)
    }
}

/// Expands a ladder monomial over Majorana monomials on `n` modes.
///
/// Terms repeating a mode within the creation or annihilation group of a
/// normal-ordered monomial vanish and return an empty expansion.
pub fn fermion_to_majorana(n: usize, term: &FermionTerm) -> Result<MajoranaExpansion> {
    if let Some(m) = term.max_mode() {
        if m >= n {
            return Err(Error::InvalidArgument(format!("mode {m} out of range for n = {n}")));
        }
    }
    if let Ok(None) = term.canonical() {
        return Ok(MajoranaExpansion::zero(n));
    }
    // running list of (coefficient, monomial); γ_w is Γ_(w) since degree 1 carries no phase
    let mut acc: Vec<(Complex64, MajoranaIndex)> = vec![(term.coefficient, MajoranaIndex::identity(n))];
    let half = Complex64::new(0.5, 0.0);
    for op in &term.ops {
        let g_even = MajoranaIndex::new(n, &[2 * op.mode])?;
        let g_odd = MajoranaIndex::new(n, &[2 * op.mode + 1])?;
        let odd_coef = if op.dagger { Complex64::new(0.0, -0.5) } else { Complex64::new(0.0, 0.5) };
        let mut next = Vec::with_capacity(acc.len() * 2);
        for (c, mu) in &acc {
            for (g, gc) in [(g_even, half), (g_odd, odd_coef)] {
                let (ph, prod) = mu.product(&g);
                next.push((c * gc * ph.to_complex(), prod));
            }
        }
        acc = next;
    }
    let mut out = MajoranaExpansion::zero(n);
    for (c, mu) in acc {
        out.add_term(mu, c);
    }
    out.prune(0.0);
    Ok(out)
}
