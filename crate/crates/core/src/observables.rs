//! Observables in the Majorana basis, Hamiltonian ingestion, k-RDM assembly
//! and variance reports.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::combinatorics::{binomial_u128, combinations, rank_combination};
use crate::error::{Error, Result};
use crate::fermion::{fermion_to_majorana, FermionTerm, Ladder, MajoranaExpansion};
use crate::fgu::channel_eigenvalue_f64;
use crate::majorana::MajoranaIndex;

/// Imaginary residue above which an ingested observable is rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// `identity · I + Σ_μ h_μ Γ_μ` with real coefficients.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ObservableDecomposition {
    pub n: usize,
    pub identity: f64,
    pub coefficients: BTreeMap<MajoranaIndex, f64>,
}

impl ObservableDecomposition {
    pub fn zero(n: usize) -> Self {
        ObservableDecomposition { n, identity: 0.0, coefficients: BTreeMap::new() }
    }

    pub fn single(mu: MajoranaIndex, h: f64) -> Self {
        let mut o = Self::zero(mu.n());
        o.add(mu, h).expect("same mode count");
        o
    }

    pub fn add(&mut self, mu: MajoranaIndex, h: f64) -> Result<()> {
        if mu.n() != self.n {
            return Err(Error::ModeMismatch { expected: self.n, found: mu.n() });
        }
        if mu.is_identity() {
            self.identity += h;
        } else {
            *self.coefficients.entry(mu).or_insert(0.0) += h;
        }
        Ok(())
    }

    pub fn coefficient(&self, mu: &MajoranaIndex) -> f64 {
        if mu.is_identity() {
            self.identity
        } else {
            self.coefficients.get(mu).copied().unwrap_or(0.0)
        }
    }

    /// Number of non-identity terms.
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty() && self.identity == 0.0
    }

    pub fn scaled(&self, c: f64) -> Self {
        ObservableDecomposition {
            n: self.n,
            identity: self.identity * c,
            coefficients: self.coefficients.iter().map(|(m, h)| (*m, h * c)).collect(),
        }
    }

    pub fn max_degree(&self) -> usize {
        self.coefficients.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Drops terms with `|h| <= tol`.
    pub fn prune(&mut self, tol: f64) {
        self.coefficients.retain(|_, h| h.abs() > tol);
    }

    /// `tr(O ρ)` given Majorana expectations `g_μ` (identity contributes as-is).
    pub fn expectation(&self, g: impl Fn(&MajoranaIndex) -> Option<f64>) -> Result<f64> {
        let mut acc = self.identity;
        for (mu, h) in &self.coefficients {
            let v = g(mu).ok_or_else(|| Error::MissingEstimate(mu.to_string()))?;
            acc += h * v;
        }
        Ok(acc)
    }
}

/// Parses a Hamiltonian in the line format `coeff op op ...` where `op` is
/// `p^` (creation) or `p` (annihilation) and `coeff` is a real number or a
/// `(re,im)` pair. `#` starts a comment. The mode count defaults to one more
/// than the largest mode mentioned.
pub fn ingest_hamiltonian(text: &str, n: Option<usize>) -> Result<ObservableDecomposition> {
    let mut terms = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        terms.push(parse_term(line).map_err(|message| Error::Parse { line: lineno + 1, message })?);
    }
    let needed = terms.iter().filter_map(|t| t.max_mode()).max().map_or(0, |m| m + 1);
    let n = match n {
        Some(n) if n < needed => {
            return Err(Error::InvalidArgument(format!("Hamiltonian mentions mode {} but n = {n}", needed - 1)))
        }
        Some(n) => n,
        None => needed,
    };
    let mut exp = MajoranaExpansion::zero(n);
    for t in &terms {
        exp.add(&fermion_to_majorana(n, t)?);
    }
    exp.prune(HERMITIAN_TOL);
    let mut obs = exp.into_real(HERMITIAN_TOL)?;
    obs.prune(0.0);
    Ok(obs)
}

fn parse_term(line: &str) -> std::result::Result<FermionTerm, String> {
    let (coef, rest) = if let Some(stripped) = line.strip_prefix('(') {
        let close = stripped.find(')').ok_or("unterminated complex coefficient")?;
        let inner = &stripped[..close];
        let (re, im) = inner.split_once(',').ok_or("complex coefficient must be `(re,im)`")?;
        let re: f64 = re.trim().parse().map_err(|e| format!("bad real part: {e}"))?;
        let im: f64 = im.trim().parse().map_err(|e| format!("bad imaginary part: {e}"))?;
        (Complex64::new(re, im), &stripped[close + 1..])
    } else {
        let mut it = line.splitn(2, char::is_whitespace);
        let c = it.next().unwrap_or("");
        let re: f64 = c.parse().map_err(|e| format!("bad coefficient `{c}`: {e}"))?;
        (Complex64::new(re, 0.0), it.next().unwrap_or(""))
    };
    if !coef.re.is_finite() || !coef.im.is_finite() {
        return Err("coefficient is not finite".into());
    }
    let mut ops = Vec::new();
    for tok in rest.split_whitespace() {
        let (digits, dagger) = match tok.strip_suffix('^') {
            Some(d) => (d, true),
            None => (tok, false),
        };
        let mode: usize = digits.parse().map_err(|_| format!("bad operator `{tok}`"))?;
        if mode >= crate::majorana::MAX_MODES {
            return Err(format!("mode {mode} exceeds the supported maximum"));
        }
        ops.push(Ladder { mode, dagger });
    }
    Ok(FermionTerm::new(ops, coef))
}

/// k-RDM `D[p][q] = tr(a†_{p_1}⋯a†_{p_k} a_{q_k}⋯a_{q_1} ρ)` indexed by colex
/// ranks of the increasing tuples `p`, `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RDMTensor {
    pub n: usize,
    pub k: usize,
    pub dim: usize,
    #[serde(skip)]
    pub data: Vec<Complex64>,
}

impl RDMTensor {
    pub fn zeros(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::DegreeOutOfRange { n, k });
        }
        let dim = binomial_u128(n as u64, k as u64)
            .filter(|&d| d <= 1 << 16)
            .ok_or(Error::SizeLimit { n, limit: 64 })? as usize;
        Ok(RDMTensor { n, k, dim, data: vec![Complex64::new(0.0, 0.0); dim * dim] })
    }

    pub fn get(&self, p: usize, q: usize) -> Complex64 {
        self.data[p * self.dim + q]
    }

    pub fn set(&mut self, p: usize, q: usize, v: Complex64) {
        self.data[p * self.dim + q] = v;
    }

    pub fn get_tuple(&self, p: &[usize], q: &[usize]) -> Result<Complex64> {
        if p.len() != self.k || q.len() != self.k {
            return Err(Error::InvalidArgument(format!("expected {}-tuples", self.k)));
        }
        let rp = rank_combination(self.n, p)? as usize;
        let rq = rank_combination(self.n, q)? as usize;
        Ok(self.get(rp, rq))
    }

    /// Increasing mode tuples in rank order.
    pub fn tuples(&self) -> Vec<Vec<usize>> {
        combinations(self.n, self.k).collect()
    }

    /// `max |D[p][q] − conj(D[q][p])|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for p in 0..self.dim {
            for q in 0..self.dim {
                r = r.max((self.get(p, q) - self.get(q, p).conj()).norm());
            }
        }
        r
    }

    pub fn max_abs_diff(&self, other: &RDMTensor) -> f64 {
        assert_eq!((self.n, self.k), (other.n, other.k));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|p| self.get(p, p)).sum()
    }
}

/// Assembles the k-RDM by contracting each element's Majorana expansion
/// against `estimates` (the identity contributes 1).
pub fn assemble_rdm(estimates: &BTreeMap<MajoranaIndex, f64>, n: usize, k: usize) -> Result<RDMTensor> {
    let mut rdm = RDMTensor::zeros(n, k)?;
    let tuples = rdm.tuples();
    for (rp, p) in tuples.iter().enumerate() {
        for (rq, q) in tuples.iter().enumerate() {
            let exp = fermion_to_majorana(n, &FermionTerm::rdm_element(p, q))?;
            let mut v = Complex64::new(0.0, 0.0);
            for (mu, c) in &exp.terms {
                let g = if mu.is_identity() {
                    1.0
                } else {
                    *estimates.get(mu).ok_or_else(|| Error::MissingEstimate(mu.to_string()))?
                };
                v += c * g;
            }
            rdm.set(rp, rq, v);
        }
    }
    Ok(rdm)
}

/// Majorana monomials that [`assemble_rdm`] reads for a k-RDM.
pub fn rdm_support(n: usize, k: usize) -> Vec<MajoranaIndex> {
    MajoranaIndex::even_up_to(n, k)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    /// `(degree 2k, λ_{n,k}^{-1} Σ_{|μ|=2k} h_μ²)` for every degree present.
    pub per_degree: Vec<(usize, f64)>,
    pub shadow_norm_sq: f64,
    pub expectation: f64,
    pub variance: f64,
}

/// Per-degree shadow-norm contributions and single-shot variance of the FGU
/// estimator of `h`, given `tr(Hρ)` without its identity part.
pub fn hamiltonian_variance_report(h: &ObservableDecomposition, traceless_expectation: f64) -> Result<VarianceReport> {
    let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
    for (mu, c) in &h.coefficients {
        if mu.degree() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("odd-degree term {mu}")));
        }
        *sums.entry(mu.degree()).or_insert(0.0) += c * c;
    }
    let mut per_degree = Vec::new();
    let mut total = 0.0;
    for (d, s) in sums {
        let contrib = s / channel_eigenvalue_f64(h.n, d / 2)?;
        per_degree.push((d, contrib));
        total += contrib;
    }
    Ok(VarianceReport {
        per_degree,
        shadow_norm_sq: total,
        expectation: traceless_expectation,
        variance: total - traceless_expectation * traceless_expectation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize, v: &[usize]) -> MajoranaIndex {
        MajoranaIndex::new(n, v).unwrap()
    }

    #[test]
    fn number_operator_file() {
        let h = ingest_hamiltonian("1.0 0^ 0\n", None).unwrap();
        assert_eq!(h.n, 1);
        assert_eq!(h.identity, 0.5);
        assert_eq!(h.coefficient(&idx(1, &[0, 1])), -0.5);
    }

    #[test]
    fn non_hermitian_file() {
        let e = ingest_hamiltonian("1.0 0^ 1\n", None).unwrap_err();
        assert!(matches!(e, Error::NonHermitian { .. }));
        let ok = ingest_hamiltonian("1.0 0^ 1\n1.0 1^ 0 # h.c.\n", None).unwrap();
        assert_eq!(ok.len(), 2);
        let ok = ingest_hamiltonian("(0,1) 0^ 1\n(0,-1) 1^ 0\n", None).unwrap();
        assert_eq!(ok.len(), 2);
    }

    #[test]
    fn empty_and_bad_files() {
        let h = ingest_hamiltonian("# nothing\n\n", Some(3)).unwrap();
        assert!(h.is_empty());
        assert_eq!(h.n, 3);
        assert!(matches!(ingest_hamiltonian("1.0 0^ 0\nabc 1^\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ingest_hamiltonian("1.0 0^ x\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(ingest_hamiltonian("1.0 3^ 3\n", Some(2)).is_err());
    }

    #[test]
    fn zero_estimates_rdm() {
        let rdm = assemble_rdm(&zero_estimates(3, 1), 3, 1).unwrap();
        for p in 0..3 {
            for q in 0..3 {
                let want = if p == q { 0.5 } else { 0.0 };
                assert!((rdm.get(p, q) - Complex64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        assert!(matches!(assemble_rdm(&BTreeMap::new(), 3, 1), Err(Error::MissingEstimate(_))));
    }

    fn zero_estimates(n: usize, k: usize) -> BTreeMap<MajoranaIndex, f64> {
        rdm_support(n, k).into_iter().map(|m| (m, 0.0)).collect()
    }

    #[test]
    fn variance_report_examples() {
        let h = ObservableDecomposition::single(idx(2, &[0, 1]), 1.0);
        let r = hamiltonian_variance_report(&h, 0.0).unwrap();
        assert_eq!(r.variance, 3.0);
        let mut h2 = h.clone();
        h2.add(MajoranaIndex::identity(2), 5.0).unwrap();
        assert_eq!(hamiltonian_variance_report(&h2, 0.0).unwrap(), r);
        h2.add(idx(2, &[0, 1, 2, 3]), 2.0).unwrap();
        let r2 = hamiltonian_variance_report(&h2, 0.0).unwrap();
        assert_eq!(r2.shadow_norm_sq, 3.0 + 4.0);
        assert_eq!(r2.per_degree, vec![(2, 3.0), (4, 4.0)]);
    }
}
