//! Classical shadows over the discrete fermionic Gaussian ensemble `Alt(2n)`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::majorana::MajoranaIndex;
use crate::mapping::Mapping;
use crate::observables::ObservableDecomposition;
use crate::perm::PermSetting;

fn check_degree(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::DegreeOutOfRange { n, k });
    }
    Ok(())
}

/// `λ_{n,k} = C(n,k) / C(2n,2k)`.
pub fn channel_eigenvalue(n: usize, k: usize) -> Result<BigRational> {
    check_degree(n, k)?;
    Ok(BigRational::new(BigInt::from(binomial(n as u64, k as u64)), BigInt::from(binomial(2 * n as u64, 2 * k as u64))))
}

pub fn channel_eigenvalue_f64(n: usize, k: usize) -> Result<f64> {
    Ok(channel_eigenvalue(n, k)?.to_f64().unwrap_or(0.0))
}

/// `C(2n,2k) / C(n,k)`, the squared shadow norm of any degree-`2k` monomial.
pub fn shadow_norm_sq(n: usize, k: usize) -> Result<BigRational> {
    Ok(channel_eigenvalue(n, k)?.recip())
}

pub fn shadow_norm_sq_f64(n: usize, k: usize) -> Result<f64> {
    Ok(shadow_norm_sq(n, k)?.to_f64().unwrap_or(f64::INFINITY))
}

/// A measurement setting with the observed bitstring (qubit `j` = bit `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowSample {
    pub setting: PermSetting,
    pub outcome: u64,
}

/// `sign · ⟨z|Γ_σ|z⟩` for `(sign, σ) = Q·μ`, without the `λ^{-1}` factor.
pub fn raw_estimate(sample: &ShadowSample, mu: &MajoranaIndex, m: &Mapping) -> Result<i8> {
    if sample.setting.n() != m.n() {
        return Err(Error::ModeMismatch { expected: m.n(), found: sample.setting.n() });
    }
    let (sign, sigma) = sample.setting.act_on_tuple(mu);
    Ok(sign * m.diag_matrix_element(&sigma, sample.outcome)?)
}

/// Single-sample estimate `λ_{n,k}^{-1} · sign · ⟨z|Γ_σ|z⟩` of `tr(Γ_μ ρ)`.
pub fn estimate_majorana(sample: &ShadowSample, mu: &MajoranaIndex, m: &Mapping) -> Result<f64> {
    if !mu.degree().is_multiple_of(2) || mu.is_identity() {
        return Err(Error::InvalidArgument(format!("{mu} is not a positive even-degree monomial")));
    }
    let raw = raw_estimate(sample, mu, m)?;
    Ok(raw as f64 * shadow_norm_sq_f64(m.n(), mu.degree() / 2)?)
}

/// `true` iff the image of `μ` under the setting is diagonal.
pub fn covered(setting: &PermSetting, mu: &MajoranaIndex, m: &Mapping) -> bool {
    m.is_diagonal(&setting.act_on_tuple(mu).1)
}

/// Targets of degree `2, 4, …, 2k` covered by `setting`, as `(sign, τ, σ)` with
/// `σ` diagonal and `Q·τ = sign·σ`. Obtained as preimages of the diagonal sets.
pub fn covered_targets(
    setting: &PermSetting,
    m: &Mapping,
    k: usize,
) -> Result<Vec<(i8, MajoranaIndex, MajoranaIndex)>> {
    let inv = setting.inverse();
    let mut out = Vec::new();
    for j in 1..=k {
        for sigma in m.diagonal_set(j)? {
            let (_, tau) = inv.act_on_tuple(&sigma);
            let (sign, s2) = setting.act_on_tuple(&tau);
            debug_assert_eq!(s2, sigma);
            out.push((sign, tau, sigma));
        }
    }
    Ok(out)
}

/// Sample budget guaranteeing all `L` estimates within `ε` with probability
/// `1 − δ`: `⌈(1 + ε/3) · 2 ln(2L/δ) / ε² · max_norm_sq⌉`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationPlan {
    pub epsilon: f64,
    pub delta: f64,
    pub observables: u64,
    pub max_norm_sq: f64,
    pub samples: u64,
}

impl EstimationPlan {
    pub fn new(epsilon: f64, delta: f64, observables: u64, max_norm_sq: f64) -> Result<Self> {
        let samples = bernstein_samples(epsilon, delta, observables, max_norm_sq)?;
        Ok(EstimationPlan { epsilon, delta, observables, max_norm_sq, samples })
    }
}

pub fn bernstein_samples(epsilon: f64, delta: f64, l: u64, max_norm_sq: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must lie in (0, 1)")));
    }
    if l == 0 {
        return Err(Error::InvalidArgument("need at least one observable".into()));
    }
    if !(max_norm_sq.is_finite() && max_norm_sq > 0.0) {
        return Err(Error::InvalidArgument(format!("max_norm_sq = {max_norm_sq} must be positive")));
    }
    let m = (1.0 + epsilon / 3.0) * 2.0 * (2.0 * l as f64 / delta).ln() / (epsilon * epsilon) * max_norm_sq;
    Ok((m.ceil() as u64).max(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    /// Sample mean including zeros from uncovering samples.
    pub mean: f64,
    /// Number of samples that covered the target.
    pub covered: u64,
}

/// Sample means of the single-shot estimators for every target.
///
/// Accumulation uses exact integer sums, so the parallel reduction is
/// bit-for-bit deterministic.
pub fn estimate_all(
    samples: &[ShadowSample],
    targets: &[MajoranaIndex],
    m: &Mapping,
) -> Result<BTreeMap<MajoranaIndex, Estimate>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = m.n();
    let mut kmax = 0;
    let mut position: HashMap<MajoranaIndex, usize> = HashMap::new();
    for (i, t) in targets.iter().enumerate() {
        if t.n() != n {
            return Err(Error::ModeMismatch { expected: n, found: t.n() });
        }
        if t.degree() % 2 != 0 || t.is_identity() {
            return Err(Error::InvalidArgument(format!("{t} is not a positive even-degree monomial")));
        }
        kmax = kmax.max(t.degree() / 2);
        position.insert(*t, i);
    }
    for s in samples {
        if s.setting.n() != n {
            return Err(Error::ModeMismatch { expected: n, found: s.setting.n() });
        }
    }
    // diagonal monomials with their Z-masks and real phases
    let mut diag = Vec::new();
    for j in 1..=kmax {
        for sigma in m.diagonal_set(j)? {
            let p = m.to_pauli(&sigma)?;
            let sign = p.phase().as_sign().expect("diagonal images are real");
            diag.push((sigma, p.z_bits(), sign));
        }
    }
    let len = targets.len();
    let (sums, counts) = samples
        .par_iter()
        .fold(
            || (vec![0i64; len], vec![0u64; len]),
            |(mut sums, mut counts), s| {
                let inv = s.setting.inverse();
                for (sigma, zmask, ph) in &diag {
                    let (_, tau) = inv.act_on_tuple(sigma);
                    if let Some(&t) = position.get(&tau) {
                        let (sign, _) = s.setting.act_on_tuple(&tau);
                        let parity = if (zmask & s.outcome).count_ones() % 2 == 1 { -1 } else { 1 };
                        sums[t] += (sign * ph * parity) as i64;
                        counts[t] += 1;
                    }
                }
                (sums, counts)
            },
        )
        .reduce(
            || (vec![0i64; len], vec![0u64; len]),
            |(mut a, mut ac), (b, bc)| {
                for i in 0..len {
                    a[i] += b[i];
                    ac[i] += bc[i];
                }
                (a, ac)
            },
        );
    let mcount = samples.len() as f64;
    let mut out = BTreeMap::new();
    for (i, t) in targets.iter().enumerate() {
        let scale = shadow_norm_sq_f64(n, t.degree() / 2)?;
        out.insert(*t, Estimate { mean: scale * sums[i] as f64 / mcount, covered: counts[i] });
    }
    Ok(out)
}

/// `Σ_k λ_{n,k}^{-1} Σ_{|μ|=2k} h_μ²`; the identity coefficient is ignored.
pub fn shadow_norm_observable(h: &ObservableDecomposition) -> Result<f64> {
    let mut total = 0.0;
    for (mu, c) in &h.coefficients {
        if mu.degree() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("odd-degree term {mu}")));
        }
        total += c * c * shadow_norm_sq_f64(h.n, mu.degree() / 2)?;
    }
    Ok(total)
}

/// Single-shot variance `‖h‖²_shadow − tr(Hρ)²` for a traceless `H`.
pub fn variance_exact(h: &ObservableDecomposition, true_expectation: f64) -> Result<f64> {
    Ok(shadow_norm_observable(h)? - true_expectation * true_expectation)
}
