//! Number-conserving ensemble: per-operator channel eigenvalues
//! `λ_μ = E_{u ∈ Alt(n)} 3^{-loc(ũ(μ))}`, estimators and closed-form bounds.
//!
//! Whenever at least two modes are untouched by `μ`, `Alt(n)` acts on the
//! touched modes as uniformly as `Sym(n)` does, so the average equals the
//! average over injective maps of the touched modes. That reduces exact
//! enumeration from `n!/2` permutations to `n!/(n-m)!` maps and makes `λ_μ`
//! a function of the type class of `μ` only (see [`TypeClass`]).

use std::collections::{BTreeMap, HashMap};
use std::sync::RwLock;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::{binomial_rational, factorial, pochhammer};
use crate::error::{Error, Result};
use crate::fgu::Estimate;
use crate::majorana::MajoranaIndex;
use crate::mapping::{Mapping, MappingKind};
use crate::perm::{is_even, mode_perm_image, next_permutation, sample_alt, NCSetting};
use crate::rng::{substream, Domain};

/// Largest `n` for which the full `Alt(n)` is enumerated.
pub const EXACT_ALT_LIMIT: usize = 9;
/// Largest number of injective maps enumerated by the exact shortcut.
pub const EXACT_INJECTIVE_LIMIT: u64 = 5_000_000;
/// Relative standard error above which Monte Carlo eigenvalues are rejected.
pub const MAX_RELATIVE_STD_ERROR: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMethod {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum EigenProvenance {
    ExactEnumeration { group_elements: u64 },
    MonteCarlo { samples: u64, std_error: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NCEigenvalue {
    pub mu: MajoranaIndex,
    pub mapping: MappingKind,
    pub value: f64,
    /// Present for exact enumeration.
    pub exact: Option<BigRational>,
    pub provenance: EigenProvenance,
}

impl NCEigenvalue {
    pub fn std_error(&self) -> f64 {
        match self.provenance {
            EigenProvenance::ExactEnumeration { .. } => 0.0,
            EigenProvenance::MonteCarlo { std_error, .. } => std_error,
        }
    }

    pub fn relative_std_error(&self) -> f64 {
        self.std_error() / self.value
    }

    pub fn method_name(&self) -> &'static str {
        match self.provenance {
            EigenProvenance::ExactEnumeration { .. } => "exact",
            EigenProvenance::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

/// Counts of touched modes carrying only the even wire, only the odd wire, or both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TypeClass {
    pub even_only: usize,
    pub odd_only: usize,
    pub both: usize,
}

impl TypeClass {
    pub fn of(mu: &MajoranaIndex) -> Self {
        let mut c = TypeClass { even_only: 0, odd_only: 0, both: 0 };
        for p in mu.modes() {
            match (mu.contains(2 * p), mu.contains(2 * p + 1)) {
                (true, true) => c.both += 1,
                (true, false) => c.even_only += 1,
                _ => c.odd_only += 1,
            }
        }
        c
    }

    pub fn modes(&self) -> usize {
        self.even_only + self.odd_only + self.both
    }

    /// Lowest-mode representative: both-modes first, then even-only, then odd-only.
    pub fn representative(&self, n: usize) -> Result<MajoranaIndex> {
        let mut wires = Vec::new();
        let mut p = 0;
        for _ in 0..self.both {
            wires.extend([2 * p, 2 * p + 1]);
            p += 1;
        }
        for _ in 0..self.even_only {
            wires.push(2 * p);
            p += 1;
        }
        for _ in 0..self.odd_only {
            wires.push(2 * p + 1);
            p += 1;
        }
        wires.sort_unstable();
        MajoranaIndex::new(n, &wires)
    }

    /// All classes of total degree `d` on `n` modes.
    pub fn all_of_degree(n: usize, d: usize) -> Vec<TypeClass> {
        let mut out = Vec::new();
        for both in 0..=d / 2 {
            let singles = d - 2 * both;
            for even_only in 0..=singles {
                let c = TypeClass { even_only, odd_only: singles - even_only, both };
                if c.modes() <= n {
                    out.push(c);
                }
            }
        }
        out
    }
}

fn injective_count(n: usize, m: usize) -> u64 {
    (0..m as u64).fold(1u64, |acc, i| acc.saturating_mul(n as u64 - i))
}

/// `true` when the injective-map shortcut is exact for `μ`.
pub fn orbit_shortcut_applies(mu: &MajoranaIndex) -> bool {
    mu.n() >= mu.modes().len() + 2
}

/// Histogram of image localities, with the number of group elements averaged.
struct LocalityHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl LocalityHistogram {
    fn new(n: usize) -> Self {
        LocalityHistogram { counts: vec![0; n + 1], total: 0 }
    }

    fn merge(mut self, other: LocalityHistogram) -> Self {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
        self.total += other.total;
        self
    }

    fn exact_mean(&self) -> BigRational {
        let n = self.counts.len() - 1;
        let mut num = BigUint::zero();
        let three = BigUint::from(3u32);
        for (loc, &c) in self.counts.iter().enumerate() {
            num += three.pow((n - loc) as u32) * c;
        }
        let den = three.pow(n as u32) * self.total;
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

fn image_locality(m: &Mapping, mu: &MajoranaIndex, u: &[usize]) -> usize {
    let (_, img) = mode_perm_image(u, mu);
    m.to_pauli_unchecked(&img).locality()
}

fn enumerate_alt(m: &Mapping, mu: &MajoranaIndex) -> LocalityHistogram {
    let n = m.n();
    let mut h = LocalityHistogram::new(n);
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        if is_even(&p) {
            h.counts[image_locality(m, mu, &p)] += 1;
            h.total += 1;
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    h
}

/// Averages over all injective maps of the touched modes, in parallel over
/// the image of the first touched mode.
fn enumerate_injective(m: &Mapping, mu: &MajoranaIndex) -> LocalityHistogram {
    let n = m.n();
    let modes = mu.modes();
    if modes.is_empty() {
        let mut h = LocalityHistogram::new(n);
        h.counts[0] = 1;
        h.total = 1;
        return h;
    }
    (0..n)
        .into_par_iter()
        .map(|first| {
            let mut h = LocalityHistogram::new(n);
            let mut images = vec![first];
            let mut used = vec![false; n];
            used[first] = true;
            let mut u = vec![0usize; n];
            walk_injective(m, mu, &modes, &mut images, &mut used, &mut u, &mut h);
            h
        })
        .reduce(|| LocalityHistogram::new(n), LocalityHistogram::merge)
}

fn walk_injective(
    m: &Mapping,
    mu: &MajoranaIndex,
    modes: &[usize],
    images: &mut Vec<usize>,
    used: &mut [bool],
    u: &mut [usize],
    h: &mut LocalityHistogram,
) {
    if images.len() == modes.len() {
        // only the touched modes' images matter for ũ(μ)
        for (&p, &img) in modes.iter().zip(images.iter()) {
            u[p] = img;
        }
        h.counts[image_locality(m, mu, u)] += 1;
        h.total += 1;
        return;
    }
    for c in 0..used.len() {
        if !used[c] {
            used[c] = true;
            images.push(c);
            walk_injective(m, mu, modes, images, used, u, h);
            images.pop();
            used[c] = false;
        }
    }
}

/// `λ_μ = E_{u ∈ Alt(n)} 3^{-loc(ũ(μ))}` for the given mapping.
pub fn nc_eigenvalue(mu: &MajoranaIndex, m: &Mapping, method: EigenMethod) -> Result<NCEigenvalue> {
    if mu.n() != m.n() {
        return Err(Error::ModeMismatch { expected: m.n(), found: mu.n() });
    }
    let n = m.n();
    match method {
        EigenMethod::Exact => {
            let shortcut = orbit_shortcut_applies(mu);
            let hist = if shortcut && injective_count(n, mu.modes().len()) <= EXACT_INJECTIVE_LIMIT {
                enumerate_injective(m, mu)
            } else if n <= EXACT_ALT_LIMIT {
                enumerate_alt(m, mu)
            } else {
                return Err(Error::SizeLimit { n, limit: EXACT_ALT_LIMIT });
            };
            let exact = hist.exact_mean();
            Ok(NCEigenvalue {
                mu: *mu,
                mapping: m.kind(),
                value: exact.to_f64().unwrap_or(0.0),
                exact: Some(exact),
                provenance: EigenProvenance::ExactEnumeration { group_elements: hist.total },
            })
        }
        EigenMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::InvalidArgument("Monte Carlo needs at least 2 samples".into()));
            }
            let (sum, sumsq) = monte_carlo_moments(m, mu, samples, seed);
            let mean = sum / samples as f64;
            let var = ((sumsq - samples as f64 * mean * mean) / (samples as f64 - 1.0)).max(0.0);
            Ok(NCEigenvalue {
                mu: *mu,
                mapping: m.kind(),
                value: mean,
                exact: None,
                provenance: EigenProvenance::MonteCarlo { samples, std_error: (var / samples as f64).sqrt() },
            })
        }
    }
}

const MC_CHUNK: u64 = 4096;

fn monte_carlo_moments(m: &Mapping, mu: &MajoranaIndex, samples: u64, seed: u64) -> (f64, f64) {
    // chunk c draws from substream c, so the result is independent of thread count
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, Domain::EigenMonteCarlo, c);
            let count = MC_CHUNK.min(samples - c * MC_CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let u = sample_alt(m.n(), &mut rng).expect("n >= 1");
                let v = 3f64.powi(-(image_locality(m, mu, &u) as i32));
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    parts.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d))
}

/// Eigenvalue cache shared across threads. Entries are keyed by type class
/// when the orbit shortcut applies and by the monomial itself otherwise.
pub struct EigenCache {
    mapping: Mapping,
    method: EigenMethod,
    by_class: RwLock<HashMap<TypeClass, NCEigenvalue>>,
    by_index: RwLock<HashMap<MajoranaIndex, NCEigenvalue>>,
}

impl EigenCache {
    pub fn new(mapping: Mapping, method: EigenMethod) -> Self {
        EigenCache { mapping, method, by_class: RwLock::new(HashMap::new()), by_index: RwLock::new(HashMap::new()) }
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    pub fn get(&self, mu: &MajoranaIndex) -> Result<NCEigenvalue> {
        if orbit_shortcut_applies(mu) {
            let class = TypeClass::of(mu);
            if let Some(v) = self.by_class.read().expect("cache lock").get(&class) {
                return Ok(NCEigenvalue { mu: *mu, ..v.clone() });
            }
            let rep = class.representative(self.mapping.n())?;
            let v = nc_eigenvalue(&rep, &self.mapping, self.method)?;
            self.by_class.write().expect("cache lock").insert(class, v.clone());
            Ok(NCEigenvalue { mu: *mu, ..v })
        } else {
            if let Some(v) = self.by_index.read().expect("cache lock").get(mu) {
                return Ok(v.clone());
            }
            let v = nc_eigenvalue(mu, &self.mapping, self.method)?;
            self.by_index.write().expect("cache lock").insert(*mu, v.clone());
            Ok(v)
        }
    }
}

/// `sign · phase · Π_{j ∈ supp} (-1)^{z_j}` when every letter of the image of
/// `μ` matches the setting's basis, else 0 (no `λ^{-1}` factor).
pub fn raw_estimate_nc(setting: &NCSetting, outcome: u64, mu: &MajoranaIndex, m: &Mapping) -> Result<i8> {
    if setting.n() != m.n() || mu.n() != m.n() {
        return Err(Error::ModeMismatch { expected: m.n(), found: setting.n().min(mu.n()) });
    }
    let (sign, img) = mode_perm_image(setting.modes(), mu);
    let p = m.to_pauli_unchecked(&img);
    let supp = p.support();
    let (bx, bz) = setting.basis_bits();
    if p.x_bits() != bx & supp || p.z_bits() != bz & supp {
        return Ok(0);
    }
    let phase = p.phase().as_sign().expect("Hermitian monomials have real Pauli phases");
    let parity = if (outcome & supp).count_ones() % 2 == 1 { -1 } else { 1 };
    Ok(sign * phase * parity)
}

/// Single-sample estimate `λ_μ^{-1} · raw` of `tr(Γ_μ ρ)`.
pub fn estimate_majorana_nc(
    setting: &NCSetting,
    outcome: u64,
    mu: &MajoranaIndex,
    m: &Mapping,
    lambda: &NCEigenvalue,
) -> Result<f64> {
    if lambda.mapping != m.kind() {
        return Err(Error::InvalidArgument(format!(
            "eigenvalue computed for {} but mapping is {}",
            lambda.mapping,
            m.kind()
        )));
    }
    if lambda.mu != *mu {
        return Err(Error::InvalidArgument(format!("eigenvalue is for {} not {mu}", lambda.mu)));
    }
    Ok(raw_estimate_nc(setting, outcome, mu, m)? as f64 / lambda.value)
}

/// `true` if the setting's basis reads the image of `μ`.
pub fn nc_covered(setting: &NCSetting, mu: &MajoranaIndex, m: &Mapping) -> bool {
    let (_, img) = mode_perm_image(setting.modes(), mu);
    let p = m.to_pauli_unchecked(&img);
    let supp = p.support();
    let (bx, bz) = setting.basis_bits();
    p.x_bits() == bx & supp && p.z_bits() == bz & supp
}

/// An NC setting with the observed bitstring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCSample {
    pub setting: NCSetting,
    pub outcome: u64,
}

/// Sample means of the NC estimators for every target, with eigenvalues
/// drawn from `cache`. Integer sums keep the parallel reduction deterministic.
pub fn estimate_all_nc(
    samples: &[NCSample],
    targets: &[MajoranaIndex],
    cache: &EigenCache,
) -> Result<BTreeMap<MajoranaIndex, Estimate>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let m = cache.mapping();
    let lambdas = targets.iter().map(|t| cache.get(t)).collect::<Result<Vec<_>>>()?;
    if let Some(l) = lambdas.iter().find(|l| l.relative_std_error() > MAX_RELATIVE_STD_ERROR) {
        return Err(Error::NoisyEigenvalue(l.relative_std_error()));
    }
    if let Some(s) = samples.iter().find(|s| s.setting.n() != m.n()) {
        return Err(Error::ModeMismatch { expected: m.n(), found: s.setting.n() });
    }
    let len = targets.len();
    let (sums, counts) = samples
        .par_iter()
        .map(|s| {
            let mut sums = vec![0i64; len];
            let mut counts = vec![0u64; len];
            for (i, t) in targets.iter().enumerate() {
                let raw = raw_estimate_nc(&s.setting, s.outcome, t, m)?;
                if raw != 0 {
                    sums[i] = raw as i64;
                    counts[i] = 1;
                }
            }
            Ok::<_, Error>((sums, counts))
        })
        .try_reduce(
            || (vec![0i64; len], vec![0u64; len]),
            |(mut a, mut ac), (b, bc)| {
                for i in 0..len {
                    a[i] += b[i];
                    ac[i] += bc[i];
                }
                Ok((a, ac))
            },
        )?;
    let total = samples.len() as f64;
    Ok(targets
        .iter()
        .zip(&lambdas)
        .enumerate()
        .map(|(i, (t, lam))| (*t, Estimate { mean: sums[i] as f64 / lam.value / total, covered: counts[i] }))
        .collect())
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k == 0 || n < 2 * k {
        return Err(Error::DegreeOutOfRange { n, k });
    }
    Ok(())
}

/// `9^k · C(n,2k) / C(n−k,k)`.
pub fn nc_upper_bound(n: usize, k: usize) -> Result<BigRational> {
    check_nk(n, k)?;
    let nine_k = BigRational::from_integer(BigInt::from(9u32).pow(k as u32));
    Ok(nine_k * binomial_rational(n as u64, 2 * k as u64) / binomial_rational((n - k) as u64, k as u64))
}

/// Terminating series `₂F₁(k, 2k−n; k−n; 1/3) = Σ_ℓ 3^{-ℓ} (k)_ℓ (2k−n)_ℓ / ((k−n)_ℓ ℓ!)`.
pub fn hypergeometric_factor(n: usize, k: usize) -> Result<BigRational> {
    check_nk(n, k)?;
    let (ni, ki) = (n as i64, k as i64);
    let mut sum = BigRational::zero();
    for l in 0..=(n - 2 * k) as u64 {
        let num = pochhammer(ki, l) * pochhammer(2 * ki - ni, l);
        let den = pochhammer(ki - ni, l)
            * BigRational::from_integer(BigInt::from(factorial(l)))
            * BigRational::from_integer(BigInt::from(3u32).pow(l as u32));
        sum += num / den;
    }
    Ok(sum)
}

/// `E_{u ∈ Sym(n)} 3^{-loc}` for a maximally nonlocal degree-`2k` JW monomial,
/// `C(n,2k)^{-1} C(n−k,k) 9^{-k} ₂F₁(k, 2k−n; k−n; 1/3)`, as an exact rational.
pub fn max_locality_average_exact(n: usize, k: usize) -> Result<BigRational> {
    let f = hypergeometric_factor(n, k)?;
    let nine_k = BigRational::from_integer(BigInt::from(9u32).pow(k as u32));
    Ok(binomial_rational((n - k) as u64, k as u64) / binomial_rational(n as u64, 2 * k as u64) / nine_k * f)
}

pub fn max_locality_average(n: usize, k: usize) -> Result<f64> {
    Ok(max_locality_average_exact(n, k)?.to_f64().unwrap_or(0.0))
}

/// `λ_μ^{-1}`.
pub fn nc_shadow_norm_sq(mu: &MajoranaIndex, m: &Mapping, method: EigenMethod) -> Result<f64> {
    Ok(1.0 / nc_eigenvalue(mu, m, method)?.value)
}

/// Largest `λ_μ^{-1}` over all degree-`d` monomials, using type classes when
/// they are exact (`n ≥ d + 2` touched-mode slack) and a full sweep otherwise.
pub fn max_nc_shadow_norm_sq(
    n: usize,
    d: usize,
    m: &Mapping,
    method: EigenMethod,
) -> Result<(MajoranaIndex, NCEigenvalue)> {
    if m.n() != n {
        return Err(Error::ModeMismatch { expected: m.n(), found: n });
    }
    let cache = EigenCache::new(m.clone(), method);
    let mut best: Option<(MajoranaIndex, NCEigenvalue)> = None;
    let candidates: Vec<MajoranaIndex> = if n >= d + 2 {
        TypeClass::all_of_degree(n, d).into_iter().map(|c| c.representative(n)).collect::<Result<_>>()?
    } else {
        MajoranaIndex::all_of_degree(n, d).collect()
    };
    for mu in candidates {
        let v = cache.get(&mu)?;
        if best.as_ref().is_none_or(|(_, b)| v.value < b.value) {
            best = Some((mu, v));
        }
    }
    best.ok_or(Error::DegreeOutOfRange { n, k: d })
}
