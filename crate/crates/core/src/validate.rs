//! Exhaustive small-n oracle suite behind `fermion-shadows validate`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::combinatorics::binomial;
use crate::error::Result;
use crate::fgu::{channel_eigenvalue, estimate_majorana, shadow_norm_sq, ShadowSample};
use crate::majorana::MajoranaIndex;
use crate::mapping::{Mapping, MappingKind};
use crate::nc::{estimate_majorana_nc, nc_eigenvalue, EigenCache, EigenMethod};
use crate::observables::assemble_rdm;
use crate::pauli::Letter;
use crate::perm::{alternating_group, NCSetting, PermSetting, Setting};
use crate::planner::{eqot, strategy_count, Strategy};
use crate::rng::{substream, Domain};
use crate::sim::{
    build_setting_unitary, exact_majorana_expectations, exact_rdm, gamma_dense, max_abs, outcome_distribution,
    outcome_distribution_from_expectations, reference_state, DenseState, StateSpec,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

fn all_settings(n: usize) -> Vec<PermSetting> {
    alternating_group(2 * n).into_iter().map(|p| PermSetting::new(p).expect("group elements are even")).collect()
}

/// `E_Q Σ_{σ ∈ D} |det Q_{σ,τ}|` for every degree-`2k` τ, by brute force over Alt(2n).
pub fn frame_averages(n: usize, k: usize, m: &Mapping) -> Result<BTreeMap<MajoranaIndex, BigRational>> {
    let group = all_settings(n);
    let diag = m.diagonal_set(k)?;
    let mut out = BTreeMap::new();
    for tau in MajoranaIndex::all_of_degree(n, 2 * k) {
        let mut hits = 0i64;
        for q in &group {
            for sigma in &diag {
                hits += q.subdeterminant(sigma, &tau)?.abs() as i64;
            }
        }
        out.insert(tau, BigRational::new(BigInt::from(hits), BigInt::from(group.len())));
    }
    Ok(out)
}

/// `(1/|G|) Σ_Q (Σ_{|μ|=k} det Q_{μ,μ})²` over `G = Alt(2n)`.
pub fn character_norm(n: usize, k: usize) -> Result<BigRational> {
    let group = all_settings(n);
    let monomials: Vec<MajoranaIndex> = MajoranaIndex::all_of_degree(n, k).collect();
    let mut total = BigInt::zero();
    for q in &group {
        let mut chi = 0i64;
        for mu in &monomials {
            chi += q.subdeterminant(mu, mu)? as i64;
        }
        total += BigInt::from(chi * chi);
    }
    Ok(BigRational::new(total, BigInt::from(group.len())))
}

/// Character norm predicted by decomposing the natural permutation module:
/// `Λ^k(std ⊕ 1) = Λ^k std ⊕ Λ^{k−1} std`, whose two summands coincide on
/// Alt(2n) exactly when `k = n`.
pub fn predicted_character_norm(n: usize, k: usize) -> u64 {
    if k == 0 || k == 2 * n {
        1
    } else if k == n {
        4
    } else {
        2
    }
}

/// Outcome-weighted average of the FGU estimator over all of Alt(2n).
pub fn fgu_ensemble_average(
    state: &DenseState,
    max_degree: usize,
    m: &Mapping,
) -> Result<BTreeMap<MajoranaIndex, f64>> {
    let n = state.n;
    let targets: Vec<MajoranaIndex> =
        (1..=max_degree / 2).flat_map(|j| MajoranaIndex::all_of_degree(n, 2 * j)).collect();
    let group = all_settings(n);
    let mut acc: BTreeMap<MajoranaIndex, f64> = targets.iter().map(|t| (*t, 0.0)).collect();
    for q in group.iter() {
        let probs = outcome_distribution(state, &Setting::Fgu(q.clone()), m)?;
        for (z, &p) in probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let sample = ShadowSample { setting: q.clone(), outcome: z as u64 };
            for t in &targets {
                *acc.get_mut(t).expect("target") += p * estimate_majorana(&sample, t, m)?;
            }
        }
    }
    let g = group.len() as f64;
    Ok(acc.into_iter().map(|(k, v)| (k, v / g)).collect())
}

/// Every NC setting: Alt(n) mode permutations times all `3^n` bases.
pub fn all_nc_settings(n: usize) -> Vec<NCSetting> {
    const LETTERS: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];
    let mut out = Vec::new();
    for u in alternating_group(n) {
        for code in 0..3usize.pow(n as u32) {
            let basis = (0..n).map(|q| LETTERS[code / 3usize.pow(q as u32) % 3]).collect();
            out.push(NCSetting::new(u.clone(), basis).expect("valid NC setting"));
        }
    }
    out
}

/// Outcome-weighted average of the NC estimator over the full ensemble.
pub fn nc_ensemble_average(state: &DenseState, max_degree: usize, m: &Mapping) -> Result<BTreeMap<MajoranaIndex, f64>> {
    let n = state.n;
    let cache = EigenCache::new(m.clone(), EigenMethod::Exact);
    let targets: Vec<_> = (1..=max_degree / 2)
        .flat_map(|j| MajoranaIndex::all_of_degree(n, 2 * j))
        .map(|t| cache.get(&t).map(|l| (t, l)))
        .collect::<Result<_>>()?;
    let settings = all_nc_settings(n);
    let mut acc: BTreeMap<MajoranaIndex, f64> = targets.iter().map(|(t, _)| (*t, 0.0)).collect();
    for s in &settings {
        let probs = outcome_distribution(state, &Setting::Nc(s.clone()), m)?;
        for (z, &p) in probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (t, lam) in &targets {
                *acc.get_mut(t).expect("target") += p * estimate_majorana_nc(s, z as u64, t, m, lam)?;
            }
        }
    }
    let c = settings.len() as f64;
    Ok(acc.into_iter().map(|(k, v)| (k, v / c)).collect())
}

fn max_deviation(a: &BTreeMap<MajoranaIndex, f64>, b: &BTreeMap<MajoranaIndex, f64>) -> f64 {
    a.iter().map(|(k, v)| (v - b.get(k).copied().unwrap_or(f64::NAN)).abs()).fold(0.0, f64::max)
}

/// Max `‖U γ_j U† − γ_{π(j)}‖` over wires.
pub fn adjoint_action_error(q: &PermSetting, m: &Mapping) -> Result<f64> {
    let u = build_setting_unitary(q, m)?;
    let mut worst: f64 = 0.0;
    for j in 0..2 * q.n() {
        let lhs = &u * gamma_dense(j, m)? * u.adjoint();
        let rhs = gamma_dense(q.images()[j], m)?;
        worst = worst.max(max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

/// Runs the suite; `quick` restricts to `n = 2`.
pub fn run_validation(quick: bool) -> Result<Vec<Check>> {
    let sizes: &[usize] = if quick { &[2] } else { &[2, 3] };
    let mut checks = Vec::new();
    let kinds = [MappingKind::JordanWigner, MappingKind::BravyiKitaev];

    for &n in sizes {
        let m = Mapping::jordan_wigner(n)?;
        for k in 1..=n {
            let want = channel_eigenvalue(n, k)?;
            let avgs = frame_averages(n, k, &m)?;
            let bad = avgs.values().filter(|v| **v != want).count();
            checks.push(Check::new(
                format!("tight-frame n={n} k={k}"),
                bad == 0,
                format!("λ = {want}, {bad} mismatches"),
            ));
        }
        for k in 1..=2 * n {
            let got = character_norm(n, k)?;
            let want = predicted_character_norm(n, k);
            checks.push(Check::new(
                format!("character-norm n={n} k={k}"),
                got == BigRational::from_integer(BigInt::from(want)),
                format!("{got} (predicted {want})"),
            ));
        }
    }

    for &n in sizes {
        for kind in kinds {
            let m = Mapping::new(kind, n)?;
            let mut rng = substream(0, Domain::Validation, n as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                worst = worst.max(adjoint_action_error(&PermSetting::sample(n, &mut rng)?, &m)?);
            }
            checks.push(Check::new(
                format!("adjoint-action n={n} {}", kind.short_name()),
                worst < 1e-12,
                format!("{worst:e}"),
            ));

            let state = reference_state(n, &StateSpec::RandomMixed(n as u64), &m)?;
            let g = exact_majorana_expectations(&state, 2 * n, &m)?;
            let mut worst: f64 = 0.0;
            for _ in 0..10 {
                let q = PermSetting::sample(n, &mut rng)?;
                let dense = outcome_distribution(&state, &Setting::Fgu(q.clone()), &m)?;
                let expanded = outcome_distribution_from_expectations(&g, &q, &m)?;
                for (a, b) in dense.iter().zip(&expanded) {
                    worst = worst.max((a - b).abs());
                }
            }
            checks.push(Check::new(
                format!("distribution-paths n={n} {}", kind.short_name()),
                worst < 1e-10,
                format!("{worst:e}"),
            ));

            let dev = max_deviation(&fgu_ensemble_average(&state, 2 * n, &m)?, &g);
            checks.push(Check::new(
                format!("fgu-unbiased n={n} {}", kind.short_name()),
                dev < 1e-10,
                format!("{dev:e}"),
            ));
            let dev = max_deviation(&nc_ensemble_average(&state, 2 * n, &m)?, &g);
            checks.push(Check::new(
                format!("nc-unbiased n={n} {}", kind.short_name()),
                dev < 1e-10,
                format!("{dev:e}"),
            ));

            let kmax = n.min(2);
            let assembled = assemble_rdm(&g, n, kmax)?;
            let exact = exact_rdm(&state, kmax, &m)?;
            let dev = assembled.max_abs_diff(&exact);
            checks.push(Check::new(
                format!("rdm-assembly n={n} k={kmax} {}", kind.short_name()),
                dev < 1e-10,
                format!("{dev:e}"),
            ));
        }
    }

    let lam = nc_eigenvalue(&MajoranaIndex::new(3, &[0, 2])?, &Mapping::jordan_wigner(3)?, EigenMethod::Exact)?;
    let seven_81 = BigRational::new(BigInt::from(7), BigInt::from(81));
    checks.push(Check::new(
        "nc-eigenvalue (0,2) n=3 jw",
        lam.exact.as_ref() == Some(&seven_81),
        format!("{}", lam.value),
    ));

    let norm = shadow_norm_sq(50, 2)?;
    checks.push(Check::new("shadow-norm (50,2)", norm.to_u64() == Some(3201), format!("{norm}")));
    let diag_sizes = (1..=3).all(|k| {
        Mapping::bravyi_kitaev(6)
            .and_then(|m| m.diagonal_set(k))
            .map(|d| binomial(6, k as u64) == d.len().into())
            .unwrap_or(false)
    });
    checks.push(Check::new("diagonal-set sizes n=6", diag_sizes, "|D| = C(n,k)"));

    let counts = [
        (strategy_count(Strategy::Swap1, 1, 12)?, 25),
        (eqot(4, 8)?, 1215),
        (strategy_count(Strategy::Mt2, 2, 8)?, 6833),
        (strategy_count(Strategy::Naive, 1, 4)?, 90),
    ];
    let ok = counts.iter().all(|(a, b)| a == b);
    checks.push(Check::new("strategy counts", ok, format!("{:?}", counts.map(|c| c.0))));
    Ok(checks)
}
