//! Dense and enumerative cross-checks at small sizes.

use std::collections::HashMap;

use fermion_shadows::combinatorics::{binomial_u128, combinations};
use fermion_shadows::fermion::{fermion_to_majorana, FermionTerm};
use fermion_shadows::majorana::MajoranaIndex;
use fermion_shadows::nc::{max_nc_shadow_norm_sq, EigenMethod};
use fermion_shadows::perm::{alternating_group, sample_alt};
use fermion_shadows::sim::{
    exact_majorana_expectations, ladder_expectation, majorana_dense, reference_state, StateSpec,
};
use fermion_shadows::{Mapping, MappingKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [MappingKind; 2] = [MappingKind::JordanWigner, MappingKind::BravyiKitaev];

#[test]
fn diagonal_set_sizes() {
    for kind in KINDS {
        for n in 1..=4 {
            let m = Mapping::new(kind, n).unwrap();
            let mut total = 0;
            for k in 1..=n {
                let d = m.diagonal_set(k).unwrap();
                assert_eq!(d.len() as u128, binomial_u128(n as u64, k as u64).unwrap(), "{kind} n={n} k={k}");
                assert!(d.iter().all(|mu| m.is_diagonal(mu) && mu.degree() == 2 * k));
                total += d.len();
            }
            assert_eq!(total, (1 << n) - 1);
        }
    }
}

#[test]
fn diagonal_elements_match_dense() {
    for kind in KINDS {
        for n in 1..=3 {
            let m = Mapping::new(kind, n).unwrap();
            for k in 1..=n {
                for mu in m.diagonal_set(k).unwrap() {
                    let dense = majorana_dense(&mu, &m).unwrap();
                    for z in 0..1u64 << n {
                        let want = dense[(z as usize, z as usize)];
                        assert!(want.im.abs() < 1e-12);
                        assert_eq!(m.diag_matrix_element(&mu, z).unwrap() as f64, want.re, "{kind} {mu} z={z}");
                    }
                }
            }
        }
    }
}

/// Majorana expansions of even normal-ordered monomials reproduce the
/// sparse ladder action on random states.
#[test]
fn fermion_expansion_matches_ladder_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for kind in KINDS {
        for n in 1..=3 {
            let m = Mapping::new(kind, n).unwrap();
            let rho = reference_state(n, &StateSpec::RandomMixed(rng.random()), &m).unwrap();
            let g = exact_majorana_expectations(&rho, 2 * n, &m).unwrap();
            for c in 0..=n {
                for a in (0..=n).filter(|a| (a + c) % 2 == 0) {
                    for cre in combinations(n, c) {
                        for ann in combinations(n, a) {
                            let term = FermionTerm::normal(&cre, &ann, Complex64::new(1.0, 0.0));
                            let exp = fermion_to_majorana(n, &term).unwrap();
                            let via_g: Complex64 = exp
                                .terms
                                .iter()
                                .map(|(mu, coeff)| coeff * if mu.is_identity() { 1.0 } else { g[mu] })
                                .sum();
                            let direct = ladder_expectation(&rho, &term, &m);
                            assert!((via_g - direct).norm() < 1e-10, "{kind} {cre:?} {ann:?}: {via_g} vs {direct}");
                        }
                    }
                }
            }
        }
    }
}

/// Chi-square goodness of fit of 10^5 draws against the uniform law on
/// Alt(d), at the 1% level.
#[test]
fn sample_alt_is_uniform() {
    // upper 1% points of chi-square with 2 and 11 degrees of freedom
    for (d, critical) in [(3usize, 9.2103), (4, 24.7250)] {
        let group = alternating_group(d);
        let mut counts: HashMap<Vec<usize>, u64> = group.iter().map(|p| (p.clone(), 0)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
        let draws = 100_000u64;
        for _ in 0..draws {
            *counts.get_mut(&sample_alt(d, &mut rng).unwrap()).expect("draw lies in Alt(d)") += 1;
        }
        let expected = draws as f64 / group.len() as f64;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < critical, "d={d}: chi2 = {chi2}");
    }
}

/// The worst degree-4 NC shadow norm is no larger under BK than under JW.
#[test]
fn bk_no_worse_than_jw_at_degree_four() {
    for (n, method) in [(8, EigenMethod::Exact), (12, EigenMethod::MonteCarlo { samples: 200_000, seed: 5 })] {
        let worst = |kind| {
            let m = Mapping::new(kind, n).unwrap();
            let (mu, lam) = max_nc_shadow_norm_sq(n, 4, &m, method).unwrap();
            (mu, 1.0 / lam.value, lam.std_error() / (lam.value * lam.value))
        };
        let (_, jw, jw_se) = worst(MappingKind::JordanWigner);
        let (mu, bk, bk_se) = worst(MappingKind::BravyiKitaev);
        let slack = 3.0 * (jw_se.powi(2) + bk_se.powi(2)).sqrt();
        assert!(bk <= jw + slack, "n={n}: BK {bk} at {mu} vs JW {jw} (slack {slack})");
    }
}

#[test]
fn majorana_degrees_cover_all_even_monomials() {
    let n = 3;
    let all: usize = (0..=n).map(|k| MajoranaIndex::all_of_degree(n, 2 * k).count()).sum();
    assert_eq!(all, 1 << (2 * n - 1));
}
